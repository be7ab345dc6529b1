"""Routing information base: neighbor table plus redirect cache.

Entries carry an absolute expiry time; expiry <= now counts as expired.
Dump lines (stable text interface):
  ES <address-hex> via <snpa-hex> expires <t>
  IS <address-hex> via <snpa-hex> expires <t>
  RD <dest-hex> -> <snpa-hex> [net <net-hex>] expires <t>
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class EntryKind(enum.Enum):
    ES_NEIGHBOR = "ES"
    IS_NEIGHBOR = "IS"


class InsertResult(enum.Enum):
    INSERTED = "Inserted"
    REPLACED = "Replaced"


class HopKind(enum.Enum):
    DIRECT = "Direct"
    VIA_IS = "ViaIs"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class NextHop:
    kind: HopKind
    snpa: bytes | None = None


UNKNOWN_HOP = NextHop(HopKind.UNKNOWN)


@dataclass
class RibEntry:
    kind: EntryKind
    address: bytes
    snpa: bytes
    expiry: int

    def dump_line(self) -> str:
        return (f"{self.kind.value} {self.address.hex()} "
                f"via {self.snpa.hex()} expires {self.expiry}")


@dataclass
class RedirectEntry:
    destination: bytes
    better_snpa: bytes
    redirect_net: bytes | None
    expiry: int
    holding_time: int

    def dump_line(self) -> str:
        net = f" net {self.redirect_net.hex()}" if self.redirect_net else ""
        return (f"RD {self.destination.hex()} -> {self.better_snpa.hex()}"
                f"{net} expires {self.expiry}")


class Rib:
    """Neighbor entries and redirects in insertion order, with expiry."""

    def __init__(self) -> None:
        self.entries: list[RibEntry] = []
        self.redirects: list[RedirectEntry] = []
        self.num_of_entry = 0

    def insert_entry(self, kind: EntryKind, address: bytes, snpa: bytes,
                     holding_time: int, now: int) -> InsertResult:
        """Upsert keyed on (kind, address); replacing keeps list position."""
        for e in self.entries:
            if e.kind is kind and e.address == address:
                e.snpa = snpa
                e.expiry = now + holding_time
                return InsertResult.REPLACED
        self.entries.append(RibEntry(kind, address, snpa, now + holding_time))
        self.num_of_entry += 1
        return InsertResult.INSERTED

    def lookup(self, address: bytes, now: int) -> RibEntry | None:
        for e in self.entries:
            if e.address == address and e.expiry > now:
                return e
        return None

    def lookup_redirect(self, destination: bytes, now: int) -> RedirectEntry | None:
        for r in self.redirects:
            if r.destination == destination and r.expiry > now:
                return r
        return None

    def flush_expired(self, now: int) -> int:
        """Drop every entry and redirect with expiry <= now."""
        before = len(self.entries) + len(self.redirects)
        self.entries = [e for e in self.entries if e.expiry > now]
        self.redirects = [r for r in self.redirects if r.expiry > now]
        self.num_of_entry = len(self.entries)
        return before - len(self.entries) - len(self.redirects)

    def record_redirect(self, destination: bytes, better_snpa: bytes,
                        redirect_net: bytes | None, holding_time: int,
                        now: int) -> InsertResult:
        for r in self.redirects:
            if r.destination == destination:
                r.better_snpa = better_snpa
                r.redirect_net = redirect_net
                r.expiry = now + holding_time
                r.holding_time = holding_time
                return InsertResult.REPLACED
        self.redirects.append(RedirectEntry(destination, better_snpa,
                                            redirect_net, now + holding_time,
                                            holding_time))
        return InsertResult.INSERTED

    def refresh_redirect(self, destination: bytes, observed_snpa: bytes,
                         now: int, holding_time: int) -> bool:
        """Extend a redirect only when traffic came over the same SNPA."""
        for r in self.redirects:
            if r.destination == destination and r.better_snpa == observed_snpa:
                r.expiry = now + holding_time
                return True
        return False

    def next_hop(self, destination: bytes, now: int) -> NextHop:
        """Redirect first, then direct ES neighbor, then any live IS."""
        r = self.lookup_redirect(destination, now)
        if r is not None:
            return NextHop(HopKind.DIRECT, r.better_snpa)
        for e in self.entries:
            if (e.kind is EntryKind.ES_NEIGHBOR and e.address == destination
                    and e.expiry > now):
                return NextHop(HopKind.DIRECT, e.snpa)
        # Most recently inserted live IS wins.
        for e in reversed(self.entries):
            if e.kind is EntryKind.IS_NEIGHBOR and e.expiry > now:
                return NextHop(HopKind.VIA_IS, e.snpa)
        return UNKNOWN_HOP

    def has_live_is(self, now: int) -> bool:
        return any(e.kind is EntryKind.IS_NEIGHBOR and e.expiry > now
                   for e in self.entries)

    def dump(self, now: int) -> list[str]:
        """Live entries, sections ES / IS / RD, each in insertion order."""
        lines = [e.dump_line() for e in self.entries
                 if e.kind is EntryKind.ES_NEIGHBOR and e.expiry > now]
        lines += [e.dump_line() for e in self.entries
                  if e.kind is EntryKind.IS_NEIGHBOR and e.expiry > now]
        lines += [r.dump_line() for r in self.redirects if r.expiry > now]
        return lines
