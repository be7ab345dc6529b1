"""Per-node protocol engine: hello emission, input dispatch, redirects.

An engine is a pure state machine: timer fires and received frames go in,
EngineEvent values come out. All I/O belongs to the simulator.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from . import pdu as pdu_mod
from .checksum import generate_checksum
from .pdu import (AaBody, DiscardReason, EshBody, IshBody, LENIENT, NLPID_CLNP,
                  NLPID_ESIS, Option, OptionCode, Pdu, ProtocolDetail, RaBody,
                  RdBody, SNPA_LEN, ValidationProfile, protocol_error)
from .rib import EntryKind, HopKind, InsertResult, NextHop, Rib

ALL_ES = bytes.fromhex("09002b000004")
ALL_IS = bytes.fromhex("09002b000005")
BROADCAST = b"\xff" * 6


class Role(enum.Enum):
    END_SYSTEM = "es"
    INTERMEDIATE_SYSTEM = "is"


@dataclass(frozen=True)
class Frame:
    destination: bytes
    source: bytes
    payload: bytes


@dataclass(frozen=True)
class MinimalClnpPdu:
    source: bytes
    destination: bytes


def encode_clnp(source: bytes, destination: bytes) -> bytes:
    """Two-address CLNP stub: NLPID, {len, src}, {len, dst}."""
    return bytes([NLPID_CLNP, len(source)]) + source \
        + bytes([len(destination)]) + destination


def decode_clnp(payload: bytes) -> MinimalClnpPdu | None:
    if len(payload) < 2 or payload[0] != NLPID_CLNP:
        return None
    off = 1
    slen = payload[off]
    off += 1
    if off + slen + 1 > len(payload):
        return None
    src = payload[off:off + slen]
    off += slen
    dlen = payload[off]
    off += 1
    if off + dlen > len(payload):
        return None
    return MinimalClnpPdu(src, payload[off:off + dlen])


@dataclass(frozen=True)
class ForwardingEntry:
    prefix: bytes
    next_is_net: bytes
    next_is_snpa: bytes


@dataclass
class NodeConfig:
    role: Role
    snpa: bytes
    local_nsaps: tuple[bytes, ...] = ()
    local_net: bytes | None = None
    configuration_timer: int = 30
    holding_multiplier: int = 2
    validation_profile: ValidationProfile = LENIENT
    forwarding_table: tuple[ForwardingEntry, ...] = ()


# Engine events -------------------------------------------------------------

@dataclass(frozen=True)
class SendFrame:
    frame: Frame


@dataclass(frozen=True)
class RibChanged:
    line: str


@dataclass(frozen=True)
class Discarded:
    reason: DiscardReason


@dataclass(frozen=True)
class AddressAssigned:
    net: bytes


@dataclass(frozen=True)
class RedirectIssued:
    destination: bytes
    snpa: bytes


@dataclass(frozen=True)
class TimerSet:
    at: int


EngineEvent = SendFrame | RibChanged | Discarded | AddressAssigned | RedirectIssued | TimerSet

_ROLE_MISMATCH = Discarded(protocol_error(ProtocolDetail.ROLE_MISMATCH))


class Node:
    def __init__(self, config: NodeConfig) -> None:
        if config.role is Role.INTERMEDIATE_SYSTEM and config.local_net is None:
            raise ValueError("an intermediate system needs a local NET")
        if config.holding_multiplier < 2:
            raise ValueError("holding multiplier must be ≥ 2")
        if config.configuration_timer <= 0:
            raise ValueError("configuration timer must be > 0")
        self.config = config
        self.rib = Rib()
        self.ct = config.configuration_timer
        self.acquired_net: bytes | None = None

    @property
    def is_intermediate(self) -> bool:
        return self.config.role is Role.INTERMEDIATE_SYSTEM

    @property
    def holding_time(self) -> int:
        return min(self.config.holding_multiplier * self.ct, 0xFFFF)

    def local_addresses(self) -> tuple[bytes, ...]:
        if self.config.local_nsaps:
            return self.config.local_nsaps
        if self.acquired_net is not None:
            return (self.acquired_net,)
        return ()

    # Output path ------------------------------------------------------

    def _emit(self, p: Pdu, destination: bytes) -> SendFrame:
        payload = generate_checksum(pdu_mod.encode(p))
        return SendFrame(Frame(destination, self.config.snpa, payload))

    def _esh(self) -> Pdu:
        return Pdu(EshBody(self.local_addresses()), holding_time=self.holding_time)

    def _ish(self) -> Pdu:
        return Pdu(IshBody(self.config.local_net), holding_time=self.holding_time)

    def on_config_timer(self, now: int) -> list[EngineEvent]:
        """Periodic hello: ESH or ISH, or an RA while addressless."""
        self.rib.flush_expired(now)
        events: list[EngineEvent] = []
        if self.is_intermediate:
            events.append(self._emit(self._ish(), ALL_ES))
        elif self.local_addresses():
            esh = self._esh()
            events.append(self._emit(esh, ALL_IS))
            if not self.rib.has_live_is(now):
                events.append(self._emit(esh, ALL_ES))
        else:
            events.append(self._emit(Pdu(RaBody(), holding_time=0), ALL_IS))
        events.append(TimerSet(now + self.ct))
        return events

    # Input path -------------------------------------------------------

    def handle_frame(self, frame: Frame, now: int) -> list[EngineEvent]:
        if frame.source == self.config.snpa or not frame.payload:
            return []
        nlpid = frame.payload[0]
        if nlpid == NLPID_ESIS:
            decoded = pdu_mod.decode(frame.payload, self.config.validation_profile)
            if isinstance(decoded, DiscardReason):
                return [Discarded(decoded)]
            return self._dispatch(decoded, frame.source, now)
        if nlpid == NLPID_CLNP:
            clnp = decode_clnp(frame.payload)
            if clnp is None:
                return []
            if self.is_intermediate:
                return self.handle_clnp_at_is(clnp, frame.source, now)
            return self.handle_clnp_at_es(clnp, frame.source, now)
        return []

    def _dispatch(self, p: Pdu, source_snpa: bytes, now: int) -> list[EngineEvent]:
        body = p.body
        if isinstance(body, EshBody):
            return self.handle_esh(p, source_snpa, now)
        if isinstance(body, IshBody):
            if self.is_intermediate:
                return [_ROLE_MISMATCH]
            return self.handle_ish(p, source_snpa, now)
        if isinstance(body, RdBody):
            if self.is_intermediate:
                return [_ROLE_MISMATCH]
            return self.handle_rd(p, now)
        if isinstance(body, RaBody):
            if not self.is_intermediate:
                return [_ROLE_MISMATCH]
            return self.handle_ra(p, source_snpa, now)
        if not self.is_intermediate:
            return self.handle_aa(p, now)
        return [_ROLE_MISMATCH]

    def handle_esh(self, p: Pdu, source_snpa: bytes, now: int) -> list[EngineEvent]:
        """Record the sender's NSAPs; an IS answers a new ES with one ISH."""
        body: EshBody = p.body
        events: list[EngineEvent] = []
        newly_available = False
        for addr in body.source_addresses:
            result = self.rib.insert_entry(EntryKind.ES_NEIGHBOR, addr,
                                           source_snpa, p.holding_time, now)
            newly_available |= result is InsertResult.INSERTED
            events.append(RibChanged(self._entry_line(EntryKind.ES_NEIGHBOR, addr)))
        if self.is_intermediate and newly_available:
            events.append(self._emit(self._ish(), source_snpa))
        return events

    def _entry_line(self, kind: EntryKind, address: bytes) -> str:
        for e in self.rib.entries:
            if e.kind is kind and e.address == address:
                return e.dump_line()
        raise AssertionError("entry just inserted is missing")

    def handle_ish(self, p: Pdu, source_snpa: bytes, now: int) -> list[EngineEvent]:
        """Record the {NET, SNPA} pair; answer a new IS with one ESH."""
        body: IshBody = p.body
        result = self.rib.insert_entry(EntryKind.IS_NEIGHBOR, body.net,
                                       source_snpa, p.holding_time, now)
        events: list[EngineEvent] = [
            RibChanged(self._entry_line(EntryKind.IS_NEIGHBOR, body.net))]
        if result is InsertResult.INSERTED and self.local_addresses():
            events.append(self._emit(self._esh(), source_snpa))
        for opt in p.options:
            if opt.code == OptionCode.ESCT:
                self.ct = (opt.value[0] << 8) | opt.value[1]
                events.append(TimerSet(now + self.ct))
        return events

    def handle_ra(self, p: Pdu, source_snpa: bytes, now: int) -> list[EngineEvent]:
        net = self.assign_temporary_net(source_snpa)
        aa = Pdu(AaBody(net), holding_time=self.holding_time)
        return [self._emit(aa, source_snpa)]

    def handle_aa(self, p: Pdu, now: int) -> list[EngineEvent]:
        body: AaBody = p.body
        self.acquired_net = body.net
        return [AddressAssigned(body.net)]

    def handle_rd(self, p: Pdu, now: int) -> list[EngineEvent]:
        body: RdBody = p.body
        self.rib.record_redirect(body.destination, body.better_snpa,
                                 body.redirect_net, p.holding_time, now)
        entry = self.rib.lookup_redirect(body.destination, now)
        return [RibChanged(entry.dump_line())]

    def handle_clnp_at_is(self, clnp: MinimalClnpPdu, source_snpa: bytes,
                          now: int) -> list[EngineEvent]:
        """Forward the stub CLNP and redirect the sender to a better hop."""
        events: list[EngineEvent] = []
        entry = self.rib.lookup(clnp.destination, now)
        if entry is not None and entry.kind is EntryKind.ES_NEIGHBOR:
            rd = Pdu(RdBody(clnp.destination, entry.snpa, None),
                     holding_time=self.holding_time)
            events.append(RedirectIssued(clnp.destination, entry.snpa))
            events.append(self._emit(rd, source_snpa))
            forward_to = entry.snpa
        else:
            match = self._longest_prefix(clnp.destination)
            if match is None:
                return events
            rd = Pdu(RdBody(clnp.destination, match.next_is_snpa, match.next_is_net),
                     holding_time=self.holding_time)
            events.append(RedirectIssued(clnp.destination, match.next_is_snpa))
            events.append(self._emit(rd, source_snpa))
            forward_to = match.next_is_snpa
        payload = encode_clnp(clnp.source, clnp.destination)
        events.append(SendFrame(Frame(forward_to, self.config.snpa, payload)))
        return events

    def _longest_prefix(self, destination: bytes) -> ForwardingEntry | None:
        best: ForwardingEntry | None = None
        for fe in self.config.forwarding_table:
            if destination.startswith(fe.prefix):
                if best is None or len(fe.prefix) > len(best.prefix):
                    best = fe
        return best

    def handle_clnp_at_es(self, clnp: MinimalClnpPdu, source_snpa: bytes,
                          now: int) -> list[EngineEvent]:
        """Reverse traffic over the redirected path keeps the redirect alive."""
        entry = self.rib.lookup_redirect(clnp.source, now)
        if entry is None or entry.better_snpa != source_snpa:
            return []
        self.rib.refresh_redirect(clnp.source, source_snpa, now, entry.holding_time)
        return [RibChanged(entry.dump_line())]

    def assign_temporary_net(self, requester_snpa: bytes) -> bytes:
        """Deterministic 20-octet NET: 13 octets of our NET prefix, the
        requester SNPA, then a zero selector."""
        prefix = (self.config.local_net + b"\x00" * 13)[:13]
        return prefix + requester_snpa + b"\x00"
