"""Deterministic discrete-event broadcast subnetwork.

A single event heap keyed on (time, sequence) drives timer fires, frame
deliveries, and scripted actions. The log is a pure function of the
scenario and seed. Log line shape:
  t=<int> node=<name> <EVENT> <details>
with EVENT in SEND, RECV, DISCARD, RIB, TIMER, ASSIGN, REDIRECT.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field

from .engine import (ALL_ES, ALL_IS, BROADCAST, AddressAssigned, Discarded,
                     Frame, Node, NodeConfig, RedirectIssued, RibChanged, Role,
                     SendFrame, TimerSet, encode_clnp)


@dataclass
class FaultPlan:
    """Frame-ordinal keyed faults. Ordinals count transmit calls from 1.

    A corruption index or value of None means "pick with the seeded RNG".
    """
    drops: set[int] = field(default_factory=set)
    corruptions: dict[int, tuple[int | None, int | None]] = field(default_factory=dict)


class UnknownNode(KeyError):
    pass


@dataclass
class _SimNode:
    name: str
    node: Node
    start: int
    down: bool = False
    timer_token: int = 0


class Simulator:
    def __init__(self, latency: int = 1, seed: int = 0,
                 faults: FaultPlan | None = None) -> None:
        self.latency = latency
        self.rng = random.Random(seed)
        self.faults = faults or FaultPlan()
        self._heap: list[tuple[int, int, tuple]] = []
        self._seq = 0
        self._tx_count = 0
        self.now = 0
        self.log: list[str] = []
        self.nodes: dict[str, _SimNode] = {}
        self._order: list[str] = []

    # Setup --------------------------------------------------------------

    def add_node(self, name: str, config: NodeConfig, start: int = 0) -> Node:
        if name in self.nodes:
            raise ValueError(f"duplicate node name {name}")
        sn = _SimNode(name, Node(config), start)
        self.nodes[name] = sn
        self._order.append(name)
        self._set_timer(sn, start)
        return sn.node

    def _require_node(self, name: str) -> _SimNode:
        try:
            return self.nodes[name]
        except KeyError:
            raise UnknownNode(name) from None

    def node(self, name: str) -> Node:
        return self._require_node(name).node

    # Scheduling -----------------------------------------------------------

    def _schedule(self, at: int, item: tuple) -> None:
        heapq.heappush(self._heap, (at, self._seq, item))
        self._seq += 1

    def _set_timer(self, sn: _SimNode, at: int) -> None:
        sn.timer_token += 1
        self._schedule(at, ("timer", sn.name, sn.timer_token))

    def inject_clnp(self, at: int, from_node: str, source_nsap: bytes,
                    dest_nsap: bytes) -> None:
        self._require_node(from_node)
        self._schedule(at, ("clnp", from_node, source_nsap, dest_nsap))

    def inject_down(self, at: int, name: str) -> None:
        self._require_node(name)
        self._schedule(at, ("down", name))

    def inject_up(self, at: int, name: str) -> None:
        self._require_node(name)
        self._schedule(at, ("up", name))

    # Transmission ---------------------------------------------------------

    def transmit(self, frame: Frame, now: int, sender: str) -> None:
        self._tx_count += 1
        ordinal = self._tx_count
        if ordinal in self.faults.corruptions:
            idx, val = self.faults.corruptions[ordinal]
            payload = bytearray(frame.payload)
            if idx is None:
                idx = self.rng.randrange(len(payload))
            if val is None:
                # Guaranteed to differ from the original octet.
                val = (payload[idx] + self.rng.randrange(1, 256)) % 256
            if 0 <= idx < len(payload):
                payload[idx] = val
                frame = Frame(frame.destination, frame.source, bytes(payload))
        self.log.append(f"t={now} node={sender} SEND dst={frame.destination.hex()} "
                        f"payload={frame.payload.hex()}")
        if ordinal in self.faults.drops:
            return
        for name in self._targets(frame.destination, sender):
            self._schedule(now + self.latency, ("deliver", name, frame))

    def _targets(self, destination: bytes, sender: str) -> list[str]:
        if destination == BROADCAST:
            return [n for n in self._order if n != sender]
        if destination == ALL_ES:
            return [n for n in self._order if n != sender
                    and self.nodes[n].node.config.role is Role.END_SYSTEM]
        if destination == ALL_IS:
            return [n for n in self._order if n != sender
                    and self.nodes[n].node.config.role is Role.INTERMEDIATE_SYSTEM]
        return [n for n in self._order if n != sender
                and self.nodes[n].node.config.snpa == destination]

    # Event loop -------------------------------------------------------------

    def run_until(self, t_end: int) -> list[str]:
        if t_end < self.now:
            raise ValueError("cannot run backwards")
        while self._heap and self._heap[0][0] <= t_end:
            at, _, item = heapq.heappop(self._heap)
            self.now = at
            self._execute(at, item)
        self.now = t_end
        return self.log

    def _execute(self, at: int, item: tuple) -> None:
        kind = item[0]
        if kind == "timer":
            _, name, token = item
            sn = self.nodes[name]
            if sn.down or token != sn.timer_token:
                return
            self._apply(sn, sn.node.on_config_timer(at), at)
        elif kind == "deliver":
            _, name, frame = item
            sn = self.nodes[name]
            if sn.down:
                return
            self.log.append(f"t={at} node={name} RECV src={frame.source.hex()} "
                            f"payload={frame.payload.hex()}")
            self._apply(sn, sn.node.handle_frame(frame, at), at)
        elif kind == "clnp":
            _, name, src, dst = item
            sn = self.nodes[name]
            if sn.down:
                return
            hop = sn.node.rib.next_hop(dst, at)
            dest_snpa = hop.snpa if hop.snpa is not None else BROADCAST
            frame = Frame(dest_snpa, sn.node.config.snpa, encode_clnp(src, dst))
            self.transmit(frame, at, name)
        elif kind == "down":
            sn = self.nodes[item[1]]
            sn.down = True
            sn.timer_token += 1  # cancel any pending fire
        elif kind == "up":
            sn = self.nodes[item[1]]
            if sn.down:
                sn.down = False
                self._set_timer(sn, at)

    def _apply(self, sn: _SimNode, events, at: int) -> None:
        for ev in events:
            if isinstance(ev, SendFrame):
                self.transmit(ev.frame, at, sn.name)
            elif isinstance(ev, RibChanged):
                self.log.append(f"t={at} node={sn.name} RIB {ev.line}")
            elif isinstance(ev, Discarded):
                self.log.append(f"t={at} node={sn.name} DISCARD {ev.reason}")
            elif isinstance(ev, AddressAssigned):
                self.log.append(f"t={at} node={sn.name} ASSIGN net={ev.net.hex()}")
            elif isinstance(ev, RedirectIssued):
                self.log.append(f"t={at} node={sn.name} REDIRECT "
                                f"dest={ev.destination.hex()} via={ev.snpa.hex()}")
            elif isinstance(ev, TimerSet):
                self.log.append(f"t={at} node={sn.name} TIMER at={ev.at}")
                self._set_timer(sn, ev.at)

    def dump_ribs(self, now: int | None = None) -> list[str]:
        now = self.now if now is None else now
        lines: list[str] = []
        for name in self._order:
            lines.append(f"-- rib {name} --")
            lines.extend(self.nodes[name].node.rib.dump(now))
        return lines
