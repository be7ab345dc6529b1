"""Scenario file loading: plain-text, line-oriented, strictly parsed.

Grammar (one statement per line, '#' starts a comment):

  node <name> role=es|is snpa=<hex6> [nsap=<hex>]... [net=<hex>]
       [ct=<int>] [multiplier=<int>] [start=<int>] [profile=lenient|atn]
       [afi=<hexbyte>]
  forward <is-name> prefix=<hex> net=<hex> snpa=<hex6>
  latency <int>
  seed <int>
  until <int>
  drop <ordinal>
  corrupt <ordinal> <index|random> <hexbyte|random>
  at <t> sendclnp <node> <src-nsap-hex> <dst-nsap-hex>
  at <t> down <node>
  at <t> up <node>

Unknown statements or keys are load errors. Fault ordinals count transmit
calls from 1 across the whole run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import ForwardingEntry, NodeConfig, Role, SNPA_LEN
from .pdu import ValidationProfile
from .sim import FaultPlan, Simulator


class ScenarioError(ValueError):
    def __init__(self, lineno: int, msg: str) -> None:
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass
class NodeDecl:
    name: str
    config: NodeConfig
    start: int = 0


@dataclass
class Action:
    at: int
    kind: str  # sendclnp | down | up
    node: str
    source_nsap: bytes | None = None
    dest_nsap: bytes | None = None


@dataclass
class Scenario:
    nodes: list[NodeDecl] = field(default_factory=list)
    latency: int = 1
    seed: int = 0
    until: int = 0
    faults: FaultPlan = field(default_factory=FaultPlan)
    actions: list[Action] = field(default_factory=list)


def _hex(lineno: int, text: str, what: str) -> bytes:
    cleaned = text.replace(":", "")
    try:
        return bytes.fromhex(cleaned)
    except ValueError:
        raise ScenarioError(lineno, f"bad hex for {what}: {text!r}")


def _int(lineno: int, text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ScenarioError(lineno, f"bad integer for {what}: {text!r}")


def _parse_node(lineno: int, args: list[str], sc: Scenario) -> None:
    if not args:
        raise ScenarioError(lineno, "node needs a name")
    name = args[0]
    if any(d.name == name for d in sc.nodes):
        raise ScenarioError(lineno, f"duplicate node name {name}")
    role: Role | None = None
    snpa: bytes | None = None
    nsaps: list[bytes] = []
    net: bytes | None = None
    ct = 30
    multiplier = 2
    start = 0
    atn = False
    afi = 0x47
    for tok in args[1:]:
        if "=" not in tok:
            raise ScenarioError(lineno, f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        if key == "role":
            if val not in ("es", "is"):
                raise ScenarioError(lineno, f"role must be es or is, got {val!r}")
            role = Role(val)
        elif key == "snpa":
            snpa = _hex(lineno, val, "snpa")
        elif key == "nsap":
            nsaps.append(_hex(lineno, val, "nsap"))
        elif key == "net":
            net = _hex(lineno, val, "net")
        elif key == "ct":
            ct = _int(lineno, val, "ct")
        elif key == "multiplier":
            multiplier = _int(lineno, val, "multiplier")
        elif key == "start":
            start = _int(lineno, val, "start")
        elif key == "profile":
            if val not in ("lenient", "atn"):
                raise ScenarioError(lineno, f"unknown profile {val!r}")
            atn = val == "atn"
        elif key == "afi":
            afi = int(_hex(lineno, val, "afi")[0])
        else:
            raise ScenarioError(lineno, f"unknown node key {key!r}")
    if role is None:
        raise ScenarioError(lineno, "node needs role=")
    if snpa is None or len(snpa) != SNPA_LEN:
        raise ScenarioError(lineno, f"node needs a {SNPA_LEN}-octet snpa=")
    if any(d.config.snpa == snpa for d in sc.nodes):
        raise ScenarioError(lineno, f"duplicate snpa {snpa.hex()}")
    if role is Role.INTERMEDIATE_SYSTEM and net is None:
        raise ScenarioError(lineno, "an is node needs net=")
    config = NodeConfig(role=role, snpa=snpa, local_nsaps=tuple(nsaps),
                        local_net=net, configuration_timer=ct,
                        holding_multiplier=multiplier,
                        validation_profile=ValidationProfile(atn=atn, afi=afi))
    sc.nodes.append(NodeDecl(name, config, start))


def _parse_forward(lineno: int, args: list[str], sc: Scenario) -> None:
    if not args:
        raise ScenarioError(lineno, "forward needs a node name")
    decl = next((d for d in sc.nodes if d.name == args[0]), None)
    if decl is None:
        raise ScenarioError(lineno, f"unknown node {args[0]!r}")
    prefix = net = snpa = None
    for tok in args[1:]:
        if "=" not in tok:
            raise ScenarioError(lineno, f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        if key == "prefix":
            prefix = _hex(lineno, val, "prefix")
        elif key == "net":
            net = _hex(lineno, val, "net")
        elif key == "snpa":
            snpa = _hex(lineno, val, "snpa")
        else:
            raise ScenarioError(lineno, f"unknown forward key {key!r}")
    if prefix is None or net is None or snpa is None:
        raise ScenarioError(lineno, "forward needs prefix=, net= and snpa=")
    decl.config.forwarding_table += (ForwardingEntry(prefix, net, snpa),)


def _parse_at(lineno: int, args: list[str], sc: Scenario) -> None:
    if len(args) < 3:
        raise ScenarioError(lineno, "at needs: <t> <action> <node> ...")
    at = _int(lineno, args[0], "time")
    kind, node = args[1], args[2]
    if not any(d.name == node for d in sc.nodes):
        raise ScenarioError(lineno, f"unknown node {node!r}")
    if kind == "sendclnp":
        if len(args) != 5:
            raise ScenarioError(lineno, "sendclnp needs <node> <src-hex> <dst-hex>")
        sc.actions.append(Action(at, kind, node,
                                 _hex(lineno, args[3], "source nsap"),
                                 _hex(lineno, args[4], "destination nsap")))
    elif kind in ("down", "up"):
        if len(args) != 3:
            raise ScenarioError(lineno, f"{kind} takes only a node name")
        sc.actions.append(Action(at, kind, node))
    else:
        raise ScenarioError(lineno, f"unknown action {kind!r}")


def parse_scenario(text: str) -> Scenario:
    sc = Scenario()
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        stmt, *args = line.split()
        if stmt == "node":
            _parse_node(lineno, args, sc)
        elif stmt == "forward":
            _parse_forward(lineno, args, sc)
        elif stmt == "latency":
            sc.latency = _int(lineno, args[0] if args else "", "latency")
        elif stmt == "seed":
            sc.seed = _int(lineno, args[0] if args else "", "seed")
        elif stmt == "until":
            sc.until = _int(lineno, args[0] if args else "", "until")
        elif stmt == "drop":
            sc.faults.drops.add(_int(lineno, args[0] if args else "", "ordinal"))
        elif stmt == "corrupt":
            if len(args) != 3:
                raise ScenarioError(lineno, "corrupt needs <ordinal> <index|random> <value|random>")
            ordinal = _int(lineno, args[0], "ordinal")
            idx = None if args[1] == "random" else _int(lineno, args[1], "octet index")
            val = None if args[2] == "random" else int(_hex(lineno, args[2], "value")[0])
            sc.faults.corruptions[ordinal] = (idx, val)
        elif stmt == "at":
            _parse_at(lineno, args, sc)
        else:
            raise ScenarioError(lineno, f"unknown statement {stmt!r}")
    return sc


def load_scenario(path: str) -> Scenario:
    with open(path, encoding="utf-8") as f:
        return parse_scenario(f.read())


def build_simulator(sc: Scenario) -> Simulator:
    sim = Simulator(latency=sc.latency, seed=sc.seed, faults=sc.faults)
    for decl in sc.nodes:
        sim.add_node(decl.name, decl.config, start=decl.start)
    for action in sc.actions:
        if action.kind == "sendclnp":
            sim.inject_clnp(action.at, action.node,
                            action.source_nsap, action.dest_nsap)
        elif action.kind == "down":
            sim.inject_down(action.at, action.node)
        else:
            sim.inject_up(action.at, action.node)
    return sim
