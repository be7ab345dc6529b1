"""User-space ES-IS routing information exchange: codec, RIB, engines, simulator."""

from .checksum import ChecksumVerdict, HeaderTooShort, generate_checksum, verify_checksum
from .pdu import (ATN, AaBody, DiscardKind, DiscardReason, EshBody,
                  InvariantViolation, IshBody, LENIENT, Option, OptionCode,
                  Pdu, PduType, ProtocolDetail, RaBody, RdBody,
                  ValidationProfile, decode, encode, validate_nsap)
from .rib import EntryKind, HopKind, InsertResult, NextHop, RedirectEntry, Rib, RibEntry
from .engine import (ALL_ES, ALL_IS, BROADCAST, Frame, MinimalClnpPdu, Node,
                     NodeConfig, Role)
from .sim import FaultPlan, Simulator
from .scenario import Scenario, ScenarioError, build_simulator, load_scenario, parse_scenario

__all__ = [name for name in dir() if not name.startswith("_")]
