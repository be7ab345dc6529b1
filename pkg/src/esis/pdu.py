"""ES-IS PDU wire format: types, encoder, decoder, validation.

Fixed part layout (9 octets): NLPID, length indicator, version, reserved,
type octet (upper 3 bits zero), holding time (2, big-endian), checksum (2).
Address parts per type:
  ESH          count, then {length, NSAP} repeated
  ISH / AA     {length, NET}
  RD           {length, DA} {length, BSNPA} {length, NET}  (NET length 0 ok)
  RA           nothing
Options are {code, length, value} triples up to the length indicator.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .checksum import ChecksumVerdict, verify_checksum

NLPID_ESIS = 0x82  # 130
NLPID_CLNP = 0x81  # 129
VERSION = 1
FIXED_LEN = 9

MAX_NSAP_LEN = 20
SNPA_LEN = 6


class PduType(enum.IntEnum):
    ESH = 2
    ISH = 4
    RD = 6
    # RA/AA wire codes are not fixed by ISO 9542; this artifact assigns them.
    RA = 8
    AA = 10


class OptionCode(enum.IntEnum):
    SECURITY = 0xC5
    ESCT = 0xC6
    PRIORITY = 0xCD
    ADDRESS_MASK = 0xE1
    SNPA_MASK = 0xE2


# Which option codes each PDU type may carry.
OPTION_LEGALITY: dict[OptionCode, frozenset[PduType]] = {
    OptionCode.SECURITY: frozenset(PduType),
    OptionCode.PRIORITY: frozenset(PduType),
    OptionCode.ESCT: frozenset({PduType.ISH}),
    OptionCode.ADDRESS_MASK: frozenset({PduType.RD}),
    OptionCode.SNPA_MASK: frozenset({PduType.RD}),
}


class ProtocolDetail(enum.Enum):
    BAD_HEADER_LENGTH = "BadHeaderLength"
    NONZERO_RESERVED = "NonzeroReserved"
    UNKNOWN_TYPE = "UnknownType"
    ZERO_ADDRESS_COUNT = "ZeroAddressCount"
    BAD_ADDRESS_LENGTH = "BadAddressLength"
    BAD_ADDRESS_VALUE = "BadAddressValue"
    BAD_OPTION_CODE = "BadOptionCode"
    BAD_OPTION_LENGTH = "BadOptionLength"
    BAD_OPTION_VALUE = "BadOptionValue"
    DUPLICATE_OPTION = "DuplicateOption"
    OPTION_ILLEGAL_FOR_TYPE = "OptionIllegalForType"
    TRUNCATED_PDU = "TruncatedPdu"
    # Engine-level outcome: a PDU type the local role never accepts.
    ROLE_MISMATCH = "RoleMismatch"


class DiscardKind(enum.Enum):
    NOT_ES_IS = "NotEsIs"
    WRONG_VERSION = "WrongVersion"
    CHECKSUM_ERROR = "ChecksumError"
    PROTOCOL_ERROR = "ProtocolError"


@dataclass(frozen=True)
class DiscardReason:
    kind: DiscardKind
    detail: ProtocolDetail | None = None

    def __str__(self) -> str:
        if self.kind is DiscardKind.PROTOCOL_ERROR:
            return f"ProtocolError({self.detail.value})"
        return self.kind.value


NOT_ES_IS = DiscardReason(DiscardKind.NOT_ES_IS)
WRONG_VERSION = DiscardReason(DiscardKind.WRONG_VERSION)
CHECKSUM_ERROR = DiscardReason(DiscardKind.CHECKSUM_ERROR)


def protocol_error(detail: ProtocolDetail) -> DiscardReason:
    return DiscardReason(DiscardKind.PROTOCOL_ERROR, detail)


class InvariantViolation(ValueError):
    """An encode() precondition was broken; signals a caller bug."""


@dataclass(frozen=True)
class ValidationProfile:
    """NSAP acceptance rule applied while decoding address parts."""

    atn: bool = False
    afi: int = 0x47

    def check(self, addr: bytes) -> ProtocolDetail | None:
        if not 1 <= len(addr) <= MAX_NSAP_LEN:
            return ProtocolDetail.BAD_ADDRESS_LENGTH
        if self.atn:
            if len(addr) != MAX_NSAP_LEN:
                return ProtocolDetail.BAD_ADDRESS_LENGTH
            if addr[0] != self.afi:
                return ProtocolDetail.BAD_ADDRESS_VALUE
        return None


LENIENT = ValidationProfile()
ATN = ValidationProfile(atn=True)


def validate_nsap(addr: bytes, profile: ValidationProfile = LENIENT) -> ProtocolDetail | None:
    """Return None when the address passes the profile, else the failure."""
    return profile.check(addr)


@dataclass(frozen=True)
class Option:
    code: int
    value: bytes


@dataclass(frozen=True)
class EshBody:
    source_addresses: tuple[bytes, ...]


@dataclass(frozen=True)
class IshBody:
    net: bytes


@dataclass(frozen=True)
class RdBody:
    destination: bytes
    better_snpa: bytes
    redirect_net: bytes | None = None


@dataclass(frozen=True)
class RaBody:
    pass


@dataclass(frozen=True)
class AaBody:
    net: bytes


Body = EshBody | IshBody | RdBody | RaBody | AaBody

_BODY_TYPE: dict[type, PduType] = {
    EshBody: PduType.ESH,
    IshBody: PduType.ISH,
    RdBody: PduType.RD,
    RaBody: PduType.RA,
    AaBody: PduType.AA,
}


@dataclass(frozen=True)
class Pdu:
    body: Body
    holding_time: int = 0
    options: tuple[Option, ...] = ()
    checksum: tuple[int, int] = (0, 0)

    @property
    def pdu_type(self) -> PduType:
        return _BODY_TYPE[type(self.body)]

    def without_checksum(self) -> "Pdu":
        return replace(self, checksum=(0, 0))


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvariantViolation(msg)


def _check_nsap(addr: bytes, what: str) -> None:
    _require(1 <= len(addr) <= MAX_NSAP_LEN, f"{what} length must be 1..{MAX_NSAP_LEN}")


def _check_option(opt: Option, pdu_type: PduType) -> None:
    try:
        code = OptionCode(opt.code)
    except ValueError:
        raise InvariantViolation(f"unknown option code {opt.code}")
    _require(pdu_type in OPTION_LEGALITY[code],
             f"option {code.name} not legal on {pdu_type.name}")
    _require(len(opt.value) <= 254, "option value too long")
    if code is OptionCode.PRIORITY:
        _require(len(opt.value) == 1, "priority value must be 1 octet")
        _require(opt.value[0] <= 14, "priority value must be 0..14")
    elif code is OptionCode.ESCT:
        _require(len(opt.value) == 2, "ESCT value must be 2 octets")
        _require(opt.value != b"\x00\x00", "ESCT value must be nonzero")
    else:
        _require(len(opt.value) >= 1, f"{code.name} value must be nonempty")


def encode(pdu: Pdu) -> bytes:
    """Encode a PDU header; the checksum octets are copied as-is."""
    body = pdu.body
    pdu_type = pdu.pdu_type
    _require(0 <= pdu.holding_time <= 0xFFFF, "holding time must fit in 16 bits")

    addr_part = bytearray()
    if isinstance(body, EshBody):
        _require(len(body.source_addresses) >= 1, "address count must be ≥ 1")
        addr_part.append(len(body.source_addresses) & 0xFF)
        _require(len(body.source_addresses) <= 255, "too many source addresses")
        for a in body.source_addresses:
            _check_nsap(a, "source address")
            addr_part.append(len(a))
            addr_part += a
    elif isinstance(body, (IshBody, AaBody)):
        _check_nsap(body.net, "NET")
        addr_part.append(len(body.net))
        addr_part += body.net
    elif isinstance(body, RdBody):
        _check_nsap(body.destination, "destination address")
        _require(len(body.better_snpa) == SNPA_LEN, f"SNPA must be {SNPA_LEN} octets")
        addr_part.append(len(body.destination))
        addr_part += body.destination
        addr_part.append(SNPA_LEN)
        addr_part += body.better_snpa
        if body.redirect_net:
            _check_nsap(body.redirect_net, "redirect NET")
            addr_part.append(len(body.redirect_net))
            addr_part += body.redirect_net
        else:
            addr_part.append(0)

    opt_part = bytearray()
    seen: set[int] = set()
    for opt in pdu.options:
        _require(opt.code not in seen, f"duplicate option code {opt.code}")
        seen.add(opt.code)
        _check_option(opt, pdu_type)
        opt_part.append(opt.code)
        opt_part.append(len(opt.value))
        opt_part += opt.value

    total = FIXED_LEN + len(addr_part) + len(opt_part)
    _require(total <= 255, f"encoded header length {total} exceeds 255")

    out = bytearray(FIXED_LEN)
    out[0] = NLPID_ESIS
    out[1] = total
    out[2] = VERSION
    out[3] = 0
    out[4] = int(pdu_type)
    out[5] = (pdu.holding_time >> 8) & 0xFF
    out[6] = pdu.holding_time & 0xFF
    out[7], out[8] = pdu.checksum
    return bytes(out + addr_part + opt_part)


def _read_address(header: bytes, off: int) -> tuple[bytes, int] | ProtocolDetail:
    if off >= len(header):
        return ProtocolDetail.TRUNCATED_PDU
    alen = header[off]
    off += 1
    if off + alen > len(header):
        return ProtocolDetail.TRUNCATED_PDU
    return header[off:off + alen], off + alen


def _decode_options(header: bytes, off: int,
                    pdu_type: PduType) -> tuple[Option, ...] | DiscardReason:
    opts: list[Option] = []
    seen: set[int] = set()
    while off < len(header):
        if off + 2 > len(header):
            return protocol_error(ProtocolDetail.TRUNCATED_PDU)
        code, olen = header[off], header[off + 1]
        off += 2
        if off + olen > len(header):
            return protocol_error(ProtocolDetail.TRUNCATED_PDU)
        value = header[off:off + olen]
        off += olen
        try:
            known = OptionCode(code)
        except ValueError:
            return protocol_error(ProtocolDetail.BAD_OPTION_CODE)
        if pdu_type not in OPTION_LEGALITY[known]:
            return protocol_error(ProtocolDetail.OPTION_ILLEGAL_FOR_TYPE)
        if code in seen:
            return protocol_error(ProtocolDetail.DUPLICATE_OPTION)
        seen.add(code)
        if known is OptionCode.PRIORITY:
            if olen != 1:
                return protocol_error(ProtocolDetail.BAD_OPTION_LENGTH)
            if value[0] > 14:
                return protocol_error(ProtocolDetail.BAD_OPTION_VALUE)
        elif known is OptionCode.ESCT:
            if olen != 2:
                return protocol_error(ProtocolDetail.BAD_OPTION_LENGTH)
            if value == b"\x00\x00":
                return protocol_error(ProtocolDetail.BAD_OPTION_VALUE)
        else:
            if olen < 1:
                return protocol_error(ProtocolDetail.BAD_OPTION_LENGTH)
        opts.append(Option(code, bytes(value)))
    return tuple(opts)


def decode(raw: bytes, profile: ValidationProfile = LENIENT) -> Pdu | DiscardReason:
    """Run the input pipeline over a frame payload.

    Discard is a normal outcome and is returned, never raised. Octets past
    the length indicator are ignored.
    """
    if len(raw) == 0:
        return protocol_error(ProtocolDetail.TRUNCATED_PDU)
    if raw[0] != NLPID_ESIS:
        return NOT_ES_IS
    if len(raw) < FIXED_LEN:
        return protocol_error(ProtocolDetail.TRUNCATED_PDU)
    if raw[2] != VERSION:
        return WRONG_VERSION
    li = raw[1]
    # The checksum is defined over length-indicator octets, so an unusable
    # length indicator has to be rejected before verification.
    if li < FIXED_LEN or li > len(raw):
        return protocol_error(ProtocolDetail.BAD_HEADER_LENGTH)
    header = raw[:li]
    if verify_checksum(header) is ChecksumVerdict.INVALID:
        return CHECKSUM_ERROR
    if header[3] != 0 or header[4] & 0xE0:
        return protocol_error(ProtocolDetail.NONZERO_RESERVED)
    try:
        pdu_type = PduType(header[4] & 0x1F)
    except ValueError:
        return protocol_error(ProtocolDetail.UNKNOWN_TYPE)
    holding = (header[5] << 8) | header[6]
    checksum = (header[7], header[8])

    off = FIXED_LEN
    body: Body
    if pdu_type is PduType.ESH:
        if off >= len(header):
            return protocol_error(ProtocolDetail.TRUNCATED_PDU)
        count = header[off]
        off += 1
        if count == 0:
            return protocol_error(ProtocolDetail.ZERO_ADDRESS_COUNT)
        addrs = []
        for _ in range(count):
            got = _read_address(header, off)
            if isinstance(got, ProtocolDetail):
                return protocol_error(got)
            addr, off = got
            bad = profile.check(addr)
            if bad is not None:
                return protocol_error(bad)
            addrs.append(addr)
        body = EshBody(tuple(addrs))
    elif pdu_type in (PduType.ISH, PduType.AA):
        got = _read_address(header, off)
        if isinstance(got, ProtocolDetail):
            return protocol_error(got)
        net, off = got
        bad = profile.check(net)
        if bad is not None:
            return protocol_error(bad)
        body = IshBody(net) if pdu_type is PduType.ISH else AaBody(net)
    elif pdu_type is PduType.RD:
        got = _read_address(header, off)
        if isinstance(got, ProtocolDetail):
            return protocol_error(got)
        dest, off = got
        bad = profile.check(dest)
        if bad is not None:
            return protocol_error(bad)
        got = _read_address(header, off)
        if isinstance(got, ProtocolDetail):
            return protocol_error(got)
        snpa, off = got
        if len(snpa) != SNPA_LEN:
            return protocol_error(ProtocolDetail.BAD_ADDRESS_LENGTH)
        got = _read_address(header, off)
        if isinstance(got, ProtocolDetail):
            return protocol_error(got)
        net, off = got
        if net:
            bad = profile.check(net)
            if bad is not None:
                return protocol_error(bad)
        body = RdBody(dest, snpa, net if net else None)
    else:
        body = RaBody()

    opts = _decode_options(header, off, pdu_type)
    if isinstance(opts, DiscardReason):
        return opts
    return Pdu(body=body, holding_time=holding, options=opts, checksum=checksum)
