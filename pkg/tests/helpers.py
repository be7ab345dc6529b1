"""Shared test utilities: random valid PDU generation and the exhaustive
checksum-pair search oracle."""

from __future__ import annotations

import random

import numpy as np

from esis.pdu import (AaBody, EshBody, IshBody, Option, OptionCode, Pdu,
                      PduType, RaBody, RdBody, encode)

_BODY_KINDS = ("esh", "ish", "rd", "ra", "aa")

_LEGAL_OPTIONS = {
    "esh": [OptionCode.SECURITY, OptionCode.PRIORITY],
    "ish": [OptionCode.SECURITY, OptionCode.PRIORITY, OptionCode.ESCT],
    "rd": [OptionCode.SECURITY, OptionCode.PRIORITY,
           OptionCode.ADDRESS_MASK, OptionCode.SNPA_MASK],
    "ra": [OptionCode.SECURITY, OptionCode.PRIORITY],
    "aa": [OptionCode.SECURITY, OptionCode.PRIORITY],
}


def random_nsap(rng: random.Random, length: int | None = None) -> bytes:
    n = length if length is not None else rng.randint(1, 20)
    return bytes(rng.randrange(256) for _ in range(n))


def random_option(rng: random.Random, code: OptionCode) -> Option:
    if code is OptionCode.PRIORITY:
        return Option(int(code), bytes([rng.randint(0, 14)]))
    if code is OptionCode.ESCT:
        return Option(int(code), rng.randint(1, 0xFFFF).to_bytes(2, "big"))
    return Option(int(code), bytes(rng.randrange(256)
                                   for _ in range(rng.randint(1, 16))))


def random_pdu(rng: random.Random) -> Pdu:
    """A random PDU satisfying every encode invariant (total length <= 255)."""
    kind = rng.choice(_BODY_KINDS)
    if kind == "esh":
        body = EshBody(tuple(random_nsap(rng) for _ in range(rng.randint(1, 8))))
    elif kind == "ish":
        body = IshBody(random_nsap(rng))
    elif kind == "aa":
        body = AaBody(random_nsap(rng))
    elif kind == "rd":
        net = random_nsap(rng) if rng.random() < 0.5 else None
        body = RdBody(random_nsap(rng), bytes(rng.randrange(256) for _ in range(6)), net)
    else:
        body = RaBody()
    legal = _LEGAL_OPTIONS[kind]
    codes = rng.sample(legal, k=rng.randint(0, min(3, len(legal))))
    options = tuple(random_option(rng, c) for c in codes)
    return Pdu(body, holding_time=rng.randint(0, 0xFFFF), options=options)


def random_header(rng: random.Random, min_len: int = 9, max_len: int = 40) -> bytes:
    """Arbitrary octets shaped like a header (only the length matters)."""
    return bytes(rng.randrange(256) for _ in range(rng.randint(min_len, max_len)))


def exhaustive_checksum_pairs(header: bytes) -> list[tuple[int, int]]:
    """Try every (X, Y) in 1..255 x 1..255 by simulating the running c0/c1
    accumulation for all candidates at once; return the pairs that verify."""
    xs = np.repeat(np.arange(1, 256, dtype=np.int64), 255)
    ys = np.tile(np.arange(1, 256, dtype=np.int64), 255)
    c0 = np.zeros(255 * 255, dtype=np.int64)
    c1 = np.zeros(255 * 255, dtype=np.int64)
    for i, b in enumerate(header):
        if i == 7:
            c0 = c0 + xs
        elif i == 8:
            c0 = c0 + ys
        else:
            c0 = c0 + b
        c0 %= 255
        c1 = (c1 + c0) % 255
    mask = (c0 == 0) & (c1 == 0)
    return list(zip(xs[mask].tolist(), ys[mask].tolist()))
