"""Element literals such as ``"e-1 + 2*e3"`` over the Zassenhaus basis."""

from __future__ import annotations

import re

import numpy as np

from .errors import ParseError
from .ffield import check_prime

__all__ = ["parse_element", "format_element"]

_INT = re.compile(r"\d+")


def _strip(text: str):
    """Drop whitespace, remembering the original position of each kept character."""
    chars, where = [], []
    for i, ch in enumerate(text):
        if not ch.isspace():
            chars.append(ch)
            where.append(i)
    return "".join(chars), where


def parse_element(text: str, p: int, N: int) -> np.ndarray:
    """Coefficient vector (positions e-1..e_{N-2}) of an element literal.

    Grammar: expr := term (('+'|'-') term)*, term := [coeff '*'] 'e' index,
    where index is -1 or a non-negative integer. The literal "0" is the zero
    element. Coefficients are reduced mod p.
    """
    check_prime(p)
    s, where = _strip(text)
    out = np.zeros(N, dtype=np.int64)

    def pos(i):
        return where[i] if i < len(where) else len(text)

    if not s:
        raise ParseError("empty element expression", 0)
    if s == "0":
        return out
    i, sign = 0, 1
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        i = 1
    while True:
        start = i
        coeff = 1
        m = _INT.match(s, i)
        if m:
            if m.end() >= len(s) or s[m.end()] != "*":
                raise ParseError("expected '*' after coefficient", pos(m.end()))
            coeff = int(m.group())
            i = m.end() + 1
        if i >= len(s) or s[i] != "e":
            raise ParseError("expected basis element 'e<index>'", pos(i))
        i += 1
        neg = i < len(s) and s[i] == "-"
        m = _INT.match(s, i + 1 if neg else i)
        if not m:
            raise ParseError("expected an integer index after 'e'", pos(i))
        idx = -int(m.group()) if neg else int(m.group())
        if not -1 <= idx <= N - 2:
            raise ParseError(f"index {idx} outside [-1, {N - 2}]", pos(start))
        out[idx + 1] = (out[idx + 1] + sign * coeff) % p
        i = m.end()
        if i == len(s):
            return out
        if s[i] not in "+-":
            raise ParseError(f"unexpected character {s[i]!r}", pos(i))
        sign = -1 if s[i] == "-" else 1
        i += 1


def format_element(v, p: int | None = None) -> str:
    """Inverse of :func:`parse_element` on reduced vectors."""
    v = np.asarray(v, dtype=np.int64)
    if p is not None:
        v = np.mod(v, p)
    terms = []
    for pos_, c in enumerate(v):
        c = int(c)
        if c == 0:
            continue
        name = f"e{pos_ - 1}"
        terms.append(name if c == 1 else f"{c}*{name}")
    return " + ".join(terms) if terms else "0"
