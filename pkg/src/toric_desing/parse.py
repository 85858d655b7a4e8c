"""Tiny parser for binomials written as text, e.g. "w^2 - u*v".

Grammar: binomial = monomial "-" monomial; monomial = "1" | factor
("*" factor)*; factor = name ("^" integer)?.  Names match
[A-Za-z_][A-Za-z0-9_]*.  The variable universe is either supplied or
collected left to right from the input.
"""

from __future__ import annotations

import re

TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*|\d+|[\^\*\-\+])")


class ParseError(ValueError):
    pass


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"bad character at {text[pos:pos + 8]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def _monomial(tokens, i, exps, order):
    """Parse one monomial starting at token i; returns the next index."""
    if i < len(tokens) and tokens[i] == "1":
        return i + 1
    while True:
        if i >= len(tokens):
            raise ParseError("monomial ended unexpectedly")
        name = tokens[i]
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise ParseError(f"expected a variable, got {name!r}")
        i += 1
        power = 1
        if i < len(tokens) and tokens[i] == "^":
            if i + 1 >= len(tokens) or not tokens[i + 1].isdigit():
                raise ParseError("expected an integer exponent after ^")
            power = int(tokens[i + 1])
            i += 2
        if name not in order:
            order[name] = len(order)
        exps[name] = exps.get(name, 0) + power
        if i < len(tokens) and tokens[i] == "*":
            i += 1
            continue
        return i


def parse_binomial(text: str, variables=None):
    """Parse "m1 - m2" into (names, exponents1, exponents2)."""
    tokens = _tokens(text)
    order: dict[str, int] = {}
    if variables:
        for v in variables:
            order[v] = len(order)
    left: dict[str, int] = {}
    right: dict[str, int] = {}
    i = _monomial(tokens, 0, left, order)
    if i >= len(tokens) or tokens[i] != "-":
        raise ParseError("expected '-' between the two monomials")
    i = _monomial(tokens, i + 1, right, order)
    if i != len(tokens):
        raise ParseError(f"trailing input {tokens[i:]!r}")
    names = tuple(sorted(order, key=order.get))
    e1 = tuple(left.get(n, 0) for n in names)
    e2 = tuple(right.get(n, 0) for n in names)
    return names, e1, e2


def parse_system(texts, variables=None):
    """Parse several binomials over a common, order-preserving universe."""
    order: dict[str, int] = {}
    if variables:
        for v in variables:
            order[v] = len(order)
    raw = []
    for text in texts:
        tokens = _tokens(text)
        left: dict[str, int] = {}
        right: dict[str, int] = {}
        i = _monomial(tokens, 0, left, order)
        if i >= len(tokens) or tokens[i] != "-":
            raise ParseError("expected '-' between the two monomials")
        i = _monomial(tokens, i + 1, right, order)
        if i != len(tokens):
            raise ParseError(f"trailing input {tokens[i:]!r}")
        raw.append((left, right))
    names = tuple(sorted(order, key=order.get))
    out = []
    for left, right in raw:
        out.append((tuple(left.get(n, 0) for n in names),
                    tuple(right.get(n, 0) for n in names)))
    return names, out


__all__ = ["ParseError", "parse_binomial", "parse_system"]
