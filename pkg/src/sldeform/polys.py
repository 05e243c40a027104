"""Integer polynomials in one variable, stored little-endian as lists of ints."""

from __future__ import annotations

import re

from .errors import RingSyntaxError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(\*\*|[-+*^()]))")


def parse_poly(text: str, var: str = "x") -> list[int]:
    """Parse e.g. ``"x^2 - 5"`` or ``"2*x*(x+1)"`` into coefficients."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise RingSyntaxError(f"unexpected character at {pos} in {text!r}")
        num, name, op = m.groups()
        if name is not None and name.lower() not in (var.lower(), "x", "e", "eps"):
            raise RingSyntaxError(f"unknown symbol {name!r} in {text!r}")
        tokens.append(("num", int(num)) if num else ("var", None) if name else ("op", "^" if op == "**" else op))
        pos = m.end()
    tokens.append(("end", None))
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        i += 1
        return tokens[i - 1]

    def expr():
        acc = term()
        while peek() in (("op", "+"), ("op", "-")):
            sign = take()[1]
            rhs = term()
            acc = poly_add(acc, rhs if sign == "+" else [-c for c in rhs])
        return acc

    def term():
        acc = unary()
        while True:
            t = peek()
            if t == ("op", "*"):
                take()
                acc = poly_mul(acc, unary())
            elif t[0] in ("num", "var") or t == ("op", "("):
                acc = poly_mul(acc, unary())  # implicit multiplication: 2x
            else:
                return acc

    def unary():
        if peek() == ("op", "-"):
            take()
            return [-c for c in unary()]
        if peek() == ("op", "+"):
            take()
            return unary()
        return power()

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            t = take()
            if t[0] != "num":
                raise RingSyntaxError(f"exponent must be a non-negative integer in {text!r}")
            out = [1]
            for _ in range(t[1]):
                out = poly_mul(out, base)
            return out
        return base

    def atom():
        t = take()
        if t[0] == "num":
            return [t[1]]
        if t[0] == "var":
            return [0, 1]
        if t == ("op", "("):
            v = expr()
            if take() != ("op", ")"):
                raise RingSyntaxError(f"unbalanced parentheses in {text!r}")
            return v
        raise RingSyntaxError(f"unexpected token {t} in {text!r}")

    result = expr()
    if peek()[0] != "end":
        raise RingSyntaxError(f"trailing input in {text!r}")
    return trim(result)


def trim(c: list[int]) -> list[int]:
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c or [0]


def poly_add(f: list[int], g: list[int]) -> list[int]:
    n = max(len(f), len(g))
    return trim([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)])


def poly_mul(f: list[int], g: list[int]) -> list[int]:
    out = [0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        if x:
            for j, y in enumerate(g):
                out[i + j] += x * y
    return trim(out)


def derivative(f: list[int]) -> list[int]:
    return trim([i * c for i, c in enumerate(f)][1:] or [0])


def format_poly(c: list[int], modulus: int | None = None, var: str = "x") -> str:
    """Human-readable form; with a modulus, coefficients are balanced."""
    terms = []
    for i in range(len(c) - 1, -1, -1):
        x = c[i]
        if modulus is not None:
            x %= modulus
            if x > modulus // 2:
                x -= modulus
        if x == 0:
            continue
        mono = "" if i == 0 else var if i == 1 else f"{var}^{i}"
        mag = abs(x)
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}{mono}")
        terms.append(("-" if x < 0 else "+", body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def factor_mod_p(c: list[int], p: int) -> list[tuple[list[int], int]]:
    """Monic irreducible factors of ``c`` over F_p with multiplicities."""
    from sympy import Poly, symbols

    x = symbols("x")
    poly = Poly(list(reversed([v % p for v in c])), x, modulus=p)
    _, factors = poly.factor_list()
    out = []
    for f, e in factors:
        coeffs = [int(v) % p for v in reversed(f.all_coeffs())]
        out.append((coeffs, int(e)))
    out.sort()
    return out


def is_prime(n: int) -> bool:
    from sympy import isprime

    return bool(isprime(n))
