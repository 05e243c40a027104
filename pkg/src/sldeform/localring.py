"""Finite local rings Z/p^a[x]/(g, J) with exact arithmetic.

Elements are stored as a single integer code: the canonical coefficient
vector ``(c_0, ..., c_{d-1})`` packed in base p^a.  Canonical means reduced
mod p^a and reduced modulo the Howell basis of the ideal generated by J, so
equality of elements is equality of codes.  Hot loops (matrix products,
exhaustive searches) work on codes directly; :class:`RingElt` is the
user-facing wrapper.

Only monogenic presentations are supported.  Quotients R/m^l are built by
appending generators of m^l to J, so the ring F_4[eps], which needs two
generators over Z/2, is out of reach.
"""

from __future__ import annotations

import itertools
import re
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

from .errors import (
    IncompleteSearch,
    MixedRings,
    NoConvergence,
    NonUnit,
    NonUnitDerivative,
    NotLocal,
    NotPrime,
    ResidueMismatch,
    RingSyntaxError,
)
from .howell import HowellBasis, valuation
from .polys import derivative, factor_mod_p, format_poly, is_prime, parse_poly

PolyLike = Union[str, Sequence[int]]

#: rings up to this size memoise products
_MEMO_LIMIT = 5000
#: find_homs enumerates candidates exhaustively up to this target size
EXHAUSTIVE_LIMIT = 10**6


class RingSpec:
    """A finite local ring Z/p^a[x]/(g(x), J).  Build with :func:`make_ring`."""

    def __init__(self, p: int, a: int, g: Sequence[int], jbasis: HowellBasis,
                 h: Sequence[int], e: int):
        self.p = p
        self.a = a
        self.q = p**a
        self.g = tuple(g)
        self.d = len(g) - 1
        self._jbasis = jbasis
        self.J = tuple(jbasis.rows)
        self.h = tuple(h)
        self.e = e
        self.m = len(h) - 1  # residue degree
        self.k_size = p**self.m
        self._cyclic = self.d == 1
        self._memo: dict | None = {} if self.size <= _MEMO_LIMIT else None
        self._root = (-self.h[0]) % p if self.m == 1 else None

    # --- identity -------------------------------------------------------
    def _ident(self):
        return (self.p, self.a, self.g, self.J)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, RingSpec):
            return NotImplemented
        return self._ident() == other._ident()

    def __hash__(self) -> int:
        return hash(self._ident())

    def __reduce__(self):
        return (make_ring, (self.p, self.a, list(self.g), [list(r) for r in self.J]))

    def __repr__(self) -> str:
        return f"RingSpec({self.spec_string()!r})"

    def __str__(self) -> str:
        return self.spec_string()

    def spec_string(self) -> str:
        base = f"Z/{self.p}^{self.a}"
        if self.d == 1:
            return base
        s = f"{base}[x]/({format_poly(list(self.g), self.q)})"
        if self.J:
            s += "; J = " + ", ".join(format_poly(list(r), self.q) for r in self.J)
        return s

    @cached_property
    def size(self) -> int:
        return self.q**self.d // self._jbasis.size()

    # --- encoding -------------------------------------------------------
    def encode(self, vec: Sequence[int]) -> int:
        code = 0
        for c in reversed(vec):
            code = code * self.q + c
        return code

    def decode(self, code: int) -> tuple[int, ...]:
        if self._cyclic:
            return (code,)
        out = []
        q = self.q
        for _ in range(self.d):
            code, c = divmod(code, q)
            out.append(c)
        return tuple(out)

    def canon(self, vec: Sequence[int]) -> int:
        """Code of an arbitrary coefficient vector (any length, any integers)."""
        return self._reduce_poly(list(vec))

    def _reduce_poly(self, prod: list[int]) -> int:
        q, d, g = self.q, self.d, self.g
        if len(prod) > d:
            for k in range(len(prod) - 1, d - 1, -1):
                c = prod[k] % q
                if c:
                    off = k - d
                    for i in range(d):
                        prod[off + i] -= c * g[i]
        vec = [prod[i] % q if i < len(prod) else 0 for i in range(d)]
        if self.J:
            vec = self._jbasis.reduce(vec)
        return self.encode(vec)

    def key(self, code: int) -> tuple[int, ...]:
        """Canonical sort key: the coefficient vector, little-endian."""
        return self.decode(code)

    # --- arithmetic on codes -------------------------------------------
    def from_int(self, n: int) -> int:
        if self._cyclic:
            return n % self.q
        return self.canon([n])

    def add(self, x: int, y: int) -> int:
        if self._cyclic:
            return (x + y) % self.q
        return self.canon([a + b for a, b in zip(self.decode(x), self.decode(y))])

    def sub(self, x: int, y: int) -> int:
        if self._cyclic:
            return (x - y) % self.q
        return self.canon([a - b for a, b in zip(self.decode(x), self.decode(y))])

    def neg(self, x: int) -> int:
        if self._cyclic:
            return -x % self.q
        return self.canon([-a for a in self.decode(x)])

    def mul(self, x: int, y: int) -> int:
        if self._cyclic:
            return x * y % self.q
        memo = self._memo
        if memo is not None:
            r = memo.get((x, y))
            if r is None:
                r = memo[(x, y)] = self._mul_raw(x, y)
            return r
        return self._mul_raw(x, y)

    def _mul_raw(self, x: int, y: int) -> int:
        xs, ys = self.decode(x), self.decode(y)
        prod = [0] * (2 * self.d - 1)
        for i, a in enumerate(xs):
            if a:
                for j, b in enumerate(ys):
                    prod[i + j] += a * b
        return self._reduce_poly(prod)

    def dot(self, xs: Sequence[int], ys: Sequence[int]) -> int:
        """sum of x*y over paired codes, reduced once."""
        if self._cyclic:
            return sum(a * b for a, b in zip(xs, ys)) % self.q
        d = self.d
        prod = [0] * (2 * d - 1)
        for x, y in zip(xs, ys):
            if x and y:
                xv, yv = self.decode(x), self.decode(y)
                for i, a in enumerate(xv):
                    if a:
                        for j, b in enumerate(yv):
                            prod[i + j] += a * b
        return self._reduce_poly(prod)

    def power(self, x: int, e: int) -> int:
        if e < 0:
            return self.power(self.inv(x), -e)
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            e >>= 1
        return result

    def is_unit(self, x: int) -> bool:
        return self.residue_code(x) != 0

    def inv(self, x: int) -> int:
        if not self.is_unit(x):
            raise NonUnit(f"{self.elt(x)} lies in the maximal ideal of {self}")
        if self._cyclic:
            return pow(x, -1, self.q)
        return self.power(x, self.unit_count - 1)

    @cached_property
    def unit_count(self) -> int:
        return self.size - self.maximal_ideal().size

    @property
    def zero(self) -> int:
        return 0

    @cached_property
    def one(self) -> int:
        return self.from_int(1)

    @cached_property
    def x_code(self) -> int:
        return self.canon([0, 1])

    # --- residue field --------------------------------------------------
    def residue_code(self, x: int) -> int:
        p = self.p
        if self._cyclic:
            return x % p
        coeffs = self.decode(x)
        if self.m == 1:
            c = self._root
            acc = 0
            for v in reversed(coeffs):
                acc = (acc * c + v) % p
            return acc
        k = self.residue_field
        return k.canon([v % p for v in coeffs])

    @cached_property
    def residue_field(self) -> "RingSpec":
        if self.m == 1:
            return make_ring(self.p, 1, [0, 1])
        return make_ring(self.p, 1, list(self.h))

    def lift_residue_code(self, c: int) -> int:
        """A fixed lift to R of a residue-field code."""
        if self.m == 1:
            return self.from_int(c)
        return self.canon(list(self.residue_field.decode(c)))

    # --- elements -------------------------------------------------------
    def elt(self, value: Union[int, Sequence[int], "RingElt"]) -> "RingElt":
        if isinstance(value, RingElt):
            if value.ring != self:
                raise MixedRings(f"{value} is not in {self}")
            return value
        if isinstance(value, int):
            return RingElt(self, self.from_int(value))
        return RingElt(self, self.canon(list(value)))

    __call__ = elt

    @property
    def x(self) -> "RingElt":
        return RingElt(self, self.x_code)

    def element_codes(self) -> list[int]:
        """All element codes in canonical order."""
        ranges = []
        piv = dict(self._jbasis.pivots)
        for i in range(self.d):
            ranges.append(range(self.p ** piv[i]) if i in piv else range(self.q))
        return [self.encode(v) for v in itertools.product(*ranges)]

    def elements(self) -> list["RingElt"]:
        return [RingElt(self, c) for c in self.element_codes()]

    def unit_codes(self) -> list[int]:
        return [c for c in self.element_codes() if self.is_unit(c)]

    def eval_poly_code(self, coeffs: Sequence[Union[int, "RingElt"]], x: int) -> int:
        acc = 0
        for c in reversed(coeffs):
            cc = c.code if isinstance(c, RingElt) else self.from_int(c)
            acc = self.add(self.mul(acc, x), cc)
        return acc

    # --- ideals ---------------------------------------------------------
    def ideal(self, gens: Iterable[Union[int, "RingElt"]]) -> "Ideal":
        codes = [g.code if isinstance(g, RingElt) else self.from_int(g) for g in gens]
        return Ideal(self, codes)

    def unit_ideal(self) -> "Ideal":
        return Ideal(self, [self.one])

    def maximal_ideal(self) -> "Ideal":
        return self.maximal_ideal_power(1)

    def maximal_ideal_power(self, l: int) -> "Ideal":
        cache = self.__dict__.setdefault("_mpow", {})
        if l in cache:
            return cache[l]
        if l == 0:
            I = self.unit_ideal()
        elif l == 1:
            I = Ideal(self, [self.from_int(self.p), self.eval_poly_code(list(self.h), self.x_code)])
        else:
            I = self.maximal_ideal_power(l - 1) * self.maximal_ideal_power(1)
        cache[l] = I
        return I

    @cached_property
    def nilpotency_index(self) -> int:
        """Least j with m^j = 0."""
        j = 0
        while not self.maximal_ideal_power(j).is_zero():
            j += 1
        return j


class Ideal:
    """An ideal of a RingSpec, held as the Howell basis of its preimage in (Z/p^a)^d."""

    def __init__(self, ring: RingSpec, gens: Sequence[int]):
        self.ring = ring
        rows = []
        xpow = [ring.one]
        for _ in range(1, ring.d):
            xpow.append(ring.mul(xpow[-1], ring.x_code))
        for gcode in gens:
            for xp in xpow:
                rows.append(ring.decode(ring.mul(gcode, xp)))
        rows.extend(ring.J)
        self.module = HowellBasis(rows, ring.p, ring.a, ring.d)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.module == other.module

    def __hash__(self) -> int:
        return hash(self.module)

    def __repr__(self) -> str:
        return f"Ideal({self.ring}, gens={[str(g) for g in self.generators()]})"

    def contains(self, x: Union[int, "RingElt"]) -> bool:
        code = x.code if isinstance(x, RingElt) else x
        return self.module.contains(self.ring.decode(code))

    __contains__ = contains

    @property
    def size(self) -> int:
        return self.module.size() // self.ring._jbasis.size()

    def basis(self) -> list[tuple[int, ...]]:
        """Howell basis rows (coefficient vectors over Z/p^a)."""
        return list(self.module.rows)

    def generators(self) -> list["RingElt"]:
        out = []
        for row in self.module.rows:
            c = self.ring.canon(row)
            if c:
                out.append(RingElt(self.ring, c))
        return out

    def element_codes(self) -> list[int]:
        codes = {self.ring.canon(v) for v in self.module.elements()}
        return sorted(codes, key=self.ring.key)

    def elements(self) -> list["RingElt"]:
        return [RingElt(self.ring, c) for c in self.element_codes()]

    def is_zero(self) -> bool:
        return self.module == self.ring._jbasis

    def is_unit_ideal(self) -> bool:
        return self.contains(self.ring.one)

    def __mul__(self, other: "Ideal") -> "Ideal":
        R = self.ring
        ga = [g.code for g in self.generators()]
        gb = [g.code for g in other.generators()]
        return Ideal(R, [R.mul(x, y) for x in ga for y in gb])

    def __pow__(self, k: int) -> "Ideal":
        out = self.ring.unit_ideal()
        for _ in range(k):
            out = out * self
        return out

    def express(self, x: Union[int, "RingElt"]) -> list[tuple["RingElt", "RingElt"]] | None:
        """Write ``x`` as a sum of ``(coefficient, generator)`` products, or None."""
        R = self.ring
        gens = self.generators()
        rows = [R.decode(g.code) for g in gens] + list(R.J)
        hb = HowellBasis(rows, R.p, R.a, R.d, track=True)
        code = x.code if isinstance(x, RingElt) else x
        combo = hb.express(R.decode(code))
        if combo is None:
            return None
        return [(R.elt(c), gens[i]) for i, c in sorted(combo.items()) if i < len(gens)]


class RingElt:
    """An element of a RingSpec."""

    __slots__ = ("ring", "code")

    def __init__(self, ring: RingSpec, code: int):
        self.ring = ring
        self.code = code

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.ring.decode(self.code)

    def _other(self, y) -> int:
        if isinstance(y, RingElt):
            if y.ring is not self.ring and y.ring != self.ring:
                raise MixedRings(f"{self.ring} vs {y.ring}")
            return y.code
        if isinstance(y, int):
            return self.ring.from_int(y)
        raise TypeError(f"cannot combine RingElt with {type(y).__name__}")

    def __add__(self, y):
        return RingElt(self.ring, self.ring.add(self.code, self._other(y)))

    __radd__ = __add__

    def __sub__(self, y):
        return RingElt(self.ring, self.ring.sub(self.code, self._other(y)))

    def __rsub__(self, y):
        return RingElt(self.ring, self.ring.sub(self._other(y), self.code))

    def __mul__(self, y):
        return RingElt(self.ring, self.ring.mul(self.code, self._other(y)))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElt(self.ring, self.ring.neg(self.code))

    def __pow__(self, e: int):
        return RingElt(self.ring, self.ring.power(self.code, e))

    def __truediv__(self, y):
        return self * RingElt(self.ring, self.ring.inv(self._other(y)))

    def __rtruediv__(self, y):
        return RingElt(self.ring, self._other(y)) * self.inverse()

    def inverse(self) -> "RingElt":
        return RingElt(self.ring, self.ring.inv(self.code))

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.code)

    def residue(self) -> "RingElt":
        return RingElt(self.ring.residue_field, self.ring.residue_code(self.code))

    def __eq__(self, y) -> bool:
        if isinstance(y, int):
            return self.code == self.ring.from_int(y)
        if not isinstance(y, RingElt):
            return NotImplemented
        return self.code == y.code and (self.ring is y.ring or self.ring == y.ring)

    def __hash__(self) -> int:
        return hash((self.ring, self.code))

    def __lt__(self, y: "RingElt") -> bool:
        return self.ring.key(self.code) < y.ring.key(y.code)

    def __bool__(self) -> bool:
        return self.code != 0

    def __repr__(self) -> str:
        return f"RingElt({self})"

    def __str__(self) -> str:
        R = self.ring
        if R.d == 1:
            return str(self.code)
        return format_poly(list(self.coeffs))

    def serialize(self) -> list[int]:
        return list(self.coeffs)


class RingHom:
    """Local homomorphism source -> target determined by the image of x."""

    def __init__(self, source: RingSpec, target: RingSpec, x_image: Union[RingElt, int],
                 check: bool = True):
        self.source = source
        self.target = target
        if isinstance(x_image, int):
            x_image = RingElt(target, x_image)
        self.x_image = x_image
        s = x_image.code
        self._xpow = [target.one]
        for _ in range(1, source.d):
            self._xpow.append(target.mul(self._xpow[-1], s))
        if check:
            problem = self.problem()
            if problem:
                raise ValueError(f"not a homomorphism {source} -> {target}: {problem}")

    def problem(self) -> str | None:
        """Reason this map fails to be a morphism, or None."""
        R, S = self.source, self.target
        if R.p != S.p or R.residue_field != S.residue_field:
            return "residue fields differ"
        if S.from_int(R.q) != 0:
            return f"{R.q} is nonzero in the target"
        s = self.x_image.code
        if S.eval_poly_code(list(R.g), s) != 0:
            return "g(x_image) != 0"
        for row in R.J:
            if self._apply(R.encode(row)) != 0:
                return f"J generator {format_poly(list(row))} does not vanish"
        if S.residue_code(s) != R.residue_code(R.x_code):
            return "does not induce the identity on the residue field"
        return None

    def _apply(self, code: int) -> int:
        S = self.target
        coeffs = self.source.decode(code)
        return S.dot([S.from_int(c) for c in coeffs], self._xpow)

    def apply_code(self, code: int) -> int:
        return self._apply(code)

    def __call__(self, r: Union[RingElt, int]) -> RingElt:
        if isinstance(r, int):
            r = self.source.elt(r)
        if r.ring != self.source:
            raise MixedRings(f"{r.ring} is not the source {self.source}")
        return RingElt(self.target, self._apply(r.code))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RingHom):
            return NotImplemented
        return (self.source, self.target, self.x_image) == (other.source, other.target, other.x_image)

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.x_image.code))

    def __repr__(self) -> str:
        return f"RingHom({self.source} -> {self.target}, x -> {self.x_image})"

    def compose(self, after: "RingHom") -> "RingHom":
        """``after`` applied after ``self``."""
        return RingHom(self.source, after.target, after(self.x_image))


# --- construction -------------------------------------------------------

def _poly(x: PolyLike) -> list[int]:
    return parse_poly(x) if isinstance(x, str) else [int(c) for c in x]


def _polymod(f: list[int], g: list[int], q: int) -> list[int]:
    """Remainder of f modulo the monic g, coefficients mod q, length deg g."""
    f = [c % q for c in f]
    d = len(g) - 1
    for k in range(len(f) - 1, d - 1, -1):
        c = f[k]
        if c:
            for i in range(d + 1):
                f[k - d + i] = (f[k - d + i] - c * g[i]) % q
    return (f + [0] * d)[:d]


def make_ring(p: int, a: int, g: PolyLike = (0, 1), J: Iterable[PolyLike] = ()) -> RingSpec:
    """Validate a presentation Z/p^a[x]/(g, J) and return the ring.

    Raises NotPrime for composite p and NotLocal when g mod p has two
    distinct irreducible factors or J generates the unit ideal.
    """
    if not isinstance(p, int) or p < 2 or not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if a < 1:
        raise ValueError("exponent a must be >= 1")
    q = p**a
    gl = [c % q for c in _poly(g)]
    while len(gl) > 1 and gl[-1] == 0:
        gl.pop()
    if len(gl) < 2 or gl[-1] != 1:
        raise ValueError(f"g must be monic of degree >= 1, got {gl}")
    factors = factor_mod_p(gl, p)
    if len(factors) != 1:
        raise NotLocal(f"g mod {p} has distinct irreducible factors {[f for f, _ in factors]}")
    h, e = factors[0]
    jvecs = [_polymod(_poly(j), gl, q) for j in J]
    return _present(p, a, gl, jvecs, h, e)[0]


def _present(p: int, a: int, g: list[int], jvecs: list[list[int]], h, e) -> tuple[RingSpec, int]:
    """Canonical presentation of Z/p^a[x]/(g, J) plus the code of the class of x in it.

    Shrinks a when some p^b lies in J, and collapses to Z/p^b (with g = x)
    when the ring has no room beyond its constants.
    """
    d = len(g) - 1
    if d == 1:
        b = min([a] + [valuation(j[0], p, a) for j in jvecs])
        if b == 0:
            raise NotLocal("J generates the unit ideal")
        return RingSpec(p, b, [0, 1], HowellBasis([], p, b, 1), [0, 1], 1), (-g[0]) % p**b
    probe = RingSpec(p, a, g, HowellBasis([], p, a, d), h, e)
    rows = []
    xcode = probe.x_code
    for j in jvecs:
        jc = probe.canon(j)
        xp = probe.one
        for _ in range(d):
            rows.append(probe.decode(probe.mul(jc, xp)))
            xp = probe.mul(xp, xcode)
    jb = HowellBasis(rows, p, a, d)
    b = next((b for b in range(a) if jb.contains([p**b] + [0] * (d - 1))), a)
    if b == 0:
        raise NotLocal("J generates the unit ideal")
    if b < a:
        nq = p**b
        return _present(p, b, [c % nq for c in g], [[c % nq for c in r] for r in jb.rows], h, e)
    if probe.q**d // jb.size() == probe.q:
        # only constants survive: x is congruent to an integer
        c = jb.reduce([0, 1] + [0] * (d - 2))[0]
        return RingSpec(p, a, [0, 1], HowellBasis([], p, a, 1), [0, 1], 1), c
    R = RingSpec(p, a, g, jb, h, e)
    return R, R.x_code


_RING_RE = re.compile(
    r"^\s*(?:Z/(\d+)(?:\^(\d+))?|F_?(\d+))\s*(?:\[\s*([A-Za-z]\w*)\s*\]\s*/\s*\((.*)\))?\s*(?:;\s*J\s*=\s*(.*))?$"
)


def parse_ring(text: str) -> RingSpec:
    """Parse ``Z/p^a``, ``Z/p^a[x]/(g)``, optionally followed by ``; J = e1, e2``.

    ``Z/9`` and ``F_5`` are accepted as shorthands, and the quotient may list
    several generators ``(g, j1, j2)``; all but the first go into J.
    """
    m = _RING_RE.match(text)
    if not m:
        raise RingSyntaxError(f"cannot parse ring spec {text!r}")
    base, exp, fp, var, polys, jpart = m.groups()
    if fp is not None:
        p, a = int(fp), 1
    else:
        n = int(base)
        if exp is not None:
            p, a = n, int(exp)
        else:
            p, a = _prime_power(n)
    J: list[PolyLike] = []
    g: PolyLike = [0, 1]
    if polys is not None:
        parts = [s for s in _split_top(polys) if s.strip()]
        g = parse_poly(parts[0], var)
        J.extend(parse_poly(s, var) for s in parts[1:])
    if jpart:
        J.extend(parse_poly(s, var or "x") for s in _split_top(jpart) if s.strip())
    return make_ring(p, a, g, J)


def _split_top(s: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


def _prime_power(n: int) -> tuple[int, int]:
    orig = n
    for p in range(2, n + 1):
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            if n != 1:
                raise NotLocal(f"Z/{orig} is not local")
            return p, a
    raise RingSyntaxError("modulus must be >= 2")


def ring(spec: Union[str, RingSpec]) -> RingSpec:
    return spec if isinstance(spec, RingSpec) else parse_ring(spec)


# --- operations ---------------------------------------------------------

def arith(x: RingElt, y: RingElt, op: str) -> RingElt:
    if x.ring != y.ring:
        raise MixedRings(f"{x.ring} vs {y.ring}")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown op {op!r}")


def invert(x: RingElt) -> RingElt:
    return x.inverse()


def residue(x: RingElt) -> RingElt:
    return x.residue()


def teichmueller(R: RingSpec, c: Union[RingElt, int]) -> RingElt:
    """The root of unity in R lifting the residue ``c`` (0 lifts to 0)."""
    k = R.residue_field
    cc = k.elt(c).code
    if cc == 0:
        return RingElt(R, 0)
    y = R.lift_residue_code(cc)
    for _ in range(4 * R.nilpotency_index + 8):
        z = R.power(y, R.k_size)
        if z == y:
            return RingElt(R, y)
        y = z
    raise NoConvergence("Teichmueller iteration did not stabilise")


def hensel_lift(f: Sequence[Union[int, RingElt]], seed: Union[RingElt, int]) -> RingElt:
    """Newton-iterate a root of ``f`` (little-endian coefficients) from ``seed``."""
    if isinstance(seed, int):
        raise TypeError("seed must be a RingElt so the ring is known")
    R = seed.ring
    coeffs = [c.code if isinstance(c, RingElt) else R.from_int(c) for c in f]
    fprime = [R.mul(R.from_int(i), c) for i, c in enumerate(coeffs)][1:] or [0]
    x = seed.code
    fx = R.eval_poly_code(coeffs, x)
    if R.is_unit(fx):
        raise NoConvergence("f(seed) is a unit, seed is not an approximate root")
    dx = R.eval_poly_code(fprime, x)
    if not R.is_unit(dx):
        raise NonUnitDerivative(f"f'({seed}) lies in the maximal ideal")
    for _ in range(R.nilpotency_index.bit_length() + 4):
        fx = R.eval_poly_code(coeffs, x)
        if fx == 0:
            return RingElt(R, x)
        dx = R.eval_poly_code(fprime, x)
        x = R.sub(x, R.mul(fx, R.inv(dx)))
    if R.eval_poly_code(coeffs, x) == 0:
        return RingElt(R, x)
    raise NoConvergence("Newton iteration did not reach a root")


def maximal_ideal_power(R: RingSpec, l: int) -> tuple[Ideal, int]:
    """(m^l, nilpotency index n(R))."""
    return R.maximal_ideal_power(l), R.nilpotency_index


def quotient_by_m_power(R: RingSpec, l: int) -> tuple[RingSpec, RingHom]:
    """R/m^l together with the reduction map."""
    if l < 1:
        raise ValueError("l must be >= 1")
    cache = R.__dict__.setdefault("_quot", {})
    if l not in cache:
        I = R.maximal_ideal_power(l)
        Q, xc = _present(R.p, R.a, list(R.g), [list(r) for r in I.basis()], list(R.h), R.e)
        cache[l] = (Q, RingHom(R, Q, RingElt(Q, xc)))
    return cache[l]


def find_homs(R: RingSpec, S: RingSpec) -> list[RingHom]:
    """Every local homomorphism R -> S inducing the identity on k."""
    if R.p != S.p or R.residue_field != S.residue_field:
        raise ResidueMismatch(f"{R} and {S} have different residue fields")
    if S.from_int(R.q) != 0:
        return []
    seed = S.lift_residue_code(R.residue_code(R.x_code))
    if S.size <= EXHAUSTIVE_LIMIT:
        out = []
        for mcode in S.maximal_ideal().element_codes():
            s = S.add(seed, mcode)
            hom = RingHom(R, S, s, check=False)
            if hom.problem() is None:
                out.append(hom)
        out.sort(key=lambda f: S.key(f.x_image.code))
        return out
    gp = derivative(list(R.g))
    if S.is_unit(S.eval_poly_code(gp, seed)):
        root = hensel_lift(list(R.g), RingElt(S, seed))
        hom = RingHom(R, S, root, check=False)
        return [hom] if hom.problem() is None else []
    raise IncompleteSearch(
        f"{S} has {S.size} elements and g_R is not Hensel-liftable; search not attempted")


def least_preimage(hom: RingHom, y: Union[RingElt, int]) -> int:
    """Smallest (canonical order) code of S mapping to ``y`` under a quotient map S -> Q."""
    S, Q = hom.source, hom.target
    ycode = y.code if isinstance(y, RingElt) else y
    cache = hom.__dict__.setdefault("_pre", None)
    if cache is None:
        cache = {}
        for c in S.element_codes():
            img = hom.apply_code(c)
            if img not in cache:
                cache[img] = c
        hom.__dict__["_pre"] = cache
    try:
        return cache[ycode]
    except KeyError:
        raise ValueError(f"{Q.elt(ycode) if isinstance(ycode, int) else y} has no preimage") from None
