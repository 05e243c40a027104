"""Square matrices over finite local rings and the transvection calculus of SL_n.

Indices are 0-based throughout: ``t(0, 1, r)`` is the elementary matrix
I + r*e_01, i.e. the transvection usually written t_12^r.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterable, NamedTuple, Sequence, Union

from .errors import (
    BadIndices,
    NonUnitParameter,
    NotInCongruenceSubgroup,
    NotInvertible,
    NotUnimodular,
    PreconditionViolated,
    UnsupportedCase,
)
from .howell import HowellBasis
from .localring import Ideal, RingElt, RingHom, RingSpec
from .polys import poly_add, poly_mul, trim

Scalar = Union[int, RingElt]


def _code(R: RingSpec, x: Scalar) -> int:
    if isinstance(x, RingElt):
        if x.ring is not R and x.ring != R:
            raise ValueError(f"{x} does not belong to {R}")
        return x.code
    if isinstance(x, int):
        return R.from_int(x)
    return R.canon(list(x))


class Mat:
    """An n x n matrix over a RingSpec, entries stored as ring codes row-major."""

    __slots__ = ("ring", "n", "codes", "_hash")

    def __init__(self, ring: RingSpec, n: int, codes: Sequence[int]):
        self.ring = ring
        self.n = n
        self.codes = tuple(codes)
        self._hash = None

    # --- construction ---------------------------------------------------
    @classmethod
    def from_rows(cls, ring: RingSpec, rows: Sequence[Sequence[Scalar]]) -> "Mat":
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        return cls(ring, n, [_code(ring, x) for r in rows for x in r])

    @classmethod
    def identity(cls, ring: RingSpec, n: int) -> "Mat":
        one = ring.one
        return cls(ring, n, [one if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def zero(cls, ring: RingSpec, n: int) -> "Mat":
        return cls(ring, n, [0] * (n * n))

    @classmethod
    def unit_matrix(cls, ring: RingSpec, n: int, a: int, b: int) -> "Mat":
        """e_ab."""
        codes = [0] * (n * n)
        codes[a * n + b] = ring.one
        return cls(ring, n, codes)

    @classmethod
    def diagonal(cls, ring: RingSpec, entries: Sequence[Scalar]) -> "Mat":
        n = len(entries)
        codes = [0] * (n * n)
        for i, x in enumerate(entries):
            codes[i * n + i] = _code(ring, x)
        return cls(ring, n, codes)

    @classmethod
    def diagonal_codes(cls, ring: RingSpec, codes: Sequence[int]) -> "Mat":
        """Like :meth:`diagonal`, but the entries are element codes, not integers."""
        n = len(codes)
        out = [0] * (n * n)
        for i, c in enumerate(codes):
            out[i * n + i] = c
        return cls(ring, n, out)

    # --- access ---------------------------------------------------------
    def __getitem__(self, ij: tuple[int, int]) -> RingElt:
        i, j = ij
        return RingElt(self.ring, self.codes[i * self.n + j])

    def code(self, i: int, j: int) -> int:
        return self.codes[i * self.n + j]

    def rows(self) -> list[list[RingElt]]:
        n = self.n
        return [[RingElt(self.ring, c) for c in self.codes[i * n:(i + 1) * n]] for i in range(n)]

    def serialize(self) -> list[list[list[int]]]:
        n, R = self.n, self.ring
        return [[list(R.decode(c)) for c in self.codes[i * n:(i + 1) * n]] for i in range(n)]

    def key(self) -> tuple:
        R = self.ring
        if R._cyclic:
            return self.codes
        return tuple(R.decode(c) for c in self.codes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.codes == other.codes and self.n == other.n and (
            self.ring is other.ring or self.ring == other.ring)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.codes)
        return self._hash

    def __lt__(self, other: "Mat") -> bool:
        return self.key() < other.key()

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(x) for x in row) for row in self.rows())
        return f"Mat[{body}]"

    # --- arithmetic -----------------------------------------------------
    def _same(self, other: "Mat") -> None:
        if other.n != self.n or (other.ring is not self.ring and other.ring != self.ring):
            raise ValueError("matrices over different rings or of different sizes")

    def __mul__(self, other: Union["Mat", Scalar]) -> "Mat":
        R, n = self.ring, self.n
        if not isinstance(other, Mat):
            c = _code(R, other)
            return Mat(R, n, [R.mul(c, x) for x in self.codes])
        self._same(other)
        A, B = self.codes, other.codes
        rows = [A[i * n:(i + 1) * n] for i in range(n)]
        cols = [B[j::n] for j in range(n)]
        if R._cyclic:
            q = R.q
            out = [sum(a * b for a, b in zip(r, c)) % q for r in rows for c in cols]
        else:
            out = [R.dot(r, c) for r in rows for c in cols]
        return Mat(R, n, out)

    def __rmul__(self, other: Scalar) -> "Mat":
        return self * other

    def __add__(self, other: "Mat") -> "Mat":
        self._same(other)
        R = self.ring
        return Mat(R, self.n, [R.add(x, y) for x, y in zip(self.codes, other.codes)])

    def __sub__(self, other: "Mat") -> "Mat":
        self._same(other)
        R = self.ring
        return Mat(R, self.n, [R.sub(x, y) for x, y in zip(self.codes, other.codes)])

    def __neg__(self) -> "Mat":
        R = self.ring
        return Mat(R, self.n, [R.neg(x) for x in self.codes])

    def __pow__(self, e: int) -> "Mat":
        if e < 0:
            return self.inverse() ** (-e)
        result = Mat.identity(self.ring, self.n)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def transpose(self) -> "Mat":
        n = self.n
        return Mat(self.ring, n, [self.codes[j * n + i] for i in range(n) for j in range(n)])

    def trace(self) -> RingElt:
        R, n = self.ring, self.n
        acc = 0
        for i in range(n):
            acc = R.add(acc, self.codes[i * n + i])
        return RingElt(R, acc)

    def is_identity(self) -> bool:
        one, n = self.ring.one, self.n
        return all(c == (one if i // n == i % n else 0) for i, c in enumerate(self.codes))

    def map(self, f: RingHom) -> "Mat":
        """Apply a ring homomorphism entrywise."""
        return Mat(f.target, self.n, [f.apply_code(c) for c in self.codes])

    def residue(self) -> "Mat":
        R = self.ring
        return Mat(R.residue_field, self.n, [R.residue_code(c) for c in self.codes])

    def entries_in(self, ideal: Ideal) -> bool:
        return all(ideal.contains(c) for c in self.codes)

    # --- determinant and inverse ---------------------------------------
    def det(self) -> RingElt:
        return RingElt(self.ring, _det(self.ring, self.n, list(self.codes)))

    def inverse(self) -> "Mat":
        R, n = self.ring, self.n
        A = [list(self.codes[i * n:(i + 1) * n]) + [R.one if i == j else 0 for j in range(n)]
             for i in range(n)]
        for c in range(n):
            piv = next((r for r in range(c, n) if R.is_unit(A[r][c])), None)
            if piv is None:
                raise NotInvertible(f"column {c} has no unit pivot, matrix is singular mod m")
            A[c], A[piv] = A[piv], A[c]
            inv = R.inv(A[c][c])
            A[c] = [R.mul(inv, x) for x in A[c]]
            for r in range(n):
                if r != c and A[r][c]:
                    f = A[r][c]
                    A[r] = [R.sub(x, R.mul(f, y)) for x, y in zip(A[r], A[c])]
        return Mat(R, n, [x for row in A for x in row[n:]])


def _det(R: RingSpec, n: int, codes: list[int]) -> int:
    if n <= 4:
        return _det_cofactor(R, n, codes)
    # elimination with unit pivots, cofactor expansion when no unit is available
    A = [codes[i * n:(i + 1) * n] for i in range(n)]
    sign = R.one
    acc = R.one
    for c in range(n):
        size = n - c
        piv = next((r for r in range(c, n) if R.is_unit(A[r][c])), None)
        if piv is None:
            rest = [A[r][j] for r in range(c, n) for j in range(c, n)]
            return R.mul(R.mul(sign, acc), _det_cofactor(R, size, rest))
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            sign = R.neg(sign)
        acc = R.mul(acc, A[c][c])
        inv = R.inv(A[c][c])
        for r in range(c + 1, n):
            if A[r][c]:
                f = R.mul(A[r][c], inv)
                A[r] = [R.sub(x, R.mul(f, y)) for x, y in zip(A[r], A[c])]
    return R.mul(sign, acc)


def _det_cofactor(R: RingSpec, n: int, codes: list[int]) -> int:
    if n == 1:
        return codes[0]
    if n == 2:
        return R.sub(R.mul(codes[0], codes[3]), R.mul(codes[1], codes[2]))
    total = 0
    for j in range(n):
        a = codes[j]
        if not a:
            continue
        minor = [codes[r * n + c] for r in range(1, n) for c in range(n) if c != j]
        term = R.mul(a, _det_cofactor(R, n - 1, minor))
        total = R.add(total, term) if j % 2 == 0 else R.sub(total, term)
    return total


def commutator(x: Mat, y: Mat) -> Mat:
    """[x, y] = x y x^-1 y^-1."""
    return x * y * x.inverse() * y.inverse()


# --- standard generators -------------------------------------------------

def _check_indices(n: int, *idx: int) -> None:
    for i in idx:
        if not 0 <= i < n:
            raise BadIndices(f"index {i} out of range for n={n}")


def t(R: RingSpec, n: int, a: int, b: int, r: Scalar) -> Mat:
    """Transvection I + r e_ab."""
    _check_indices(n, a, b)
    if a == b:
        raise BadIndices("transvection needs a != b")
    codes = list(Mat.identity(R, n).codes)
    codes[a * n + b] = _code(R, r)
    return Mat(R, n, codes)


def diag(R: RingSpec, entries: Sequence[Scalar]) -> Mat:
    """d(r_1, ..., r_n) for units r_i."""
    codes = [_code(R, x) for x in entries]
    for x in codes:
        if not R.is_unit(x):
            raise NonUnitParameter(f"diagonal entry {RingElt(R, x)} is not a unit")
    return Mat.diagonal_codes(R, codes)


def d_ab(R: RingSpec, n: int, a: int, b: int, u: Scalar) -> Mat:
    """d with u in position a, u^-1 in position b and 1 elsewhere."""
    _check_indices(n, a, b)
    if a == b:
        raise BadIndices("d_ab needs a != b")
    uc = _code(R, u)
    if not R.is_unit(uc):
        raise NonUnitParameter(f"{RingElt(R, uc)} is not a unit")
    entries = [R.one] * n
    entries[a] = uc
    entries[b] = R.inv(uc)
    return Mat.diagonal_codes(R, entries)


def sigma(R: RingSpec, n: int, a: int, b: int, u: Scalar) -> Mat:
    """I - e_aa - e_bb + u e_ab - u^-1 e_ba."""
    _check_indices(n, a, b)
    if a == b:
        raise BadIndices("sigma needs a != b")
    uc = _code(R, u)
    if not R.is_unit(uc):
        raise NonUnitParameter(f"{RingElt(R, uc)} is not a unit")
    codes = list(Mat.identity(R, n).codes)
    codes[a * n + a] = 0
    codes[b * n + b] = 0
    codes[a * n + b] = uc
    codes[b * n + a] = R.neg(R.inv(uc))
    return Mat(R, n, codes)


def standard_matrix(kind: str, R: RingSpec, n: int, *params) -> Mat:
    """Dispatch ``t``/``d``/``d_ab``/``sigma`` to the constructors above.

    ``t``, ``d_ab`` and ``sigma`` take ``(a, b, r)``; ``d`` takes the list
    of diagonal units (its determinant is their product).
    """
    if kind == "t":
        return t(R, n, *params)
    if kind == "d":
        (entries,) = params
        if len(entries) != n:
            raise BadIndices(f"d needs {n} entries")
        return diag(R, entries)
    if kind == "d_ab":
        return d_ab(R, n, *params)
    if kind == "sigma":
        return sigma(R, n, *params)
    raise ValueError(f"unknown kind {kind!r}")


# --- transvection words --------------------------------------------------

class TransvectionWord:
    """Product t_{a1 b1}^{r1} t_{a2 b2}^{r2} ... in left-to-right order."""

    def __init__(self, ring: RingSpec, n: int, letters: Iterable[tuple[int, int, Scalar]] = (),
                 ideal: Ideal | None = None):
        self.ring = ring
        self.n = n
        self.letters = [(a, b, RingElt(ring, _code(ring, r))) for a, b, r in letters]
        self.ideal = ideal

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __repr__(self) -> str:
        return "TransvectionWord(" + " ".join(f"t{a}{b}^{r}" for a, b, r in self.letters) + ")"

    def evaluate(self) -> Mat:
        R, n = self.ring, self.n
        M = Mat.identity(R, n)
        for a, b, r in self.letters:
            M = M * t(R, n, a, b, r)
        return M

    def params_in_ideal(self) -> bool:
        if self.ideal is None:
            return True
        return all(self.ideal.contains(r) for _, _, r in self.letters)

    def serialize(self) -> list:
        return [[a, b, r.serialize()] for a, b, r in self.letters]


def _left_t(R, A, n, i, j, c):
    """A <- t_ij^c A: row i += c * row j."""
    A[i] = [R.add(x, R.mul(c, y)) for x, y in zip(A[i], A[j])]


def _right_t(R, A, n, i, j, c):
    """A <- A t_ij^c: column j += c * column i."""
    for row in A:
        row[j] = R.add(row[j], R.mul(c, row[i]))


def _d_word_from_sigma(R: RingSpec, a: int, b: int, u: int) -> list[tuple[int, int, int]]:
    """d_ab^u as sigma^u sigma^-1, each sigma a product of three transvections."""
    ui = R.inv(u)
    m1 = R.neg(R.one)
    return [(a, b, u), (b, a, R.neg(ui)), (a, b, u),
            (a, b, m1), (b, a, R.one), (a, b, m1)]


def _d_word_congruence(R: RingSpec, a: int, b: int, u: int, gens: list[int]
                       ) -> list[tuple[int, int, int]]:
    """d_ab^u for u - 1 in a^2, as a product of words t^r t^s t^(-r/u) t^(-su) with r, s in a."""
    d = R.d
    xpow = [R.one]
    for _ in range(1, d):
        xpow.append(R.mul(xpow[-1], R.x_code))
    pairs = []
    rows = []
    for i, gi in enumerate(gens):
        for gj in gens[i:]:
            for xp in xpow:
                pairs.append((R.mul(gi, xp), gj))
                rows.append(R.decode(R.mul(R.mul(gi, xp), gj)))
    nrows = len(rows)
    rows.extend(R.J)
    hb = HowellBasis(rows, R.p, R.a, d, track=True)
    combo = hb.express(R.decode(R.sub(u, R.one)))
    if combo is None:
        raise NotInCongruenceSubgroup(f"{RingElt(R, u)} - 1 is not in a^2")
    word = []
    done = R.one
    for idx in sorted(combo):
        if idx >= nrows:
            continue  # J rows vanish in R
        r0, s = pairs[idx]
        r = R.mul(R.mul(R.from_int(combo[idx]), r0), R.inv(done))
        if not R.mul(r, s):
            continue
        uk = R.add(R.one, R.mul(r, s))
        word += [(a, b, r), (b, a, s), (a, b, R.neg(R.mul(r, R.inv(uk)))), (b, a, R.neg(R.mul(s, uk)))]
        done = R.mul(done, uk)
    if done != u:
        raise AssertionError("factorisation of the diagonal entry failed")
    return word


def decompose_transvections(M: Mat, ideal: Ideal | None = None) -> TransvectionWord:
    """Write M in SL_n(R), M = I mod a^2, as a product of t_ab^r with r in a.

    ``ideal=None`` means a = R.  Row and column operations reduce M to a
    diagonal matrix, the diagonal is split into d_{i,n-1}^{u_i} factors and
    each of those is rewritten in transvections.
    """
    R, n = M.ring, M.n
    if M.det().code != R.one:
        raise NotUnimodular(f"det = {M.det()}")
    whole = ideal is None or ideal.is_unit_ideal()
    if whole:
        ideal = R.unit_ideal()
    a2 = ideal * ideal
    if not (M - Mat.identity(R, n)).entries_in(a2):
        raise NotInCongruenceSubgroup("M is not congruent to I modulo a^2")
    A = [list(M.codes[i * n:(i + 1) * n]) for i in range(n)]
    left: list[tuple[int, int, int]] = []   # applied on the left, in order
    right: list[tuple[int, int, int]] = []  # applied on the right, in order
    if whole:
        for k in range(n - 1, 0, -1):
            if not R.is_unit(A[k][k]):
                j = next((j for j in range(k) if R.is_unit(A[k][j])), None)
                if j is None:
                    raise AssertionError("no unit in row; leading block is not invertible")
                _right_t(R, A, n, j, k, R.one)
                right.append((j, k, R.one))
            inv = R.inv(A[k][k])
            for i in range(k):
                if A[i][k]:
                    c = R.neg(R.mul(A[i][k], inv))
                    _left_t(R, A, n, i, k, c)
                    left.append((i, k, c))
            for j in range(k):
                if A[k][j]:
                    c = R.neg(R.mul(A[k][j], inv))
                    _right_t(R, A, n, k, j, c)
                    right.append((k, j, c))
    else:
        for j in range(n):
            inv = R.inv(A[j][j])
            for i in range(n):
                if i != j and A[i][j]:
                    c = R.neg(R.mul(A[i][j], inv))
                    _left_t(R, A, n, i, j, c)
                    left.append((i, j, c))
    diag_word: list[tuple[int, int, int]] = []
    gens = [g.code for g in ideal.generators()]
    for i in range(n - 1):
        u = A[i][i]
        if u == R.one:
            continue
        if whole:
            diag_word += _d_word_from_sigma(R, i, n - 1, u)
        else:
            diag_word += _d_word_congruence(R, i, n - 1, u, gens)
    # L_p ... L_1 M R_1 ... R_q = D, so M = L_1^-1 ... L_p^-1 D R_q^-1 ... R_1^-1
    letters = [(i, j, R.neg(c)) for i, j, c in left]
    letters += diag_word
    letters += [(i, j, R.neg(c)) for i, j, c in reversed(right)]
    word = TransvectionWord(R, n, [(i, j, RingElt(R, c)) for i, j, c in letters],
                            None if whole else ideal)
    return word


# --- centralisers and commutators ---------------------------------------

class Centralizes(NamedTuple):
    scalar: RingElt | None
    witness: tuple[int, int] | None


def scalar_if_centralizes(M: Mat) -> Centralizes:
    """Test M against every t_ab^1; return the scalar, or the first pair (a, b) that fails."""
    R, n = M.ring, M.n
    for a in range(n):
        for b in range(n):
            if a != b:
                T = t(R, n, a, b, 1)
                if T * M != M * T:
                    return Centralizes(None, (a, b))
    return Centralizes(M[0, 0], None)


def express_as_commutator(R: RingSpec, n: int, a: int, b: int, r: Scalar,
                          split: tuple[Scalar, Scalar] | None = None,
                          alpha: Scalar | None = None) -> tuple[Mat, Mat]:
    """Matrices P, Q with [P, Q] = t_ab^r.

    For n >= 3 this is [t_ac^x, t_cb^y] with xy = r (``split``, default
    (r, 1)) and c the least free index.  For n = 2 it is [d_ab^alpha, t_ab^s]
    with s = r / (alpha^2 - 1), which needs a unit alpha with alpha^2 != 1
    in the residue field.
    """
    _check_indices(n, a, b)
    rc = _code(R, r)
    if n >= 3:
        c = next(i for i in range(n) if i not in (a, b))
        x, y = (rc, R.one) if split is None else (_code(R, split[0]), _code(R, split[1]))
        if R.mul(x, y) != rc:
            raise ValueError("split factors do not multiply to r")
        return t(R, n, a, c, RingElt(R, x)), t(R, n, c, b, RingElt(R, y))
    if n != 2:
        raise BadIndices("n must be >= 2")
    if R.k_size <= 3:
        raise UnsupportedCase(f"n = 2 over a residue field with {R.k_size} elements: "
                              "no unit alpha with alpha^2 != 1")
    if alpha is None:
        k = R.residue_field
        c0 = next(c for c in k.element_codes() if c and k.mul(c, c) != k.one)
        al = R.lift_residue_code(c0)
    else:
        al = _code(R, alpha)
    den = R.sub(R.mul(al, al), R.one)
    if not R.is_unit(den):
        raise NonUnitParameter("alpha^2 - 1 must be a unit")
    s = R.mul(rc, R.inv(den))
    return d_ab(R, n, a, b, RingElt(R, al)), t(R, n, a, b, RingElt(R, s))


# --- Chebyshev criterion -------------------------------------------------

def chebyshev_poly(j: int) -> list[int]:
    """f_j with f_0 = 0, f_1 = 1, f_{j+1} = x f_j - f_{j-1}; little-endian."""
    if j < 0:
        raise ValueError("j must be >= 0")
    prev, cur = [0], [1]
    if j == 0:
        return prev
    for _ in range(j - 1):
        prev, cur = cur, poly_add(poly_mul([0, 1], cur), [-c for c in prev])
    return trim(cur)


def is_zero_divisor(R: RingSpec, x: int) -> bool:
    """x * y = 0 for some y != 0.  Exhaustive scan for rings up to 10^4 elements."""
    if R.size <= 10**4:
        return any(y and R.mul(x, y) == 0 for y in R.element_codes())
    # in a finite ring the zero divisors are exactly the non-units
    return not R.is_unit(x)


def minus_identity_power_test(M: Mat, n: int) -> tuple[bool, bool]:
    """(M^n == -I, (f_{k+1} - f_k)(tr M) == 0) for odd n = 2k + 1."""
    R = M.ring
    if M.n != 2:
        raise PreconditionViolated("M must be 2 x 2")
    if n < 1 or n % 2 == 0:
        raise PreconditionViolated("n must be odd and positive")
    if M.det().code != R.one:
        raise PreconditionViolated(f"det M = {M.det()} != 1")
    if is_zero_divisor(R, M.code(0, 1)) and is_zero_divisor(R, M.code(1, 0)):
        raise PreconditionViolated("both off-diagonal entries are zero divisors")
    k = n // 2
    poly = poly_add(chebyshev_poly(k + 1), [-c for c in chebyshev_poly(k)])
    power = M ** n == -Mat.identity(R, 2)
    trace = R.eval_poly_code(poly, M.trace().code) == 0
    return power, trace


def chebyshev_scan(R: RingSpec, ns: Sequence[int] = (3, 5, 7)) -> dict:
    """Run both sides of the trace criterion on every valid M in M_2(R).

    Valid means det M = 1 and some off-diagonal entry is not a zero divisor.
    Returns per n the number of valid matrices, how many agree, and the
    first disagreement (serialized) if any.
    """
    elems = R.element_codes()
    zd = {x for x in elems if is_zero_divisor(R, x)}
    valid = []
    for a, b, c, d in itertools.product(elems, repeat=4):
        if b in zd and c in zd:
            continue
        if R.sub(R.mul(a, d), R.mul(b, c)) == R.one:
            valid.append(Mat(R, 2, (a, b, c, d)))
    out = {}
    for n in ns:
        agree, first = 0, None
        for M in valid:
            power, trace = minus_identity_power_test(M, n)
            if power == trace:
                agree += 1
            elif first is None:
                first = {"matrix": M.serialize(), "power": power, "trace": trace}
        out[n] = {"valid": len(valid), "agree": agree, "pass": agree == len(valid),
                  "witness": first}
    return out


# --- relations -----------------------------------------------------------

def random_sl(R: RingSpec, n: int, rng: random.Random) -> Mat:
    """Uniform random element of SL_n(R)."""
    elems = R.element_codes()
    while True:
        codes = [rng.choice(elems) for _ in range(n * n)]
        M = Mat(R, n, codes)
        dt = M.det().code
        if R.is_unit(dt):
            inv = R.inv(dt)
            codes[:n] = [R.mul(inv, c) for c in codes[:n]]
            return Mat(R, n, codes)


RELATION_NAMES = {
    1: "t_ab^r t_ab^s = t_ab^(r+s)",
    2: "[t_ab^r, t_bc^s] = t_ac^(rs)",
    3: "[t_ab^r, t_cd^s] = 1 when {a,c} and {b,d} are disjoint",
    4: "D t_ab^r D^-1 = t_ab^(r la_a / la_b)",
    5: "sigma_ab^u = t_ab^u t_ba^(-1/u) t_ab^u",
    6: "d_ab^u = sigma_ab^u sigma_ab^-1",
    7: "d_ab^u = t_ab^r t_ba^s t_ab^(-r/u) t_ba^(-su) for u = 1 + rs",
}


class _Tables:
    """Addition/multiplication tables of a small ring for batched matrix arithmetic.

    Ring elements are replaced by their position in the canonical element
    list; a batch of N matrices is an int array of shape (N, n, n).
    """

    def __init__(self, R: RingSpec):
        import numpy as np

        self.np = np
        self.R = R
        self.codes = R.element_codes()
        pos = {c: i for i, c in enumerate(self.codes)}
        s = len(self.codes)
        self.add = np.array([[pos[R.add(x, y)] for y in self.codes] for x in self.codes])
        self.mul = np.array([[pos[R.mul(x, y)] for y in self.codes] for x in self.codes])
        self.neg = np.array([pos[R.neg(x)] for x in self.codes])
        self.inv = np.array([pos[R.inv(x)] if R.is_unit(x) else -1 for x in self.codes])
        self.zero, self.one = pos[0], pos[R.one]
        self.units = np.array([i for i, x in enumerate(self.codes) if R.is_unit(x)])
        self.size = s

    def identity(self, N: int, n: int):
        np = self.np
        out = np.full((N, n, n), self.zero)
        out[:, range(n), range(n)] = self.one
        return out

    def t(self, n: int, a: int, b: int, r):
        out = self.identity(len(r), n)
        out[:, a, b] = r
        return out

    def matmul(self, A, B):
        np = self.np
        n = A.shape[1]
        out = np.empty_like(A)
        for i in range(n):
            for j in range(n):
                acc = self.mul[A[:, i, 0], B[:, 0, j]]
                for k in range(1, n):
                    acc = self.add[acc, self.mul[A[:, i, k], B[:, k, j]]]
                out[:, i, j] = acc
        return out

    def chain(self, *mats):
        out = mats[0]
        for M in mats[1:]:
            out = self.matmul(out, M)
        return out


def _verify_batched(R: RingSpec, n: int, samples: int | None, seed: int) -> dict:
    import numpy as np

    T = _Tables(R)
    rng = np.random.default_rng(seed)
    allel = np.arange(T.size)
    units = T.units
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    triples = [(a, b, c) for a, b in pairs for c in range(n) if c not in (a, b)]
    quads = [(a, b, c, d) for a, b in pairs for c, d in pairs if not ({a, c} & {b, d})]
    add, mul, neg, inv = T.add, T.mul, T.neg, T.inv

    def grid(*domains):
        if samples is None:
            mesh = np.meshgrid(*domains, indexing="ij")
            return [m.ravel() for m in mesh]
        return [rng.choice(dom, size=samples) for dom in domains]

    def tr(a, b, r):
        return T.t(n, a, b, r)

    def sigma_b(a, b, u):
        out = T.identity(len(u), n)
        out[:, a, a] = T.zero
        out[:, b, b] = T.zero
        out[:, a, b] = u
        out[:, b, a] = neg[inv[u]]
        return out

    def diag_b(entries):
        N = len(entries[0])
        out = np.full((N, n, n), T.zero)
        for i, e in enumerate(entries):
            out[:, i, i] = e
        return out

    def run(idx_list, domains, build):
        if not idx_list:
            return {"pass": True, "checked": 0, "witness": None}
        checked = 0
        if samples is not None:
            per = [samples // len(idx_list) + (1 if i < samples % len(idx_list) else 0)
                   for i in range(len(idx_list))]
        for k, idx in enumerate(idx_list):
            if samples is None:
                params = grid(*domains)
            else:
                params = [rng.choice(dom, size=per[k]) for dom in domains]
            if len(params[0]) == 0:
                continue
            lhs, rhs, mask = build(idx, *params)
            bad = np.any(lhs != rhs, axis=(1, 2)) & mask
            checked += int(mask.sum())
            if bad.any():
                i = int(np.argmax(bad))
                return {"pass": False, "checked": checked, "witness": {
                    "indices": list(idx),
                    "params": [list(R.decode(T.codes[p[i]])) for p in params]}}
        return {"pass": True, "checked": checked, "witness": None}

    def ones(N):
        return np.ones(N, dtype=bool)

    def rel1(idx, r, s):
        a, b = idx
        return T.matmul(tr(a, b, r), tr(a, b, s)), tr(a, b, add[r, s]), ones(len(r))

    def rel2(idx, r, s):
        a, b, c = idx
        lhs = T.chain(tr(a, b, r), tr(b, c, s), tr(a, b, neg[r]), tr(b, c, neg[s]))
        return lhs, tr(a, c, mul[r, s]), ones(len(r))

    def rel3(idx, r, s):
        a, b, c, d = idx
        lhs = T.chain(tr(a, b, r), tr(c, d, s), tr(a, b, neg[r]), tr(c, d, neg[s]))
        return lhs, T.identity(len(r), n), ones(len(r))

    def rel4(idx, r, la, lb):
        a, b = idx
        N = len(r)
        lam = [rng.choice(units, size=N) for _ in range(n)]
        lam[a], lam[b] = la, lb
        D = diag_b(lam)
        Dinv = diag_b([inv[x] for x in lam])
        lhs = T.chain(D, tr(a, b, r), Dinv)
        return lhs, tr(a, b, mul[mul[la, inv[lb]], r]), ones(N)

    def rel5(idx, u):
        a, b = idx
        rhs = T.chain(tr(a, b, u), tr(b, a, neg[inv[u]]), tr(a, b, u))
        return sigma_b(a, b, u), rhs, ones(len(u))

    def rel6(idx, u):
        a, b = idx
        N = len(u)
        d = [np.full(N, T.one) for _ in range(n)]
        d[a], d[b] = u, inv[u]
        rhs = T.matmul(sigma_b(a, b, u), sigma_b(a, b, np.full(N, neg[T.one])))
        return diag_b(d), rhs, ones(N)

    def rel7(idx, r, s):
        a, b = idx
        N = len(r)
        u = add[T.one, mul[r, s]]
        ok = inv[u] >= 0
        ui = np.where(ok, inv[u], T.one)
        d = [np.full(N, T.one) for _ in range(n)]
        d[a], d[b] = u, ui
        rhs = T.chain(tr(a, b, r), tr(b, a, s), tr(a, b, neg[mul[r, ui]]), tr(b, a, neg[mul[s, u]]))
        return diag_b(d), rhs, ok

    return {
        1: run(pairs, [allel, allel], rel1),
        2: run(triples, [allel, allel], rel2),
        3: run(quads, [allel, allel], rel3),
        4: run(pairs, [allel, units, units], rel4),
        5: run(pairs, [units], rel5),
        6: run(pairs, [units], rel6),
        7: run(pairs, [allel, allel], rel7),
    }


#: rings up to this size are checked through precomputed operation tables
_TABLE_LIMIT = 256


def verify_relations(R: RingSpec, n: int, samples: int | None = None, seed: int = 0) -> dict:
    """Check the seven transvection identities by exact matrix arithmetic.

    With ``samples=None`` the ring parameters are swept exhaustively for
    every admissible index tuple (for relation 4 the diagonal entries away
    from positions a and b are drawn pseudorandomly).  Otherwise ``samples``
    random parameter choices are spread over the index tuples of each
    relation.  Returns ``{relation: {"pass", "checked", "witness"}}``;
    relation 7 counts only parameters with 1 + rs a unit.
    """
    if n < 2:
        raise BadIndices("n must be >= 2")
    if R.size > _TABLE_LIMIT:
        if samples is None:
            raise ValueError(f"exhaustive sweep needs |R| <= {_TABLE_LIMIT}")
        return _verify_generic(R, n, samples, seed)
    return _verify_batched(R, n, samples, seed)


def _verify_generic(R: RingSpec, n: int, samples: int, seed: int) -> dict:
    """Sampled check with Mat arithmetic, for rings too large for tables."""
    rng = random.Random(seed)
    I = Mat.identity(R, n)
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    triples = [(a, b, c) for a, b in pairs for c in range(n) if c not in (a, b)]
    quads = [(a, b, c, d) for a, b in pairs for c, d in pairs if not ({a, c} & {b, d})]
    q = R.q
    neg, inv = R.neg, R.inv

    def rand_elt():
        return R.canon([rng.randrange(q) for _ in range(R.d)])

    def rand_unit():
        while True:
            x = rand_elt()
            if R.is_unit(x):
                return x

    def T(a, b, r):
        return t(R, n, a, b, RingElt(R, r))

    def U(kind, a, b, u):
        return kind(R, n, a, b, RingElt(R, u))

    def run(idx_list, kinds, check):
        checked = 0
        if not idx_list:
            return {"pass": True, "checked": 0, "witness": None}
        for _ in range(samples):
            idx = rng.choice(idx_list)
            par = tuple(rand_unit() if k == "u" else rand_elt() for k in kinds)
            res = check(idx, par)
            if res is None:
                continue
            checked += 1
            if not res:
                return {"pass": False, "checked": checked, "witness": {
                    "indices": list(idx), "params": [list(R.decode(x)) for x in par]}}
        return {"pass": True, "checked": checked, "witness": None}

    def rel4(idx, par):
        (a, b), (r, la, lb) = idx, par
        lam = [rand_unit() for _ in range(n)]
        lam[a], lam[b] = la, lb
        D = Mat.diagonal_codes(R, lam)
        Dinv = Mat.diagonal_codes(R, [inv(x) for x in lam])
        return D * T(a, b, r) * Dinv == T(a, b, R.mul(R.mul(la, inv(lb)), r))

    def rel7(idx, par):
        (a, b), (r, s) = idx, par
        u = R.add(R.one, R.mul(r, s))
        if not R.is_unit(u):
            return None
        rhs = (T(a, b, r) * T(b, a, s) * T(a, b, neg(R.mul(r, inv(u))))
               * T(b, a, neg(R.mul(s, u))))
        return U(d_ab, a, b, u) == rhs

    return {
        1: run(pairs, "ee", lambda i, p: T(*i, p[0]) * T(*i, p[1]) == T(*i, R.add(*p))),
        2: run(triples, "ee", lambda i, p: T(i[0], i[1], p[0]) * T(i[1], i[2], p[1])
               * T(i[0], i[1], neg(p[0])) * T(i[1], i[2], neg(p[1])) == T(i[0], i[2], R.mul(*p))),
        3: run(quads, "ee", lambda i, p: T(i[0], i[1], p[0]) * T(i[2], i[3], p[1])
               * T(i[0], i[1], neg(p[0])) * T(i[2], i[3], neg(p[1])) == I),
        4: run(pairs, "euu", rel4),
        5: run(pairs, "u", lambda i, p: U(sigma, *i, p[0])
               == T(*i, p[0]) * T(i[1], i[0], neg(inv(p[0]))) * T(*i, p[0])),
        6: run(pairs, "u", lambda i, p: U(d_ab, *i, p[0])
               == U(sigma, *i, p[0]) * U(sigma, *i, neg(R.one))),
        7: run(pairs, "ee", rel7),
    }
