"""Howell normal forms of submodules of (Z/p^a)^w.

Z/p^a is a chain ring, so every nonzero entry is a unit times a power of p.
The Howell form is the echelon form with p-power pivots, entries above each
pivot reduced modulo that pivot, and the extra property that the rows with
pivot column >= c span every element of the module whose first c
coordinates vanish.  That property makes reduction to a canonical residue,
membership, and kernels all fall out of a single elimination.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence


def valuation(x: int, p: int, a: int) -> int:
    """p-adic valuation of ``x`` in Z/p^a (``a`` for zero)."""
    x %= p**a
    if x == 0:
        return a
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


class HowellBasis:
    """Canonical basis of the Z/p^a-span of ``rows``.

    With ``track=True`` every basis row remembers its expression as a
    combination of the input rows, which :meth:`express` uses to write
    members of the span in terms of the generators.
    """

    def __init__(self, rows: Iterable[Sequence[int]], p: int, a: int, width: int,
                 track: bool = False):
        self.p, self.a, self.width = p, a, width
        q = p**a
        self.q = q
        work = []
        for i, r in enumerate(rows):
            if len(r) != width:
                raise ValueError(f"row of length {len(r)}, expected {width}")
            vec = [x % q for x in r]
            combo = None
            if track:
                combo = {i: 1}
            if any(vec):
                work.append((vec, combo))
        basis: list[tuple[list[int], dict | None]] = []
        pivots: list[tuple[int, int]] = []
        for c in range(width):
            best = None
            for idx, (vec, _) in enumerate(work):
                if vec[c]:
                    v = valuation(vec[c], p, a)
                    if best is None or v < best[1]:
                        best = (idx, v)
                        if v == 0:
                            break
            if best is None:
                continue
            idx, v = best
            vec, combo = work.pop(idx)
            # scale the pivot entry to exactly p^v
            unit = vec[c] // p**v
            uinv = pow(unit, -1, q)
            vec = [x * uinv % q for x in vec]
            if track:
                combo = {k: cv * uinv % q for k, cv in combo.items()}
            pv = p**v
            rest = []
            for ovec, ocombo in work:
                if ovec[c]:
                    f = ovec[c] // pv
                    ovec = [(x - f * y) % q for x, y in zip(ovec, vec)]
                    if track:
                        ocombo = _combo_axpy(ocombo, -f, combo, q)
                if any(ovec):
                    rest.append((ovec, ocombo))
            if v > 0:
                f = p ** (a - v)
                aug = [x * f % q for x in vec]
                if any(aug):
                    rest.append((aug, _combo_scale(combo, f, q) if track else None))
            work = rest
            basis.append((vec, combo))
            pivots.append((c, v))
        # reduce entries above pivots
        for i, (c, v) in enumerate(pivots):
            pv = p**v
            row, combo = basis[i]
            for j in range(i):
                other, ocombo = basis[j]
                f = other[c] // pv
                if f:
                    other = [(x - f * y) % q for x, y in zip(other, row)]
                    if track:
                        ocombo = _combo_axpy(ocombo, -f, combo, q)
                    basis[j] = (other, ocombo)
        self.rows = [tuple(r) for r, _ in basis]
        self.pivots = pivots
        self._combos = [cm for _, cm in basis] if track else None

    def __len__(self) -> int:
        return len(self.rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HowellBasis):
            return NotImplemented
        return (self.p, self.a, self.width, self.rows) == (other.p, other.a, other.width, other.rows)

    def __hash__(self) -> int:
        return hash((self.p, self.a, self.width, tuple(self.rows)))

    def __repr__(self) -> str:
        return f"HowellBasis(p={self.p}, a={self.a}, rows={self.rows})"

    def size(self) -> int:
        """Number of elements of the module."""
        n = 1
        for _, v in self.pivots:
            n *= self.p ** (self.a - v)
        return n

    def reduce(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Canonical representative of ``vec`` modulo the module."""
        q = self.q
        x = [v % q for v in vec]
        for (c, v), row in zip(self.pivots, self.rows):
            f = x[c] // self.p**v
            if f:
                x = [(xi - f * ri) % q for xi, ri in zip(x, row)]
        return tuple(x)

    def contains(self, vec: Sequence[int]) -> bool:
        return not any(self.reduce(vec))

    def express(self, vec: Sequence[int]) -> dict[int, int] | None:
        """Coefficients ``c`` with ``sum c[i] * gens[i] == vec``, or None."""
        if self._combos is None:
            raise ValueError("basis was built without tracking")
        q = self.q
        x = [v % q for v in vec]
        acc: dict[int, int] = {}
        for (c, v), row, combo in zip(self.pivots, self.rows, self._combos):
            f = x[c] // self.p**v
            if f:
                x = [(xi - f * ri) % q for xi, ri in zip(x, row)]
                acc = _combo_axpy(acc, f, combo, q)
        if any(x):
            return None
        return acc

    def elements(self) -> Iterator[tuple[int, ...]]:
        """Every element of the module, each exactly once."""
        q, p, a = self.q, self.p, self.a
        ranges = [range(p ** (a - v)) for _, v in self.pivots]

        def rec(i: int, acc: list[int]) -> Iterator[tuple[int, ...]]:
            if i == len(self.rows):
                yield tuple(acc)
                return
            row = self.rows[i]
            for c in ranges[i]:
                yield from rec(i + 1, [(x + c * y) % q for x, y in zip(acc, row)])

        yield from rec(0, [0] * self.width)


def _combo_axpy(acc: dict, f: int, combo: dict, q: int) -> dict:
    out = dict(acc)
    for k, v in combo.items():
        out[k] = (out.get(k, 0) + f * v) % q
        if not out[k]:
            del out[k]
    return out


def _combo_scale(combo: dict, f: int, q: int) -> dict:
    return {k: v * f % q for k, v in combo.items() if v * f % q}


def kernel(images: Sequence[Sequence[int]], p: int, a: int,
           relations: Sequence[Sequence[int]] = ()) -> HowellBasis:
    """Howell basis of ``{x : sum x[i] * images[i] lies in span(relations)}``.

    ``images[i]`` is the image of the i-th unit vector under a Z/p^a-linear
    map into (Z/p^a)^k; ``relations`` generate the submodule of the target
    that counts as zero.
    """
    m = len(images)
    k = len(images[0]) if images else (len(relations[0]) if relations else 0)
    rows = []
    for i, img in enumerate(images):
        rows.append(list(img) + [1 if j == i else 0 for j in range(m)])
    for rel in relations:
        rows.append(list(rel) + [0] * m)
    hb = HowellBasis(rows, p, a, k + m)
    ker = [row[k:] for (c, _), row in zip(hb.pivots, hb.rows) if c >= k]
    return HowellBasis(ker, p, a, m)


def rank_mod_p(rows: Iterable[Sequence[int]], p: int, width: int) -> int:
    """Rank of a matrix over the prime field F_p."""
    return len(HowellBasis(rows, p, 1, width))
