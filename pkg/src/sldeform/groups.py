"""Finite matrix groups, presentations and word evaluation."""

from __future__ import annotations

import re
from collections import deque
from typing import Mapping, Sequence

from .errors import (
    CapExceeded,
    NonInvertibleImage,
    NotInvertible,
    PresentationSyntaxError,
    TableMissing,
    UnsupportedPresentation,
)
from .localring import RingSpec, make_ring
from .matrix import Mat

#: multiplication tables are only built up to this order
TABLE_LIMIT = 10**4

Word = tuple  # of (generator index, nonzero exponent) pairs


class FiniteGroup:
    """Closure of a set of invertible matrices.

    Elements are kept in canonical order: the identity first, the rest
    sorted by their serialized entries.  ``words[i]`` is a shortest word in
    the generators (found breadth-first) that evaluates to element i.
    """

    def __init__(self, gens: Sequence[Mat], elements: Sequence[Mat], words: Mapping[Mat, Word]):
        self.gens = list(gens)
        ident = Mat.identity(gens[0].ring, gens[0].n) if gens else None
        rest = sorted((g for g in elements if g != ident), key=Mat.key)
        self.elements = [ident] + rest
        self.index = {g: i for i, g in enumerate(self.elements)}
        self.words = [words[g] for g in self.elements]
        self.gen_positions = [self.index[g] for g in self.gens]
        self._table = None

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order}, gens={len(self.gens)})"

    @property
    def ring(self) -> RingSpec:
        return self.elements[0].ring

    @property
    def n(self) -> int:
        return self.elements[0].n

    def position(self, M: Mat) -> int:
        return self.index[M]

    @property
    def table(self) -> list[list[int]]:
        """table[i][j] = position of elements[i] * elements[j]."""
        if self._table is None:
            if self.order > TABLE_LIMIT:
                raise TableMissing(f"order {self.order} exceeds the table limit {TABLE_LIMIT}")
            els, idx = self.elements, self.index
            self._table = [[idx[x * y] for y in els] for x in els]
        return self._table

    def has_table(self) -> bool:
        return self.order <= TABLE_LIMIT

    def mul(self, i: int, j: int) -> int:
        if self._table is not None:
            return self._table[i][j]
        return self.index[self.elements[i] * self.elements[j]]

    def right_gen_mul(self, i: int, s: int) -> int:
        """Position of elements[i] * gens[s]."""
        cache = self.__dict__.setdefault("_rgm", {})
        key = (i, s)
        if key not in cache:
            cache[key] = self.index[self.elements[i] * self.gens[s]]
        return cache[key]

    def inverse(self, i: int) -> int:
        return self.index[self.elements[i].inverse()]

    def subgroup(self, gens: Sequence[Mat], cap: int | None = None) -> "FiniteGroup":
        return enumerate_group(gens, cap or self.order)


def enumerate_group(gens: Sequence[Mat], cap: int = 10**5) -> FiniteGroup:
    """Breadth-first closure of ``gens`` under right multiplication."""
    if not gens:
        raise ValueError("need at least one generator")
    R, n = gens[0].ring, gens[0].n
    for g in gens:
        if g.ring != R or g.n != n:
            raise ValueError("generators over different rings or sizes")
        if not R.is_unit(g.det().code):
            raise NotInvertible(f"generator {g} is not invertible")
    ident = Mat.identity(R, n)
    words: dict[Mat, Word] = {ident: ()}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        wx = words[x]
        for s, g in enumerate(gens):
            y = x * g
            if y not in words:
                if len(words) >= cap:
                    raise CapExceeded(f"group order exceeds cap {cap}")
                if wx and wx[-1][0] == s:
                    words[y] = wx[:-1] + ((s, wx[-1][1] + 1),)
                else:
                    words[y] = wx + ((s, 1),)
                queue.append(y)
    return FiniteGroup(gens, list(words), words)


# --- presentations -------------------------------------------------------

class Presentation:
    """Generators plus two-sided relators ``(L, R)`` meaning eval(L) == eval(R)."""

    def __init__(self, gens: Sequence[str], relators: Sequence[tuple[Word, Word]]):
        self.gens = list(gens)
        self.relators = [(tuple(l), tuple(r)) for l, r in relators]
        for l, r in self.relators:
            for g, e in l + r:
                if not 0 <= g < len(self.gens):
                    raise PresentationSyntaxError(f"relator uses undeclared generator {g}")
                if e == 0:
                    raise PresentationSyntaxError("zero exponent in word")

    def format_word(self, w: Word) -> str:
        if not w:
            return "1"
        return " ".join(self.gens[g] if e == 1 else f"{self.gens[g]}^{e}" for g, e in w)

    def format_relator(self, rel: tuple[Word, Word]) -> str:
        return f"{self.format_word(rel[0])} = {self.format_word(rel[1])}"

    def __repr__(self) -> str:
        rels = "; ".join(self.format_relator(r) for r in self.relators)
        return f"Presentation(<{', '.join(self.gens)} | {rels}>)"


def _normalize(w: list[tuple[int, int]]) -> Word:
    out: list[tuple[int, int]] = []
    for g, e in w:
        if out and out[-1][0] == g:
            e += out.pop()[1]
        if e:
            out.append((g, e))
    return tuple(out)


def word_inverse(w: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(w))


def word_power(w: Word, k: int) -> Word:
    if k < 0:
        w, k = word_inverse(w), -k
    return _normalize(list(w) * k)


_WTOK = re.compile(r"\s*(?:([A-Za-z_]\w*)|(-?\d+)|([()^]))")


def parse_word(text: str, gens: Sequence[str]) -> Word:
    """Parse ``(a b)^3``, ``a^-1 c``, ``1`` into a word over ``gens``."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _WTOK.match(text, pos)
        if not m or m.end() == pos:
            raise PresentationSyntaxError(f"unexpected input at {pos} in {text!r}")
        tokens.append(m.groups())
        pos = m.end()
    i = 0

    def seq() -> list:
        nonlocal i
        out: list = []
        while i < len(tokens) and tokens[i][2] != ")":
            out += factor()
        return out

    def factor() -> list:
        nonlocal i
        name, num, op = tokens[i]
        i += 1
        if op == "(":
            body = seq()
            if i >= len(tokens) or tokens[i][2] != ")":
                raise PresentationSyntaxError(f"unbalanced parentheses in {text!r}")
            i += 1
        elif name is not None:
            if name not in gens:
                raise PresentationSyntaxError(f"undeclared generator {name!r}")
            body = [(gens.index(name), 1)]
        elif num == "1":
            body = []
        else:
            raise PresentationSyntaxError(f"unexpected token in {text!r}")
        if i < len(tokens) and tokens[i][2] == "^":
            i += 1
            if i >= len(tokens) or tokens[i][1] is None:
                raise PresentationSyntaxError(f"exponent expected in {text!r}")
            k = int(tokens[i][1])
            i += 1
            return list(word_power(_normalize(body), k))
        return body

    w = seq()
    if i != len(tokens):
        raise PresentationSyntaxError(f"trailing input in {text!r}")
    return _normalize(w)


def parse_presentation(text: str) -> Presentation:
    """Parse ``gens: a, b; rel: a^7 = 1; rel: (a b)^3 = b^2``.

    Clauses are separated by ``;`` or newlines.  A chain ``u = v = w``
    contributes the relators u = v and v = w.
    """
    gens: list[str] | None = None
    rels: list[tuple[Word, Word]] = []
    for clause in re.split(r"[;\n]", text):
        clause = clause.strip()
        if not clause:
            continue
        head, _, body = clause.partition(":")
        head = head.strip().lower()
        if head == "gens":
            gens = [g.strip() for g in body.split(",") if g.strip()]
            if len(set(gens)) != len(gens):
                raise PresentationSyntaxError("duplicate generator names")
        elif head in ("rel", "rels", "relation"):
            if gens is None:
                raise PresentationSyntaxError("rel before gens")
            parts = [parse_word(p, gens) for p in body.split("=")]
            if len(parts) < 2:
                raise PresentationSyntaxError(f"relator needs '=' in {clause!r}")
            rels += [(parts[i], parts[i + 1]) for i in range(len(parts) - 1)]
        else:
            raise PresentationSyntaxError(f"unknown clause {clause!r}")
    if gens is None:
        raise PresentationSyntaxError("missing gens clause")
    return Presentation(gens, rels)


def eval_word(w: Word, images: Sequence[Mat], cache: dict | None = None) -> Mat:
    """Multiply out a word; negative exponents use matrix inverses."""
    if not images:
        raise ValueError("no images")
    R, n = images[0].ring, images[0].n
    out = Mat.identity(R, n)
    for g, e in w:
        M = images[g]
        if e < 0:
            key = ("inv", g)
            if cache is not None and key in cache:
                M = cache[key]
            else:
                try:
                    M = M.inverse()
                except NotInvertible as exc:
                    raise NonInvertibleImage(f"image of generator {g} is singular") from exc
                if cache is not None:
                    cache[key] = M
            e = -e
        out = out * (M ** e)
    return out


def check_presentation_hom(P: Presentation, images: Sequence[Mat]
                           ) -> tuple[bool, tuple[Word, Word] | None]:
    """(all relators hold, first failing relator or None)."""
    cache: dict = {}
    for rel in P.relators:
        if eval_word(rel[0], images, cache) != eval_word(rel[1], images, cache):
            return False, rel
    return True, None


# --- builtin groups ------------------------------------------------------

def _field(p: int) -> RingSpec:
    return make_ring(p, 1)


def builtin_presentation(which: str, p: int | None = None) -> tuple[Presentation, list[Mat]]:
    """Presentation and standard generator matrices over F_p.

    ``sunday``: SL_3(F_2) on S = BA, T = A with A = t_01^1 and B the cyclic
    permutation matrix.  ``coxeter`` (p = 3 or 5, also spelled
    ``coxeter3``/``coxeter5``): SL_2(F_p) on A = [[-1,0],[-1,-1]],
    C = [[0,1],[-1,0]].  ``s3``: SL_2(F_2) on tau = [[0,1],[1,1]],
    eps = [[0,1],[1,0]].  ``q8``: the quaternion subgroup of SL_2(F_3) on
    [[1,1],[1,2]] and [[0,1],[2,0]].
    """
    m = re.fullmatch(r"coxeter(\d+)", which)
    if m:
        which, p = "coxeter", int(m.group(1))
    if which == "sunday":
        F = _field(2)
        A = Mat.from_rows(F, [[1, 1, 0], [0, 1, 0], [0, 0, 1]])
        B = Mat.from_rows(F, [[0, 1, 0], [0, 0, 1], [1, 0, 0]])
        P = parse_presentation("gens: S, T; rel: S^7 = 1; rel: T^2 = 1; rel: (S T)^3 = 1;"
                               " rel: (S^4 T)^4 = 1")
        return P, [B * A, A]
    if which == "coxeter":
        if p not in (3, 5):
            raise UnsupportedPresentation(f"coxeter presentation only for p in (3, 5), got {p}")
        F = _field(p)
        A = Mat.from_rows(F, [[-1, 0], [-1, -1]])
        C = Mat.from_rows(F, [[0, 1], [-1, 0]])
        P = parse_presentation(f"gens: A, C; rel: A^{p} = (A^-1 C)^3 = C^2")
        return P, [A, C]
    if which == "s3":
        F = _field(2)
        tau = Mat.from_rows(F, [[0, 1], [1, 1]])
        eps = Mat.from_rows(F, [[0, 1], [1, 0]])
        P = parse_presentation("gens: tau, eps; rel: tau^3 = 1; rel: eps^2 = 1;"
                               " rel: eps tau eps^-1 = tau^2")
        return P, [tau, eps]
    if which == "q8":
        F = _field(3)
        i = Mat.from_rows(F, [[1, 1], [1, 2]])
        j = Mat.from_rows(F, [[0, 1], [2, 0]])
        P = parse_presentation("gens: i, j; rel: i^4 = 1; rel: i^2 = j^2; rel: j i j^-1 = i^-1")
        return P, [i, j]
    raise UnsupportedPresentation(f"unknown presentation {which!r}")


#: named groups: (generator matrices, presentation name or None)
BUILTIN_GROUPS = {
    "sl2f2": "s3",
    "sl2f3": "coxeter3",
    "sl2f5": "coxeter5",
    "sl3f2": "sunday",
    "gl2f3": None,
    "q8": "q8",
}


def builtin_group(name: str) -> tuple[list[Mat], Presentation | None]:
    """Generator matrices of a named group and its presentation (None if unavailable)."""
    if name not in BUILTIN_GROUPS:
        raise UnsupportedPresentation(f"unknown group {name!r}; known: {sorted(BUILTIN_GROUPS)}")
    which = BUILTIN_GROUPS[name]
    if which is None:
        F = _field(3)
        gens = [Mat.from_rows(F, [[1, 1], [0, 1]]), Mat.from_rows(F, [[1, 0], [1, 1]]),
                Mat.from_rows(F, [[2, 0], [0, 1]])]
        return gens, None
    P, gens = builtin_presentation(which)
    return gens, P


def sl_order(n: int, q: int) -> int:
    """|SL_n(F_q)| from the product formula."""
    out = 1
    for i in range(n):
        out *= q**n - q**i
    return out // (q - 1)


def diagonal_torus(R: RingSpec) -> list[Mat]:
    """The group D = {diag(a, a^-1) : a a root of unity of order dividing #k - 1}."""
    from .localring import teichmueller

    k = R.residue_field
    out = []
    for c in k.element_codes():
        if c:
            a = teichmueller(R, k.elt(list(k.decode(c)))).code
            out.append(Mat.diagonal_codes(R, [a, R.inv(a)]))
    return sorted(out, key=Mat.key)
