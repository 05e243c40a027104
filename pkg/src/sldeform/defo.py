"""Deformations of finite matrix representations over finite local rings.

Covers adjoint invariants, the 1-cocycle space and H^1, exhaustive lift
enumeration along a presentation, orbits under strict equivalence
(conjugation by I + M_n(m_S)), the transvection-shape test with extraction
of the inducing ring homomorphism, coprime-order rigidification, twisting
by scalar characters, and the explicit lifts of the small exceptional
groups.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    KernelTooLarge,
    NonScalarRatio,
    NotAHomomorphism,
    OrderNotCoprime,
    PreconditionViolated,
    ResidueMismatch,
    SearchTooLarge,
    TableMissing,
    UnsupportedPresentation,
)
from .groups import (
    FiniteGroup,
    Presentation,
    builtin_presentation,
    enumerate_group,
    eval_word,
)
from .howell import HowellBasis, kernel
from .localring import RingElt, RingHom, RingSpec, hensel_lift, make_ring
from .matrix import Mat, scalar_if_centralizes, t

#: enumeration refuses search spaces larger than this
SEARCH_LIMIT = 10**8
#: classification refuses kernels I + M_n(m_S) larger than this
KERNEL_LIMIT = 10**6


# --- representations on whole groups -----------------------------------

class Rep:
    """A map from the elements of a FiniteGroup to matrices, given on generators."""

    def __init__(self, group: FiniteGroup, gen_images: Sequence[Mat]):
        if len(gen_images) != len(group.gens):
            raise ValueError("one image per generator required")
        self.group = group
        self.gen_images = list(gen_images)
        self._images: list[Mat | None] = [None] * group.order

    @property
    def ring(self) -> RingSpec:
        return self.gen_images[0].ring

    def image(self, i: int) -> Mat:
        M = self._images[i]
        if M is None:
            M = eval_word(self.group.words[i], self.gen_images)
            self._images[i] = M
        return M

    def __call__(self, g: Mat) -> Mat:
        return self.image(self.group.position(g))

    def images(self) -> list[Mat]:
        return [self.image(i) for i in range(self.group.order)]

    def is_homomorphism(self) -> bool:
        G = self.group
        return all(self.image(G.right_gen_mul(i, s)) == self.image(i) * self.gen_images[s]
                   for i in range(G.order) for s in range(len(G.gens)))


# --- linear algebra helpers ----------------------------------------------

def _ad_matrix(g: Mat, ginv: Mat, p: int) -> np.ndarray:
    """Matrix of X -> g X g^-1 on row-major vectors, entries mod p."""
    n = g.n
    G = np.array(g.codes, dtype=np.int64).reshape(n, n)
    Gi = np.array(ginv.codes, dtype=np.int64).reshape(n, n)
    # (g X ginv)_{ij} = sum_{k,l} g_ik X_kl ginv_lj
    return (np.einsum("ik,lj->ijkl", G, Gi).reshape(n * n, n * n)) % p


class InvariantSpace(NamedTuple):
    module: HowellBasis      # Z/p^a-module of invariant matrices, coordinates (entry, coeff)
    basis: list[Mat]         # generators of the module as matrices
    is_scalar: bool          # module == S * I

    @property
    def dim(self) -> int:
        """Dimension over the residue field (meaningful when S is a prime field)."""
        return len(self.module)


def adjoint_invariants(images: Sequence[Mat], n: int | None = None,
                       ring: RingSpec | None = None) -> InvariantSpace:
    """All X in M_n(S) commuting with every matrix in ``images``.

    Solved as a kernel over Z/p^a with the relations of S (the coefficient
    ideal J) appended, so it works over any finite local S.  With no images
    the whole of M_n(S) is returned.
    """
    if images:
        S, n = images[0].ring, images[0].n
    else:
        if ring is None or n is None:
            raise ValueError("ring and n required when there are no images")
        S = ring
    d = S.d
    width = n * n * d
    xpow = [S.one]
    for _ in range(1, d):
        xpow.append(S.mul(xpow[-1], S.x_code))
    imgs = []
    basis_mats = []
    for e in range(n * n):
        for c in range(d):
            codes = [0] * (n * n)
            codes[e] = xpow[c]
            X = Mat(S, n, codes)
            basis_mats.append(X)
            vec: list[int] = []
            for M in images:
                D = M * X - X * M
                for code in D.codes:
                    vec.extend(S.decode(code))
            imgs.append(vec)
    rels = []
    out_len = len(images) * n * n
    for blk in range(out_len):
        for row in S.J:
            v = [0] * (out_len * d)
            v[blk * d:(blk + 1) * d] = row
            rels.append(v)
    if images:
        ker = kernel(imgs, S.p, S.a, rels)
    else:
        ker = HowellBasis([[1 if i == j else 0 for j in range(width)] for i in range(width)],
                          S.p, S.a, width)
    # S * I, with the J relations in every entry, for comparison
    scal_rows = [_vec_of(S, Mat.diagonal_codes(S, [xpow[c]] * n)) for c in range(d)]
    jrows = []
    for e in range(n * n):
        for row in S.J:
            v = [0] * width
            v[e * d:(e + 1) * d] = row
            jrows.append(v)
    scal = HowellBasis(scal_rows + jrows, S.p, S.a, width)
    full = HowellBasis(list(ker.rows) + jrows, S.p, S.a, width)
    mats = []
    for row in ker.rows:
        codes = [S.canon(row[e * d:(e + 1) * d]) for e in range(n * n)]
        if any(codes):
            mats.append(Mat(S, n, codes))
    return InvariantSpace(full, mats, full == scal)


def _vec_of(S: RingSpec, M: Mat) -> list[int]:
    out: list[int] = []
    for c in M.codes:
        out.extend(S.decode(c))
    return out


# --- cohomology ----------------------------------------------------------

class Cocycle:
    """A map G -> M_n(k) given by its values at every group element (in group order)."""

    def __init__(self, group: FiniteGroup, base: Rep, values: Sequence[Sequence[int]]):
        self.group = group
        self.base = base
        self.values = [tuple(v) for v in values]

    def check(self) -> bool:
        """c(gh) = c(g) + g c(h) g^-1 for every pair, and c(1) = 0."""
        G, p = self.group, self.base.ring.p
        n = self.base.gen_images[0].n
        if any(self.values[0]):
            return False
        ads = [_ad_matrix(self.base.image(i), self.base.image(G.inverse(i)), p)
               for i in range(G.order)]
        vals = [np.array(v, dtype=np.int64) for v in self.values]
        table = G.table
        for i in range(G.order):
            for j in range(G.order):
                lhs = vals[table[i][j]]
                rhs = (vals[i] + ads[i] @ vals[j]) % p
                if not np.array_equal(lhs % p, rhs):
                    return False
        return True


class H1Result(NamedTuple):
    z1: int
    b1: int
    h1: int
    ad_invariants: int
    cocycles: list[Cocycle]


def h1_dimension(G: FiniteGroup, images: Sequence[Mat] | None = None) -> H1Result:
    """dim Z^1, dim B^1 and dim H^1 of G acting on M_n(k) by conjugation.

    The representation defaults to the inclusion (``images`` = generators).
    Cocycles are parametrised by their values on the generators and pushed
    through the group by c(g s) = c(g) + Ad(g) c(s); every closing edge of
    the breadth-first search contributes a linear constraint.
    """
    if not G.has_table():
        raise TableMissing(f"order {G.order} exceeds the table limit")
    images = list(images) if images is not None else list(G.gens)
    k = images[0].ring
    if k.a != 1 or k.d != 1:
        raise PreconditionViolated("cocycle solver needs a prime residue field")
    p, n = k.p, images[0].n
    nn = n * n
    ngen = len(G.gens)
    N = ngen * nn
    rho = Rep(G, images)
    inv_images = [M.inverse() for M in images]
    L: list[np.ndarray | None] = [None] * G.order
    L[0] = np.zeros((nn, N), dtype=np.int64)
    blocks = []
    for s in range(ngen):
        B = np.zeros((nn, N), dtype=np.int64)
        B[:, s * nn:(s + 1) * nn] = np.eye(nn, dtype=np.int64)
        blocks.append(B)
    constraints = []
    order = [0]
    seen = {0}
    head = 0
    ads: dict[int, np.ndarray] = {}
    while head < len(order):
        x = order[head]
        head += 1
        gx = rho.image(x)
        ad = ads.get(x)
        if ad is None:
            ad = ads[x] = _ad_matrix(gx, gx.inverse(), p)
        for s in range(ngen):
            y = G.right_gen_mul(x, s)
            val = (L[x] + ad @ blocks[s]) % p
            if y not in seen:
                seen.add(y)
                L[y] = val
                order.append(y)
            else:
                diff = (L[y] - val) % p
                constraints.extend(row.tolist() for row in diff if row.any())
    cons = HowellBasis(constraints, p, 1, N)
    rank = len(cons)
    z1 = N - rank
    # coboundaries: X -> (X - Ad(s) X)_s
    cob_rows = []
    for e in range(nn):
        X = np.zeros(nn, dtype=np.int64)
        X[e] = 1
        row = []
        for s in range(ngen):
            ad = _ad_matrix(images[s], inv_images[s], p)
            row.extend(((X - ad @ X) % p).tolist())
        cob_rows.append(row)
    b1 = len(HowellBasis(cob_rows, p, 1, N))
    inv = adjoint_invariants(images)
    if b1 != nn - inv.dim:
        raise AssertionError(f"dim B^1 = {b1} but n^2 - dim Ad^G = {nn - inv.dim}")
    # cocycle basis from the nullspace of the constraint system
    cols = [[row[j] for row in cons.rows] for j in range(N)] if cons.rows else [[] for _ in range(N)]
    if cons.rows:
        null = kernel(cols, p, 1)
        null_rows = null.rows
    else:
        null_rows = [tuple(1 if i == j else 0 for j in range(N)) for i in range(N)]
    cocycles = []
    for u in null_rows:
        uv = np.array(u, dtype=np.int64)
        vals = [((L[i] @ uv) % p).tolist() for i in range(G.order)]
        cocycles.append(Cocycle(G, rho, vals))
    return H1Result(z1, b1, z1 - b1, inv.dim, cocycles)


# --- lifts ---------------------------------------------------------------

class Lift:
    """Generator images over S reducing to the base images over k."""

    __slots__ = ("S", "base", "images")

    def __init__(self, S: RingSpec, base: Sequence[Mat], images: Sequence[Mat]):
        self.S = S
        self.base = tuple(base)
        self.images = tuple(images)

    def key(self) -> tuple:
        return tuple(M.key() for M in self.images)

    def codes(self) -> tuple:
        return tuple(M.codes for M in self.images)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Lift) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.codes())

    def __repr__(self) -> str:
        return f"Lift({self.S}, {list(self.images)})"

    def conjugate(self, K: Mat, Kinv: Mat | None = None) -> "Lift":
        Kinv = Kinv if Kinv is not None else K.inverse()
        return Lift(self.S, self.base, [K * M * Kinv for M in self.images])

    def reduces_to_base(self) -> bool:
        return all(M.residue() == B for M, B in zip(self.images, self.base))


def _check_residue(base: Sequence[Mat], S: RingSpec) -> None:
    k = base[0].ring
    if S.residue_field != k:
        raise ResidueMismatch(f"{S} has residue field {S.residue_field}, base is over {k}")


def lift_fiber(base: Mat, S: RingSpec) -> list[Mat]:
    """All matrices over S reducing to ``base``, in canonical order."""
    n = base.n
    lifted = [S.lift_residue_code(c) for c in base.codes]
    mel = S.maximal_ideal().element_codes()
    out = [Mat(S, n, [S.add(l, m) for l, m in zip(lifted, ms)])
           for ms in itertools.product(mel, repeat=n * n)]
    out.sort(key=Mat.key)
    return out


def kernel_elements(S: RingSpec, n: int) -> list[Mat]:
    """I + M_n(m_S), in canonical order."""
    I = Mat.identity(S, n)
    return lift_fiber(I.residue(), S)


def _gens_in(w) -> set[int]:
    return {g for g, _ in w}


class _Plan:
    """How each relator is used during the backtracking search.

    Relators are merged into classes of equal words (a chain u = v = w
    also gives u = w).  Any two words in one class that each involve a
    single generator give a filter (same generator) or a hash join
    (different generators); these derived equations are consequences of
    the presentation, and every original relator is still checked.
    """

    def __init__(self, P: Presentation):
        k = len(P.gens)
        self.single: list[list] = [[] for _ in range(k)]   # (word, word) inside one generator
        self.joins: list[list] = [[] for _ in range(k)]    # (earlier gen, its word, this gen's word)
        self.general: list[list] = [[] for _ in range(k)]  # checked once the last generator is set
        parent: dict = {}

        def find(w):
            while parent.setdefault(w, w) != w:
                w = parent[w]
            return w

        for L, R in P.relators:
            parent[find(L)] = find(R)
            used = _gens_in(L) | _gens_in(R)
            self.general[max(used) if used else 0].append((L, R))
        classes: dict = {}
        for w in parent:
            classes.setdefault(find(w), []).append(w)
        seen = set()
        for words in classes.values():
            for u, v in itertools.combinations(words, 2):
                gu, gv = _gens_in(u), _gens_in(v)
                if len(gu) > 1 or len(gv) > 1 or not (gu or gv):
                    continue
                if not gu or not gv or gu == gv:
                    g = next(iter(gu or gv))
                    item = (g, u, v)
                    if item not in seen:
                        seen.add(item)
                        self.single[g].append((u, v))
                    continue
                (i,), (j,) = tuple(gu), tuple(gv)
                item = (min(i, j), max(i, j), u, v)
                if item in seen:
                    continue
                seen.add(item)
                if i < j:
                    self.joins[j].append((i, u, v))
                else:
                    self.joins[i].append((j, v, u))


def _word_value(w, assign, invs: dict, R: RingSpec, n: int) -> Mat:
    out = Mat.identity(R, n)
    for g, e in w:
        M = assign[g]
        if e < 0:
            key = (g, M.codes)
            Mi = invs.get(key)
            if Mi is None:
                Mi = invs[key] = M.inverse()
            M, e = Mi, -e
        out = out * (M ** e)
    return out


def _search(P: Presentation, candidates: list[list[Mat]], first: list[Mat]) -> list[tuple]:
    plan = _Plan(P)
    k = len(candidates)
    R, n = candidates[0][0].ring, candidates[0][0].n
    invs: dict = {}
    # for joins, index candidates of the later generator by the value of its word
    join_index: list[list] = [[] for _ in range(k)]
    for j in range(k):
        for i, wi, wj in plan.joins[j]:
            idx: dict = {}
            one = [None] * k
            for pos, M in enumerate(candidates[j]):
                one[j] = M
                idx.setdefault(_word_value(wj, one, invs, R, n), []).append(pos)
            join_index[j].append((i, wi, idx))
    found = []
    assign: list = [None] * k
    memo: dict = {}
    wgens = {}

    def value(w) -> Mat:
        gs = wgens.get(w)
        if gs is None:
            gs = wgens[w] = sorted(_gens_in(w))
        key = (w, tuple(assign[g].codes for g in gs))
        v = memo.get(key)
        if v is None:
            v = memo[key] = _word_value(w, assign, invs, R, n)
        return v

    def rec(j: int) -> None:
        if j == k:
            found.append(tuple(M.codes for M in assign))
            return
        if j == 0:
            pool = first
        else:
            allowed = None
            for i, wi, idx in join_index[j]:
                bucket = idx.get(value(wi), ())
                allowed = set(bucket) if allowed is None else allowed & set(bucket)
                if not allowed:
                    return
            cands = candidates[j]
            pool = cands if allowed is None else [cands[pos] for pos in sorted(allowed)]
        for M in pool:
            assign[j] = M
            if all(value(L) == value(Rw) for L, Rw in plan.general[j]):
                rec(j + 1)
        assign[j] = None

    rec(0)
    return found


def _search_shard(args) -> list[tuple]:
    P, candidates, lo, hi = args
    return _search(P, candidates, candidates[0][lo:hi])


def enumerate_lifts(P: Presentation, base: Sequence[Mat], S: RingSpec, shards: int = 1,
                    limit: int = SEARCH_LIMIT) -> list[Lift]:
    """Every generator-image tuple over S reducing to ``base`` and satisfying P.

    Each generator ranges over its fiber lift(base) + M_n(m_S), pruned by
    the relators involving that generator alone.  Relators equating a word
    in one generator with a word in another are resolved by hashing, and the
    first generator's fiber is split into ``shards`` contiguous pieces that
    run in worker processes.  The result is sorted canonically, so it does
    not depend on the shard count.
    """
    base = list(base)
    if len(base) != len(P.gens):
        raise ValueError("one base image per generator required")
    _check_residue(base, S)
    n = base[0].n
    fiber_size = S.maximal_ideal().size ** (n * n)
    total = fiber_size ** len(base)
    if total > limit:
        raise SearchTooLarge(f"{len(base)} fibers of size {fiber_size}: {total} candidates > {limit}")
    plan = _Plan(P)
    candidates = []
    for j, B in enumerate(base):
        fib = lift_fiber(B, S)
        rels = plan.single[j]
        if rels:
            one: list = [None] * len(base)
            kept = []
            for M in fib:
                one[j] = M
                if all(_word_value(L, one, {}, S, n) == _word_value(Rw, one, {}, S, n)
                       for L, Rw in rels):
                    kept.append(M)
            fib = kept
        candidates.append(fib)
    m0 = len(candidates[0])
    if shards <= 1 or m0 < 2:
        raw = _search(P, candidates, candidates[0])
    else:
        bounds = [m0 * i // shards for i in range(shards + 1)]
        jobs = [(P, candidates, bounds[i], bounds[i + 1]) for i in range(shards)
                if bounds[i] < bounds[i + 1]]
        with ProcessPoolExecutor(max_workers=len(jobs)) as ex:
            parts = list(ex.map(_search_shard, jobs))
        raw = [x for part in parts for x in part]
    lifts = [Lift(S, base, [Mat(S, n, c) for c in codes]) for codes in raw]
    lifts.sort(key=Lift.key)
    return lifts


class DeformationClass(NamedTuple):
    class_id: int
    representative: Lift
    orbit_size: int


def classify_strict(lifts: Sequence[Lift], S: RingSpec | None = None,
                    limit: int = KERNEL_LIMIT) -> list[DeformationClass]:
    """Orbits of ``lifts`` under simultaneous conjugation by I + M_n(m_S).

    Walks the lifts in canonical order; the first unvisited lift is the
    least member of its orbit and becomes the class representative.
    """
    if not lifts:
        return []
    S = S or lifts[0].S
    n = lifts[0].images[0].n
    ksize = S.maximal_ideal().size ** (n * n)
    if ksize > limit:
        raise KernelTooLarge(f"|I + M_{n}(m_S)| = {ksize} > {limit}")
    Ks = kernel_elements(S, n)
    Kinv = [K.inverse() for K in Ks]
    ordered = sorted(lifts, key=Lift.key)
    known = {L.codes() for L in ordered}
    visited: set = set()
    classes = []
    for L in ordered:
        c = L.codes()
        if c in visited:
            continue
        orbit = {tuple((K * M * Ki).codes for M in L.images) for K, Ki in zip(Ks, Kinv)}
        missing = orbit - known
        if missing:
            raise AssertionError("conjugate of an enumerated lift is missing from the list")
        visited |= orbit
        classes.append(DeformationClass(len(classes), L, len(orbit)))
    return classes


def conjugate_tables_equal(A: Sequence[Mat], B: Sequence[Mat], S: RingSpec, n: int) -> Mat | None:
    """Some K in I + M_n(m_S) with K A_i K^-1 = B_i for all i, or None (exhaustive)."""
    for K in kernel_elements(S, n):
        Ki = K.inverse()
        if all(K * a * Ki == b for a, b in zip(A, B)):
            return K
    return None


# --- generator families and condition (diamond) -------------------------

class GeneratorLift:
    """Images of the transvections t_ab^r (r in R) in GL_n(S).

    ``images`` maps (a, b, r_code) to a matrix over S; ``d_images``
    optionally maps the codes of roots of unity alpha in R to the image of
    diag(alpha, alpha^-1) (needed for n = 2).  Construction checks that each
    image reduces to t_ab^(r mod m) and that the images satisfy the
    transvection relations t^r t^s = t^(r+s), [t_ab^r, t_bc^s] = t_ac^(rs)
    and the commuting relation, which are the only global facts the
    normalisation consumes.
    """

    def __init__(self, R: RingSpec, n: int, S: RingSpec, images: Mapping[tuple[int, int, int], Mat],
                 d_images: Mapping[int, Mat] | None = None, validate: bool = True):
        self.R, self.n, self.S = R, n, S
        self.images = dict(images)
        self.d_images = dict(d_images) if d_images else None
        if validate:
            problem = self.problem()
            if problem:
                raise PreconditionViolated(problem)

    def pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in range(self.n) if a != b]

    def __getitem__(self, key: tuple[int, int, int]) -> Mat:
        return self.images[key]

    def image(self, a: int, b: int, r: int | RingElt) -> Mat:
        rc = r.code if isinstance(r, RingElt) else r
        return self.images[(a, b, rc)]

    def problem(self) -> str | None:
        R, S, n = self.R, self.S, self.n
        if S.residue_field != R.residue_field:
            return "R and S have different residue fields"
        k = R.residue_field
        rs = R.element_codes()
        for a, b in self.pairs():
            for r in rs:
                M = self.images.get((a, b, r))
                if M is None:
                    return f"missing image for t_{a}{b}^{R.elt(list(R.decode(r)))}"
                if M.residue() != t(k, n, a, b, RingElt(k, R.residue_code(r))):
                    return f"image of t_{a}{b}^{RingElt(R, r)} does not reduce to a transvection"
        for a, b in self.pairs():
            for r in rs:
                x = self.images[(a, b, r)]
                for s in rs:
                    if x * self.images[(a, b, s)] != self.images[(a, b, R.add(r, s))]:
                        return f"t_{a}{b}: additivity fails at ({RingElt(R, r)}, {RingElt(R, s)})"
        for a, b in self.pairs():
            for c in range(n):
                if c in (a, b):
                    continue
                for r in rs:
                    x, xi = self.images[(a, b, r)], self.images[(a, b, R.neg(r))]
                    for s in rs:
                        y, yi = self.images[(b, c, s)], self.images[(b, c, R.neg(s))]
                        if x * y * xi * yi != self.images[(a, c, R.mul(r, s))]:
                            return (f"commutator relation fails for t_{a}{b}^{RingElt(R, r)}, "
                                    f"t_{b}{c}^{RingElt(R, s)}")
        for a, b in self.pairs():
            for c, d in self.pairs():
                if {a, c} & {b, d} or (a, b) >= (c, d):
                    continue
                for r in rs:
                    x = self.images[(a, b, r)]
                    for s in rs:
                        y = self.images[(c, d, s)]
                        if x * y != y * x:
                            return f"t_{a}{b}^{RingElt(R, r)} and t_{c}{d}^{RingElt(R, s)} do not commute"
        if self.d_images is not None:
            for al, M in self.d_images.items():
                if M.residue() != Mat(k, 2, [R.residue_code(al), 0, 0, k.inv(R.residue_code(al))]):
                    return f"D-image for {RingElt(R, al)} does not reduce correctly"
        return None

    def conjugate(self, K: Mat, Kinv: Mat | None = None) -> "GeneratorLift":
        Kinv = Kinv if Kinv is not None else K.inverse()
        imgs = {key: K * M * Kinv for key, M in self.images.items()}
        dimg = None
        if self.d_images is not None:
            dimg = {al: K * M * Kinv for al, M in self.d_images.items()}
        return GeneratorLift(self.R, self.n, self.S, imgs, dimg, validate=False)

    def map(self, f: RingHom) -> "GeneratorLift":
        """Compose with a ring map S -> S'."""
        imgs = {key: M.map(f) for key, M in self.images.items()}
        dimg = None
        if self.d_images is not None:
            dimg = {al: M.map(f) for al, M in self.d_images.items()}
        return GeneratorLift(self.R, self.n, f.target, imgs, dimg, validate=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GeneratorLift):
            return NotImplemented
        return (self.R, self.n, self.S) == (other.R, other.n, other.S) and self.images == other.images

    def to_json(self) -> dict:
        R = self.R
        out = {
            "R": R.spec_string(), "n": self.n, "S": self.S.spec_string(),
            "images": [{"a": a, "b": b, "r": list(R.decode(r)), "matrix": M.serialize()}
                       for (a, b, r), M in sorted(self.images.items(),
                                                  key=lambda kv: (kv[0][0], kv[0][1], R.key(kv[0][2])))],
        }
        if self.d_images is not None:
            out["d_images"] = [{"alpha": list(R.decode(al)), "matrix": M.serialize()}
                               for al, M in sorted(self.d_images.items(), key=lambda kv: R.key(kv[0]))]
        return out

    @classmethod
    def from_json(cls, doc: Mapping, validate: bool = True) -> "GeneratorLift":
        from .localring import parse_ring

        R, S, n = parse_ring(doc["R"]), parse_ring(doc["S"]), int(doc["n"])
        imgs = {}
        for item in doc["images"]:
            rc = R.canon(item["r"])
            imgs[(int(item["a"]), int(item["b"]), rc)] = mat_from_json(S, item["matrix"])
        dimg = None
        if doc.get("d_images") is not None:
            dimg = {R.canon(item["alpha"]): mat_from_json(S, item["matrix"]) for item in doc["d_images"]}
        return cls(R, n, S, imgs, dimg, validate=validate)


def mat_from_json(S: RingSpec, rows) -> Mat:
    return Mat.from_rows(S, [[list(x) if isinstance(x, list) else int(x) for x in row] for row in rows])


class DiamondResult(NamedTuple):
    table: dict | None       # (a, b, r_code) -> c_code in S
    witness: dict | None     # first image that is not a transvection


def diamond_check(L: GeneratorLift) -> DiamondResult:
    """Is every image of t_ab^r literally a transvection t_ab^c?"""
    S, n, R = L.S, L.n, L.R
    one = S.one
    table = {}
    for a, b in L.pairs():
        for r in R.element_codes():
            M = L.images[(a, b, r)]
            bad = [(i, j) for i in range(n) for j in range(n)
                   if (i, j) != (a, b) and M.code(i, j) != (one if i == j else 0)]
            if bad:
                return DiamondResult(None, {"a": a, "b": b, "r": list(R.decode(r)),
                                            "positions": bad})
            table[(a, b, r)] = M.code(a, b)
    return DiamondResult(table, None)


class Extraction(NamedTuple):
    hom: RingHom
    conjugator: Mat   # diagonal D with D L D^-1 equal to the induced family


def extract_hom(L: GeneratorLift, table: dict | None = None) -> Extraction:
    """Read off f with L strictly equivalent (by a diagonal matrix) to the family t_ab^f(r).

    First conjugates by d(1, c_01^1, ..., c_0,n-1^1) so that c_0j^1 = 1.
    For n = 2 the images of sigma_r are replayed in both factorisations
    to confirm a c_10^(-1/r) = -1.  Every homomorphism axiom is then
    checked exhaustively over R.
    """
    if table is None:
        table = diamond_check(L).table
        if table is None:
            raise NotAHomomorphism("transvection shape", diamond_check(L).witness)
    R, S, n = L.R, L.S, L.n
    one = R.one
    lam = [S.one] + [table[(0, j, one)] for j in range(1, n)]
    for x in lam:
        if not S.is_unit(x):
            raise NotAHomomorphism("c_0j^1 is a unit", RingElt(S, x))
    lam_inv = [S.inv(x) for x in lam]

    def c(a, b, r):
        # after conjugation by d(lam): c -> lam_a / lam_b * c
        return S.mul(S.mul(lam[a], lam_inv[b]), table[(a, b, r)])

    phi = {r: c(0, 1, r) for r in R.element_codes()}
    if n == 2:
        units = [r for r in R.element_codes() if R.is_unit(r)]
        sig1 = None
        for r in units:
            a_ = phi[r]
            b_ = c(1, 0, R.neg(R.inv(r)))
            ta, tb = t(S, 2, 0, 1, RingElt(S, a_)), t(S, 2, 1, 0, RingElt(S, b_))
            s1 = ta * tb * ta
            s2 = tb * ta * tb
            if s1 != s2:
                raise NotAHomomorphism("sigma_r factorisations agree", list(R.decode(r)))
            if S.mul(a_, b_) != S.neg(S.one):
                raise NotAHomomorphism("phi(r) c_10(-1/r) = -1", list(R.decode(r)))
            if r == one:
                sig1 = s1
            expected = Mat.from_rows(S, [[0, RingElt(S, a_)], [RingElt(S, S.neg(S.inv(a_))), 0]])
            if s1 != expected:
                raise NotAHomomorphism("image of sigma_r", list(R.decode(r)))
        for r in units:
            a_ = phi[r]
            b_ = c(1, 0, R.neg(R.inv(r)))
            ta, tb = t(S, 2, 0, 1, RingElt(S, a_)), t(S, 2, 1, 0, RingElt(S, b_))
            s1 = ta * tb * ta
            if s1 * sig1.inverse() != Mat(S, 2, [a_, 0, 0, S.inv(a_)]):
                raise NotAHomomorphism("image of diag(r, 1/r)", list(R.decode(r)))
    _verify_hom_table(R, S, n, phi, c)
    f = RingHom(R, S, RingElt(S, phi[R.x_code]), check=False)
    problem = f.problem()
    if problem:
        raise NotAHomomorphism("ring map", problem)
    for r, v in phi.items():
        if f.apply_code(r) != v:
            raise NotAHomomorphism("phi agrees with x -> phi(x)", list(R.decode(r)))
    return Extraction(f, Mat.diagonal(S, [RingElt(S, x) for x in lam]))


def _verify_hom_table(R: RingSpec, S: RingSpec, n: int, phi: dict, c: Callable) -> None:
    rs = R.element_codes()
    if phi[R.one] != S.one:
        raise NotAHomomorphism("phi(1) = 1", RingElt(S, phi[R.one]))
    for r in rs:
        if S.residue_code(phi[r]) != R.residue_code(r):
            raise NotAHomomorphism("residue compatibility", list(R.decode(r)))
        for a in range(n):
            for b in range(n):
                if a != b and c(a, b, r) != phi[r]:
                    raise NotAHomomorphism("c_ab^r independent of (a, b)",
                                           {"a": a, "b": b, "r": list(R.decode(r))})
    for r in rs:
        for s in rs:
            if phi[R.add(r, s)] != S.add(phi[r], phi[s]):
                raise NotAHomomorphism("additivity", [list(R.decode(r)), list(R.decode(s))])
            if phi[R.mul(r, s)] != S.mul(phi[r], phi[s]):
                raise NotAHomomorphism("multiplicativity", [list(R.decode(r)), list(R.decode(s))])


# --- rigidification and twisting ----------------------------------------

def rigidify(targets: Sequence[Mat], images: Sequence[Mat]) -> Mat:
    """X = |H|^-1 sum_h target(h) image(h)^-1, so that X image(h) X^-1 = target(h).

    ``targets`` and ``images`` list the same subgroup H in the same order:
    targets are the inclusion, images the lift restricted to H.
    """
    S, n = images[0].ring, images[0].n
    order = len(images)
    h = S.from_int(order)
    if not S.is_unit(h):
        raise OrderNotCoprime(f"|H| = {order} is not invertible in {S}")
    acc = Mat.zero(S, n)
    for T, M in zip(targets, images):
        acc = acc + T * M.inverse()
    X = acc * RingElt(S, S.inv(h))
    I = Mat.identity(S, n)
    if X.residue() != I.residue():
        raise AssertionError("averaged conjugator is not congruent to I")
    Xi = X.inverse()
    for T, M in zip(targets, images):
        if X * M * Xi != T:
            raise AssertionError("rigidified lift differs from the target on H")
    return X


def twist_decompose(rho: Rep, rho_f: Rep, normal: Iterable[int]) -> dict[int, RingElt]:
    """lambda(g) with rho(g) = lambda(g) rho_f(g), for rho = rho_f on the normal subgroup.

    Raises NonScalarRatio when some rho_f(g)^-1 rho(g) is not scalar.
    """
    G = rho.group
    N = sorted(set(normal))
    S = rho.ring
    for i in N:
        if rho.image(i) != rho_f.image(i):
            raise PreconditionViolated(f"rho and rho_f differ on the normal subgroup at {i}")
    inv = adjoint_invariants([rho_f.image(i).residue() for i in N])
    if not inv.is_scalar:
        raise PreconditionViolated("Ad^N is larger than the scalars")
    lam: dict[int, RingElt] = {}
    for i in range(G.order):
        ratio = rho_f.image(i).inverse() * rho.image(i)
        sc = scalar_if_centralizes(ratio)
        if sc.scalar is None or ratio != Mat.identity(S, ratio.n) * sc.scalar:
            raise NonScalarRatio(f"rho_f(g)^-1 rho(g) is not scalar for element {i}: {ratio}")
        if S.residue_code(sc.scalar.code) != S.residue_code(S.one):
            raise NonScalarRatio(f"lambda({i}) is not congruent to 1")
        lam[i] = sc.scalar
    for i in N:
        if lam[i].code != S.one:
            raise AssertionError("lambda is not trivial on N")
    for i in range(G.order):
        for s, gp in enumerate(G.gen_positions):
            j = G.right_gen_mul(i, s)
            if lam[j] != lam[i] * lam[gp]:
                raise NonScalarRatio("lambda is not multiplicative")
    return lam


# --- exceptional lifts ---------------------------------------------------

class ExceptionalLift(NamedTuple):
    which: str
    ring: RingSpec
    presentation: Presentation
    base: list[Mat]
    images: list[Mat]


EXCEPTIONAL = ("sl3f2", "sl2f2", "sl2f3", "sl2f5")


def exceptional_lift(which: str, precision: int) -> ExceptionalLift:
    """The explicit lifts of SL_3(F_2), SL_2(F_2), SL_2(F_3), SL_2(F_5) at finite precision.

    sl3f2 lives in Z/2^K with omega the root of x^2 + x + 2 congruent to 1
    mod 2; sl2f2 in Z/2^K; sl2f3 in Z/3^K with t^2 = -2, t = 2 mod 3;
    sl2f5 in Z/5^K[x]/(x^2 - 5) with x the square root of 5, phi = (1 + x)/2
    and i^2 = -1, i = 2 mod the maximal ideal.
    """
    if precision < 2:
        raise ValueError("precision must be >= 2")
    K = precision
    if which == "sl3f2":
        S = make_ring(2, K)
        w = hensel_lift([2, 1, 1], S(1))
        A = Mat.from_rows(S, [[1, w, -1 - w], [0, -1, 0], [0, 0, -1]])
        B = Mat.from_rows(S, [[0, 1, 0], [0, 0, 1], [1, 0, 0]])
        P, base = builtin_presentation("sunday")
        return ExceptionalLift(which, S, P, base, [B * A, A])
    if which == "sl2f2":
        S = make_ring(2, K)
        P, base = builtin_presentation("s3")
        return ExceptionalLift(which, S, P, base, [Mat.from_rows(S, [[0, 1], [-1, -1]]),
                                                   Mat.from_rows(S, [[0, 1], [1, 0]])])
    if which == "sl2f3":
        S = make_ring(3, K)
        tt = hensel_lift([2, 0, 1], S(2))
        half = S(2).inverse()
        A = Mat.from_rows(S, [[1, tt + 1], [tt - 1, 1]]) * half
        P, base = builtin_presentation("coxeter", 3)
        return ExceptionalLift(which, S, P, base, [A, Mat.from_rows(S, [[0, 1], [-1, 0]])])
    if which == "sl2f5":
        S = make_ring(5, K, [-5, 0, 1])
        i = hensel_lift([1, 0, 1], S(2))
        half = S(2).inverse()
        phi = (S.x + 1) * half
        A = Mat.from_rows(S, [[phi, i * (phi - 1) + 1], [i * (phi - 1) - 1, phi]]) * half
        P, base = builtin_presentation("coxeter", 5)
        return ExceptionalLift(which, S, P, base, [A, Mat.from_rows(S, [[0, 1], [-1, 0]])])
    raise UnsupportedPresentation(f"unknown exceptional lift {which!r}; choose from {EXCEPTIONAL}")


def verify_exceptional_lift(which: str, precision: int) -> dict:
    """Check relators, reduction to the base and determinants of an exceptional lift."""
    E = exceptional_lift(which, precision)
    P = E.presentation
    cache: dict = {}
    relators = []
    for rel in P.relators:
        ok = eval_word(rel[0], E.images, cache) == eval_word(rel[1], E.images, cache)
        relators.append({"relator": P.format_relator(rel), "pass": ok})
    reduction = [M.residue() == B for M, B in zip(E.images, E.base)]
    dets = [M.det().code == E.ring.one for M in E.images]
    return {
        "which": which,
        "precision": precision,
        "ring": E.ring.spec_string(),
        "relators": relators,
        "reduction": all(reduction),
        "det_one": all(dets),
        "pass": all(r["pass"] for r in relators) and all(reduction),
    }


def exceptional_rep(which: str, precision: int) -> Rep:
    """The exceptional lift as a map on the whole (enumerated) base group."""
    E = exceptional_lift(which, precision)
    G = enumerate_group(E.base)
    return Rep(G, E.images)


def enumerate_lifts_by_closure(base: Sequence[Mat], S: RingSpec) -> list[Lift]:
    """Lifts of the group generated by ``base``, found without a presentation.

    A tuple of fiber elements is a lift exactly when the group it generates
    has the same order as the base group (reduction is then an isomorphism).
    Slow, but independent of relators; used as a cross-check.
    """
    from .errors import CapExceeded

    base = list(base)
    _check_residue(base, S)
    order = enumerate_group(base).order
    fibers = [lift_fiber(B, S) for B in base]
    total = 1
    for f in fibers:
        total *= len(f)
    if total > SEARCH_LIMIT:
        raise SearchTooLarge(f"{total} candidates")
    out = []
    for imgs in itertools.product(*fibers):
        try:
            if enumerate_group(list(imgs), cap=order).order == order:
                out.append(Lift(S, base, imgs))
        except CapExceeded:
            pass
    out.sort(key=Lift.key)
    return out
