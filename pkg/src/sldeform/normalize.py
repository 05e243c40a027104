"""Bring a lift of the natural representation of SL_n(R) into induced form.

Input is a GeneratorLift: the images of every transvection t_ab^r in
GL_n(S), reducing to t_ab^(r mod m) over the residue field.  Output is a
conjugator in I + M_n(m_S) and the ring map f: R -> S such that the
conjugated images are exactly t_ab^f(r).

For n >= 3 this goes level by level through S/m^(l+1): the defects
M_ab^r = image - t_ab^(p_r) live in M_n(m^l), where m^l squares to zero,
and their shape pins down a correction X with entries in m^l.  For n = 2
the diagonal torus is first made to act by itself (coprime averaging), and
the images of t_01^r and t_10^r are then forced to be transvections.
"""

from __future__ import annotations

import random
from typing import NamedTuple

from .defo import (
    DiamondResult,
    GeneratorLift,
    diamond_check,
    exceptional_rep,
    extract_hom,
    kernel_elements,
    rigidify,
)
from .errors import (
    ClaimViolated,
    NotAHomomorphism,
    NotCongruentToInduced,
    PreconditionViolated,
    UnsupportedCase,
)
from .groups import diagonal_torus
from .localring import (
    RingElt,
    RingHom,
    RingSpec,
    find_homs,
    least_preimage,
    make_ring,
    quotient_by_m_power,
    teichmueller,
)
from .matrix import Mat, t

__all__ = [
    "GeneratorLift",
    "DefectTable",
    "Normalization",
    "induced_lift",
    "random_conjugate",
    "defect_table",
    "solve_conjugator",
    "normalize_lift",
    "excluded_case",
    "sl3f2_witness",
]


def _torus_pairs(R: RingSpec, S: RingSpec) -> list[tuple[int, Mat]]:
    """(alpha code in R, diag(alpha, alpha^-1) over S) for the roots of unity alpha of R."""
    out = []
    k = R.residue_field
    for c in k.element_codes():
        if c:
            al = teichmueller(R, RingElt(k, c)).code
            aS = teichmueller(S, RingElt(S.residue_field, c)).code
            out.append((al, Mat(S, 2, [aS, 0, 0, S.inv(aS)])))
    return out


def induced_lift(f: RingHom, n: int) -> GeneratorLift:
    """The family t_ab^f(r); for n = 2 also the torus images diag(f(alpha), f(alpha)^-1)."""
    R, S = f.source, f.target
    imgs = {}
    for r in R.element_codes():
        fr = f.apply_code(r)
        for a in range(n):
            for b in range(n):
                if a != b:
                    imgs[(a, b, r)] = t(S, n, a, b, RingElt(S, fr))
    dimg = None
    if n == 2:
        dimg = {}
        for al, _ in _torus_pairs(R, S):
            fa = f.apply_code(al)
            dimg[al] = Mat(S, 2, [fa, 0, 0, S.inv(fa)])
    return GeneratorLift(R, n, S, imgs, dimg, validate=False)


def random_conjugate(L: GeneratorLift, rng: random.Random) -> tuple[GeneratorLift, Mat]:
    """Conjugate by a pseudorandom K in I + M_n(m_S); returns (K L K^-1, K)."""
    S, n = L.S, L.n
    mel = S.maximal_ideal().element_codes()
    codes = [S.add(S.one if i == j else 0, rng.choice(mel)) for i in range(n) for j in range(n)]
    K = Mat(S, n, codes)
    return L.conjugate(K), K


def excluded_case(n: int, k: RingSpec) -> bool:
    """(n, k) for which the natural lift is not universal."""
    q = k.size
    return (n == 3 and q == 2) or (n == 2 and q in (2, 3, 5))


# --- one level of the n >= 3 induction ----------------------------------

class DefectTable(NamedTuple):
    level: int
    ring: RingSpec            # S / m^(level+1)
    proj: RingHom             # S -> ring
    p: dict                   # r_code -> chosen preimage p_r (code in ring)
    M: dict                   # (a, b, r_code) -> defect matrix over ring
    n: int
    R: RingSpec


def _level_ring(S: RingSpec, l: int) -> tuple[RingSpec, RingHom]:
    if l >= S.nilpotency_index:
        return S, RingHom(S, S, S.x, check=False)
    return quotient_by_m_power(S, l)


def defect_table(L: GeneratorLift, g: RingHom, l: int) -> DefectTable:
    """Defects M_ab^r = image - t_ab^(p_r) in S/m^(l+1), given L = induced(g) mod m^l.

    p_r is the least element of S reducing to g(r), except p_1 = 1.
    """
    S, R, n = L.S, L.R, L.n
    _, pi_l = _level_ring(S, l)
    Q, pi = _level_ring(S, l + 1)
    if g.target != pi_l.target:
        raise PreconditionViolated(f"g must map into {pi_l.target}, not {g.target}")
    p = {}
    for r in R.element_codes():
        pre = S.one if r == R.one else least_preimage(pi_l, g.apply_code(r))
        p[r] = pi.apply_code(pre)
    ideal = Q.maximal_ideal_power(l)
    M = {}
    for (a, b, r), img in L.images.items():
        D = img.map(pi) - t(Q, n, a, b, RingElt(Q, p[r]))
        for i in range(n):
            for j in range(n):
                if not ideal.contains(D.code(i, j)):
                    raise NotCongruentToInduced(
                        f"image of t_{a}{b}^{RingElt(R, r)} differs from the induced lift "
                        f"outside m^{l} at entry ({i}, {j})")
        M[(a, b, r)] = D
    return DefectTable(l, Q, pi, p, M, n, R)


def _quads(n: int):
    """(a, b, c, d) with a != b, c != d and {a, c} disjoint from {b, d}."""
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            for c in range(n):
                for d in range(n):
                    if c != d and not ({a, c} & {b, d}):
                        yield a, b, c, d


def solve_conjugator(T: DefectTable, strategy: str | None = None) -> Mat:
    """X over S/m^(l+1), entries in m^l, with M_ab^r = p_r (e_ab X - X e_ab) + d e_ab.

    Every structural constraint on the defects is checked first, in
    logical order, and the first failure raises ClaimViolated(claim,
    witness):
      1 commuting transvections give p_s [M_ab^r, e_cd] = p_r [M_cd^s, e_ab]
      2 M_ab^r(i, j) = 0 off the diagonal unless i = a or j = b
      3 det = 1, hence tr M_ab^r = 0
      4 M_ab^r(i, i) = 0 for i outside {a, b}
      5 M_ab^r(a, a) = -M_ab^r(b, b)
      6 p_s M_ab^r(a, c) = -p_r M_cd^s(b, d) and p_s M_ab^r(d, b) = -p_r M_cd^s(c, a)
      7 X(b, a) := M_xb^1(x, a) is independent of x, and reproduces every defect
    """
    Q, n, R, p, M = T.ring, T.n, T.R, T.p, T.M
    k = R.residue_field
    if strategy is None:
        strategy = "n4" if n >= 4 else "n3"
    if strategy == "n4" and n < 4:
        raise UnsupportedCase("strategy n4 needs n >= 4")
    if strategy == "n3":
        if n != 3:
            raise UnsupportedCase("strategy n3 needs n = 3")
        if k.size == 2:
            raise UnsupportedCase("n = 3 over F_2 is excluded")
    rs = R.element_codes()
    one = R.one
    E = {(a, b): Mat.unit_matrix(Q, n, a, b) for a in range(n) for b in range(n)}

    def w(r, a, b):
        return {"r": list(R.decode(r)), "a": a, "b": b}

    # claim 1
    for a, b, c, d in _quads(n):
        for r in rs:
            Mab = M[(a, b, r)]
            for s in rs:
                Mcd = M[(c, d, s)]
                lhs = (Mab * E[(c, d)] - E[(c, d)] * Mab) * RingElt(Q, p[s])
                rhs = (Mcd * E[(a, b)] - E[(a, b)] * Mcd) * RingElt(Q, p[r])
                if lhs != rhs:
                    raise ClaimViolated(1, {"ab": (a, b), "cd": (c, d), "r": list(R.decode(r)),
                                            "s": list(R.decode(s))})
    for (a, b, r), D in M.items():
        for i in range(n):
            for j in range(n):
                if i != a and j != b and i != j and D.code(i, j):
                    raise ClaimViolated(2, {**w(r, a, b), "entry": (i, j)})
    for (a, b, r), D in M.items():
        img = t(Q, n, a, b, RingElt(Q, p[r])) + D
        if img.det().code != Q.one or D.trace().code != 0:
            raise ClaimViolated(3, w(r, a, b))
    for (a, b, r), D in M.items():
        for i in range(n):
            if i not in (a, b) and D.code(i, i):
                raise ClaimViolated(4, {**w(r, a, b), "entry": (i, i)})
    for (a, b, r), D in M.items():
        if D.code(a, a) != Q.neg(D.code(b, b)):
            raise ClaimViolated(5, w(r, a, b))
    for a, b, c, d in _quads(n):
        if (a, b) == (c, d):
            continue
        for r in rs:
            Mab = M[(a, b, r)]
            for s in rs:
                Mcd = M[(c, d, s)]
                ps, pr = p[s], p[r]
                if (Q.mul(ps, Mab.code(a, c)) != Q.neg(Q.mul(pr, Mcd.code(b, d)))
                        or Q.mul(ps, Mab.code(d, b)) != Q.neg(Q.mul(pr, Mcd.code(c, a)))):
                    raise ClaimViolated(6, {"ab": (a, b), "cd": (c, d), "r": list(R.decode(r)),
                                            "s": list(R.decode(s))})
    X = [0] * (n * n)
    for b in range(n):
        for a in range(n):
            if a == b:
                continue
            xs = [x for x in range(n) if x != b]
            vals = {M[(x, b, one)].code(x, a) for x in xs}
            if len(vals) != 1:
                raise ClaimViolated(7, {"entry": (b, a), "values": sorted(vals)})
            X[b * n + a] = vals.pop()
    Xm = Mat(Q, n, X)
    for (a, b, r), D in M.items():
        pred = (E[(a, b)] * Xm - Xm * E[(a, b)]) * RingElt(Q, p[r])
        rest = D - pred
        if any(rest.code(i, j) for i in range(n) for j in range(n) if (i, j) != (a, b)):
            raise ClaimViolated(7, {**w(r, a, b), "residual": rest.serialize()})
    return Xm


# --- driver ----------------------------------------------------------------

class Normalization(NamedTuple):
    chain: list[Mat]          # conjugators over S, applied first to last
    conjugator: Mat           # their product K, with K L K^-1 = induced_lift(hom)
    table: dict               # (a, b, r_code) -> c_code, the transvection parameters
    hom: RingHom


def _lift_matrix(pi: RingHom, X: Mat, S: RingSpec) -> Mat:
    if pi.source == pi.target and X.ring == S:
        return X
    return Mat(S, X.n, [least_preimage(pi, c) for c in X.codes])


def _residue_hom(R: RingSpec, S: RingSpec) -> RingHom:
    Q, pi = _level_ring(S, 1)
    xr = R.residue_code(R.x_code)
    return RingHom(R, Q, pi.apply_code(S.lift_residue_code(xr)))


def normalize_lift(L: GeneratorLift, strategy: str | None = None) -> Normalization:
    """Conjugate L into the form t_ab^f(r) and recover f.

    Raises UnsupportedCase for (n, k) in {(3, F_2), (2, F_2), (2, F_3),
    (2, F_5)}, where no such normalisation exists in general.
    """
    R, S, n = L.R, L.S, L.n
    k = R.residue_field
    if n < 2:
        raise UnsupportedCase("n must be at least 2")
    if excluded_case(n, k):
        raise UnsupportedCase(f"(n, k) = ({n}, F_{k.size}) admits lifts that are not induced")
    chain: list[Mat] = []
    cur = L
    if n >= 3:
        N = S.nilpotency_index
        g = _residue_hom(R, S)
        for l in range(1, N):
            T = defect_table(cur, g, l)
            X = solve_conjugator(T, strategy)
            Xs = _lift_matrix(T.proj, X, S)
            K = Mat.identity(S, n) + Xs
            cur = cur.conjugate(K)
            chain.append(K)
            Q, pi = T.ring, T.proj
            if Q is S:
                break
            lowered = cur.map(pi)
            dres = diamond_check(lowered)
            if dres.table is None:
                raise ClaimViolated(7, {"level": l, **dres.witness})
            ext = extract_hom(lowered, dres.table)
            Dl = Mat.diagonal(S, [RingElt(S, least_preimage(pi, ext.conjugator.code(i, i)))
                                  for i in range(n)])
            cur = cur.conjugate(Dl)
            chain.append(Dl)
            g = ext.hom
    else:
        cur = _rigidify_torus(cur, chain)
        _force_triangular(cur)
    dres = diamond_check(cur)
    if dres.table is None:
        raise NotAHomomorphism("transvection shape after normalisation", dres.witness)
    ext = extract_hom(cur, dres.table)
    cur = cur.conjugate(ext.conjugator)
    chain.append(ext.conjugator)
    K = Mat.identity(S, n)
    for C in chain:
        K = C * K
    target = induced_lift(ext.hom, n)
    Ki = K.inverse()
    for key, img in L.images.items():
        if K * img * Ki != target.images[key]:
            raise AssertionError(f"conjugator chain does not reproduce the induced lift at {key}")
    final = diamond_check(cur).table
    return Normalization(chain, K, final, ext.hom)


def _rigidify_torus(L: GeneratorLift, chain: list[Mat]) -> GeneratorLift:
    R, S = L.R, L.S
    if L.d_images is None:
        raise PreconditionViolated("n = 2 normalisation needs the images of the diagonal torus")
    pairs = _torus_pairs(R, S)
    targets = [T for _, T in pairs]
    images = [L.d_images[al] for al, _ in pairs]
    X = rigidify(targets, images)
    out = L.conjugate(X)
    chain.append(X)
    for al, T in pairs:
        if out.d_images[al] != T:
            raise AssertionError("torus image not fixed after averaging")
    return out


def _force_triangular(L: GeneratorLift) -> None:
    """Literal entry checks: with rho(delta) = delta, each rho(t_01^r) is upper unitriangular.

    delta = diag(alpha, alpha^-1) with alpha^4 != 1; then rho(t^(alpha^2 r))
    = delta rho(t^r) delta^-1 and the commutation of the two forces the
    lower-left entry to vanish, while rho(t^r) = [delta, rho(t^s)] with
    s = r / (alpha^2 - 1) forces unit diagonal.  Same for t_10 with the
    roles of the entries swapped.
    """
    R, S = L.R, L.S
    pairs = _torus_pairs(R, S)
    choice = None
    for al, T in pairs:
        if R.residue_code(R.power(al, 4)) != R.residue_code(R.one):
            choice = (al, T)
            break
    if choice is None:
        raise UnsupportedCase("no root of unity with alpha^4 != 1")
    al, delta = choice
    dinv = delta.inverse()
    a2 = R.mul(al, al)
    a2m1_inv = R.inv(R.sub(a2, R.one))
    for (a, b) in ((0, 1), (1, 0)):
        # delta t_ab^r delta^-1 = t_ab^(alpha^2 r) for (0, 1), alpha^-2 r for (1, 0)
        scale = a2 if (a, b) == (0, 1) else R.inv(a2)
        low = (1, 0) if (a, b) == (0, 1) else (0, 1)
        for r in R.unit_codes():
            M = L.images[(a, b, r)]
            Mc = L.images[(a, b, R.mul(scale, r))]
            if delta * M * dinv != Mc:
                raise NotAHomomorphism("conjugation by delta", {"a": a, "b": b, "r": list(R.decode(r))})
            if M * Mc != Mc * M:
                raise NotAHomomorphism("commuting transvections", {"a": a, "b": b, "r": list(R.decode(r))})
            if M.code(*low):
                raise NotAHomomorphism("triangular shape", {"a": a, "b": b, "r": list(R.decode(r)),
                                                            "entry": low})
            s = R.mul(r, a2m1_inv) if (a, b) == (0, 1) else R.mul(r, R.inv(R.sub(R.inv(a2), R.one)))
            Ms = L.images[(a, b, s)]
            if delta * Ms * dinv * Ms.inverse() != M:
                raise NotAHomomorphism("commutator with delta", {"a": a, "b": b, "r": list(R.decode(r))})
            if M.code(0, 0) != S.one or M.code(1, 1) != S.one:
                raise NotAHomomorphism("unit diagonal", {"a": a, "b": b, "r": list(R.decode(r))})


# --- the excluded case n = 3, k = F_2 -----------------------------------

def sl3f2_witness(R: RingSpec | None = None) -> dict:
    """A lift of SL_3(R) -> SL_3(F_2) to S = Z/4 that no ring map R -> S induces.

    Built as rho_0 o reduction, where rho_0 is the exceptional lift of
    SL_3(F_2) to Z/4.  It sends t_01^2 to I, whereas every induced family
    sends t_01^2 to t_01^f(2) with f(2) = 2 != 0 in Z/4; since a conjugate
    of I is I, the two cannot be strictly equivalent.
    """
    R = R or make_ring(2, 2)
    rho0 = exceptional_rep("sl3f2", 2)
    S = rho0.ring
    k = R.residue_field
    n = 3
    imgs = {}
    for r in R.element_codes():
        rk = R.residue_code(r)
        for a in range(n):
            for b in range(n):
                if a != b:
                    base = t(k, n, a, b, RingElt(k, rk))
                    imgs[(a, b, r)] = rho0(base)
    W = GeneratorLift(R, n, S, imgs)
    two = R.from_int(2)
    w_img = W.images[(0, 1, two)]
    homs = find_homs(R, S)
    induced_imgs = [t(S, n, 0, 1, f(two)) for f in homs]
    ok = w_img.is_identity() and all(not M.is_identity() for M in induced_imgs)
    return {
        "R": R.spec_string(),
        "S": S.spec_string(),
        "witness_image_of_t01_2": w_img.serialize(),
        "homs": len(homs),
        "induced_images_of_t01_2": [M.serialize() for M in induced_imgs],
        "pass": bool(ok and homs),
        "lift": W,
    }
