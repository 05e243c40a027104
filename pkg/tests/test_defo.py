import itertools
from collections import Counter
import json
import random

import pytest

from sldeform.defo import (
    EXCEPTIONAL,
    GeneratorLift,
    Lift,
    Rep,
    adjoint_invariants,
    classify_strict,
    conjugate_tables_equal,
    diamond_check,
    enumerate_lifts,
    enumerate_lifts_by_closure,
    exceptional_lift,
    exceptional_rep,
    extract_hom,
    h1_dimension,
    kernel_elements,
    lift_fiber,
    rigidify,
    twist_decompose,
    verify_exceptional_lift,
)
from sldeform.errors import (
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
from sldeform.groups import builtin_group, diagonal_torus, enumerate_group
from sldeform.localring import RingElt, RingHom, find_homs, make_ring, parse_ring
from sldeform.matrix import Mat, t
from sldeform.normalize import induced_lift, random_conjugate

from _oracles import dense_h1, int_matrix

F3 = make_ring(3, 1)
F7 = make_ring(7, 1)
Z4, Z9 = make_ring(2, 2), make_ring(3, 2)
F3E = parse_ring("F_3[e]/(e^2)")
F5E = parse_ring("F_5[e]/(e^2)")


def group(name):
    gens, P = builtin_group(name)
    return enumerate_group(gens), gens, P


def embed(M, S):
    """A matrix over the residue field, viewed over S through constant lifts."""
    return Mat(S, M.n, [S.lift_residue_code(c) for c in M.codes])


# --- adjoint invariants --------------------------------------------------

def test_adjoint_invariants_examples():
    _, gens, _ = group("sl2f3")
    inv = adjoint_invariants(gens)
    assert inv.dim == 1 and inv.is_scalar
    _, gens, _ = group("q8")
    assert adjoint_invariants(gens).dim == 1
    full = adjoint_invariants([], n=2, ring=F3)
    assert full.dim == 4 and not full.is_scalar


def test_adjoint_invariants_of_abelian_group():
    # the diagonal torus of SL_2(F_7) centralises exactly the diagonal matrices
    inv = adjoint_invariants(diagonal_torus(F7))
    assert inv.dim == 2 and not inv.is_scalar


def test_adjoint_invariants_over_artinian_ring():
    # a lift to Z/9 of SL_2(F_3): invariants are exactly Z/9 * I
    E = exceptional_lift("sl2f3", 2)
    inv = adjoint_invariants(E.images)
    assert inv.is_scalar and inv.module.size() == 9


# --- H^1 -----------------------------------------------------------------

# (dim Z^1, dim B^1, dim H^1), frozen from the dense oracle in _oracles.dense_h1
H1_FROZEN = {
    "sl2f2": (3, 3, 0),
    "q8": (3, 3, 0),
    "sl2f3": (4, 3, 1),
    "gl2f3": (3, 3, 0),
    "sl2f5": (4, 3, 1),
    "sl3f2": (8, 8, 0),
}


@pytest.mark.parametrize("name", sorted(H1_FROZEN))
def test_h1_frozen(name):
    G, _, _ = group(name)
    res = h1_dimension(G)
    assert (res.z1, res.b1, res.h1) == H1_FROZEN[name]
    assert res.b1 == G.n ** 2 - res.ad_invariants
    assert len(res.cocycles) == res.z1
    assert all(c.check() for c in res.cocycles)


@pytest.mark.parametrize("name", ["sl2f2", "q8", "sl2f3", "gl2f3"])
def test_h1_matches_dense_oracle(name):
    G, gens, _ = group(name)
    z1, b1 = dense_h1([int_matrix(M) for M in G.elements], [int_matrix(M) for M in gens], G.ring.p)
    res = h1_dimension(G)
    assert (res.z1, res.b1) == (z1, b1)


def test_h1_preconditions():
    G = enumerate_group([t(Z4, 2, 0, 1, 1), t(Z4, 2, 1, 0, 1)])
    with pytest.raises(PreconditionViolated):
        h1_dimension(G)
    F29 = make_ring(29, 1)
    big = enumerate_group([t(F29, 2, 0, 1, 1), t(F29, 2, 1, 0, 1)])
    with pytest.raises(TableMissing):
        h1_dimension(big)


def test_cocycle_check_detects_garbage():
    G, _, _ = group("sl2f2")
    res = h1_dimension(G)
    c = res.cocycles[0]
    bad = type(c)(c.group, c.base, [c.values[0]] + [(1, 0, 0, 0)] * (G.order - 1))
    assert not bad.check()


# --- lift enumeration ----------------------------------------------------

def test_enumerate_sl2f2_to_z4():
    _, gens, P = group("sl2f2")
    lifts = enumerate_lifts(P, gens, Z4)
    assert len(lifts) == 8
    assert all(L.reduces_to_base() for L in lifts)
    classes = classify_strict(lifts, Z4)
    assert len(classes) == 1 and classes[0].orbit_size == 8


def test_enumerate_sl2f3_to_z9_and_shards():
    _, gens, P = group("sl2f3")
    one = enumerate_lifts(P, gens, Z9)
    three = enumerate_lifts(P, gens, Z9, shards=3)
    assert [L.key() for L in one] == [L.key() for L in three]
    assert len(one) == 81
    classes = classify_strict(one, Z9)
    assert [c.orbit_size for c in classes] == [27, 27, 27]
    # SL_2(F_3) is not perfect: determinants of lifts range over the cube roots of unity
    dets = Counter(tuple(M.det().code for M in L.images) for L in one)
    assert dets == {(1, 1): 27, (4, 1): 27, (7, 1): 27}


@pytest.mark.parametrize("name,target,count", [("sl2f2", "Z/4", 8), ("sl2f3", "F_3[e]/(e^2)", 81),
                                               ("q8", "F_3[e]/(e^2)", 27)])
def test_enumeration_matches_closure_oracle(name, target, count):
    _, gens, P = group(name)
    S = parse_ring(target)
    by_pres = enumerate_lifts(P, gens, S)
    by_closure = enumerate_lifts_by_closure(gens, S)
    assert [L.key() for L in by_pres] == [L.key() for L in by_closure]
    assert len(by_pres) == count


def test_enumerate_errors():
    _, gens, P = group("sl2f3")
    with pytest.raises(SearchTooLarge):
        enumerate_lifts(P, gens, Z9, limit=1000)
    with pytest.raises(ResidueMismatch):
        enumerate_lifts(P, gens, Z4)
    with pytest.raises(KernelTooLarge):
        classify_strict(enumerate_lifts(P, gens, Z9), Z9, limit=10)


def test_classify_conjugate_pair():
    _, gens, P = group("sl2f3")
    lifts = enumerate_lifts(P, gens, Z9)
    classes = classify_strict(lifts, Z9)
    K = Mat.from_rows(Z9, [[1, 3], [6, 4]])

    def cls(L):
        return [c.class_id for c in classes
                if conjugate_tables_equal(c.representative.images, L.images, Z9, 2) is not None]

    for L in lifts[::9]:
        assert len(cls(L)) == 1
        assert cls(L) == cls(L.conjugate(K))


def test_classify_requires_complete_orbits():
    _, gens, P = group("sl2f3")
    lifts = enumerate_lifts(P, gens, Z9)
    with pytest.raises(AssertionError):
        classify_strict(lifts[:2], Z9)


def test_lift_fiber_and_kernel():
    fib = lift_fiber(Mat.identity(F3, 2), Z9)
    assert len(fib) == 3 ** 4
    assert fib == sorted(fib, key=Mat.key)
    assert kernel_elements(Z9, 2) == fib


def test_conjugate_tables_equal():
    E = exceptional_lift("sl2f3", 2)
    K = Mat.from_rows(E.ring, [[4, 3], [0, 1]])
    Kp = conjugate_tables_equal(E.images, [K * M * K.inverse() for M in E.images], E.ring, 2)
    assert Kp is not None
    assert all(Kp * M * Kp.inverse() == K * M * K.inverse() for M in E.images)
    other = [embed(M, E.ring) for M in E.base]
    assert conjugate_tables_equal(E.images, other, E.ring, 2) is None


# --- diamond and extraction ----------------------------------------------

def test_diamond_on_induced_lift():
    f = find_homs(Z9, Z9)[0]
    L = induced_lift(f, 3)
    res = diamond_check(L)
    assert res.witness is None
    assert all(res.table[(a, b, r)] == r for (a, b, r) in res.table)


def test_diamond_witness_after_conjugation():
    f = RingHom(F3E, F3E, F3E.x)
    L = induced_lift(f, 2)
    eps = F3E.elt([0, 1])
    K = Mat.from_rows(F3E, [[1, 0], [eps, 1]])
    res = diamond_check(L.conjugate(K))
    assert res.table is None
    # K t_01^1 K^-1 = I + e_01 + eps (e_11 - e_00): the defect sits on the diagonal
    assert res.witness["a"] == 0 and res.witness["b"] == 1
    assert res.witness["positions"] == [(0, 0), (1, 1)]
    M = K * t(F3E, 2, 0, 1, 1) * K.inverse()
    assert M == Mat.from_rows(F3E, [[1 - eps, 1], [0, 1 + eps]])


def test_diamond_rejects_rho0_family():
    from sldeform.normalize import sl3f2_witness

    W = sl3f2_witness()["lift"]
    assert diamond_check(W).table is None


def test_extract_hom_identity():
    f = find_homs(Z9, Z9)[0]
    ext = extract_hom(induced_lift(f, 3))
    assert ext.hom == f and ext.conjugator.is_identity()


def test_extract_hom_planted_into_dual_numbers():
    R = parse_ring("Z/25[x]/(x^2-5)")
    f = RingHom(R, F5E, F5E.elt([0, 2]))
    ext = extract_hom(induced_lift(f, 3))
    assert ext.hom == f
    assert ext.hom(R.x) * ext.hom(R.x) == ext.hom(R.elt(5)) == 0


def test_extract_hom_after_diagonal_conjugation_n2():
    f = find_homs(F7, F7)[0]
    D = Mat.from_rows(F7, [[3, 0], [0, 1]])
    L = induced_lift(f, 2).conjugate(D)
    ext = extract_hom(L)
    assert ext.hom == f
    C = ext.conjugator
    assert all(C * M * C.inverse() == t(F7, 2, a, b, RingElt(F7, r))
               for (a, b, r), M in L.images.items())


def test_extract_hom_rejects_non_additive_table():
    R = make_ring(7, 1)
    imgs = {}
    for r in R.element_codes():
        for a, b in ((0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)):
            imgs[(a, b, r)] = t(R, 3, a, b, RingElt(R, R.mul(r, r)))  # r -> r^2 is not additive
    L = GeneratorLift(R, 3, R, imgs, validate=False)
    with pytest.raises(NotAHomomorphism):
        extract_hom(L)
    with pytest.raises(PreconditionViolated):
        GeneratorLift(R, 3, R, imgs)


def test_generator_lift_json_round_trip():
    f = find_homs(Z9, Z9)[0]
    L, _ = random_conjugate(induced_lift(f, 2), random.Random(3))
    doc = json.loads(json.dumps(L.to_json()))
    back = GeneratorLift.from_json(doc)
    assert back == L and back.d_images == L.d_images


# --- rigidify and twists -------------------------------------------------

def test_rigidify_identity_when_already_included():
    D = diagonal_torus(make_ring(7, 2))
    assert rigidify(D, D).is_identity()


@pytest.mark.parametrize("seed", range(5))
def test_rigidify_round_trip_z49(seed):
    S = make_ring(7, 2)
    D = diagonal_torus(S)
    rng = random.Random(seed)
    mel = S.maximal_ideal().element_codes()
    K = Mat(S, 2, [S.add(S.one if i == j else 0, rng.choice(mel)) for i in range(2) for j in range(2)])
    images = [K * T * K.inverse() for T in D]
    X = rigidify(D, images)
    assert X.residue().is_identity()
    assert all(X * M * X.inverse() == T for M, T in zip(images, D))


def test_rigidify_sylow_raises():
    H = enumerate_group([t(F3, 2, 0, 1, 1)])
    assert H.order == 3
    with pytest.raises(OrderNotCoprime):
        rigidify(H.elements, H.elements)


def _gl2f3_reps(S):
    G, gens, _ = group("gl2f3")
    N = [i for i, M in enumerate(G.elements) if M.det() == 1]
    rho_f = Rep(G, [embed(M, S) for M in gens])
    return G, N, rho_f


def test_twist_trivial():
    G, N, rho_f = _gl2f3_reps(F3E)
    lam = twist_decompose(rho_f, rho_f, N)
    assert len(lam) == G.order and all(v == 1 for v in lam.values())


def test_twist_by_scalars_of_determinant():
    # scaling the non-SL generator by 1 + c eps is a homomorphism only for c = 0,
    # since 1 + eps F_3 has no element of order 2
    G, N, rho_f = _gl2f3_reps(F3E)
    eps = F3E.elt([0, 1])
    good = []
    for c in range(3):
        gens = rho_f.gen_images[:2] + [rho_f.gen_images[2] * (1 + c * eps)]
        twisted = Rep(G, gens)
        if twisted.is_homomorphism():
            good.append(c)
            assert all(v == 1 for v in twist_decompose(twisted, rho_f, N).values())
    assert good == [0]


def test_twist_non_scalar_ratio():
    G, N, rho_f = _gl2f3_reps(F3E)
    eps = F3E.elt([0, 1])
    U = Mat.from_rows(F3E, [[1, eps], [0, 1]])
    rho = Rep(G, rho_f.gen_images)
    Nset = set(N)
    rho._images = [rho_f.image(i) if i in Nset else U * rho_f.image(i) for i in range(G.order)]
    with pytest.raises(NonScalarRatio):
        twist_decompose(rho, rho_f, N)


def test_twist_requires_agreement_on_n():
    G, N, rho_f = _gl2f3_reps(F3E)
    eps = F3E.elt([0, 1])
    K = Mat.from_rows(F3E, [[1, eps], [0, 1]])
    moved = Rep(G, [K * M * K.inverse() for M in rho_f.gen_images])
    with pytest.raises(PreconditionViolated):
        twist_decompose(moved, rho_f, N)


# --- exceptional lifts ---------------------------------------------------

@pytest.mark.parametrize("which", EXCEPTIONAL)
@pytest.mark.parametrize("K", [2, 10])
def test_exceptional_lifts_verify(which, K):
    rep = verify_exceptional_lift(which, K)
    assert rep["pass"] and rep["reduction"]
    assert all(r["pass"] for r in rep["relators"])
    # the S_3 lift uses eps of determinant -1
    assert rep["det_one"] == (which != "sl2f2")


def test_exceptional_sl2f2_matrices():
    E = exceptional_lift("sl2f2", 10)
    assert E.images[0] == Mat.from_rows(E.ring, [[0, 1], [-1, -1]])
    assert E.images[1] == Mat.from_rows(E.ring, [[0, 1], [1, 0]])


def test_exceptional_sl3f2_omega():
    E = exceptional_lift("sl3f2", 12)
    w = E.images[1][0, 1]
    assert w * w + w + 2 == 0 and w.residue() == 1


def test_exceptional_unknown():
    with pytest.raises(UnsupportedPresentation):
        exceptional_lift("sl4f2", 5)


def test_exceptional_rep_is_homomorphism():
    rho = exceptional_rep("sl2f3", 3)
    assert rho.group.order == 24 and rho.is_homomorphism()
    assert all(rho.image(i).residue() == rho.group.elements[i] for i in range(24))
