import itertools
import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from sldeform.errors import (
    BadIndices,
    NonUnitParameter,
    NotInCongruenceSubgroup,
    NotUnimodular,
    PreconditionViolated,
    UnsupportedCase,
)
from sldeform.groups import enumerate_group
from sldeform.localring import RingElt as _e
from sldeform.localring import make_ring, parse_ring
from sldeform.matrix import (
    Mat,
    TransvectionWord,
    chebyshev_poly,
    chebyshev_scan,
    commutator,
    d_ab,
    decompose_transvections,
    express_as_commutator,
    minus_identity_power_test,
    random_sl,
    scalar_if_centralizes,
    sigma,
    standard_matrix,
    t,
    verify_relations,
)
from sldeform.polys import poly_add

F2, F3, F5, F7 = (make_ring(p, 1) for p in (2, 3, 5, 7))
Z4, Z8, Z9 = make_ring(2, 2), make_ring(2, 3), make_ring(3, 2)


def rows_of(M):
    return [[x.code for x in row] for row in M.rows()]


# --- standard matrices ---------------------------------------------------

def test_standard_matrix_examples():
    assert rows_of(standard_matrix("t", F2, 2, 0, 1, 1)) == [[1, 1], [0, 1]]
    assert rows_of(standard_matrix("sigma", F2, 2, 0, 1, 1)) == [[0, 1], [1, 0]]
    D = standard_matrix("d_ab", Z8, 3, 0, 1, 3)
    assert rows_of(D) == [[3, 0, 0], [0, 3, 0], [0, 0, 1]]
    assert standard_matrix("d", Z9, 2, [2, 5]).det() == 1


def test_standard_matrix_errors():
    with pytest.raises(NonUnitParameter):
        sigma(Z8, 2, 0, 1, 2)
    with pytest.raises(NonUnitParameter):
        d_ab(Z9, 3, 0, 2, 3)
    with pytest.raises(BadIndices):
        t(Z4, 2, 0, 0, 1)
    with pytest.raises(BadIndices):
        t(Z4, 2, 0, 2, 1)


@pytest.mark.parametrize("R", [Z8, Z9, parse_ring("Z/25[x]/(x^2-5)"), parse_ring("Z/4[x]/(x^2, 2x)")])
def test_standard_matrices_have_det_one_and_reduce(R):
    k = R.residue_field
    for n in (2, 3):
        for a, b in itertools.permutations(range(n), 2):
            for u in R.unit_codes()[:6]:
                for kind in ("t", "d_ab", "sigma"):
                    M = standard_matrix(kind, R, n, a, b, _e(R, u))
                    assert M.det() == 1
                    ures = _e(k, R.residue_code(u))
                    assert M.residue() == standard_matrix(kind, k, n, a, b, ures)


# --- determinant ---------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 26), min_size=9, max_size=9),
       st.lists(st.integers(0, 26), min_size=9, max_size=9))
def test_det_matches_sympy_and_is_multiplicative(xs, ys):
    R = make_ring(3, 3)
    A = Mat.from_rows(R, [xs[0:3], xs[3:6], xs[6:9]])
    B = Mat.from_rows(R, [ys[0:3], ys[3:6], ys[6:9]])
    assert A.det().code == int(sympy.Matrix(3, 3, xs).det()) % 27
    assert (A * B).det() == A.det() * B.det()


def test_det_over_non_cyclic_ring():
    R = parse_ring("Z/4[x]/(x^2, 2x)")
    rng = random.Random(5)
    els = R.element_codes()
    for _ in range(200):
        A = Mat(R, 3, [rng.choice(els) for _ in range(9)])
        B = Mat(R, 3, [rng.choice(els) for _ in range(9)])
        assert (A * B).det() == A.det() * B.det()
        if A.det().is_unit():
            assert A * A.inverse() == Mat.identity(R, 3)


# --- relations -----------------------------------------------------------

def test_relation_examples():
    assert t(Z8, 2, 0, 1, 2) * t(Z8, 2, 0, 1, 3) == t(Z8, 2, 0, 1, 5)
    # u = 1 + rs with r = s = 2 gives u = 5
    r = s = Z8.elt(2)
    u = 1 + r * s
    assert u == 5
    rhs = t(Z8, 2, 0, 1, r) * t(Z8, 2, 1, 0, s) * t(Z8, 2, 0, 1, -r / u) * t(Z8, 2, 1, 0, -s * u)
    assert d_ab(Z8, 2, 0, 1, u) == rhs
    assert sigma(F2, 2, 0, 1, 1) == t(F2, 2, 0, 1, 1) * t(F2, 2, 1, 0, 1) * t(F2, 2, 0, 1, 1)
    assert commutator(t(Z9, 3, 0, 1, 2), t(Z9, 3, 1, 2, 3)) == t(Z9, 3, 0, 2, 6)


@pytest.mark.parametrize("spec", ["Z/4", "F_3[e]/(e^2)", "Z/4[x]/(x^2, 2x)", "Z/9"])
def test_verify_relations_report(spec):
    R = parse_ring(spec)
    rep = verify_relations(R, 3)
    assert sorted(rep) == [1, 2, 3, 4, 5, 6, 7]
    for v in rep.values():
        assert v["pass"] and v["witness"] is None and v["checked"] > 0


def test_verify_relations_sampled_large_ring():
    R = parse_ring("Z/5^3[x]/(x^2-5)")
    rep = verify_relations(R, 3, samples=200, seed=1)
    assert all(v["pass"] for v in rep.values())
    with pytest.raises(ValueError):
        verify_relations(R, 3)


# --- decomposition -------------------------------------------------------

def test_decompose_examples():
    assert len(decompose_transvections(Mat.identity(Z8, 3))) == 0
    M = Mat.from_rows(Z8, [[1, 4], [4, 1]])
    # [[1,4],[4,1]] has det 1 - 16 = 1 mod 8 and is I mod 4 = a^2
    w = decompose_transvections(M, Z8.ideal([2]))
    assert w.evaluate() == M and w.params_in_ideal()
    assert all(r.code % 2 == 0 for _, _, r in w)
    w = decompose_transvections(Mat.from_rows(F2, [[0, 1], [1, 0]]))
    assert [(a, b, r.code) for a, b, r in w] == [(0, 1, 1), (1, 0, 1), (0, 1, 1)]


def test_decompose_errors():
    with pytest.raises(NotUnimodular):
        decompose_transvections(Mat.from_rows(Z8, [[3, 0], [0, 1]]))
    with pytest.raises(NotInCongruenceSubgroup):
        decompose_transvections(Mat.from_rows(Z8, [[1, 2], [0, 1]]), Z8.ideal([2]))


@pytest.mark.parametrize("spec,n", [("Z/8", 2), ("Z/4", 3), ("Z/9", 2), ("F_3[e]/(e^2)", 3),
                                    ("Z/4[x]/(x^2, 2x)", 2), ("Z/25[x]/(x^2-5)", 2), ("F_7", 4)])
def test_decompose_random_round_trip(spec, n):
    R = parse_ring(spec)
    rng = random.Random(hash(spec) & 0xFFFF)
    for _ in range(60):
        M = random_sl(R, n, rng)
        w = decompose_transvections(M)
        assert w.evaluate() == M
        assert all(a != b for a, b, _ in w)


def test_decompose_honours_ideal():
    R = parse_ring("Z/27")
    a = R.ideal([3])
    rng = random.Random(2)
    for _ in range(50):
        # products of transvections with parameters in a^2 = (9) lie in the congruence subgroup
        M = Mat.identity(R, 3)
        for _ in range(6):
            i, j = rng.sample(range(3), 2)
            M = M * t(R, 3, i, j, 9 * rng.randrange(3))
        w = decompose_transvections(M, a)
        assert w.evaluate() == M and w.params_in_ideal()


def test_transvection_word_serialize():
    w = TransvectionWord(Z9, 2, [(0, 1, 3), (1, 0, 5)])
    assert w.serialize() == [[0, 1, [3]], [1, 0, [5]]]
    assert w.evaluate() == t(Z9, 2, 0, 1, 3) * t(Z9, 2, 1, 0, 5)


# --- centralisers and commutators ----------------------------------------

def test_scalar_if_centralizes_examples():
    assert scalar_if_centralizes(Mat.diagonal(Z9, [3, 3, 3])).scalar == 3
    res = scalar_if_centralizes(t(F3, 3, 0, 1, 1))
    assert res.scalar is None and res.witness is not None
    M, T = t(F3, 3, 0, 1, 1), t(F3, 3, *res.witness, 1)
    assert M * T != T * M
    assert scalar_if_centralizes(Mat.identity(Z4, 2)).scalar == 1


@pytest.mark.parametrize("R,n", [(F3, 2), (F2, 3), (Z4, 2)])
def test_centraliser_brute_force(R, n):
    gens = [t(R, n, a, b, 1) for a, b in itertools.permutations(range(n), 2)]
    G = enumerate_group(gens)
    els = R.element_codes()
    for codes in itertools.product(els, repeat=n * n):
        M = Mat(R, n, codes)
        central = all(M * g == g * M for g in G.elements)
        res = scalar_if_centralizes(M)
        assert (res.scalar is not None) == central
        if central:
            assert M == Mat.identity(R, n) * res.scalar


def test_express_as_commutator_examples():
    P, Q = express_as_commutator(Z9, 3, 0, 2, 6, split=(2, 3))
    assert P == t(Z9, 3, 0, 1, 2) and Q == t(Z9, 3, 1, 2, 3)
    assert commutator(P, Q) == t(Z9, 3, 0, 2, 6)
    P, Q = express_as_commutator(F7, 2, 0, 1, 1, alpha=3)
    assert rows_of(P) == [[3, 0], [0, 5]] and Q == t(F7, 2, 0, 1, 1)
    assert commutator(P, Q) == t(F7, 2, 0, 1, 1)
    with pytest.raises(UnsupportedCase):
        express_as_commutator(F3, 2, 0, 1, 1)


@pytest.mark.parametrize("spec,n", [("Z/9", 3), ("Z/49", 2), ("F_5[e]/(e^2)", 2), ("Z/8", 4)])
def test_express_as_commutator_exhaustive(spec, n):
    R = parse_ring(spec)
    for a, b in itertools.permutations(range(n), 2):
        for r in R.element_codes():
            P, Q = express_as_commutator(R, n, a, b, _e(R, r))
            assert commutator(P, Q) == t(R, n, a, b, _e(R, r))


# --- Chebyshev -----------------------------------------------------------

def test_chebyshev_examples():
    assert chebyshev_poly(0) == [0]
    assert chebyshev_poly(2) == [0, 1]
    assert chebyshev_poly(3) == [-1, 0, 1]
    assert poly_add(chebyshev_poly(3), [-c for c in chebyshev_poly(2)]) == [-1, -1, 1]


@pytest.mark.parametrize("j", range(1, 16))
def test_chebyshev_matches_sympy(j):
    x = sympy.symbols("x")
    ref = sympy.Poly(sympy.expand(sympy.chebyshevu(j - 1, x / 2)), x)
    assert [int(c) for c in reversed(ref.all_coeffs())] == chebyshev_poly(j)


def test_power_test_examples():
    assert minus_identity_power_test(Mat.from_rows(F5, [[0, 1], [-1, 1]]), 3) == (True, True)
    assert minus_identity_power_test(Mat.from_rows(F7, [[0, 1], [-1, 0]]), 3) == (False, False)
    with pytest.raises(PreconditionViolated):
        minus_identity_power_test(Mat.from_rows(F5, [[2, 0], [0, 2]]), 3)
    with pytest.raises(PreconditionViolated):
        minus_identity_power_test(Mat.from_rows(Z9, [[1, 3], [3, 1]]), 3)  # det = -8 = 1, both zero divisors
    with pytest.raises(PreconditionViolated):
        minus_identity_power_test(Mat.identity(F5, 2), 4)


def test_chebyshev_scan_f5():
    scan = chebyshev_scan(F5, (3, 5, 7))
    # SL_2(F_5) has 120 elements, of which the diagonal ones (4) are excluded
    assert {n: (v["valid"], v["pass"]) for n, v in scan.items()} == {3: (116, True), 5: (116, True), 7: (116, True)}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 25))
def test_cayley_hamilton_powers(seed, j):
    R = make_ring(5, 2)
    M = random_sl(R, 2, random.Random(seed))
    tr = M.trace().code
    fj = R.eval_poly_code(chebyshev_poly(j), tr)
    fj1 = R.eval_poly_code(chebyshev_poly(j - 1), tr)
    assert M ** j == M * _e(R, fj) - Mat.identity(R, 2) * _e(R, fj1)
