import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sldeform.errors import (
    MixedRings,
    NonUnit,
    NonUnitDerivative,
    NotLocal,
    NotPrime,
    ResidueMismatch,
    RingSyntaxError,
)
from sldeform.howell import HowellBasis, kernel
from sldeform.localring import (
    RingElt,
    RingHom,
    arith,
    find_homs,
    hensel_lift,
    invert,
    make_ring,
    maximal_ideal_power,
    parse_ring,
    quotient_by_m_power,
    residue,
    teichmueller,
)
from sldeform.polys import factor_mod_p, format_poly, parse_poly

from _oracles import naive_mul, naive_ring_elements, naive_span

Z4 = make_ring(2, 2)
Z8 = make_ring(2, 3)
Z9 = make_ring(3, 2)
Z25 = make_ring(5, 2)
R5 = make_ring(5, 2, [-5, 0, 1])  # Z/25[x]/(x^2 - 5)

SMALL_SPECS = [
    "Z/2", "Z/4", "Z/8", "Z/9", "Z/25", "Z/27",
    "F_2[e]/(e^2)", "F_3[e]/(e^2)", "F_5[e]/(e^2)",
    "Z/4[x]/(x^2, 2x)", "Z/4[x]/(x^2+x+1)", "F_3[x]/(x^2+1)",
    "Z/25[x]/(x^2-5)", "F_3[x]/(x^3)", "Z/9[x]/(x^2-3)",
]


# --- polynomials ---------------------------------------------------------

def test_parse_poly_forms():
    assert parse_poly("x^2 - 5") == [-5, 0, 1]
    assert parse_poly("2*x*(x+1)") == [0, 2, 2]
    assert parse_poly("(x+1)**3") == [1, 3, 3, 1]
    assert parse_poly("e^2", "e") == [0, 0, 1]
    with pytest.raises(RingSyntaxError):
        parse_poly("y^2")


def test_format_poly_round_trip():
    for c in ([-5, 0, 1], [1, 1, 1], [0, 3], [7]):
        assert parse_poly(format_poly(c)) == c


def test_factor_mod_p():
    # x^2 - 1 splits over F_3, x^2 - 5 is a square mod 5
    assert factor_mod_p([-1, 0, 1], 3) == [([1, 1], 1), ([2, 1], 1)]
    assert factor_mod_p([-5, 0, 1], 5) == [([0, 1], 2)]
    assert factor_mod_p([2, 1, 1], 2) == [([0, 1], 1), ([1, 1], 1)]


# --- Howell forms --------------------------------------------------------

@pytest.mark.parametrize("rows,p,a,width", [
    ([[2, 4], [0, 6]], 2, 3, 2),
    ([[3, 0, 6], [0, 9, 3]], 3, 3, 3),
    ([[4, 2]], 2, 3, 2),
    ([[5, 10], [0, 5]], 5, 2, 2),
])
def test_howell_span_matches_closure(rows, p, a, width):
    hb = HowellBasis(rows, p, a, width)
    span = naive_span(rows, p**a, width)
    assert hb.size() == len(span)
    assert set(hb.elements()) == span
    for v in itertools.product(range(p**a), repeat=width):
        assert hb.contains(v) == (v in span)


def test_howell_express_reconstructs():
    rows = [[2, 4, 0], [0, 6, 2], [4, 0, 4]]
    hb = HowellBasis(rows, 2, 3, 3, track=True)
    for v in hb.elements():
        combo = hb.express(v)
        total = [sum(c * rows[i][k] for i, c in combo.items()) % 8 for k in range(3)]
        assert tuple(total) == v


def test_kernel_of_map():
    # x -> 2x on Z/8 has kernel {0, 4}
    ker = kernel([[2]], 2, 3)
    assert set(ker.elements()) == {(0,), (4,)}


# --- construction --------------------------------------------------------

def test_make_ring_examples():
    assert Z4.size == 4 and Z4.k_size == 2
    assert R5.size == 625 and R5.k_size == 5
    with pytest.raises(NotLocal):
        make_ring(3, 1, [-1, 0, 1])
    with pytest.raises(NotPrime):
        make_ring(6, 1)


@pytest.mark.parametrize("text,size", [
    ("Z/4", 4), ("Z/3^2", 9), ("F_5", 5), ("Z/5^2[x]/(x^2-5)", 625),
    ("F_2[e]/(e^2)", 4), ("Z/4[x]/(x^2, 2x)", 8), ("Z/4[x]/(x^2); J = 2x", 8),
])
def test_parse_ring(text, size):
    assert parse_ring(text).size == size


def test_parse_ring_rejects():
    with pytest.raises(RingSyntaxError):
        parse_ring("Q/5")
    with pytest.raises(NotLocal):
        parse_ring("Z/6")


def test_spec_string_round_trip():
    for s in SMALL_SPECS:
        R = parse_ring(s)
        assert parse_ring(R.spec_string()) == R


# --- arithmetic ----------------------------------------------------------

def test_arith_examples():
    assert arith(Z4.elt(2), Z4.elt(2), "add") == 0
    assert arith(Z9.elt(5), Z9.elt(5), "mul") == 7
    assert R5.x * R5.x == 5
    with pytest.raises(MixedRings):
        arith(Z4.elt(1), Z8.elt(1), "add")


def test_invert_examples():
    assert invert(Z4.elt(3)) == 3
    assert invert(Z9.elt(2)) == 5
    with pytest.raises(NonUnit):
        invert(R5.x)


def test_residue_examples():
    assert residue(Z9.elt(3)) == 0
    assert residue(R5.x) == 0
    assert residue(Z9.elt(8)) == 2


@pytest.mark.parametrize("p,a,g", [(2, 3, [0, 1]), (5, 2, [-5, 0, 1]), (2, 2, [1, 1, 1]),
                                   (3, 1, [0, 0, 0, 1]), (3, 2, [-3, 0, 1])])
def test_multiplication_matches_schoolbook(p, a, g):
    R = make_ring(p, a, g)
    for x in naive_ring_elements(p, a, g):
        for y in naive_ring_elements(p, a, g)[:40]:
            assert R.decode(R.mul(R.encode(x), R.encode(y))) == naive_mul(x, y, p, a, g)


@pytest.mark.parametrize("spec", SMALL_SPECS)
def test_ring_axioms_exhaustive(spec):
    R = parse_ring(spec)
    els = R.element_codes()
    assert len(els) == R.size
    sample = els if R.size <= 27 else els[:: max(1, R.size // 27)]
    for x in sample:
        for y in sample:
            assert R.mul(x, y) == R.mul(y, x)
            for z in sample[:9]:
                assert R.mul(R.mul(x, y), z) == R.mul(x, R.mul(y, z))
                assert R.mul(x, R.add(y, z)) == R.add(R.mul(x, y), R.mul(x, z))


codes = st.integers(min_value=0, max_value=10**6)


@settings(max_examples=300, deadline=None)
@given(codes, codes, codes)
def test_ring_axioms_random(a, b, c):
    R = make_ring(3, 3, [3, 0, 1])  # 729 elements
    els = R.element_codes()
    x, y, z = (els[v % len(els)] for v in (a, b, c))
    assert R.mul(R.mul(x, y), z) == R.mul(x, R.mul(y, z))
    assert R.mul(x, R.add(y, z)) == R.add(R.mul(x, y), R.mul(x, z))
    assert R.add(x, R.neg(x)) == 0


@pytest.mark.parametrize("spec", SMALL_SPECS)
def test_units_are_exactly_nonzero_residue(spec):
    R = parse_ring(spec)
    for c in R.element_codes():
        unit = R.is_unit(c)
        assert unit == (R.residue_code(c) != 0)
        if unit:
            assert R.mul(c, R.inv(c)) == R.one
        elif R.residue_code(R.sub(c, R.one)) != 0:
            # a non-unit is a sum of two units: (r - 1) + 1
            assert R.is_unit(R.sub(c, R.one))


# --- Teichmueller and Hensel ---------------------------------------------

def test_teichmueller_examples():
    assert teichmueller(Z9, 1) == 1
    assert teichmueller(Z9, 2) == 8
    assert teichmueller(Z25, 0) == 0


@pytest.mark.parametrize("spec", ["Z/9", "Z/25", "Z/49", "Z/27", "Z/25[x]/(x^2-5)", "Z/4[x]/(x^2+x+1)"])
def test_teichmueller_multiplicative(spec):
    R = parse_ring(spec)
    k = R.residue_field
    for c in k.element_codes():
        tc = teichmueller(R, RingElt(k, c))
        if c:
            assert tc ** (R.k_size - 1) == 1
        assert RingElt(k, R.residue_code(tc.code)) == RingElt(k, c)
        for d in k.element_codes():
            td = teichmueller(R, RingElt(k, d))
            assert tc * td == teichmueller(R, RingElt(k, k.mul(c, d)))


def test_hensel_examples():
    assert hensel_lift([2, 1, 1], Z8.elt(1)) == 5
    assert hensel_lift([2, 0, 1], make_ring(3, 3).elt(2)) == 5
    assert hensel_lift([1, 0, 1], Z25.elt(2)) == 7
    with pytest.raises(NonUnitDerivative):
        hensel_lift([-5, 0, 1], Z25.elt(0))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=30))
def test_hensel_root_is_exact(K):
    S = make_ring(2, K)
    w = hensel_lift([2, 1, 1], S.elt(1))
    assert w * w + w + 2 == 0
    assert w.residue() == 1


# --- ideals and quotients ------------------------------------------------

def test_maximal_ideal_power_examples():
    I, n = maximal_ideal_power(Z8, 2)
    assert I.element_codes() == [0, 4] and n == 3
    I, n = maximal_ideal_power(R5, 2)
    assert sorted(I.element_codes()) == sorted(R5.ideal([5]).element_codes()) and n == 4
    assert maximal_ideal_power(Z9, 0)[0].size == 9


@pytest.mark.parametrize("spec", SMALL_SPECS)
def test_filtration_properties(spec):
    R = parse_ring(spec)
    nR = R.nilpotency_index
    for l in range(nR + 1):
        Ml = set(R.maximal_ideal_power(l).element_codes())
        Ml1 = set(R.maximal_ideal_power(l + 1).element_codes())
        m = R.maximal_ideal().element_codes()
        assert {R.mul(x, y) for x in Ml for y in m} <= Ml1
        if l >= 1:
            Q, _ = quotient_by_m_power(R, l)
            assert Q.nilpotency_index == min(l, nR)
    assert R.maximal_ideal_power(nR).is_zero()
    assert nR == 0 or not R.maximal_ideal_power(nR - 1).is_zero()


def test_quotient_examples():
    Q, pi = quotient_by_m_power(Z8, 2)
    assert Q.size == 4 and pi(Z8.elt(7)) == 3
    Q, pi = quotient_by_m_power(R5, 2)
    assert Q.size == 25 and pi(R5.x) * pi(R5.x) == 0 and Q.from_int(5) == 0
    Q, pi = quotient_by_m_power(Z9, 5)
    assert Q == Z9


def test_quotient_map_kernel_is_m_power():
    R = make_ring(3, 2, [-3, 0, 1])
    for l in (1, 2, 3):
        Q, pi = quotient_by_m_power(R, l)
        ker = {c for c in R.element_codes() if pi.apply_code(c) == 0}
        assert ker == set(R.maximal_ideal_power(l).element_codes())
        assert {pi.apply_code(c) for c in R.element_codes()} == set(Q.element_codes())


# --- homomorphisms -------------------------------------------------------

def test_find_homs_examples():
    assert len(find_homs(Z9, make_ring(3, 1))) == 1
    assert find_homs(R5, Z25) == []
    assert find_homs(Z4, Z8) == []
    with pytest.raises(ResidueMismatch):
        find_homs(Z9, Z4)


def test_find_homs_into_dual_numbers():
    # x -> c eps for every c in F_5
    E = parse_ring("F_5[e]/(e^2)")
    homs = find_homs(R5, E)
    assert len(homs) == 5
    assert RingHom(R5, E, E.elt([0, 2])) in homs


@pytest.mark.parametrize("src,dst", [("Z/9", "Z/3"), ("Z/25[x]/(x^2-5)", "F_5[e]/(e^2)"),
                                     ("Z/4", "Z/4[x]/(x^2, 2x)"), ("Z/9[x]/(x^2-3)", "Z/9"),
                                     ("Z/8", "Z/4"), ("Z/4[x]/(x^2+x+1)", "Z/4[x]/(x^2+x+1)")])
def test_homs_are_ring_maps_over_k(src, dst):
    R, S = parse_ring(src), parse_ring(dst)
    for f in find_homs(R, S):
        for x in R.element_codes():
            assert S.residue_code(f.apply_code(x)) == R.residue_code(x)
            for y in R.element_codes()[:12]:
                assert f.apply_code(R.mul(x, y)) == S.mul(f.apply_code(x), f.apply_code(y))
                assert f.apply_code(R.add(x, y)) == S.add(f.apply_code(x), f.apply_code(y))
