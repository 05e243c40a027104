import itertools
import math

import pytest

from sldeform.errors import (
    CapExceeded,
    NonInvertibleImage,
    NotInvertible,
    PresentationSyntaxError,
    UnsupportedPresentation,
)
from sldeform.groups import (
    builtin_group,
    builtin_presentation,
    check_presentation_hom,
    diagonal_torus,
    enumerate_group,
    eval_word,
    parse_presentation,
    parse_word,
    sl_order,
    word_inverse,
)
from sldeform.localring import make_ring, parse_ring
from sldeform.matrix import Mat, commutator, t

from _oracles import closure


def transvection_gens(R, n):
    return [t(R, n, a, b, 1) for a, b in itertools.permutations(range(n), 2)]


@pytest.mark.parametrize("p,n,order", [(2, 2, 6), (3, 2, 24), (5, 2, 120), (2, 3, 168), (7, 2, 336)])
def test_sl_orders(p, n, order):
    G = enumerate_group(transvection_gens(make_ring(p, 1), n))
    assert G.order == order == sl_order(n, p)
    # independent closure without the package's BFS
    assert len(closure(G.gens, lambda x, y: x * y, lambda m: m.key())) == order


def test_gl2f3_order():
    gens, P = builtin_group("gl2f3")
    assert P is None
    assert enumerate_group(gens).order == 48


def test_group_structure():
    G = enumerate_group(transvection_gens(make_ring(3, 1), 2))
    I = Mat.identity(G.ring, 2)
    assert G.elements[0] == I
    assert G.elements[1:] == sorted(G.elements[1:], key=Mat.key)
    for i in range(G.order):
        assert G.mul(i, G.inverse(i)) == 0
        for j in range(G.order):
            assert G.elements[G.mul(i, j)] == G.elements[i] * G.elements[j]
    for pos, w in zip(range(G.order), G.words):
        assert eval_word(w, G.gens) == G.elements[pos]


def test_enumerate_errors():
    F5 = make_ring(5, 1)
    with pytest.raises(CapExceeded):
        enumerate_group(transvection_gens(F5, 2), cap=50)
    with pytest.raises(NotInvertible):
        enumerate_group([Mat.from_rows(F5, [[1, 1], [1, 1]])])


# --- presentations -------------------------------------------------------

def test_parse_presentation_chain():
    P = parse_presentation("gens: A, C; rel: A^5 = (A^-1 C)^3 = C^2")
    assert P.gens == ["A", "C"]
    assert len(P.relators) == 2
    assert P.relators[0] == (((0, 5),), ((0, -1), (1, 1), (0, -1), (1, 1), (0, -1), (1, 1)))
    assert P.relators[1][1] == ((1, 2),)


def test_parse_errors():
    with pytest.raises(PresentationSyntaxError):
        parse_presentation("gens: a; rel: b = 1")
    with pytest.raises(PresentationSyntaxError):
        parse_presentation("gens: a; rel: (a = 1")
    with pytest.raises(UnsupportedPresentation):
        builtin_presentation("coxeter", 7)
    with pytest.raises(UnsupportedPresentation):
        builtin_group("sl4f2")


def test_word_helpers():
    w = parse_word("a b^2 a^-1", ["a", "b"])
    assert w == ((0, 1), (1, 2), (0, -1))
    assert word_inverse(w) == ((0, 1), (1, -2), (0, -1))


def test_sunday_matrices():
    P, (S, T) = builtin_presentation("sunday")
    assert [[x.code for x in r] for r in S.rows()] == [[0, 1, 0], [0, 0, 1], [1, 1, 0]]
    assert [P.format_relator(r) for r in P.relators] == [
        "S^7 = 1", "T^2 = 1", "S T S T S T = 1", "S^4 T S^4 T S^4 T S^4 T = 1"]
    assert eval_word(((0, 7),), [S, T]).is_identity()


def test_coxeter_relators_are_two_sided():
    P, (A, C) = builtin_presentation("coxeter", 5)
    assert all(r[1] != () for r in P.relators)
    P3, (A3, C3) = builtin_presentation("coxeter3")
    assert eval_word(((0, 3),), [A3, C3]) == -Mat.identity(A3.ring, 2)
    assert eval_word((), [A3, C3]).is_identity()


@pytest.mark.parametrize("name", ["sunday", "coxeter3", "coxeter5", "s3", "q8"])
def test_builtin_presentations_hold_and_generate(name):
    P, gens = builtin_presentation(name)
    ok, bad = check_presentation_hom(P, gens)
    assert ok and bad is None
    expected = {"sunday": 168, "coxeter3": 24, "coxeter5": 120, "s3": 6, "q8": 8}[name]
    assert enumerate_group(gens).order == expected


def test_presentation_failure_reports_relator():
    P, (A, C) = builtin_presentation("coxeter", 5)
    ok, bad = check_presentation_hom(P, [A, Mat.identity(A.ring, 2)])
    assert not ok and bad in P.relators


def test_eval_word_singular_inverse():
    F3 = make_ring(3, 1)
    with pytest.raises(NonInvertibleImage):
        eval_word(((0, -1),), [Mat.from_rows(F3, [[1, 1], [1, 1]])])


# --- torus and commutators -----------------------------------------------

@pytest.mark.parametrize("spec", ["F_5", "F_7", "Z/49", "Z/27", "Z/25[x]/(x^2-5)", "Z/4[x]/(x^2+x+1)"])
def test_diagonal_torus(spec):
    R = parse_ring(spec)
    D = diagonal_torus(R)
    assert len(D) == R.k_size - 1
    assert math.gcd(len(D), R.p) == 1
    assert enumerate_group(D).order == len(D)
    for M in D:
        assert M ** (R.k_size - 1) == Mat.identity(R, 2) and M.det() == 1


def generated_by_commutators(G):
    """Subgroup generated by all commutators, grown greedily to keep the generating set small."""
    chosen = [Mat.identity(G.ring, G.n)]
    H = enumerate_group(chosen)
    for x in G.elements:
        for y in G.elements:
            c = commutator(x, y)
            if c not in H.index:
                chosen.append(c)
                H = enumerate_group(chosen)
                if H.order == G.order:
                    return H
    return H


@pytest.mark.parametrize("spec,n", [("F_5", 2), ("F_7", 2), ("F_2", 3), ("F_3", 3), ("Z/4", 3)])
def test_commutators_generate(spec, n):
    R = parse_ring(spec)
    G = enumerate_group(transvection_gens(R, n))
    assert generated_by_commutators(G).order == G.order


def test_commutators_of_small_fields_are_proper():
    # SL_2(F_2) and SL_2(F_3) are not perfect
    for p in (2, 3):
        R = make_ring(p, 1)
        G = enumerate_group(transvection_gens(R, 2))
        assert generated_by_commutators(G).order < G.order
