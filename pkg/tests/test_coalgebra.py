"""Wedge monomials, Koszul signs, and the reduced coproduct."""
import random
from fractions import Fraction

import pytest

import cumalg as cm

from conftest import random_selement


def bubble_sign(degrees, perm):
    """Koszul sign by explicit adjacent transpositions (independent oracle)."""
    order = sorted(range(len(perm)), key=lambda i: perm[i])
    arrangement = list(range(len(perm)))
    sign = 1
    for pos, want in enumerate(order):
        j = arrangement.index(want)
        while j > pos:
            left, right = arrangement[j - 1], arrangement[j]
            if degrees[left] % 2 and degrees[right] % 2:
                sign = -sign
            arrangement[j - 1], arrangement[j] = right, left
            j -= 1
    return sign


def test_koszul_sign_basics():
    assert cm.koszul_sign((1, 1), (1, 0)) == -1
    assert cm.koszul_sign((0, 0), (1, 0)) == 1
    assert cm.koszul_sign((1, 0, 1), (2, 1, 0)) == -1
    assert cm.koszul_sign((1, 1, 1), (0, 1, 2)) == 1


@pytest.mark.parametrize("seed", range(10))
def test_koszul_sign_matches_transposition_count(seed):
    rng = random.Random(seed)
    for _ in range(25):
        n = rng.randint(2, 5)
        degrees = tuple(rng.randint(-2, 3) for _ in range(n))
        perm = list(range(n))
        rng.shuffle(perm)
        assert cm.koszul_sign(degrees, tuple(perm)) == bubble_sign(degrees, perm)


def test_koszul_sign_is_multiplicative():
    rng = random.Random(3)
    degrees = (1, 0, 1, 1)
    for _ in range(30):
        p = list(range(4))
        q = list(range(4))
        rng.shuffle(p)
        rng.shuffle(q)
        composed = tuple(q[p[i]] for i in range(4))
        after_p = tuple(degrees[i] for i in sorted(range(4), key=lambda i: p[i]))
        assert cm.koszul_sign(degrees, composed) == cm.koszul_sign(
            degrees, tuple(p)
        ) * cm.koszul_sign(after_p, tuple(q))


def test_normalize_sorts_with_sign(e2):
    ab = cm.normalize_monomial(e2, (1, 0))
    assert ab == (cm.monomial(e2, (0, 1)), -1)
    ag = cm.normalize_monomial(e2, (2, 0))
    assert ag == (cm.monomial(e2, (0, 2)), 1)


def test_normalize_kills_odd_repeats(e2):
    assert cm.normalize_monomial(e2, (0, 0)) is None
    assert cm.normalize_monomial(e2, (1, 2, 1)) is None
    assert cm.normalize_monomial(e2, (2, 2)) is not None


def test_normalize_respects_arbitrary_permutations(e2):
    """Reordering input factors must only ever change the Koszul sign."""
    import itertools

    for mono in cm.monomials_up_to(e2, 4):
        base = cm.normalize_monomial(e2, mono.indices)
        assert base == (mono, 1)
        for perm in itertools.permutations(range(mono.weight)):
            shuffled = tuple(mono.indices[i] for i in perm)
            got = cm.normalize_monomial(e2, shuffled)
            assert got is not None
            # shuffled slot i holds the factor whose sorted slot is perm[i]
            degrees = tuple(mono.factor_degrees[i] for i in perm)
            expected_sign = cm.koszul_sign(degrees, perm)
            assert got == (mono, expected_sign)


def test_canonical_monomial_counts(e2, p8):
    # even generators repeat freely, odd ones cannot
    assert len(cm.canonical_monomials(p8, 2)) == 36
    assert [m.names(e2) for m in cm.canonical_monomials(e2, 2)] == [
        ["a", "b"], ["a", "g"], ["b", "g"], ["g", "g"]
    ]


def test_monomial_degree_and_weight(e2):
    m = cm.monomial(e2, (0, 1, 2))
    assert m.weight == 3
    assert m.degree == 4


def test_wedge_is_graded_commutative(e2):
    cap = 5
    for u in cm.monomials_up_to(e2, 2):
        for v in cm.monomials_up_to(e2, 2):
            x = cm.SElement.from_monomial(e2, cap, u)
            y = cm.SElement.from_monomial(e2, cap, v)
            sign = (-1) ** (u.degree * v.degree)
            assert cm.wedge(x, y) == sign * cm.wedge(y, x)


def test_wedge_of_odd_generator_with_itself_vanishes(e2):
    a = cm.SElement.from_vector(e2.generator(0), 4)
    assert cm.wedge(a, a).is_zero()


def test_wedge_past_the_cap_flags_overflow(e2):
    g = cm.SElement.from_vector(e2.generator(2), 2)
    gg = cm.wedge(g, g)
    assert not gg.is_zero()
    top = cm.wedge(gg, g)
    assert top.is_zero()
    assert top.overflow


def test_coproduct_of_weight_one_vanishes(e2):
    for mono in cm.canonical_monomials(e2, 1):
        assert cm.coproduct(mono).is_zero()


def test_coproduct_of_a_wedge_pair(e2):
    a_b = cm.monomial(e2, (0, 1))
    pairs = dict(cm.coproduct(a_b).items())
    a, b = cm.monomial(e2, (0,)), cm.monomial(e2, (1,))
    assert pairs == {(a, b): Fraction(1), (b, a): Fraction(-1)}


def test_coproduct_term_count_on_even_triple(p8):
    w = cm.monomial(p8, (0, 1, 2))
    assert len(cm.coproduct(w).items()) == 6


def test_coproduct_is_cocommutative(e2, p8):
    for basis in (e2, p8):
        for mono in cm.monomials_up_to(basis, 4):
            dw = cm.coproduct(mono)
            assert dw.signed_flip() == dw


def test_coproduct_is_coassociative(e2):
    """Both nested expansions must agree with the three-fold splitting."""
    for mono in cm.monomials_up_to(e2, 5):
        if mono.weight < 3:
            continue
        left, right = {}, {}
        for (l, r), c in cm.coproduct(mono).items():
            for (l1, l2), c1 in cm.coproduct(l).items():
                key = (l1, l2, r)
                left[key] = left.get(key, 0) + c * c1
            for (r1, r2), c1 in cm.coproduct(r).items():
                key = (l, r1, r2)
                right[key] = right.get(key, 0) + c * c1
        direct = {parts: c for c, parts in cm.iterated_coproduct(mono, 3)}
        left = {k: v for k, v in left.items() if v}
        right = {k: v for k, v in right.items() if v}
        assert left == right == direct


def test_iterated_coproduct_edge_orders(p8):
    w = cm.monomial(p8, (0, 1, 2))
    assert cm.iterated_coproduct(w, 1) == [(Fraction(1), (w,))]
    parts = cm.iterated_coproduct(w, 3)
    assert len(parts) == 6
    assert all(c == 1 for c, _ in parts)
    with pytest.raises(cm.ValidationError):
        cm.iterated_coproduct(w, 4)


def test_iterated_coproduct_signs_on_odd_factors(e2):
    w = cm.monomial(e2, (0, 1))
    a, b = cm.monomial(e2, (0,)), cm.monomial(e2, (1,))
    assert cm.iterated_coproduct(w, 2) == [
        (Fraction(1), (a, b)), (Fraction(-1), (b, a))
    ]


def test_coproduct_respects_weight_filtration(p8):
    for mono in cm.monomials_up_to(p8, 4):
        for (l, r), _ in cm.coproduct(mono).items():
            assert l.weight + r.weight == mono.weight
            assert l.weight >= 1 and r.weight >= 1


def test_selement_round_trip_and_order(e2):
    rng = random.Random(11)
    v = random_selement(rng, e2, 4, density=0.5)
    doc = v.to_doc()
    names = [tuple(t["monomial"]) for t in doc]
    assert names == sorted(names, key=lambda n: (len(n), n))
    assert cm.SElement.from_doc(e2, 4, doc) == v


def test_selement_weight_projection(e2):
    rng = random.Random(5)
    v = random_selement(rng, e2, 4, density=0.6)
    recombined = v.weight_project(1)
    for w in range(2, 5):
        recombined = recombined + v.weight_project(w)
    assert recombined == v


def test_selement_rejects_terms_past_cap(e2):
    g = cm.monomial(e2, (2, 2))
    with pytest.raises(cm.ValidationError):
        cm.SElement(e2, 1, {g: Fraction(1)})


def test_set_partition_counts():
    # Bell numbers
    assert [len(cm.set_partitions(n)) for n in range(1, 6)] == [1, 2, 5, 15, 52]
    for part in cm.set_partitions(4):
        seen = sorted(i for block in part for i in block)
        assert seen == [0, 1, 2, 3]
        assert list(part) == sorted(part, key=min)
        assert all(list(b) == sorted(b) for b in part)
