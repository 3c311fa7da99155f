"""Nominal layer: swapping, support, freshness, permutations, alpha."""

import random

import pytest

from gen import S, name_pool, random_tree
from psiwb.names import (
    Name, Permutation, Sort, alpha_canonical, alpha_equal, fresh_name,
    fresh_names, is_fresh, supp, sw,
)
from psiwb.terms import App, Func, Lam, TupleTerm

CHAN = Sort("chan")
EXP = Sort("exp")

a, b, c = Name("a", 0, CHAN), Name("b", 0, CHAN), Name("c", 0, CHAN)
x, y = Name("x", 0, EXP), Name("y", 0, EXP)


def test_name_identity_includes_sort():
    assert Name("a", 0, CHAN) != Name("a", 0, EXP)
    assert Name("a", 0, CHAN) == a


def test_swap_on_names():
    assert sw(a, b, a) == b
    assert sw(a, b, b) == a
    assert sw(a, b, c) == c


def test_swap_structured():
    t = Func("f", (a, TupleTerm((b, c))))
    assert sw(a, b, t) == Func("f", (b, TupleTerm((a, c))))


def test_swap_is_involutive_on_random_trees():
    rng = random.Random(7)
    names = name_pool(5)
    for _ in range(200):
        t = random_tree(rng, names)
        p, q = rng.choice(names), rng.choice(names)
        assert sw(p, q, sw(p, q, t)) == t


def test_support_equivariant_under_swap():
    rng = random.Random(11)
    names = name_pool(5)
    for _ in range(200):
        t = random_tree(rng, names)
        p, q = rng.choice(names), rng.choice(names)
        assert supp(sw(p, q, t)) == frozenset(sw(p, q, n) for n in supp(t))


def test_lam_support_excludes_binder():
    assert supp(Lam(x, App(x, y))) == frozenset({y})
    assert supp(Lam(x, y)) == frozenset({y})


def test_fresh_name_lowest_unused_index():
    assert fresh_name(CHAN, ()) == Name("a", 0, CHAN)
    assert fresh_name(CHAN, (a,)) == Name("a", 1, CHAN)
    assert fresh_name(CHAN, (a, Name("a", 1, CHAN))) == Name("a", 2, CHAN)
    # other-sort and other-base names do not block an index
    assert fresh_name(CHAN, (x, Name("b", 0, CHAN))) == Name("a", 0, CHAN)


def test_fresh_name_avoid_accepts_values():
    t = Func("f", (a, Name("a", 1, CHAN)))
    assert fresh_name(CHAN, t) == Name("a", 2, CHAN)


def test_fresh_names_are_distinct():
    got = fresh_names([CHAN, CHAN, EXP], (a,), base="a")
    assert len(set(got)) == 3
    assert got[0] == Name("a", 1, CHAN)
    assert got[1] == Name("a", 2, CHAN)
    assert got[2] == Name("a", 0, EXP)


def test_is_fresh():
    assert is_fresh(a, Func("f", (b,)))
    assert not is_fresh(a, Func("f", (a,)))
    assert is_fresh((a, b), (c,))


def test_permutation_from_mapping_cycles():
    perm = Permutation.from_mapping({a: b, b: c, c: a})
    assert perm.of(a) == b
    assert perm.of(b) == c
    assert perm.of(c) == a
    inv = perm.inverse()
    assert inv.of(b) == a
    assert inv.of(perm.of(a)) == a


def test_permutation_rejects_non_bijection():
    with pytest.raises(ValueError):
        Permutation.from_mapping({a: b})


def test_permutation_compose_order():
    swap_ab = Permutation.from_mapping({a: b, b: a})
    swap_bc = Permutation.from_mapping({b: c, c: b})
    both = swap_bc.compose(swap_ab)  # ab first
    assert both.of(a) == c


def test_alpha_equal_lambdas():
    assert alpha_equal(Lam(x, x), Lam(y, y))
    assert alpha_equal(Lam(x, App(x, x)), Lam(y, App(y, y)))
    assert not alpha_equal(Lam(x, y), Lam(y, x))  # free name differs
    assert not alpha_equal(Lam(x, x), Lam(x, y))


def test_alpha_equal_nested():
    x2 = Name("x", 2, EXP)
    assert alpha_equal(Lam(x, Lam(y, App(x, y))), Lam(y, Lam(x2, App(y, x2))))
    assert not alpha_equal(Lam(x, Lam(y, App(x, y))), Lam(x, Lam(y, App(y, x))))


def test_alpha_canonical_stable_under_renaming():
    rng = random.Random(3)
    names = name_pool(4, base="m")
    for _ in range(200):
        t = random_tree(rng, names)
        # swapping two names NOT free in t preserves the canonical form
        fresh1 = Name("z", 90, S)
        fresh2 = Name("z", 91, S)
        assert alpha_canonical(t) == alpha_canonical(sw(fresh1, fresh2, t))


def test_alpha_equal_is_equivariant():
    rng = random.Random(13)
    names = name_pool(4)
    for _ in range(100):
        t = random_tree(rng, names)
        u = random_tree(rng, names)
        p, q = rng.choice(names), rng.choice(names)
        assert alpha_equal(t, u) == alpha_equal(sw(p, q, t), sw(p, q, u))
