from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from koszulprop.sbimodule import (
    Permutation,
    SBimodule,
    act,
    all_perms,
    component_from_symmetry,
    compose_perms,
    identity_bimodule,
    perm_sign,
    regular_component,
)


def perm_of(n):
    return st.permutations(list(range(1, n + 1))).map(lambda p: Permutation(tuple(p)))


# S_3 multiplication table written out by hand: (a∘b)(i) = a(b(i))
S3 = {
    "e": (1, 2, 3), "a": (2, 1, 3), "b": (1, 3, 2),
    "c": (3, 2, 1), "r": (2, 3, 1), "q": (3, 1, 2),
}
CAYLEY = {
    ("a", "b"): "r", ("b", "a"): "q", ("r", "r"): "q", ("r", "q"): "e",
    ("a", "a"): "e", ("a", "r"): "b", ("r", "a"): "c", ("c", "c"): "e",
}


def test_compose_matches_cayley_table():
    for (x, y), z in CAYLEY.items():
        assert compose_perms(Permutation(S3[x]), Permutation(S3[y])).images == S3[z]


def test_sign_by_inversion_count():
    for p in permutations(range(1, 5)):
        inv = sum(1 for i in range(4) for j in range(i + 1, 4) if p[i] > p[j])
        assert Permutation(p).sign() == (-1) ** inv
        assert perm_sign(p) == (-1) ** inv


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(perm_of(n), perm_of(n))))
def test_sign_is_multiplicative(pair):
    a, b = pair
    assert compose_perms(a, b).sign() == a.sign() * b.sign()
    assert compose_perms(a, a.inverse()).is_identity()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(perm_of))
def test_reduced_word_rebuilds_permutation(p):
    word = p.reduced_word()
    q = Permutation.identity(p.size)
    for i in word:
        q = compose_perms(q, Permutation.transposition(p.size, i))
    assert q == p
    assert (-1) ** len(word) == p.sign()


def test_invalid_permutation():
    with pytest.raises(ValueError):
        Permutation((1, 1, 2))
    with pytest.raises(ValueError):
        compose_perms(Permutation.identity(2), Permutation.identity(3))


@pytest.mark.parametrize("left,right,dim", [
    ("trivial", "trivial", 1), ("sign", "trivial", 1), ("trivial", "sign", 1),
    ("regular", "trivial", 6), ("trivial", "regular", 2), ("regular", "regular", 12),
])
def test_symmetry_components_are_bimodules(left, right, dim):
    c = component_from_symmetry(3, 2, left, right)
    assert c.dim == dim
    assert c.check_axioms()


def test_sign_representation_acts_by_sign():
    c = component_from_symmetry(3, 1, "sign", "trivial")
    for p in all_perms(3):
        assert act(c, p, [1], Permutation.identity(1)) == {0: p.sign()}


def test_action_is_a_homomorphism_on_both_sides():
    c = component_from_symmetry(3, 3, "regular", "regular")
    for a in all_perms(3):
        for b in all_perms(3):
            L = c.left_matrix(compose_perms(a, b))
            assert L == c.left_matrix(a) @ c.left_matrix(b)
            R = c.right_matrix(compose_perms(a, b))
            assert R == c.right_matrix(b) @ c.right_matrix(a)


def test_regular_representation_character():
    # the regular character is |G| at the identity and 0 elsewhere
    c = regular_component(3)
    for p in all_perms(3):
        M = c.left_matrix(p)
        trace = sum(M[i, i] for i in range(M.rows))
        assert trace == (6 if p.is_identity() else 0)


def test_identity_bimodule_dims():
    I = identity_bimodule(4)
    assert [I.dim(n, n) for n in range(1, 5)] == [1, 2, 6, 24]
    assert I.dim(1, 2) == 0


def test_act_rejects_wrong_arity():
    c = component_from_symmetry(2, 1)
    with pytest.raises(ValueError):
        act(c, Permutation.identity(3), [1], Permutation.identity(1))
    with pytest.raises(ValueError):
        SBimodule({(0, 1): c})
