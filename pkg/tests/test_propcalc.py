from fractions import Fraction

import pytest

from koszulprop.graphs import LinComb, juxtapose, identity_graph, parse_graph_literal, plain
from koszulprop.presets import load_preset
from koszulprop.propcalc import (
    IdentityBimodule,
    TruncationOverflow,
    TruncationParams,
    compose_in_quotient,
    composition_product,
    free_prop_component,
    quotient_component,
    quotient_dim,
    reduce,
    unit,
)

from oracles import ANTI_ASSOCIATIVE, ASSOCIATIVE, COMMUTATIVE, JACOBI, operad_quotient_dim


@pytest.mark.parametrize("name,symmetry,relation", [
    ("lie-operad", "anti", JACOBI),
    ("com-operad", "sym", COMMUTATIVE),
    ("ass-operad", "none", ASSOCIATIVE),
    ("anti-ass-operad", "none", ANTI_ASSOCIATIVE),
])
def test_operad_dims_match_tree_oracle(presets, name, symmetry, relation):
    P = presets(name)
    ours = [quotient_dim(P, 1, n, n - 1) if n > 1 else 1 for n in range(1, 5)]
    assert ours == [operad_quotient_dim(n, symmetry, relation) for n in range(1, 5)]


def test_classical_dims_frozen(presets):
    assert [quotient_dim(presets("lie-operad"), 1, n, n - 1) for n in range(2, 5)] == [1, 2, 6]
    assert [quotient_dim(presets("com-operad"), 1, n, n - 1) for n in range(2, 5)] == [1, 1, 1]
    assert [quotient_dim(presets("ass-operad"), 1, n, n - 1) for n in range(2, 5)] == [2, 6, 24]
    assert [quotient_dim(presets("nilpotent-algebra"), 1, 1, w) for w in range(1, 5)] == [1, 0, 0, 0]


def test_relation_dims(presets):
    assert presets("bilie").relation_dim(1, 3) == 1
    assert presets("bilie").relation_dim(2, 2) == 1
    assert presets("ass-operad").relation_dim(1, 3) == 6
    assert presets("infbi").relation_dim(2, 2) == 4
    assert presets("bilie-broken").relation_dim(2, 2) == 0


def test_free_dims_and_quotient(presets):
    P = presets("bilie")
    assert free_prop_component(P, 1, 3, 2).dim == 3
    assert quotient_dim(P, 1, 3, 2) == 2
    # free minus relations in weight 2 on every component
    for m, n in [(1, 3), (2, 2), (3, 1)]:
        assert quotient_dim(P, m, n, 2) == free_prop_component(P, m, n, 2).dim - P.relation_dim(m, n)


def test_bilie_has_a_genus_one_element(presets):
    # bracket after cobracket on a loop survives: nothing relates it
    assert quotient_dim(presets("bilie"), 1, 1, 2) == 1


def test_truncation_overflow(presets):
    with pytest.raises(TruncationOverflow):
        quotient_component(presets("bilie"), 1, 2, 4, TruncationParams(3, 6))


def test_unit_axiom():
    I = IdentityBimodule()
    assert [composition_product(I, I, n, n, 0).dim for n in range(1, 4)] == [1, 2, 6]


def test_product_with_unit_is_the_disconnected_prop(presets):
    P = presets("bilie")
    I = IdentityBimodule()
    for m, n, w in [(1, 2, 1), (2, 3, 1), (1, 3, 2), (2, 2, 2)]:
        left = composition_product(P, I, m, n, w).dim
        right = composition_product(I, P, m, n, w).dim
        full = quotient_dim(P, m, n, w, connected_only=False)
        assert left == right == full


def test_two_level_products_grade_by_levels(presets):
    P = presets("ass-operad")
    # connected pictures of weight 2 in (1,3): one vertex per level gives the
    # 12 free graphs (no relation acts on single vertices); both vertices on
    # the same level gives a copy of P(1,3)_(2) = 6 for each level
    conn = composition_product(P, P, 1, 3, 2, connected=True).dim
    assert conn == 12 + 6 + 6


DRINFELD = {
    "CB": "u:b, v:c; in[1]->u.in[1]; in[2]->u.in[2]; u.out[1]->v.in[1]; v.out[1]->out[1]; v.out[2]->out[2]",
}


def exchange(P, kind, a, b):
    if kind == 1:
        lit = f"u:c, v:b; in[{b}]->u.in[1]; in[{a}]->v.in[1]; u.out[1]->v.in[2]; v.out[1]->out[1]; u.out[2]->out[2]"
    else:
        lit = f"u:c, v:b; in[{b}]->u.in[1]; u.out[1]->out[1]; in[{a}]->v.in[1]; u.out[2]->v.in[2]; v.out[1]->out[2]"
    return LinComb.of_graph(parse_graph_literal(lit, P.signature), P.signature)


def test_bracket_then_cobracket_reduces_to_exchange_terms(presets):
    P = presets("bilie")
    sig = P.signature
    cb = LinComb.of_graph(parse_graph_literal(DRINFELD["CB"], sig), sig)
    rhs = exchange(P, 1, 1, 2) + exchange(P, 2, 1, 2) - exchange(P, 1, 2, 1) - exchange(P, 2, 2, 1)
    assert reduce(P, cb) == reduce(P, rhs)
    assert reduce(P, cb)
    # without the compatibility relation the composite stays independent
    B = presets("bilie-broken")
    assert reduce(B, cb) != reduce(B, rhs)


def test_compose_in_quotient_unit_and_associativity(presets):
    P = presets("ass-operad")
    sig = P.signature
    m = parse_graph_literal("u:m; in[1]->u.in[1]; in[2]->u.in[2]; u.out[1]->out[1]", sig)
    mm = LinComb.of_graph(m, sig)
    m1 = LinComb.of_graph(juxtapose(m, identity_graph(1)), sig)
    m11 = LinComb.of_graph(juxtapose(m, identity_graph(2)), sig)
    assert compose_in_quotient(P, mm, unit(2, sig)) == reduce(P, mm)
    assert compose_in_quotient(P, unit(1, sig), mm) == reduce(P, mm)
    left = compose_in_quotient(P, compose_in_quotient(P, mm, m1), m11)
    right = compose_in_quotient(P, mm, compose_in_quotient(P, m1, m11))
    assert left == right
    with pytest.raises(TruncationOverflow):
        compose_in_quotient(P, left, mm, TruncationParams(3, 6))


def test_reduce_kills_relations(presets):
    P = presets("lie-operad")
    for c, g in P.relations[0].terms:
        assert reduce(P, LinComb.of_graph(g, P.signature))
    total = LinComb()
    for c, g in P.relations[0].terms:
        total = total + Fraction(c) * LinComb.of_graph(g, P.signature)
    assert reduce(P, total) == LinComb()
