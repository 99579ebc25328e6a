import pytest

from koszulprop.barcobar import (
    bar_boundary,
    bar_complex,
    bar_space,
    cobar_boundary,
    cobar_complex,
    d_theta,
    partial_product,
)
from koszulprop.graphs import Cells, LinComb, parse_graph_literal, plain
from koszulprop.linalg import homology_dims, rank
from koszulprop.propcalc import TruncationParams, free_prop_component, quotient_dim

CHAIN = "u:m, v:m; in[1]->u.in[1]; in[2]->u.in[2]; u.out[1]->v.in[1]; in[3]->v.in[2]; v.out[1]->out[1]"


def test_merge_sign_follows_orientation(presets):
    P = presets("ass-operad")
    g = parse_graph_literal(CHAIN, P.signature)
    up_first = Cells(g, ((0,), (1,)), ("s", "s"))
    down_first = Cells(g, ((1,), (0,)), ("s", "s"))
    merged = LinComb.of(Cells(g, ((0, 1),), ("s",)), P.signature)
    assert d_theta(up_first, P.signature) == merged
    assert d_theta(down_first, P.signature) == -1 * merged


@pytest.mark.parametrize("name,comps", [
    ("lie-operad", [(1, 3, 2), (1, 4, 3)]),
    ("com-operad", [(1, 3, 2), (1, 4, 3)]),
    ("ass-operad", [(1, 3, 2), (1, 4, 3)]),
    ("bilie", [(2, 2, 2), (1, 4, 3), (2, 3, 3)]),
    ("infbi", [(2, 2, 2), (1, 3, 2)]),
])
def test_bar_homology_concentrated_in_top_degree(presets, name, comps):
    P = presets(name)
    for m, n, w in comps:
        B = bar_complex(P, m, n, w)
        H = homology_dims(B.complex)  # also asserts d^2 = 0
        assert not any(H[:-1])


def test_bar_dims_frozen(presets):
    # degree 1 is Lie(4) = 6, degree 3 the 15 free binary trees on 4 leaves,
    # and the Euler characteristic matches the single class in degree 3
    B = bar_complex(presets("lie-operad"), 1, 4, 3)
    assert B.complex.dims == [6, 20, 15]
    assert homology_dims(B.complex) == [0, 0, 1]
    assert B.complex.euler_characteristic() == -6 + 20 - 15 == -1


def test_top_bar_degree_is_the_free_graphs(presets):
    P = presets("bilie")
    for m, n, w in [(1, 3, 2), (2, 3, 3)]:
        assert bar_space(P, m, n, w, w).dim == free_prop_component(P, m, n, w).dim
        assert bar_space(P, m, n, w, 1).dim == quotient_dim(P, m, n, w)


def test_bar_boundary_is_block_diagonal_over_weights(presets):
    P = presets("ass-operad")
    D = bar_boundary(P, 1, 3, 2, TruncationParams(3, 6))
    assert D.shape == (bar_space(P, 1, 3, 2, 1).dim, bar_space(P, 1, 3, 2, 2).dim)
    with pytest.raises(ValueError):
        bar_boundary(P, 1, 3, 1, TruncationParams(3, 6))


def test_partial_product(presets):
    # the three composites in the Jacobi identity are nonzero, their sum is 0
    P = presets("lie-operad")
    total = LinComb()
    for c, g in P.relations[0].terms:
        prod = partial_product(P, Cells(g, ((0,), (1,)), ("s", "s")))
        assert prod
        total = total + c * prod
    assert not total
    with pytest.raises(ValueError):
        partial_product(P, plain(P.relations[0].terms[0][1]))


@pytest.mark.parametrize("name,comps", [
    ("nilpotent-algebra", [(1, 1, w) for w in range(1, 5)]),
    ("lie-operad", [(1, 3, 2), (1, 4, 3)]),
    ("ass-operad", [(1, 3, 2)]),
    ("bilie", [(2, 2, 2), (1, 3, 2), (1, 1, 2)]),
])
def test_cobar_resolves_p(presets, name, comps):
    P = presets(name)
    for m, n, w in comps:
        C = cobar_complex(P, m, n, w)
        assert C.d_squared_zero()
        H = C.homology()
        assert H[0] == quotient_dim(P, m, n, w)
        assert not any(H[1:])


def test_cobar_on_generators_only_is_the_free_prop(presets):
    P = presets("bilie")
    C = cobar_complex(P, 1, 4, 3, max_cogenerator_weight=1)
    assert C.homology()[0] == free_prop_component(P, 1, 4, 3).dim
    assert not any(C.dims[1:])


def test_cobar_boundary_in_dual_coordinates(presets):
    P = presets("lie-operad")
    C = cobar_complex(P, 1, 4, 3)
    D1 = cobar_boundary(P, 1, 4, 1, 3)
    D2 = cobar_boundary(P, 1, 4, 2, 3)
    assert D1.shape == (C.dims[0], C.dims[1]) and D2.shape == (C.dims[1], C.dims[2])
    assert (D1 @ D2).is_zero()
    assert rank(D1) == rank(C.maps[1])
