import json
import random
from fractions import Fraction

import numpy as np
import pytest

from koszulprop.presets import (
    EXTRA_PRESETS,
    PRESET_NAMES,
    GebraStructure,
    PresentationError,
    evaluate_graph,
    gebra_check,
    generator_bimodule,
    load_preset,
    parse_presentation,
    serialize_presentation,
)


@pytest.mark.parametrize("name", PRESET_NAMES + EXTRA_PRESETS)
def test_round_trip(name):
    P = load_preset(name)
    doc = serialize_presentation(P)
    Q = parse_presentation(json.dumps(doc))
    assert Q == P
    assert serialize_presentation(Q) == doc


def test_generator_bimodules():
    assert generator_bimodule(load_preset("bilie")).dim(1, 2) == 1
    assert generator_bimodule(load_preset("infbi")).dim(1, 2) == 2
    assert generator_bimodule(load_preset("infbi")).dim(2, 1) == 2
    assert generator_bimodule(load_preset("ass-operad")).components[(1, 2)].check_axioms()


def test_unknown_preset():
    with pytest.raises(PresentationError):
        load_preset("no-such-thing")


BASE = {"name": "t", "generators": [{"id": "b", "outputs": 1, "inputs": 2,
                                     "left_symmetry": "trivial", "right_symmetry": "sign"}]}


@pytest.mark.parametrize("component,graph,msg", [
    ([1, 3], "u:b; in[1]->u.in[1]; in[2]->u.in[2]; u.out[1]->out[1]", "exactly 2 vertices"),
    ([1, 2], "u:b, v:b; in[1]->u.in[1]; in[2]->u.in[2]; u.out[1]->out[1]", "malformed"),
    ([1, 2], "u:b, v:b; in[1]->u.in[1]; in[2]->u.in[2]; u.out[1]->v.in[1]; in[3]->v.in[2]; v.out[1]->out[1]",
     "arity mismatch"),
    ([2, 4], "u:b, v:b; in[1]->u.in[1]; in[2]->u.in[2]; u.out[1]->out[1]; in[3]->v.in[1]; in[4]->v.in[2]; "
             "v.out[1]->out[2]", "not connected"),
    ([1, 3], "u:b, v:q; in[1]->u.in[1]", "malformed"),
])
def test_rejections(component, graph, msg):
    doc = dict(BASE, relations=[{"component": component, "terms": [{"coef": "1", "graph": graph}]}])
    with pytest.raises(PresentationError, match=msg):
        parse_presentation(doc)


def test_bad_symmetry_rejected():
    doc = {"generators": [{"id": "b", "outputs": 1, "inputs": 2, "left_symmetry": "weird"}]}
    with pytest.raises(PresentationError):
        parse_presentation(doc)


# 2-dimensional Lie bialgebra: [x, y] = y, delta(y) = x⊗y - y⊗x, delta(x) = 0
LIE_BI = {"b": [[[1], [0, 1], 1], [[1], [1, 0], -1]],
          "c": [[[0, 1], [1], 1], [[1, 0], [1], -1]]}
# one sign flipped: delta(y) = x⊗y + y⊗x
FLIPPED = {"b": LIE_BI["b"], "c": [[[0, 1], [1], 1], [[1, 0], [1], 1]]}


def random_invertible_2x2(rng):
    while True:
        P = np.empty((2, 2), dtype=object)
        for i in range(2):
            for j in range(2):
                P[i, j] = Fraction(rng.randint(-3, 3))
        if P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0]:
            return P


def test_lie_bialgebra_passes():
    P = load_preset("bilie")
    rep = gebra_check(P, GebraStructure.from_entries(2, LIE_BI, P.signature))
    assert rep.passed
    assert len(rep.relations) == 3


def test_flipped_sign_fails_with_witness():
    P = load_preset("bilie")
    rep = gebra_check(P, GebraStructure.from_entries(2, FLIPPED, P.signature))
    assert not rep.passed
    bad = [r for r in rep.relations if not r["passed"]] + [e for e in rep.equivariance if not e["passed"]]
    assert bad and all(b["witness"] for b in bad)
    assert any("FAIL" in line for line in rep.lines())


def test_verdicts_invariant_under_base_change():
    P = load_preset("bilie")
    rng = random.Random(2024)
    good = GebraStructure.from_entries(2, LIE_BI, P.signature)
    bad = GebraStructure.from_entries(2, FLIPPED, P.signature)
    for _ in range(5):
        A = random_invertible_2x2(rng)
        assert gebra_check(P, good.change_basis(A, P.signature)).passed
        assert not gebra_check(P, bad.change_basis(A, P.signature)).passed


def test_compatibility_relation_is_the_cocycle_condition():
    # independent formula: delta([a,b]) - ad_a·delta(b) + ad_b·delta(a), with
    # ad_u acting on both tensor factors, compared entrywise on random data
    P = load_preset("bilie")
    d, rng = 3, random.Random(5)
    B = np.full((d,) * 3, Fraction(0), dtype=object)
    C = np.full((d,) * 3, Fraction(0), dtype=object)
    for k in range(d):
        for i in range(d):
            for j in range(i + 1, d):
                v, w = Fraction(rng.randint(-2, 2)), Fraction(rng.randint(-2, 2))
                B[k, i, j], B[k, j, i] = v, -v
                C[i, j, k], C[j, i, k] = w, -w
    S = GebraStructure(d, {"b": B, "c": C})
    rel = next(r for r in P.relations if r.component == (2, 2))
    T = sum(c * evaluate_graph(g, S) for c, g in rel.terms)
    for i in range(d):
        for j in range(d):
            for a in range(d):
                for b in range(d):
                    s = sum(B[k, a, b] * C[i, j, k] for k in range(d))
                    for u, v, sg in ((a, b, -1), (b, a, 1)):
                        s += sg * sum(C[p, j, v] * B[i, u, p] + C[i, p, v] * B[j, u, p] for p in range(d))
                    assert T[i, j, a, b] == s


def test_structure_document_and_errors():
    P = load_preset("bilie")
    doc = {"dimension": 2, "maps": [{"generator": k, "entries": v} for k, v in LIE_BI.items()]}
    S = GebraStructure.from_document(json.dumps(doc), P.signature)
    assert gebra_check(P, S).passed
    M = S.matrix("b", P.signature)
    assert M.shape == (2, 4) and M[1, 1] == 1 and M[1, 2] == -1
    with pytest.raises(PresentationError):
        gebra_check(P, GebraStructure(2, {"b": S.operation_maps["b"]}))
    with pytest.raises(PresentationError):
        GebraStructure.from_entries(2, {"b": [[[0, 0], [0, 1], 1]]}, P.signature)
