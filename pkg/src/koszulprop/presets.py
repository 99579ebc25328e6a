"""Built-in presentations, the presentation file format, and P-gebra checks.

Presentation documents are JSON::

    {"name": ..., "generators": [{"id", "outputs", "inputs",
                                  "left_symmetry", "right_symmetry"}],
     "relations": [{"component": [m, n],
                    "terms": [{"coef": "1", "graph": "<literal>"}]}]}

Gebra structures are JSON ``{"dimension": d, "maps": [{"generator": id,
"entries": [[out multi-index, in multi-index, rational], ...]}]}``.
Multi-indices are 0-based basis indices listed leg by leg.  Flattened
operation matrices have shape d^m x d^n with the first leg most
significant, so a permutation of legs acts by permuting positions in the
multi-index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import product

import numpy as np

from .graphs import (
    Generator,
    GraphError,
    Signature,
    format_graph_literal,
    is_connected,
    parse_graph_literal,
)
from .propcalc import Presentation, Relation
from .sbimodule import SBimodule, SBimoduleComponent, component_from_symmetry
from .linalg import RationalMatrix

PRESET_NAMES = ("bilie", "bilie0", "infbi", "lie-operad", "ass-operad", "com-operad", "nilpotent-algebra")
EXTRA_PRESETS = ("bilie-broken", "anti-ass-operad")


class PresentationError(ValueError):
    pass


def load_preset(name: str) -> Presentation:
    if name not in PRESET_NAMES + EXTRA_PRESETS:
        raise PresentationError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES + EXTRA_PRESETS)}")
    text = resources.files("koszulprop").joinpath("data", f"{name}.json").read_text()
    return parse_presentation(text)


def parse_presentation(document) -> Presentation:
    doc = json.loads(document) if isinstance(document, (str, bytes)) else document
    try:
        gens = [Generator(str(g["id"]), int(g["outputs"]), int(g["inputs"]),
                          g.get("left_symmetry", "trivial"), g.get("right_symmetry", "trivial"))
                for g in doc["generators"]]
    except (KeyError, TypeError) as e:
        raise PresentationError(f"malformed generator record: {e}") from None
    except GraphError as e:
        raise PresentationError(str(e)) from None
    sig = Signature(gens)
    rels = []
    for ri, r in enumerate(doc.get("relations", [])):
        comp = tuple(int(x) for x in r["component"])
        terms = []
        for ti, t in enumerate(r["terms"]):
            where = f"relation {ri + 1}, term {ti + 1}"
            try:
                g = parse_graph_literal(t["graph"], sig)
            except GraphError as e:
                raise PresentationError(f"{where}: malformed graph literal: {e}") from None
            if g.weight != 2:
                raise PresentationError(f"{where}: relation graphs must have exactly 2 vertices, got {g.weight}")
            if not is_connected(g):
                raise PresentationError(f"{where}: relation graph is not connected")
            if (g.m, g.n) != comp:
                raise PresentationError(f"{where}: arity mismatch, graph has ({g.m},{g.n}) "
                                        f"but the relation component is {comp}")
            terms.append((Fraction(str(t.get("coef", "1"))), g))
        rels.append(Relation(comp, tuple(terms)))
    return Presentation(str(doc.get("name", "presentation")), sig, tuple(rels))


def serialize_presentation(pres: Presentation) -> dict:
    return {
        "name": pres.name,
        "generators": [{"id": g.id, "outputs": g.outputs, "inputs": g.inputs,
                        "left_symmetry": g.left_symmetry, "right_symmetry": g.right_symmetry}
                       for g in pres.signature],
        "relations": [{"component": list(r.component),
                       "terms": [{"coef": str(c), "graph": format_graph_literal(g)} for c, g in r.terms]}
                      for r in pres.relations],
    }


def generator_bimodule(pres: Presentation) -> SBimodule:
    """V as an S-bimodule: symmetry shortcuts expanded into action matrices."""
    comps: dict = {}
    for g in pres.signature:
        c = component_from_symmetry(g.outputs, g.inputs, g.left_symmetry, g.right_symmetry)
        key = (g.outputs, g.inputs)
        if key in comps:
            a = comps[key]
            comps[key] = _direct_sum(a, c)
        else:
            comps[key] = c
    return SBimodule(comps)


def _direct_sum(a: SBimoduleComponent, b: SBimoduleComponent) -> SBimoduleComponent:
    from .linalg import block_diagonal
    return SBimoduleComponent(a.m, a.n, a.dim + b.dim,
                              {i: block_diagonal([a.left_action[i], b.left_action[i]]) for i in a.left_action},
                              {i: block_diagonal([a.right_action[i], b.right_action[i]]) for i in a.right_action})


# -- gebras -------------------------------------------------------------------

@dataclass
class GebraStructure:
    dimension: int
    operation_maps: dict  # generator id -> object ndarray of shape (d,)*m + (d,)*n

    @classmethod
    def from_entries(cls, dimension, maps, sig: Signature):
        ops = {}
        for gid, entries in maps.items():
            g = sig[gid]
            T = np.full((dimension,) * (g.outputs + g.inputs), Fraction(0), dtype=object)
            for out_idx, in_idx, val in entries:
                if len(out_idx) != g.outputs or len(in_idx) != g.inputs:
                    raise PresentationError(f"entry {out_idx},{in_idx} does not fit generator {gid}")
                T[tuple(out_idx) + tuple(in_idx)] = Fraction(str(val))
            ops[gid] = T
        return cls(dimension, ops)

    @classmethod
    def from_document(cls, document, sig):
        doc = json.loads(document) if isinstance(document, (str, bytes)) else document
        return cls.from_entries(int(doc["dimension"]), {m["generator"]: m["entries"] for m in doc["maps"]}, sig)

    def matrix(self, gid, sig: Signature) -> RationalMatrix:
        """Flattened d^m x d^n matrix, first leg most significant."""
        T = self.operation_maps[gid]
        m = sig[gid].outputs
        d = self.dimension
        ent: dict = {}
        for idx in zip(*np.nonzero(T != 0)):
            idx = tuple(int(i) for i in idx)
            r = sum(x * d ** (m - 1 - k) for k, x in enumerate(idx[:m]))
            nin = len(idx) - m
            c = sum(x * d ** (nin - 1 - k) for k, x in enumerate(idx[m:]))
            ent.setdefault(r, {})[c] = T[idx]
        return RationalMatrix(d ** m, d ** (len(T.shape) - m), ent)

    def change_basis(self, P, sig: Signature) -> "GebraStructure":
        """Transport along x -> P x (P invertible, object array of Fractions)."""
        Pinv = _inverse(P)
        ops = {}
        for gid, T in self.operation_maps.items():
            g = sig[gid]
            A = T
            for k in range(g.outputs):
                A = np.moveaxis(np.tensordot(P, A, axes=([1], [k])), 0, k)
            for k in range(g.inputs):
                ax = g.outputs + k
                A = np.moveaxis(np.tensordot(A, Pinv, axes=([ax], [0])), -1, ax)
            ops[gid] = A
        return GebraStructure(self.dimension, ops)


def _inverse(P):
    n = P.shape[0]
    A = [[Fraction(P[i, j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [v / piv for v in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = A[i][n + j]
    return out


def evaluate_graph(g, S: GebraStructure):
    """The map A^{⊗n} -> A^{⊗m} of a decorated graph, as an object array
    with axes (out_1..out_m, in_1..in_n)."""
    d = S.dimension
    edges = list(g.edges())
    wires = {}
    for e in edges:
        wires[("e", e[0], e[1])] = len(wires)
    res = np.full((d,) * (g.m + g.n), Fraction(0), dtype=object)
    for legs in product(range(d), repeat=g.m + g.n):
        outs_lab, ins_lab = legs[:g.m], legs[g.m:]
        total = Fraction(0)
        for inner in product(range(d), repeat=len(edges)):
            val = Fraction(1)
            for v in range(g.weight):
                oi = []
                for i, t in enumerate(g.outs[v]):
                    oi.append(outs_lab[t[1] - 1] if t[0] == "o" else inner[wires[("e", v, i)]])
                ii = []
                for j, s in enumerate(g.ins[v]):
                    ii.append(ins_lab[s[1] - 1] if s[0] == "i" else inner[wires[("e", s[1], s[2])]])
                val *= S.operation_maps[g.gens[v]][tuple(oi) + tuple(ii)]
                if not val:
                    break
            total += val
        for k, t in enumerate(g.inputs):
            if t[0] == "o" and outs_lab[t[1] - 1] != ins_lab[k]:
                total = Fraction(0)
        res[legs] = total
    return res


@dataclass
class GebraReport:
    relations: list = field(default_factory=list)
    equivariance: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r["passed"] for r in self.relations) and all(e["passed"] for e in self.equivariance)

    def lines(self):
        out = []
        for e in self.equivariance:
            out.append(f"symmetry {e['generator']}: {'ok' if e['passed'] else 'FAIL ' + str(e['witness'])}")
        for r in self.relations:
            tag = "pass" if r["passed"] else f"FAIL witness out={r['witness'][0]} in={r['witness'][1]} value={r['witness'][2]}"
            out.append(f"relation {r['index']} component {tuple(r['component'])}: {tag}")
        return out


def _first_nonzero(T, m):
    for idx in zip(*np.nonzero(T != 0)):
        idx = tuple(int(i) for i in idx)
        return (list(idx[:m]), list(idx[m:]), str(T[idx]))
    return None


def _check_symmetry(T, m, n, sym, side):
    k = m if side == "left" else n
    off = 0 if side == "left" else m
    if sym == "regular" or k < 2:
        return None
    for a in range(k - 1):
        axes = list(range(m + n))
        axes[off + a], axes[off + a + 1] = axes[off + a + 1], axes[off + a]
        swapped = np.transpose(T, axes)
        diff = swapped - T if sym == "trivial" else swapped + T
        w = _first_nonzero(diff, m)
        if w:
            return w
    return None


def gebra_check(pres: Presentation, S: GebraStructure) -> GebraReport:
    rep = GebraReport()
    for g in pres.signature:
        if g.id not in S.operation_maps:
            raise PresentationError(f"no operation map for generator {g.id!r}")
        T = S.operation_maps[g.id]
        if T.shape != (S.dimension,) * (g.outputs + g.inputs):
            raise PresentationError(f"map for {g.id} has shape {T.shape}")
        w = _check_symmetry(T, g.outputs, g.inputs, g.left_symmetry, "left") or \
            _check_symmetry(T, g.outputs, g.inputs, g.right_symmetry, "right")
        rep.equivariance.append({"generator": g.id, "passed": w is None, "witness": w})
    for i, r in enumerate(pres.relations, 1):
        m, n = r.component
        total = np.full((S.dimension,) * (m + n), Fraction(0), dtype=object)
        for c, g in r.terms:
            total = total + c * evaluate_graph(g, S)
        w = _first_nonzero(total, m)
        rep.relations.append({"index": i, "component": list(r.component), "passed": w is None, "witness": w})
    return rep
