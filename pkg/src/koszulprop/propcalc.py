"""Free PROPs, quadratic quotients F(V)/(R) and the composition product.

Every space in this package is built the same way: a finite set of
canonical :class:`~koszulprop.graphs.Cells` spans a free vector space, and
the quadratic relations, inserted at every 2-vertex site inside every
block, span the subspace to divide out.  :class:`CellSpace` holds the
reduced echelon form of that subspace and converts linear combinations of
structures into coordinates on the quotient basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product

from .graphs import (
    Cells,
    Generator,
    Graph,
    GraphError,
    LinComb,
    Signature,
    block_connected,
    block_graph_acyclic,
    build_graph,
    canonical_form,
    connections,
    contract_edge_pair,
    arities_of,
    disjoint_union_vertical,
    enumerate_graphs,
    identity_graph,
    is_connected,
    plain,
    set_partitions,
    substitute,
)
from .linalg import RationalMatrix, column_space_basis, reduced_echelon


class TruncationOverflow(ValueError):
    pass


@dataclass(frozen=True)
class TruncationParams:
    max_weight: int = 3
    max_biarity: int = 6

    def __post_init__(self):
        if self.max_weight < 1 or self.max_biarity < 1:
            raise ValueError("truncation bounds must be >= 1")

    def components(self, min_biarity=2):
        """(m, n) pairs with m, n >= 1 and m + n <= max_biarity, graded-lex."""
        return [(m, n) for s in range(min_biarity, self.max_biarity + 1) for m in range(1, s) for n in [s - m]]


@dataclass(frozen=True)
class Relation:
    component: tuple
    terms: tuple  # ((Fraction, Graph), ...)


@dataclass(frozen=True)
class Presentation:
    name: str
    signature: Signature
    relations: tuple = ()

    def __post_init__(self):
        for r in self.relations:
            for _, g in r.terms:
                if (g.m, g.n) != tuple(r.component):
                    raise GraphError(f"relation term has profile ({g.m},{g.n}), expected {r.component}")
                if g.weight != 2:
                    raise GraphError(f"relation term has {g.weight} vertices; relations must be quadratic")
                if not is_connected(g):
                    raise GraphError("relation term graph is not connected")

    @property
    def generators(self):
        return list(self.signature)

    def relation_components(self):
        return sorted({tuple(r.component) for r in self.relations})

    def relation_vector(self, r: Relation) -> LinComb:
        out = LinComb()
        for c, g in r.terms:
            out.add_term(plain(g), self.signature, c)
        return out

    def relation_basis(self, m, n):
        """Basis of the S_m x S_n-closure of the relations in component (m, n)."""
        return _relation_basis(self, m, n)

    def relation_dim(self, m, n):
        return len(self.relation_basis(m, n))

    def without(self, component):
        return Presentation(self.name + "-without-" + "x".join(map(str, component)), self.signature,
                            tuple(r for r in self.relations if tuple(r.component) != tuple(component)))

    def opposite(self):
        return Presentation(self.name + "-op", self.signature.reversed(),
                            tuple(Relation((r.component[1], r.component[0]),
                                           tuple((c, reverse_graph(g)) for c, g in r.terms))
                                  for r in self.relations))


def reverse_graph(g: Graph) -> Graph:
    """Reverse the flow: outputs become inputs and vice versa."""
    conns = []
    for s, t in connections(g):
        src = ("i", t[1]) if t[0] == "o" else t
        dst = ("o", s[1]) if s[0] == "i" else s
        conns.append((src, dst))
    ar = [(b, a) for a, b in arities_of(g)]
    return build_graph(g.gens, ar, conns, g.n, g.m)


def relabel_legs(g: Graph, in_perm, out_perm) -> Graph:
    """Global input k becomes in_perm[k-1], output k becomes out_perm[k-1]."""
    def f(e):
        if e[0] == "i":
            return ("i", in_perm[e[1] - 1])
        if e[0] == "o":
            return ("o", out_perm[e[1] - 1])
        return e
    return build_graph(g.gens, arities_of(g), [(f(s), f(t)) for s, t in connections(g)], g.m, g.n)


_REL_CACHE: dict = {}


def _relation_basis(pres, m, n):
    key = (pres, m, n)
    if key in _REL_CACHE:
        return _REL_CACHE[key]
    vecs = []
    for r in pres.relations:
        if tuple(r.component) != (m, n):
            continue
        for pi in permutations(range(1, n + 1)):
            for po in permutations(range(1, m + 1)):
                v = LinComb()
                for c, g in r.terms:
                    v.add_term(plain(relabel_legs(g, pi, po)), pres.signature, c)
                if v:
                    vecs.append(v)
    keys = sorted({k for v in vecs for k in v.terms})
    idx = {k: i for i, k in enumerate(keys)}
    keep = column_space_basis([{idx[k]: c for k, c in v.terms.items()} for v in vecs])
    out = [vecs[i] for i in keep]
    _REL_CACHE[key] = out
    return out


# -- quotient spaces on cell structures -------------------------------------

def _site_signature(sig: Signature, arities):
    extra = [Generator(f"__R{a}_{b}", a, b, "regular", "regular") for a, b in sorted(arities)]
    return Signature(list(sig) + extra)


def relation_sites(c: Cells, pres: Presentation, block_index):
    """Contracted copies of ``c`` with one adjacent pair of the given block
    replaced by a relation placeholder vertex (regular symmetry)."""
    g = c.graph
    blk = c.blocks[block_index]
    comps = set(pres.relation_components())
    out = []
    bset = set(blk)
    pairs = sorted({(u, x) for u, _, x, _ in g.edges() if u in bset and x in bset})
    for u, x in pairs:
        try:
            h, ins, outs = contract_edge_pair(g, u, x)
        except GraphError:
            continue
        comp = (len(outs), len(ins))
        if comp not in comps:
            continue
        hi = max(u, x)
        t = min(u, x)
        rid = f"__R{comp[0]}_{comp[1]}"
        gens = list(h.gens)
        gens[t] = rid
        h = h._replace(gens=tuple(gens))

        def nidx(v):
            return v if v < hi else v - 1

        blocks = []
        for bi, b in enumerate(c.blocks):
            if bi == block_index:
                blocks.append(tuple(sorted({nidx(v) for v in b if v != hi})))
            else:
                blocks.append(tuple(sorted(nidx(v) for v in b)))
        out.append((Cells(h, tuple(blocks), c.kinds, c.groups), comp))
    return out


def expand_site(site: Cells, sig: Signature, rel_vec: LinComb, comp):
    """Substitute a relation vector into the placeholder vertex of ``site``."""
    g = site.graph
    rid = f"__R{comp[0]}_{comp[1]}"
    t = g.gens.index(rid)
    res = LinComb()
    in_assign = list(range(1, comp[1] + 1))
    out_assign = list(range(1, comp[0] + 1))
    for term, coef in rel_vec.terms.items():
        h, new_ids = substitute(g, t, term.graph, in_assign, out_assign)
        blocks = []
        for b in site.blocks:
            if t in b:
                blocks.append(tuple(sorted(set(b) | set(new_ids))))
            else:
                blocks.append(b)
        res.add_term(Cells(h, tuple(blocks), site.kinds, site.groups), sig, coef)
    return res


class CellSpace:
    """Span of canonical cell structures modulo relations inside blocks.

    ``pres_of_kind`` maps a block kind to the presentation whose relations
    apply inside blocks of that kind (None: no relations).
    """

    def __init__(self, keys, sig: Signature, pres_of_kind=None):
        self.sig = sig
        self.keys = sorted(keys)
        self.index = {k: i for i, k in enumerate(self.keys)}
        self.pres_of_kind = pres_of_kind or {}
        rows = self._relation_rows()
        self.red = reduced_echelon(rows)
        self.basis_cols = [i for i in range(len(self.keys)) if i not in self.red]
        self.qpos = {i: q for q, i in enumerate(self.basis_cols)}

    def _relation_rows(self):
        rows = []
        seen_sites = set()
        for c in self.keys:
            for bi, b in enumerate(c.blocks):
                pres = self.pres_of_kind.get(c.kinds[bi])
                if pres is None or len(b) < 2 or not pres.relations:
                    continue
                ssig = _site_signature(self.sig, pres.relation_components())
                for site, comp in relation_sites(c, pres, bi):
                    key, s = canonical_form(site, ssig)
                    if key in seen_sites:
                        continue
                    seen_sites.add(key)
                    for rv in pres.relation_basis(*comp):
                        vec = expand_site(key, self.sig, rv, comp)
                        row = {}
                        for k, v in vec.terms.items():
                            if k not in self.index:
                                raise GraphError("relation leaves the structure space (internal error)")
                            row[self.index[k]] = v
                        if row:
                            rows.append(row)
        return rows

    @property
    def dim(self):
        return len(self.basis_cols)

    @property
    def free_dim(self):
        return len(self.keys)

    def basis(self):
        return [self.keys[i] for i in self.basis_cols]

    def coords(self, vec: LinComb) -> dict:
        out: dict = {}
        for k, c in vec.terms.items():
            i = self.index.get(k)
            if i is None:
                raise KeyError(f"structure not in this space: {k}")
            row = self.red.get(i)
            if row is None:
                q = self.qpos[i]
                out[q] = out.get(q, 0) + c
            else:
                for j, v in row.items():
                    if j != i:
                        q = self.qpos[j]
                        out[q] = out.get(q, 0) - c * v
        return {q: v for q, v in out.items() if v}

    def projection(self) -> RationalMatrix:
        cols = [self.coords(LinComb({k: 1})) for k in self.keys]
        return RationalMatrix.from_columns(self.dim, cols)

    def element(self, coords) -> LinComb:
        return LinComb({self.keys[self.basis_cols[q]]: v for q, v in coords.items()})


def structures(sig, m, n, w, make, connected=True, through=False):
    """Canonical nonzero structures produced by ``make(graph)`` (an iterable
    of Cells) over all generator graphs of profile (m, n, w)."""
    found = set()
    for g in enumerate_graphs(sig, m, n, w, connected, through):
        for c in make(g):
            rep, s = canonical_form(c, sig)
            if s:
                found.add(rep)
    return found


def partitions_into_blocks(g: Graph, k=None, connected_blocks=True):
    for part in set_partitions(range(g.weight)):
        if k is not None and len(part) != k:
            continue
        if connected_blocks and not all(block_connected(g, b) for b in part):
            continue
        if not block_graph_acyclic(g, part):
            continue
        yield sorted(tuple(sorted(b)) for b in part)


# -- graded components ------------------------------------------------------

@dataclass
class GradedComponentBasis:
    m: int
    n: int
    weight: int
    basis: list
    quotient_projection: RationalMatrix = None
    space: CellSpace = field(default=None, repr=False)

    @property
    def dim(self):
        return len(self.basis)


_SPACES: dict = {}


def free_space(sig, m, n, w, connected=True, pres=None):
    key = ("free", sig, m, n, w, connected, pres)
    sp = _SPACES.get(key)
    if sp is None:
        keys = structures(sig, m, n, w, lambda g: [plain(g)], connected, through=not connected)
        sp = CellSpace(keys, sig, {"p": pres} if pres else None)
        _SPACES[key] = sp
    return sp


def free_prop_component(V, m, n, weight, connected_only=True) -> GradedComponentBasis:
    """Basis of F(V)(m,n) in the given weight (``V`` a Signature or Presentation)."""
    sig = V.signature if isinstance(V, Presentation) else V
    sp = free_space(sig, m, n, weight, connected_only)
    return GradedComponentBasis(m, n, weight, sp.basis(), RationalMatrix.identity(sp.dim), sp)


def quotient_component(pres: Presentation, m, n, weight, trunc=None, connected_only=True) -> GradedComponentBasis:
    if trunc is not None and weight > trunc.max_weight:
        raise TruncationOverflow(f"weight {weight} exceeds max_weight {trunc.max_weight}")
    sp = free_space(pres.signature, m, n, weight, connected_only, pres)
    return GradedComponentBasis(m, n, weight, sp.basis(), sp.projection(), sp)


def quotient_dim(pres, m, n, weight, connected_only=True):
    return quotient_component(pres, m, n, weight, connected_only=connected_only).dim


def reduce(pres: Presentation, x: LinComb, connected_only=False) -> LinComb:
    """Normal form of ``x`` in the quotient basis of its component."""
    prof = x.profile()
    if prof is None:
        return LinComb()
    m, n, w = prof
    conn = connected_only and all(is_connected(k.graph) for k in x.terms)
    sp = free_space(pres.signature, m, n, w, conn, pres)
    return sp.element(sp.coords(x))


def _graft(a: LinComb, b: LinComb, sig) -> LinComb:
    out = LinComb()
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            out.add_term(plain(disjoint_union_vertical(ka.graph, kb.graph)), sig, ca * cb)
    return out


def compose_in_quotient(pres: Presentation, a: LinComb, b: LinComb, trunc=None) -> LinComb:
    """Vertical composite a∘b (outputs of ``b`` feed inputs of ``a``),
    reduced to the quotient basis.  Horizontal placement is expressed by
    unit strands inside ``a`` or ``b`` (see :func:`graphs.juxtapose`)."""
    if not a or not b:
        return LinComb()
    wa, wb = a.profile()[2], b.profile()[2]
    if trunc is not None and wa + wb > trunc.max_weight:
        raise TruncationOverflow(f"composite weight {wa + wb} exceeds max_weight {trunc.max_weight}")
    return reduce(pres, _graft(a, b, pres.signature))


def unit(k, sig) -> LinComb:
    return LinComb.of_graph(identity_graph(k), sig)


# -- the composition product ------------------------------------------------

class IdentityBimodule:
    """The unit Ĩ: only unit strands, no generators."""

    signature = Signature([])
    relations = ()


def composition_product(P, Q, m, n, weight, trunc=None, connected=False) -> GradedComponentBasis:
    """Basis of (P ⊠ Q)(m, n) in total weight ``weight``.

    Level 1 (fed by the global inputs) holds connected Q-elements, level 2
    holds connected P-elements; edges run from level 1 to level 2 only and
    unit strands may cross either level.  ``P`` and ``Q`` are presentations
    or :class:`IdentityBimodule`.
    """
    if trunc is not None and (weight > trunc.max_weight or m + n > trunc.max_biarity):
        raise TruncationOverflow("component outside truncation")
    gens = {}
    for X in (P, Q):
        for g in X.signature:
            if g.id in gens and gens[g.id] != g:
                raise GraphError(f"generator {g.id} defined differently in the two factors")
            gens[g.id] = g
    sig = Signature(gens.values())
    top_ids = {g.id for g in P.signature}
    bot_ids = {g.id for g in Q.signature}

    def make(g):
        for part in partitions_into_blocks(g):
            where = {v: bi for bi, b in enumerate(part) for v in b}
            for levels in product(("L1", "L2"), repeat=len(part)):
                ok = all(g.gens[v] in (top_ids if levels[where[v]] == "L2" else bot_ids) for v in range(g.weight))
                if not ok:
                    continue
                if any(where[u] != where[x] and not (levels[where[u]] == "L1" and levels[where[x]] == "L2")
                       for u, _, x, _ in g.edges()):
                    continue
                yield Cells(g, tuple(part), levels)

    keys = structures(sig, m, n, weight, make, connected, through=not connected)
    pres_of = {}
    if isinstance(P, Presentation):
        pres_of["L2"] = P
    if isinstance(Q, Presentation):
        pres_of["L1"] = Q
    sp = CellSpace(keys, sig, pres_of)
    return GradedComponentBasis(m, n, weight, sp.basis(), sp.projection(), sp)
