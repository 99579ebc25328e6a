"""Bar and cobar constructions on connected graphs.

Bar construction B(P): a basis element of weight w and degree k is a
generator graph whose vertices are partitioned into k connected blocks
(contracting them leaves an acyclic graph); each block carries one
suspended element of the augmentation ideal, namely the class of its
subgraph in P.  The orientation is the order of the blocks.  The
differential contracts an edge between two blocks and composes their
decorations (the partial product), so it preserves weight and lowers the
degree by one.

Sign rule: for blocks ``s -> t`` (``s`` upstream) the term is
``sign(order -> [s, t, rest]) * [s∪t, rest]``.

Cobar construction B^c(C) for C = P^¡: the vertices of a graph are grouped
into desuspended cogenerators (groups), each group holding a Koszul-dual
element, i.e. a combination of singleton-block graphs killed by the bar
differential inside the group.  The differential splits one group into an
upstream and a downstream part joined by at least one edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from .graphs import (
    Cells,
    LinComb,
    block_connected,
    block_graph_acyclic,
    canonical_form,
    plain,
    vertex_components,
)
from .linalg import ChainComplex, RationalMatrix, block_diagonal, rank, reduced_echelon
from .propcalc import CellSpace, Presentation, TruncationParams, partitions_into_blocks, reduce, structures
from .sbimodule import perm_sign


def matrix_of(op, src: CellSpace, dst: CellSpace) -> RationalMatrix:
    """Matrix of the map induced by ``op`` (Cells -> LinComb) on quotients."""
    cols = [dst.coords(op(key)) for key in src.basis()]
    return RationalMatrix.from_columns(dst.dim, cols)


def kernel_with_pivots(M: RationalMatrix):
    """Kernel basis vectors (dicts) and, for each, the free column where it is 1."""
    red = reduced_echelon(M.entries.values())
    free = [c for c in range(M.cols) if c not in red]
    vecs = []
    for f in free:
        v = {f: 1}
        for p, row in red.items():
            a = row.get(f)
            if a:
                v[p] = -a
        vecs.append(v)
    return vecs, free


def block_edges(c: Cells):
    where = c.block_of()
    return {(where[u], where[x]) for u, _, x, _ in c.graph.edges() if where[u] != where[x]}


def odd_positions(c: Cells, blocks):
    from .graphs import ODD_KINDS
    return [b for b in blocks if c.kinds[b] in ODD_KINDS]


def merge_blocks(c: Cells, s, t, kind=None):
    """[s∪t] + remaining blocks in order, with the Koszul sign of moving the
    odd symbols of s and t to the front (s first)."""
    from .graphs import ODD_KINDS
    order = list(range(len(c.blocks)))
    odd_now = [b for b in order if c.kinds[b] in ODD_KINDS]
    rest = [b for b in order if b not in (s, t)]
    front = [b for b in (s, t) if c.kinds[b] in ODD_KINDS]
    target = front + [b for b in rest if c.kinds[b] in ODD_KINDS]
    pos = {b: i for i, b in enumerate(target)}
    sign = perm_sign([pos[b] for b in odd_now])
    merged = tuple(sorted(c.blocks[s] + c.blocks[t]))
    blocks = (merged,) + tuple(c.blocks[b] for b in rest)
    kinds = (kind or c.kinds[s],) + tuple(c.kinds[b] for b in rest)
    return Cells(c.graph, blocks, kinds, None), sign


def bar_contractions(c: Cells, among=None):
    """Pairs (s, t) of blocks joined by an edge s -> t whose contraction keeps
    the block graph acyclic; ``among`` restricts the eligible blocks."""
    edges = block_edges(c)
    out = []
    for s, t in sorted(edges):
        if among is not None and (s not in among or t not in among):
            continue
        merged = [b for i, b in enumerate(c.blocks) if i not in (s, t)] + [c.blocks[s] + c.blocks[t]]
        if block_graph_acyclic(c.graph, merged):
            out.append((s, t))
    return out


def d_theta(c: Cells, sig, among=None) -> LinComb:
    out = LinComb()
    for s, t in bar_contractions(c, among):
        new, sign = merge_blocks(c, s, t)
        out.add_term(new, sig, sign)
    return out


# -- bar complex ---------------------------------------------------------------

@lru_cache(maxsize=None)
def bar_space(pres: Presentation, m, n, w, k, pair_only=False) -> CellSpace:
    """Degree-k weight-w component of B(P)(m, n).  With ``pair_only`` only
    structures with singleton blocks plus at most one 2-vertex block are
    kept (enough as the target of the top-degree boundary)."""
    sig = pres.signature

    def make(g):
        for part in partitions_into_blocks(g, k):
            if pair_only and sorted(map(len, part))[-1:] not in ([1], [2], []):
                continue
            if pair_only and sum(len(b) > 1 for b in part) > 1:
                continue
            yield Cells(g, tuple(part), ("s",) * len(part))

    keys = structures(sig, m, n, w, make)
    return CellSpace(keys, sig, {"s": pres})


def partial_product(pres: Presentation, picture: Cells) -> LinComb:
    """Composite in P of the two blocks of ``picture`` (a connected graph
    split into an upstream and a downstream block), reduced to the quotient
    basis of the merged component."""
    if len(picture.blocks) != 2:
        raise ValueError("a partial product needs exactly two blocks")
    if not block_connected(picture.graph, range(picture.graph.weight)):
        raise ValueError("the two blocks are not joined by an edge")
    return reduce(pres, LinComb.of(plain(picture.graph), pres.signature), connected_only=True)


def bar_boundary_weight(pres, m, n, k, w) -> RationalMatrix:
    src = bar_space(pres, m, n, w, k)
    dst = bar_space(pres, m, n, w, k - 1)
    return matrix_of(lambda c: d_theta(c, pres.signature), src, dst)


def bar_boundary(pres: Presentation, m, n, k, trunc: TruncationParams) -> RationalMatrix:
    """d_theta from degree k to k-1 on B(P)(m, n), all weights <= max_weight
    (block diagonal by weight, weights ascending)."""
    if k < 2:
        raise ValueError("bar boundary is defined from degree 2 on")
    blocks = [bar_boundary_weight(pres, m, n, k, w) for w in range(k, trunc.max_weight + 1)]
    return block_diagonal(blocks) if blocks else RationalMatrix.zeros(0, 0)


@dataclass
class BarComplex:
    m: int
    n: int
    weight: int
    spaces: list = field(default_factory=list)   # degree 1..weight
    complex: ChainComplex = None


def bar_complex(pres: Presentation, m, n, w) -> BarComplex:
    spaces = [bar_space(pres, m, n, w, k) for k in range(1, w + 1)]
    maps = [bar_boundary_weight(pres, m, n, k, w) for k in range(2, w + 1)]
    return BarComplex(m, n, w, spaces, ChainComplex.from_maps([s.dim for s in spaces], maps, lowest=1))


# -- cobar complex -------------------------------------------------------------

def _groups_cells(g, groups, pair=None):
    """Cells with singleton blocks (or one 2-vertex block ``pair``) grouped."""
    blocks, grp = [], []
    for G in groups:
        idx = []
        done = set()
        for v in G:
            if v in done:
                continue
            if pair and v in pair:
                blocks.append(tuple(sorted(pair)))
                done.update(pair)
            else:
                blocks.append((v,))
                done.add(v)
            idx.append(len(blocks) - 1)
        grp.append(tuple(idx))
    return Cells(g, tuple(blocks), ("s",) * len(blocks), tuple(grp))


@lru_cache(maxsize=None)
def cobar_free_space(pres, m, n, w, ngroups, with_pair=False, max_group=None) -> CellSpace:
    sig = pres.signature

    def make(g):
        for part in partitions_into_blocks(g, ngroups):
            if max_group is not None and max(map(len, part)) > max_group:
                continue
            if not with_pair:
                yield _groups_cells(g, part)
                continue
            for G in part:
                for u, x in combinations(G, 2):
                    if not block_connected(g, (u, x)):
                        continue
                    sub = [(y,) for y in G if y not in (u, x)] + [(u, x)]
                    if not block_graph_acyclic(g, sub + [b for b in part if b is not G]):
                        continue
                    yield _groups_cells(g, part, pair=(u, x))

    keys = structures(sig, m, n, w, make)
    return CellSpace(keys, sig, {"s": pres} if with_pair else None)


def d_inside_groups(c: Cells, sig) -> LinComb:
    """Bar differential applied inside every group (kernel condition)."""
    out = LinComb()
    for gi, G in enumerate(c.groups):
        members = set(G)
        for s, t in bar_contractions(c, members):
            # move s, t right after the group symbol: an even shift past the
            # preceding symbols, so only the order inside the group counts
            inner = list(G)
            target = [s, t] + [b for b in inner if b not in (s, t)]
            pos = {b: i for i, b in enumerate(target)}
            sign = perm_sign([pos[b] for b in inner])
            merged = tuple(sorted(c.blocks[s] + c.blocks[t]))
            blocks, kinds, groups = [], [], []
            for gj, H in enumerate(c.groups):
                idx = []
                seq = ([s] + [b for b in H if b not in (s, t)]) if gj == gi else list(H)
                for b in seq:
                    if b == s:
                        blocks.append(merged)
                    else:
                        blocks.append(c.blocks[b])
                    kinds.append("s")
                    idx.append(len(blocks) - 1)
                groups.append(tuple(idx))
            out.add_term(Cells(c.graph, tuple(blocks), tuple(kinds), tuple(groups)), sig, sign)
    return out


def group_splittings(c: Cells, gi):
    """Ways to split group gi into (upstream, downstream) block sets."""
    G = list(c.groups[gi])
    edges = block_edges(c)
    out = []
    for r in range(1, len(G)):
        for S1 in combinations(G, r):
            S1 = set(S1)
            S2 = set(G) - S1
            inner = [(a, b) for a, b in edges if a in G and b in G]
            if any(a in S2 and b in S1 for a, b in inner):
                continue
            if not any(a in S1 and b in S2 for a, b in inner):
                continue
            v1 = [v for b in S1 for v in c.blocks[b]]
            v2 = [v for b in S2 for v in c.blocks[b]]
            if len(vertex_components(c.graph, v1)) != 1 or len(vertex_components(c.graph, v2)) != 1:
                continue
            out.append((S1, S2))
    return out


def d_cobar(c: Cells, sig) -> LinComb:
    out = LinComb()
    before = 0  # parity of the chunks preceding the current group
    for gi, G in enumerate(c.groups):
        for S1, S2 in group_splittings(c, gi):
            b1 = [b for b in G if b in S1]
            b2 = [b for b in G if b in S2]
            pos = {b: i for i, b in enumerate(b1 + b2)}
            eps = perm_sign([pos[b] for b in G])
            sign = -eps * (-1) ** len(b1) * (-1) ** before
            blocks, groups = [], []
            for gj, H in enumerate(c.groups):
                parts = [b1, b2] if gj == gi else [list(H)]
                for part in parts:
                    idx = []
                    for b in part:
                        blocks.append(c.blocks[b])
                        idx.append(len(blocks) - 1)
                    groups.append(tuple(idx))
            out.add_term(Cells(c.graph, tuple(blocks), ("s",) * len(blocks), tuple(groups)), sig, sign)
        before += len(G) + 1
    return out


@dataclass
class CobarComplex:
    m: int
    n: int
    weight: int
    dims: list          # dims[d] for cobar degree d = 0..weight-1
    kernels: list       # kernel vectors (free coordinates) per degree
    maps: list          # maps[d]: degree d -> d-1 in free coordinates of the target, d >= 1
    spaces: list

    def homology(self):
        ranks = [0] + [rank(M) for M in self.maps[1:]] + [0]
        return [self.dims[d] - ranks[d] - ranks[d + 1] for d in range(len(self.dims))]

    def d_squared_zero(self):
        for d in range(2, len(self.dims)):
            A = self.maps[d - 1]
            B = self.maps[d]
            # maps[d] lands in free coordinates of degree d-1; re-apply the
            # free-level differential there
            comp = self._free_maps[d - 1] @ B
            if not comp.is_zero():
                return False
        return True


def _free_vec_matrix(vecs, nrows):
    return RationalMatrix.from_columns(nrows, vecs)


def cobar_complex(pres: Presentation, m, n, w, max_cogenerator_weight=None) -> CobarComplex:
    """B^c(P^¡)(m, n) in weight w.  ``max_cogenerator_weight`` truncates the
    coPROP (1: only ΣV, trivial coproduct)."""
    sig = pres.signature
    spaces, kernels, dims = [], [], []
    free_maps = [None]
    maps = [None]
    for d in range(0, w):
        ng = w - d
        sp = cobar_free_space(pres, m, n, w, ng, False, max_cogenerator_weight)
        tgt = cobar_free_space(pres, m, n, w, ng, True, max_cogenerator_weight)
        D = matrix_of(lambda c: d_inside_groups(c, sig), sp, tgt)
        vecs, _ = kernel_with_pivots(D)
        spaces.append(sp)
        kernels.append(vecs)
        dims.append(len(vecs))
        if d >= 1:
            F = matrix_of(lambda c: d_cobar(c, sig), sp, spaces[d - 1])
            free_maps.append(F)
            maps.append(F @ _free_vec_matrix(vecs, sp.dim))
    cx = CobarComplex(m, n, w, dims, kernels, maps, spaces)
    cx._free_maps = free_maps
    return cx


def cobar_boundary(pres: Presentation, m, n, degree, w, max_cogenerator_weight=None) -> RationalMatrix:
    """Cobar differential from degree ``degree`` to ``degree - 1`` in the
    Koszul-dual bases of both sides."""
    cx = cobar_complex(pres, m, n, w, max_cogenerator_weight)
    if degree < 1 or degree >= len(cx.dims):
        return RationalMatrix.zeros(cx.dims[degree - 1] if 0 < degree <= len(cx.dims) else 0,
                                    cx.dims[degree] if 0 <= degree < len(cx.dims) else 0)
    img = cx.maps[degree]
    # coordinates of vectors in span(kernels[degree-1]): read them off the
    # free columns, where the kernel basis is the identity
    _, free = kernel_with_pivots(matrix_of(lambda c: d_inside_groups(c, pres.signature),
                                           cx.spaces[degree - 1],
                                           cobar_free_space(pres, m, n, w, w - degree + 1, True,
                                                            max_cogenerator_weight)))
    fpos = {f: i for i, f in enumerate(free)}
    cols = []
    for col in img.columns():
        cols.append({fpos[f]: v for f, v in col.items() if f in fpos})
    return RationalMatrix.from_columns(len(free), cols)
