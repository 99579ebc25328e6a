"""Decorated directed flow graphs.

A :class:`Graph` has vertices decorated by generator ids.  Every vertex
port is used exactly once: either by an internal edge or by a global leg.
Endpoints are tuples

* ``('v', x, j)``  port ``j`` (0-based) of vertex ``x``,
* ``('i', k)``     global input ``k`` (1-based),
* ``('o', k)``     global output ``k`` (1-based),

so ``outs[v][i]`` is where output port ``i`` of ``v`` goes, ``ins[v][j]``
where input port ``j`` comes from, and ``inputs[k-1]`` / ``outputs[k-1]``
describe the legs.  A global input wired straight to a global output is a
unit strand.

A :class:`Cells` value adds a partition of the vertices into ordered
*blocks* (each decorated by one element of a PROP, or by a suspended
element when the block kind is odd) and, optionally, an ordered grouping of
blocks into *groups* (the vertices of a cobar construction, always odd).
The order of odd symbols is the orientation; :func:`canonical_form`
returns the canonical representative of the ≈-class together with the
sign relating the two orientations, or sign 0 when the class is killed by
an odd automorphism.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import NamedTuple

from .sbimodule import SYMMETRIES, perm_sign

ODD_KINDS = frozenset({"s"})


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    id: str
    outputs: int
    inputs: int
    left_symmetry: str = "trivial"
    right_symmetry: str = "trivial"

    def __post_init__(self):
        if self.outputs < 1 or self.inputs < 1:
            raise GraphError(f"generator {self.id}: arities must be positive")
        for s in (self.left_symmetry, self.right_symmetry):
            if s not in SYMMETRIES:
                raise GraphError(f"generator {self.id}: unknown symmetry {s!r}")


class Signature:
    """Immutable table of generators, hashable so it can key caches."""

    def __init__(self, generators):
        gens = {}
        for g in generators:
            if g.id in gens:
                raise GraphError(f"duplicate generator id {g.id!r}")
            gens[g.id] = g
        self._gens = gens
        self._key = tuple(sorted((g.id, g.outputs, g.inputs, g.left_symmetry, g.right_symmetry)
                                 for g in gens.values()))

    def __getitem__(self, gid) -> Generator:
        try:
            return self._gens[gid]
        except KeyError:
            raise GraphError(f"unknown generator {gid!r}") from None

    def __contains__(self, gid):
        return gid in self._gens

    def __iter__(self):
        return iter(sorted(self._gens.values(), key=lambda g: g.id))

    def __len__(self):
        return len(self._gens)

    def __hash__(self):
        return hash(self._key)

    def __eq__(self, other):
        return isinstance(other, Signature) and self._key == other._key

    def reversed(self):
        flip = {"trivial": "trivial", "sign": "sign", "regular": "regular"}
        return Signature(Generator(g.id, g.inputs, g.outputs, flip[g.right_symmetry], flip[g.left_symmetry])
                         for g in self)


class Graph(NamedTuple):
    gens: tuple
    outs: tuple
    ins: tuple
    inputs: tuple
    outputs: tuple

    @property
    def m(self):
        return len(self.outputs)

    @property
    def n(self):
        return len(self.inputs)

    @property
    def weight(self):
        return len(self.gens)

    def edges(self):
        """Internal edges as (u, i, x, j): out port i of u -> in port j of x."""
        for u, targets in enumerate(self.outs):
            for i, t in enumerate(targets):
                if t[0] == "v":
                    yield (u, i, t[1], t[2])


def build_graph(gens, arities, connections, m, n) -> Graph:
    """Assemble a graph from ``(source, target)`` pairs.

    ``arities[v] = (outputs, inputs)``; sources are ``('i', k)`` or
    ``('v', u, i)`` (an output port), targets ``('o', k)`` or ``('v', x, j)``
    (an input port).
    """
    outs = [[None] * a[0] for a in arities]
    ins = [[None] * a[1] for a in arities]
    inputs = [None] * n
    outputs = [None] * m
    for src, dst in connections:
        try:
            if src[0] == "i":
                slot, idx = inputs, src[1] - 1
            else:
                slot, idx = outs[src[1]], src[2]
            if idx < 0 or slot[idx] is not None:
                raise GraphError(f"port {src} used twice")
            slot[idx] = dst
            if dst[0] == "o":
                slot2, idx2 = outputs, dst[1] - 1
            else:
                slot2, idx2 = ins[dst[1]], dst[2]
            if idx2 < 0 or slot2[idx2] is not None:
                raise GraphError(f"port {dst} used twice")
            slot2[idx2] = src
        except IndexError:
            raise GraphError(f"port out of range in {src} -> {dst}") from None
    for v in range(len(gens)):
        for i, t in enumerate(outs[v]):
            if t is None:
                raise GraphError(f"dangling output port {i + 1} of vertex {v}")
        for j, s in enumerate(ins[v]):
            if s is None:
                raise GraphError(f"dangling input port {j + 1} of vertex {v}")
    for k, t in enumerate(inputs, 1):
        if t is None:
            raise GraphError(f"global input {k} is not connected")
    for k, s in enumerate(outputs, 1):
        if s is None:
            raise GraphError(f"global output {k} is not connected")
    return Graph(tuple(gens), tuple(map(tuple, outs)), tuple(map(tuple, ins)), tuple(inputs), tuple(outputs))


def connections(g: Graph):
    """Inverse of :func:`build_graph`: list of (source, target)."""
    out = []
    for u, targets in enumerate(g.outs):
        for i, t in enumerate(targets):
            out.append((("v", u, i), t))
    for k, t in enumerate(g.inputs, 1):
        out.append((("i", k), t))
    return out


def arities_of(g: Graph):
    return [(len(o), len(i)) for o, i in zip(g.outs, g.ins)]


def is_acyclic(g: Graph) -> bool:
    indeg = [0] * g.weight
    succ = defaultdict(list)
    for u, _, x, _ in g.edges():
        if u == x:
            return False
        succ[u].append(x)
        indeg[x] += 1
    stack = [v for v in range(g.weight) if indeg[v] == 0]
    seen = 0
    while stack:
        v = stack.pop()
        seen += 1
        for x in succ[v]:
            indeg[x] -= 1
            if indeg[x] == 0:
                stack.append(x)
    return seen == g.weight


def _components(vertices, pairs):
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in pairs:
        if a in parent and b in parent:
            parent[find(a)] = find(b)
    comps = defaultdict(list)
    for v in vertices:
        comps[find(v)].append(v)
    return sorted(tuple(sorted(c)) for c in comps.values())


def is_connected(g: Graph) -> bool:
    if g.weight == 0:
        return g.m == 1 and g.n == 1
    if any(t[0] == "o" for t in g.inputs):
        return False
    return len(_components(range(g.weight), [(u, x) for u, _, x, _ in g.edges()])) == 1


def vertex_components(g: Graph, vertices):
    vs = set(vertices)
    return _components(sorted(vs), [(u, x) for u, _, x, _ in g.edges() if u in vs and x in vs])


# -- cell structures ---------------------------------------------------------

class Cells(NamedTuple):
    graph: Graph
    blocks: tuple            # ordered blocks, each a sorted tuple of vertices
    kinds: tuple             # kind per block ('p' even, 's' odd, or a level tag)
    groups: tuple = None     # ordered groups (odd), each a tuple of block indices

    @property
    def weight(self):
        return self.graph.weight

    def block_of(self):
        b = [None] * self.graph.weight
        for bi, blk in enumerate(self.blocks):
            for v in blk:
                b[v] = bi
        return b


def plain(g: Graph) -> Cells:
    """A graph read as a single element of a PROP (one even block)."""
    if g.weight == 0:
        return Cells(g, (), ())
    return Cells(g, (tuple(range(g.weight)),), ("p",))


def odd_sequence(c: Cells, name_of_vertex=None):
    """Flattened orientation: odd symbols in order.  Symbols are named by the
    vertex sets they cover so they survive relabelling."""
    nv = name_of_vertex or (lambda v: v)
    seq = []
    if c.groups is None:
        for blk, kind in zip(c.blocks, c.kinds):
            if kind in ODD_KINDS:
                seq.append(("B", frozenset(nv(v) for v in blk)))
    else:
        for grp in c.groups:
            verts = frozenset(nv(v) for b in grp for v in c.blocks[b])
            seq.append(("G", verts))
            for b in grp:
                if c.kinds[b] in ODD_KINDS:
                    seq.append(("B", frozenset(nv(v) for v in c.blocks[b])))
    return seq


def sequence_sign(old, new) -> int:
    pos = {s: i for i, s in enumerate(new)}
    if len(pos) != len(old) or any(s not in pos for s in old):
        raise GraphError("orientation symbols do not match")
    return perm_sign([pos[s] for s in old])


def _colors(c: Cells):
    g = c.graph
    blk = c.block_of()
    grp_of_block = {}
    if c.groups is not None:
        for gi, grp in enumerate(c.groups):
            for b in grp:
                grp_of_block[b] = gi
    base = []
    for v in range(g.weight):
        b = blk[v]
        kind = c.kinds[b] if b is not None else ""
        bsize = len(c.blocks[b]) if b is not None else 0
        gsize = len(c.groups[grp_of_block[b]]) if b in grp_of_block else 0
        legs_in = tuple(sorted(s[1] for s in g.ins[v] if s[0] == "i"))
        legs_out = tuple(sorted(t[1] for t in g.outs[v] if t[0] == "o"))
        base.append((g.gens[v], kind, bsize, gsize, legs_in, legs_out))
    nbrs = [[] for _ in range(g.weight)]
    for u, _, x, _ in g.edges():
        same_b = blk[u] == blk[x]
        same_g = grp_of_block.get(blk[u], -1) == grp_of_block.get(blk[x], -2)
        nbrs[u].append((1, x, same_b, same_g))
        nbrs[x].append((0, u, same_b, same_g))
    ranks = {k: i for i, k in enumerate(sorted(set(base)))}
    col = [ranks[k] for k in base]
    for _ in range(g.weight):
        new = [(col[v], tuple(sorted((d, col[x], sb, sg) for d, x, sb, sg in nbrs[v])))
               for v in range(g.weight)]
        ranks = {k: i for i, k in enumerate(sorted(set(new)))}
        new = [ranks[k] for k in new]
        stable = len(set(new)) == len(set(col))
        col = new
        if stable:
            break
    return col


def _port_orders(sym, k):
    if sym == "regular" or k <= 1:
        return [(tuple(range(k)), 1)]
    return [(p, perm_sign(p) if sym == "sign" else 1) for p in permutations(range(k))]


@lru_cache(maxsize=None)
def canonical_form(c: Cells, sig: Signature):
    """Canonical representative of the ≈-class of ``c`` and the sign ``s``
    with ``c == s * rep`` (s = 0: the class vanishes)."""
    g = c.graph
    w = g.weight
    if w == 0:
        return c, 1
    col = _colors(c)
    classes = defaultdict(list)
    for v in range(w):
        classes[col[v]].append(v)
    keys = sorted(classes)
    class_perms = [list(permutations(classes[k])) for k in keys]
    port_choices = []
    for v in range(w):
        gen = sig[g.gens[v]]
        port_choices.append([(po, pi, so * si)
                             for po, so in _port_orders(gen.left_symmetry, len(g.outs[v]))
                             for pi, si in _port_orders(gen.right_symmetry, len(g.ins[v]))])
    old_seq = odd_sequence(c)
    best = None
    best_signs = set()
    for combo in product(*class_perms):
        order = [v for part in combo for v in part]
        newidx = [0] * w
        for i, v in enumerate(order):
            newidx[v] = i
        new_blocks = sorted(tuple(sorted(newidx[v] for v in b)) for b in c.blocks)
        bpos = {b: i for i, b in enumerate(new_blocks)}
        new_kinds = [None] * len(new_blocks)
        old_to_new_block = []
        for b, kind in zip(c.blocks, c.kinds):
            nb = bpos[tuple(sorted(newidx[v] for v in b))]
            new_kinds[nb] = kind
            old_to_new_block.append(nb)
        if c.groups is not None:
            new_groups = tuple(sorted(tuple(sorted(old_to_new_block[b] for b in grp)) for grp in c.groups))
        else:
            new_groups = None
        tmp = Cells(g, tuple(new_blocks), tuple(new_kinds), new_groups)
        new_seq = odd_sequence(tmp)
        # old symbols renamed to new vertex names
        renamed = [(t, frozenset(newidx[v] for v in s)) for t, s in old_seq]
        osign = sequence_sign(renamed, new_seq)
        for ports in product(*(port_choices[v] for v in order)):
            # ports[i] = (out order, in order, sign) for new vertex i; order maps new port -> old port
            inv_in = {}
            psign = osign
            for i, v in enumerate(order):
                po, pi, s = ports[i]
                psign *= s
                inv_in[v] = {old: new for new, old in enumerate(pi)}
            inv_out = {}
            for i, v in enumerate(order):
                po = ports[i][0]
                inv_out[v] = {old: new for new, old in enumerate(po)}

            verts = []
            for i, v in enumerate(order):
                po, pi, _ = ports[i]
                o = []
                for p in po:
                    t = g.outs[v][p]
                    o.append(("v", newidx[t[1]], inv_in[t[1]][t[2]]) if t[0] == "v" else t)
                ii = []
                for p in pi:
                    s = g.ins[v][p]
                    ii.append(("v", newidx[s[1]], inv_out[s[1]][s[2]]) if s[0] == "v" else s)
                verts.append((g.gens[v], tuple(o), tuple(ii)))
            ins_legs = tuple(("v", newidx[t[1]], inv_in[t[1]][t[2]]) if t[0] == "v" else t for t in g.inputs)
            out_legs = tuple(("v", newidx[s[1]], inv_out[s[1]][s[2]]) if s[0] == "v" else s for s in g.outputs)
            enc = (tuple(verts), ins_legs, out_legs, tmp.blocks, tmp.kinds, new_groups)
            if best is None or enc < best:
                best = enc
                best_signs = {psign}
            elif enc == best:
                best_signs.add(psign)
    verts, ins_legs, out_legs, blocks, kinds, groups = best
    graph = Graph(tuple(v[0] for v in verts), tuple(v[1] for v in verts), tuple(v[2] for v in verts),
                  ins_legs, out_legs)
    rep = Cells(graph, blocks, kinds, groups)
    if len(best_signs) > 1:
        return rep, 0
    # c = s * rep where relabelling c by the chosen map gives s * rep
    return rep, best_signs.pop()


def canonical_graph(g: Graph, sig: Signature):
    rep, s = canonical_form(plain(g), sig)
    return rep.graph, s


# -- enumeration -------------------------------------------------------------

def _generator_multisets(sig, w, m, n, through):
    gens = list(sig)
    for combo in combinations_with_replacement(gens, w):
        so = sum(g.outputs for g in combo)
        si = sum(g.inputs for g in combo)
        for t in range(0, min(m, n) + 1 if through else 1):
            e = so - (m - t)
            if e < 0 or si - (n - t) != e:
                continue
            yield combo, e, t


@lru_cache(maxsize=None)
def enumerate_graphs(sig: Signature, m, n, w, connected=True, through=False):
    """All generator graphs with ``w`` vertices and profile (m, n), up to ≈,
    as canonical plain graphs (including those that vanish by symmetry)."""
    if w == 0:
        if connected:
            return (build_graph((), (), [(("i", 1), ("o", 1))], 1, 1),) if (m, n) == (1, 1) else ()
        if m != n:
            return ()
        out = []
        for p in permutations(range(1, n + 1)):
            out.append(build_graph((), (), [(("i", k), ("o", p[k - 1])) for k in range(1, n + 1)], n, n))
        return tuple(sorted(out))
    found = {}
    for combo, e, t in _generator_multisets(sig, w, m, n, through and not connected):
        gens = tuple(g.id for g in combo)
        ar = [(g.outputs, g.inputs) for g in combo]
        out_ports = [(v, i) for v, a in enumerate(ar) for i in range(a[0])]
        in_ports = [(v, j) for v, a in enumerate(ar) for j in range(a[1])]
        skeletons = set()
        for srcs in combinations(out_ports, e):
            for dsts in permutations(in_ports, e):
                if any(s[0] == d[0] for s, d in zip(srcs, dsts)):
                    continue
                edges = list(zip(srcs, dsts))
                if connected and len(_components(range(w), [(s[0], d[0]) for s, d in edges])) != 1:
                    continue
                used_o = set(srcs)
                used_i = set(dsts)
                free_o = [p for p in out_ports if p not in used_o]
                free_i = [p for p in in_ports if p not in used_i]
                conns = [(("v",) + s, ("v",) + d) for s, d in edges]
                conns += [(("i", 0), ("v",) + p) for p in free_i]
                conns += [(("v",) + p, ("o", 0)) for p in free_o]
                skel = _skeleton(gens, ar, conns, len(free_o), len(free_i))
                if skel is None:
                    continue
                key = canonical_form(plain(skel), sig)[0]
                if key in skeletons:
                    continue
                skeletons.add(key)
                _label_legs(key.graph, t, m, n, sig, found)
    return tuple(sorted(found))


def _skeleton(gens, ar, conns, no, ni):
    # unlabeled legs: all carry label 0, stored outside inputs/outputs
    outs = [[None] * a[0] for a in ar]
    ins = [[None] * a[1] for a in ar]
    for src, dst in conns:
        if src[0] == "v":
            outs[src[1]][src[2]] = dst
        if dst[0] == "v":
            ins[dst[1]][dst[2]] = src
    g = Graph(gens, tuple(map(tuple, outs)), tuple(map(tuple, ins)), (), ())
    return g if is_acyclic(g) else None


def _label_legs(skel: Graph, t, m, n, sig, found):
    free_i = [(v, j) for v, s in enumerate(skel.ins) for j, e in enumerate(s) if e[0] == "i"]
    free_o = [(v, i) for v, s in enumerate(skel.outs) for i, e in enumerate(s) if e[0] == "o"]
    base = [(("v", u, i), ("v", x, j)) for u, i, x, j in skel.edges()]
    ar = arities_of(skel)
    slots_i = [("p", p) for p in free_i] + [("s", k) for k in range(t)]
    slots_o = [("p", p) for p in free_o] + [("s", k) for k in range(t)]
    for li in permutations(range(1, n + 1)):
        for lo in permutations(range(1, m + 1)):
            conns = list(base)
            strand_in, strand_out = {}, {}
            for lab, sl in zip(li, slots_i):
                if sl[0] == "p":
                    conns.append((("i", lab), ("v",) + sl[1]))
                else:
                    strand_in[sl[1]] = lab
            for lab, sl in zip(lo, slots_o):
                if sl[0] == "p":
                    conns.append((("v",) + sl[1], ("o", lab)))
                else:
                    strand_out[sl[1]] = lab
            for k in range(t):
                conns.append((("i", strand_in[k]), ("o", strand_out[k])))
            g = build_graph(skel.gens, ar, conns, m, n)
            found.setdefault(canonical_form(plain(g), sig)[0].graph, None)


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [(first,)] + part
        for i in range(len(part)):
            yield part[:i] + [(first,) + part[i]] + part[i + 1:]


def block_graph_acyclic(g: Graph, blocks) -> bool:
    where = {}
    for bi, b in enumerate(blocks):
        for v in b:
            where[v] = bi
    succ = defaultdict(set)
    indeg = [0] * len(blocks)
    for u, _, x, _ in g.edges():
        a, b = where[u], where[x]
        if a != b and b not in succ[a]:
            succ[a].add(b)
            indeg[b] += 1
    stack = [b for b in range(len(blocks)) if indeg[b] == 0]
    seen = 0
    while stack:
        b = stack.pop()
        seen += 1
        for x in succ[b]:
            indeg[x] -= 1
            if indeg[x] == 0:
                stack.append(x)
    return seen == len(blocks)


def block_connected(g: Graph, block) -> bool:
    return len(vertex_components(g, block)) == 1


def enumerate_connected(profile, k, m, n):
    """Connected shapes with ``k`` vertices whose arities come from
    ``profile`` (a list of (outputs, inputs)).  Shapes ignore port order:
    each arity type is read as a fully symmetric generator."""
    sig = Signature(Generator(f"g{o}_{i}", o, i) for o, i in sorted(set(profile)))
    return list(enumerate_graphs(sig, m, n, k, True, False))


def enumerate_two_level(profiles_top, profiles_bottom, m, n, connected=False):
    """2-level shapes: one vertex per entry of ``profiles_bottom`` on level 1
    (fed by the global inputs) and one per entry of ``profiles_top`` on
    level 2, edges only from level 1 to level 2, unit strands allowed.
    Returns canonical :class:`Cells` with blocks of kind 'L1' / 'L2'."""
    if m < 1 or n < 1:
        raise GraphError("arities must be positive")
    gens = {}
    for o, i in list(profiles_top) + list(profiles_bottom):
        gens[(o, i)] = Generator(f"g{o}_{i}", o, i)
    sig = Signature(gens.values())
    want = sorted([("L2", f"g{o}_{i}") for o, i in profiles_top] + [("L1", f"g{o}_{i}") for o, i in profiles_bottom])
    w = len(want)
    out = set()
    for g in enumerate_graphs(sig, m, n, w, connected, not connected):
        if sorted(g.gens) != sorted(x[1] for x in want):
            continue
        for levels in product(("L1", "L2"), repeat=w):
            if sorted(zip(levels, g.gens)) != want:
                continue
            if any(not (levels[u] == "L1" and levels[x] == "L2") for u, _, x, _ in g.edges()):
                continue
            c = Cells(g, tuple((v,) for v in range(w)), tuple(levels))
            out.add(canonical_form(c, sig)[0])
    return sorted(out)


def contract_edge_pair(g: Graph, u, v, merged_id=None):
    """Merge adjacent vertices ``u`` and ``v`` into one vertex.

    The merged vertex takes index ``min(u, v)``; its input ports are the
    external inputs of ``u`` then ``v`` (port order), likewise outputs.
    Returns ``(graph, in_ports, out_ports)`` where the port lists record
    which original (vertex, port) each merged port came from.
    """
    pair = {u, v}
    between = [(a, x) for a, _, x, _ in g.edges() if {a, x} == pair]
    if u == v or not between:
        raise GraphError(f"vertices {u} and {v} are not adjacent")
    if len({a for a, _ in between}) != 1:
        raise GraphError("edges between the pair run in both directions")
    # a path leaving the pair and re-entering it would make a cycle
    rest = [(a, x) for a, _, x, _ in g.edges() if not ({a, x} <= pair)]
    succ = defaultdict(set)
    for a, x in rest:
        succ[a].add(x)
    seen, stack = set(), [x for p in pair for x in succ[p] if x not in pair]
    while stack:
        y = stack.pop()
        if y in seen:
            continue
        seen.add(y)
        for z in succ[y]:
            if z in pair:
                raise GraphError("contracting the pair would create a cycle")
            stack.append(z)
    in_ports = [(p, j) for p in (u, v) for j, s in enumerate(g.ins[p]) if not (s[0] == "v" and s[1] in pair)]
    out_ports = [(p, i) for p in (u, v) for i, t in enumerate(g.outs[p]) if not (t[0] == "v" and t[1] in pair)]
    target = min(u, v)
    new_index = {}
    idx = 0
    for x in range(g.weight):
        if x == target:
            new_index[x] = idx
            idx += 1
        elif x not in pair:
            new_index[x] = idx
            idx += 1
    inpos = {p: k for k, p in enumerate(in_ports)}
    outpos = {p: k for k, p in enumerate(out_ports)}

    def map_src(s):
        if s[0] == "i":
            return s
        if s[1] in pair:
            return ("v", new_index[target], outpos[(s[1], s[2])])
        return ("v", new_index[s[1]], s[2])

    def map_dst(t):
        if t[0] == "o":
            return t
        if t[1] in pair:
            return ("v", new_index[target], inpos[(t[1], t[2])])
        return ("v", new_index[t[1]], t[2])

    conns = []
    for s, t in connections(g):
        if s[0] == "v" and t[0] == "v" and s[1] in pair and t[1] in pair:
            continue
        conns.append((map_src(s), map_dst(t)))
    gens, ar = [], []
    for x in range(g.weight):
        if x == target:
            gens.append(merged_id or f"({g.gens[u]}*{g.gens[v]})")
            ar.append((len(out_ports), len(in_ports)))
        elif x not in pair:
            gens.append(g.gens[x])
            ar.append((len(g.outs[x]), len(g.ins[x])))
    return build_graph(gens, ar, conns, g.m, g.n), in_ports, out_ports


def substitute(g: Graph, x, piece: Graph, in_assign, out_assign):
    """Replace vertex ``x`` by the graph ``piece``.

    ``in_assign[j]`` is the input leg label of ``piece`` glued to input port
    ``j`` of ``x``; ``out_assign`` likewise for outputs.  The vertices of
    ``piece`` take indices ``x, N, N+1, ...`` (N = old vertex count).
    Returns ``(graph, new vertex indices)``.
    """
    k = piece.weight
    new_ids = [x] + list(range(g.weight, g.weight + k - 1))
    gens = list(g.gens) + [None] * (k - 1)
    ar = arities_of(g) + [None] * (k - 1)
    for a, nid in enumerate(new_ids):
        gens[nid] = piece.gens[a]
        ar[nid] = (len(piece.outs[a]), len(piece.ins[a]))
    leg_in = {lab: j for j, lab in enumerate(in_assign)}
    leg_out = {lab: i for i, lab in enumerate(out_assign)}
    conns = []
    for s, t in connections(g):
        if (s[0] == "v" and s[1] == x) or (t[0] == "v" and t[1] == x):
            continue
        conns.append((s, t))

    def outer_src(label):  # what feeds input leg `label` of piece
        return g.ins[x][leg_in[label]]

    def outer_dst(label):
        return g.outs[x][leg_out[label]]

    for s, t in connections(piece):
        src = ("v", new_ids[s[1]], s[2]) if s[0] == "v" else outer_src(s[1])
        dst = ("v", new_ids[t[1]], t[2]) if t[0] == "v" else outer_dst(t[1])
        conns.append((src, dst))
    return build_graph(gens, ar, conns, g.m, g.n), new_ids


def disjoint_union_vertical(top: Graph, bottom: Graph) -> Graph:
    """Graft: global output k of ``bottom`` feeds global input k of ``top``."""
    if top.n != bottom.m:
        raise GraphError(f"cannot graft: top has {top.n} inputs, bottom has {bottom.m} outputs")
    off = bottom.weight
    gens = bottom.gens + top.gens
    ar = arities_of(bottom) + arities_of(top)

    def shift(e):
        return ("v", e[1] + off, e[2]) if e[0] == "v" else e

    # follow strands through the gluing level
    def bottom_source(k):  # source feeding top input k
        return bottom.outputs[k - 1]

    conns = []
    for s, t in connections(bottom):
        if t[0] == "o":
            continue
        conns.append((s, t))
    for s, t in connections(top):
        src = shift(s) if s[0] == "v" else bottom_source(s[1])
        conns.append((src, shift(t)))
    return build_graph(gens, ar, conns, top.m, bottom.n)


def juxtapose(a: Graph, b: Graph) -> Graph:
    """Horizontal juxtaposition a ⊗ b (b's legs numbered after a's)."""
    off = a.weight

    def sh(e):
        if e[0] == "v":
            return ("v", e[1] + off, e[2])
        if e[0] == "i":
            return ("i", e[1] + a.n)
        return ("o", e[1] + a.m)

    conns = connections(a) + [(sh(s), sh(t)) for s, t in connections(b)]
    return build_graph(a.gens + b.gens, arities_of(a) + arities_of(b), conns, a.m + b.m, a.n + b.n)


def identity_graph(k) -> Graph:
    return build_graph((), (), [(("i", j), ("o", j)) for j in range(1, k + 1)], k, k)


# -- literal syntax ----------------------------------------------------------

_VDECL = re.compile(r"^\s*([A-Za-z_]\w*)\s*:\s*([^\s,;]+)\s*$")
_END = re.compile(r"^\s*(?:(in|out)\[(\d+)\]|([A-Za-z_]\w*)\.(in|out)\[(\d+)\])\s*$")


def parse_graph_literal(text: str, sig: Signature) -> Graph:
    """Parse ``"u:b, v:b; in[1] -> u.in[1]; u.out[1] -> v.in[1]; ..."``.

    The first ``;``-separated field declares vertices ``name:generator``;
    every other field is one connection.  Ports and legs are 1-based.
    """
    fields = [f for f in text.split(";")]
    if not fields:
        raise GraphError("empty graph literal")
    names = {}
    gens = []
    decl = fields[0].strip()
    if decl:
        for d in re.split(r"[,\s]+(?=[A-Za-z_]\w*\s*:)", decl):
            mo = _VDECL.match(d.strip().rstrip(","))
            if not mo:
                raise GraphError(f"bad vertex declaration {d!r}")
            name, gid = mo.groups()
            if name in names:
                raise GraphError(f"vertex {name!r} declared twice")
            sig[gid]
            names[name] = len(gens)
            gens.append(gid)
    conns = []
    legs_in, legs_out = set(), set()
    for f in fields[1:]:
        f = f.strip()
        if not f:
            continue
        if "->" not in f:
            raise GraphError(f"bad connection {f!r}")
        a, b = f.split("->", 1)
        ma, mb = _END.match(a), _END.match(b)
        if not ma or not mb:
            raise GraphError(f"bad connection {f!r}")
        if ma.group(1):
            if ma.group(1) != "in":
                raise GraphError(f"{a.strip()} cannot be a source")
            src = ("i", int(ma.group(2)))
            legs_in.add(src[1])
        else:
            if ma.group(4) != "out":
                raise GraphError(f"{a.strip()} cannot be a source")
            if ma.group(3) not in names:
                raise GraphError(f"undeclared vertex {ma.group(3)!r}")
            src = ("v", names[ma.group(3)], int(ma.group(5)) - 1)
        if mb.group(1):
            if mb.group(1) != "out":
                raise GraphError(f"{b.strip()} cannot be a target")
            dst = ("o", int(mb.group(2)))
            legs_out.add(dst[1])
        else:
            if mb.group(4) != "in":
                raise GraphError(f"{b.strip()} cannot be a target")
            if mb.group(3) not in names:
                raise GraphError(f"undeclared vertex {mb.group(3)!r}")
            dst = ("v", names[mb.group(3)], int(mb.group(5)) - 1)
        conns.append((src, dst))
    n, m = len(legs_in), len(legs_out)
    if legs_in != set(range(1, n + 1)) or legs_out != set(range(1, m + 1)):
        raise GraphError("global legs must be numbered 1..n and 1..m without gaps")
    ar = [(sig[gid].outputs, sig[gid].inputs) for gid in gens]
    g = build_graph(gens, ar, conns, m, n)
    if not is_acyclic(g):
        raise GraphError("graph has a directed cycle")
    return g


def format_graph_literal(g: Graph) -> str:
    names = [f"v{i + 1}" for i in range(g.weight)]
    parts = [", ".join(f"{nm}:{gid}" for nm, gid in zip(names, g.gens))]

    def fs(s):
        return f"in[{s[1]}]" if s[0] == "i" else f"{names[s[1]]}.out[{s[2] + 1}]"

    def fd(t):
        return f"out[{t[1]}]" if t[0] == "o" else f"{names[t[1]]}.in[{t[2] + 1}]"

    for s, t in sorted(connections(g), key=lambda st: (st[0][0] != "i",) + st[0][1:]):
        parts.append(f"{fs(s)} -> {fd(t)}")
    return "; ".join(parts)


# -- linear combinations -----------------------------------------------------

class LinComb:
    """Finite rational combination of canonical cell structures."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def of(cls, cells: Cells, sig: Signature, coef=1):
        rep, s = canonical_form(cells, sig)
        return cls({rep: Fraction(coef) * s} if s else {})

    @classmethod
    def of_graph(cls, g: Graph, sig: Signature, coef=1):
        return cls.of(plain(g), sig, coef)

    def add_term(self, cells, sig, coef=1):
        rep, s = canonical_form(cells, sig)
        if s and coef:
            v = self.terms.get(rep, 0) + Fraction(coef) * s
            if v:
                self.terms[rep] = v
            else:
                self.terms.pop(rep, None)
        return self

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            t = out.get(k, 0) + v
            if t:
                out[k] = t
            else:
                out.pop(k, None)
        return LinComb(out)

    def __neg__(self):
        return LinComb({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        return LinComb({k: c * v for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, LinComb) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def profile(self):
        ps = {(k.graph.m, k.graph.n, k.weight) for k in self.terms}
        if len(ps) > 1:
            raise GraphError(f"mixed profiles in linear combination: {sorted(ps)}")
        return ps.pop() if ps else None

    def __repr__(self):
        body = " + ".join(f"{v}*[{format_graph_literal(k.graph)}]" for k, v in self)
        return f"LinComb({body or '0'})"
