"""Koszul dual, Koszul complexes and the Koszul criterion at finite truncation.

Two-stage pictures.  A generator graph is cut into blocks of two kinds:
T blocks (odd, kind 's') carry bar/Koszul-dual material and B blocks (even,
kind 'p') carry elements of P.  Distinct B blocks are never adjacent, and
T material sits above the B stage (``top=True``, the complex P^¡⊠P) or
below it (``top=False``, the mirrored complex P⊠P^¡).  Connected
components of the T part are the P^¡ vertices of the picture.

The twisting differential d_tau takes a T block that is extremal in the
T part (nothing of T feeds it when T is on top, it feeds nothing of T when
T is at the bottom) and absorbs it into the adjacent B stage: the block
merges with every B block wired to it.  Its sign is the sign of moving the
odd symbol of the block to the front of the orientation, negated when T is
on top; with the bar sign rule this makes d_theta + d_tau square to zero
on both sides.

Koszul complex: T blocks are single vertices and the T part of every
basis vector must be a P^¡ element, i.e. lie in the kernel of the bar
differential d_theta inside T.  Augmented bar complex B(P)⊠P: T blocks of
any size, differential d_theta + d_tau.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from .barcobar import (
    bar_complex,
    bar_space,
    block_edges,
    cobar_complex,
    d_theta,
    kernel_with_pivots,
    matrix_of,
)
from .graphs import ODD_KINDS, Cells, LinComb
from .linalg import ChainComplex, DifferentialError, RationalMatrix, homology_dims, rank
from .propcalc import (
    CellSpace,
    Presentation,
    TruncationParams,
    partitions_into_blocks,
    quotient_dim,
    structures,
)
from .sbimodule import perm_sign

VERDICT_YES = "KOSZUL-UP-TO-TRUNCATION"
VERDICT_NO = "NOT-KOSZUL"
JOBS_ENV = "KOSZULPROP_JOBS"


# -- two-stage structures ------------------------------------------------------

def _stage_ok(c_blocks, kinds, edges, top):
    for a, b in edges:
        ka, kb = kinds[a], kinds[b]
        if ka == "p" and kb == "p":
            return False
        if top and ka == "s" and kb == "p":
            return False
        if not top and ka == "p" and kb == "s":
            return False
    return True


def _two_stage(g, k, top, singleton_t=False, one_pair=False):
    """Cells on g with k T blocks.  ``one_pair``: T blocks are singletons
    except exactly one of size 2."""
    for part in partitions_into_blocks(g):
        if len(part) < k:
            continue
        where = {v: i for i, b in enumerate(part) for v in b}
        edges = {(where[u], where[x]) for u, _, x, _ in g.edges() if where[u] != where[x]}
        for T in combinations(range(len(part)), k):
            sizes = sorted(len(part[i]) for i in T)
            if singleton_t and sizes and sizes[-1] != 1:
                continue
            if one_pair and (not sizes or sizes[-1] != 2 or (len(sizes) > 1 and sizes[-2] != 1)):
                continue
            kinds = tuple("s" if i in T else "p" for i in range(len(part)))
            if _stage_ok(part, kinds, edges, top):
                yield Cells(g, tuple(part), kinds)


@lru_cache(maxsize=None)
def two_stage_space(pres: Presentation, m, n, w, k, top=True, mode="any") -> CellSpace:
    """mode: 'any' (augmented bar), 'single' (Koszul), 'pair' (kernel target)."""
    sig = pres.signature
    keys = structures(sig, m, n, w, lambda g: _two_stage(g, k, top, mode == "single", mode == "pair"))
    return CellSpace(keys, sig, {"s": pres, "p": pres})


def t_blocks(c: Cells):
    return [i for i, kd in enumerate(c.kinds) if kd in ODD_KINDS]


def d_tau(c: Cells, sig, top=True) -> LinComb:
    out = LinComb()
    edges = block_edges(c)
    T = t_blocks(c)
    Tset = set(T)
    for c0 in T:
        if top:
            if any(b == c0 and a in Tset for a, b in edges):
                continue
            F = sorted({a for a, b in edges if b == c0 and a not in Tset})
        else:
            if any(a == c0 and b in Tset for a, b in edges):
                continue
            F = sorted({b for a, b in edges if a == c0 and b not in Tset})
        target = [c0] + [b for b in T if b != c0]
        pos = {b: i for i, b in enumerate(target)}
        sign = (-1 if top else 1) * perm_sign([pos[b] for b in T])
        merged = tuple(sorted(v for b in [c0] + F for v in c.blocks[b]))
        rest = [b for b in range(len(c.blocks)) if b != c0 and b not in F]
        blocks = (merged,) + tuple(c.blocks[b] for b in rest)
        kinds = ("p",) + tuple(c.kinds[b] for b in rest)
        out.add_term(Cells(c.graph, blocks, kinds), sig, sign)
    return out


def _t_theta(c: Cells, sig) -> LinComb:
    return d_theta(c, sig, among=set(t_blocks(c)))


# -- Koszul dual -----------------------------------------------------------------

@dataclass
class DualComponent:
    m: int
    n: int
    weight: int
    vectors: list          # kernel vectors in coordinates of the free span
    inclusion: RationalMatrix
    space: CellSpace

    @property
    def dim(self):
        return len(self.vectors)


@dataclass
class KoszulDual:
    presentation: Presentation
    trunc: TruncationParams
    components: dict = field(default_factory=dict)   # (m, n, w) -> DualComponent

    def dim(self, m, n, w):
        c = self.components.get((m, n, w))
        return c.dim if c else 0

    def table(self):
        return {k: c.dim for k, c in sorted(self.components.items())}


@lru_cache(maxsize=None)
def dual_component(pres: Presentation, m, n, w) -> DualComponent:
    src = bar_space(pres, m, n, w, w)
    if w >= 2:
        dst = bar_space(pres, m, n, w, w - 1, pair_only=True)
        D = matrix_of(lambda c: d_theta(c, pres.signature), src, dst)
        vecs, _ = kernel_with_pivots(D)
    else:
        vecs = [{i: 1} for i in range(src.dim)]
    return DualComponent(m, n, w, vecs, RationalMatrix.from_columns(src.dim, vecs), src)


def koszul_dual(pres: Presentation, trunc: TruncationParams = None) -> KoszulDual:
    trunc = trunc or TruncationParams()
    K = KoszulDual(pres, trunc)
    for m, n in trunc.components():
        for w in range(1, trunc.max_weight + 1):
            c = dual_component(pres, m, n, w)
            if c.space.free_dim:
                K.components[(m, n, w)] = c
    return K


# -- Koszul complex ------------------------------------------------------------

@dataclass
class KoszulComplex:
    m: int
    n: int
    weight: int
    top: bool
    dims: list             # dims[j] = dim of grade j (j = number of T vertices)
    maps: list             # maps[j]: grade j -> grade j-1, in free coords of grade j-1 space
    kernels: list
    checks: dict = field(default_factory=dict)

    def homology(self):
        ranks = [0] + [rank(M) for M in self.maps[1:]] + [0]
        return [self.dims[j] - ranks[j] - ranks[j + 1] for j in range(len(self.dims))]

    def euler_characteristic(self):
        return sum((-1) ** j * d for j, d in enumerate(self.dims))


@lru_cache(maxsize=None)
def koszul_complex_weight(pres: Presentation, m, n, w, top=True) -> KoszulComplex:
    sig = pres.signature
    dims, kernels, maps, full = [], [], [None], [None]
    checks = {"d_squared": True, "lands_in_dual": True}
    for j in range(0, w + 1):
        sp = two_stage_space(pres, m, n, w, j, top, "single")
        if j >= 2:
            tgt = two_stage_space(pres, m, n, w, j - 1, top, "pair")
            D = matrix_of(lambda c: _t_theta(c, sig), sp, tgt)
            vecs, _ = kernel_with_pivots(D)
        else:
            D = None
            vecs = [{i: 1} for i in range(sp.dim)]
        dims.append(len(vecs))
        kernels.append(vecs)
        if j >= 1:
            F = matrix_of(lambda c: d_tau(c, sig, top), sp, two_stage_space(pres, m, n, w, j - 1, top, "single"))
            full.append(F)
            img = F @ RationalMatrix.from_columns(sp.dim, vecs)
            maps.append(img)
            if j >= 2 and not (full[j - 1] @ img).is_zero():
                checks["d_squared"] = False
            if j >= 3:
                prev_tgt = two_stage_space(pres, m, n, w, j - 2, top, "pair")
                Dp = matrix_of(lambda c: _t_theta(c, sig), two_stage_space(pres, m, n, w, j - 1, top, "single"), prev_tgt)
                if not (Dp @ img).is_zero():
                    checks["lands_in_dual"] = False
    return KoszulComplex(m, n, w, top, dims, maps, kernels, checks)


def koszul_complex(pres: Presentation, m, n, trunc: TruncationParams = None, top=True):
    """Koszul complex slices of component (m, n), total weights 0..max_weight."""
    trunc = trunc or TruncationParams()
    return [koszul_complex_weight(pres, m, n, w, top) for w in range(0, trunc.max_weight + 1)]


# -- augmented bar complex -------------------------------------------------------

def _aug_d(c, sig, top):
    return _t_theta(c, sig) + d_tau(c, sig, top)


@lru_cache(maxsize=None)
def augmented_bar_weight(pres: Presentation, m, n, w, top=True) -> ChainComplex:
    sig = pres.signature
    spaces = [two_stage_space(pres, m, n, w, k, top, "any") for k in range(0, w + 1)]
    maps = [matrix_of(lambda c: _aug_d(c, sig, top), spaces[k], spaces[k - 1]) for k in range(1, w + 1)]
    return ChainComplex.from_maps([s.dim for s in spaces], maps, lowest=0)


def augmented_bar_acyclicity(pres: Presentation, m, n, trunc: TruncationParams = None, top=True) -> dict:
    trunc = trunc or TruncationParams()
    out = {"component": [m, n], "weights": {}, "acyclic": True}
    for w in range(0, trunc.max_weight + 1):
        C = augmented_bar_weight(pres, m, n, w, top)
        H = homology_dims(C)
        out["weights"][w] = {"dims": list(C.dims), "homology": H}
        if w > 0 and any(H):
            out["acyclic"] = False
    return out


# -- bar-cobar -------------------------------------------------------------------

def bar_cobar_check(pres: Presentation, m, n, trunc: TruncationParams = None) -> dict:
    """Homology of B^c(P^¡)(m, n) per weight against dim P(m, n)_(w)."""
    trunc = trunc or TruncationParams()
    out = {"component": [m, n], "weights": {}, "quasi_isomorphism": True}
    for w in range(1, trunc.max_weight + 1):
        C = cobar_complex(pres, m, n, w)
        H = C.homology()
        p = quotient_dim(pres, m, n, w)
        ok = H[0] == p and not any(H[1:]) and C.d_squared_zero()
        out["weights"][w] = {"homology": H, "dim_P": p, "ok": ok}
        out["quasi_isomorphism"] &= ok
    return out


# -- the criterion ---------------------------------------------------------------

def _component_report(pres: Presentation, m, n, max_weight):
    rows = []
    for w in range(1, max_weight + 1):
        k1 = koszul_complex_weight(pres, m, n, w, True)
        k2 = koszul_complex_weight(pres, m, n, w, False)
        for kc in (k1, k2):
            if not kc.checks["d_squared"]:
                raise DifferentialError(w, f"d_K^2 != 0 on ({m},{n}) weight {w}")
        B = bar_complex(pres, m, n, w)
        HB = homology_dims(B.complex)
        dual = dual_component(pres, m, n, w).dim
        rows.append({
            "m": m, "n": n, "weight": w,
            "koszul_dims": k1.dims, "koszul_homology": k1.homology(),
            "mirrored_dims": k2.dims, "mirrored_homology": k2.homology(),
            "bar_homology": HB, "dual_dim": dual,
        })
    return rows


@dataclass
class KoszulReport:
    name: str
    trunc: TruncationParams
    rows: list
    criteria: dict
    verdict: str
    witness: dict = None

    def to_dict(self):
        return {
            "presentation": self.name,
            "max_weight": self.trunc.max_weight,
            "max_biarity": self.trunc.max_biarity,
            "criteria": self.criteria,
            "verdict": self.verdict,
            "witness": self.witness,
            "components": self.rows,
        }

    def lines(self):
        out = [f"presentation {self.name}  max_weight={self.trunc.max_weight}  max_biarity={self.trunc.max_biarity}"]
        out.append("  (m,n) w  koszul H          mirrored H        bar H            dual")
        for r in self.rows:
            if not any(r["koszul_dims"]) and not any(r["bar_homology"]):
                continue
            out.append(f"  ({r['m']},{r['n']}) {r['weight']}  {str(r['koszul_homology']):16} "
                       f"{str(r['mirrored_homology']):17} {str(r['bar_homology']):16} {r['dual_dim']}")
        for name, ok in self.criteria.items():
            out.append(f"criterion {name}: {'acyclic' if ok else 'FAILS'}")
        if self.witness:
            out.append(f"witness: {self.witness}")
        out.append(f"verdict: {self.verdict}")
        return out


def resolve_jobs(jobs=None):
    env = os.environ.get(JOBS_ENV)
    if env:
        return max(1, int(env))
    return max(1, int(jobs or 1))


def parallel_map(fn, tasks, jobs=None):
    """map over tasks, in worker processes when jobs > 1; results keep task order."""
    jobs = resolve_jobs(jobs)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as ex:
            return list(ex.map(fn, tasks))
    return [fn(t) for t in tasks]


def _task(args):
    pres, m, n, w = args
    return _component_report(pres, m, n, w)


def koszul_check(pres: Presentation, trunc: TruncationParams = None, jobs=None, components=None) -> KoszulReport:
    trunc = trunc or TruncationParams()
    comps = components or trunc.components()
    results = parallel_map(_task, [(pres, m, n, trunc.max_weight) for m, n in comps], jobs)
    rows = [r for res in results for r in res]
    rows.sort(key=lambda r: (r["m"] + r["n"], r["m"], r["weight"]))

    ok1 = ok1p = ok2 = True
    witness = None
    for r in rows:
        bad = []
        if any(r["koszul_homology"]):
            ok1 = False
            bad.append(("1", r["koszul_homology"]))
        if any(r["mirrored_homology"]):
            ok1p = False
            bad.append(("1'", r["mirrored_homology"]))
        hb = r["bar_homology"]
        if any(hb[:-1]) or hb[-1] != r["dual_dim"]:
            ok2 = False
            bad.append(("2", hb))
        if bad and witness is None:
            crit, H = bad[0]
            deg = next(i for i, h in enumerate(H) if h)
            witness = {"criterion": crit, "component": [r["m"], r["n"]], "weight": r["weight"],
                       "degree": deg + (1 if crit == "2" else 0), "homology_dim": H[deg]}
    criteria = {"1": ok1, "1'": ok1p, "2": ok2}
    verdict = VERDICT_YES if all(criteria.values()) else VERDICT_NO
    return KoszulReport(pres.name, trunc, rows, criteria, verdict, witness)
