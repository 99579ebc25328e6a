"""Symmetric groups and S-bimodules.

A permutation is stored by its images ``(p(1), ..., p(n))``.  Products are
composites of maps: ``compose_perms(a, b)(i) == a(b(i))``.

Actions are stored on adjacent transpositions ``s_i = (i, i+1)`` only.  The
left action is a homomorphism, ``L(a∘b) = L(a) L(b)``; the right action is
by S_n^op, ``v·(a∘b) = (v·a)·b``, i.e. ``R(a∘b) = R(b) R(a)`` on column
vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import factorial

from .linalg import RationalMatrix

SYMMETRIES = ("trivial", "sign", "regular")


@dataclass(frozen=True)
class Permutation:
    images: tuple

    def __post_init__(self):
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(1, len(imgs) + 1)):
            raise ValueError(f"not a bijection of 1..{len(imgs)}: {imgs}")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, n):
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def transposition(cls, n, i, j=None):
        j = i + 1 if j is None else j
        imgs = list(range(1, n + 1))
        imgs[i - 1], imgs[j - 1] = imgs[j - 1], imgs[i - 1]
        return cls(tuple(imgs))

    @property
    def size(self):
        return len(self.images)

    def __call__(self, i):
        return self.images[i - 1]

    def inverse(self):
        inv = [0] * self.size
        for i, p in enumerate(self.images, 1):
            inv[p - 1] = i
        return Permutation(tuple(inv))

    def is_identity(self):
        return self.images == tuple(range(1, self.size + 1))

    def sign(self):
        return perm_sign(self.images)

    def reduced_word(self):
        """Indices i_1..i_k with self = s_{i_1} ∘ ... ∘ s_{i_k}, k = #inversions."""
        p = list(self.images)
        word = []
        while True:
            for i in range(len(p) - 1):
                if p[i] > p[i + 1]:
                    # p = p' ∘ s_{i+1}, with p' = p ∘ s_{i+1}
                    p[i], p[i + 1] = p[i + 1], p[i]
                    word.append(i + 1)
                    break
            else:
                break
        return word[::-1]

    def __repr__(self):
        return f"Permutation{self.images}"


def perm_sign(seq) -> int:
    """Sign of the permutation taking sorted(seq) to seq (entries distinct)."""
    seq = list(seq)
    s = 1
    seen = [False] * len(seq)
    pos = {v: i for i, v in enumerate(sorted(seq))}
    target = [pos[v] for v in seq]
    for i in range(len(seq)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = target[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def compose_perms(a: Permutation, b: Permutation) -> Permutation:
    if a.size != b.size:
        raise ValueError(f"size mismatch: S_{a.size} vs S_{b.size}")
    return Permutation(tuple(a(b(i)) for i in range(1, a.size + 1)))


def all_perms(n):
    return [Permutation(p) for p in permutations(range(1, n + 1))]


@dataclass
class SBimoduleComponent:
    m: int
    n: int
    dim: int
    left_action: dict = field(default_factory=dict)   # i -> matrix of s_i in S_m
    right_action: dict = field(default_factory=dict)  # i -> matrix of s_i in S_n

    def __post_init__(self):
        for i in range(1, self.m):
            self.left_action.setdefault(i, RationalMatrix.identity(self.dim))
        for i in range(1, self.n):
            self.right_action.setdefault(i, RationalMatrix.identity(self.dim))

    def left_matrix(self, p: Permutation) -> RationalMatrix:
        M = RationalMatrix.identity(self.dim)
        for i in p.reduced_word():
            M = M @ self.left_action[i]
        return M

    def right_matrix(self, p: Permutation) -> RationalMatrix:
        M = RationalMatrix.identity(self.dim)
        for i in p.reduced_word():
            M = self.right_action[i] @ M
        return M

    def check_axioms(self):
        """Involutions, braid relations, and commuting sides."""
        I = RationalMatrix.identity(self.dim)
        for acts, k in ((self.left_action, self.m), (self.right_action, self.n)):
            for i in range(1, k):
                if acts[i] @ acts[i] != I:
                    return False
                if i + 1 < k:
                    a, b = acts[i], acts[i + 1]
                    if a @ b @ a != b @ a @ b:
                        return False
                for j in range(i + 2, k):
                    if acts[i] @ acts[j] != acts[j] @ acts[i]:
                        return False
        for L in self.left_action.values():
            for R in self.right_action.values():
                if L @ R != R @ L:
                    return False
        return True


def act(component: SBimoduleComponent, left: Permutation, v, right: Permutation):
    """Apply ``left`` on the left and ``right`` on the right to the vector ``v``
    (a dict index -> rational, or a sequence)."""
    if left.size != component.m or right.size != component.n:
        raise ValueError(f"arity mismatch: component ({component.m},{component.n}), "
                         f"permutations S_{left.size} x S_{right.size}")
    vec = dict(enumerate(v)) if isinstance(v, (list, tuple)) else dict(v)
    vec = component.right_matrix(right).apply(vec)
    vec = component.left_matrix(left).apply(vec)
    return vec


def _side(sym, k):
    """Matrices of s_1..s_{k-1} for one side, plus dimension and basis."""
    if sym == "trivial":
        return 1, {i: RationalMatrix.identity(1) for i in range(1, k)}, None
    if sym == "sign":
        return 1, {i: RationalMatrix(1, 1, {0: {0: -1}}) for i in range(1, k)}, None
    if sym == "regular":
        return factorial(k), None, all_perms(k)
    raise ValueError(f"unknown symmetry {sym!r} (expected one of {SYMMETRIES})")


def regular_component(n) -> SBimoduleComponent:
    """k[S_n] with S_n acting on both sides by composition."""
    return identity_bimodule(n).components[(n, n)]


def _kron(A: RationalMatrix, B: RationalMatrix) -> RationalMatrix:
    ent: dict = {}
    for ra, rowa in A.entries.items():
        for rb, rowb in B.entries.items():
            ent[ra * B.rows + rb] = {ca * B.cols + cb: va * vb for ca, va in rowa.items() for cb, vb in rowb.items()}
    return RationalMatrix(A.rows * B.rows, A.cols * B.cols, ent)


def component_from_symmetry(m, n, left="trivial", right="trivial") -> SBimoduleComponent:
    """S_m x S_n^op-module generated by one element whose stabiliser acts by
    the given character on each side (``regular``: free on that side)."""
    dl, Ls, lbasis = _side(left, m)
    dr, Rs, rbasis = _side(right, n)
    if lbasis is not None:
        idx = {p.images: i for i, p in enumerate(lbasis)}
        Ls = {}
        for i in range(1, m):
            s = Permutation.transposition(m, i)
            Ls[i] = RationalMatrix(dl, dl, {idx[compose_perms(s, g).images]: {j: 1} for j, g in enumerate(lbasis)})
    if rbasis is not None:
        idx = {p.images: i for i, p in enumerate(rbasis)}
        Rs = {}
        for i in range(1, n):
            s = Permutation.transposition(n, i)
            Rs[i] = RationalMatrix(dr, dr, {idx[compose_perms(g, s).images]: {j: 1} for j, g in enumerate(rbasis)})
    Il, Ir = RationalMatrix.identity(dl), RationalMatrix.identity(dr)
    return SBimoduleComponent(
        m, n, dl * dr,
        {i: _kron(L, Ir) for i, L in Ls.items()},
        {i: _kron(Il, R) for i, R in Rs.items()},
    )


@dataclass
class SBimodule:
    components: dict = field(default_factory=dict)  # (m, n) -> SBimoduleComponent

    def __post_init__(self):
        for (m, n) in self.components:
            if m < 1 or n < 1:
                raise ValueError(f"arities must be positive, got ({m},{n})")

    def dim(self, m, n):
        c = self.components.get((m, n))
        return c.dim if c else 0


def identity_bimodule(max_arity) -> SBimodule:
    if max_arity < 1:
        raise ValueError("max_arity must be >= 1")
    comps = {}
    for n in range(1, max_arity + 1):
        basis = all_perms(n)
        idx = {p.images: i for i, p in enumerate(basis)}
        L, R = {}, {}
        for i in range(1, n):
            s = Permutation.transposition(n, i)
            L[i] = RationalMatrix(len(basis), len(basis),
                                  {idx[compose_perms(s, g).images]: {j: Fraction(1)} for j, g in enumerate(basis)})
            R[i] = RationalMatrix(len(basis), len(basis),
                                  {idx[compose_perms(g, s).images]: {j: Fraction(1)} for j, g in enumerate(basis)})
        comps[(n, n)] = SBimoduleComponent(n, n, len(basis), L, R)
    return SBimodule(comps)
