"""Dimension bounds via convex maximization over a vertex-enumerated polytope.

The feasible region is {v in W : v_j >= -1} where W is the admissible-difference
subspace attached to a residue set B.  Both quantities of interest,

    kappa(theta) = max over feasible v of theta * log((1/q) * sum_j |1+v_j|**(1/theta)),
    kappa'(1)    = -(1/q) * max over feasible v of sum_j (1+v_j) * log(1+v_j),

are maxima of convex functions over a compact polytope, hence attained at
extreme points; the module enumerates those points exhaustively (active-set
over coordinate subsets) and evaluates the objectives there.  The resulting
certified lower bound for the dimension of any admissible non-negative measure
is 1 + kappa'(1)/log q, compared against the coarser subgroup bound
1 - log|H|/log q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError, PreconditionError
from .zq_spectral import (
    ResidueSet,
    Subgroup,
    SubspaceBasis,
    minimal_subgroup_containing,
    symmetrize,
    wb_basis,
)

FEASIBILITY_TOL = 1e-9
DEDUP_TOL = 1e-7


@dataclass(frozen=True)
class VertexSet:
    """Extreme points of the feasible region, rows sorted lexicographically."""

    vertices: np.ndarray  # shape (n, q)
    feasibility_tol: float = FEASIBILITY_TOL
    dedup_tol: float = DEDUP_TOL

    def __len__(self) -> int:
        return int(self.vertices.shape[0])


class FeasiblePolytope:
    """{v = basis @ t : v_j >= -1 for all j}; bounded and containing the origin."""

    def __init__(self, basis: SubspaceBasis):
        self.basis = basis

    @property
    def q(self) -> int:
        return self.basis.q

    @property
    def dim(self) -> int:
        return self.basis.dim

    @classmethod
    def from_residues(cls, b: ResidueSet) -> "FeasiblePolytope":
        return cls(wb_basis(b))

    @cached_property
    def vertex_set(self) -> VertexSet:
        return polytope_vertices(self)


def polytope_vertices(polytope: FeasiblePolytope) -> VertexSet:
    """Enumerate the extreme points by exhausting active coordinate subsets.

    Every vertex of a d-dimensional polytope activates at least d of the q
    constraints v_j >= -1, so solving (M t)_j = -1 on each d-subset of rows
    with an invertible submatrix, then filtering by global feasibility and
    deduplicating, yields exactly the vertex set.  Rank-deficient subsets are
    skipped; near-singular solves are rejected by a residual check rather than
    a condition estimate.
    """
    m = polytope.basis.columns
    q, d = m.shape
    if d > q:
        raise InvalidInputError(f"subspace dimension {d} exceeds ambient dimension {q}")
    if d == 0:
        return VertexSet(vertices=np.zeros((0, q)))
    rhs = -np.ones(d)
    kept: list[np.ndarray] = []
    for subset in combinations(range(q), d):
        a = m[list(subset)]
        try:
            t = np.linalg.solve(a, rhs)
        except np.linalg.LinAlgError:
            continue
        if np.max(np.abs(a @ t + 1.0)) > FEASIBILITY_TOL:
            continue  # singular to working precision
        v = m @ t
        if v.min() < -1.0 - FEASIBILITY_TOL:
            continue
        if any(np.max(np.abs(v - w)) < DEDUP_TOL for w in kept):
            continue
        kept.append(v)
    if not kept:
        return VertexSet(vertices=np.zeros((0, q)))
    stacked = np.array(sorted(kept, key=tuple))
    return VertexSet(vertices=stacked)


def _clipped_shift(vertices: np.ndarray) -> np.ndarray:
    # 1 + v, with -1e-15-scale negatives from the solve clipped away
    return np.clip(1.0 + vertices, 0.0, None)


def _xlogx(s: np.ndarray) -> np.ndarray:
    return np.where(s > 0, s * np.log(np.where(s > 0, s, 1.0)), 0.0)


def kappa(theta: float, polytope: FeasiblePolytope) -> float:
    """Growth exponent at theta in (0, 1], evaluated over the vertex set.

    Computed in log-space (factoring out the largest summand) so that small
    theta never overflows the 1/theta power.  kappa(1) is exactly 0: the
    zero-sum constraint makes every vertex objective log(1) there.
    """
    if not 0.0 < theta <= 1.0:
        raise InvalidInputError(f"theta must lie in (0, 1], got {theta}")
    if theta == 1.0:
        return 0.0
    vertices = polytope.vertex_set.vertices
    if vertices.shape[0] == 0:
        return 0.0  # origin-only polytope
    q = polytope.q
    best = -math.inf
    for row in _clipped_shift(vertices):
        logs = np.log(row[row > 0])
        top = logs.max()
        total = np.sum(np.exp((logs - top) / theta))
        best = max(best, top + theta * (math.log(total) - math.log(q)))
    return best


class KappaPrime(NamedTuple):
    value: float
    witness: np.ndarray


def kappa_prime_1(polytope: FeasiblePolytope) -> KappaPrime:
    """Left derivative of kappa at 1: -(1/q) * max_v sum_j (1+v_j)*log(1+v_j).

    The objective is convex (affine maps composed with t*log(t), extended by
    0 at t=0), so the maximum over the polytope is attained at a vertex.  Ties
    are broken toward the lexicographically smallest vertex for determinism.
    """
    vertices = polytope.vertex_set.vertices
    q = polytope.q
    if vertices.shape[0] == 0:
        return KappaPrime(0.0, np.zeros(q))
    objective = _xlogx(_clipped_shift(vertices)).sum(axis=1)
    top = float(objective.max())
    tied = np.flatnonzero(objective >= top - 1e-12 * max(1.0, abs(top)))
    witness = vertices[tied[0]]  # rows already in lexicographic order
    return KappaPrime(-top / q, witness.copy())


def kappa_left_derivative_fd(polytope: FeasiblePolytope, h: float) -> float:
    """Backward difference quotient (kappa(1) - kappa(1-h)) / h = -kappa(1-h)/h.

    By convexity of kappa this underestimates kappa'(1) and increases toward it
    as h decreases.
    """
    if not 0.0 < h < 0.5:
        raise InvalidInputError(f"step h must lie in (0, 0.5), got {h}")
    return -kappa(1.0 - h, polytope) / h


class SubgroupBound(NamedTuple):
    bound: float
    subgroup: Subgroup
    proper: bool


def subgroup_bound(b: ResidueSet) -> SubgroupBound:
    """Coarse bound 1 - log|H|/log q from the smallest subgroup H containing B.

    Empty B is contained in the trivial subgroup, giving bound 1.
    """
    if not b.members:
        return SubgroupBound(1.0, Subgroup(b.q, b.q), False)
    h, proper = minimal_subgroup_containing(b)
    return SubgroupBound(1.0 - math.log(h.order) / math.log(b.q), h, proper)


@dataclass(frozen=True)
class DimensionBound:
    """Certified lower bound 1 + kappa'(1)/log q for spectra restricted by B."""

    q: int
    members: tuple[int, ...]
    kappa_prime_1: float
    bound: float       # clamped to [0, 1]
    raw_bound: float   # unclamped value, negative only for spectrum-rich B
    subgroup_bound: float
    subgroup: tuple[int, ...]
    proper_inclusion: bool
    delta: float       # bound - subgroup_bound
    witness_vertex: tuple[float, ...]
    vertex_count: int
    symmetrized: bool  # True when the input had to be closed under reflection


def dimension_bound(b: ResidueSet) -> DimensionBound:
    b_sym = symmetrize(b)
    was_symmetrized = b_sym.members != b.members
    polytope = FeasiblePolytope.from_residues(b_sym)
    kp = kappa_prime_1(polytope)
    raw = 1.0 + kp.value / math.log(b_sym.q)
    bound = min(1.0, max(0.0, raw))
    sub = subgroup_bound(b_sym)
    return DimensionBound(
        q=b_sym.q,
        members=b_sym.sorted_members,
        kappa_prime_1=kp.value,
        bound=bound,
        raw_bound=raw,
        subgroup_bound=sub.bound,
        subgroup=sub.subgroup.elements,
        proper_inclusion=sub.proper,
        delta=bound - sub.bound,
        witness_vertex=tuple(float(x) for x in kp.witness),
        vertex_count=len(polytope.vertex_set),
        symmetrized=was_symmetrized,
    )


def def_reform_check(a: float, b_vec, p: float, polytope: FeasiblePolytope,
                     slack: float = 1e-9) -> bool:
    """Single-step growth inequality for one admissible displacement.

    Checks ((1/q) * sum_j |a + b_j|**p)**(1/p) <= a * exp(kappa(1/p)) for a >= 0
    and b in the subspace with b_j >= -a.  Violated preconditions raise
    :class:`PreconditionError`; the return value reports only the inequality.
    """
    if a < 0:
        raise PreconditionError(f"scale a must be non-negative, got {a}")
    if p <= 1.0:
        raise PreconditionError(f"exponent p must exceed 1, got {p}")
    b_vec = np.asarray(b_vec, dtype=float)
    q = polytope.q
    if b_vec.shape != (q,):
        raise PreconditionError(f"expected a length-{q} vector")
    scale = max(1.0, float(np.max(np.abs(b_vec))))
    off = polytope.basis.project_off(b_vec)
    if np.linalg.norm(off) > 1e-12 * scale:
        raise PreconditionError("vector is not in the admissible subspace")
    if b_vec.min() < -a - 1e-12 * max(1.0, a):
        raise PreconditionError("vector entries must be >= -a")
    lhs = (np.mean(np.abs(a + b_vec) ** p)) ** (1.0 / p)
    rhs = a * math.exp(kappa(1.0 / p, polytope))
    return lhs <= rhs * (1.0 + slack) + 1e-15
