"""Fourier analysis on the cyclic group Z_q and arithmetic of restricted spectra.

This module owns the small-q discrete Fourier transform, the symmetric residue
sets B that parameterize which spectra are allowed, the real subspace of
admissible sibling differences (zero-sum q-vectors whose transform is supported
on B), and the divisibility predicates for membership in the restricted
frequency set C_B = {k*q**v : k mod q in B, v >= 0} | {0}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import InvalidInputError
from .spectrum import SparseSpectrum

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ResidueSet:
    """A modulus q >= 3 together with a set of allowed nonzero residues."""

    q: int
    members: frozenset[int]

    def __post_init__(self):
        if not isinstance(self.q, int) or self.q < 3:
            raise InvalidInputError(f"modulus must be an integer >= 3, got {self.q!r}")
        object.__setattr__(self, "members", frozenset(int(m) for m in self.members))
        for m in self.members:
            if not 1 <= m <= self.q - 1:
                raise InvalidInputError(f"residue {m} outside 1..{self.q - 1}")

    @classmethod
    def of(cls, q: int, members: Iterable[int]) -> "ResidueSet":
        return cls(q, frozenset(int(m) for m in members))

    @property
    def symmetric(self) -> bool:
        """True iff q - m is a member whenever m is."""
        return all((self.q - m) in self.members for m in self.members)

    @property
    def sorted_members(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.sorted_members)


def symmetrize(b: ResidueSet) -> ResidueSet:
    """Close ``b`` under the reflection m -> q - m.  Idempotent."""
    return ResidueSet.of(b.q, b.members | {b.q - m for m in b.members})


def harmonic_vector(q: int, m: int) -> np.ndarray:
    """The complex character (exp(2*pi*i*m*j/q))_{j=0..q-1} as a length-q vector."""
    j = np.arange(q)
    return np.exp(2j * np.pi * m * j / q)


def dft_zq(v, q: int | None = None) -> np.ndarray:
    """Forward transform on Z_q: vhat(m) = sum_j exp(-2*pi*i*m*j/q) * v_j.

    Unnormalized; ``inverse_dft_zq`` divides by q so the round trip is the
    identity.  Direct O(q**2) summation -- q stays small in this package.
    """
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise InvalidInputError("dft_zq expects a 1-d vector")
    n = v.shape[0]
    if q is not None and q != n:
        raise InvalidInputError(f"vector length {n} does not match q={q}")
    j = np.arange(n)
    kernel = np.exp(-2j * np.pi * np.outer(j, j) / n)
    return kernel @ v


def inverse_dft_zq(vhat, q: int | None = None) -> np.ndarray:
    """Inverse of :func:`dft_zq`: v_j = (1/q) * sum_m exp(+2*pi*i*m*j/q) * vhat(m)."""
    vhat = np.asarray(vhat, dtype=complex)
    if vhat.ndim != 1:
        raise InvalidInputError("inverse_dft_zq expects a 1-d vector")
    n = vhat.shape[0]
    if q is not None and q != n:
        raise InvalidInputError(f"vector length {n} does not match q={q}")
    j = np.arange(n)
    kernel = np.exp(2j * np.pi * np.outer(j, j) / n)
    return kernel @ vhat / n


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal real basis (columns) of the admissible-difference subspace.

    Every column sums to zero and its Z_q transform vanishes at every nonzero
    residue outside B, so the column span is exactly the real span of the
    characters indexed by B.
    """

    q: int
    dim: int
    columns: np.ndarray  # shape (q, dim)

    def project_off(self, v: np.ndarray) -> np.ndarray:
        """Component of ``v`` orthogonal to the subspace."""
        if self.dim == 0:
            return np.asarray(v, dtype=float)
        return v - self.columns @ (self.columns.T @ v)


def wb_basis(b: ResidueSet) -> SubspaceBasis:
    """Orthonormal real basis of span{characters m : m in B} inside the zero-sum hyperplane.

    For each reflection pair {m, q-m} with 2m != 0 (mod q) the basis takes the
    normalized cosine and sine vectors at frequency m; for even q with q/2 in B
    it takes the normalized alternating vector.  The cosine/sine normalization
    is sqrt(q/2) and the alternating one sqrt(q), which makes the basis exactly
    orthonormal by the character relations (no Gram-Schmidt, hence reproducible).

    ``b`` must be symmetric; call :func:`symmetrize` first if needed.
    """
    if not b.symmetric:
        raise InvalidInputError(
            f"residue set {sorted(b.members)} is not symmetric mod {b.q}; symmetrize it first"
        )
    q = b.q
    j = np.arange(q)
    cols = []
    for m in b.sorted_members:
        if m < (q + 1) // 2:
            ang = TWO_PI * m * j / q
            cols.append(np.cos(ang) / math.sqrt(q / 2))
            cols.append(np.sin(ang) / math.sqrt(q / 2))
        elif q % 2 == 0 and m == q // 2:
            cols.append(((-1.0) ** j) / math.sqrt(q))
    if cols:
        columns = np.column_stack(cols)
    else:
        columns = np.zeros((q, 0))
    return SubspaceBasis(q=q, dim=columns.shape[1], columns=columns)


def q_valuation(n: int, q: int) -> tuple[int, int]:
    """Write n = k * q**v with q not dividing k; returns (v, k).  n must be nonzero."""
    if q < 2:
        raise InvalidInputError(f"base must be >= 2, got {q}")
    if n == 0:
        raise InvalidInputError("q_valuation undefined at 0")
    v, k = 0, int(n)
    while k % q == 0:
        k //= q
        v += 1
    return v, k


def in_cb(n: int, b: ResidueSet, absolute: bool = False) -> bool:
    """Membership of the integer frequency n in C_B.

    True iff n == 0 or n = k * q**v with q not dividing k and (k mod q) in B.
    Negative n is tested literally by default: the cofactor keeps its sign and
    its residue is reduced into 0..q-1.  ``absolute=True`` instead tests |n|
    against the symmetrized residue set (the two conventions agree whenever B
    is symmetric, which covers every real-measure use).
    """
    if n == 0:
        return True
    if absolute:
        return in_cb(abs(n), symmetrize(b))
    _, k = q_valuation(n, b.q)
    return (k % b.q) in b.members


@dataclass(frozen=True)
class Subgroup:
    """The subgroup of Z_q generated by a divisor d of q: all multiples of d."""

    q: int
    generator: int

    @property
    def order(self) -> int:
        return self.q // self.generator

    @property
    def elements(self) -> tuple[int, ...]:
        return tuple(range(0, self.q, self.generator))

    def __contains__(self, m: int) -> bool:
        return m % self.generator == 0


def subgroups(q: int) -> list[Subgroup]:
    """All subgroups of Z_q (one per divisor of q), sorted by order."""
    if q < 2:
        raise InvalidInputError(f"modulus must be >= 2, got {q}")
    divisors = [d for d in range(1, q + 1) if q % d == 0]
    return sorted((Subgroup(q, d) for d in divisors), key=lambda h: h.order)


class MinimalSubgroup(NamedTuple):
    subgroup: Subgroup
    proper_inclusion: bool


def minimal_subgroup_containing(b: ResidueSet) -> MinimalSubgroup:
    """Smallest subgroup H of Z_q with B contained in H \\ {0}.

    H is the set of multiples of gcd(B | {q}).  ``proper_inclusion`` flags
    B != H \\ {0}, the case where the subgroup bound is known to be loose.
    """
    if not b.members:
        raise InvalidInputError("minimal_subgroup_containing needs a nonempty residue set")
    g = b.q
    for m in b.members:
        g = math.gcd(g, m)
    h = Subgroup(b.q, g)
    proper = set(b.members) != set(h.elements) - {0}
    return MinimalSubgroup(h, proper)


def spectrum_richness(spectrum: Iterable[int], q: int) -> set[int]:
    """Residues m in 1..q-1 realized by a divisor of some nonzero spectrum element.

    Zero frequencies are ignored (everything divides 0); negative entries are
    reduced to their absolute value.
    """
    if q < 2:
        raise InvalidInputError(f"modulus must be >= 2, got {q}")
    found: set[int] = set()
    for n in spectrum:
        n = abs(int(n))
        if n == 0:
            continue
        d = 1
        while d * d <= n:
            if n % d == 0:
                for div in (d, n // d):
                    r = div % q
                    if r != 0:
                        found.add(r)
            d += 1
    return found


def counterexample_measure(q: int, l: int) -> SparseSpectrum:
    """Spectrum of the complex atomic measure (1/q) * sum_k w**(k*l) * delta_{k/q}.

    Its transform equals 1 on the whole residue class l (mod q) and 0 elsewhere;
    coefficients are returned truncated to |n| <= q**2.  The measure is atomic
    (dimension zero) yet its spectrum sits inside C_{{l}} -- the standard witness
    that dimension bounds for restricted spectra require non-negativity.
    """
    if not 1 <= l <= q - 1:
        raise InvalidInputError(f"residue l={l} outside 1..{q - 1}")
    freqs = [n for n in range(-q * q, q * q + 1) if n % q == l % q]
    return SparseSpectrum.from_dict({n: 1.0 for n in freqs}, q=q)
