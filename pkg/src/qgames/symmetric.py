"""Symmetric (Bose) subspace machinery for n copies of a d-level system.

The symmetric subspace of (C^d)^{tensor n} is spanned by the symmetrized
occupation-number states: one basis vector per way of distributing n
indistinguishable excitations over d levels, so its dimension is
binomial(d+n-1, n).  We build the isometry whose columns are those vectors and
derive the projector from it, which costs d^n * dim_sym instead of the n! * d^n
of averaging permutation matrices.

Column ordering is lexicographic over occupation vectors (n_0, ..., n_{d-1}),
descending in n_0.  For d = 2 this makes column k the spin state with
n - k excitations in level 0, i.e. magnetic quantum number m = n/2 - k in
decreasing order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from .core import DEFAULT_SIZE_CAP, _frozen, check_size_cap


def dim_sym(d: int, n: int) -> int:
    """Dimension of the symmetric subspace: binomial(d+n-1, n)."""
    if d < 1 or n < 0:
        raise ValueError(f"invalid arguments d={d}, n={n}")
    return math.comb(d + n - 1, n)


def occupations(d: int, n: int) -> list[tuple[int, ...]]:
    """Occupation vectors (n_0, ..., n_{d-1}) with sum n, descending in n_0."""
    occs = []
    for levels in combinations_with_replacement(range(d), n):
        occ = [0] * d
        for lv in levels:
            occ[lv] += 1
        occs.append(tuple(occ))
    return occs


@lru_cache(maxsize=None)
def _isometry(d: int, n: int) -> np.ndarray:
    occs = occupations(d, n)
    col_of = {occ: i for i, occ in enumerate(occs)}
    full = d**n
    iso = np.zeros((full, len(occs)))
    for b in range(full):
        occ = [0] * d
        rem = b
        for _ in range(n):
            occ[rem % d] += 1
            rem //= d
        iso[b, col_of[tuple(occ)]] = 1.0
    iso /= np.sqrt(iso.sum(axis=0))
    return _frozen(iso)


def sym_isometry(d: int, n: int, size_cap: int = DEFAULT_SIZE_CAP) -> np.ndarray:
    """Isometry (d^n x dim_sym) whose columns are the occupation-number states."""
    check_size_cap(d**n, size_cap)
    return _isometry(d, n)


@lru_cache(maxsize=None)
def _projector(d: int, n: int) -> np.ndarray:
    iso = _isometry(d, n)
    return _frozen(iso @ iso.conj().T)


def sym_projector(d: int, n: int, size_cap: int = DEFAULT_SIZE_CAP) -> np.ndarray:
    """Orthogonal projector onto the symmetric subspace of (C^d)^{tensor n}."""
    check_size_cap(d**n, size_cap)
    return _projector(d, n)


def haar_moment(d: int, n: int, size_cap: int = DEFAULT_SIZE_CAP) -> np.ndarray:
    """Exact n-th moment of a Haar-random pure state.

    The average of (|psi><psi|)^{tensor n} over Haar psi equals the symmetric
    projector divided by its rank: the average is invariant under every
    U^{tensor n}, is supported on the symmetric subspace, and that subspace
    carries an irreducible action, so the average must be proportional to the
    projector; unit trace fixes the constant.  This identity turns every Haar
    average in the game modules into an exact finite computation.
    """
    return sym_projector(d, n, size_cap) / dim_sym(d, n)


@dataclass(frozen=True)
class SymBasis:
    """Occupation-number basis of the symmetric subspace, as an isometry."""

    d: int
    n: int

    @property
    def dim(self) -> int:
        return dim_sym(self.d, self.n)

    @property
    def isometry(self) -> np.ndarray:
        return sym_isometry(self.d, self.n)

    def compress(self, full_vector: np.ndarray) -> np.ndarray:
        """Coordinates of a (symmetric) full-space vector in this basis."""
        return self.isometry.conj().T @ np.asarray(full_vector, dtype=complex)

    def embed(self, sym_vector: np.ndarray) -> np.ndarray:
        """Full-space vector of symmetric-basis coordinates."""
        return self.isometry @ np.asarray(sym_vector, dtype=complex)

    def embed_operator(self, sym_matrix: np.ndarray) -> np.ndarray:
        iso = self.isometry
        return iso @ np.asarray(sym_matrix, dtype=complex) @ iso.conj().T


def transposition_operator(d: int, n: int, i: int, j: int) -> np.ndarray:
    """Permutation matrix swapping tensor factors i and j of (C^d)^{tensor n}."""
    dims = [d] * n
    perm = list(range(n))
    perm[i], perm[j] = perm[j], perm[i]
    op = np.eye(d**n).reshape(dims + dims)
    op = op.transpose(perm + list(range(n, 2 * n)))
    return op.reshape(d**n, d**n)
