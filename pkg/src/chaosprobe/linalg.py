"""Dense Hermitian kernels: eigendecomposition, Kronecker products, embeddings.

Matrices are plain 2-D numpy arrays.  Real-symmetric input (float dtype, or
complex with an identically zero imaginary part) is routed to the real
symmetric LAPACK driver.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

HERMITIAN_ATOL = 1e-12
MAX_DIM = 2**20


class NotHermitianError(ValueError):
    pass


class DimensionError(ValueError):
    pass


class EigensolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (ascending) and orthonormal eigenvectors stored as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_hermitian(a, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Validate ``a`` as a square Hermitian matrix and return it as an array.

    Complex input whose imaginary part is exactly zero is returned as float64.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    if np.iscomplexobj(a):
        if not np.any(a.imag):
            a = np.ascontiguousarray(a.real, dtype=np.float64)
        else:
            a = a.astype(np.complex128, copy=False)
    else:
        a = a.astype(np.float64, copy=False)
    dev = np.abs(a - a.conj().T)
    if dev.size and dev.max() > atol:
        i, j = np.unravel_index(np.argmax(dev), dev.shape)
        raise NotHermitianError(
            f"matrix is not Hermitian: |A[{i},{j}] - conj(A[{j},{i}])| = {dev[i, j]:.3e} > {atol:g}"
        )
    return a


def _blocks(a: np.ndarray) -> list[np.ndarray]:
    """Index sets of the connected components of the sparsity graph of ``a``."""
    n = a.shape[0]
    if n <= 2 or np.count_nonzero(a[0]) == n:
        return [np.arange(n)]
    ncomp, labels = connected_components(csr_matrix(a != 0), directed=False)
    if ncomp == 1:
        return [np.arange(n)]
    return [np.flatnonzero(labels == c) for c in range(ncomp)]


def eigh(a, check: bool = True) -> Spectrum:
    """Full eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    if check:
        a = as_hermitian(a)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver failed to converge on a {a.shape[0]}x{a.shape[0]} matrix") from exc
    return Spectrum(w, v)


def eigvalsh(a, check: bool = True) -> np.ndarray:
    """Ascending eigenvalues only.

    Matrices whose sparsity pattern splits into disconnected blocks (parity
    sectors of Majorana Hamiltonians, identity-padded local terms) are
    diagonalized block by block.
    """
    if check:
        a = as_hermitian(a)
    try:
        parts = _blocks(a)
        if len(parts) == 1:
            return np.linalg.eigvalsh(a)
        vals = [np.linalg.eigvalsh(a[np.ix_(idx, idx)]) for idx in parts]
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver failed to converge on a {a.shape[0]}x{a.shape[0]} matrix") from exc
    return np.sort(np.concatenate(vals))


def kron(a, b, max_dim: int = MAX_DIM) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    dim = a.shape[0] * b.shape[0]
    if dim > max_dim:
        raise DimensionError(f"Kronecker product dimension {dim} exceeds maximum {max_dim}")
    return np.kron(a, b)


def embed(ops: Mapping[int, np.ndarray], dims: Sequence[int], max_dim: int = MAX_DIM) -> np.ndarray:
    """Tensor product over all slots, with ``ops[slot]`` where given and identity elsewhere."""
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise DimensionError(f"subsystem dimensions must be positive, got {dims}")
    total = int(np.prod(dims, dtype=object))
    if total > max_dim:
        raise DimensionError(f"Hilbert-space dimension {total} exceeds maximum {max_dim}")
    for slot, op in ops.items():
        if not 0 <= slot < len(dims):
            raise DimensionError(f"slot {slot} out of range for {len(dims)} subsystems")
        if np.shape(op) != (dims[slot], dims[slot]):
            raise DimensionError(
                f"operator at slot {slot} has shape {np.shape(op)}, expected dimension {dims[slot]}"
            )
    # group runs of identities so each np.kron call is as large as possible
    out = np.ones((1, 1))
    pending = 1
    for slot, d in enumerate(dims):
        if slot in ops:
            if pending > 1:
                out = _kron_identity(out, pending)
                pending = 1
            out = np.kron(out, np.asarray(ops[slot]))
        else:
            pending *= d
    if pending > 1:
        out = _kron_identity(out, pending)
    return out


def _kron_identity(a: np.ndarray, n: int) -> np.ndarray:
    m = a.shape[0]
    out = np.zeros((m * n, m * n), dtype=a.dtype)
    view = out.reshape(m, n, m, n)
    for k in range(n):
        view[:, k, :, k] = a
    return out


def embed_local(op, slot: int, dims: Sequence[int], max_dim: int = MAX_DIM) -> np.ndarray:
    """Pad ``op`` with identities so it acts on subsystem ``slot`` of ``dims``."""
    return embed({slot: np.asarray(op)}, dims, max_dim=max_dim)
