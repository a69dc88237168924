"""Majorana operators and the coupled SYK Hamiltonian.

Majoranas are normalized to {chi_a, chi_b} = delta_ab and realized on
``n_qubits = total // 2`` qubits through a Jordan-Wigner chain,

    chi_{2m}   = Z x ... x Z x X x I x ... x I / sqrt(2)
    chi_{2m+1} = Z x ... x Z x Y x I x ... x I / sqrt(2)

(zero-based, Pauli at qubit m, qubit 0 the leftmost tensor factor).  Left
Majoranas of the coupled model are chain indices 0..N-1, right ones N..2N-1.

Hamiltonians are assembled from Pauli strings: every Majorana monomial is a
signed permutation matrix, so each term costs O(2^n_qubits).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

MAX_MAJORANAS = 24

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _check_total(total: int, max_majoranas: int):
    if int(total) != total or total < 2 or total % 2:
        raise ValueError(f"number of Majoranas must be a positive even integer, got {total}")
    if total > max_majoranas:
        raise ValueError(f"{total} Majoranas exceed the configured maximum {max_majoranas}")


def majorana_ops(total: int, max_majoranas: int = MAX_MAJORANAS) -> list[np.ndarray]:
    """Dense Jordan-Wigner Majorana matrices, built by explicit Kronecker products."""
    _check_total(total, max_majoranas)
    n = total // 2
    ops = []
    for a in range(total):
        m = a // 2
        factors = [PAULI_Z] * m + [PAULI_X if a % 2 == 0 else PAULI_Y] + [PAULI_I] * (n - m - 1)
        op = np.ones((1, 1), dtype=complex)
        for f in factors:
            op = np.kron(op, f)
        ops.append(op / np.sqrt(2.0))
    return ops


# A Pauli string is (coef, x, z) meaning coef * prod_q X_q^{x_q} Z_q^{z_q}, with
# qubit q stored at bit n-1-q of the integer masks (matches np.kron ordering).

def _majorana_string(a: int, n: int) -> tuple[complex, int, int]:
    m = a // 2
    bit = 1 << (n - 1 - m)
    zmask = sum(1 << (n - 1 - q) for q in range(m))
    if a % 2 == 0:
        return 1.0 / np.sqrt(2.0), bit, zmask
    # Y = i X Z
    return 1j / np.sqrt(2.0), bit, zmask | bit


def _multiply(p, q) -> tuple[complex, int, int]:
    c1, x1, z1 = p
    c2, x2, z2 = q
    sign = -1.0 if bin(z1 & x2).count("1") % 2 else 1.0
    return c1 * c2 * sign, x1 ^ x2, z1 ^ z2


def monomial_string(indices, n: int) -> tuple[complex, int, int]:
    """Pauli string of the ordered Majorana product chi_{i1} chi_{i2} ..."""
    out = (1.0 + 0j, 0, 0)
    for a in indices:
        out = _multiply(out, _majorana_string(a, n))
    return out


@lru_cache(maxsize=None)
def _parity_table(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    par = np.zeros(2**n, dtype=np.int8)
    for q in range(n):
        par ^= ((idx >> q) & 1).astype(np.int8)
    return par


def add_string(h: np.ndarray, coef: complex, string, n: int) -> None:
    """In place: h += coef * (Pauli string as a dense 2^n matrix)."""
    c, x, z = string
    cols = np.arange(2**n)
    signs = 1.0 - 2.0 * _parity_table(n)[z & cols]
    h[cols ^ x, cols] += (coef * c) * signs


def string_matrix(string, n: int) -> np.ndarray:
    h = np.zeros((2**n, 2**n), dtype=complex)
    add_string(h, 1.0, string, n)
    return h


@dataclass(frozen=True)
class CsykSpec:
    n_per_side: int
    J: float = 1.0
    K: float = 1.0
    mu: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if int(self.n_per_side) != self.n_per_side or self.n_per_side < 4:
            raise ValueError(f"n_per_side must be an integer >= 4, got {self.n_per_side}")
        if 2 * self.n_per_side > MAX_MAJORANAS:
            raise ValueError(f"2N = {2 * self.n_per_side} exceeds the configured maximum {MAX_MAJORANAS}")
        if not self.J > 0 or not self.K > 0:
            raise ValueError("J and K must be positive")
        if not (np.isfinite(self.mu) and self.mu >= 0):
            raise ValueError(f"mu must be finite and non-negative, got {self.mu}")

    @property
    def dim(self) -> int:
        return 2**self.n_per_side


@dataclass(frozen=True)
class CsykCouplings:
    quartic_left: np.ndarray  # ordered as itertools.combinations(range(N), 4)
    quartic_right: np.ndarray
    bilinear: np.ndarray


@dataclass(frozen=True)
class CsykHamiltonians:
    h_left: np.ndarray
    h_right: np.ndarray
    h_bilinear: np.ndarray
    h_total: np.ndarray
    couplings: CsykCouplings


def sample_couplings(n: int, J: float, K: float, rng: np.random.Generator) -> CsykCouplings:
    """<J_klmn^2> = 3! J^2 / N^3 and <K_kk^2> = K^2 / N^2, all zero mean."""
    sd_j = np.sqrt(6.0 * J**2 / n**3)
    nq = comb(n, 4)
    left = sd_j * rng.standard_normal(nq)
    right = sd_j * rng.standard_normal(nq)
    bil = (K / n) * rng.standard_normal(n)
    return CsykCouplings(left, right, bil)


def quartic_hamiltonian(coeffs, offset: int, n: int) -> np.ndarray:
    """sum_{k<l<m<n} J_klmn chi_k chi_l chi_m chi_n over chain indices offset..offset+n-1."""
    h = np.zeros((2**n, 2**n), dtype=complex)
    for c, idx in zip(coeffs, combinations(range(offset, offset + n), 4)):
        add_string(h, c, monomial_string(idx, n), n)
    return h


def bilinear_hamiltonian(coeffs, n: int) -> np.ndarray:
    """i sum_k K_kk chi_k^L chi_k^R."""
    h = np.zeros((2**n, 2**n), dtype=complex)
    for k, c in enumerate(coeffs):
        add_string(h, 1j * c, monomial_string((k, n + k), n), n)
    return h


def csyk_from_couplings(couplings: CsykCouplings, mu: float) -> CsykHamiltonians:
    n = couplings.bilinear.size
    hl = quartic_hamiltonian(couplings.quartic_left, 0, n)
    hr = quartic_hamiltonian(couplings.quartic_right, n, n)
    hb = bilinear_hamiltonian(couplings.bilinear, n)
    return CsykHamiltonians(hl, hr, hb, hl + hr + mu * hb, couplings)


def build_csyk(spec: CsykSpec, rng: np.random.Generator | None = None) -> CsykHamiltonians:
    """Coupled SYK pieces; disorder drawn from ``rng`` or, if omitted, from ``spec.seed``."""
    if rng is None:
        rng = np.random.default_rng(int(spec.seed))
    couplings = sample_couplings(spec.n_per_side, spec.J, spec.K, rng)
    return csyk_from_couplings(couplings, spec.mu)
