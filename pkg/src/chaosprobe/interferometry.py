"""Single-qubit interferometry readout of the characteristic function.

Protocol: ancilla in |+>, system in rho_th; apply the controlled evolution
U(t) = |1><1| x exp(itX) + |0><0| x 1, then a Hadamard on the ancilla, and
measure sigma_z and sigma_y.  The reduced ancilla state is

    rho_anc = (I + Re g(t) sigma_z - Im g(t) sigma_y) / 2,

so <sigma_z> = Re g and <sigma_y> = -Im g for the Hadamard convention
H = [[1, 1], [1, -1]] / sqrt(2).
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .characteristic import ObservableWeights, evaluate_curve
from .linalg import as_hermitian, eigh

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
FULL_STATE_MAX_DIM = 64


@dataclass(frozen=True)
class ShotEstimate:
    count: int
    estimated_re: float
    estimated_im: float

    @property
    def G(self) -> float:
        return self.estimated_re**2 + self.estimated_im**2


@dataclass(frozen=True)
class AncillaReadout:
    t: float
    exact_re: float
    exact_im: float
    shots: ShotEstimate | None = None


def ancilla_state(w: ObservableWeights, t: float) -> np.ndarray:
    g = complex(evaluate_curve(w, [t]).g_values[0])
    return 0.5 * (np.eye(2) + g.real * SIGMA_Z - g.imag * SIGMA_Y)


def readout_from_state(rho_anc: np.ndarray, t: float) -> AncillaReadout:
    re = float(np.real(np.trace(SIGMA_Z @ rho_anc)))
    im = -float(np.real(np.trace(SIGMA_Y @ rho_anc)))
    return AncillaReadout(float(t), re, im)


def ancilla_expectations(w: ObservableWeights, t: float) -> AncillaReadout:
    """Exact readout from the reduced ancilla state; O(d) given the weights."""
    return readout_from_state(ancilla_state(w, t), t)


def ancilla_state_full(h, x, beta: float, t: float) -> np.ndarray:
    """Reduced ancilla state from the explicit 2d-dimensional joint evolution.

    Structural cross-check of the protocol; limited to small systems.
    """
    h = as_hermitian(h)
    x = as_hermitian(x)
    d = h.shape[0]
    if d > FULL_STATE_MAX_DIM:
        raise ValueError(f"joint-state simulation limited to d <= {FULL_STATE_MAX_DIM}, got {d}")
    hs = eigh(h, check=False)
    b = np.exp(-beta * (hs.eigenvalues - hs.eigenvalues.min()))
    rho = (hs.eigenvectors * (b / b.sum())) @ hs.eigenvectors.conj().T
    xs = eigh(x, check=False)
    ux = (xs.eigenvectors * np.exp(1j * t * xs.eigenvalues)) @ xs.eigenvectors.conj().T
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    u = np.kron(p1, ux) + np.kron(p0, np.eye(d))
    plus = np.full((2, 2), 0.5)
    joint = u @ np.kron(plus, rho) @ u.conj().T
    had = np.kron(HADAMARD, np.eye(d))
    joint = had @ joint @ had.conj().T
    return np.einsum("aibi->ab", joint.reshape(2, d, 2, d))


def sample_shots(readout: AncillaReadout, n_shots: int, seed) -> AncillaReadout:
    """Finite-shot estimates: n_shots projective measurements per Pauli basis."""
    if int(n_shots) != n_shots or n_shots < 1:
        raise ValueError(f"n_shots must be a positive integer, got {n_shots}")
    n = int(n_shots)
    rng = np.random.default_rng(seed)
    p_re = min(1.0, max(0.0, 0.5 * (1.0 + readout.exact_re)))
    p_im = min(1.0, max(0.0, 0.5 * (1.0 + readout.exact_im)))
    up_re = rng.binomial(n, p_re)
    up_im = rng.binomial(n, p_im)
    est = ShotEstimate(n, (2 * up_re - n) / n, (2 * up_im - n) / n)
    return replace(readout, shots=est)
