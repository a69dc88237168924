"""Thermal full counting statistics of an observable and its characteristic function.

For a Hamiltonian H at inverse temperature beta and an observable X with
eigenpairs (x_n, |x_n>), the outcome weights are w_n = <x_n|rho_th|x_n>, and

    g(t) = tr(rho_th exp(itX)) = sum_n w_n exp(i t x_n),    G(t) = |g(t)|^2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DimensionError, Spectrum, as_hermitian, eigh, eigvalsh

WEIGHT_CLAMP = 1e-12
_CHUNK = 1 << 22


@dataclass(frozen=True)
class ThermalState:
    """Gibbs state of H stored in its eigenbasis with energies shifted by E_min."""

    beta: float
    basis: Spectrum
    populations: np.ndarray
    log_partition: float

    @property
    def partition_value(self) -> float:
        return float(np.exp(self.log_partition))


@dataclass(frozen=True)
class ObservableWeights:
    eigenvalues: np.ndarray
    weights: np.ndarray
    log_partition: float = 0.0  # log Z(beta) of the state the weights came from

    @property
    def dim(self) -> int:
        return self.eigenvalues.size


@dataclass(frozen=True)
class CharacteristicCurve:
    times: np.ndarray
    g_values: np.ndarray

    @property
    def G_values(self) -> np.ndarray:
        return np.abs(self.g_values) ** 2


def boltzmann(energies, beta: float) -> tuple[np.ndarray, float]:
    """Normalized populations exp(-beta E_n)/Z and log Z, computed with a max-shift."""
    e = np.asarray(energies, dtype=float)
    if beta == 0:
        return np.full(e.size, 1.0 / e.size), float(np.log(e.size))
    e0 = e.min()
    b = np.exp(-beta * (e - e0))
    z = b.sum()
    return b / z, float(np.log(z) - beta * e0)


def _check_beta(beta: float):
    if not np.isfinite(beta) or beta < 0:
        raise ValueError(f"beta must be finite and non-negative, got {beta}")


def thermal_state(h, beta: float) -> ThermalState:
    _check_beta(beta)
    spec = eigh(h)
    p, logz = boltzmann(spec.eigenvalues, beta)
    return ThermalState(float(beta), spec, p, logz)


def _finish(x, w, logz) -> ObservableWeights:
    w = np.where(w < 0, np.where(w < -WEIGHT_CLAMP, w, 0.0), w)
    if np.any(w < 0):
        raise ArithmeticError(f"negative outcome weight {w.min():.3e}")
    return ObservableWeights(np.asarray(x, dtype=float), w, logz)


def weights_from_state(state: ThermalState, x) -> ObservableWeights:
    """Outcome weights of observable ``x`` in a precomputed thermal state."""
    x = as_hermitian(x)
    if x.shape[0] != state.basis.dim:
        raise DimensionError(f"observable dimension {x.shape[0]} != Hamiltonian dimension {state.basis.dim}")
    xs = eigh(x, check=False)
    overlap = np.abs(xs.eigenvectors.conj().T @ state.basis.eigenvectors) ** 2
    return _finish(xs.eigenvalues, overlap @ state.populations, state.log_partition)


def thermal_weights(h, x, beta: float) -> ObservableWeights:
    """Weights of the spectrum of ``x`` in the Gibbs state of ``h``.

    Pass ``x=None`` (or ``x is h``) for X = H, which needs eigenvalues only.
    At beta = 0 the state is I/d and only the spectrum of ``x`` is computed.
    """
    _check_beta(beta)
    same = x is None or x is h
    h = as_hermitian(h)
    if same:
        e = eigvalsh(h, check=False)
        p, logz = boltzmann(e, beta)
        return _finish(e, p, logz)
    x = as_hermitian(x)
    if x.shape != h.shape:
        raise DimensionError(f"observable dimension {x.shape[0]} != Hamiltonian dimension {h.shape[0]}")
    if beta == 0:
        xv = eigvalsh(x, check=False)
        return _finish(xv, np.full(xv.size, 1.0 / xv.size), float(np.log(xv.size)))
    return weights_from_state(thermal_state(h, beta), x)


def evaluate_curve(w: ObservableWeights, times) -> CharacteristicCurve:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or not np.all(np.isfinite(t)):
        raise ValueError("times must be a finite one-dimensional sequence")
    g = np.empty(t.size, dtype=complex)
    step = max(1, _CHUNK // max(1, w.dim))
    for s in range(0, t.size, step):
        g[s:s + step] = np.exp(1j * np.outer(t[s:s + step], w.eigenvalues)) @ w.weights
    return CharacteristicCurve(t, g)


def spectral_distribution(w: ObservableWeights, bins: int, range: tuple | None = None):
    """Histogram of P(x): (bin edges, probability mass per bin)."""
    if int(bins) != bins or bins < 1:
        raise ValueError(f"bins must be a positive integer, got {bins}")
    x = w.eigenvalues
    if range is None:
        lo, hi = float(x.min()), float(x.max())
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
    else:
        lo, hi = map(float, range)
        if not hi > lo:
            raise ValueError(f"empty histogram range {range}")
        inside = (x >= lo) & (x <= hi)
        if not np.any(inside):
            raise ValueError(f"no eigenvalue lies inside the range [{lo}, {hi}]")
    mass, edges = np.histogram(x, bins=int(bins), range=(lo, hi), weights=w.weights)
    return edges, mass


def time_grid(t_min: float = 1e-2, t_max: float = 1e4, points: int = 400, log: bool = True,
              include_zero: bool = True) -> np.ndarray:
    if not (t_min > 0 and t_max > t_min and points >= 2):
        raise ValueError(f"invalid time grid ({t_min}, {t_max}, {points})")
    t = np.geomspace(t_min, t_max, points) if log else np.linspace(t_min, t_max, points)
    return np.concatenate([[0.0], t]) if include_zero else t


def partition_sum(energies, s) -> np.ndarray:
    """Z(s) = sum_n exp(-s E_n) for complex s (broadcast over ``s``)."""
    e = np.asarray(energies, dtype=float)
    s = np.asarray(s, dtype=complex)
    return np.exp(-np.multiply.outer(s, e)).sum(axis=-1)
