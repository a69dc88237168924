"""GOE-averaged closed forms for the characteristic function of the total energy.

All formulas use the ``"element"`` variance convention of
:mod:`chaosprobe.ensembles`: the averaged level density is a semicircle of
radius 2 sigma sqrt(d), so

    <Z(x)> = sqrt(d) I_1(2 sigma sqrt(d) x) / (sigma x)

and the ramp saturates at t_plateau = 2 sqrt(d) / sigma.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SERIES_MAX = 30.0
# series is used only where e^{|z| - |Re z|} cancellation costs < ~1e-14
SERIES_CANCELLATION = 5.0
QUADRATURE_NODES = 160
MAX_ARG = 1e7


@dataclass(frozen=True)
class GoeAnalyticParams:
    dim: int
    sigma: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not (np.isfinite(self.beta) and self.beta >= 0):
            raise ValueError(f"beta must be finite and non-negative, got {self.beta}")

    @property
    def t_plateau(self) -> float:
        return 2.0 * np.sqrt(self.dim) / self.sigma


# -- modified Bessel function I_1 at complex argument ------------------------

def i1_series(z) -> np.ndarray:
    """Power series sum_k (z/2)^(2k+1) / (k! (k+1)!)."""
    z = np.asarray(z, dtype=complex)
    h = z / 2.0
    q = h * h
    term = h.copy()
    total = h.copy()
    k = 0
    while True:
        k += 1
        term = term * q / (k * (k + 1))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)) or k > 200:
            return total


def i1e_quadrature(z, nodes: int = QUADRATURE_NODES) -> np.ndarray:
    """Scaled I_1 from the periodic trapezoidal rule on (1/2pi) int_0^2pi e^{z cos th} cos th.

    The rule converges geometrically; aliasing error is of order I_{nodes-1}(z),
    negligible for |z| well below ``nodes``.
    """
    z = np.asarray(z, dtype=complex)
    th = 2.0 * np.pi * np.arange(nodes) / nodes
    c = np.cos(th)
    shift = np.abs(z.real)[..., None]
    vals = np.exp(z[..., None] * c - shift) * c
    return vals.mean(axis=-1)


def _hankel_sums(z: np.ndarray, terms: int = 60):
    """Asymptotic sums with a_k(1) = prod_j (4 - (2j-1)^2) / (k! 8^k)."""
    s_alt = np.ones_like(z)
    s_pos = np.ones_like(z)
    a = np.ones(z.shape)
    zk = np.ones_like(z)
    prev = np.full(z.shape, np.inf)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, terms):
        a = a * (4.0 - (2 * k - 1) ** 2) / (8.0 * k)
        zk = zk * z
        t = a / zk
        mag = np.abs(t)
        active &= mag < prev  # stop at the smallest term
        prev = mag
        s_alt = s_alt + np.where(active, (-1) ** k * t, 0)
        s_pos = s_pos + np.where(active, t, 0)
        if not active.any() or np.all(mag < 1e-17):
            break
    return s_alt, s_pos


def i1e_asymptotic(z) -> np.ndarray:
    """Scaled I_1 (times e^{-Re z}) from the two-exponential Hankel expansion; Re z >= 0."""
    z = np.asarray(z, dtype=complex)
    s_alt, s_pos = _hankel_sums(z)
    root = np.sqrt(2.0 * np.pi * z)
    sign = np.where(z.imag > 0, -1j, 1j)
    return (np.exp(1j * z.imag) * s_alt + sign * np.exp(-2.0 * z.real - 1j * z.imag) * s_pos) / root


def bessel_i1e(z) -> np.ndarray:
    """Exponentially scaled I_1(z) * exp(-|Re z|) for complex ``z``."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > MAX_ARG):
        raise OverflowError(f"|z| exceeds the supported maximum {MAX_ARG:g}")
    flip = z.real < 0
    w = np.where(flip, -z, z)
    out = np.empty(w.shape, dtype=complex)
    r = np.abs(w)
    use_series = (r <= SERIES_MAX) & ((r - w.real <= SERIES_CANCELLATION) | (r <= 2.0))
    use_quad = (r <= SERIES_MAX) & ~use_series
    use_asym = r > SERIES_MAX
    if use_series.any():
        ws = w[use_series]
        out[use_series] = i1_series(ws) * np.exp(-ws.real)
    if use_quad.any():
        out[use_quad] = i1e_quadrature(w[use_quad])
    if use_asym.any():
        out[use_asym] = i1e_asymptotic(w[use_asym])
    out = np.where(flip, -out, out)
    return out if out.ndim else out[()]


def bessel_i1(z) -> np.ndarray:
    """Modified Bessel function of the first kind of order one, complex argument."""
    z = np.asarray(z, dtype=complex)
    return bessel_i1e(z) * np.exp(np.abs(z.real))


# -- GOE averages -------------------------------------------------------------

def avg_partition_scaled(x, p: GoeAnalyticParams) -> np.ndarray:
    """<Z(x)> * exp(-2 sigma sqrt(d) |Re x|), with the x -> 0 limit d."""
    x = np.asarray(x, dtype=complex)
    u = 2.0 * p.sigma * np.sqrt(p.dim)
    small = np.abs(x) * u < 1e-8
    xs = np.where(small, 1.0, x)
    val = np.sqrt(p.dim) * bessel_i1e(u * xs) / (p.sigma * xs)
    # I_1(z)/z = 1/2 + z^2/16 + ...
    lim = p.dim * (1.0 + (u * x) ** 2 / 8.0) * np.exp(-u * np.abs(x.real))
    out = np.where(small, lim, val)
    return out if out.ndim else out[()]


def avg_partition(x, p: GoeAnalyticParams) -> np.ndarray:
    """GOE-averaged partition function sqrt(d) I_1(2 sigma sqrt(d) x) / (sigma x)."""
    x = np.asarray(x, dtype=complex)
    u = 2.0 * p.sigma * np.sqrt(p.dim)
    return avg_partition_scaled(x, p) * np.exp(u * np.abs(x.real))


def c_goe(t, p: GoeAnalyticParams) -> np.ndarray:
    """Ramp coefficient: tau - (tau/2) ln(1+tau) below 2 sqrt(d)/sigma, else
    2 - (tau/2) ln((t + sqrt(d)/sigma) / (t - sqrt(d)/sigma)), with tau = t sigma / sqrt(d)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("c_goe is defined for t >= 0")
    a = np.sqrt(p.dim) / p.sigma
    tau = t / a
    left = tau - 0.5 * tau * np.log1p(tau)
    tr = np.where(tau > 2.0, t, 3.0 * a)  # keep the unused branch finite
    right = 2.0 - 0.5 * (tr / a) * np.log((tr + a) / (tr - a))
    out = np.where(tau <= 2.0, left, right)
    return out if out.ndim else out[()]


def star_term(t, p: GoeAnalyticParams, alpha) -> np.ndarray:
    """Two-level correlation correction of <|Z(beta+it)|^2> for a given prefactor ``alpha``."""
    t = np.asarray(t, dtype=float)
    a = np.sqrt(p.dim) / p.sigma
    tau = t / a
    left = -alpha * a * (1.0 - tau + 0.5 * tau * np.log1p(tau))
    tr = np.where(tau > 2.0, t, 3.0 * a)
    right = alpha * a * (1.0 - 0.5 * (tr / a) * np.log((tr + a) / (tr - a)))
    return np.where(tau <= 2.0, left, right)


def plateau(p: GoeAnalyticParams) -> float:
    """<Z(2 beta)> / <Z(beta)>^2."""
    return float(np.real(avg_partition_scaled(2 * p.beta, p) / avg_partition_scaled(p.beta, p) ** 2))


def avg_G(t, p: GoeAnalyticParams) -> np.ndarray:
    """(<Z(2b)> C_GOE(t) + |<Z(b+it)>|^2) / <Z(b)>^2, evaluated on scaled partition functions."""
    t = np.asarray(t, dtype=float)
    z2 = np.real(avg_partition_scaled(2 * p.beta, p))
    z1 = np.real(avg_partition_scaled(p.beta, p))
    zt = avg_partition_scaled(p.beta + 1j * t, p)
    return (z2 * c_goe(t, p) + np.abs(zt) ** 2) / z1**2


def avg_G_star(t, p: GoeAnalyticParams) -> np.ndarray:
    """Same average assembled as <Z(2b)> + |<Z(b+it)>|^2 + star, alpha = sigma <Z(2b)> / sqrt(d)."""
    t = np.asarray(t, dtype=float)
    z2 = np.real(avg_partition_scaled(2 * p.beta, p))
    z1 = np.real(avg_partition_scaled(p.beta, p))
    zt = avg_partition_scaled(p.beta + 1j * t, p)
    alpha = p.sigma / np.sqrt(p.dim) * z2
    return (z2 + np.abs(zt) ** 2 + star_term(t, p, alpha)) / z1**2
