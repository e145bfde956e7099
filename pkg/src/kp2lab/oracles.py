"""Independent reference computations used by tests and acceptance checks.

Each oracle takes a different route from the production code it checks:
exhaustive enumeration instead of dynamic programming, explicit mode sums
instead of FFT products and quadrature, exact rationals instead of floats.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct

import numpy as np

from .spectral import Field2D, FrequencyGrid

__all__ = [
    "pvariation_bruteforce",
    "duhamel_mode_sum",
    "resonance_exact",
    "cosine_invariants",
    "interpolation_discrete_min",
]


def pvariation_bruteforce(values, p: float, left=None) -> float:
    """V^p norm by enumerating every partition.

    ``values`` has shape (n, ...) with n small; the path is extended by the
    left value (default zero) at -inf and by zero at +inf, and both ends are
    always included.
    """
    v = np.asarray(values)
    n = v.shape[0]
    flat = v.reshape(n, -1)
    lv = np.zeros((1, flat.shape[1]), flat.dtype) if left is None else np.reshape(left, (1, -1))
    ext = np.concatenate([lv, flat, np.zeros_like(lv)])
    m = n + 2
    diff = ext[:, None, :] - ext[None, :, :]
    D = np.sqrt(np.sum(np.abs(diff) ** 2, axis=-1))
    masks = ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(bool)
    chosen = np.ones((masks.shape[0], m), bool)
    chosen[:, 1:-1] = masks
    cnt = np.cumsum(chosen, axis=1)
    i, j = np.triu_indices(m, 1)
    between = cnt[:, j - 1] - cnt[:, i]
    active = chosen[:, i] & chosen[:, j] & (between == 0)
    if np.isinf(p):
        return float(np.max(np.where(active, D[i, j], 0.0)))
    sums = np.sum(np.where(active, D[i, j] ** p, 0.0), axis=1)
    return float(np.max(sums) ** (1 / p))


def duhamel_mode_sum(f1: Field2D, f2: Field2D, times, mask=None):
    """Exact Duhamel term for free inputs e^{tS} f1, e^{tS} f2 by explicit mode pairs.

    Every pair of nonzero coefficients contributes c1 c2 / sqrt(A) * i xi at
    the sum frequency, times e^{t w} (e^{i t W} - 1) / (i W) with W the
    frequency mismatch.  Mode sums that leave the grid are dropped, which
    matches a dealiased product when ``mask`` removes them.
    """
    g = f1.grid
    times = np.asarray(times, dtype=float)
    out = np.zeros((times.size,) + g.shape, complex)
    if mask is None:
        mask = np.ones(g.shape, bool)
    idx1 = np.argwhere((f1.coeffs != 0) & mask)
    idx2 = np.argwhere((f2.coeffs != 0) & mask)
    jx, ky = g.jx, g.ky
    for (a1, b1), (a2, b2) in iproduct(idx1, idx2):
        j = jx[a1] + jx[a2]
        k = ky[b1] + ky[b2]
        if not (-g.nx // 2 <= j < g.nx // 2 and -g.ny // 2 <= k < g.ny // 2):
            continue
        r, s = j % g.nx, k % g.ny
        if not mask[r, s] or j == 0:
            continue
        xi = 2 * np.pi * j / g.Lx
        eta = 2 * np.pi * k / g.Ly
        w = xi**3 - eta**2 / xi
        w1, w2 = g.omega[a1, b1], g.omega[a2, b2]
        W = w1 + w2 - w
        if W == 0:
            prof = times.astype(complex)
        else:
            prof = (np.exp(1j * times * W) - 1) / (1j * W)
        amp = f1.coeffs[a1, b1] * f2.coeffs[a2, b2] / np.sqrt(g.area) * 1j * xi
        out[:, r, s] += amp * np.exp(1j * times * w) * prof
    return out


def resonance_exact(xi1, eta1, xi2, eta2):
    """(sum of modulations, closed form with sign) in exact rational arithmetic."""
    xi1, eta1, xi2, eta2 = (Fraction(x) for x in (xi1, eta1, xi2, eta2))
    xi3, eta3 = -xi1 - xi2, -eta1 - eta2
    lam = -(xi1**3 + xi2**3 + xi3**3) + eta1**2 / xi1 + eta2**2 / xi2 + eta3**2 / xi3
    p = xi1 * xi2 * xi3
    closed = 3 * p + (xi2 * eta1 - xi1 * eta2) ** 2 / p
    return lam, closed


def cosine_invariants(Lx: float, Ly: float, a: float = 1.0):
    """(I0, I1) of u = a cos(2 pi x / Lx) on the box [0, Lx) x [0, Ly).

    I0 = a^2 Lx Ly / 4 and, since the cube and the y-derivative integrate to
    zero, I1 = (2 pi / Lx)^2 a^2 Lx Ly / 4.
    """
    I0 = a * a * Lx * Ly / 4
    return I0, (2 * np.pi / Lx) ** 2 * I0


def interpolation_discrete_min(C_p: float, C_q: float, p: float, q: float, n_max: int = 64):
    """min over N in 1..n_max of 4 C_p N + 4 C_q 2^{-N (1 - p/q)}, by enumeration."""
    N = np.arange(1, n_max + 1)
    vals = 4 * C_p * N + 4 * C_q * 2.0 ** (-N * (1 - p / q))
    k = int(np.argmin(vals))
    return float(vals[k]), int(N[k])


def grid_for(n: int) -> FrequencyGrid:
    return FrequencyGrid(n, n)
