"""Seeded Monte Carlo estimation of dispersive, bilinear and modulation constants.

Every trial draws its own generator from ``trial_seed(base, i)`` so any
single trial can be replayed from the seed stored in the report.  Reported
maxima are observed constants, i.e. lower bounds on the true suprema.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from .paths import SampledPath, p_variation_norm
from .spectral import (
    DyadicIndex,
    Field2D,
    FrequencyGrid,
    band_multiplier,
    project_modulation,
    propagator_phases,
    psi,
    reflect,
)

__all__ = [
    "ESTIMATES",
    "resonance_check",
    "sample_band_limited_field",
    "EstimateSpec",
    "EstimateReport",
    "run_estimate",
    "run_trial",
    "trial_seed",
    "fit_scaling_exponent",
    "bilinear_sweep",
    "atom_transfer_check",
    "random_step_path",
]

ESTIMATES = ("l4_strichartz", "local_smoothing", "bilinear_N1N2", "bilinear_interpolated",
             "modulation_decay", "besov_embedding")

CORE_LEVEL = 0.995


# --------------------------------------------------------------------------
# resonance identity
# --------------------------------------------------------------------------


def resonance_check(xi1, eta1, xi2, eta2, check: bool = True, rtol: float = 1e-9,
                    min_xi: float = 1e-8):
    """Sum of the three modulations and the closed-form magnitude.

    Works elementwise on arrays.  With the convolution constraint the sum is
    -sum xi_i^3 + sum eta_i^2 / xi_i; the closed form is
    |3 xi1 xi2 xi3 + (xi2 eta1 - xi1 eta2)^2 / (xi1 xi2 xi3)|.
    """
    xi1, eta1, xi2, eta2 = np.broadcast_arrays(*(np.asarray(a, dtype=float)
                                                 for a in (xi1, eta1, xi2, eta2)))
    xi3 = -xi1 - xi2
    eta3 = -eta1 - eta2
    scale = np.maximum.reduce([np.abs(xi1), np.abs(xi2), np.ones_like(xi1)])
    for name, x in (("xi1", xi1), ("xi2", xi2), ("xi1 + xi2", xi3)):
        if np.any(np.abs(x) < min_xi * scale):
            raise ValueError(f"{name} is zero or too close to zero")
    lam = -(xi1**3 + xi2**3 + xi3**3) + (eta1**2 / xi1 + eta2**2 / xi2 + eta3**2 / xi3)
    p = xi1 * xi2 * xi3
    rhs = np.abs(3 * p + (xi2 * eta1 - xi1 * eta2) ** 2 / p)
    if check:
        mag = np.abs(lam)
        if np.any(np.abs(mag - rhs) > rtol * np.maximum(rhs, 1e-300)):
            raise AssertionError("resonance magnitude mismatch")
        if np.any(mag < 3 * np.abs(p) * (1 - rtol)):
            raise AssertionError("resonance lower bound violated")
    if lam.ndim == 0:
        return float(lam), float(rhs)
    return lam, rhs


# --------------------------------------------------------------------------
# trial data
# --------------------------------------------------------------------------


def _band_value(band) -> Optional[float]:
    if band is None:
        return None
    if isinstance(band, DyadicIndex):
        return band.value
    return DyadicIndex.of(band).value


def band_core(grid: FrequencyGrid, band=None, eta_cap: Optional[float] = None) -> np.ndarray:
    """Boolean support of sampled coefficients.

    For a dyadic band N: |xi| in the core {psi(|xi|/N) >= 0.995}; the band
    must satisfy 2N below the xi-Nyquist frequency.  Nyquist lines and the
    xi = 0 column are always excluded.
    """
    N = _band_value(band)
    xi = np.abs(grid.xi)
    jx_ok = (grid.jx != -grid.nx // 2) & (grid.jx != 0)
    ky_ok = grid.ky != -grid.ny // 2
    if eta_cap is not None:
        ky_ok &= np.abs(grid.eta) <= eta_cap
    if N is None:
        mx = jx_ok
    else:
        nyq = np.pi * grid.nx / grid.Lx
        if not 2 * N < nyq:
            raise ValueError(f"band N = {N:g} not resolvable: 2N must stay below Nyquist {nyq:g}")
        mx = jx_ok & (psi(xi / N) >= CORE_LEVEL)
    mask = mx[:, None] & ky_ok[None, :]
    if not mask.any():
        raise ValueError(f"band N = {N:g} contains no grid frequency")
    return mask


def _symmetrize(c: np.ndarray) -> np.ndarray:
    return 0.5 * (c + np.conj(reflect(c)))


def sample_band_limited_field(grid: FrequencyGrid, band=None, seed=0, real: bool = True,
                              eta_cap: Optional[float] = None) -> Field2D:
    """Unit-L^2 complex Gaussian field supported on a dyadic band core (or all xi != 0).

    ``seed`` may be an int or a numpy Generator.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    mask = band_core(grid, band, eta_cap)
    c = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)) * mask
    if real:
        c = _symmetrize(c)
    n = np.linalg.norm(c)
    if n == 0:
        raise ValueError("sampled field vanished")
    return Field2D(grid, c / n, real)


def random_step_path(grid: FrequencyGrid, times: np.ndarray, rng: np.random.Generator,
                     max_jumps: int = 6, band=None):
    """Twisted step path e^{tS} w(t) with 1..max_jumps pieces and zero left value.

    Returns ``(twisted, steps)`` where ``steps`` holds the exact step values w(t),
    so V^2_S norms can be taken without untwisting round-off.  Jump indices
    are drawn before the field values.
    """
    n = len(times)
    k = int(rng.integers(1, max_jumps + 1))
    cuts = np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False)) if k > 1 else np.zeros(0, int)
    amps = rng.standard_normal(k)
    starts = np.concatenate([[0], cuts])
    ends = np.concatenate([cuts, [n]])
    vals = np.empty((n,) + grid.shape, complex)
    for a, b, s in zip(starts, ends, amps):
        f = sample_band_limited_field(grid, band, rng)
        vals[a:b] = s * f.coeffs
    steps = SampledPath(times, vals, grid, None, True)
    return steps.replace(values=vals * propagator_phases(grid, times)), steps


# --------------------------------------------------------------------------
# spec and report
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EstimateSpec:
    """Parameters of one estimate experiment.

    ``T`` and ``nt`` set the sampling window [0, T) with nt samples; ``lam``
    applies the KP scaling to each trial's data and window.
    """

    name: str
    nx: int = 64
    ny: int = 64
    Lx: float = 2 * np.pi
    Ly: float = 2 * np.pi
    N1: Optional[float] = None
    N2: Optional[float] = None
    M: Optional[float] = None
    trials: int = 100
    seed: int = 0
    T: float = 1.0
    nt: int = 16
    lam: float = 1.0
    eta_cap: Optional[float] = None
    max_jumps: int = 6

    def __post_init__(self):
        if self.name not in ESTIMATES:
            raise ValueError(f"unknown estimate {self.name!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.nt < 2 or not self.T > 0:
            raise ValueError("need nt >= 2 and T > 0")
        DyadicIndex.of(self.lam)
        grid = self.grid
        for N in (self.N1, self.N2):
            if N is not None:
                band_core(grid, N, self.eta_cap)
        if self.name in ("bilinear_N1N2", "bilinear_interpolated"):
            if self.N1 is None or self.N2 is None:
                raise ValueError("bilinear estimates need N1 and N2")
        if self.name == "modulation_decay":
            if self.M is None:
                raise ValueError("modulation_decay needs M")
            DyadicIndex.of(self.M)
        if self.name in ("modulation_decay", "besov_embedding") and self.nt & (self.nt - 1):
            raise ValueError("modulation estimates need a power-of-two nt")

    @property
    def grid(self) -> FrequencyGrid:
        return FrequencyGrid(self.nx, self.ny, self.Lx, self.Ly)

    @property
    def times(self) -> np.ndarray:
        return self.T * np.arange(self.nt) / self.nt


@dataclass
class EstimateReport:
    name: str
    seeds: list
    numerators: np.ndarray
    denominators: np.ndarray
    window: float
    denominator_side: str
    fit: Optional[tuple] = None
    extra: dict = field(default_factory=dict)

    @property
    def ratios(self) -> np.ndarray:
        return self.numerators / self.denominators

    @property
    def max(self) -> float:
        return float(np.max(self.ratios))

    @property
    def mean(self) -> float:
        return float(np.mean(self.ratios))

    @property
    def quantiles(self) -> dict:
        r = self.ratios
        return {q: float(np.quantile(r, q)) for q in (0.5, 0.9, 0.99)}

    def rows(self):
        return [{"trial": i, "seed": int(s), "numerator": float(a), "denominator": float(b),
                 "ratio": float(a / b)}
                for i, (s, a, b) in enumerate(zip(self.seeds, self.numerators, self.denominators))]

    def summary(self) -> dict:
        out = {"name": self.name, "trials": len(self.seeds), "observed_constant": self.max,
               "mean": self.mean, "window": self.window, "denominator_side": self.denominator_side}
        out.update({f"q{int(q * 100)}": v for q, v in self.quantiles.items()})
        return out


def trial_seed(base: int, i: int) -> int:
    """Per-trial seed mixed from the base seed and the trial index."""
    return int(np.random.SeedSequence([int(base), int(i)]).generate_state(1, np.uint64)[0])


# --------------------------------------------------------------------------
# numerators
# --------------------------------------------------------------------------


def _pad(c: np.ndarray, factor: int = 2) -> np.ndarray:
    """Zero-pad coefficient stacks (last two axes) by ``factor``, splitting Nyquist entries."""
    from .solver import _pad_axis
    return _pad_axis(_pad_axis(c, -2 % c.ndim, factor), -1 % c.ndim, factor)


def _physical(c: np.ndarray, grid: FrequencyGrid, factor: int = 1) -> np.ndarray:
    if factor > 1:
        c = _pad(c, factor)
    n = c.shape[-2] * c.shape[-1]
    return np.fft.ifft2(c, axes=(-2, -1)) * (n / np.sqrt(grid.area))


def _free_values(phi: Field2D, times: np.ndarray) -> np.ndarray:
    return phi.coeffs[None] * propagator_phases(phi.grid, times)


def _pad_factor(values: np.ndarray, grid: FrequencyGrid, degree: int) -> int:
    """1 if grid sums of degree-``degree`` monomials in u are exact without padding, else 2."""
    occ = np.any(values != 0, axis=tuple(range(values.ndim - 2)))
    if not occ.any():
        return 1
    J = np.max(np.abs(grid.jx)[np.any(occ, axis=1)])
    K = np.max(np.abs(grid.ky)[np.any(occ, axis=0)])
    return 1 if degree * J < grid.nx and degree * K < grid.ny else 2


def _l4(values: np.ndarray, grid: FrequencyGrid, dt: float) -> float:
    u = _physical(values, grid, _pad_factor(values, grid, 4))
    cell = grid.area / (u.shape[-2] * u.shape[-1])
    return float((np.sum(np.abs(u) ** 4) * cell * dt) ** 0.25)


def _local_smoothing(values: np.ndarray, grid: FrequencyGrid, dt: float) -> float:
    d = _physical(values * (1j * grid.xi[:, None]), grid)
    line = np.sqrt(np.sum(np.abs(d) ** 2, axis=(0, 2)) * grid.dy * dt)
    return float(np.max(line))


def _product_l2(v1: np.ndarray, v2: np.ndarray, grid: FrequencyGrid, dt: float) -> float:
    f = max(_pad_factor(v1, grid, 4), _pad_factor(v2, grid, 4))
    a = _physical(v1, grid, f)
    b = _physical(v2, grid, f)
    cell = grid.area / (a.shape[-2] * a.shape[-1])
    return float(np.sqrt(np.sum(np.abs(a * b) ** 2) * cell * dt))


def _band(values: np.ndarray, grid: FrequencyGrid, N: float) -> np.ndarray:
    return values * band_multiplier(np.abs(grid.xi), N, "P_N")[:, None]


# --------------------------------------------------------------------------
# trials
# --------------------------------------------------------------------------


def run_trial(spec: EstimateSpec, seed: int):
    """Return ``(numerator, denominator, denominator_side)`` for one seed."""
    rng = np.random.default_rng(seed)
    grid = spec.grid
    times = spec.times
    dt = spec.T / spec.nt
    name = spec.name
    if name in ("l4_strichartz", "local_smoothing"):
        phi = sample_band_limited_field(grid, spec.N1, rng, eta_cap=spec.eta_cap)
        if spec.lam != 1:
            from .solver import Scaling, apply_symmetry
            phi = apply_symmetry(phi, Scaling(spec.lam))
            times = times / spec.lam**3
            dt = dt / spec.lam**3
        vals = _free_values(phi, times)
        num = _l4(vals, phi.grid, dt) if name == "l4_strichartz" else \
            _local_smoothing(vals, phi.grid, dt)
        return num, phi.norm(), "L2 data (= U_S norm of a free solution)"
    if name == "bilinear_N1N2":
        f1 = sample_band_limited_field(grid, spec.N1, rng, eta_cap=spec.eta_cap)
        f2 = sample_band_limited_field(grid, spec.N2, rng, eta_cap=spec.eta_cap)
        v1 = _band(_free_values(f1, times), grid, spec.N1)
        v2 = _band(_free_values(f2, times), grid, spec.N2)
        num = _product_l2(v1, v2, grid, dt)
        den = np.linalg.norm(_band(f1.coeffs, grid, spec.N1)) * \
            np.linalg.norm(_band(f2.coeffs, grid, spec.N2))
        return num, float(den), "L2 data of band-projected free solutions (U2_S atoms)"
    if name == "bilinear_interpolated":
        u1, w1 = random_step_path(grid, times, rng, spec.max_jumps, spec.N1)
        u2, w2 = random_step_path(grid, times, rng, spec.max_jumps, spec.N2)
        num = _product_l2(_band(u1.values, grid, spec.N1), _band(u2.values, grid, spec.N2), grid, dt)
        den = p_variation_norm(w1.replace(values=_band(w1.values, grid, spec.N1)), 2.0) * \
            p_variation_norm(w2.replace(values=_band(w2.values, grid, spec.N2)), 2.0)
        return num, den, "exact V2_S (zero left value)"
    if name == "modulation_decay":
        u, w = random_step_path(grid, times, rng, spec.max_jumps, spec.N1)
        q = project_modulation(u, spec.M, "Q_M")
        num = np.sqrt(spec.M) * np.sqrt(np.sum(np.abs(q.values) ** 2) * dt)
        return float(num), p_variation_norm(w, 2.0), "exact V2_S (zero left value)"
    if name == "besov_embedding":
        from .paths import besov_seminorm
        _, w = random_step_path(grid, times, rng, spec.max_jumps, spec.N1)
        num = besov_seminorm(w, 0.5, 2.0, np.inf)
        return num, p_variation_norm(w, 2.0), "exact V2_S (zero left value)"
    raise ValueError(f"unknown estimate {name!r}")


def run_estimate(spec: EstimateSpec) -> EstimateReport:
    seeds = [trial_seed(spec.seed, i) for i in range(spec.trials)]
    nums = np.empty(spec.trials)
    dens = np.empty(spec.trials)
    side = ""
    for i, s in enumerate(seeds):
        nums[i], dens[i], side = run_trial(spec, s)
    extra = {}
    if spec.name in ("bilinear_N1N2", "bilinear_interpolated"):
        r = spec.N2 / spec.N1
        extra["N2_over_N1"] = r
        extra["log_factor"] = (np.log(r) + 1) ** 2
    return EstimateReport(spec.name, seeds, nums, dens, spec.T / spec.lam**3, side, extra=extra)


# --------------------------------------------------------------------------
# fitting and derived experiments
# --------------------------------------------------------------------------


def fit_scaling_exponent(pairs):
    """Least-squares fit of log(ratio) against log(scale).

    Returns ``(slope, intercept, half_width)`` with a 95% t-interval half-width.
    """
    arr = np.array([(float(a), float(b)) for a, b in pairs]).reshape(-1, 2)
    if not (np.all(np.isfinite(arr)) and np.all(arr > 0)):
        raise ValueError("scales and ratios must be positive and finite")
    x = np.log(arr[:, 0])
    y = np.log(arr[:, 1])
    if np.unique(x).size < 3:
        raise ValueError("need at least three distinct scales")
    res = stats.linregress(x, y)
    half = float(stats.t.ppf(0.975, x.size - 2) * res.stderr) if x.size > 2 else float("nan")
    return float(res.slope), float(res.intercept), half


def bilinear_sweep(base: EstimateSpec, ratios, N2: float):
    """Run the bilinear estimate at N1 = N2 / r for each r; fit log max-ratio vs log(N1/N2)."""
    reports = []
    for r in ratios:
        spec = EstimateSpec(**{**base.__dict__, "N1": N2 / r, "N2": N2})
        reports.append(run_estimate(spec))
    pairs = [(1.0 / r, rep.max) for r, rep in zip(ratios, reports)]
    return reports, fit_scaling_exponent(pairs)


def atom_transfer_check(grid: FrequencyGrid, seed: int, times: np.ndarray, band=None):
    """L^4 ratio of a three-step U^2_S atom and the largest single-piece ratio.

    Each piece e^{tS} phi_k lives on its own block of ``times``.
    """
    rng = np.random.default_rng(seed)
    n = len(times)
    if n < 3:
        raise ValueError("need at least three samples")
    dt = times[1] - times[0]
    cuts = np.sort(rng.choice(np.arange(1, n), size=2, replace=False))
    bounds = list(zip(np.concatenate([[0], cuts]), np.concatenate([cuts, [n]])))
    w = rng.standard_normal(3)
    w /= np.linalg.norm(w)
    vals = np.empty((n,) + grid.shape, complex)
    piece = []
    for (a, b), s in zip(bounds, w):
        phi = sample_band_limited_field(grid, band, rng)
        seg = s * _free_values(phi, times[a:b])
        vals[a:b] = seg
        piece.append(_l4(seg, grid, dt) / abs(s))
    return _l4(vals, grid, dt), max(piece)
