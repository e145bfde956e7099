"""Mild solutions of KP-II on a periodic box by Picard iteration.

The operator equation is

    u(t) = e^{tS} u0 - 1/2 I_T(u, u)(t),
    I_T(u1, u2)(t) = int_0^t 1_[0,T)(s) e^{(t-s)S} d_x(u1 u2)(s) ds,

discretized on uniform time nodes.  Products are formed in physical space
with the 2/3 rule; the twisted integrand e^{-sS} d_x(u1 u2)(s) is integrated
with a cumulative fourth-order rule (Simpson) or the trapezoid rule.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .paths import SampledPath, dyadic_space_norm_bracket
from .spectral import (
    DyadicIndex,
    Field2D,
    FrequencyGrid,
    band_multiplier,
    path_sobolev_norms,
    propagator_phases,
    reflect,
    sobolev_norm,
)

log = logging.getLogger(__name__)

__all__ = [
    "SolverConfig",
    "DataSpec",
    "SolutionDiagnostics",
    "SolverDivergence",
    "Scaling",
    "Galilean",
    "TimeReversal",
    "duhamel_integral",
    "picard_solve",
    "conserved_quantities",
    "apply_symmetry",
    "rescale_to_small_data",
    "scattering_state",
    "make_initial_data",
    "node_times",
    "dealias_mask",
    "nonlinear_term",
    "cumulative_weights",
    "smallness_threshold",
]


class SolverDivergence(RuntimeError):
    """Raised when the Picard iteration stops contracting."""

    def __init__(self, message: str, diagnostics: "SolutionDiagnostics"):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class DataSpec:
    """Initial datum descriptor.

    kind: ``gaussian`` (seeded random low-frequency field, optionally
    localized by a Gaussian envelope of relative width ``width``), ``mode``
    (one real Fourier mode at integer index ``mode``) or ``file`` (snapshot).
    ``amplitude`` is the target H^{-1/2,0} norm.
    """

    kind: str = "gaussian"
    amplitude: float = 1e-2
    seed: int = 0
    mode: tuple = (1, 0)
    path: Optional[str] = None
    width: Optional[float] = None
    jmax: int = 4
    kmax: int = 4

    def __post_init__(self):
        if self.kind not in ("gaussian", "mode", "file"):
            raise ValueError(f"unknown data kind {self.kind!r}")
        if not np.isfinite(self.amplitude) or self.amplitude < 0:
            raise ValueError("amplitude must be a nonnegative real")


@dataclass(frozen=True)
class SolverConfig:
    """Discretization and iteration controls.

    ``nodes`` counts time steps (a power of two); the node set is
    ``t_k = k T / nodes`` for ``k = 0 .. nodes`` and so includes the horizon.
    A negative ``direction`` solves backwards on ``[-T, 0]``.
    """

    nx: int = 128
    ny: int = 128
    Lx: float = 2 * np.pi
    Ly: float = 2 * np.pi
    T: float = 1.0
    nodes: int = 64
    tol: float = 1e-12
    max_iter: int = 20
    quadrature: str = "simpson"
    data: DataSpec = field(default_factory=DataSpec)
    nonlinear: bool = True
    direction: int = 1
    bilinear_constant: Optional[float] = None
    brackets: bool = True
    bracket_dual_samples: int = 2

    def __post_init__(self):
        if not (np.isfinite(self.T) and self.T > 0):
            raise ValueError("horizon T must be positive")
        if not (self.tol > 0):
            raise ValueError("tolerance must be positive")
        if self.nodes < 8 or self.nodes & (self.nodes - 1):
            raise ValueError("nodes must be a power of two and at least 8")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.quadrature not in ("simpson", "trapezoid"):
            raise ValueError(f"unknown quadrature {self.quadrature!r}")
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")

    @property
    def grid(self) -> FrequencyGrid:
        return FrequencyGrid(self.nx, self.ny, self.Lx, self.Ly)


@dataclass
class SolutionDiagnostics:
    residuals: list = field(default_factory=list)
    rhos: list = field(default_factory=list)
    iter_I0: list = field(default_factory=list)
    iter_I1: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    fixed_point_residual: float = float("nan")
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    I0: np.ndarray = field(default_factory=lambda: np.zeros(0))
    I1: np.ndarray = field(default_factory=lambda: np.zeros(0))
    brackets: dict = field(default_factory=dict)
    probe_times: list = field(default_factory=list)
    scattering_increments: list = field(default_factory=list)
    data_norm: float = 0.0
    smallness_threshold: Optional[float] = None
    warnings: list = field(default_factory=list)

    def rows(self):
        """Per-iteration rows: iter, residual, rho, and I0, I1 of the iterate at the horizon."""
        out = []
        for k, r in enumerate(self.residuals):
            rho = self.rhos[k - 1] if k >= 1 else float("nan")
            out.append({"iter": k + 1, "residual": float(r), "rho": float(rho),
                        "I0": float(self.iter_I0[k]), "I1": float(self.iter_I1[k])})
        return out


# --------------------------------------------------------------------------
# discretization pieces
# --------------------------------------------------------------------------


def node_times(T: float, nodes: int, direction: int = 1) -> np.ndarray:
    return direction * T * np.arange(nodes + 1) / nodes


def dealias_mask(grid: FrequencyGrid) -> np.ndarray:
    """2/3-rule mask: keep |j| < nx/3 and |k| < ny/3."""
    mj = np.abs(grid.jx) < grid.nx / 3
    mk = np.abs(grid.ky) < grid.ny / 3
    return mj[:, None] & mk[None, :]


def nonlinear_term(c1: np.ndarray, c2: np.ndarray, grid: FrequencyGrid, mask=None) -> np.ndarray:
    """Coefficients of d_x(u1 u2) for stacks of coefficient arrays."""
    if mask is None:
        mask = dealias_mask(grid)
    s = grid.nx * grid.ny / np.sqrt(grid.area)
    a = np.fft.ifft2(c1 * mask, axes=(-2, -1))
    b = a if c2 is c1 else np.fft.ifft2(c2 * mask, axes=(-2, -1))
    out = np.fft.fft2(a * b, axes=(-2, -1)) * s
    return out * mask * (1j * grid.xi[:, None])


def cumulative_weights(n: int, h: float, rule: str = "simpson") -> np.ndarray:
    """Matrix W with (W f)[k] approximating int_{t_0}^{t_k} f for n + 1 nodes.

    Simpson: composite Simpson on even k; the 3/8 rule closes odd k >= 3;
    k = 1 uses the cubic through the first four nodes.  All fourth order.
    """
    W = np.zeros((n + 1, n + 1))
    if rule == "trapezoid":
        for k in range(1, n + 1):
            W[k, :k + 1] = h
            W[k, 0] = W[k, k] = h / 2
        return W
    if rule != "simpson":
        raise ValueError(f"unknown quadrature rule {rule!r}")
    if n < 3:
        raise ValueError("Simpson weights need at least three steps")
    for k in range(1, n + 1):
        if k == 1:
            W[1, :4] = np.array([9, 19, -5, 1]) * h / 24
            continue
        m = k if k % 2 == 0 else k - 3
        for i in range(0, m, 2):
            W[k, i] += h / 3
            W[k, i + 1] += 4 * h / 3
            W[k, i + 2] += h / 3
        if k % 2:
            W[k, m:m + 4] += np.array([1, 3, 3, 1]) * 3 * h / 8
    return W


def _check_nodes(u1: SampledPath, u2: SampledPath):
    if u1.grid is None or u1.grid != u2.grid:
        raise ValueError("Duhamel inputs must share a grid")
    if u1.times.shape != u2.times.shape or np.any(u1.times != u2.times):
        raise ValueError("Duhamel inputs must share their time nodes")
    if not (u1.real_flag and u2.real_flag):
        raise ValueError("Duhamel inputs must be real-valued fields")
    t = u1.times
    if t.size < 4:
        raise ValueError("need at least four time nodes")
    if not (t[0] == 0 or t[-1] == 0):
        raise ValueError("nodes must start (or, backwards, end) at t = 0")


def duhamel_integral(u1: SampledPath, u2: SampledPath, T: float, quadrature: str = "simpson",
                     _weights=None) -> SampledPath:
    """I_T(u1, u2) at the common nodes of u1 and u2.

    Nodes must be uniform and contain t = 0; backwards node sets (ending at
    0) integrate from 0 towards negative times.
    """
    _check_nodes(u1, u2)
    grid = u1.grid
    t = u1.times
    backwards = t[-1] == 0 and t[0] < 0
    order = np.arange(t.size)[::-1] if backwards else np.arange(t.size)
    ts = t[order]
    h = ts[1] - ts[0]
    if np.any(np.abs(np.diff(ts) - h) > 1e-12 * abs(h)):
        raise ValueError("Duhamel nodes must be uniform")
    F = nonlinear_term(u1.values[order], u2.values[order], grid)
    # indicator of [0, T): drop contributions at or past the horizon
    inside = np.abs(ts) < abs(T) * (1 + 1e-14) if np.isfinite(T) else np.ones(ts.size, bool)
    ph = propagator_phases(grid, ts)
    G = F * np.conj(ph) * inside[:, None, None]
    W = _weights if _weights is not None else cumulative_weights(ts.size - 1, h, quadrature)
    Q = np.tensordot(W, G, axes=(1, 0))
    out = Q * ph
    out[0] = 0
    if backwards:
        out = out[::-1]
    return SampledPath(t, _hermitian_clean(out), grid, real_flag=True)


def _hermitian_clean(c: np.ndarray) -> np.ndarray:
    """Symmetrize stacks of coefficients so rounding keeps them exactly Hermitian."""
    return 0.5 * (c + np.conj(reflect(c)))


# --------------------------------------------------------------------------
# Picard iteration
# --------------------------------------------------------------------------


def smallness_threshold(C: float) -> float:
    """delta = (4C + 4)^{-2} of the contraction argument."""
    return (4 * C + 4) ** -2


def _path_norm(values: np.ndarray, grid: FrequencyGrid) -> float:
    return float(np.max(path_sobolev_norms(values, grid, -0.5, 0.0, True)))


def picard_solve(u0: Field2D, config: SolverConfig):
    """Iterate u <- e^{tS} u0 - 1/2 I_T(u, u) from the free solution.

    Returns ``(path, diagnostics)``.  Raises :class:`SolverDivergence` after
    three consecutive contraction ratios >= 1.
    """
    if not u0.real_flag:
        raise ValueError("initial datum must be real-valued")
    grid = u0.grid
    if grid != config.grid:
        raise ValueError("initial datum does not live on the configured grid")
    if np.any(u0.coeffs[grid.nx // 2]):
        raise ValueError("initial datum must vanish on the xi-Nyquist line")
    times = node_times(config.T, config.nodes, config.direction)
    order = times if config.direction > 0 else times[::-1]
    free = SampledPath.free_solution(u0, order)
    free = free.replace(real_flag=True)
    diag = SolutionDiagnostics()
    diag.data_norm = sobolev_norm(u0, -0.5, 0.0)
    if config.bilinear_constant is not None:
        delta = smallness_threshold(config.bilinear_constant)
        diag.smallness_threshold = delta
        if diag.data_norm > delta:
            msg = (f"data norm {diag.data_norm:.3e} exceeds the contraction threshold "
                   f"{delta:.3e}; outside proven smallness")
            diag.warnings.append(msg)
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
    h = config.direction * config.T / config.nodes
    W = cumulative_weights(config.nodes, h, config.quadrature)

    def step(u):
        if not config.nonlinear:
            return free.values
        I = duhamel_integral(u, u, config.T, config.quadrature, _weights=W)
        return free.values - 0.5 * I.values

    u = free
    streak = 0
    for k in range(config.max_iter):
        new_vals = step(u)
        res = _path_norm(new_vals - u.values, grid)
        diag.residuals.append(res)
        if k >= 1:
            prev = diag.residuals[-2]
            rho = res / prev if prev > 0 else 0.0
            diag.rhos.append(rho)
            streak = streak + 1 if rho >= 1 else 0
        u = free.replace(values=new_vals)
        i0, i1 = conserved_quantities(Field2D(grid, _hermitian_clean(new_vals[-1]), True))
        diag.iter_I0.append(i0)
        diag.iter_I1.append(i1)
        diag.iterations = k + 1
        if res < config.tol:
            diag.converged = True
            break
        if streak >= 3:
            _finish(u, diag, config)
            raise SolverDivergence("data too large at this horizon", diag)
    _finish(u, diag, config)
    if not diag.converged:
        diag.warnings.append("Picard iteration hit max_iter before reaching tol")
    return u, diag


def _finish(u: SampledPath, diag: SolutionDiagnostics, config: SolverConfig):
    grid = u.grid
    diag.times = u.times.copy()
    if config.nonlinear:
        I = duhamel_integral(u, u, config.T, config.quadrature)
        free = SampledPath.free_solution(u.field(int(np.argmin(np.abs(u.times)))), u.times)
        diag.fixed_point_residual = _path_norm(u.values - free.values + 0.5 * I.values, grid)
    else:
        diag.fixed_point_residual = 0.0
    q = [conserved_quantities(f) for f in u.fields()]
    diag.I0 = np.array([a for a, _ in q])
    diag.I1 = np.array([b for _, b in q])
    T = config.T * config.direction
    diag.probe_times = [T * f for f in (0.25, 0.5, 0.75, 1.0)]
    _, diag.scattering_increments = scattering_state(u, diag.probe_times)
    if config.brackets:
        forward = u if config.direction > 0 else apply_symmetry(u, TimeReversal())
        for space in ("Y_dot", "Z_dot"):
            diag.brackets[space] = dyadic_space_norm_bracket(
                forward, -0.5, space, n_dual_samples=config.bracket_dual_samples, seed=0)


# --------------------------------------------------------------------------
# invariants
# --------------------------------------------------------------------------


def _pad_axis(c: np.ndarray, axis: int, factor: int) -> np.ndarray:
    n = c.shape[axis]
    N = factor * n
    shape = list(c.shape)
    shape[axis] = N
    out = np.zeros(shape, complex)
    j = np.fft.fftfreq(n, 1.0 / n).astype(int)
    idx = [slice(None)] * c.ndim
    idx[axis] = j % N
    out[tuple(idx)] = c
    # split the Nyquist entry so Hermitian symmetry survives the padding
    lo = [slice(None)] * c.ndim
    hi = [slice(None)] * c.ndim
    lo[axis] = (-n // 2) % N
    hi[axis] = n // 2
    half = 0.5 * out[tuple(lo)]
    out[tuple(lo)] = half
    out[tuple(hi)] = half
    return out


def _padded_physical(u: Field2D, factor: int = 2) -> np.ndarray:
    """Physical samples of u on a grid refined by ``factor`` (exact interpolation)."""
    g = u.grid
    c = _pad_axis(_pad_axis(np.asarray(u.coeffs), 0, factor), 1, factor)
    phys = np.fft.ifft2(c) * (c.size / np.sqrt(g.area))
    return phys.real if u.real_flag else phys


def conserved_quantities(u: Field2D):
    """Return (I0, I1) with I0 = 1/2 int u^2 and
    I1 = 1/2 int (d_x u)^2 - 1/3 u^3 - (d_x^{-1} d_y u)^2."""
    if not u.real_flag:
        raise ValueError("conserved quantities need a real field")
    g = u.grid
    a2 = np.abs(u.coeffs) ** 2
    I0 = 0.5 * float(np.sum(a2))
    xi = g.xi[:, None]
    eta = g.eta[None, :]
    safe = np.where(xi == 0, 1.0, xi)
    dx2 = float(np.sum(xi**2 * a2))
    inv2 = float(np.sum(np.where(xi == 0, 0.0, (eta / safe) ** 2) * a2))
    phys = _padded_physical(u, 2)
    cube = float(np.sum(phys**3)) * g.area / phys.size
    I1 = 0.5 * (dx2 - cube / 3.0 - inv2)
    return I0, I1


# --------------------------------------------------------------------------
# symmetries
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Scaling:
    """u -> lam^2 u(lam^3 t, lam x, lam^2 y); lam must be a power of two."""

    lam: float

    def __post_init__(self):
        DyadicIndex.of(self.lam)


@dataclass(frozen=True)
class Galilean:
    """u -> u(t, x - c y - c^2 t, y + 2 c t); c Ly / Lx must be an integer."""

    c: float


@dataclass(frozen=True)
class TimeReversal:
    """u -> u(-t, -x, y)."""


def _galilean_shift(grid: FrequencyGrid, c: float) -> int:
    m = c * grid.Ly / grid.Lx
    mi = int(round(m))
    if abs(m - mi) > 1e-9 * max(1.0, abs(m)):
        raise ValueError(f"Galilean parameter c = {c} is not grid-exact (c Ly / Lx = {m})")
    return mi


def _galilean_coeffs(c_arr: np.ndarray, grid: FrequencyGrid, c: float, times) -> np.ndarray:
    m = _galilean_shift(grid, c)
    if m == 0 and c == 0:
        return c_arr
    jx, ky = grid.jx, grid.ky
    # new[j, k] = old[j, k + m j]
    src_k = ky[None, :] + m * jx[:, None]
    ok = (src_k >= -grid.ny // 2) & (src_k < grid.ny // 2)
    out = np.zeros_like(c_arr)
    rows = np.broadcast_to(np.arange(grid.nx)[:, None], src_k.shape)
    out[..., ok] = c_arr[..., rows[ok], (src_k[ok] % grid.ny)]
    # every nonzero source coefficient must land on the grid
    dest_k = ky[None, :] - m * jx[:, None]
    lost = ~((dest_k >= -grid.ny // 2) & (dest_k < grid.ny // 2))
    if np.any(c_arr[..., lost]):
        raise ValueError("Galilean shear moves energy off the grid (unrepresentable c)")
    xi = grid.xi[:, None]
    eta = grid.eta[None, :]
    t = np.asarray(times, dtype=float).reshape((-1,) + (1, 1))
    phase = np.exp(1j * t * (2 * c * eta + c * c * xi))
    if c_arr.ndim == 2:
        phase = phase[0]
    return out * phase


def apply_symmetry(obj, transform):
    """Apply a scaling, Galilean or time-reversal transform to a field or path.

    A Field2D is treated as the snapshot at t = 0.
    """
    if isinstance(obj, Field2D):
        if isinstance(transform, Scaling):
            lam = float(transform.lam)
            if lam == 1:
                return obj
            return Field2D(obj.grid.scaled(lam), obj.coeffs * np.sqrt(lam), obj.real_flag)
        if isinstance(transform, Galilean):
            if transform.c == 0:
                return obj
            return Field2D(obj.grid, _galilean_coeffs(obj.coeffs, obj.grid, transform.c, 0.0),
                           obj.real_flag)
        if isinstance(transform, TimeReversal):
            return Field2D(obj.grid, _reflect_x(obj.coeffs, obj.grid), obj.real_flag)
        raise TypeError(f"unknown transform {transform!r}")
    if isinstance(obj, SampledPath):
        if obj.grid is None:
            raise ValueError("symmetries act on paths of fields")
        if isinstance(transform, Scaling):
            lam = float(transform.lam)
            if lam == 1:
                return obj
            left = None if obj.left is None else obj.left * np.sqrt(lam)
            return SampledPath(obj.times / lam**3, obj.values * np.sqrt(lam), obj.grid.scaled(lam),
                               left, obj.real_flag)
        if isinstance(transform, Galilean):
            if transform.c == 0:
                return obj
            vals = _galilean_coeffs(obj.values, obj.grid, transform.c, obj.times)
            return obj.replace(values=vals, left=None)
        if isinstance(transform, TimeReversal):
            vals = _reflect_x(obj.values, obj.grid)[::-1]
            return SampledPath(-obj.times[::-1], vals, obj.grid, None, obj.real_flag)
        raise TypeError(f"unknown transform {transform!r}")
    raise TypeError("expected Field2D or SampledPath")


def _reflect_x(c: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    """c(xi, eta) -> c(-xi, eta)."""
    idx = (-grid.jx) % grid.nx
    return np.take(c, idx, axis=-2)


# --------------------------------------------------------------------------
# large data and scattering
# --------------------------------------------------------------------------


def rescale_to_small_data(u0: Field2D, delta: float):
    """Split u0 at the lowest dyadic N with ||P_>=N u0||_{H^{-1/2,0}} < delta.

    With R the L^2 norm of P_<N u0, returns ``(lam, u0_lam, T_local)`` where
    lam = (delta / R)^2 rounded down to a power of two (lam = 1 when R <= delta)
    and T_local = delta^6 R^-6 (1 when R <= delta).
    """
    if not (delta > 0):
        raise ValueError("delta must be positive")
    g = u0.grid
    xi = np.abs(g.xi)
    from .paths import resolvable_bands
    bands = resolvable_bands(g)
    candidates = [DyadicIndex(bands[0].n - 1)] + bands + [DyadicIndex(bands[-1].n + 1)]
    R = None
    for N in candidates:
        hi = Field2D(g, u0.coeffs * band_multiplier(xi, N.value, "P_>=N")[:, None], u0.real_flag)
        if sobolev_norm(hi, -0.5, 0.0) < delta:
            lo = Field2D(g, u0.coeffs * band_multiplier(xi, N.value, "P_<N")[:, None], u0.real_flag)
            R = lo.norm()
            break
    if R is None:
        raise ValueError("no dyadic split makes the high-frequency part small")
    if R <= delta:
        return 1.0, u0, 1.0
    lam = float(np.ldexp(1.0, int(np.floor(np.log2((delta / R) ** 2)))))
    return lam, apply_symmetry(u0, Scaling(lam)), float(delta**6 / R**6)


def scattering_state(solution: SampledPath, probe_times: Sequence[float]):
    """Untwisted states e^{-tS} u(t) at the probe times.

    Returns ``(u_plus, increments)`` with u_plus at the last probe and the
    H^{-1/2,0} norms of consecutive differences.
    """
    if solution.grid is None:
        raise ValueError("scattering needs a path of fields")
    probes = np.asarray(list(probe_times), dtype=float)
    if probes.size == 0:
        raise ValueError("need at least one probe time")
    lo, hi = solution.times[0], solution.times[-1]
    span = max(abs(lo), abs(hi), 1.0)
    if np.any(probes < lo - 1e-12 * span) or np.any(probes > hi + 1e-12 * span):
        raise ValueError("probe times outside the computed horizon")
    # snap to nodes when a probe sits on one up to rounding
    snapped = []
    for t in probes:
        k = int(np.argmin(np.abs(solution.times - t)))
        snapped.append(solution.times[k] if abs(solution.times[k] - t) <= 1e-12 * span else t)
    snapped = np.array(snapped)
    vals = solution.value_at(snapped)
    states = vals * np.conj(propagator_phases(solution.grid, snapped))
    incs = path_sobolev_norms(np.diff(states, axis=0), solution.grid, -0.5, 0.0).tolist() \
        if len(states) > 1 else []
    u_plus = Field2D(solution.grid, _hermitian_clean(states[-1]) if solution.real_flag else states[-1],
                     solution.real_flag)
    return u_plus, [float(x) for x in incs]


# --------------------------------------------------------------------------
# initial data
# --------------------------------------------------------------------------


def make_initial_data(config: SolverConfig) -> Field2D:
    """Build the initial datum described by ``config.data``."""
    d = config.data
    g = config.grid
    if d.kind == "file":
        from .snapshot import read_field
        if not d.path:
            raise ValueError("data.kind = file needs data.file")
        u0 = read_field(d.path)
        if u0.grid != g:
            raise ValueError("snapshot grid does not match the configured grid")
        return u0
    if d.kind == "mode":
        j, k = d.mode
        u = Field2D.single_mode(g, int(j), int(k), 1.0, real=True)
    else:
        u = _gaussian_datum(g, d)
    n = sobolev_norm(u, -0.5, 0.0)
    if d.amplitude == 0 or n == 0:
        return Field2D.zeros(g)
    return u * (d.amplitude / n)


def _gaussian_datum(g: FrequencyGrid, d: DataSpec) -> Field2D:
    rng = np.random.default_rng(d.seed)
    c = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    jmax = min(d.jmax, g.nx // 6)
    kmax = min(d.kmax, g.ny // 6)
    band = (np.abs(g.jx)[:, None] <= jmax) & (np.abs(g.ky)[None, :] <= kmax)
    band &= (g.jx != 0)[:, None]
    c = _hermitian_clean(c * band)
    if d.width is not None:
        X, Y = g.physical_coords()
        u = np.fft.ifft2(c).real
        w = d.width
        env = np.exp(-((X - g.Lx / 2) ** 2 / (2 * (w * g.Lx) ** 2)
                       + (Y - g.Ly / 2) ** 2 / (2 * (w * g.Ly) ** 2)))
        c = np.fft.fft2(u * env)
        c[0, :] = 0
        c *= dealias_mask(g)
        c = _hermitian_clean(c)
    return Field2D(g, c, True)
