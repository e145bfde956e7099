"""Discrete Fourier representation of periodic 2-D fields.

Coefficients use the unitary normalization

    c[j, k] = sqrt(Lx * Ly) / (nx * ny) * sum_{x, y} u(x, y) exp(-i (xi_j x + eta_k y)),

so that ``||u||_{L^2} = sqrt(sum |c|^2)``.  Arrays are stored in FFT order
(axis 0 is xi, axis 1 is eta).  The xi = 0 column is always zero, which makes
the KP-II symbol and every negative power of |xi| finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
import numpy as np

__all__ = [
    "FrequencyGrid",
    "Field2D",
    "DyadicIndex",
    "chi",
    "psi",
    "psi_N",
    "kp_symbol",
    "free_propagate",
    "band_multiplier",
    "project_frequency_band",
    "project_modulation",
    "modulation_multiplier",
    "taper_window",
    "sobolev_norm",
    "sobolev_weight",
    "reflect",
    "hermitian_defect",
]

HERMITIAN_RTOL = 1e-12


# --------------------------------------------------------------------------
# grids and fields
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FrequencyGrid:
    """Periodic grid of ``nx * ny`` points on ``[0, Lx) x [0, Ly)``."""

    nx: int
    ny: int
    Lx: float = 2 * np.pi
    Ly: float = 2 * np.pi

    def __post_init__(self):
        for name in ("nx", "ny"):
            n = getattr(self, name)
            if int(n) != n or n < 4 or n % 2:
                raise ValueError(f"{name} must be an even integer >= 4, got {n!r}")
            object.__setattr__(self, name, int(n))
        for name in ("Lx", "Ly"):
            L = float(getattr(self, name))
            if not np.isfinite(L) or L <= 0:
                raise ValueError(f"{name} must be a positive finite real, got {L!r}")
            object.__setattr__(self, name, L)

    @property
    def shape(self) -> tuple:
        return (self.nx, self.ny)

    @property
    def area(self) -> float:
        return self.Lx * self.Ly

    @cached_property
    def jx(self) -> np.ndarray:
        """Integer xi indices in storage order, in [-nx/2, nx/2)."""
        return np.fft.fftfreq(self.nx, 1.0 / self.nx).astype(np.int64)

    @cached_property
    def ky(self) -> np.ndarray:
        return np.fft.fftfreq(self.ny, 1.0 / self.ny).astype(np.int64)

    @cached_property
    def xi(self) -> np.ndarray:
        return 2 * np.pi * self.jx / self.Lx

    @cached_property
    def eta(self) -> np.ndarray:
        return 2 * np.pi * self.ky / self.Ly

    @cached_property
    def omega(self) -> np.ndarray:
        """KP-II symbol on the grid, with the xi = 0 column set to zero."""
        xi = self.xi[:, None]
        eta = self.eta[None, :]
        safe = np.where(xi == 0, 1.0, xi)
        w = xi**3 - eta**2 / safe
        w[self.jx == 0, :] = 0.0
        return w

    @property
    def dx(self) -> float:
        return self.Lx / self.nx

    @property
    def dy(self) -> float:
        return self.Ly / self.ny

    def physical_coords(self):
        x = np.arange(self.nx) * self.dx
        y = np.arange(self.ny) * self.dy
        return np.meshgrid(x, y, indexing="ij")

    def index_of(self, j: int, k: int) -> tuple:
        """Storage index of the integer frequency pair (j, k)."""
        if not (-self.nx // 2 <= j < self.nx // 2 and -self.ny // 2 <= k < self.ny // 2):
            raise ValueError(f"frequency index ({j}, {k}) not on the grid")
        return (j % self.nx, k % self.ny)

    def compatible(self, other: "FrequencyGrid") -> bool:
        return self == other

    def scaled(self, lam: float) -> "FrequencyGrid":
        """Grid carrying u(lam x, lam^2 y) at the same sample indices."""
        return FrequencyGrid(self.nx, self.ny, self.Lx / lam, self.Ly / lam**2)


def reflect(c: np.ndarray) -> np.ndarray:
    """Return ``c[-j, -k]`` over the last two axes (indices modulo n)."""
    r = np.flip(c, axis=(-2, -1))
    return np.roll(r, 1, axis=(-2, -1))


def hermitian_defect(c: np.ndarray) -> float:
    """Relative size of the anti-Hermitian part of a coefficient array."""
    scale = np.linalg.norm(c)
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(c - np.conj(reflect(c))) / scale)


class Field2D:
    """Spectral coefficients of a function on a periodic grid.

    Instances are immutable: the coefficient array is copied and marked
    read-only.  ``real_flag`` records that the physical field is real, which
    is checked through Hermitian symmetry of the coefficients.
    """

    __slots__ = ("grid", "coeffs", "real_flag")

    def __init__(self, grid: FrequencyGrid, coeffs, real_flag: bool = False, *, copy: bool = True):
        c = np.array(coeffs, dtype=np.complex128, copy=copy)
        if c.shape != grid.shape:
            raise ValueError(f"coefficient shape {c.shape} does not match grid {grid.shape}")
        if np.any(c[0, :] != 0):
            raise ValueError("the xi = 0 column must be identically zero")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        real_flag = bool(real_flag)
        if real_flag:
            d = hermitian_defect(c)
            if d > HERMITIAN_RTOL:
                raise ValueError(f"real_flag set but Hermitian defect is {d:.3e}")
        c.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "real_flag", real_flag)

    def __setattr__(self, name, value):
        raise AttributeError("Field2D is immutable")

    def __repr__(self):
        return f"Field2D(grid={self.grid!r}, real={self.real_flag}, norm={self.norm():.6g})"

    # constructors -----------------------------------------------------------

    @classmethod
    def zeros(cls, grid: FrequencyGrid, real: bool = True) -> "Field2D":
        return cls(grid, np.zeros(grid.shape, complex), real, copy=False)

    @classmethod
    def from_physical(cls, grid: FrequencyGrid, values) -> "Field2D":
        """Sample values on the grid -> coefficients; the x-mean is removed."""
        values = np.asarray(values)
        if values.shape != grid.shape:
            raise ValueError(f"sample shape {values.shape} does not match grid {grid.shape}")
        real = not np.iscomplexobj(values)
        c = np.fft.fft2(values) * (np.sqrt(grid.area) / (grid.nx * grid.ny))
        c[0, :] = 0
        if real:
            c = 0.5 * (c + np.conj(reflect(c)))
        return cls(grid, c, real, copy=False)

    @classmethod
    def single_mode(cls, grid: FrequencyGrid, j: int, k: int, amplitude: complex = 1.0,
                    real: bool = False) -> "Field2D":
        """Coefficient ``amplitude`` at integer frequency (j, k).

        With ``real=True`` the conjugate coefficient is placed at (-j, -k) as
        well, so the physical field is ``2 Re(a e^{i(xi x + eta y)}) / sqrt(A)``.
        """
        if j == 0:
            raise ValueError("modes with xi = 0 are excluded")
        c = np.zeros(grid.shape, complex)
        c[grid.index_of(j, k)] = amplitude
        if real:
            if j == -grid.nx // 2:
                raise ValueError("a real single mode cannot sit on the xi-Nyquist line")
            c[(-j) % grid.nx, (-k) % grid.ny] = np.conj(amplitude)
        return cls(grid, c, real, copy=False)

    # basic algebra ------------------------------------------------------------

    def _check(self, other: "Field2D"):
        if not isinstance(other, Field2D):
            raise TypeError("expected a Field2D")
        if other.grid != self.grid:
            raise ValueError("fields live on incompatible grids")

    def __add__(self, other):
        self._check(other)
        return Field2D(self.grid, self.coeffs + other.coeffs, self.real_flag and other.real_flag,
                       copy=False)

    def __sub__(self, other):
        self._check(other)
        return Field2D(self.grid, self.coeffs - other.coeffs, self.real_flag and other.real_flag,
                       copy=False)

    def __neg__(self):
        return Field2D(self.grid, -self.coeffs, self.real_flag, copy=False)

    def __mul__(self, a):
        a = complex(a) if np.iscomplexobj(a) else a
        real = self.real_flag and np.isrealobj(a)
        return Field2D(self.grid, self.coeffs * a, real, copy=False)

    __rmul__ = __mul__

    def with_coeffs(self, c, real_flag: bool | None = None) -> "Field2D":
        return Field2D(self.grid, c, self.real_flag if real_flag is None else real_flag)

    def norm(self) -> float:
        """L^2 norm by Plancherel."""
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other: "Field2D") -> complex:
        """<self, other> = integral of self * conj(other)."""
        self._check(other)
        return complex(np.vdot(other.coeffs, self.coeffs))

    def to_physical(self) -> np.ndarray:
        g = self.grid
        u = np.fft.ifft2(self.coeffs) * (g.nx * g.ny / np.sqrt(g.area))
        return u.real if self.real_flag else u


# --------------------------------------------------------------------------
# dyadic indices and cutoffs
# --------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class DyadicIndex:
    """The dyadic number ``N = 2**n``."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n:
            raise ValueError("dyadic exponent must be an integer")
        object.__setattr__(self, "n", int(self.n))

    @property
    def value(self) -> float:
        return float(np.ldexp(1.0, self.n))

    @classmethod
    def of(cls, N) -> "DyadicIndex":
        if isinstance(N, DyadicIndex):
            return N
        m, e = np.frexp(float(N))
        if N <= 0 or m != 0.5:
            raise ValueError(f"{N!r} is not a power of two")
        return cls(int(e) - 1)

    def __float__(self):
        return self.value


def _smooth_step_factor(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def chi(t):
    """Even smooth bump: 1 on [-1, 1], 0 outside (-2, 2), values in [0, 1]."""
    a = np.abs(np.asarray(t, dtype=float))
    f_in = _smooth_step_factor(2.0 - a)
    f_out = _smooth_step_factor(a - 1.0)
    return f_in / (f_in + f_out)


def psi(t):
    """Dyadic piece chi(t) - chi(2t), supported in 1/2 <= |t| <= 2."""
    t = np.asarray(t, dtype=float)
    return chi(t) - chi(2 * t)


def psi_N(t, N):
    return psi(np.asarray(t, dtype=float) / float(N))


def band_multiplier(xi, N, kind: str = "P_N"):
    """Multiplier in xi for the smooth projections P_N, P_0, P_<N, P_>=N."""
    xi = np.asarray(xi, dtype=float)
    if kind == "P_0":
        return chi(2 * xi)
    N = float(N)
    if kind == "P_N":
        return psi(xi / N)
    if kind == "P_<N":
        return chi(2 * xi / N)
    if kind == "P_>=N":
        return 1.0 - chi(2 * xi / N)
    raise ValueError(f"unknown projection kind {kind!r}")


# --------------------------------------------------------------------------
# symbol and propagator
# --------------------------------------------------------------------------


def kp_symbol(xi, eta):
    """omega(xi, eta) = xi^3 - eta^2 / xi; raises for xi = 0."""
    xi_a = np.asarray(xi, dtype=float)
    if np.any(xi_a == 0):
        raise ValueError("kp_symbol is singular at xi = 0")
    out = xi_a**3 - np.asarray(eta, dtype=float) ** 2 / xi_a
    return float(out) if out.ndim == 0 else out


def _nyquist_line_zero(c: np.ndarray, nx: int) -> bool:
    return not np.any(c[..., nx // 2, :])


def free_propagate(u: Field2D, t: float) -> Field2D:
    """Apply e^{tS}: multiply every coefficient by exp(i t omega)."""
    if t == 0:
        return u
    c = u.coeffs * np.exp(1j * t * u.grid.omega)
    # the xi-Nyquist line is its own mirror, so realness survives only if it is empty
    real = u.real_flag and _nyquist_line_zero(u.coeffs, u.grid.nx)
    return Field2D(u.grid, c, real, copy=False)


def propagator_phases(grid: FrequencyGrid, times) -> np.ndarray:
    """exp(i t omega) for every t in ``times``; shape (n, nx, ny)."""
    times = np.asarray(times, dtype=float)
    return np.exp(1j * times[:, None, None] * grid.omega[None, :, :])


# --------------------------------------------------------------------------
# projections
# --------------------------------------------------------------------------


def project_frequency_band(u, N, kind: str = "P_N"):
    """Smooth Littlewood-Paley projection in xi of a field or a sampled path."""
    from .paths import SampledPath

    Nv = None if kind == "P_0" else DyadicIndex.of(N).value
    if isinstance(u, Field2D):
        m = band_multiplier(u.grid.xi, Nv, kind)[:, None]
        return Field2D(u.grid, u.coeffs * m, u.real_flag, copy=False)
    if isinstance(u, SampledPath):
        if u.grid is None:
            raise ValueError("frequency projection needs a path of fields")
        m = band_multiplier(u.grid.xi, Nv, kind)[None, :, None]
        left = None if u.left is None else u.left * m[0]
        return u.replace(values=u.values * m, left=left)
    raise TypeError("expected Field2D or SampledPath")


def taper_window(n: int, alpha: float = 1.0) -> np.ndarray:
    """Periodic cosine (Tukey) taper of length n; alpha = 1 is the Hann window.

    The periodic Hann window only has discrete Fourier content on bins 0 and
    +-1, so it leaks nothing into modulation blocks of four or more bins.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("taper fraction must lie in [0, 1]")
    if alpha == 0.0:
        return np.ones(n)
    x = np.arange(n) / n
    w = np.ones(n)
    ramp = alpha / 2
    lo = x < ramp
    hi = x > 1 - ramp
    w[lo] = 0.5 * (1 - np.cos(np.pi * x[lo] / ramp))
    w[hi] = 0.5 * (1 - np.cos(np.pi * (1 - x[hi]) / ramp))
    return w


def modulation_multiplier(tau, M, kind: str = "Q_M"):
    """Temporal multiplier for Q_M, Q_<M, Q_>=M (Q_<M = I - Q_>=M)."""
    tau = np.asarray(tau, dtype=float)
    if kind == "Q_0":
        return chi(2 * tau)
    M = float(M)
    if kind == "Q_M":
        return psi(tau / M)
    if kind == "Q_<M":
        return chi(2 * tau / M)
    if kind == "Q_>=M":
        return 1.0 - chi(2 * tau / M)
    raise ValueError(f"unknown modulation projection {kind!r}")


def uniform_step(times, rtol: float = 1e-9) -> float:
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        raise ValueError("temporal transforms need at least two samples")
    d = np.diff(times)
    dt = (times[-1] - times[0]) / (times.size - 1)
    if np.any(np.abs(d - dt) > rtol * abs(dt)):
        raise ValueError("path samples are not equally spaced in time")
    return float(dt)


def temporal_frequencies(n: int, dt: float) -> np.ndarray:
    """Angular frequencies 2 pi m / (n dt) of the temporal DFT."""
    return 2 * np.pi * np.fft.fftfreq(n, dt)


def project_modulation(path, M, kind: str = "Q_M", *, taper: float = 1.0, twist: bool = True):
    """Modulation projection Q^S_M by conjugation with the propagator.

    The path is untwisted by e^{-tS}, multiplied by a periodic cosine taper,
    filtered in time with the dyadic multiplier and twisted back.  Hence
    ``Q_<M + Q_>=M`` reproduces the tapered path.  Setting ``twist=False``
    gives the plain temporal projection Q_M (used for Besov blocks).
    """
    from .paths import SampledPath

    if not isinstance(path, SampledPath):
        raise TypeError("expected a SampledPath")
    n = len(path)
    if n & (n - 1):
        raise ValueError("sample count must be a power of two")
    dt = uniform_step(path.times)
    Mv = None if kind == "Q_0" else DyadicIndex.of(M).value
    vals = path.values
    twisted = twist and path.grid is not None
    if twisted:
        vals = vals * np.conj(propagator_phases(path.grid, path.times))
    w = taper_window(n, taper).reshape((n,) + (1,) * (vals.ndim - 1))
    spec = np.fft.fft(vals * w, axis=0)
    m = modulation_multiplier(temporal_frequencies(n, dt), Mv, kind)
    out = np.fft.ifft(spec * m.reshape(w.shape), axis=0)
    if twisted:
        out = out * propagator_phases(path.grid, path.times)
    if np.isrealobj(path.values):
        out = out.real
    return path.replace(values=out, left=None)


# --------------------------------------------------------------------------
# Sobolev norms
# --------------------------------------------------------------------------


def sobolev_weight(grid: FrequencyGrid, s1: float, s2: float, homogeneous: bool) -> np.ndarray:
    """Weight w with ||u||^2 = sum w |c|^2; ``inf`` marks singular lines."""
    xi = np.abs(grid.xi)[:, None]
    eta = np.abs(grid.eta)[None, :]
    if homogeneous:
        with np.errstate(divide="ignore"):
            wx = np.where(xi == 0, np.inf if s1 < 0 else (1.0 if s1 == 0 else 0.0), xi ** (2 * s1))
            wy = np.where(eta == 0, np.inf if s2 < 0 else (1.0 if s2 == 0 else 0.0), eta ** (2 * s2))
    else:
        wx = (1 + xi**2) ** s1
        wy = (1 + eta**2) ** s2
    return wx * wy


def sobolev_norm(u: Field2D, s1: float, s2: float, homogeneous: bool = True) -> float:
    """Anisotropic Sobolev norm with weights |xi|^{s1} |eta|^{s2} or <xi>^{s1} <eta>^{s2}."""
    w = sobolev_weight(u.grid, s1, s2, homogeneous)
    a2 = np.abs(u.coeffs) ** 2
    sing = np.isinf(w)
    if np.any(a2[sing] != 0):
        raise ValueError("nonzero coefficient on a singular weight line")
    return float(np.sqrt(np.sum(np.where(sing, 0.0, w) * a2)))


def path_sobolev_norms(values: np.ndarray, grid: FrequencyGrid, s1: float, s2: float,
                       homogeneous: bool = True) -> np.ndarray:
    """Per-sample Sobolev norms of a stack of coefficient arrays."""
    w = sobolev_weight(grid, s1, s2, homogeneous)
    a2 = np.abs(values) ** 2
    sing = np.isinf(w)
    if np.any(a2[..., sing] != 0):
        raise ValueError("nonzero coefficient on a singular weight line")
    w = np.where(sing, 0.0, w)
    return np.sqrt(np.sum(a2 * w, axis=(-2, -1)))

