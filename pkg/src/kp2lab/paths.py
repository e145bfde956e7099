"""Sampled paths in L^2 and the V^p / U^p machinery on them.

A ``SampledPath`` is a right-continuous step function: it equals the sample
``values[i]`` on ``[times[i], times[i+1])``, a configurable ``left`` value on
``(-inf, times[0])`` and is read as zero at ``+inf``.  Partitions are drawn
from the sample points together with the two sentinels, which is enough to
attain the supremum defining the p-variation of a step function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .spectral import (
    DyadicIndex,
    Field2D,
    FrequencyGrid,
    band_multiplier,
    modulation_multiplier,
    project_frequency_band,
    project_modulation,
    propagator_phases,
    temporal_frequencies,
    taper_window,
    uniform_step,
)

__all__ = [
    "SampledPath",
    "Partition",
    "StepAtom",
    "DecompositionLevel",
    "BilinearResult",
    "p_variation_norm",
    "greedy_decompose",
    "bilinear_form",
    "up_norm_bracket",
    "step_cost",
    "greedy_upper",
    "besov_seminorm",
    "xsbq_seminorm",
    "dyadic_space_norm_bracket",
    "interpolation_bound",
    "resolvable_bands",
    "resolvable_modulations",
    "conjugate_exponent",
]


def _sq_norms(x: np.ndarray) -> np.ndarray:
    """Squared L^2 norms over all axes after the first."""
    a = np.abs(x) ** 2
    return a.reshape(a.shape[0], -1).sum(axis=1) if a.ndim > 1 else a


def _norms(x: np.ndarray) -> np.ndarray:
    return np.sqrt(_sq_norms(x))


def _inner(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise <a_i, b_i> = sum a_i conj(b_i)."""
    prod = a * np.conj(b)
    return prod.reshape(prod.shape[0], -1).sum(axis=1) if prod.ndim > 1 else prod


def conjugate_exponent(p: float) -> float:
    if p < 1:
        raise ValueError("exponent must be >= 1")
    if p == 1:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1)


# --------------------------------------------------------------------------
# paths
# --------------------------------------------------------------------------


class SampledPath:
    """Right-continuous step path through sampled values.

    Parameters
    ----------
    times : strictly increasing sample times, shape (n,)
    values : samples, shape (n, *value_shape); coefficient arrays when a grid
        is attached, otherwise plain scalars or vectors
    grid : FrequencyGrid of the field values, or None
    left : value on (-inf, times[0]); ``None`` means zero, ``"hold"`` copies
        the first sample
    real_flag : the sampled fields are real (only meaningful with a grid)
    """

    __slots__ = ("times", "values", "grid", "left", "real_flag")

    def __init__(self, times, values, grid: Optional[FrequencyGrid] = None, left=None,
                 real_flag: bool = False):
        t = np.array(times, dtype=float).reshape(-1)
        v = np.array(values)
        if v.dtype.kind not in "fc":
            v = v.astype(float)
        if v.shape[:1] != t.shape:
            raise ValueError("values must have one entry per sample time")
        if t.size and (not np.all(np.isfinite(t)) or np.any(np.diff(t) <= 0)):
            raise ValueError("sample times must be finite and strictly increasing")
        if grid is not None and v.shape[1:] != grid.shape:
            raise ValueError("field values do not match the grid shape")
        if isinstance(left, str):
            if left != "hold":
                raise ValueError(f"unknown left convention {left!r}")
            if not t.size:
                raise ValueError("'hold' needs at least one sample")
            left = np.array(v[0])
        elif left is not None:
            left = np.array(left, dtype=v.dtype if np.iscomplexobj(v) else None)
            if left.shape != v.shape[1:]:
                raise ValueError("left value has the wrong shape")
            if not np.any(left):
                left = None
        t.flags.writeable = False
        v.flags.writeable = False
        if left is not None:
            left.flags.writeable = False
        for name, val in zip(self.__slots__, (t, v, grid, left, bool(real_flag) and grid is not None)):
            object.__setattr__(self, name, val)

    def __setattr__(self, name, value):
        raise AttributeError("SampledPath is immutable")

    def __len__(self):
        return self.times.size

    def __repr__(self):
        return f"SampledPath(n={len(self)}, value_shape={self.value_shape}, grid={self.grid!r})"

    @classmethod
    def from_fields(cls, times, fields: Sequence[Field2D], left=None) -> "SampledPath":
        if not fields:
            raise ValueError("at least one field is required")
        grid = fields[0].grid
        for f in fields:
            if f.grid != grid:
                raise ValueError("all fields must share one grid")
        if isinstance(left, Field2D):
            left = left.coeffs
        vals = np.stack([f.coeffs for f in fields])
        return cls(times, vals, grid, left, all(f.real_flag for f in fields))

    @classmethod
    def free_solution(cls, phi: Field2D, times, left=None) -> "SampledPath":
        """Samples of e^{tS} phi at the given times."""
        times = np.asarray(times, dtype=float)
        vals = phi.coeffs[None] * propagator_phases(phi.grid, times)
        real = phi.real_flag and not np.any(phi.coeffs[phi.grid.nx // 2])
        if isinstance(left, str) and left == "hold":
            left = vals[0]
        return cls(times, vals, phi.grid, left, real)

    def replace(self, **kw) -> "SampledPath":
        args = dict(times=self.times, values=self.values, grid=self.grid, left=self.left,
                    real_flag=self.real_flag)
        args.update(kw)
        return SampledPath(**args)

    @property
    def value_shape(self) -> tuple:
        return self.values.shape[1:]

    @property
    def left_value(self) -> np.ndarray:
        if self.left is None:
            return np.zeros(self.value_shape, dtype=self.values.dtype)
        return self.left

    def field(self, i: int) -> Field2D:
        if self.grid is None:
            raise ValueError("path has no grid attached")
        return Field2D(self.grid, self.values[i], self.real_flag)

    def fields(self):
        return [self.field(i) for i in range(len(self))]

    def extended_values(self) -> np.ndarray:
        """Values at (-inf, t_0, ..., t_{n-1}, +inf); the last entry is zero."""
        zero = np.zeros((1,) + self.value_shape, dtype=self.values.dtype)
        return np.concatenate([self.left_value[None], self.values, zero])

    def index_at(self, t) -> np.ndarray:
        """Index into ``extended_values`` of the step value at time(s) t."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t, side="right")
        return np.where(np.isposinf(t), len(self) + 1, np.where(np.isneginf(t), 0, idx))

    def value_at(self, t) -> np.ndarray:
        return self.extended_values()[self.index_at(t)]

    def norms(self) -> np.ndarray:
        return _norms(self.values)

    def untwisted(self) -> "SampledPath":
        """e^{-tS} applied sample-wise; a nonzero left value is read as e^{t S} w
        continued backwards from the first sample."""
        if self.grid is None:
            raise ValueError("twisting needs a grid")
        ph = np.conj(propagator_phases(self.grid, self.times))
        left = None if self.left is None else self.left * ph[0]
        return self.replace(values=self.values * ph, left=left)

    def twisted(self) -> "SampledPath":
        """Inverse of :meth:`untwisted`."""
        if self.grid is None:
            raise ValueError("twisting needs a grid")
        ph = propagator_phases(self.grid, self.times)
        left = None if self.left is None else self.left * ph[0]
        return self.replace(values=self.values * ph, left=left)

    def scaled(self, a) -> "SampledPath":
        left = None if self.left is None else self.left * a
        return self.replace(values=self.values * a, left=left,
                            real_flag=self.real_flag and np.isrealobj(a))


# --------------------------------------------------------------------------
# partitions and atoms
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Partition:
    """Finite partition ``t_0 < ... < t_K`` with optional infinite sentinels.

    ``kind="Z"`` has both sentinels; ``kind="Z0"`` has a finite first point and
    an optional +inf sentinel.
    """

    times: tuple
    neg_inf: bool = True
    pos_inf: bool = True

    def __post_init__(self):
        t = tuple(float(x) for x in self.times)
        if any(not np.isfinite(x) for x in t):
            raise ValueError("finite partition points must be finite")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError("partition points must increase strictly")
        object.__setattr__(self, "times", t)
        if len(self.points()) < 2:
            raise ValueError("a partition needs at least two points")

    @property
    def kind(self) -> str:
        return "Z" if self.neg_inf and self.pos_inf else ("Z0" if not self.neg_inf else "other")

    def points(self) -> np.ndarray:
        pts = list(self.times)
        if self.neg_inf:
            pts.insert(0, -np.inf)
        if self.pos_inf:
            pts.append(np.inf)
        return np.array(pts)

    def __len__(self):
        return len(self.points())

    def refine(self) -> "Partition":
        """Insert the midpoint of every finite interval."""
        t = np.array(self.times)
        if t.size < 2:
            return self
        mids = 0.5 * (t[1:] + t[:-1])
        new = np.empty(2 * t.size - 1)
        new[0::2] = t
        new[1::2] = mids
        return Partition(tuple(new), self.neg_inf, self.pos_inf)

    @classmethod
    def from_paths(cls, *paths: SampledPath) -> "Partition":
        t = np.unique(np.concatenate([p.times for p in paths]))
        return cls(tuple(t))


@dataclass(frozen=True)
class StepAtom:
    """Step function subordinate to a partition in class Z.

    ``values[k]`` is taken on ``[t_k, t_{k+1})``; ``values[0]`` (on the
    interval starting at -inf) must vanish.  With ``twisted=True`` the atom
    stands for ``e^{tS} phi_k`` on each interval.
    """

    partition: Partition
    values: np.ndarray
    grid: Optional[FrequencyGrid] = None
    twisted: bool = False

    def __post_init__(self):
        if self.partition.kind != "Z":
            raise ValueError("atoms live on partitions with both sentinels")
        v = np.asarray(self.values)
        if v.shape[0] != len(self.partition) - 1:
            raise ValueError("need one value per partition interval")
        if np.any(v[0]):
            raise ValueError("an atom vanishes on its first interval")
        object.__setattr__(self, "values", v)

    def lp_sum(self, p: float) -> float:
        n = _norms(self.values)
        return float(np.max(n)) if np.isinf(p) else float(np.sum(n**p))

    def is_atom(self, p: float, tol: float = 1e-12) -> bool:
        return abs(self.lp_sum(p) - 1.0) <= tol

    def to_path(self, times=None) -> SampledPath:
        """Sampled path; for twisted atoms ``times`` chooses where e^{tS} phi_k is evaluated."""
        finite = np.array(self.partition.times)
        if not self.twisted:
            return SampledPath(finite, self.values[1:], self.grid)
        if times is None:
            times = finite
        times = np.asarray(times, dtype=float)
        k = np.searchsorted(finite, times, side="right")
        vals = self.values[k] * propagator_phases(self.grid, times)
        return SampledPath(times, vals, self.grid)

    @classmethod
    def random(cls, rng: np.random.Generator, times, value_shape, p: float,
               grid: Optional[FrequencyGrid] = None) -> "StepAtom":
        """Normalized U^p atom with Gaussian values on the given finite times."""
        times = np.asarray(times, dtype=float)
        K = times.size + 1
        vals = rng.standard_normal((K,) + tuple(value_shape)) + 1j * rng.standard_normal(
            (K,) + tuple(value_shape))
        vals[0] = 0
        if grid is not None:
            vals[:, 0, :] = 0
        s = np.sum(_norms(vals) ** p) ** (1 / p)
        return cls(Partition(tuple(times)), vals / s, grid)


# --------------------------------------------------------------------------
# p-variation
# --------------------------------------------------------------------------


def _compress(x: np.ndarray) -> np.ndarray:
    """Drop consecutive repeats; sentinel rows 0 and -1 are always kept."""
    if x.shape[0] <= 2:
        return x
    flat = x.reshape(x.shape[0], -1)
    same = np.all(flat[1:] == flat[:-1], axis=1)
    keep = np.ones(x.shape[0], bool)
    keep[1:-1] = ~same[:-1]
    return x[keep]


def _pvar_dp(x: np.ndarray, p: float) -> float:
    """Max over chains 0 = i_0 < ... < i_K = m-1 of sum ||x_{i_k} - x_{i_{k-1}}||^p."""
    m = x.shape[0]
    if np.isinf(p):
        best = 0.0
        for i in range(m - 1):
            best = max(best, float(np.max(_norms(x[i + 1:] - x[i]))))
        return best
    best = np.full(m, -np.inf)
    best[0] = 0.0
    for j in range(1, m):
        d = _norms(x[:j] - x[j]) ** p
        best[j] = np.max(best[:j] + d)
    return float(best[-1]) ** (1.0 / p)


def p_variation_norm(v: SampledPath, p: float, twist: bool = False) -> float:
    """V^p norm of a step path: sup over partitions of sample points and sentinels.

    The partition always starts at -inf (value ``v.left``) and ends at +inf
    where the path is read as zero, so the terminal jump is always counted.
    Dynamic programming over sample indices, O(n^2) norm evaluations.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if len(v) == 0:
        raise ValueError("p-variation of an empty path is undefined")
    if twist:
        v = v.untwisted()
    return _pvar_dp(_compress(v.extended_values()), p)


def step_cost(v: SampledPath, q: float) -> float:
    """l^q norm of the step values of v taken as one multiple of a U^q atom.

    Needs ``v`` to vanish before its first sample.
    """
    x = _compress(v.extended_values())[:-1]
    if np.any(x[0]):
        raise ValueError("path does not start from zero")
    n = _norms(x)
    return float(np.max(n)) if np.isinf(q) else float(np.sum(n**q) ** (1 / q))


# --------------------------------------------------------------------------
# greedy decomposition
# --------------------------------------------------------------------------


@dataclass
class DecompositionLevel:
    """One level of the greedy stopping-time decomposition."""

    n: int
    indices: np.ndarray  # partition as indices into the extended sample points
    partition: Partition
    u: SampledPath
    v: SampledPath
    vnorm: float
    p: float
    count: int = 0
    sup_u: float = 0.0
    sup_v: float = 0.0

    def __post_init__(self):
        self.count = int(self.indices.size)
        ext_u = self.u.extended_values()[:-1]
        ext_v = self.v.extended_values()[:-1]
        self.sup_u = float(np.max(_norms(ext_u))) if ext_u.size else 0.0
        self.sup_v = float(np.max(_norms(ext_v))) if ext_v.size else 0.0

    @property
    def count_bound(self) -> float:
        return 2.0 ** (1 + self.n * self.p)

    @property
    def sup_u_bound(self) -> float:
        return 2.0 ** (1 - self.n) * self.vnorm if self.n > 0 else 0.0

    @property
    def sup_v_bound(self) -> float:
        return 2.0 ** (-self.n) * self.vnorm

    def bounds_hold(self, rtol: float = 1e-12) -> bool:
        slack = 1 + rtol
        return (self.count <= self.count_bound
                and self.sup_u <= self.sup_u_bound * slack
                and self.sup_v <= self.sup_v_bound * slack)


def greedy_decompose(v: SampledPath, p: float, n_max: int, vnorm: float | None = None,
                     stop_when_exact: bool = False):
    """Greedy stopping-time decomposition of a step path.

    Level n+1 scans every interval of the level-n partition and adds the
    first point where v leaves the ball of radius 2^{-n-1} ||v||_{V^p}
    around its value at the previously added point.  Then u_{n+1} is v_n
    frozen at partition points and v_{n+1} = v_n - u_{n+1}.  With
    ``stop_when_exact`` the scan ends as soon as the residual vanishes.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if vnorm is None:
        vnorm = p_variation_norm(v, p)
    if vnorm <= 0:
        raise ValueError("cannot decompose the zero path")
    ext = v.extended_values()
    m = ext.shape[0]
    times = v.times

    def as_path(vals):
        return SampledPath(times, vals[1:-1], v.grid, left=vals[0], real_flag=v.real_flag)

    idx = np.array([0, m - 1])
    levels = [DecompositionLevel(0, idx, _partition_of(idx, times), as_path(np.zeros_like(ext)),
                                 as_path(ext), vnorm, p)]
    cur = ext
    for n in range(n_max):
        if stop_when_exact and not np.any(cur):
            break
        thr = 2.0 ** (-n - 1) * vnorm
        new = [0]
        for a, b in zip(idx[:-1], idx[1:]):
            ref = a
            for i in range(a + 1, b):
                if np.sqrt(np.sum(np.abs(ext[i] - ext[ref]) ** 2)) > thr:
                    new.append(i)
                    ref = i
            new.append(b)
        idx = np.array(new)
        owner = idx[np.searchsorted(idx, np.arange(m), side="right") - 1]
        u_ext = cur[owner]
        u_ext[-1] = 0
        nxt = cur - u_ext
        levels.append(DecompositionLevel(n + 1, idx, _partition_of(idx, times), as_path(u_ext),
                                         as_path(nxt), vnorm, p))
        cur = nxt
    return levels


def _partition_of(idx: np.ndarray, times: np.ndarray) -> Partition:
    return Partition(tuple(times[i - 1] for i in idx if 0 < i <= times.size), True, True)


def greedy_upper(v: SampledPath, p: float, q: float | None = None, n_max: int = 64):
    """Constructive U^q upper bound from the V^p greedy decomposition.

    Sums the l^q step costs of u_1, u_2, ... and of the final residual.
    Returns ``(upper, levels)``.
    """
    q = p if q is None else q
    if np.any(v.left_value):
        raise ValueError("path must vanish before its first sample")
    vnorm = p_variation_norm(v, p)
    if vnorm == 0:
        return 0.0, []
    levels = greedy_decompose(v, p, n_max, vnorm, stop_when_exact=True)
    total = sum(step_cost(L.u, q) for L in levels[1:])
    if np.any(levels[-1].v.values):
        total += step_cost(levels[-1].v, q)
    return float(total), levels


# --------------------------------------------------------------------------
# bilinear form and U^p brackets
# --------------------------------------------------------------------------


@dataclass
class BilinearResult:
    value: complex
    values: list
    increments: list
    partitions: list = field(default_factory=list)


def _as_path(u) -> SampledPath:
    if isinstance(u, StepAtom):
        return u.to_path()
    if isinstance(u, SampledPath):
        return u
    raise TypeError("expected StepAtom or SampledPath")


def _bilinear_on(u: SampledPath, v: SampledPath, part: Partition) -> complex:
    pts = part.points()
    if not (np.isneginf(pts[0]) and np.isposinf(pts[-1])):
        raise ValueError("the bilinear form uses partitions with both sentinels")
    uu = u.extended_values()[u.index_at(pts[:-1])]
    vv = v.extended_values()[v.index_at(pts)]
    return complex(np.sum(_inner(uu, vv[1:] - vv[:-1])))


def bilinear_form(u, v: SampledPath, refinement: Partition | None = None,
                  n_refine: int = 2) -> BilinearResult:
    """B_t(u, v) = sum_k <u(t_{k-1}), v(t_k) - v(t_{k-1})> with v(+inf) = 0.

    Evaluated on ``refinement`` (default: all sample times of u and v) and on
    ``n_refine`` successive midpoint refinements; the increments between
    consecutive values are reported as convergence evidence.
    """
    u = _as_path(u)
    if (u.grid is None) != (v.grid is None) or (u.grid is not None and u.grid != v.grid):
        raise ValueError("u and v live on different grids")
    if u.value_shape != v.value_shape:
        raise ValueError("u and v have different value shapes")
    part = refinement if refinement is not None else Partition.from_paths(u, v)
    parts = [part]
    for _ in range(n_refine):
        parts.append(parts[-1].refine())
    vals = [_bilinear_on(u, v, P) for P in parts]
    incs = [abs(b - a) for a, b in zip(vals[:-1], vals[1:])]
    return BilinearResult(vals[-1], vals, incs, parts)


def _aligned_dual(u: SampledPath, p: float) -> SampledPath:
    """Step path whose increments line up with u(t_{k-1}) |u|^{p-2}."""
    x = u.values
    n = _norms(x).reshape((-1,) + (1,) * (x.ndim - 1))
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(n > 0, x * n ** (p - 2), 0)
    # v_k = -(d_k + ... + d_n) so that v(+inf) - v(t_n) = d_n
    tail = -np.cumsum(d[::-1], axis=0)[::-1]
    vals = tail
    return SampledPath(u.times, vals, u.grid, left=vals[0] if len(u) else None)


def up_norm_bracket(u: SampledPath, p: float, n_dual_samples: int = 16, seed: int = 0,
                    n_max: int = 64):
    """Lower and upper bounds for the U^p norm of a step path.

    lower: max of |B(u, v)| / ||v||_{V^{p'}} over seeded random step paths v
    (with the same sample times) and one aligned dual candidate.
    upper: the smaller of the single-atom step cost and the greedy
    decomposition cost.
    """
    if np.any(u.left_value):
        raise ValueError("U^p paths must vanish before their first sample")
    if not np.any(u.values):
        return 0.0, 0.0
    pp = conjugate_exponent(p)
    cands = [_aligned_dual(u, p)]
    for i in range(n_dual_samples):
        rng = np.random.default_rng([seed, i])
        shape = (len(u) + 1,) + u.value_shape
        w = rng.standard_normal(shape)
        if np.iscomplexobj(u.values):
            w = w + 1j * rng.standard_normal(shape)
        if u.grid is not None:
            w[..., 0, :] = 0
        cands.append(SampledPath(u.times, w[1:], u.grid, left=w[0]))
    part = Partition(tuple(u.times))
    lower = 0.0
    for c in cands:
        den = p_variation_norm(c, pp)
        if den > 0:
            lower = max(lower, abs(_bilinear_on(u, c, part)) / den)
    upper = min(step_cost(u, p), greedy_upper(u, p, p, n_max)[0])
    return float(lower), float(upper)


# --------------------------------------------------------------------------
# Besov and X^{s,b,q} seminorms
# --------------------------------------------------------------------------


def resolvable_modulations(n: int, dt: float):
    """Dyadic M whose multiplier psi_M touches a nonzero temporal frequency."""
    tau = np.abs(temporal_frequencies(n, dt))
    tau = tau[tau > 0]
    lo = int(np.floor(np.log2(tau.min()))) - 1
    hi = int(np.ceil(np.log2(tau.max()))) + 1
    out = []
    for e in range(lo, hi + 1):
        M = DyadicIndex(e)
        if np.any(modulation_multiplier(tau, M.value, "Q_M") != 0):
            out.append(M)
    return out


def resolvable_bands(grid: FrequencyGrid):
    """Dyadic N whose multiplier psi_N touches a nonzero xi on the grid."""
    xi = np.abs(grid.xi)
    xi = xi[xi > 0]
    lo = int(np.floor(np.log2(xi.min()))) - 1
    hi = int(np.ceil(np.log2(xi.max()))) + 1
    return [DyadicIndex(e) for e in range(lo, hi + 1)
            if np.any(band_multiplier(xi, 2.0**e, "P_N") != 0)]


def _lq(vals, q):
    vals = np.asarray(vals, dtype=float)
    if vals.size == 0:
        return 0.0
    if np.isinf(q):
        return float(np.max(vals))
    return float(np.sum(vals**q) ** (1 / q))


def _lp_time(norms_t: np.ndarray, p: float, dt: float) -> float:
    if np.isinf(p):
        return float(np.max(norms_t)) if norms_t.size else 0.0
    return float((np.sum(norms_t**p) * dt) ** (1 / p))


def besov_seminorm(path: SampledPath, s: float, p: float, q: float, taper: float = 0.0) -> float:
    """Temporal Besov seminorm (sum_N N^{sq} ||Q_N path||_{L^p_t L^2}^q)^{1/q}.

    The sampling window is treated as one period (``taper=0``); pass a taper
    fraction to damp the wrap-around jump instead.
    """
    n = len(path)
    if n & (n - 1) or n < 2:
        raise ValueError("sample count must be a power of two")
    dt = uniform_step(path.times)
    if not np.any(path.values):
        return 0.0
    vals = path.values * taper_window(n, taper).reshape((n,) + (1,) * (path.values.ndim - 1))
    spec = np.fft.fft(vals, axis=0)
    tau = temporal_frequencies(n, dt)
    blocks = []
    for M in resolvable_modulations(n, dt):
        m = modulation_multiplier(tau, M.value, "Q_M").reshape((n,) + (1,) * (vals.ndim - 1))
        block = np.fft.ifft(spec * m, axis=0)
        blocks.append(M.value**s * _lp_time(_norms(block), p, dt))
    return _lq(blocks, q)


def xsbq_seminorm(path: SampledPath, s: float, b: float, q: float, taper: float = 1.0) -> float:
    """(sum_N N^{2s} (sum_M M^{bq} ||P_N Q^S_M u||_{L^2}^q)^{2/q})^{1/2}."""
    if path.grid is None:
        raise ValueError("X^{s,b,q} needs a path of fields")
    n = len(path)
    if n & (n - 1) or n < 2:
        raise ValueError("sample count must be a power of two")
    dt = uniform_step(path.times)
    if not np.any(path.values):
        return 0.0
    mods = resolvable_modulations(n, dt)
    total = 0.0
    for N in resolvable_bands(path.grid):
        PN = project_frequency_band(path, N, "P_N")
        if not np.any(PN.values):
            continue
        inner = []
        for M in mods:
            blk = project_modulation(PN, M, "Q_M", taper=taper)
            inner.append(M.value**b * _lp_time(_norms(blk.values), 2.0, dt))
        total += N.value ** (2 * s) * _lq(inner, q) ** 2
    return float(np.sqrt(total))


def dyadic_space_norm_bracket(path: SampledPath, s: float, space: str, n_dual_samples: int = 8,
                              seed: int = 0):
    """Bracket (lower, upper) for the dyadic norms of Y_dot^s, Z_dot^s and X.

    Y_dot blocks are exact V^2_S norms; Z_dot blocks are U^2_S brackets; X adds
    the X^{s,1,1} seminorm to the Z_dot bracket.
    """
    if path.grid is None:
        raise ValueError("dyadic space norms need a path of fields")
    if space not in ("Y_dot", "Z_dot", "X"):
        raise ValueError(f"unknown space {space!r}")
    if not np.any(path.values) and not np.any(path.left_value):
        return 0.0, 0.0
    lo2 = hi2 = 0.0
    for N in resolvable_bands(path.grid):
        PN = project_frequency_band(path, N, "P_N")
        if not np.any(PN.values) and not np.any(PN.left_value):
            continue
        w = N.value ** (2 * s)
        if space == "Y_dot":
            b = p_variation_norm(PN, 2.0, twist=True)
            lo, hi = b, b
        else:
            lo, hi = up_norm_bracket(PN.untwisted(), 2.0, n_dual_samples, seed)
        lo2 += w * lo**2
        hi2 += w * hi**2
    lo, hi = float(np.sqrt(lo2)), float(np.sqrt(hi2))
    if space == "X":
        extra = xsbq_seminorm(path, s, 1.0, 1.0)
        lo, hi = lo + extra, hi + extra
    return lo, hi


# --------------------------------------------------------------------------
# interpolation constant
# --------------------------------------------------------------------------


def interpolation_bound(C_p: float, C_q: float, p: float, q: float):
    """Explicit constant 4 C_p / a (ln(C_q / C_p) + 2 a + 1), a = (1 - p/q) ln 2.

    Returns ``(bound, N_star)`` where N_star is the positive integer
    minimizing 4 C_p N + 4 C_q 2^{-N (1 - p/q)}.
    """
    if not (1 <= p < q):
        raise ValueError("need 1 <= p < q")
    if not (0 < C_p <= C_q):
        raise ValueError("need 0 < C_p <= C_q")
    a = (1 - p / q) * np.log(2.0)
    bound = 4 * C_p / a * (np.log(C_q / C_p) + 2 * a + 1)
    # the objective is convex in N, so scan from the real minimizer outwards
    N_real = max(1.0, np.log(C_q * a / C_p) / a) if C_q * a > C_p else 1.0
    cand = {max(1, int(np.floor(N_real))), max(1, int(np.ceil(N_real))), 1}
    N_star = min(cand, key=lambda N: (4 * C_p * N + 4 * C_q * 2.0 ** (-N * (1 - p / q)), N))
    return float(bound), int(N_star)
