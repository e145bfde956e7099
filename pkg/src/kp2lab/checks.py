"""Acceptance checks 1-14 as library functions.

Each check returns a :class:`CheckResult`.  Counts are parameters so the
``verify`` command can run reduced versions; the defaults are the full
acceptance settings.  Results carry no timings, which keeps reports
deterministic; callers time the checks themselves when a runtime bound applies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import oracles
from .estimates import (
    EstimateSpec,
    bilinear_sweep,
    resonance_check,
    run_estimate,
)
from .paths import (
    SampledPath,
    StepAtom,
    bilinear_form,
    conjugate_exponent,
    greedy_decompose,
    greedy_upper,
    interpolation_bound,
    p_variation_norm,
    step_cost,
    up_norm_bracket,
)
from .solver import (
    DataSpec,
    Galilean,
    Scaling,
    SolverConfig,
    apply_symmetry,
    dealias_mask,
    make_initial_data,
    picard_solve,
)
from .spectral import Field2D, FrequencyGrid, free_propagate, sobolev_norm

__all__ = ["CheckResult", "CHECKS", "run_checks", "REDUCED"]


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    metrics: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name}: {self.detail}"


def _random_small_path(rng, max_samples=12, random_left=True):
    n = int(rng.integers(1, max_samples + 1))
    dim = int(rng.integers(1, 4))
    cplx = bool(rng.integers(0, 2))
    shape = (n,) if dim == 1 else (n, dim)
    v = rng.standard_normal(shape)
    if cplx:
        v = v + 1j * rng.standard_normal(shape)
    left = None
    if random_left and rng.random() < 0.5:
        left = rng.standard_normal(shape[1:])
        if cplx:
            left = left + 1j * rng.standard_normal(shape[1:])
    return SampledPath(np.arange(n, dtype=float), v, left=left)


# --------------------------------------------------------------------------
# 1-4: path spaces
# --------------------------------------------------------------------------


def check_pvariation_oracle(n_paths: int = 500, seed: int = 1) -> CheckResult:
    worst = 0.0
    for i in range(n_paths):
        rng = np.random.default_rng([seed, i])
        path = _random_small_path(rng)
        p = (1.5, 2.0, 3.0)[i % 3]
        dp = p_variation_norm(path, p)
        bf = oracles.pvariation_bruteforce(path.values, p, path.left)
        worst = max(worst, abs(dp - bf))
    ok = worst <= 1e-12
    return CheckResult(1, "p-variation oracle", ok, f"{n_paths} paths, max |DP - brute| = {worst:.2e}",
                       {"max_abs_diff": worst})


def dyadic_normalized_path(rng, n: int, dim: int, p: float, bits: int = 30):
    """Gaussian path scaled to unit V^p, then rounded to multiples of 2^-bits."""
    v = rng.standard_normal((n, dim))
    path = SampledPath(np.arange(n, dtype=float), v)
    v = v / p_variation_norm(path, p)
    v = np.round(np.ldexp(v, bits))
    return SampledPath(np.arange(n, dtype=float), np.ldexp(v, -bits))


def check_greedy_bounds(n_paths: int = 100, seed: int = 2, levels: int = 6) -> CheckResult:
    fails = []
    for i in range(n_paths):
        rng = np.random.default_rng([seed, i])
        p = (1.5, 2.0, 3.0)[i % 3]
        path = dyadic_normalized_path(rng, int(rng.integers(8, 65)), int(rng.integers(1, 4)), p)
        vnorm = p_variation_norm(path, p)
        lv = greedy_decompose(path, p, levels, vnorm)
        ext = path.extended_values()
        acc = np.zeros_like(ext)
        for L in lv:
            acc = acc + L.u.extended_values()
            if not L.bounds_hold(1e-12):
                fails.append((i, L.n, "bounds"))
            if not np.array_equal(acc + L.v.extended_values(), ext):
                fails.append((i, L.n, "telescoping"))
    ok = not fails
    return CheckResult(2, "greedy decomposition bounds", ok,
                       f"{n_paths} paths x levels 0..{levels}, {len(fails)} violations",
                       {"violations": len(fails)})


def check_atoms(n_atoms: int = 200, seed: int = 3, n_dual: int = 8) -> CheckResult:
    bad = []
    worst_v = worst_up = 0.0
    for i in range(n_atoms):
        rng = np.random.default_rng([seed, i])
        p = (1.5, 2.0, 3.0)[i % 3]
        n = int(rng.integers(1, 9))
        atom = StepAtom.random(rng, np.arange(n, dtype=float), (int(rng.integers(1, 4)),), p)
        path = atom.to_path()
        vp = p_variation_norm(path, p)
        lo, hi = up_norm_bracket(path, p, n_dual_samples=n_dual, seed=i)
        cor, _ = greedy_upper(path, p, 2 * p)
        bound = 4 / (1 - 2 ** (p / (2 * p) - 1))
        worst_v = max(worst_v, vp)
        worst_up = max(worst_up, cor)
        if vp > 2 + 1e-9:
            bad.append((i, "V^p > 2"))
        if lo > 1 + 1e-9:
            bad.append((i, "lower > 1"))
        if hi < 1 - 1e-9:
            bad.append((i, f"upper {hi:.6f} < 1"))
        if cor > bound + 1e-9:
            bad.append((i, "Cor 2.6 bound"))
    ok = not bad
    detail = (f"{n_atoms} atoms, max V^p = {worst_v:.4f}, max U^(2p) upper = {worst_up:.4f}, "
              f"{len(bad)} violations")
    if bad:
        detail += f" (first: atom {bad[0][0]}, {bad[0][1]})"
    return CheckResult(3, "atom norms", ok, detail, {"violations": len(bad), "max_vp": worst_v})


def check_duality(n_pairs: int = 10000, seed: int = 4) -> CheckResult:
    viol = 0
    worst = 0.0
    for i in range(n_pairs):
        rng = np.random.default_rng([seed, i])
        p = (1.5, 2.0, 3.0)[i % 3]
        u = _random_small_path(rng, 8, random_left=False)
        shape = u.values.shape
        v = rng.standard_normal(shape) + (1j * rng.standard_normal(shape) if np.iscomplexobj(u.values) else 0)
        vl = rng.standard_normal(shape[1:])
        # v on its own sample times inside the span of u
        tv = np.sort(rng.uniform(-1, len(u), size=shape[0]))
        tv = np.unique(tv)
        vpath = SampledPath(tv, v[:tv.size], left=vl)
        B = abs(bilinear_form(u, vpath, n_refine=0).value)
        upper = min(step_cost(u, p), greedy_upper(u, p)[0])
        rhs = upper * p_variation_norm(vpath, conjugate_exponent(p))
        worst = max(worst, B / rhs if rhs > 0 else 0.0)
        if B > rhs * (1 + 1e-12):
            viol += 1
    return CheckResult(4, "duality inequality", viol == 0,
                       f"{n_pairs} pairs, {viol} violations, max |B|/bound = {worst:.6f}",
                       {"violations": viol, "max_ratio": worst})


# --------------------------------------------------------------------------
# 5-9: spectral identities and estimates
# --------------------------------------------------------------------------


def check_resonance(n_triples: int = 10000, seed: int = 5) -> CheckResult:
    rng = np.random.default_rng(seed)
    xi1 = rng.uniform(-10, 10, n_triples)
    xi2 = rng.uniform(-10, 10, n_triples)
    eta1 = rng.uniform(-10, 10, n_triples)
    eta2 = rng.uniform(-10, 10, n_triples)
    keep = (np.abs(xi1) > 1e-3) & (np.abs(xi2) > 1e-3) & (np.abs(xi1 + xi2) > 1e-3)
    xi1, xi2, eta1, eta2 = xi1[keep], xi2[keep], eta1[keep], eta2[keep]
    lam, rhs = resonance_check(xi1, eta1, xi2, eta2, check=False)
    rel = np.max(np.abs(np.abs(lam) - rhs) / rhs)
    lower_ok = bool(np.all(np.abs(lam) >= 3 * np.abs(xi1 * xi2 * (-xi1 - xi2)) * (1 - 1e-12)))
    exact_ok = True
    irng = np.random.default_rng(seed + 1)
    for _ in range(200):
        a, b = irng.integers(-9, 10, 2)
        if a == 0 or b == 0 or a + b == 0:
            continue
        c, d = irng.integers(-9, 10, 2)
        lam_q, closed_q = oracles.resonance_exact(a, c, b, d)
        f_lam, f_rhs = resonance_check(a, c, b, d)
        exact_ok &= lam_q == -closed_q and abs(f_lam - float(lam_q)) <= 1e-12 * abs(float(lam_q))
    ok = rel <= 1e-9 and lower_ok and exact_ok
    return CheckResult(5, "resonance identity", bool(ok),
                       f"{int(keep.sum())} triples, max rel err {rel:.2e}, lower bound "
                       f"{'ok' if lower_ok else 'violated'}, exact rational oracle "
                       f"{'ok' if exact_ok else 'mismatch'}",
                       {"max_rel": float(rel)})


def check_propagator(n_fields: int = 100, n_times: int = 10, seed: int = 6) -> CheckResult:
    g = FrequencyGrid(32, 32)
    worst_u = worst_g = 0.0
    for i in range(n_fields):
        rng = np.random.default_rng([seed, i])
        c = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
        c[0] = 0
        u = Field2D(g, c / np.linalg.norm(c))
        ts = rng.uniform(-1, 1, (n_times, 2))
        for t, s in ts:
            a = free_propagate(u, t)
            worst_u = max(worst_u, abs(a.norm() - 1.0))
            worst_g = max(worst_g, (free_propagate(a, s) - free_propagate(u, t + s)).norm())
    ok = worst_u < 1e-12 and worst_g < 1e-12
    return CheckResult(6, "propagator unitarity and group law", ok,
                       f"norm drift {worst_u:.2e}, group-law defect {worst_g:.2e}",
                       {"unitarity": worst_u, "group": worst_g})


def check_strichartz(trials_small: int = 1000, trials_large: int = 10000, scale_trials: int = 50,
                     seed: int = 7) -> CheckResult:
    base = dict(name="l4_strichartz", nx=64, ny=64, N1=4, eta_cap=15, nt=8, seed=seed)
    r = {lam: run_estimate(EstimateSpec(**base, trials=scale_trials, lam=lam)).ratios
         for lam in (0.5, 1.0, 2.0)}
    dev = max(float(np.max(np.abs(r[lam] / r[1.0] - 1))) for lam in (0.5, 2.0))
    big = run_estimate(EstimateSpec(**base, trials=trials_large))
    small_max = float(np.max(big.ratios[:trials_small]))
    spread = abs(big.max / small_max - 1)
    ok = dev < 0.05 and spread < 0.20
    return CheckResult(7, "Strichartz scale invariance", ok,
                       f"max per-trial deviation across lambda {dev:.2e}; observed constant "
                       f"{small_max:.5f} ({trials_small}) vs {big.max:.5f} ({trials_large}), "
                       f"spread {spread:.3f}",
                       {"lambda_dev": dev, "spread": spread})


def check_bilinear(trials: int = 200, seed: int = 8, ratios=(2, 4, 8, 16, 32, 64),
                   N2: float = 16.0) -> CheckResult:
    base = EstimateSpec(name="bilinear_N1N2", nx=128, ny=128, N1=N2 / 2, N2=N2, trials=trials,
                        seed=seed, nt=8, eta_cap=31)
    resolvable, skipped = [], []
    for r in ratios:
        try:
            EstimateSpec(**{**base.__dict__, "N1": N2 / r})
            resolvable.append(r)
        except ValueError:
            skipped.append(r)
    slope = half = float("nan")
    if len(resolvable) >= 3:
        _, (slope, _, half) = bilinear_sweep(base, resolvable, N2)
    ok = not skipped and 0.35 <= slope <= 0.65
    detail = f"slope {slope:.3f} +- {half:.3f} over N2/N1 in {resolvable}"
    if skipped:
        detail += f"; N2/N1 in {skipped} not resolvable at 128^2"
    return CheckResult(8, "bilinear exponent", bool(ok), detail,
                       {"slope": slope, "skipped": len(skipped)})


def check_modulation(trials: int = 300, seed: int = 9, Ms=(8, 16, 32, 64, 128)) -> CheckResult:
    maxima = []
    for M in Ms:
        rep = run_estimate(EstimateSpec(name="modulation_decay", nx=8, ny=8, nt=1024, T=2 * np.pi,
                                        M=M, trials=trials, seed=seed, max_jumps=2))
        maxima.append(rep.max)
    spread = max(maxima) / min(maxima) - 1
    ok = spread < 0.20 and np.all(np.isfinite(maxima))
    return CheckResult(9, "modulation decay", bool(ok),
                       f"M in {list(Ms)}: constants {', '.join(f'{m:.4f}' for m in maxima)}; "
                       f"spread {spread:.3f}",
                       {"spread": spread})


# --------------------------------------------------------------------------
# 10-13: solver
# --------------------------------------------------------------------------


def criterion10_config(**kw) -> SolverConfig:
    args = dict(nx=128, ny=128, T=1.0, nodes=64, tol=1e-12, max_iter=20,
                data=DataSpec(kind="gaussian", amplitude=1e-2, seed=0), brackets=False)
    args.update(kw)
    return SolverConfig(**args)


def check_picard(config: SolverConfig | None = None, _cache: dict | None = None) -> CheckResult:
    config = config or criterion10_config()
    u0 = make_initial_data(config)
    u, d = picard_solve(u0, config)
    if _cache is not None:
        _cache["run"] = (u0, u, d)
    rhos = d.rhos
    ok = d.converged and d.iterations <= 20 and all(r < 0.5 for r in rhos) \
        and d.fixed_point_residual < 1e-8
    return CheckResult(10, "Picard contraction", bool(ok),
                       f"{d.iterations} iterations, max rho {max(rhos) if rhos else 0:.3e}, "
                       f"fixed-point residual {d.fixed_point_residual:.2e}",
                       {"iterations": d.iterations, "fixed_point_residual": d.fixed_point_residual})


def check_conservation(config: SolverConfig | None = None, _cache: dict | None = None) -> CheckResult:
    if _cache and "run" in _cache:
        _, _, d = _cache["run"]
    else:
        config = config or criterion10_config()
        _, d = picard_solve(make_initial_data(config), config)
    drift = float(np.max(np.abs(d.I0 - d.I0[0])) / d.I0[0])
    return CheckResult(11, "I0 conservation", drift < 1e-6, f"relative I0 drift {drift:.2e}",
                       {"drift": drift})


def _rel(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def check_symmetries(nodes: int = 32) -> CheckResult:
    cfg = SolverConfig(nx=32, ny=32, T=1.0, nodes=nodes, tol=1e-14, brackets=False,
                       data=DataSpec(amplitude=0.1, seed=12))
    u0 = make_initial_data(cfg)
    u, _ = picard_solve(u0, cfg)
    S = Scaling(0.5)
    w0 = apply_symmetry(u0, S)
    cfg_s = SolverConfig(nx=32, ny=32, Lx=w0.grid.Lx, Ly=w0.grid.Ly, T=cfg.T / 0.5**3, nodes=nodes,
                         tol=1e-14, brackets=False)
    w, _ = picard_solve(w0, cfg_s)
    e_scale = _rel(apply_symmetry(u, S).values, w.values)
    # tall grid so the shear keeps every resolved mode on the grid
    cfg_g = SolverConfig(nx=16, ny=128, Lx=2 * np.pi, Ly=16 * np.pi, T=1.0, nodes=nodes, tol=1e-14,
                         brackets=False, data=DataSpec(amplitude=0.1, seed=13, jmax=3, kmax=3))
    g0 = make_initial_data(cfg_g)
    ug, _ = picard_solve(g0, cfg_g)
    G = Galilean(cfg_g.Lx / cfg_g.Ly)
    vg, _ = picard_solve(apply_symmetry(g0, G), cfg_g)
    e_gal = _rel(apply_symmetry(ug, G).values, vg.values)
    ok = e_scale < 1e-6 and e_gal < 1e-6
    return CheckResult(12, "symmetry commutation", ok,
                       f"scaling(1/2) {e_scale:.2e}, Galilean(c = Lx/Ly) {e_gal:.2e}",
                       {"scaling": e_scale, "galilean": e_gal})


def localized_datum(grid: FrequencyGrid, sigma: float, amplitude: float) -> Field2D:
    """x-derivative of a centred Gaussian bump, dealiased, with given H^{-1/2,0} norm."""
    X, Y = grid.physical_coords()
    x0, y0 = grid.Lx / 2, grid.Ly / 2
    u = -(X - x0) / sigma**2 * np.exp(-((X - x0) ** 2 + (Y - y0) ** 2) / (2 * sigma**2))
    f = Field2D.from_physical(grid, u)
    c = f.coeffs * dealias_mask(grid)
    from .spectral import reflect
    f = Field2D(grid, 0.5 * (c + np.conj(reflect(c))), True)
    return f * (amplitude / sobolev_norm(f, -0.5, 0.0))


def scattering_config(T: float = 8.0, nodes: int = 256) -> SolverConfig:
    return SolverConfig(nx=128, ny=128, Lx=64.0, Ly=64.0, T=T, nodes=nodes, tol=1e-14,
                        brackets=False)


def check_scattering(T: float = 8.0, nodes: int = 256) -> CheckResult:
    cfg = scattering_config(T, nodes)
    u0 = localized_datum(cfg.grid, 1.5, 1e-3)
    u, d = picard_solve(u0, cfg)
    from .solver import scattering_state
    u_plus, inc = scattering_state(u, d.probe_times)
    mono = all(b <= 1.1 * a for a, b in zip(inc[:-1], inc[1:]))
    final = inc[-1] / inc[0]
    l2_ok = u_plus.norm() <= u0.norm() + 1e-6
    ok = d.converged and mono and final < 0.1 and l2_ok
    return CheckResult(13, "scattering Cauchy property", bool(ok),
                       f"increments {', '.join(f'{x:.3e}' for x in inc)}; monotone "
                       f"{'yes' if mono else 'no'}; final/first {final:.3f}",
                       {"final_over_first": final, "monotone": mono})


# --------------------------------------------------------------------------
# 14
# --------------------------------------------------------------------------


def check_interpolation(n_cases: int = 1000, seed: int = 14) -> CheckResult:
    b, _ = interpolation_bound(1, 1, 1, 2)
    ok_val = abs(b - 19.5416) <= 1e-3
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(n_cases):
        p = rng.uniform(1, 4)
        q = p * rng.uniform(1.05, 4)
        cp = rng.uniform(0.1, 10)
        cq = cp * rng.uniform(1, 100)
        bound, _ = interpolation_bound(cp, cq, p, q)
        dmin, _ = oracles.interpolation_discrete_min(cp, cq, p, q)
        worst = min(worst, bound - dmin)
    ok = ok_val and worst >= 0
    return CheckResult(14, "interpolation constant", bool(ok),
                       f"bound(1,1,1,2) = {b:.4f}; min(bound - discrete min) over {n_cases} cases "
                       f"= {worst:.3e}", {"bound": b, "margin": float(worst)})


CHECKS = {
    1: check_pvariation_oracle,
    2: check_greedy_bounds,
    3: check_atoms,
    4: check_duality,
    5: check_resonance,
    6: check_propagator,
    7: check_strichartz,
    8: check_bilinear,
    9: check_modulation,
    10: check_picard,
    11: check_conservation,
    12: check_symmetries,
    13: check_scattering,
    14: check_interpolation,
}

# reduced counts used by the verify command
REDUCED = {
    1: dict(n_paths=100),
    2: dict(n_paths=30),
    3: dict(n_atoms=60),
    4: dict(n_pairs=1000),
    5: dict(n_triples=10000),
    6: dict(n_fields=20),
    7: dict(trials_small=100, trials_large=1000, scale_trials=10),
    8: dict(trials=20),
    9: dict(trials=60),
    10: dict(),
    11: dict(),
    12: dict(nodes=16),
    13: dict(nodes=128),
    14: dict(n_cases=200),
}


def run_checks(numbers=None, reduced: bool = False):
    """Run the selected checks in order; checks 10 and 11 share one solve."""
    numbers = sorted(numbers or CHECKS)
    cache: dict = {}
    out = []
    for k in numbers:
        kw = dict(REDUCED[k]) if reduced else {}
        if k in (10, 11):
            kw["_cache"] = cache
        out.append(CHECKS[k](**kw))
    return out
