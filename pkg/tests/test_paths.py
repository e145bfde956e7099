import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kp2lab.checks import dyadic_normalized_path
from kp2lab.estimates import sample_band_limited_field
from kp2lab.oracles import interpolation_discrete_min, pvariation_bruteforce
from kp2lab.paths import (
    Partition,
    SampledPath,
    StepAtom,
    besov_seminorm,
    bilinear_form,
    conjugate_exponent,
    dyadic_space_norm_bracket,
    greedy_decompose,
    greedy_upper,
    interpolation_bound,
    p_variation_norm,
    step_cost,
    up_norm_bracket,
    xsbq_seminorm,
)
from kp2lab.spectral import Field2D, FrequencyGrid, project_frequency_band

PS = [1.5, 2.0, 3.0]


# --------------------------------------------------------------------------
# containers
# --------------------------------------------------------------------------


def test_path_rejects_unsorted_times():
    with pytest.raises(ValueError):
        SampledPath([0.0, 0.0], [1.0, 2.0])


def test_path_right_continuous_lookup():
    v = SampledPath([0.0, 1.0, 2.0], [1.0, 2.0, 3.0], left=5.0)
    assert v.value_at(-1.0) == 5.0
    assert v.value_at(1.0) == 2.0
    assert v.value_at(1.5) == 2.0
    assert v.value_at(np.inf) == 0.0


def test_partition_classes():
    assert Partition((0.0, 1.0)).kind == "Z"
    assert Partition((0.0, 1.0), neg_inf=False).kind == "Z0"
    with pytest.raises(ValueError):
        Partition((1.0, 0.0))
    assert len(Partition((0.0, 1.0)).refine()) == 5


def test_atom_normalization():
    rng = np.random.default_rng(0)
    for p in PS:
        a = StepAtom.random(rng, np.arange(5.0), (3,), p)
        assert a.is_atom(p)
        assert not np.any(a.values[0])


def test_conjugate_exponent():
    assert conjugate_exponent(2) == 2
    assert conjugate_exponent(1) == np.inf
    assert conjugate_exponent(3) == 1.5


# --------------------------------------------------------------------------
# p-variation
# --------------------------------------------------------------------------


def test_pvar_indicator():
    v = SampledPath([0.0, 1.0], [1.0, 0.0])
    assert p_variation_norm(v, 2) == pytest.approx(np.sqrt(2), abs=1e-15)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, np.inf])
def test_pvar_constant_path(p):
    v = SampledPath([0.0, 1.0, 2.0], np.ones((3, 2)) / np.sqrt(2), left="hold")
    assert p_variation_norm(v, p) == pytest.approx(1.0, abs=1e-15)


def test_pvar_worked_example():
    v = SampledPath([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 0.5, 2.0])
    assert p_variation_norm(v, 2) == pytest.approx(2 * np.sqrt(2), abs=1e-15)
    assert pvariation_bruteforce(v.values, 2) == pytest.approx(2 * np.sqrt(2), abs=1e-15)


def test_pvar_empty_path():
    with pytest.raises(ValueError):
        p_variation_norm(SampledPath([], np.zeros(0)), 2)


def test_pvar_twist_of_free_solution():
    g = FrequencyGrid(8, 8)
    phi = sample_band_limited_field(g, None, 0)
    path = SampledPath.free_solution(phi, np.linspace(0, 1, 9))
    # untwisted path is phi on [0, 1] then 0: two unit jumps
    assert p_variation_norm(path, 2.0, twist=True) == pytest.approx(np.sqrt(2), rel=1e-12)


def _small_path(draw_vals, left):
    n = draw_vals.shape[0]
    return SampledPath(np.arange(n, dtype=float), draw_vals, left=left)


@settings(max_examples=150, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 3)),
              elements=st.floats(-10, 10)),
       st.sampled_from(PS + [1.0]), st.booleans())
def test_pvar_matches_enumeration(vals, p, use_left):
    left = vals[-1] * 0.5 if use_left else None
    v = _small_path(vals, left)
    assert abs(p_variation_norm(v, p) - pvariation_bruteforce(vals, p, left)) <= 1e-12 * max(
        1.0, p_variation_norm(v, p))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(PS))
def test_pvar_monotone_in_p(seed, p):
    rng = np.random.default_rng(seed)
    v = SampledPath(np.arange(10.0), rng.standard_normal((10, 2)))
    assert p_variation_norm(v, p + 1) <= p_variation_norm(v, p) * (1 + 1e-12)


# --------------------------------------------------------------------------
# greedy decomposition
# --------------------------------------------------------------------------


def test_greedy_single_jump():
    v = SampledPath([0.0, 1.0, 2.0], np.ones((3, 1)), left="hold")
    levels = greedy_decompose(v, 2.0, 3)
    assert np.array_equal(levels[1].u.extended_values(), v.extended_values())
    assert levels[1].sup_v <= 0.5
    assert not np.any(levels[1].v.extended_values())


def test_greedy_zero_path():
    with pytest.raises(ValueError):
        greedy_decompose(SampledPath([0.0], [0.0]), 2.0, 3)


@pytest.mark.parametrize("p", PS)
@pytest.mark.parametrize("seed", range(10))
def test_greedy_bounds_and_telescoping(p, seed):
    rng = np.random.default_rng([seed, 77])
    v = dyadic_normalized_path(rng, int(rng.integers(8, 40)), 2, p)
    levels = greedy_decompose(v, p, 6)
    assert levels[0].count == 2 and not np.any(levels[0].u.values)
    acc = np.zeros_like(v.extended_values())
    for L in levels:
        assert L.bounds_hold()
        assert L.count <= 2.0 ** (1 + L.n * p)
        acc = acc + L.u.extended_values()
        assert np.array_equal(acc + L.v.extended_values(), v.extended_values())


def test_greedy_upper_single_step():
    v = SampledPath([0.0, 1.0], [[0.6], [0.0]])
    upper, _ = greedy_upper(v, 2.0)
    assert upper == pytest.approx(0.6)
    assert step_cost(v, 2.0) == pytest.approx(0.6)


# --------------------------------------------------------------------------
# bilinear form and brackets
# --------------------------------------------------------------------------


def test_bilinear_indicator():
    rng = np.random.default_rng(1)
    phi = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    u = SampledPath([0.5, 2.5], [phi, np.zeros(3)])
    tv = np.arange(5.0)
    v = SampledPath(tv, rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3)))
    res = bilinear_form(u, v)
    expected = np.vdot(v.value_at(2.5) - v.value_at(0.5), phi)
    assert res.value == pytest.approx(expected, abs=1e-13)
    assert all(inc == 0 for inc in res.increments)


def test_bilinear_grid_mismatch():
    a = Field2D.zeros(FrequencyGrid(8, 8))
    b = Field2D.zeros(FrequencyGrid(16, 16))
    with pytest.raises(ValueError):
        bilinear_form(SampledPath.from_fields([0.0], [a]), SampledPath.from_fields([0.0], [b]))


def _smooth_pair(n):
    t = np.linspace(0.0, 1.0, n + 1)
    u = np.stack([np.sin(np.pi * t), t**2 * (1 - t)], axis=1)
    v = np.stack([np.cos(3 * t), np.exp(-t)], axis=1)
    return SampledPath(t, u), SampledPath(t, v)


def _integral_reference():
    from scipy.integrate import trapezoid
    t = np.linspace(0.0, 1.0, 200001)
    du = np.stack([np.pi * np.cos(np.pi * t), 2 * t - 3 * t**2], axis=1)
    v = np.stack([np.cos(3 * t), np.exp(-t)], axis=1)
    return -trapezoid(np.sum(du * v, axis=1), t)


def test_bilinear_smooth_integral():
    # u vanishes at both ends, so B(u, v) tends to -int <u', v> with an O(dt) error
    ref = _integral_reference()
    vals = {}
    for n in (256, 512, 1024, 2048):
        u, v = _smooth_pair(n)
        vals[n] = bilinear_form(u, v, n_refine=0).value.real
    order = np.log2(abs(vals[512] - ref) / abs(vals[1024] - ref))
    assert 0.9 < order < 1.1
    # Richardson extrapolation removes the first-order term, leaving O(dt^2)
    rich = [2 * vals[2 * n] - vals[n] - ref for n in (256, 512, 1024)]
    assert abs(rich[-1]) < 2e-6
    assert np.log2(abs(rich[0]) / abs(rich[1])) > 1.9
    assert np.log2(abs(rich[1]) / abs(rich[2])) > 1.9


def test_up_bracket_zero():
    assert up_norm_bracket(SampledPath([0.0, 1.0], np.zeros((2, 2))), 2.0) == (0.0, 0.0)


@pytest.mark.parametrize("p", PS)
@pytest.mark.parametrize("seed", range(5))
def test_atom_bracket(p, seed):
    rng = np.random.default_rng([seed, 3])
    atom = StepAtom.random(rng, np.arange(6.0), (2,), p)
    path = atom.to_path()
    lo, hi = up_norm_bracket(path, p, 4, seed)
    assert lo <= hi + 1e-12
    assert lo <= 1 + 1e-9
    assert hi <= 1 + 1e-9
    assert p_variation_norm(path, p) <= 2 + 1e-9
    cor, _ = greedy_upper(path, p, 2 * p)
    assert cor <= 4 / (1 - 2 ** (p / (2 * p) - 1)) + 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(PS))
def test_duality_inequality(seed, p):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 8))
    u = SampledPath(np.arange(n, dtype=float), rng.standard_normal((n, 2)))
    tv = np.unique(rng.uniform(-1, n, 6))
    v = SampledPath(tv, rng.standard_normal((tv.size, 2)), left=rng.standard_normal(2))
    B = abs(bilinear_form(u, v).value)
    lo, hi = up_norm_bracket(u, p, 2, seed)
    assert lo <= hi * (1 + 1e-12)
    assert B <= hi * p_variation_norm(v, conjugate_exponent(p)) * (1 + 1e-12)


# --------------------------------------------------------------------------
# Besov, X^{s,b,q}, dyadic brackets
# --------------------------------------------------------------------------


def test_besov_zero():
    assert besov_seminorm(SampledPath(np.arange(8.0), np.zeros(8)), 0.5, 2, np.inf) == 0.0


def test_besov_single_block():
    n, M = 256, 8
    t = np.arange(n) * (2 * np.pi / n)
    path = SampledPath(t, np.exp(1j * M * t))
    l2 = np.sqrt(2 * np.pi)
    assert besov_seminorm(path, 0.5, 2, np.inf) == pytest.approx(np.sqrt(M) * l2, rel=1e-12)
    assert besov_seminorm(path, 0.5, 2, 1) == pytest.approx(np.sqrt(M) * l2, rel=1e-12)


def test_besov_nonuniform():
    with pytest.raises(ValueError):
        besov_seminorm(SampledPath([0.0, 1.0, 3.0, 4.0], np.ones(4)), 0.5, 2, 2)


def test_xsbq_zero():
    g = FrequencyGrid(8, 8)
    z = SampledPath.from_fields(np.arange(8.0), [Field2D.zeros(g)] * 8)
    assert xsbq_seminorm(z, 0.0, 1.0, 1.0) == 0.0


def test_xsbq_single_band():
    # xi index 2 sits where psi_2 = 1; modulation e^{i 8 t} sits where psi_8 = 1
    g = FrequencyGrid(16, 8)
    phi = Field2D.single_mode(g, 2, 0, 1.0)
    n = 256
    t = np.arange(n) * (2 * np.pi / n)
    path = SampledPath.free_solution(phi, t)
    path = path.replace(values=path.values * np.exp(1j * 8 * t)[:, None, None])
    mass = np.sqrt(2 * np.pi)
    val = xsbq_seminorm(path, 0.5, 1.0, 1.0, taper=0.0)
    assert val == pytest.approx(np.sqrt(2.0) * 8 * mass, rel=1e-10)
    shifted = xsbq_seminorm(path, 1.5, 1.0, 1.0, taper=0.0)
    assert shifted == pytest.approx(2.0 * val, rel=1e-10)


def test_dyadic_bracket_zero():
    g = FrequencyGrid(8, 8)
    z = SampledPath.from_fields(np.arange(4.0), [Field2D.zeros(g)] * 4)
    assert dyadic_space_norm_bracket(z, -0.5, "Y_dot") == (0.0, 0.0)


def test_dyadic_bracket_free_single_band():
    g = FrequencyGrid(16, 8)
    phi = Field2D.single_mode(g, 2, 1, 1.0)
    path = SampledPath.free_solution(phi, np.linspace(0, 1, 8, endpoint=False))
    lo, hi = dyadic_space_norm_bracket(path, 0.0, "Y_dot")
    block = project_frequency_band(path, 2, "P_N")
    assert lo == hi == pytest.approx(p_variation_norm(block, 2.0, twist=True), rel=1e-12)
    assert lo == pytest.approx(np.sqrt(2), rel=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_dyadic_bracket_ordered(seed):
    g = FrequencyGrid(8, 8)
    rng = np.random.default_rng(seed)
    fields = [sample_band_limited_field(g, None, rng) for _ in range(4)]
    path = SampledPath.from_fields(np.arange(4.0), fields)
    for space in ("Z_dot", "X"):
        lo, hi = dyadic_space_norm_bracket(path, -0.5, space, 2, seed)
        assert lo <= hi * (1 + 1e-12)


# --------------------------------------------------------------------------
# interpolation constant
# --------------------------------------------------------------------------


def test_interpolation_value():
    b, N = interpolation_bound(1, 1, 1, 2)
    assert b == pytest.approx(8 + 4 / (0.5 * np.log(2)), abs=1e-12)
    assert abs(b - 19.5416) < 1e-3
    assert N >= 1


def test_interpolation_equal_constants():
    a = (1 - 2 / 3) * np.log(2)
    b, _ = interpolation_bound(2.0, 2.0, 2.0, 3.0)
    assert b == pytest.approx(8.0 / a * (2 * a + 1), rel=1e-14)


@pytest.mark.parametrize("args", [(1, 1, 2, 2), (1, 1, 3, 2), (2, 1, 1, 2), (0, 1, 1, 2)])
def test_interpolation_rejects(args):
    with pytest.raises(ValueError):
        interpolation_bound(*args)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 10), st.floats(1, 100), st.floats(1, 4), st.floats(1.05, 4))
def test_interpolation_dominates_discrete_min(cp, factor, p, qf):
    cq, q = cp * factor, p * qf
    b, N = interpolation_bound(cp, cq, p, q)
    dmin, dN = interpolation_discrete_min(cp, cq, p, q)
    assert b >= dmin
    assert b <= interpolation_bound(cp, cq * 2, p, q)[0]
    if dN < 64:
        obj = lambda k: 4 * cp * k + 4 * cq * 2.0 ** (-k * (1 - p / q))  # noqa: E731
        assert obj(N) == pytest.approx(dmin, rel=1e-12)
