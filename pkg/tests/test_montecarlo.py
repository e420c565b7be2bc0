import math

import numpy as np
import pytest
from scipy.special import ndtr

from permlab import exact, montecarlo
from permlab.models import ModelSpec
from permlab.stats import parse_statistic


def test_estimate_matches_exact_mean():
    kind = parse_statistic("desc:1")
    rep = montecarlo.estimate(kind, ModelSpec.inverse_unfair(), 100, 4000, seed=1)
    want = exact.mean_m_descents(100, 1)
    assert abs(rep.mean - want) < 4 * rep.se_mean
    assert rep.variance == pytest.approx(exact.var_descents(100), rel=0.2)


def test_estimate_uniform_descents():
    kind = parse_statistic("desc:1")
    rep = montecarlo.estimate(kind, ModelSpec.uniform(), 50, 4000, seed=2)
    # uniform mean is (n-1)/2, variance (n+1)/12
    assert abs(rep.mean - 24.5) < 4 * rep.se_mean
    assert rep.variance == pytest.approx(51 / 12, rel=0.2)


def test_estimate_is_deterministic():
    kind = parse_statistic("inv")
    a = montecarlo.estimate(kind, ModelSpec.inverse_unfair(), 30, 500, seed=3)
    b = montecarlo.estimate(kind, ModelSpec.inverse_unfair(), 30, 500, seed=3)
    assert a == b  # wall_time excluded from comparison
    c = montecarlo.estimate(
        kind, ModelSpec.inverse_unfair(), 30, 500, seed=3, workers=4
    )
    assert a == c


def test_unfair_statistics_use_finishing_order():
    # descents of the finishing order differ from descents of the rank
    # sequence; the unfair model must deliver the former
    kind = parse_statistic("locmax")
    rep_f = montecarlo.estimate(kind, ModelSpec.unfair(), 25, 3000, seed=11)
    rep_r = montecarlo.estimate(kind, ModelSpec.inverse_unfair(), 25, 3000, seed=11)
    law_f = exact.statistic_law(5, "unfair", kind)  # small-n sanity of the route
    assert law_f.total() == pytest.approx(1.0)
    # inversions agree between the two (pathwise equal), local maxima do not
    assert rep_f.mean != rep_r.mean


def test_inv_pathwise_equal_between_models():
    kind = parse_statistic("inv")
    a = montecarlo.estimate(kind, ModelSpec.unfair(), 40, 800, seed=5)
    b = montecarlo.estimate(kind, ModelSpec.inverse_unfair(), 40, 800, seed=5)
    assert a.mean == b.mean  # same streams, inversion-invariant statistic
    assert a.variance == b.variance


def test_budget_guard():
    kind = parse_statistic("inv")
    with pytest.raises(montecarlo.BudgetExceeded):
        montecarlo.estimate(
            kind, ModelSpec.inverse_unfair(), 10 ** 6, 10 ** 6, seed=1
        )
    with pytest.raises(ValueError):
        montecarlo.estimate(kind, ModelSpec.inverse_unfair(), 0, 10, seed=1)
    with pytest.raises(montecarlo.BudgetExceeded):
        montecarlo.standardized_sample(
            kind, ModelSpec.inverse_unfair(), 100, 100, seed=1, max_budget=50
        )
    with pytest.raises(montecarlo.BudgetExceeded):
        montecarlo.moment_ratio_mc(kind, 100, 100, seed=1, max_budget=150)


def test_centering_modes():
    kind = parse_statistic("inv")
    n = 50
    exact_c, scale = montecarlo._center_and_scale(kind, n, montecarlo.Centering.EXACT_MEAN)
    assert exact_c == pytest.approx(exact.mean_inversions_exact(n))
    assert scale == pytest.approx(
        math.sqrt(exact.inversion_constants().var_coeff * n ** 3)
    )
    asym_c, scale2 = montecarlo._center_and_scale(kind, n, montecarlo.Centering.ASYMPTOTIC)
    assert asym_c == pytest.approx(exact.inversion_constants().mean_coeff * n ** 2)
    assert scale2 == scale
    kd = parse_statistic("desc:1")
    c1, s1 = montecarlo._center_and_scale(kd, n, montecarlo.Centering.CLOSED_FORM)
    assert c1 == pytest.approx(exact.mean_m_descents(n, 1))
    assert s1 == pytest.approx(math.sqrt(exact.var_descents(n)))
    c2, _ = montecarlo._center_and_scale(kd, n, montecarlo.Centering.ASYMPTOTIC)
    assert c2 == pytest.approx(exact.asymptotic_mean_descents(n))
    k3 = parse_statistic("desc:3")
    _, s3 = montecarlo._center_and_scale(k3, n, montecarlo.Centering.EXACT_MEAN)
    assert s3 == pytest.approx(math.sqrt(exact.asymptotic_var_m_descents(n, 3)))
    with pytest.raises(montecarlo.UnknownClosedForm):
        montecarlo._center_and_scale(k3, n, montecarlo.Centering.ASYMPTOTIC)
    with pytest.raises(montecarlo.UnknownClosedForm):
        montecarlo._center_and_scale(parse_statistic("las"), n, montecarlo.Centering.EXACT_MEAN)


def test_standardized_sample_basic():
    kind = parse_statistic("inv")
    s = montecarlo.standardized_sample(
        kind, ModelSpec.inverse_unfair(), 150, 3000, seed=17, workers=2
    )
    assert s.values.shape == (3000,)
    assert not s.values.flags.writeable
    assert abs(s.sample_mean) < 0.1
    assert s.sample_variance == pytest.approx(1.0, abs=0.15)
    assert s.raw_mean() == pytest.approx(
        exact.mean_inversions_exact(150), rel=0.01
    )
    # string centering spelling accepted
    s2 = montecarlo.standardized_sample(
        kind, ModelSpec.inverse_unfair(), 150, 3000, seed=17, centering="exact"
    )
    assert np.array_equal(s.values, s2.values)


def test_standardized_sample_desc():
    kind = parse_statistic("desc:1")
    s = montecarlo.standardized_sample(
        kind, ModelSpec.inverse_unfair(), 400, 3000, seed=19
    )
    assert abs(s.sample_mean) < 0.1
    assert s.sample_variance == pytest.approx(1.0, abs=0.15)
    assert montecarlo.ks_to_normal(s.values) < 0.05


def test_ks_to_normal_exact_grid():
    # plug in exact normal quantiles: KS must be at most 1/(2N) + eps
    n = 1000
    q = np.asarray(
        [float(_ndtri((k - 0.5) / n)) for k in range(1, n + 1)]
    )
    assert montecarlo.ks_to_normal(q) <= 0.5 / n + 1e-9
    with pytest.raises(ValueError):
        montecarlo.ks_to_normal(np.array([]))


def _ndtri(p):
    from scipy.special import ndtri

    return ndtri(p)


def test_ks_detects_shift():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(20000)
    assert montecarlo.ks_to_normal(x) < 0.02
    # shifting by 0.5 puts KS near |Phi(0.25) - Phi(-0.25)| ~ 0.197
    assert montecarlo.ks_to_normal(x + 0.5) > 0.15


def test_w1_matches_shift():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(20000)
    base = montecarlo.wasserstein1_to_normal(x)
    assert base < 0.02
    shifted = montecarlo.wasserstein1_to_normal(x + 0.3)
    # W1 of a pure location shift is the shift size
    assert shifted == pytest.approx(0.3, abs=0.03)
    with pytest.raises(ValueError):
        montecarlo.wasserstein1_to_normal(np.array([]))


def test_w1_noise_floor():
    # even perfect normal samples keep W1 near 1.36/sqrt(N)
    rng = np.random.default_rng(2)
    vals = [
        montecarlo.wasserstein1_to_normal(rng.standard_normal(4000))
        for _ in range(5)
    ]
    floor = 1.363 / math.sqrt(4000)
    assert np.mean(vals) == pytest.approx(floor, rel=0.4)


def test_moment_ratio_mc():
    kind = parse_statistic("desc:1")
    rep = montecarlo.moment_ratio_mc(kind, 200, 4000, seed=23, workers=2)
    want = exact.moment_ratio_descents(200)
    assert abs(rep.ratio - want) < 4 * rep.se
    assert rep.uniform_moment == pytest.approx((200 - 1) / 2, rel=0.01)
    rep2 = montecarlo.moment_ratio_mc(kind, 200, 4000, seed=23, workers=5)
    assert rep.ratio == rep2.ratio  # worker invariance
    with pytest.raises(ValueError):
        montecarlo.moment_ratio_mc(kind, 200, 100, seed=1, k=0)


def test_moment_ratio_second_moment():
    kind = parse_statistic("inv")
    rep = montecarlo.moment_ratio_mc(kind, 30, 3000, seed=29, k=2)
    # E[Inv^2] under both models; ratio below 1 (rank law has fewer inversions)
    assert 0.3 < rep.ratio < 1.0
    assert rep.se < 0.05


def test_phi_model_through_standardized_sample():
    from permlab.models import PhiSpec

    kind = parse_statistic("inv")
    spec = ModelSpec.phi_draw(PhiSpec.identity())
    s = montecarlo.standardized_sample(kind, spec, 80, 1500, seed=31)
    t = montecarlo.standardized_sample(
        kind, ModelSpec.inverse_unfair(), 80, 1500, seed=31
    )
    assert np.array_equal(s.values, t.values)
