import numpy as np
import pytest

from liccheck5 import regularity as R
from liccheck5.errors import NonTransversalError, OrderError


def crossing(seed=3, **kw):
    return R.random_crossing_curve(np.random.default_rng(seed), **kw)


def vertex(seed=4, **kw):
    return R.vertex_curve(np.random.default_rng(seed), **kw)


def random_spec(rng):
    m = int(rng.integers(1, 4))
    s_l = int(rng.integers(-1, 3))
    q = int(rng.integers(max(0, s_l), max(0, s_l) + 2))
    draws = rng.integers(0, 5, q)
    li = [int(np.sum(draws == i)) for i in range(5)]
    return R.MonomialSpec(m, tuple([q - s_l] + li))


def test_monomial_spec_fields():
    ms = R.MonomialSpec(2, (1, 3, 0, 1, 0, 0))
    assert ms.s_l == 3
    assert ms.predicted_class == 2
    neg = R.MonomialSpec(1, (2, 1, 0, 0, 0, 0))
    assert neg.s_l == -1
    assert neg.predicted_class == 0
    assert R.RO2.m == 2 and R.RO2.s_l == 0 and R.RO2.predicted_class == 2


def test_monomial_spec_validation():
    with pytest.raises(ValueError):
        R.MonomialSpec(0, (0, 0, 0, 0, 0, 0))
    with pytest.raises(ValueError):
        R.MonomialSpec(1, (0, -1, 0, 0, 0, 0))
    with pytest.raises(ValueError):
        R.MonomialSpec(1, (0, 0, 0, 0, 0))
    with pytest.raises(ValueError):
        R.MonomialSpec(1.5, (0, 0, 0, 0, 0, 0))


def test_ro2_is_c1():
    rep = R.smoothness_probe(R.RO2, crossing())
    assert rep.verdicts == ("continuous", "continuous", "jump", "jump")
    assert rep.smoothness_class == 1
    rep = R.smoothness_probe(R.RO2, vertex())
    assert rep.verdicts == ("continuous", "continuous", "jump", "divergent")
    assert rep.smoothness_class == 1


def test_ro_times_order_zero_monomial():
    ms = R.MonomialSpec(1, (0, 0, 0, 0, 0, 0))
    rep = R.smoothness_probe(ms, crossing())
    assert rep.verdicts == ("continuous", "jump", "jump", "jump")
    assert rep.smoothness_class == 0
    rep = R.smoothness_probe(ms, vertex())
    assert rep.verdicts == ("continuous", "jump", "divergent", "divergent")


def test_ga_component_c1_not_c2():
    rng = np.random.default_rng(11)
    for _ in range(10):
        rep = R.smoothness_probe(("ga", 0, 0), R.random_crossing_curve(rng))
        assert rep.verdicts[:3] == ("continuous", "continuous", "jump")
        assert rep.smoothness_class == 1


def test_vertex_detects_negative_order():
    ms = R.MonomialSpec(2, (1, 0, 0, 0, 0, 0))     # k = 1
    assert R.smoothness_probe(ms, crossing()).smoothness_class == 1
    assert R.smoothness_probe(ms, vertex()).smoothness_class == 0
    reports, overall = R.probe_family(ms, n_curves=3, seed=1)
    assert overall == 0


def test_not_even_continuous():
    ms = R.MonomialSpec(1, (1, 0, 0, 0, 0, 0))     # k = 0
    rep = R.smoothness_probe(ms, vertex())
    assert rep.verdicts == ("jump", "divergent", "divergent", "divergent")
    assert rep.smoothness_class == -1


def test_smooth_through_probed_orders():
    ms = R.MonomialSpec(4, (0, 0, 0, 0, 0, 0))     # k = 4, beyond order 3
    reports, overall = R.probe_family(ms, n_curves=2, seed=2)
    assert overall is None
    assert all(r.smoothness_class is None for r in reports)


def test_randomized_specs_match_prediction():
    rng = np.random.default_rng(77)
    for trial in range(30):
        ms = random_spec(rng)
        _, cls = R.probe_family(ms, n_curves=3, seed=trial)
        if ms.predicted_class <= 3:
            assert cls == ms.predicted_class - 1, ms
        else:
            assert cls is None, ms


def test_probe_guards():
    with pytest.raises(OrderError):
        R.smoothness_probe(R.RO2, crossing(), max_order=4)
    # a curve running along a cone generator never leaves it
    tangent = R.CrossingCurve([1.0, 1, 0, 0, 0], [1.0, 1, 0, 0, 0])
    with pytest.raises(NonTransversalError):
        R.smoothness_probe(R.RO2, tangent)
    # a curve with both legs on the same side does not cross
    inside = R.CrossingCurve([2.0, 0.3, 0, 0, 0], [0.0, 0.1, 0, 0, 0])
    with pytest.raises(NonTransversalError):
        R.smoothness_probe(R.RO2, inside)
    with pytest.raises(ValueError):
        R.smoothness_probe(("nope",), crossing())
    with pytest.raises(ValueError):
        R.CrossingCurve(np.zeros(5), np.ones(5), t0=-1.0)


def test_sample_bat_region():
    x = R.sample_bat(500, 0.7, a=1.0, seed=5)
    assert x.shape == (500, 5)
    r = np.sqrt(np.sum(x[:, 1:] ** 2, axis=1))
    ro = (r ** 2 - x[:, 0] ** 2) / r
    assert np.all(r <= 0.7)
    assert np.all((ro > 0) & (ro < 1.0))


def test_boundedness_probe():
    assert R.boundedness_probe((0, 0, 0, 0, 0, 0), 0.5) == 1.0
    assert R.boundedness_probe((1, 1, 0, 0, 0, 0), 0.5) <= 1.0 + 1e-9
    assert R.boundedness_probe((0, 2, 0, 0, 0, 0), 0.5) <= 0.25 * (1 + 1e-9)
    assert R.boundedness_probe(R.MonomialSpec(1, (0, 1, 1, 0, 0, 0)), 0.3) \
        <= 0.09 * (1 + 1e-9)
    with pytest.raises(ValueError):
        R.boundedness_probe((1, 0, 0, 0, 0, 0), 0.5)


def test_dro_coefficients_bounded():
    sup = R.dro_gradient_sup(n=4000, seed=6)
    assert sup <= 2.0 * (1 + 1e-9)
    assert sup > 1.9


def test_weyl_decay_exponent():
    rng = np.random.default_rng(5)
    for _ in range(3):
        slope = R.weyl_decay_exponent(R.random_crossing_curve(rng))
        assert 1.85 <= slope <= 2.15
