import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats as sps

from brwsim.lattice import LatticeWindow, OutsideWindowError
from brwsim.medium import (
    Constant,
    MediumSpec,
    SourceConfiguration,
    Weibull,
    potential,
    sample_medium,
    weibull_inverse_cdf,
)
from brwsim.rng import counter_uniforms

from conftest import make_medium


def test_constant_every_point():
    w = LatticeWindow(1, 20)
    m = make_medium(w, SourceConfiguration.every_point(), 2.0, 1.0)
    assert all(v == (2.0, 1.0) for v in m.table.values())
    assert len(m.table) == 20


@pytest.mark.parametrize("scale, lo, hi", [(2.26, 1.99, 2.02), (1.13, 0.99, 1.01)])
def test_weibull_empirical_mean(scale, lo, hi):
    law = Weibull(2.0, scale)
    x = law.quantile(counter_uniforms(99, np.arange(1_000_000)))
    assert lo <= x.mean() <= hi
    assert law.mean == pytest.approx(scale * math.gamma(1.5))


def test_weibull_ks():
    x = Weibull(2.0, 2.26).quantile(counter_uniforms(5, np.arange(20_000)))
    res = sps.kstest(x, sps.weibull_min(2.0, scale=2.26).cdf)
    assert res.pvalue > 0.01


def test_inverse_cdf_examples():
    assert weibull_inverse_cdf(1e-300, 2.0, 2.26) == pytest.approx(0.0, abs=1e-140)
    assert weibull_inverse_cdf(1 - math.exp(-1), 2.0, 2.26) == pytest.approx(2.26)
    assert weibull_inverse_cdf(0.5, 2.0, 1.13) == pytest.approx(1.13 * math.sqrt(math.log(2)))
    assert weibull_inverse_cdf(0.5, 2.0, 1.13) == pytest.approx(0.9408, abs=1e-4)


@pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5])
def test_inverse_cdf_domain(u):
    with pytest.raises(ValueError):
        weibull_inverse_cdf(u, 2.0, 1.0)


@given(st.floats(1e-12, 1 - 1e-12), st.floats(0.2, 5), st.floats(0.1, 10))
def test_inverse_cdf_inverts_cdf(u, k, lam):
    x = weibull_inverse_cdf(u, k, lam)
    assert x >= 0
    assert Weibull(k, lam).cdf(x) == pytest.approx(u, rel=1e-9, abs=1e-12)


def test_potential_values():
    w = LatticeWindow(1, 11)
    m = make_medium(w, SourceConfiguration.single_point((0,)), 2.0, 1.0)
    assert potential(m, (0,)) == 1.0
    assert potential(m, (3,)) == 0.0
    crit = make_medium(w, SourceConfiguration.every_point(), 1.0, 1.0)
    assert np.all(crit.potential_array() == 0.0)


def test_resample_reproduces_table():
    w = LatticeWindow(3, 9)
    spec = MediumSpec(SourceConfiguration.point_set([(1, 0, 0), (0, 1, 0), (0, 0, 1)]), Weibull(2, 2.26), Weibull(2, 1.13))
    a = sample_medium(spec, 77, w)
    b = sample_medium(spec, 77, w)
    c = sample_medium(spec, 78, w)
    assert a.table == b.table
    assert a.table != c.table
    assert all(xp >= 0 and xm >= 0 for xp, xm in a.table.values())


def test_lazy_equals_dense():
    w = LatticeWindow(2, 15)
    spec = MediumSpec(SourceConfiguration.every_point(), Weibull(2, 2.26), Weibull(2, 1.13))
    lazy = sample_medium(spec, 3, w)
    vals = [lazy.get(p) for p in [(0, 0), (7, -7), (-3, 2)]]
    dense = sample_medium(spec, 3, w)
    xp, xm = dense.rate_arrays()
    for p, v in zip([(0, 0), (7, -7), (-3, 2)], vals):
        i = w.index(p)
        assert (xp[i], xm[i]) == v


def test_iid_sources_differ():
    w = LatticeWindow(1, 11)
    spec = MediumSpec(SourceConfiguration.point_set([(-1,), (1,)]), Weibull(2, 2.26), Weibull(2, 1.13))
    m = sample_medium(spec, 11, w)
    assert m.get((-1,)) != m.get((1,))


def test_source_outside_window():
    w = LatticeWindow(1, 3)
    with pytest.raises(OutsideWindowError):
        make_medium(w, SourceConfiguration.single_point((5,)))


@pytest.mark.parametrize("bad", [lambda: Constant(-1.0), lambda: Weibull(0, 1), lambda: Weibull(1, -2)])
def test_law_validation(bad):
    with pytest.raises(ValueError):
        bad()


def test_to_csv(tmp_path):
    w = LatticeWindow(1, 5)
    m = make_medium(w, SourceConfiguration.single_point((0,)))
    m.to_csv(tmp_path / "m.csv")
    lines = (tmp_path / "m.csv").read_text().splitlines()
    assert lines == ["point_index,x0,xi_plus,xi_minus", "2,0,2,1"]
