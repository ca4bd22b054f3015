import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incascade import (
    CampaignParams,
    DegreeDistribution,
    IncentivePolicy,
    ParametricThresholds,
    TableThresholds,
    edge_type2_probability,
    excess_distribution,
    make_policy,
)
from incascade.degree import (
    from_degree_sequence,
    read_cost_csv,
    read_degree_csv,
    read_threshold_csv,
    write_degree_csv,
    write_threshold_csv,
)
from incascade.errors import DegenerateDistributionError, InputParseError


@st.composite
def pmfs(draw, max_support=8, k_max=40, min_degree=0):
    ks = draw(st.lists(st.integers(min_degree, k_max), min_size=1, max_size=max_support, unique=True))
    w = draw(st.lists(st.floats(0.01, 1.0), min_size=len(ks), max_size=len(ks)))
    total = math.fsum(w)
    return DegreeDistribution({k: x / total for k, x in zip(ks, w)}, normalize=True)


def test_regular_pmf_basics():
    d = DegreeDistribution({3: 1.0})
    assert d.mean == 3.0
    assert d.k_max == 3
    assert d.p(3) == 1.0 and d.p(4) == 0.0


def test_excess_of_regular_is_point_mass():
    assert excess_distribution(DegreeDistribution({4: 1.0})) == {3: 1.0}


def test_excess_mixed_example():
    d = DegreeDistribution({1: 0.5, 3: 0.5})
    assert excess_distribution(d) == pytest.approx({0: 0.25, 2: 0.75}, abs=1e-15)


def test_zero_mass_degrees_dropped():
    d = DegreeDistribution({0: 0.0, 2: 1.0})
    assert d.degrees.tolist() == [2]


def test_bad_sum_rejected_unless_normalized():
    with pytest.raises(ValueError, match="sum"):
        DegreeDistribution({1: 0.5, 2: 0.4})
    d = DegreeDistribution({1: 0.5, 2: 0.3}, normalize=True)
    assert math.isclose(d.probs.sum(), 1.0)


def test_negative_probability_rejected():
    with pytest.raises(ValueError):
        DegreeDistribution({1: 1.2, 2: -0.2})


def test_all_mass_at_zero_has_no_excess():
    with pytest.raises(DegenerateDistributionError):
        excess_distribution(DegreeDistribution({0: 1.0}))


def test_empty_degree_sequence():
    with pytest.raises(DegenerateDistributionError, match="empty graph"):
        from_degree_sequence([])


def test_arrays_are_read_only():
    d = DegreeDistribution({2: 0.5, 5: 0.5})
    with pytest.raises(ValueError):
        d.probs[0] = 0.7


@given(pmfs(min_degree=1))
def test_excess_sums_to_one(d):
    assert math.isclose(math.fsum(excess_distribution(d).values()), 1.0, abs_tol=1e-12)


@given(pmfs(min_degree=1), st.floats(0, 1))
def test_uniform_policy_q_equals_phi(d, c):
    pol = IncentivePolicy.constant(c, d)
    assert edge_type2_probability(d, pol) == pytest.approx(c, abs=1e-12)


@given(pmfs(min_degree=1), st.floats(0, 1), st.sampled_from(["uniform", "high_degree", "low_degree"]))
def test_make_policy_hits_target(d, q, scheme):
    pol = make_policy(scheme, q, d)
    assert edge_type2_probability(d, pol) == pytest.approx(q, abs=1e-12)
    assert all(0.0 <= v <= 1.0 for v in pol.phi.values())


@settings(max_examples=60)
@given(pmfs(min_degree=1, max_support=6), st.floats(0.05, 0.95))
def test_high_degree_scheme_incentivizes_fewest_nodes(d, q):
    # filling from the top buys the most edge weight per incentivized node
    mass = {s: float(np.dot(d.probs, make_policy(s, q, d).values_for(d.degrees))) for s in ("uniform", "high_degree", "low_degree")}
    assert mass["high_degree"] <= mass["uniform"] + 1e-12
    assert mass["uniform"] <= mass["low_degree"] + 1e-12


def test_make_policy_rejects_unknown_scheme():
    with pytest.raises(ValueError, match="scheme"):
        make_policy("random", 0.3, DegreeDistribution({2: 1.0}))


def test_policy_values_clipped_range():
    with pytest.raises(ValueError):
        IncentivePolicy({3: 1.5})
    assert IncentivePolicy({3: 0.5})(4) == 0.0


@pytest.mark.parametrize("k,beta,expected", [(10, 0.3, 3), (4, 0.5, 2), (3, 0.5, 2), (1, 0.5, 1), (7, 1.0, 7)])
def test_parametric_threshold(k, beta, expected):
    assert ParametricThresholds(0.2, beta).threshold(k) == expected


def test_parametric_support_mass():
    ms, ps = ParametricThresholds(0.3, 0.5).support(6)
    assert ms.tolist() == [0, 3]
    assert ps.sum() == pytest.approx(1.0)


def test_table_thresholds_validation():
    with pytest.raises(ValueError):
        TableThresholds({3: {0: 0.5, 2: 0.4}})
    t = TableThresholds({3: {0: 0.25, 2: 0.75}})
    assert t.zealous(3) == 0.25
    assert not t.covers(4)


def test_campaign_params_validation_and_costs():
    with pytest.raises(ValueError):
        CampaignParams(0.0, 0.5)
    pa = CampaignParams(0.1, 0.9)
    assert pa.cost(5) == 5.0 and pa.cost(0) == 0.0
    table = CampaignParams(0.1, 0.9, costs={1: 2.0, 3: 0.5})
    assert table.cost_array([1, 3]).tolist() == [2.0, 0.5]
    with pytest.raises(KeyError):
        table.cost(2)


def test_degree_csv_round_trip(tmp_path):
    d = DegreeDistribution({1: 0.1, 4: 0.3, 9: 0.6})
    path = tmp_path / "d.csv"
    write_degree_csv(d, path)
    assert read_degree_csv(path) == d


def test_degree_csv_reports_line(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("degree,probability\n1,0.5\nx,0.5\n")
    with pytest.raises(InputParseError, match=":3"):
        read_degree_csv(path)


def test_degree_csv_missing_file(tmp_path):
    with pytest.raises(InputParseError):
        read_degree_csv(tmp_path / "nope.csv")


def test_threshold_csv_round_trip(tmp_path):
    t = TableThresholds.from_parametric(ParametricThresholds(0.3, 0.5), [2, 5])
    path = tmp_path / "t.csv"
    write_threshold_csv(t, path)
    back = read_threshold_csv(path)
    for k in (2, 5):
        assert [a.tolist() for a in back.support(k)] == [a.tolist() for a in t.support(k)]


def test_cost_csv(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("degree,cost\n1,1.5\n2,3\n")
    assert read_cost_csv(path) == {1: 1.5, 2: 3.0}
