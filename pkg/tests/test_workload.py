import numpy as np
import pytest

from derivd.kb import Query
from derivd.workload import (
    QueryDistribution,
    WorkloadSpec,
    build_distribution,
    sample_index_stream,
    sample_stream,
    zipf_weights,
)


def queries(n):
    return [Query(target=i, query_id=i) for i in range(n)]


def test_uniform_four_way_split():
    dist = build_distribution(WorkloadSpec(kind="uniform", query_count=4), queries(4))
    assert np.allclose(dist.probs, 0.25)


def test_zipf_alpha_one_harmonic_weights():
    dist = build_distribution(WorkloadSpec(kind="zipf", alpha=1.0, query_count=3), queries(3))
    assert np.allclose(dist.probs, [6 / 11, 3 / 11, 2 / 11])


def test_zipf_alpha_two_two_point():
    dist = build_distribution(WorkloadSpec(kind="zipf", alpha=2.0, query_count=2), queries(2))
    assert np.allclose(dist.probs, [0.8, 0.2])


def test_weights_normalize_and_decrease_with_rank():
    for alpha in (0.5, 1.0, 1.7, 3.0):
        w = zipf_weights(500, alpha)
        assert abs(w.sum() - 1.0) < 1e-9
        assert np.all(np.diff(w) < 0)


def test_rank_one_goes_to_lowest_query_id():
    qs = [Query(target=10 * i, query_id=i) for i in (3, 1, 2)]
    dist = build_distribution(WorkloadSpec(kind="zipf", alpha=1.5, query_count=3), qs)
    assert dist.queries[0].query_id == 1
    assert dist.probs[0] == dist.probs.max()


def test_point_mass_stream_is_constant():
    dist = build_distribution(WorkloadSpec(kind="uniform", query_count=1), queries(1))
    stream = sample_stream(dist, 100, seed=4)
    assert all(q.query_id == 0 for q in stream)


def test_stream_determinism():
    dist = build_distribution(WorkloadSpec(kind="zipf", alpha=1.2, query_count=50), queries(50))
    a = sample_index_stream(dist, 10_000, seed=9)
    b = sample_index_stream(dist, 10_000, seed=9)
    c = sample_index_stream(dist, 10_000, seed=10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_two_point_frequencies_concentrate():
    dist = build_distribution(WorkloadSpec(kind="uniform", query_count=2), queries(2))
    idx = sample_index_stream(dist, 100_000, seed=13)
    f0 = float(np.mean(idx == 0))
    assert abs(f0 - 0.5) < 0.01


def test_empirical_frequencies_within_three_sigma_envelope():
    dist = build_distribution(WorkloadSpec(kind="zipf", alpha=1.2, query_count=200), queries(200))
    length = 100_000
    idx = sample_index_stream(dist, length, seed=21)
    counts = np.bincount(idx, minlength=200)
    emp = counts / length
    bound = 3 * np.sqrt(dist.probs / length)
    assert np.all(np.abs(emp - dist.probs) <= bound)


def test_workload_spec_validation():
    with pytest.raises(ValueError):
        WorkloadSpec(kind="pareto")
    with pytest.raises(ValueError):
        WorkloadSpec(kind="zipf", alpha=0.1)
    with pytest.raises(ValueError):
        WorkloadSpec(kind="uniform", query_count=0)
    with pytest.raises(ValueError):
        build_distribution(WorkloadSpec(kind="uniform", query_count=3), [])
    with pytest.raises(ValueError):
        QueryDistribution(tuple(queries(2)), np.array([0.7, 0.2]))
