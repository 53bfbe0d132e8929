import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from espnor.estimators import (
    EnergyEstimate,
    bhattacharyya,
    convergence_curve,
    default_grid,
    diag_rdm_from_counts,
    estimate_with_sem,
    postselect,
    shot_values,
)
from espnor.fermion import QubitLayout
from espnor.statevector import BitstringCounts

LAY = QubitLayout(2)


def _counts(pairs, stream=True):
    vec = np.zeros(16)
    idx = []
    for bits, n in pairs:
        vec[int(bits, 2)] += n
        idx += [int(bits, 2)] * n
    if stream:
        return BitstringCounts.from_stream(np.array(idx, dtype=np.int64), 4)
    return BitstringCounts.from_vector(vec, 4)


def test_postselection_keeps_only_target_sector():
    c = _counts([("1010", 3), ("1001", 1), ("1110", 2), ("0000", 4)])
    ps = postselect(c, LAY, 1, 1)
    assert ps.kept.total_shots == 4
    assert ps.discarded_count == 6
    assert ps.retention_fraction == pytest.approx(0.4)


def test_shot_values_and_estimate_hand_computed():
    w = np.array([-1.0, 0.5])
    core = 0.25
    e = shot_values(LAY, w, core)
    assert e[int("1010", 2)] == pytest.approx(core - 2.0)
    assert e[int("0101", 2)] == pytest.approx(core + 1.0)
    c = _counts([("1010", 3), ("0101", 1)])
    est = estimate_with_sem(c, w, core, LAY)
    vals = np.array([-1.75] * 3 + [1.25])
    assert est.mean == pytest.approx(vals.mean())
    assert est.sem == pytest.approx(vals.std(ddof=1) / 2)
    np.testing.assert_allclose(diag_rdm_from_counts(c, LAY), [1.5, 0.5])


def test_single_sample_has_undefined_sem():
    est = estimate_with_sem(_counts([("1010", 1)]), np.ones(2), 0.0, LAY)
    assert math.isinf(est.sem) and est.insufficient_statistics
    d = est.to_dict()
    assert d["sem_hartree"] is None and d["insufficient_statistics"]


def test_negative_sem_rejected():
    with pytest.raises(ValueError):
        EnergyEstimate(0.0, -1.0, 3)


@given(st.lists(st.floats(0, 1), min_size=2, max_size=8).filter(lambda x: sum(x) > 0.1))
def test_bhattacharyya_bounds(raw):
    p = np.array(raw) / sum(raw)
    q = np.roll(p, 1)
    assert bhattacharyya(p, p) == pytest.approx(1.0)
    assert 0.0 <= bhattacharyya(p, q) <= 1.0 + 1e-12


def test_bhattacharyya_requires_normalized():
    with pytest.raises(ValueError):
        bhattacharyya([0.5, 0.2], [0.5, 0.5])


def test_grid_and_convergence_curve_ends_at_full_estimate():
    grid = default_grid(40_000, min_shots=1000)
    assert grid[0] >= 1000 and grid[-1] == 40_000 and grid == sorted(set(grid))
    rng = np.random.default_rng(0)
    stream = rng.choice([int("1010", 2), int("0110", 2)], size=5000)
    c = BitstringCounts.from_stream(stream, 4)
    curve = convergence_curve(c, np.array([-1.0, 2.0]), 0.0, default_grid(5000, min_shots=100), LAY)
    full = estimate_with_sem(c, np.array([-1.0, 2.0]), 0.0, LAY)
    assert curve[-1][1].mean == pytest.approx(full.mean)
    assert curve[-1][1].sem == pytest.approx(full.sem)
