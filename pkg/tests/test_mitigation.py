import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from espnor.circuit import Circuit, Gate
from espnor.config import ZERO_IS_OCCUPIED, ZneConfig
from espnor.estimators import postselect, estimate_with_sem
from espnor.fermion import QubitLayout
from espnor.mitigation import fit_decay, invert_occupation_convention, mitigated_electrostatics, zne_extrapolate_frequencies
from espnor.statevector import apply_circuit, probabilities, sample


@given(st.floats(0.01, 0.5), st.floats(-0.3, 0.3), st.floats(0.1, 2.0))
def test_fit_recovers_exact_decay(a, b, c):
    lams = [1.0, 2.0, 3.0, 4.0]
    ys = [a + b * math.exp(-c * x) for x in lams]
    fit = fit_decay(lams, ys, 1e5, a)
    assert fit.ok
    assert fit.value_at_zero == pytest.approx(a + b, abs=1e-6)


def test_constant_data_extrapolates_to_constant():
    fit = fit_decay([1, 2, 3], [0.25, 0.25, 0.25], 1e5, 0.25)
    assert fit.ok and fit.value_at_zero == pytest.approx(0.25, abs=1e-9)


def test_unphysical_extrapolation_falls_back():
    fit = fit_decay([1, 2, 3], [0.00582, 0.00387, 0.0042], 1e5, 1 / 256)
    assert not fit.ok
    assert fit.value_at_zero == pytest.approx(0.00582)
    assert math.isinf(fit.sigma)


def test_extrapolated_distribution_is_normalized():
    rng = np.random.default_rng(0)
    ideal = rng.dirichlet(np.ones(16))
    mixed = np.full(16, 1 / 16)
    freqs = {lam: (1 - 0.2 * lam) * ideal + 0.2 * lam * mixed for lam in (1.0, 2.0, 3.0)}
    res = zne_extrapolate_frequencies(freqs, ZneConfig(mode="density_matrix", analytic=True))
    assert res.distribution.sum() == pytest.approx(1.0)
    assert np.all(res.distribution >= 0)
    assert np.abs(res.distribution - ideal).max() < np.abs(freqs[1.0] - ideal).max()


def test_propagation_matches_sampled_sem():
    lay = QubitLayout(2)
    w = np.array([-0.7, 0.4])
    psi = apply_circuit(Circuit(4, (Gate("X", (0,)), Gate("X", (2,)), Gate("G", (0, 1), 1.1),
                                    Gate("G", (2, 3), 0.6))))
    p = probabilities(psi)
    T = 50_000
    counts = sample(psi, T, 2)
    f = counts.frequencies()
    prop = mitigated_electrostatics(f, np.sqrt(f / T), lay, 1, 1, w, 0.1)
    direct = estimate_with_sem(postselect(counts, lay, 1, 1).kept, w, 0.1, lay)
    assert prop.mean == pytest.approx(direct.mean, abs=1e-12)
    assert prop.sem == pytest.approx(direct.sem, rel=1e-3)
    assert mitigated_electrostatics(p, np.zeros(16), lay, 1, 1, w, 0.1).sem == 0


def test_infinite_sigma_on_sector_state_gives_infinite_sem():
    lay = QubitLayout(2)
    f = np.zeros(16)
    f[int("1010", 2)] = f[int("0101", 2)] = 0.5
    s = np.zeros(16)
    s[int("1010", 2)] = np.inf
    assert math.isinf(mitigated_electrostatics(f, s, lay, 1, 1, np.array([1.0, 2.0]), 0.0).sem)


def test_convention_inversion_complements_state():
    c = Circuit(4, (Gate("X", (0,)), Gate("X", (2,)), Gate("G", (0, 1), 0.8), Gate("PX", (0, 2, 1, 3), 0.3)))
    inv, theta = invert_occupation_convention(c, np.array([0.8, 0.3]))
    np.testing.assert_allclose(theta, [-0.8, -0.3])
    p, q = probabilities(apply_circuit(c)), probabilities(apply_circuit(inv))
    np.testing.assert_allclose(q, p[::-1], atol=1e-14)
    lay0 = QubitLayout(2, ZERO_IS_OCCUPIED)
    kept = postselect(sample(apply_circuit(inv), 100, 0), lay0, 1, 1)
    assert kept.retention_fraction == 1.0


def test_convention_inversion_rejects_native_gates():
    with pytest.raises(ValueError):
        invert_occupation_convention(Circuit(1, (Gate("RX", (0,), 0.1),)))
