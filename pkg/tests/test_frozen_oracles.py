"""Reference values produced by scripts/freeze_oracles.py (explicit Fock-space ladder operators)."""

import pytest

from espnor.fci import exact_electrostatics

FROZEN = {
    "2e2o": {"E0": -0.4772531625679873, "E_elst": -8.81970724215738},
    "4e4o": {"E0": -1.688895698770872, "E_elst": -7.3339574504608205},
}


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_exact_values_match_frozen_references(name, request):
    inst = request.getfixturevalue(f"inst_{name}")
    ex = exact_electrostatics(inst)
    assert ex.solution.E0 == pytest.approx(FROZEN[name]["E0"], abs=1e-11)
    assert ex.ao_route.E_elst == pytest.approx(FROZEN[name]["E_elst"], abs=1e-10)
    assert ex.diag_route.E_elst == pytest.approx(FROZEN[name]["E_elst"], abs=1e-10)
