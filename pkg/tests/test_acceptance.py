"""Acceptance criteria 1-9, one test each.

Every test records a PASS/FAIL line (printed in the pytest terminal summary
and when this file is run as a script). Tolerances and budgets are fixed
here; a failing criterion fails its test.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from espnor.ansatz import build_ansatz, merge_measurement_rotation, optimize, prepare, rotation_circuit
from espnor.circuit import Circuit
from espnor.config import NoiseSpec, OptimizerConfig, RunConfig, ZneConfig
from espnor.electrostatics import build_esp_matrix, electrostatics_mo_contraction, one_body_diag_energy
from espnor.estimators import bhattacharyya, estimate_with_sem, postselect
from espnor.fci import SectorBasis, exact_electrostatics, exact_ground_state, full_mo_rdm, sector_hamiltonian
from espnor.fermion import QubitLayout, jw_hamiltonian
from espnor.givens import random_orthogonal
from espnor.mitigation import fold_gates_at_random, mitigated_electrostatics, zne_extrapolate_frequencies
from espnor.model_io import generate_synthetic_instance
from espnor.noise import density_matrix_probabilities, simulate_noisy
from espnor.pipeline import dumps_report, exact_state_electrostatics, run_report, zne_frequencies
from espnor.statevector import apply_circuit, circuit_unitary, equal_up_to_phase, probabilities, sample, total_variation
from espnor.transpile import compile_to_native

RESULTS: dict[int, tuple[bool, str]] = {}
DEFAULT_NOISE = NoiseSpec(3e-4, 1.5e-2)


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (bool(ok), detail)
    print(format_line(n))
    assert ok, detail


def format_line(n: int) -> str:
    ok, detail = RESULTS[n]
    return f"criterion {n}: {'PASS' if ok else 'FAIL'} | {detail}"


def _shapes(k):
    return [(4, 4), (5, 4), (6, 4), (3, 2), (6, 3), (5, 2)][k % 6]


def test_criterion_1_route_equivalence():
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(20):
        inst = generate_synthetic_instance(*_shapes(seed), 100 + seed)
        ex = exact_electrostatics(inst, tol=math.inf)
        mo = electrostatics_mo_contraction(build_esp_matrix(inst).J_mo,
                                           full_mo_rdm(inst, ex.solution.gamma_exact), inst.active)
        vals = [ex.ao_route.E_elst, mo.E_elst, ex.diag_route.E_elst]
        worst = max(worst, max(vals) - min(vals))
    dt = time.perf_counter() - t0
    record(1, worst < 1e-9 and dt < 10,
           f"20 instances, max route spread {worst:.2e} Ha (tol 1e-9), {dt:.1f} s (budget 10 s)")


def test_criterion_2_oracle_consistency():
    t0 = time.perf_counter()
    worst_block, gaps, below = 0.0, [], 0
    for seed in range(5):
        inst = generate_synthetic_instance(4, 4, 200 + seed)
        lay = QubitLayout(4)
        H = jw_hamiltonian(inst.h_act, inst.g_act, inst.E_core, lay)
        basis = SectorBasis(4, 2, 2)
        idx = basis.full_indices
        Hdet = sector_hamiltonian(inst.h_act, inst.g_act, inst.E_core, basis)
        worst_block = max(worst_block, float(np.abs(H.to_matrix()[np.ix_(idx, idx)] - Hdet).max()))
        E0 = exact_ground_state(inst.h_act, inst.g_act, inst.E_core, 2, 2).E0
        res = optimize(H, build_ansatz(lay, 2, 2), OptimizerConfig(restarts=5), seed)
        gap = res.energy - E0
        gaps.append(gap)
        below += gap < -1e-10
    dt = time.perf_counter() - t0
    within = sum(0 <= g + 1e-10 and g < 1e-3 for g in gaps)
    ok = worst_block < 1e-10 and below == 0 and within >= 4 and dt < 120
    record(2, ok, f"sector block diff {worst_block:.1e} (tol 1e-10); VQE-FCI gaps mHa "
                  f"{[round(g * 1e3, 3) for g in gaps]}, {within}/5 within 1 mHa; {dt:.0f} s (budget 120 s)")


def _trailing_givens_per_spin(circuit: Circuit, n_spatial: int, n_prefix: int):
    tail = circuit.gates[n_prefix:]
    alpha = sum(g.kind == "G" and max(g.qubits) < n_spatial for g in tail)
    beta = sum(g.kind == "G" and min(g.qubits) >= n_spatial for g in tail)
    return alpha, beta


def test_criterion_3_merge_correctness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(300)
    lay = QubitLayout(4)
    ans = build_ansatz(lay, 2, 2)
    worst, max_g = 0.0, 0
    prefix = len(ans.hf_gates()) + len(ans.px_gates(np.zeros(ans.n_parameters)))
    for _ in range(20):
        theta = rng.uniform(-np.pi, np.pi, ans.n_parameters)
        U = random_orthogonal(4, rng)
        merged_circ = merge_measurement_rotation(ans, theta, U)
        merged = apply_circuit(merged_circ)
        sequential = apply_circuit(rotation_circuit(U.T, lay), prepare(ans, theta))
        worst = max(worst, float(np.linalg.norm(merged - sequential)))
        max_g = max(max_g, *_trailing_givens_per_spin(merged_circ, 4, prefix))
    dt = time.perf_counter() - t0
    record(3, worst < 1e-9 and max_g <= 6 and dt < 30,
           f"20 pairs, max 2-norm {worst:.1e} (tol 1e-9), max trailing Givens per spin {max_g} (<= 6), {dt:.1f} s")


def test_criterion_4_estimator_soundness(prep_4e4o):
    t0 = time.perf_counter()
    prep = prep_4e4o
    state = apply_circuit(prep.circuit)
    exact = exact_state_electrostatics(prep, apply_circuit(prep.ansatz.circuit(prep.vqe.theta)))["diagonal"].E_elst
    ana = postselect(sample(state, 40_000, 0, analytic=True), prep.layout, 2, 2)
    analytic_err = abs(estimate_with_sem(ana.kept, prep.esp.w, prep.core_term, prep.layout).mean - exact)
    hits, retention = 0, []
    for seed in range(100):
        ps = postselect(sample(state, 40_000, seed), prep.layout, 2, 2)
        retention.append(ps.retention_fraction)
        est = estimate_with_sem(ps.kept, prep.esp.w, prep.core_term, prep.layout)
        hits += abs(est.mean - exact) < 4 * est.sem
    dt = time.perf_counter() - t0
    ok = analytic_err < 1e-12 and hits >= 95 and min(retention) == 1.0 and dt < 120
    record(4, ok, f"analytic error {analytic_err:.1e} (tol 1e-12); 4-sem coverage {hits}/100 (need 95); "
                  f"noiseless retention min {min(retention)}; {dt:.0f} s (budget 120 s)")


def test_criterion_5_noise_realism(prep_4e4o):
    t0 = time.perf_counter()
    native = prep_4e4o.native
    counts = simulate_noisy(native, DEFAULT_NOISE, 40_000, 500)
    retention = postselect(counts, prep_4e4o.layout, 2, 2).retention_fraction
    dm = density_matrix_probabilities(native, DEFAULT_NOISE)
    traj = simulate_noisy(native, DEFAULT_NOISE, 1_000_000, 501)
    tv = total_variation(traj.frequencies(), dm)
    dt = time.perf_counter() - t0
    ok = 0.3 <= retention <= 0.7 and tv < 0.01 and dt < 600
    record(5, ok, f"{native.n_qubits} qubits, {len(native)} native gates; retention {retention:.3f} "
                  f"(range [0.3, 0.7]); TV(trajectory 1e6, density matrix) {tv:.4f} (< 0.01); {dt:.0f} s")


def test_criterion_6_zne_efficacy(prep_4e4o):
    t0 = time.perf_counter()
    prep = prep_4e4o
    args = (prep.layout, 2, 2, prep.esp.w, prep.core_term)
    ideal = probabilities(apply_circuit(prep.circuit))
    exact = mitigated_electrostatics(ideal, np.zeros_like(ideal), *args).mean
    noisy_err, mit_err, bc_noisy, bc_mit = [], [], [], []
    for seed in range(20):
        zcfg = ZneConfig(mode="density_matrix", trajectories_per_lambda=60_000, rng_seed=seed)
        freqs, _ = zne_frequencies(prep, zcfg, DEFAULT_NOISE)
        res = zne_extrapolate_frequencies(freqs, zcfg)
        zero = np.zeros_like(ideal)
        noisy_err.append(abs(mitigated_electrostatics(freqs[1.0], zero, *args).mean - exact))
        mit_err.append(abs(mitigated_electrostatics(res.distribution, zero, *args).mean - exact))
        bc_noisy.append(bhattacharyya(ideal, freqs[1.0]))
        bc_mit.append(bhattacharyya(ideal, res.distribution))
    dt = time.perf_counter() - t0
    med = np.median
    ok = med(mit_err) <= med(noisy_err) and med(bc_mit) > med(bc_noisy) and dt < 900
    record(6, ok, f"20 seeds; median |E - exact| noisy {med(noisy_err) * 1e3:.1f} mHa -> mitigated "
                  f"{med(mit_err) * 1e3:.1f} mHa; median BC {med(bc_noisy):.3f} -> {med(bc_mit):.3f}; {dt:.0f} s")


def test_criterion_7_transpilation_fidelity(prep_2e2o, prep_4e4o):
    t0 = time.perf_counter()
    rng = np.random.default_rng(700)
    circuits = [prep_2e2o.circuit, prep_4e4o.circuit]
    lay = QubitLayout(4)
    ans = build_ansatz(lay, 2, 2)
    for _ in range(4):
        circuits.append(merge_measurement_rotation(ans, rng.normal(size=ans.n_parameters), random_orthogonal(4, rng)))
    worst_compile, worst_fold, worst_count = 0.0, 0.0, 0.0
    for c in circuits:
        native = compile_to_native(c)
        U = circuit_unitary(native)
        worst_compile = max(worst_compile, equal_up_to_phase(U, circuit_unitary(c)))
        for k, lam in enumerate((1.0, 2.0, 3.0)):
            folded = fold_gates_at_random(native, lam, 70 + k)
            worst_fold = max(worst_fold, equal_up_to_phase(circuit_unitary(folded), U))
            worst_count = max(worst_count, abs(len(folded) - lam * len(native)))
    dt = time.perf_counter() - t0
    ok = worst_compile < 1e-9 and worst_fold < 1e-9 and worst_count <= 2 and dt < 60
    record(7, ok, f"{len(circuits)} circuits; compile phase distance {worst_compile:.1e}, folding "
                  f"{worst_fold:.1e} (tol 1e-9); max count miss {worst_count:.0f} (<= 2); {dt:.1f} s")


def test_criterion_8_one_body_proxy(prep_4e4o):
    t0 = time.perf_counter()
    prep = prep_4e4o
    inst = prep.instance
    gamma = exact_state_electrostatics(prep, apply_circuit(prep.ansatz.circuit(prep.vqe.theta)))["gamma"]
    U = prep.esp.U
    gbar = np.diag(U.T @ gamma @ U)
    exact = float(np.dot(np.diag(U.T @ inst.h_act @ U), gbar))
    state = apply_circuit(prep.circuit)
    z = []
    for seed in range(10):
        kept = postselect(sample(state, 40_000, 800 + seed), prep.layout, 2, 2).kept
        est = one_body_diag_energy(inst.h_act, U, None, samples=kept, layout=prep.layout)
        z.append(abs(est.mean - exact) / est.sem)
    dt = time.perf_counter() - t0
    record(8, max(z) < 3 and dt < 60,
           f"10 seeds; max |sampled - exact| / sem = {max(z):.2f} (< 3); {dt:.1f} s")


def test_criterion_9_determinism(inst_2e2o):
    cfg = RunConfig(shots=8000, rng_seed=42, noise=DEFAULT_NOISE,
                    zne=ZneConfig(trajectories_per_lambda=4000, rng_seed=42))
    a, sa = run_report(inst_2e2o, cfg)
    b, sb = run_report(inst_2e2o, cfg)
    same = dumps_report(a).encode() == dumps_report(b).encode() and sa == sb
    record(9, same, f"noisy run with trajectory ZNE, reports {len(dumps_report(a))} bytes, "
                    f"{'byte-identical' if same else 'DIFFERENT'}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
