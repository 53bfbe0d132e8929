"""One-layer quantum-number-preserving ansatz, its optimizer, and measurement-rotation merging.

Gate/orbital correspondence: ``G(theta)`` on the qubits of orbitals
``(p, p+1)`` of one spin maps the single-particle orbitals by the planar
rotation ``planar(p, p+1, -theta/2)``. A one-particle map ``R`` sends the
1-PDM to ``R gamma R^T``, so measuring in the basis ``U`` means applying
``R = U^T``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .circuit import Circuit, Gate
from .config import OptimizerConfig
from .fermion import PauliSum, QubitLayout, hartree_fock_state
from .givens import GivensNetwork, decompose, to_matrix
from .statevector import apply_circuit


def ladder_pairs(n_spatial: int, n_occ: int) -> list[tuple[int, int]]:
    """Nearest-neighbour pairs from the frontier outward, alternating up then down.

    ``(n_occ-1, n_occ)`` comes first; then pairs reaching toward orbital 0
    and toward orbital ``N-1`` alternate, the upward one first, until both
    ends are reached.
    """
    if not 0 < n_occ < n_spatial:
        raise ValueError(f"ladder needs 0 < n_occ < N, got n_occ={n_occ}, N={n_spatial}")
    pairs = [(n_occ - 1, n_occ)]
    up, down = n_occ - 1, n_occ
    while up > 0 or down < n_spatial - 1:
        if up > 0:
            pairs.append((up - 1, up))
            up -= 1
        if down < n_spatial - 1:
            pairs.append((down, down + 1))
            down += 1
    return pairs


@dataclass(frozen=True)
class QnpAnsatz:
    """PX layer over ``px_pairs`` followed by a G layer over ``g_pairs``.

    ``g_pairs`` entries are ``(spin, p, q)``; parameters are ordered
    ``[px..., g...]``.
    """

    layout: QubitLayout
    n_alpha: int
    n_beta: int
    px_pairs: tuple[tuple[int, int], ...]
    g_pairs: tuple[tuple[int, int, int], ...]

    @property
    def n_parameters(self) -> int:
        return len(self.px_pairs) + len(self.g_pairs)

    def check_parameters(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if theta.size != self.n_parameters:
            raise ValueError(f"expected {self.n_parameters} parameters, got {theta.size}")
        if not np.all(np.isfinite(theta)):
            raise ValueError("parameters must be finite")
        return theta

    def hf_gates(self) -> list[Gate]:
        idx = hartree_fock_state(self.layout, self.n_alpha, self.n_beta)
        n = self.layout.n_qubits
        return [Gate("X", (q,)) for q in range(n) if (idx >> (n - 1 - q)) & 1]

    def px_gates(self, theta) -> list[Gate]:
        L = self.layout
        return [Gate("PX", (L.qubit(p, 0), L.qubit(p, 1), L.qubit(q, 0), L.qubit(q, 1)), t)
                for (p, q), t in zip(self.px_pairs, theta[: len(self.px_pairs)])]

    def g_gates(self, theta) -> list[Gate]:
        L = self.layout
        return [Gate("G", (L.qubit(p, s), L.qubit(q, s)), t)
                for (s, p, q), t in zip(self.g_pairs, theta[len(self.px_pairs):])]

    def circuit(self, theta) -> Circuit:
        theta = self.check_parameters(theta)
        return Circuit(self.layout.n_qubits, tuple(self.hf_gates() + self.px_gates(theta) + self.g_gates(theta)))

    def g_network(self, theta, spin: int) -> GivensNetwork:
        theta = self.check_parameters(theta)
        rots = [(p, q, -t / 2) for (s, p, q), t in zip(self.g_pairs, theta[len(self.px_pairs):]) if s == spin]
        return GivensNetwork(self.layout.n_spatial, tuple(rots))


def build_ansatz(layout: QubitLayout, n_alpha: int, n_beta: int) -> QnpAnsatz:
    if n_alpha != n_beta:
        raise ValueError("only closed-shell sectors (n_alpha == n_beta) are supported")
    if layout.occupation_convention != "one_is_occupied":
        raise ValueError("build the ansatz under one_is_occupied; use invert_occupation_convention afterwards")
    pairs = tuple(ladder_pairs(layout.n_spatial, n_alpha))
    g_pairs = tuple((s, p, q) for s in (0, 1) for p, q in pairs)
    return QnpAnsatz(layout, n_alpha, n_beta, pairs, g_pairs)


def prepare(ansatz: QnpAnsatz, theta) -> np.ndarray:
    return apply_circuit(ansatz.circuit(theta))


def network_gates(net: GivensNetwork, layout: QubitLayout, spin: int) -> list[Gate]:
    """G gates realizing the one-particle rotation ``to_matrix(net)`` on one spin block."""
    out = []
    for i, j, phi in net.rotations:
        if abs(i - j) != 1:
            raise ValueError("only nearest-neighbour rotations map to single G gates")
        a, b = min(i, j), max(i, j)
        angle = phi if i < j else -phi
        out.append(Gate("G", (layout.qubit(a, spin), layout.qubit(b, spin)), -2 * angle))
    return out


def rotation_circuit(R: np.ndarray, layout: QubitLayout) -> Circuit:
    """Circuit applying the one-particle rotation ``R`` (det +1) to both spin blocks."""
    net = decompose(R)
    return Circuit(layout.n_qubits, tuple(network_gates(net, layout, 0) + network_gates(net, layout, 1)))


def merge_measurement_rotation(ansatz: QnpAnsatz, theta, U: np.ndarray) -> Circuit:
    """Ansatz whose trailing G layer already includes the measurement rotation ``U^T``."""
    theta = ansatz.check_parameters(theta)
    N = ansatz.layout.n_spatial
    U = np.asarray(U, dtype=float)
    if U.shape != (N, N):
        raise ValueError(f"U has shape {U.shape}, expected ({N}, {N})")
    gates = ansatz.hf_gates() + ansatz.px_gates(theta)
    for spin in (0, 1):
        M = to_matrix(ansatz.g_network(theta, spin))
        gates += network_gates(decompose(U.T @ M), ansatz.layout, spin)
    return Circuit(ansatz.layout.n_qubits, tuple(gates))


# ----------------------------------------------------------------------------
# optimization


@dataclass
class OptimizationResult:
    theta: np.ndarray
    energy: float
    iterations: int
    converged: bool
    max_iterations_hit: bool
    gradient_max_norm: float
    best_restart: int
    restart_energies: list[float]
    trace: list[tuple[int, float]] = field(default_factory=list)
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "energy_hartree": self.energy,
            "theta": [float(t) for t in self.theta],
            "iterations": self.iterations,
            "converged": self.converged,
            "max_iterations_hit": self.max_iterations_hit,
            "gradient_max_norm": self.gradient_max_norm,
            "best_restart": self.best_restart,
            "restart_energies_hartree": [float(e) for e in self.restart_energies],
            "message": self.message,
        }


class _Objective:
    def __init__(self, H: PauliSum, ansatz: QnpAnsatz):
        self.ansatz = ansatz
        self.H = H.to_matrix()

    def energy(self, theta) -> float:
        psi = prepare(self.ansatz, theta)
        return float(np.real(np.vdot(psi, self.H @ psi)))

    def gradient(self, theta, step: float) -> np.ndarray:
        g = np.empty(theta.size)
        for k in range(theta.size):
            e = np.zeros(theta.size)
            e[k] = step
            g[k] = (self.energy(theta + e) - self.energy(theta - e)) / (2 * step)
        return g


def initial_points(n_params: int, config: OptimizerConfig, rng_seed: int) -> list[np.ndarray]:
    """Restart 0 is the Hartree-Fock point; restart k draws from its own child stream."""
    children = np.random.SeedSequence(rng_seed).spawn(config.restarts)
    points = [np.zeros(n_params)]
    for child in children[1:]:
        points.append(np.random.default_rng(child).normal(0.0, config.initial_parameter_scale, n_params))
    return points


def optimize(H: PauliSum, ansatz: QnpAnsatz, config: OptimizerConfig, rng_seed: int) -> OptimizationResult:
    """Minimize ``<H>`` over the ansatz with L-BFGS-B and central-difference gradients."""
    obj = _Objective(H, ansatz)
    runs = []
    for x0 in initial_points(ansatz.n_parameters, config, rng_seed):
        trace = [(0, obj.energy(x0))]

        def fun(x):
            return obj.energy(x), obj.gradient(x, config.fd_step)

        def callback(xk):
            trace.append((len(trace), obj.energy(xk)))

        res = minimize(fun, x0, jac=True, method="L-BFGS-B", callback=callback,
                       options={"maxiter": config.max_iterations, "gtol": config.gradient_tolerance,
                                "ftol": 1e-15})
        x = np.asarray(res.x, dtype=float)
        e = obj.energy(x)
        gmax = float(np.max(np.abs(obj.gradient(x, config.fd_step)))) if x.size else 0.0
        runs.append((e, x, int(res.nit), gmax, trace, str(res.message)))
    energies = [r[0] for r in runs]
    best = int(np.argmin(energies))  # first index wins ties
    e, x, nit, gmax, trace, msg = runs[best]
    return OptimizationResult(theta=x, energy=e, iterations=nit,
                              converged=gmax <= config.gradient_tolerance,
                              max_iterations_hit=nit >= config.max_iterations,
                              gradient_max_norm=gmax, best_restart=best, restart_energies=energies,
                              trace=trace, message=msg)


def write_trace_csv(trace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("iteration,energy_hartree\n")
        for it, e in trace:
            fh.write(f"{it},{e!r}\n")
