"""Compilation of G / PX / X gates into the trapped-ion set {RX, RZ, RXX}.

* ``G(theta)`` is ``exp(i theta/4 (XY - YX))``: two commuting XY-type
  rotations, each an ``RXX`` conjugated by ``RZ(+-pi/2)`` on one qubit.
* ``PX(theta)`` is conjugated by CNOTs from its first qubit onto the other
  three, which maps the ``|1100>, |0011>`` pair onto a single-qubit rotation
  of the first qubit controlled on ``(0, 1, 1)``. That multi-controlled
  ``RY`` is a uniformly controlled rotation (eight ``Y Z..Z`` factors walked
  in Gray-code order, eight CNOTs). 14 two-qubit gates in total.
* CNOT uses one ``RXX(pi/4)``.

Runs of single-qubit gates are then fused into at most three Euler
rotations ``RZ RX RZ``. Everything is exact up to global phase.
"""

from __future__ import annotations

import numpy as np

from .circuit import NATIVE, Circuit, Gate

HALF_PI = np.pi / 2
ANGLE_TOL = 1e-12


def _ry(q: int, theta: float) -> list[Gate]:
    return [Gate("RZ", (q,), -HALF_PI), Gate("RX", (q,), theta), Gate("RZ", (q,), HALF_PI)]


def cnot(control: int, target: int) -> list[Gate]:
    return [*_ry(control, -HALF_PI), Gate("RXX", (control, target), np.pi / 4),
            *_ry(control, HALF_PI), Gate("RX", (target,), HALF_PI), Gate("RZ", (control,), HALF_PI)]


def _givens(theta: float, a: int, b: int) -> list[Gate]:
    return [
        Gate("RZ", (b,), -HALF_PI), Gate("RXX", (a, b), -theta / 4), Gate("RZ", (b,), HALF_PI),
        Gate("RZ", (a,), -HALF_PI), Gate("RXX", (a, b), theta / 4), Gate("RZ", (a,), HALF_PI),
    ]


_GRAY3 = (0b000, 0b001, 0b011, 0b010, 0b110, 0b111, 0b101, 0b100)


def _pair_exchange(theta: float, qubits: tuple[int, ...]) -> list[Gate]:
    t, c1, c2, c3 = qubits
    controls = (c1, c2, c3)
    frame = [g for c in controls for g in cnot(t, c)]
    # projector onto controls (0, 1, 1): sign of Z_c in (I + s Z)/2
    signs = (1, -1, -1)
    body: list[Gate] = []
    prev = 0
    for step, subset in enumerate(_GRAY3):
        if step:
            flipped = (prev ^ subset).bit_length() - 1
            body += cnot(controls[flipped], t)
        parity = np.prod([signs[k] for k in range(3) if subset >> k & 1]) if subset else 1
        alpha = -(theta / 16) * parity
        body += _ry(t, 2 * alpha)
        prev = subset
    body += cnot(controls[(prev ^ 0).bit_length() - 1], t)
    return frame + body + frame


def _expand(g: Gate) -> list[Gate]:
    if g.kind in NATIVE:
        return [g]
    if g.kind == "X":
        return [Gate("RX", g.qubits, np.pi)]
    if g.kind == "G":
        return _givens(g.theta, *g.qubits)
    if g.kind == "PX":
        return _pair_exchange(g.theta, g.qubits)
    raise ValueError(f"cannot compile gate kind {g.kind!r}")


def _zxz_angles(u: np.ndarray) -> tuple[float, float, float]:
    """Angles with ``u ~ RZ(phi) RX(theta) RZ(lam)`` up to phase."""
    v = u / np.sqrt(np.linalg.det(u))
    theta = 2 * np.arctan2(abs(v[1, 0]), abs(v[0, 0]))
    plus = 2 * np.angle(v[1, 1]) if abs(v[1, 1]) > 1e-12 else 0.0
    minus = 2 * (np.angle(v[1, 0]) + HALF_PI) if abs(v[1, 0]) > 1e-12 else 0.0
    return (plus + minus) / 2, theta, (plus - minus) / 2


def _negligible(angle: float) -> bool:
    # multiples of 2 pi are -I or I on one qubit: a global phase
    r = np.mod(angle, 2 * np.pi)
    return min(r, 2 * np.pi - r) < ANGLE_TOL


def _wrap(angle: float) -> float:
    return float(np.mod(angle + np.pi, 2 * np.pi) - np.pi)


def _euler_gates(q: int, u: np.ndarray) -> list[Gate]:
    phi, theta, lam = _zxz_angles(u)
    if _negligible(theta):
        return [] if _negligible(phi + lam) else [Gate("RZ", (q,), _wrap(phi + lam))]
    out = []
    for kind, a in (("RZ", lam), ("RX", theta), ("RZ", phi)):
        if not _negligible(a):
            out.append(Gate(kind, (q,), _wrap(a)))
    return out


def fuse_single_qubit_runs(circuit: Circuit) -> Circuit:
    """Merge consecutive single-qubit gates on each qubit into <= 3 native rotations.

    A run is only rewritten when that makes it shorter. ``RXX`` gates whose
    angle is a multiple of pi (a global phase times identity) are dropped.
    """
    n = circuit.n_qubits
    pending: dict[int, list[Gate]] = {}
    out: list[Gate] = []

    def flush(q: int) -> None:
        run = pending.pop(q, None)
        if not run:
            return
        u = np.eye(2, dtype=complex)
        for g in run:
            u = g.matrix() @ u
        fused = _euler_gates(q, u)
        out.extend(fused if len(fused) < len(run) else run)

    for g in circuit.gates:
        if len(g.qubits) == 1:
            pending.setdefault(g.qubits[0], []).append(g)
        else:
            for q in g.qubits:
                flush(q)
            if g.kind == "RXX" and _negligible(2 * g.theta):
                continue
            out.append(g)
    for q in range(n):
        flush(q)
    return Circuit(n, tuple(out))


def compile_to_native(circuit: Circuit, *, optimize: bool = True) -> Circuit:
    """Equivalent circuit (up to global phase) over RX, RZ and RXX only."""
    gates: list[Gate] = []
    for g in circuit.gates:
        gates.extend(_expand(g))
    native = Circuit(circuit.n_qubits, tuple(gates))
    if not optimize:
        return native
    while True:
        fused = fuse_single_qubit_runs(native)
        if len(fused) == len(native):
            return fused
        native = fused


def gate_count_report(circuit: Circuit) -> dict[str, int]:
    counts = circuit.gate_counts()
    single = sum(v for k, v in counts.items() if k in ("RX", "RZ", "X"))
    two = sum(v for k, v in counts.items() if k in ("RXX", "G"))
    return {**counts, "single_qubit": single, "two_qubit": two, "total": len(circuit)}
