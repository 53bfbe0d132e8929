"""Gate set, circuits and the plain-text circuit file format.

Gate matrices use the gate's own qubit order with its first qubit as the most
significant bit. ``G`` rotates the ``|01>, |10>`` block and ``PX`` the
``|1100>, |0011>`` block, both as ``[[c, -s], [s, c]]`` with
``c = cos(theta/2)``, ``s = sin(theta/2)``. ``RXX(theta) = exp(-i theta XX)``
(no half angle), i.e. the Molmer-Sorensen matrix at angle ``2 theta``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

CIRCUIT_TAG = "espnor-circuit-v1"
ARITY = {"RX": 1, "RZ": 1, "X": 1, "RXX": 2, "G": 2, "PX": 4}
PARAMETRIC = {"RX", "RZ", "RXX", "G", "PX"}
NATIVE = frozenset({"RX", "RZ", "RXX"})


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    theta: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ARITY:
            raise ValueError(f"unsupported gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if len(qubits) != ARITY[self.kind]:
            raise ValueError(f"{self.kind} acts on {ARITY[self.kind]} qubits, got {qubits}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated qubit in {self.kind}{qubits}")
        if self.kind in PARAMETRIC:
            if self.theta is None or not np.isfinite(self.theta):
                raise ValueError(f"{self.kind} needs a finite angle")
            object.__setattr__(self, "theta", float(self.theta))
        elif self.theta is not None:
            raise ValueError(f"{self.kind} takes no angle")

    def matrix(self) -> np.ndarray:
        return gate_matrix(self.kind, self.theta)

    def inverse(self) -> Gate:
        if self.kind == "X":
            return self
        return Gate(self.kind, self.qubits, -self.theta)


def rx_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def ms_matrix(theta: float) -> np.ndarray:
    """Molmer-Sorensen gate ``exp(-i theta/2 XX)``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([
        [c, 0, 0, -1j * s],
        [0, c, -1j * s, 0],
        [0, -1j * s, c, 0],
        [-1j * s, 0, 0, c],
    ])


def rxx_matrix(theta: float) -> np.ndarray:
    return ms_matrix(2 * theta)


def givens_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    m = np.eye(4, dtype=complex)
    m[1, 1], m[1, 2], m[2, 1], m[2, 2] = c, -s, s, c
    return m


def pair_exchange_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    m = np.eye(16, dtype=complex)
    a, b = 0b1100, 0b0011
    m[a, a], m[a, b], m[b, a], m[b, b] = c, -s, s, c
    return m


_X = np.array([[0, 1], [1, 0]], dtype=complex)


def gate_matrix(kind: str, theta: float | None) -> np.ndarray:
    if kind == "RX":
        return rx_matrix(theta)
    if kind == "RZ":
        return rz_matrix(theta)
    if kind == "RXX":
        return rxx_matrix(theta)
    if kind == "X":
        return _X.copy()
    if kind == "G":
        return givens_matrix(theta)
    if kind == "PX":
        return pair_exchange_matrix(theta)
    raise ValueError(f"unsupported gate kind {kind!r}")


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        gates = tuple(self.gates)
        for g in gates:
            if max(g.qubits) >= self.n_qubits:
                raise ValueError(f"{g.kind}{g.qubits} exceeds register of {self.n_qubits} qubits")
        object.__setattr__(self, "gates", gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: Circuit) -> Circuit:
        if other.n_qubits != self.n_qubits:
            raise ValueError("register sizes differ")
        return Circuit(self.n_qubits, self.gates + other.gates)

    def gate_counts(self) -> dict[str, int]:
        return dict(sorted(Counter(g.kind for g in self.gates).items()))

    def is_native(self) -> bool:
        return all(g.kind in NATIVE for g in self.gates)

    def inverse(self) -> Circuit:
        return Circuit(self.n_qubits, tuple(g.inverse() for g in reversed(self.gates)))

    def dumps(self) -> str:
        lines = [CIRCUIT_TAG, f"qubits {self.n_qubits}"]
        for g in self.gates:
            parts = [g.kind, *map(str, g.qubits)]
            if g.theta is not None:
                parts.append(repr(g.theta))
            lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != CIRCUIT_TAG:
        raise ValueError(f"missing header {CIRCUIT_TAG!r}")
    if len(lines) < 2 or not lines[1].startswith("qubits "):
        raise ValueError("second line must be 'qubits <n>'")
    n = int(lines[1].split()[1])
    gates = []
    for lineno, ln in enumerate(lines[2:], start=3):
        parts = ln.split()
        kind = parts[0]
        if kind not in ARITY:
            raise ValueError(f"line {lineno}: unsupported gate kind {kind!r}")
        k = ARITY[kind]
        expected = 1 + k + (kind in PARAMETRIC)
        if len(parts) != expected:
            raise ValueError(f"line {lineno}: expected {expected} fields, got {len(parts)}")
        qubits = tuple(int(x) for x in parts[1:1 + k])
        theta = float(parts[1 + k]) if kind in PARAMETRIC else None
        gates.append(Gate(kind, qubits, theta))
    return Circuit(n, tuple(gates))


def load_circuit(path: str | Path) -> Circuit:
    return parse_circuit(Path(path).read_text(encoding="utf-8"))


def save_circuit(circuit: Circuit, path: str | Path) -> None:
    Path(path).write_text(circuit.dumps(), encoding="utf-8")
