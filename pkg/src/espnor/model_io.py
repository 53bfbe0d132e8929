"""Problem instances: integrals, monomer-B density and the active-space split.

The instance file is a JSON document tagged ``espnor-instance-v1``. Matrices
are row-major nested lists; two-electron tensors are lists of
``[p, p', q, q', value]`` entries in canonical index order, with every entry
not listed taken to be zero.

``h_act``/``g_act``/``E_core`` are the already-folded active-space integrals:
core-orbital mean-field contributions live in ``h_act`` and ``E_core``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

FORMAT_TAG = "espnor-instance-v1"
HARTREE_TO_KCAL = 627.5094740631

_REQUIRED_KEYS = (
    "n_ao", "n_mo", "C", "S", "eri_ao", "V_A_ao", "V_B_ao", "gamma_B_ao",
    "V_AB", "N_A", "N_B", "active", "h_act", "g_act", "E_core",
)


class InstanceParseError(ValueError):
    """The instance document does not match the schema."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"field {field!r}: {message}")


class InstanceValidationError(ValueError):
    """A physical identity required of an instance is violated."""

    def __init__(self, identity: str, residual: float):
        self.identity = identity
        self.residual = residual
        super().__init__(f"{identity} violated (residual {residual:.3e})")


@dataclass(frozen=True)
class ActiveSpaceSpec:
    core_mo: tuple[int, ...]
    active_mo: tuple[int, ...]
    n_alpha: int
    n_beta: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "core_mo", tuple(int(i) for i in self.core_mo))
        object.__setattr__(self, "active_mo", tuple(int(i) for i in self.active_mo))

    @property
    def n_act(self) -> int:
        return len(self.active_mo)

    @property
    def n_core(self) -> int:
        return len(self.core_mo)

    def validate(self, n_mo: int) -> None:
        if set(self.core_mo) & set(self.active_mo):
            raise InstanceValidationError("core/active disjointness", 1.0)
        if len(set(self.core_mo)) != self.n_core or len(set(self.active_mo)) != self.n_act:
            raise InstanceValidationError("unique orbital indices", 1.0)
        bad = [i for i in self.core_mo + self.active_mo if not 0 <= i < n_mo]
        if bad:
            raise InstanceValidationError(f"orbital indices < n_mo={n_mo}", float(max(bad)))
        if self.n_act == 0:
            raise InstanceValidationError("non-empty active space", 0.0)
        for name in ("n_alpha", "n_beta"):
            value = getattr(self, name)
            if not 0 <= value <= self.n_act:
                raise InstanceValidationError(f"0 <= {name} <= n_act", float(value))
        if (self.n_alpha + self.n_beta) % 2:
            raise InstanceValidationError("even active electron count", 1.0)


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    n_ao: int
    n_mo: int
    C: np.ndarray
    S: np.ndarray
    eri_ao: np.ndarray
    V_A_ao: np.ndarray
    V_B_ao: np.ndarray
    gamma_B_ao: np.ndarray
    V_AB: float
    N_A: int
    N_B: int
    active: ActiveSpaceSpec
    h_act: np.ndarray
    g_act: np.ndarray
    E_core: float

    @property
    def n_act(self) -> int:
        return self.active.n_act

    @property
    def n_alpha(self) -> int:
        return self.active.n_alpha

    @property
    def n_beta(self) -> int:
        return self.active.n_beta

    def validate(self) -> None:
        n_ao, n_mo = self.n_ao, self.n_mo
        if not 1 <= n_mo <= n_ao:
            raise InstanceValidationError("1 <= n_mo <= n_ao", float(n_mo))
        shapes = {
            "C": (n_ao, n_mo), "S": (n_ao, n_ao), "eri_ao": (n_ao,) * 4,
            "V_A_ao": (n_ao, n_ao), "V_B_ao": (n_ao, n_ao), "gamma_B_ao": (n_ao, n_ao),
            "h_act": (self.n_act, self.n_act), "g_act": (self.n_act,) * 4,
        }
        for name, shape in shapes.items():
            if getattr(self, name).shape != shape:
                raise InstanceParseError(name, f"expected shape {shape}, got {getattr(self, name).shape}")
        self.active.validate(n_mo)
        for name in ("S", "V_A_ao", "V_B_ao", "gamma_B_ao", "h_act"):
            m = getattr(self, name)
            res = float(np.max(np.abs(m - m.T)))
            if res > 1e-10:
                raise InstanceValidationError(f"{name} symmetry", res)
        res = float(np.max(np.abs(self.C.T @ self.S @ self.C - np.eye(n_mo))))
        if res > 1e-8:
            raise InstanceValidationError("MO orthonormality C^T S C = I", res)
        n_b = float(np.sum(self.S * self.gamma_B_ao))
        if abs(n_b - self.N_B) > 1e-6:
            raise InstanceValidationError("electron count sum(S * gamma_B) = N_B", abs(n_b - self.N_B))
        for name in ("eri_ao", "g_act"):
            res = eightfold_residual(getattr(self, name))
            if res > 1e-10:
                raise InstanceValidationError(f"{name} 8-fold index symmetry", res)
        if self.N_A <= 0 or self.N_B <= 0:
            raise InstanceValidationError("positive electron counts", float(min(self.N_A, self.N_B)))
        n_a_model = 2 * self.active.n_core + self.n_alpha + self.n_beta
        if n_a_model != self.N_A:
            raise InstanceValidationError(
                "N_A = 2*n_core + n_alpha + n_beta", float(abs(n_a_model - self.N_A))
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "format": FORMAT_TAG,
            "n_ao": self.n_ao,
            "n_mo": self.n_mo,
            "C": self.C.tolist(),
            "S": self.S.tolist(),
            "eri_ao": eri_to_entries(self.eri_ao),
            "V_A_ao": self.V_A_ao.tolist(),
            "V_B_ao": self.V_B_ao.tolist(),
            "gamma_B_ao": self.gamma_B_ao.tolist(),
            "V_AB": float(self.V_AB),
            "N_A": int(self.N_A),
            "N_B": int(self.N_B),
            "active": {
                "core_mo": list(self.active.core_mo),
                "active_mo": list(self.active.active_mo),
                "n_alpha": self.active.n_alpha,
                "n_beta": self.active.n_beta,
            },
            "h_act": self.h_act.tolist(),
            "g_act": eri_to_entries(self.g_act),
            "E_core": float(self.E_core),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.dumps().encode("utf-8")).hexdigest()[:16]


def eightfold_residual(eri: np.ndarray) -> float:
    perms = [
        eri.transpose(1, 0, 2, 3), eri.transpose(0, 1, 3, 2), eri.transpose(1, 0, 3, 2),
        eri.transpose(2, 3, 0, 1), eri.transpose(3, 2, 0, 1), eri.transpose(2, 3, 1, 0),
        eri.transpose(3, 2, 1, 0),
    ]
    return max((float(np.max(np.abs(eri - p))) for p in perms), default=0.0)


def _canonical_quads(n: int):
    for p in range(n):
        for q in range(p + 1):
            pq = p * (p + 1) // 2 + q
            for r in range(n):
                for s in range(r + 1):
                    if r * (r + 1) // 2 + s <= pq:
                        yield p, q, r, s


def eri_to_entries(eri: np.ndarray) -> list[list]:
    n = eri.shape[0]
    return [[p, q, r, s, float(eri[p, q, r, s])]
            for p, q, r, s in _canonical_quads(n) if eri[p, q, r, s] != 0.0]


def eri_from_entries(entries: list, n: int, field: str) -> np.ndarray:
    eri = np.zeros((n,) * 4)
    for k, entry in enumerate(entries):
        if not isinstance(entry, (list, tuple)) or len(entry) != 5:
            raise InstanceParseError(field, f"entry {k} is not a 5-tuple")
        if any(isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < n for x in entry[:4]):
            raise InstanceParseError(field, f"entry {k} has an index outside [0, {n})")
        p, q, r, s = entry[:4]
        value = float(entry[4])
        for a, b, c, d in {(p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                           (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p)}:
            eri[a, b, c, d] = value
    return eri


def _matrix(data: dict, key: str, shape: tuple[int, int]) -> np.ndarray:
    try:
        m = np.array(data[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InstanceParseError(key, f"not a numeric matrix ({exc})") from exc
    if m.shape != shape:
        raise InstanceParseError(key, f"expected shape {shape}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InstanceParseError(key, "non-finite entries")
    return m


def _int(data: dict, key: str) -> int:
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceParseError(key, f"expected an integer, got {value!r}")
    return value


def _float(data: dict, key: str) -> float:
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceParseError(key, f"expected a number, got {value!r}")
    return float(value)


def instance_from_dict(data: Any) -> ProblemInstance:
    if not isinstance(data, dict):
        raise InstanceParseError("<root>", "document must be a JSON object")
    if data.get("format") != FORMAT_TAG:
        raise InstanceParseError("format", f"expected version tag {FORMAT_TAG!r}")
    for key in _REQUIRED_KEYS:
        if key not in data:
            raise InstanceParseError(key, "missing")
    n_ao, n_mo = _int(data, "n_ao"), _int(data, "n_mo")
    if n_ao < 1:
        raise InstanceParseError("n_ao", "must be >= 1")
    if not 1 <= n_mo <= n_ao:
        raise InstanceParseError("n_mo", "must satisfy 1 <= n_mo <= n_ao")
    act = data["active"]
    if not isinstance(act, dict):
        raise InstanceParseError("active", "must be an object")
    for key in ("core_mo", "active_mo", "n_alpha", "n_beta"):
        if key not in act:
            raise InstanceParseError(f"active.{key}", "missing")
    try:
        active = ActiveSpaceSpec(
            core_mo=tuple(act["core_mo"]), active_mo=tuple(act["active_mo"]),
            n_alpha=_int(act, "n_alpha"), n_beta=_int(act, "n_beta"),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InstanceParseError):
            raise InstanceParseError(f"active.{exc.field}", str(exc)) from exc
        raise InstanceParseError("active", str(exc)) from exc
    n_act = active.n_act
    for key in ("eri_ao", "g_act"):
        if not isinstance(data[key], list):
            raise InstanceParseError(key, "must be a list of [p, q, r, s, value] entries")
    inst = ProblemInstance(
        n_ao=n_ao,
        n_mo=n_mo,
        C=_matrix(data, "C", (n_ao, n_mo)),
        S=_matrix(data, "S", (n_ao, n_ao)),
        eri_ao=eri_from_entries(data["eri_ao"], n_ao, "eri_ao"),
        V_A_ao=_matrix(data, "V_A_ao", (n_ao, n_ao)),
        V_B_ao=_matrix(data, "V_B_ao", (n_ao, n_ao)),
        gamma_B_ao=_matrix(data, "gamma_B_ao", (n_ao, n_ao)),
        V_AB=_float(data, "V_AB"),
        N_A=_int(data, "N_A"),
        N_B=_int(data, "N_B"),
        active=active,
        h_act=_matrix(data, "h_act", (n_act, n_act)),
        g_act=eri_from_entries(data["g_act"], n_act, "g_act"),
        E_core=_float(data, "E_core"),
    )
    inst.validate()
    return inst


def load_instance(path: str | Path) -> ProblemInstance:
    """Read and validate an instance file.

    Raises:
        InstanceParseError: unreadable file or schema violation (names the field).
        InstanceValidationError: a physical identity fails (names it, with residual).
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceParseError("<file>", str(exc)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError("<document>", f"invalid JSON: {exc}") from exc
    return instance_from_dict(data)


def save_instance(instance: ProblemInstance, path: str | Path) -> None:
    Path(path).write_text(instance.dumps(), encoding="utf-8")


def _s_orthonormal(S: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random columns orthonormal in the S metric (Löwdin frame times a random rotation)."""
    n = S.shape[0]
    evals, evecs = np.linalg.eigh(S)
    s_inv_half = evecs @ np.diag(evals**-0.5) @ evecs.T
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    q = q * np.sign(np.diag(r))
    return s_inv_half @ q


def generate_synthetic_instance(
    n_ao: int,
    n_act: int,
    rng_seed: int,
    *,
    eri_scale: float = 0.06,
) -> ProblemInstance:
    """Random but self-consistent instance standing in for real molecular integrals.

    The MO basis diagonalizes monomer A's one-body operator with a clear
    occupied/virtual gap, so the closed-shell reference dominates and the
    correlation carried by the random two-electron part stays small.
    ``eri_scale`` sets the size of that correlating part.
    """
    if not 1 <= n_act <= n_ao <= 8:
        raise ValueError(f"need 1 <= n_act <= n_ao <= 8, got n_act={n_act}, n_ao={n_ao}")
    rng = np.random.default_rng(rng_seed)
    n_mo = n_ao

    gram = rng.normal(size=(n_ao, n_ao + 2))
    gram = gram @ gram.T
    d = np.sqrt(np.diag(gram))
    S = 0.8 * np.eye(n_ao) + 0.2 * gram / np.outer(d, d)

    def sym(scale: float) -> np.ndarray:
        m = rng.normal(scale=scale, size=(n_ao, n_ao))
        return (m + m.T) / 2

    def neg_def(scale: float) -> np.ndarray:
        m = rng.normal(size=(n_ao, n_ao))
        return -scale * (m @ m.T / n_ao + 0.5 * np.eye(n_ao))

    # Coulomb-like tensor: a monopole part plus random symmetric "fitting" vectors.
    vectors = [0.55 * S] + [sym(eri_scale) for _ in range(n_ao + 1)]
    B = np.array(vectors)
    eri_ao = np.einsum("Lij,Lkl->ijkl", B, B)

    n_core = (n_ao - n_act + 1) // 2
    n_elec_pair = max(1, n_act // 2)
    core_mo = tuple(range(n_core))
    active_mo = tuple(range(n_core, n_core + n_act))

    # Orbital energies: deep core, occupied/virtual active with a gap, high externals.
    eps = np.empty(n_mo)
    eps[:n_core] = -2.5 + 0.3 * np.arange(n_core) + rng.uniform(-0.1, 0.1, n_core)
    occ = np.arange(n_elec_pair)
    eps[n_core:n_core + n_elec_pair] = -0.9 + 0.25 * occ + rng.uniform(-0.05, 0.05, n_elec_pair)
    n_virt_act = n_act - n_elec_pair
    virt = np.arange(n_virt_act)
    eps[n_core + n_elec_pair:n_core + n_act] = 0.3 + 0.25 * virt + rng.uniform(-0.05, 0.05, n_virt_act)
    n_ext = n_mo - n_core - n_act
    eps[n_core + n_act:] = 1.5 + 0.3 * np.arange(n_ext)

    C = _s_orthonormal(S, rng)
    h_ao = S @ C @ np.diag(eps) @ C.T @ S
    h_ao = (h_ao + h_ao.T) / 2

    V_A_ao = neg_def(1.0)
    V_B_ao = neg_def(1.0)
    n_occ_b = max(1, n_ao // 2)
    C_B = _s_orthonormal(S, rng)[:, :n_occ_b]
    gamma_B_ao = 2.0 * C_B @ C_B.T
    N_B = 2 * n_occ_b
    V_AB = float(rng.uniform(0.5, 2.0))
    E_nuc_A = float(rng.uniform(1.0, 5.0))

    h_mo = C.T @ h_ao @ C
    eri_mo = np.einsum("pi,qj,rk,sl,pqrs->ijkl", C, C, C, C, eri_ao, optimize=True)
    core, act = list(core_mo), list(active_mo)
    fold = np.zeros((n_act, n_act))
    e_core = E_nuc_A
    for c in core:
        fold += 2 * eri_mo[np.ix_(act, act, [c], [c])][:, :, 0, 0]
        fold -= eri_mo[np.ix_(act, [c], [c], act)][:, 0, 0, :]
        e_core += 2 * h_mo[c, c]
        for c2 in core:
            e_core += 2 * eri_mo[c, c, c2, c2] - eri_mo[c, c2, c2, c]
    h_act = h_mo[np.ix_(act, act)] + fold
    h_act = (h_act + h_act.T) / 2
    g_act = eri_mo[np.ix_(act, act, act, act)]
    g_act = _symmetrize_eightfold(g_act)

    inst = ProblemInstance(
        n_ao=n_ao, n_mo=n_mo, C=C, S=S, eri_ao=_symmetrize_eightfold(eri_ao),
        V_A_ao=V_A_ao, V_B_ao=V_B_ao, gamma_B_ao=gamma_B_ao, V_AB=V_AB,
        N_A=2 * n_core + 2 * n_elec_pair, N_B=N_B,
        active=ActiveSpaceSpec(core_mo, active_mo, n_elec_pair, n_elec_pair),
        h_act=h_act, g_act=g_act, E_core=float(e_core),
    )
    inst.validate()
    return inst


def _symmetrize_eightfold(eri: np.ndarray) -> np.ndarray:
    perms = [(0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
             (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0)]
    return sum(eri.transpose(p) for p in perms) / 8.0


def instance_digest_of(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


__all__ = [
    "FORMAT_TAG", "HARTREE_TO_KCAL", "ActiveSpaceSpec", "ProblemInstance",
    "InstanceParseError", "InstanceValidationError", "load_instance", "save_instance",
    "instance_from_dict", "generate_synthetic_instance", "eri_from_entries", "eri_to_entries",
]
