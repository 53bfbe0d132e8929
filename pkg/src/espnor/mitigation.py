"""Zero-noise extrapolation by random gate folding, and occupation-convention inversion."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from .circuit import Circuit, Gate
from .config import ZneConfig
from .estimators import EnergyEstimate, shot_values
from .fermion import QubitLayout, sector_mask

FOLDABLE = frozenset({"RX", "RZ", "RXX", "X"})


def fold_gates_at_random(circuit: Circuit, scale: float, rng_seed: int) -> Circuit:
    """Replace randomly chosen gates ``g`` by ``g g^dagger g`` until ~``scale * len(circuit)`` gates.

    Every gate is folded ``k // n`` times (full passes) and ``k % n`` distinct
    gates, drawn without replacement, once more, where ``k`` is the number of
    folds needed to reach ``round(scale * n)``.
    """
    if scale < 1:
        raise ValueError(f"scale factor must be >= 1, got {scale}")
    bad = sorted({g.kind for g in circuit.gates if g.kind not in FOLDABLE})
    if bad:
        raise ValueError(f"folding needs native gates; found {bad}")
    n0 = len(circuit)
    if scale == 1 or n0 == 0:
        return circuit
    folds = (int(round(scale * n0)) - n0) // 2
    per_gate = np.full(n0, folds // n0, dtype=int)
    extra = folds % n0
    if extra:
        rng = np.random.default_rng(rng_seed)
        per_gate[rng.choice(n0, size=extra, replace=False)] += 1
    gates: list[Gate] = []
    for g, m in zip(circuit.gates, per_gate):
        gates.append(g)
        inv = g.inverse()
        for _ in range(m):
            gates += [inv, g]
    return Circuit(circuit.n_qubits, tuple(gates))


def _decay(lam, a, b, c):
    return a + b * np.exp(-c * lam)


@dataclass(frozen=True)
class ZneFit:
    a: float
    b: float
    c: float
    sigma_a: float
    sigma_b: float
    ok: bool = True

    @property
    def value_at_zero(self) -> float:
        return self.a + self.b

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma_a**2 + self.sigma_b**2) if self.ok else math.inf


def _grid_start(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Best (a, b, c) over a log grid of c, solving the linear (a, b) problem exactly."""
    best = None
    for c in np.geomspace(1e-7, 1e2, 91):
        A = np.column_stack([np.ones_like(x), np.exp(-c * x)])
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        ssr = float(np.sum((A @ coef - y) ** 2))
        if best is None or ssr < best[0]:
            best = (ssr, float(coef[0]), float(coef[1]), float(c))
    return best[1], best[2], best[3]


# tolerance on the extrapolated value before a fit counts as unphysical
_FREQ_SLACK = 0.5


def _lm(x, y, p0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OptimizeWarning)
        warnings.simplefilter("ignore", RuntimeWarning)
        try:
            popt, pcov = curve_fit(_decay, x, y, p0=p0, method="lm", maxfev=20000)
        except (RuntimeError, ValueError):
            return None
        if not np.all(np.isfinite(popt)) or popt[2] < 0:
            return None
        ssr = float(np.sum((_decay(x, *popt) - y) ** 2))
    return ssr, popt, pcov


def _ab_variance_at_fixed_c(x, y, a, b, c) -> np.ndarray:
    J = np.column_stack([np.ones_like(x), np.exp(-c * x)])
    JtJ = J.T @ J
    if np.linalg.cond(JtJ) > 1e12:
        return np.full(2, math.inf)
    dof = max(len(x) - 3, 1)
    s2 = float(np.sum((_decay(x, a, b, c) - y) ** 2)) / dof
    return np.diag(np.linalg.inv(JtJ)) * s2


def fit_decay(lambdas, values, anchor_lambda: float, anchor_value: float) -> ZneFit:
    """Unweighted least-squares fit of ``a + b exp(-c lambda)`` including the anchor point.

    Levenberg-Marquardt runs from ``a = last, b = first - last, c = 1`` and
    again from the best point of a scan over ``c``; the lower residual wins.
    A fit is rejected if ``c < 0``, a parameter is not finite, the
    covariance of ``(a, b)`` is singular even at fixed ``c``, or ``a + b`` is
    not a frequency.
    """
    x = np.append(np.asarray(lambdas, dtype=float), anchor_lambda)
    y = np.append(np.asarray(values, dtype=float), anchor_value)
    candidates = [r for r in (_lm(x, y, (y[-2], y[0] - y[-2], 1.0)), _lm(x, y, _grid_start(x, y)))
                  if r is not None]
    if not candidates:
        return ZneFit(float(y[0]), 0.0, 0.0, math.inf, math.inf, ok=False)
    _, popt, pcov = min(candidates, key=lambda r: r[0])
    a, b, c = (float(v) for v in popt)
    var = np.diag(pcov)[:2]
    if not np.all(np.isfinite(var)) or np.any(var < 0):
        # c unidentified (e.g. b = 0): fall back to the linear (a, b) covariance at fixed c
        var = _ab_variance_at_fixed_c(x, y, a, b, c)
    if not np.all(np.isfinite(var)):
        return ZneFit(float(y[0]), 0.0, 0.0, math.inf, math.inf, ok=False)
    if not -_FREQ_SLACK <= a + b <= 1.0 + _FREQ_SLACK:
        return ZneFit(float(y[0]), 0.0, 0.0, math.inf, math.inf, ok=False)
    return ZneFit(a, b, c, math.sqrt(var[0]), math.sqrt(var[1]), ok=True)


@dataclass(frozen=True, eq=False)
class ZneResult:
    distribution: np.ndarray
    sigma: np.ndarray
    fits: dict[int, ZneFit]
    failed_states: tuple[int, ...]

    def to_dict(self, n_qubits: int, *, threshold: float = 0.0) -> dict:
        """Fit parameters for every state with extrapolated frequency > ``threshold``."""
        rows = {}
        for i in np.flatnonzero(self.distribution > threshold):
            f = self.fits[int(i)]
            rows[format(int(i), f"0{n_qubits}b")] = {
                "a": f.a, "b": f.b, "c": f.c, "sigma_a": _finite(f.sigma_a), "sigma_b": _finite(f.sigma_b),
                "extrapolated_frequency": float(self.distribution[i]),
                "sigma": _finite(float(self.sigma[i])),
            }
        return {"states": rows,
                "failed_states": [format(i, f"0{n_qubits}b") for i in self.failed_states]}


def _finite(x: float):
    return x if math.isfinite(x) else None


def zne_extrapolate_frequencies(freq_by_lambda: dict[float, np.ndarray], config: ZneConfig) -> ZneResult:
    """Per-state exponential extrapolation to zero noise, clipped at 0 and renormalized."""
    lambdas = tuple(sorted(float(k) for k in freq_by_lambda))
    if lambdas != tuple(config.lambdas):
        raise ValueError(f"scale factors {lambdas} do not match the configured {config.lambdas}")
    table = np.array([np.asarray(freq_by_lambda[lam], dtype=float) for lam in lambdas])
    for lam, row in zip(lambdas, table):
        if abs(row.sum() - 1.0) > 1e-9 or np.any(row < 0):
            raise ValueError(f"frequencies at lambda={lam} are not a normalized distribution")
    dim = table.shape[1]
    n_qubits = int(round(math.log2(dim)))
    anchor = config.anchor_for(n_qubits)
    values = np.empty(dim)
    sigma = np.empty(dim)
    fits: dict[int, ZneFit] = {}
    failed = []
    for i in range(dim):
        fit = fit_decay(lambdas, table[:, i], config.anchor_lambda, anchor)
        fits[i] = fit
        if fit.ok:
            values[i], sigma[i] = fit.value_at_zero, fit.sigma
        else:
            failed.append(i)
            values[i], sigma[i] = table[0, i], math.inf
    values = np.clip(values, 0.0, None)
    total = values.sum()
    if total <= 0:
        raise ArithmeticError("every extrapolated frequency is zero")
    return ZneResult(values / total, sigma / total, fits, tuple(failed))


def mitigated_electrostatics(distribution, sigma, layout: QubitLayout, n_alpha: int, n_beta: int,
                             w, core_term: float, *, n_samples: float | None = None) -> EnergyEstimate:
    """Postselected energy of a (mitigated) distribution with linear error propagation.

    With ``F`` the in-sector mass, ``dE/df_i = (e_i - E)/F`` for in-sector states
    and zero elsewhere. ``n_samples`` defaults to ``F``.
    """
    f = np.asarray(distribution, dtype=float)
    s = np.asarray(sigma, dtype=float)
    if abs(f.sum() - 1.0) > 1e-9:
        raise ValueError("distribution is not normalized")
    mask = sector_mask(layout, n_alpha, n_beta)
    F = float(f[mask].sum())
    if F <= 0:
        raise ArithmeticError("no extrapolated probability left in the target sector")
    e = shot_values(layout, w, core_term)
    mean = float(np.dot(f[mask], e[mask]) / F)
    grad = (e[mask] - mean) / F
    nz = grad != 0
    var = float(np.sum((grad[nz] * s[mask][nz]) ** 2)) if np.all(np.isfinite(s[mask][nz])) else math.inf
    lo, hi = float(e[mask][f[mask] > 0].min()), float(e[mask][f[mask] > 0].max())
    return EnergyEstimate(mean, math.sqrt(var), F if n_samples is None else float(n_samples), lo, hi)


def invert_occupation_convention(circuit: Circuit, theta=None):
    """Prepend a full X layer and negate every G/PX angle.

    The new circuit prepares the bitwise complement of the original state,
    so reading it with ``zero_is_occupied`` reproduces the original
    occupations. Returns ``(circuit', -theta)``.
    """
    bad = sorted({g.kind for g in circuit.gates if g.kind not in ("X", "G", "PX")})
    if bad:
        raise ValueError(f"only ansatz circuits (X, G, PX) can be inverted; found {bad}")
    layer = [Gate("X", (q,)) for q in range(circuit.n_qubits)]
    body = [g if g.kind == "X" else Gate(g.kind, g.qubits, -g.theta) for g in circuit.gates]
    new_theta = None if theta is None else -np.asarray(theta, dtype=float)
    return Circuit(circuit.n_qubits, tuple(layer + body)), new_theta
