"""Shot-level estimators: postselection, diagonal 1-PDMs, energies with standard errors."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fermion import QubitLayout, occupation_table, sector_mask
from .model_io import HARTREE_TO_KCAL
from .statevector import BitstringCounts


@dataclass(frozen=True)
class EnergyEstimate:
    """Mean and standard error of the mean, in Hartree.

    ``sem`` is ``inf`` when fewer than two samples are available.
    """

    mean: float
    sem: float
    n_samples_used: float
    min_value: float | None = None
    max_value: float | None = None

    def __post_init__(self) -> None:
        if not self.sem >= 0:
            raise ValueError(f"sem must be >= 0, got {self.sem}")

    @property
    def insufficient_statistics(self) -> bool:
        return not math.isfinite(self.sem)

    def to_dict(self) -> dict:
        out = {
            "mean_hartree": self.mean,
            "mean_kcal_mol": self.mean * HARTREE_TO_KCAL,
            "sem_hartree": self.sem if math.isfinite(self.sem) else None,
            "sem_kcal_mol": self.sem * HARTREE_TO_KCAL if math.isfinite(self.sem) else None,
            "n_samples_used": self.n_samples_used,
        }
        if self.min_value is not None:
            out["per_shot_min_hartree"] = self.min_value
            out["per_shot_max_hartree"] = self.max_value
        if self.insufficient_statistics:
            out["insufficient_statistics"] = True
        return out


@dataclass(frozen=True, eq=False)
class PostselectedSamples:
    kept: BitstringCounts
    discarded_count: float
    retention_fraction: float


def _check_width(counts: BitstringCounts, layout: QubitLayout) -> None:
    if counts.n_qubits != layout.n_qubits:
        raise ValueError(f"bitstrings have {counts.n_qubits} bits, layout expects {layout.n_qubits}")
    for s in counts.counts:
        if len(s) != layout.n_qubits:
            raise ValueError(f"bitstring {s!r} has the wrong length")


def postselect(counts: BitstringCounts, layout: QubitLayout, n_alpha: int, n_beta: int) -> PostselectedSamples:
    """Keep shots whose alpha and beta halves hold ``n_alpha`` and ``n_beta`` particles."""
    _check_width(counts, layout)
    mask = sector_mask(layout, n_alpha, n_beta)
    weights = counts.as_vector()
    kept_w = np.where(mask, weights, 0)
    stream = None
    if counts.stream is not None:
        stream = counts.stream[mask[counts.stream]]
    if all(isinstance(v, (int, np.integer)) for v in counts.counts.values()):
        kept_w = kept_w.astype(np.int64)
    kept = BitstringCounts.from_vector(kept_w, layout.n_qubits, stream)
    total = float(weights.sum())
    kept_total = float(kept_w.sum())
    retention = kept_total / total if total > 0 else 0.0
    return PostselectedSamples(kept=kept, discarded_count=total - kept_total, retention_fraction=retention)


def orbital_occupations(layout: QubitLayout) -> np.ndarray:
    """(2**n, N) spin-summed occupation of each spatial orbital per basis state."""
    occ = occupation_table(layout).astype(float)
    N = layout.n_spatial
    return occ[:, :N] + occ[:, N:]


def diag_rdm_from_counts(kept: BitstringCounts, layout: QubitLayout) -> np.ndarray:
    """Mean spin-summed occupation of every spatial orbital."""
    _check_width(kept, layout)
    weights = kept.as_vector()
    total = weights.sum()
    if total <= 0:
        raise ValueError("no samples to estimate the 1-PDM diagonal from")
    return (weights / total) @ orbital_occupations(layout)


def shot_values(layout: QubitLayout, w, core_term: float) -> np.ndarray:
    """Per-basis-state value ``core_term + sum_v w_v occ_v``."""
    w = np.asarray(w, dtype=float)
    if w.shape != (layout.n_spatial,):
        raise ValueError(f"w has shape {w.shape}, expected ({layout.n_spatial},)")
    return core_term + orbital_occupations(layout) @ w


def _weighted_estimate(values: np.ndarray, weights: np.ndarray) -> EnergyEstimate:
    n = float(weights.sum())
    if n <= 0:
        raise ValueError("no samples to estimate from")
    mean = float(np.dot(weights, values) / n)
    support = weights > 0
    lo, hi = float(values[support].min()), float(values[support].max())
    if n <= 1:
        return EnergyEstimate(mean, math.inf, n, lo, hi)
    var = float(np.dot(weights, (values - mean) ** 2) / (n - 1))
    return EnergyEstimate(mean, math.sqrt(max(var, 0.0) / n), n, lo, hi)


def estimate_with_sem(kept: BitstringCounts, w, core_term: float, layout: QubitLayout) -> EnergyEstimate:
    """Sample mean of ``E_i = core_term + sum_v w_v occ_v(i)`` and its standard error.

    The standard error is the Bessel-corrected standard deviation over
    ``sqrt(N)``.
    """
    _check_width(kept, layout)
    return _weighted_estimate(shot_values(layout, w, core_term), kept.as_vector())


def bhattacharyya(p, q, *, tol: float = 1e-9) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("distributions differ in shape")
    for name, d in (("p", p), ("q", q)):
        if np.any(d < 0) or abs(d.sum() - 1.0) > tol:
            raise ValueError(f"{name} is not a normalized distribution")
    return float(min(1.0, np.sum(np.sqrt(p * q))))


def default_grid(total: int, *, min_shots: int = 1000, include_small: bool = False) -> list[int]:
    """Log-spaced shot counts up to ``total`` (from 2 when ``include_small``)."""
    lo = 2 if include_small else min_shots
    if total < lo:
        return [total] if total >= 1 else []
    pts = np.unique(np.round(np.geomspace(lo, total, 25)).astype(int))
    return sorted({int(x) for x in pts} | {total})


def convergence_curve(kept: BitstringCounts, w, core_term: float, grid, layout: QubitLayout):
    """Estimates from the first ``n`` postselected shots, for each ``n`` in ``grid``."""
    if kept.stream is None:
        raise ValueError("convergence curves need the shot stream (not available in analytic mode)")
    grid = [int(n) for n in grid]
    if grid != sorted(grid) or (grid and grid[0] < 1):
        raise ValueError("grid must be ascending positive shot counts")
    if grid and grid[-1] > kept.stream.size:
        raise ValueError(f"grid point {grid[-1]} exceeds the {kept.stream.size} available shots")
    vals = shot_values(layout, w, core_term)[kept.stream]
    csum = np.concatenate([[0.0], np.cumsum(vals)])
    out = []
    for n in grid:
        mean = csum[n] / n
        if n > 1:
            seg = vals[:n]
            sem = math.sqrt(float(np.sum((seg - mean) ** 2)) / (n - 1) / n)
        else:
            sem = math.inf
        out.append((n, EnergyEstimate(float(mean), sem, n)))
    return out


def write_convergence_csv(curve, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["n", "mean_kcalmol", "sem_kcalmol"])
        for n, est in curve:
            sem = est.sem * HARTREE_TO_KCAL if math.isfinite(est.sem) else ""
            wr.writerow([n, repr(est.mean * HARTREE_TO_KCAL), repr(sem) if sem != "" else ""])
