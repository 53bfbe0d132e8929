"""Brute-force Fock-space reference values for the bundled instances.

Builds ladder operators as explicit Kronecker products, so nothing here goes
through the package's Pauli algebra or determinant code. The printed numbers
are the frozen references in tests/test_frozen_oracles.py.
"""

import json
import sys
from functools import reduce
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent


def ladder(n_modes):
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])  # |1> -> |0>
    z = np.diag([1.0, -1.0])
    eye = np.eye(2)
    ops = []
    for k in range(n_modes):
        ops.append(reduce(np.kron, [z] * k + [lower] + [eye] * (n_modes - k - 1)))
    return ops


def reference(path):
    d = json.loads(Path(path).read_text())
    act = d["active"]
    N = len(act["active_mo"])
    na, nb = act["n_alpha"], act["n_beta"]
    h = np.array(d["h_act"])
    g = np.zeros((N,) * 4)
    for p, q, r, s, v in d["g_act"]:
        for idx in {(p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                    (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p)}:
            g[idx] = v
    a = ladder(2 * N)
    ad = [x.T for x in a]
    mode = lambda v, s: v + s * N  # noqa: E731
    H = d["E_core"] * np.eye(4**N)
    for p in range(N):
        for q in range(N):
            for s in (0, 1):
                H += h[p, q] * ad[mode(p, s)] @ a[mode(q, s)]
    for p, q, r, t in np.ndindex(*g.shape):
        if g[p, q, r, t] == 0:
            continue
        for s1 in (0, 1):
            for s2 in (0, 1):
                H += 0.5 * g[p, q, r, t] * ad[mode(p, s1)] @ ad[mode(r, s2)] @ a[mode(t, s2)] @ a[mode(q, s1)]
    nalpha = sum(ad[mode(v, 0)] @ a[mode(v, 0)] for v in range(N))
    nbeta = sum(ad[mode(v, 1)] @ a[mode(v, 1)] for v in range(N))
    keep = np.flatnonzero((np.isclose(np.diag(nalpha), na)) & (np.isclose(np.diag(nbeta), nb)))
    e, vecs = np.linalg.eigh(H[np.ix_(keep, keep)])
    psi = np.zeros(4**N)
    psi[keep] = vecs[:, 0]
    gam = np.array([[sum(psi @ ad[mode(p, s)] @ a[mode(q, s)] @ psi for s in (0, 1)) for q in range(N)]
                    for p in range(N)])
    n_mo = d["n_mo"]
    full = np.zeros((n_mo, n_mo))
    for c in act["core_mo"]:
        full[c, c] = 2.0
    am = act["active_mo"]
    full[np.ix_(am, am)] = gam
    C = np.array(d["C"])
    gA = C @ full @ C.T
    n_ao = d["n_ao"]
    eri = np.zeros((n_ao,) * 4)
    for p, q, r, s, v in d["eri_ao"]:
        for idx in {(p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                    (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p)}:
            eri[idx] = v
    gB = np.array(d["gamma_B_ao"])
    E_elst = (np.einsum("pq,pqrs,rs->", gA, eri, gB) + np.sum(gA * np.array(d["V_B_ao"]))
              + np.sum(np.array(d["V_A_ao"]) * gB) + d["V_AB"])
    return {"E0": float(e[0]), "gap": float(e[1] - e[0]), "E_elst": float(E_elst),
            "gamma_trace": float(np.trace(gam))}


if __name__ == "__main__":
    paths = sys.argv[1:] or sorted(str(p) for p in (ROOT / "data").glob("*.json"))
    for path in paths:
        r = reference(path)
        print(Path(path).name, {k: repr(v) for k, v in r.items()})
