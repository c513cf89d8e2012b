"""Full configuration interaction by direct operator application.

The Hamiltonian matrix is built in the determinant basis of fixed
(n_up, n_down) by applying every second-quantized term to every determinant
with explicit fermionic signs.  No Slater-Condon case analysis, so the same
code path covers diagonal, single, and double excitations.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np


def determinant_basis(n_orbitals: int, n_up: int, n_down: int) -> list[int]:
    """All determinants as bitmasks: up spins in bits [0, m), down in [m, 2m)."""
    ups = [sum(1 << p for p in occ) for occ in combinations(range(n_orbitals), n_up)]
    downs = [sum(1 << (n_orbitals + p) for p in occ)
             for occ in combinations(range(n_orbitals), n_down)]
    return [u | d for d in downs for u in ups]


def _apply_ladder(det: int, index: int, create: bool) -> tuple[int, int] | None:
    bit = 1 << index
    occupied = bool(det & bit)
    if create == occupied:
        return None
    sign = -1 if bin(det & (bit - 1)).count("1") % 2 else 1
    return det ^ bit, sign


def _spin_orbital_terms(h_mo: np.ndarray, g_mo: np.ndarray, cutoff=1e-12):
    """Second-quantized terms over blocked spin-orbitals.

    g_mo is the chemists' (pq|rs) tensor; the physicists' <pq|rs> needed by
    the two-body operator a+_p a+_q a_s a_r is (pr|qs) with spin matching
    p with r and q with s.
    """
    m = h_mo.shape[0]
    for p in range(m):
        for q in range(m):
            if abs(h_mo[p, q]) <= cutoff:
                continue
            for spin in (0, 1):
                yield h_mo[p, q], ((p + spin * m, True), (q + spin * m, False))
    for p in range(m):
        for q in range(m):
            for r in range(m):
                for s in range(m):
                    v = g_mo[p, r, q, s]
                    if abs(v) <= cutoff:
                        continue
                    for sp1 in (0, 1):
                        for sp2 in (0, 1):
                            i = p + sp1 * m
                            j = q + sp2 * m
                            k = s + sp2 * m
                            l = r + sp1 * m
                            if i == j or k == l:
                                continue
                            yield 0.5 * v, ((i, True), (j, True),
                                            (k, False), (l, False))


def fci_hamiltonian(h_mo: np.ndarray, g_mo: np.ndarray,
                    n_up: int, n_down: int) -> tuple[np.ndarray, list[int]]:
    m = h_mo.shape[0]
    basis = determinant_basis(m, n_up, n_down)
    index = {det: i for i, det in enumerate(basis)}
    dim = len(basis)
    h = np.zeros((dim, dim))
    for coeff, ops in _spin_orbital_terms(h_mo, g_mo):
        for col, det in enumerate(basis):
            current = det
            sign = 1
            dead = False
            for orb, create in reversed(ops):
                step = _apply_ladder(current, orb, create)
                if step is None:
                    dead = True
                    break
                current, s = step
                sign *= s
            if dead:
                continue
            h[index[current], col] += sign * coeff
    return h, basis


def fci_ground_energy(h_mo: np.ndarray, g_mo: np.ndarray, n_up: int,
                      n_down: int, e_nuclear: float) -> float:
    h, _ = fci_hamiltonian(h_mo, g_mo, n_up, n_down)
    return float(np.linalg.eigvalsh(h)[0] + e_nuclear)


def reference_energy(h_mo: np.ndarray, g_mo: np.ndarray, n_up: int,
                     n_down: int, e_nuclear: float) -> float:
    """<ref|H|ref> + E_nuc; must reproduce the SCF total energy."""
    m = h_mo.shape[0]
    h, basis = fci_hamiltonian(h_mo, g_mo, n_up, n_down)
    ref = (sum(1 << p for p in range(n_up))
           | sum(1 << (m + p) for p in range(n_down)))
    i = basis.index(ref)
    return float(h[i, i] + e_nuclear)
