"""Restricted Hartree-Fock with DIIS convergence acceleration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SCFError(RuntimeError):
    pass


@dataclass(frozen=True)
class SCFResult:
    energy: float               # total energy incl. nuclear repulsion
    electronic_energy: float
    orbital_energies: np.ndarray
    mo_coefficients: np.ndarray  # columns are canonical MOs over the AO basis
    n_occupied: int


def _fock(hcore, eri, density):
    coulomb = np.einsum("pqrs,rs->pq", eri, density)
    exchange = np.einsum("prqs,rs->pq", eri, density)
    return hcore + coulomb - 0.5 * exchange


def restricted_hartree_fock(s, hcore, eri, n_electrons, e_nuclear,
                            max_iterations=200, energy_tol=1e-12,
                            gradient_tol=1e-9, diis_depth=8) -> SCFResult:
    if n_electrons % 2:
        raise SCFError("restricted SCF requires an even electron count")
    n_occ = n_electrons // 2

    # Symmetric orthogonalization.
    s_vals, s_vecs = np.linalg.eigh(s)
    if s_vals.min() < 1e-10:
        raise SCFError("overlap matrix is numerically singular")
    x = s_vecs @ np.diag(s_vals ** -0.5) @ s_vecs.T

    def solve(fock):
        f_prime = x.T @ fock @ x
        eps, c_prime = np.linalg.eigh(f_prime)
        c = x @ c_prime
        density = 2.0 * c[:, :n_occ] @ c[:, :n_occ].T
        return eps, c, density

    eps, c, density = solve(hcore)
    energy = 0.0
    fock_history: list[np.ndarray] = []
    error_history: list[np.ndarray] = []

    for _ in range(max_iterations):
        fock = _fock(hcore, eri, density)
        grad = fock @ density @ s - s @ density @ fock
        error_history.append(x.T @ grad @ x)
        fock_history.append(fock)
        if len(fock_history) > diis_depth:
            fock_history.pop(0)
            error_history.pop(0)

        if len(fock_history) > 1:
            k = len(fock_history)
            b = -np.ones((k + 1, k + 1))
            b[k, k] = 0.0
            for i in range(k):
                for j in range(k):
                    b[i, j] = np.vdot(error_history[i], error_history[j])
            rhs = np.zeros(k + 1)
            rhs[k] = -1.0
            try:
                weights = np.linalg.solve(b, rhs)[:k]
                fock = sum(w * f for w, f in zip(weights, fock_history))
            except np.linalg.LinAlgError:
                pass  # fall back to the plain Fock matrix

        eps, c, density = solve(fock)
        fock_current = _fock(hcore, eri, density)
        new_energy = 0.5 * np.einsum("pq,pq->", density, hcore + fock_current)
        gradient = np.max(np.abs(fock_current @ density @ s - s @ density @ fock_current))
        if abs(new_energy - energy) < energy_tol and gradient < gradient_tol:
            energy = new_energy
            break
        energy = new_energy
    else:
        raise SCFError(
            f"SCF did not converge in {max_iterations} iterations "
            f"(last gradient {gradient:.2e})")

    # Canonicalize against the converged Fock matrix.
    eps, c, density = solve(_fock(hcore, eri, density))
    electronic = 0.5 * np.einsum("pq,pq->", density, hcore + _fock(hcore, eri, density))
    return SCFResult(energy=float(electronic + e_nuclear),
                     electronic_energy=float(electronic),
                     orbital_energies=eps, mo_coefficients=c, n_occupied=n_occ)


def mo_integrals(hcore, eri, mo_coefficients):
    """One- and two-electron integrals in the canonical MO basis (chemists')."""
    c = mo_coefficients
    h_mo = c.T @ hcore @ c
    g = np.einsum("pqrs,pi->iqrs", eri, c, optimize=True)
    g = np.einsum("iqrs,qj->ijrs", g, c, optimize=True)
    g = np.einsum("ijrs,rk->ijks", g, c, optimize=True)
    g = np.einsum("ijks,sl->ijkl", g, c, optimize=True)
    return h_mo, g
