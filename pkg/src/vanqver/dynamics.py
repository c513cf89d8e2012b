"""Time-dependent Schrodinger propagation and exact-diagonalization oracles.

The propagator applies exp(-i H(t_mid) dt) over uniform sub-intervals (the
midpoint rule, second order in dt).  Sub-step exponentials are evaluated
exactly on small dense matrices and by a Lanczos expm-times-vector routine on
larger ones.  When an AnnealSpec carries diagonal conserved operators and the
initial state lies in a single joint eigenvalue sector, the dynamics is run
inside that sector after an exact leakage check, which is mathematically
identical to full-space propagation and much cheaper.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .pauli import PauliSum, _I_POWERS, _parity_signs, to_matrix
from .schedule import AnnealSpec, evaluate

NORM_DRIFT_TOL = 1e-8

# Dense eigendecomposition per step below this dimension; Lanczos above.
_EIGH_DIM_CAP = 64

# Krylov parameters for expm-times-vector.
_LANCZOS_M_MAX = 60
_LANCZOS_TOL = 1e-12


class DynamicsError(RuntimeError):
    """Propagation failed its accuracy guards (e.g. norm drift)."""


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in ascending order, optional orthonormal column vectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None


def _check_state(psi: np.ndarray, n_qubits: int) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (1 << n_qubits,):
        raise ValueError("state dimension does not match the register")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORM_DRIFT_TOL:
        raise ValueError(f"state norm {norm} deviates from 1 beyond {NORM_DRIFT_TOL}")
    return psi


def _term_action(string, coeff, indices):
    """Column amplitudes of coeff*string on the given basis indices."""
    return (coeff * _I_POWERS[string.y_count % 4]
            * _parity_signs(indices & string.z_mask))


def _to_csr(h: PauliSum) -> scipy.sparse.csr_matrix:
    dim = 1 << h.n_qubits
    idx = np.arange(dim)
    rows, cols, data = [], [], []
    for s, c in h.terms.items():
        rows.append(idx ^ s.x_mask)
        cols.append(idx)
        data.append(_term_action(s, c, idx))
    if not rows:
        return scipy.sparse.csr_matrix((dim, dim), dtype=complex)
    return scipy.sparse.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim))


def sector_basis(conserved, psi0: np.ndarray) -> np.ndarray | None:
    """Basis indices of the joint diagonal-eigenvalue sector containing psi0.

    Returns None when psi0 is spread over more than one sector.
    """
    if not conserved:
        return None
    n = conserved[0].n_qubits
    dim = 1 << n
    idx = np.arange(dim)
    values = np.stack([op.diagonal(idx) for op in conserved])
    support = np.flatnonzero(np.abs(psi0) > 1e-12)
    ref = values[:, support[0]]
    if np.max(np.abs(values[:, support] - ref[:, None])) > 1e-9:
        return None
    mask = np.all(np.abs(values - ref[:, None]) <= 1e-9, axis=0)
    return idx[mask]


def project_to_sector(h: PauliSum, basis: np.ndarray,
                      pos: np.ndarray) -> np.ndarray:
    """Dense sector matrix of h, with an exact out-of-sector leakage check.

    Leakage is evaluated on the summed matrix elements, so individually
    non-conserving Pauli strings whose contributions cancel are accepted.
    """
    dim = len(basis)
    m = np.zeros((dim, dim), dtype=complex)
    out_keys, out_amps = [], []
    src = np.arange(dim)
    for s, c in h.terms.items():
        targets = basis ^ s.x_mask
        amps = _term_action(s, c, basis)
        inside = pos[targets] >= 0
        np.add.at(m, (pos[targets[inside]], src[inside]), amps[inside])
        if not inside.all():
            outside = ~inside
            out_keys.append(targets[outside].astype(np.int64) * dim + src[outside])
            out_amps.append(amps[outside])
    if out_keys:
        keys = np.concatenate(out_keys)
        amps = np.concatenate(out_amps)
        _, inverse = np.unique(keys, return_inverse=True)
        summed = (np.bincount(inverse, weights=amps.real)
                  + 1j * np.bincount(inverse, weights=amps.imag))
        leakage = float(np.max(np.abs(summed)))
        if leakage > 1e-10 * max(1.0, h.one_norm):
            raise ValueError(
                f"operator leaks out of the conserved sector by {leakage:.3e}")
    return m


def _split_matvec(h: np.ndarray):
    """Matvec closure; real matrices act on real/imag parts separately so the
    BLAS path stays in double precision instead of upcasting the matrix."""
    if np.iscomplexobj(h):
        return lambda x: h @ x
    return lambda x: (h @ x.real) + 1j * (h @ x.imag)


def _expm_step_dense(h: np.ndarray, dt: float, psi: np.ndarray) -> np.ndarray:
    if h.shape[0] <= _EIGH_DIM_CAP:
        w, v = np.linalg.eigh(h)
        return v @ (np.exp(-1j * dt * w) * (v.conj().T @ psi))
    return _lanczos_expm(_split_matvec(h), psi, -1j * dt)


def _lanczos_expm(matvec, psi: np.ndarray, z: complex,
                  m_max: int = _LANCZOS_M_MAX, tol: float = _LANCZOS_TOL) -> np.ndarray:
    """exp(z H) psi for Hermitian H via a Lanczos subspace.

    The subspace grows until a Taylor-style running estimate
    |z|^m prod(beta_j) / m! drops below tol; the tridiagonal exponential is
    then evaluated once and accepted only if the rigorous a posteriori
    residual beta_m |y_m| also passes.  Full reorthogonalization throughout;
    subspaces stay small because propagation steps keep ||H|| dt << 1.
    """
    beta0 = np.linalg.norm(psi)
    if beta0 == 0.0:
        return psi.copy()
    v = psi / beta0
    basis = [v]
    alphas: list[float] = []
    betas: list[float] = []
    w = matvec(v)
    z_mag = abs(z)
    estimate = 1.0
    while True:
        a = float(np.vdot(basis[-1], w).real)
        alphas.append(a)
        w = w - a * basis[-1]
        b = float(np.linalg.norm(w))
        m = len(alphas)
        estimate *= z_mag * max(b, abs(a)) / m
        if estimate < tol or b < 1e-13 or m >= m_max:
            evals, evecs = scipy.linalg.eigh_tridiagonal(alphas, betas)
            y = evecs @ (np.exp(z * evals) * evecs[0, :])
            if b * abs(y[-1]) < 10.0 * tol or b < 1e-13 or m >= m_max:
                return beta0 * (np.stack(basis, axis=1) @ y)
            estimate = tol * 0.1  # estimate misfired; take more iterations
        v = w / b
        for u in basis:  # full reorthogonalization
            v = v - np.vdot(u, v) * u
        v = v / np.linalg.norm(v)
        basis.append(v)
        betas.append(b)
        w = matvec(v) - b * basis[-2]


class _SectorPropagator:
    """Midpoint propagation restricted to a verified invariant sector."""

    def __init__(self, spec: AnnealSpec, basis: np.ndarray):
        dim_full = 1 << spec.n_qubits
        self.basis = basis
        pos = np.full(dim_full, -1, dtype=np.int64)
        pos[basis] = np.arange(len(basis))
        self.pos = pos
        self.m_ini = project_to_sector(spec.h_ini, basis, pos)
        self.m_fin = project_to_sector(spec.h_fin, basis, pos)
        self.m_nav = project_to_sector(spec.h_nav, basis, pos)
        self.dim_full = dim_full

    def enter(self, psi: np.ndarray) -> np.ndarray:
        return psi[self.basis].copy()

    def exit(self, psi_internal: np.ndarray) -> np.ndarray:
        psi = np.zeros(self.dim_full, dtype=complex)
        psi[self.basis] = psi_internal
        return psi

    def step(self, a, b, c, dt, psi):
        h = a * self.m_ini + b * self.m_fin + c * self.m_nav
        return _expm_step_dense(h, dt, psi)


class _DensePropagator:
    """Full-space midpoint propagation with dense matrices (small registers)."""

    def __init__(self, spec: AnnealSpec):
        self.m_ini = to_matrix(spec.h_ini)
        self.m_fin = to_matrix(spec.h_fin)
        self.m_nav = to_matrix(spec.h_nav)

    def enter(self, psi):
        return psi.copy()

    def exit(self, psi_internal):
        return psi_internal.copy()

    def step(self, a, b, c, dt, psi):
        h = a * self.m_ini + b * self.m_fin + c * self.m_nav
        return _expm_step_dense(h, dt, psi)


class _KrylovPropagator:
    """Full-space midpoint propagation with sparse matrices (large registers)."""

    def __init__(self, spec: AnnealSpec):
        self.m_ini = _to_csr(spec.h_ini)
        self.m_fin = _to_csr(spec.h_fin)
        self.m_nav = _to_csr(spec.h_nav)

    def enter(self, psi):
        return psi.copy()

    def exit(self, psi_internal):
        return psi_internal.copy()

    def step(self, a, b, c, dt, psi):
        h = (a * self.m_ini + b * self.m_fin + c * self.m_nav).tocsr()
        return _lanczos_expm(lambda x: h @ x, psi, -1j * dt)


_DENSE_QUBIT_CAP = 8


def _materialize(spec: AnnealSpec, psi0: np.ndarray):
    if spec.conserved:
        for op in spec.conserved:
            if not op.is_diagonal:
                raise ValueError("conserved operators must be diagonal (Z/I) sums")
        basis = sector_basis(spec.conserved, psi0)
        if basis is not None and len(basis) < (1 << spec.n_qubits):
            return _SectorPropagator(spec, basis)
    if spec.n_qubits <= _DENSE_QUBIT_CAP:
        return _DensePropagator(spec)
    return _KrylovPropagator(spec)


def _run_steps(prop, schedule, psi, t0: float, t1: float, n_steps: int) -> np.ndarray:
    dt = (t1 - t0) / n_steps
    for k in range(n_steps):
        a, b, c = evaluate(schedule, t0 + (k + 0.5) * dt)
        psi = prop.step(a, b, c, dt, psi)
    return psi


def _finalize(prop, psi_internal) -> np.ndarray:
    psi = prop.exit(psi_internal)
    norm = np.linalg.norm(psi)
    drift = abs(norm - 1.0)
    if drift > NORM_DRIFT_TOL:
        raise DynamicsError(
            f"norm drift {drift:.3e} exceeds {NORM_DRIFT_TOL}; "
            "increase n_time_steps")
    return psi / norm


def evolve(spec: AnnealSpec, psi0: np.ndarray) -> np.ndarray:
    """Propagate psi0 from t = 0 to t = T under the anneal Hamiltonian."""
    psi0 = _check_state(psi0, spec.n_qubits)
    if spec.schedule.T == 0.0:
        return psi0 / np.linalg.norm(psi0)
    prop = _materialize(spec, psi0)
    psi = _run_steps(prop, spec.schedule, prop.enter(psi0), 0.0,
                     spec.schedule.T, spec.n_time_steps)
    return _finalize(prop, psi)


def evolve_trace(spec: AnnealSpec, psi0: np.ndarray,
                 n_samples: int) -> list[tuple[float, np.ndarray]]:
    """States sampled at n_samples uniform times spanning [0, T]."""
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2 (the two endpoints)")
    psi0 = _check_state(psi0, spec.n_qubits)
    times = np.linspace(0.0, spec.schedule.T, n_samples)
    if spec.schedule.T == 0.0:
        return [(0.0, psi0.copy()) for _ in times]
    prop = _materialize(spec, psi0)
    psi = prop.enter(psi0)
    out = [(0.0, _finalize(prop, psi))]
    for t_prev, t_next in zip(times[:-1], times[1:]):
        seg_steps = max(1, int(np.ceil(spec.n_time_steps
                                       * (t_next - t_prev) / spec.schedule.T)))
        psi = _run_steps(prop, spec.schedule, psi, t_prev, t_next, seg_steps)
        out.append((float(t_next), _finalize(prop, psi)))
    return out


def full_spectrum(h: PauliSum, k: int | None = None) -> Spectrum:
    """Lowest k eigenpairs of h (all of them when k is None), ascending."""
    dim = 1 << h.n_qubits
    if k is not None and not 1 <= k <= dim:
        raise ValueError(f"k = {k} outside [1, {dim}]")
    if k is not None and h.n_qubits > 10 and k < dim - 1:
        try:
            w, v = scipy.sparse.linalg.eigsh(_to_csr(h), k=k, which="SA")
            order = np.argsort(w)
            return Spectrum(w[order], v[:, order])
        except scipy.sparse.linalg.ArpackError:
            pass  # fall through to the dense path
    w, v = np.linalg.eigh(to_matrix(h))
    if k is not None:
        w, v = w[:k], v[:, :k]
    return Spectrum(w, v)


def expectation(state: np.ndarray, h: PauliSum) -> float:
    """<state| h |state> in hartree; asserts a tiny imaginary residual."""
    state = _check_state(state, h.n_qubits)
    idx = np.arange(1 << h.n_qubits)
    bra = np.conj(state)
    val = 0.0 + 0.0j
    for s, c in h.terms.items():
        val += np.sum(bra[idx ^ s.x_mask] * _term_action(s, c, idx) * state)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary residual {val.imag:.3e}")
    return float(val.real)
