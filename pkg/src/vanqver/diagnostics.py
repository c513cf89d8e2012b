"""Why the navigator helps: gaps, overlaps, adiabaticity, and measurability.

Instantaneous spectra come from dense diagonalization of the assembled
Hamiltonian, so these routines are limited to registers within the dense cap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dynamics
from .pauli import PauliString, PauliSum, commutes, to_matrix
from .schedule import AnnealSpec, derivatives, hamiltonian_at

# Below this gap the ground space is treated as degenerate: overlaps project
# onto the whole eigenspace and adiabatic bounds are flagged.
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class GapTrace:
    """E_1(t) - E_0(t) at sampled times."""

    times: np.ndarray
    gaps: np.ndarray

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.gaps.tolist()))


@dataclass(frozen=True)
class OverlapTrace:
    """|<phi_0(t)|psi(t)>| at sampled times, in [0, 1]."""

    times: np.ndarray
    overlaps: np.ndarray
    degenerate: np.ndarray  # True where the ground space was degenerate

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.overlaps.tolist()))


@dataclass(frozen=True)
class BoundTrace:
    """|<phi_1|dH/ds|phi_0>| / gap^2 at uniform s; inf where the gap closes."""

    s_values: np.ndarray
    bounds: np.ndarray
    closed_gap: np.ndarray

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.s_values.tolist(), self.bounds.tolist()))


def _sample_times(spec: AnnealSpec, n_samples: int) -> np.ndarray:
    if n_samples < 2:
        raise ValueError("need at least the two endpoint samples")
    return np.linspace(0.0, spec.schedule.T, n_samples)


def gap_trace(spec: AnnealSpec, n_samples: int = 65) -> GapTrace:
    """Gap between the two lowest instantaneous eigenvalues."""
    times = _sample_times(spec, n_samples)
    gaps = np.empty(n_samples)
    for i, t in enumerate(times):
        eigenvalues = dynamics.full_spectrum(hamiltonian_at(spec, t),
                                             k=2).eigenvalues
        gaps[i] = max(eigenvalues[1] - eigenvalues[0], 0.0)
    return GapTrace(times, gaps)


def _ground_projection(h: PauliSum, psi: np.ndarray) -> tuple[float, bool]:
    spectrum = dynamics.full_spectrum(h)
    w, v = spectrum.eigenvalues, spectrum.eigenvectors
    degenerate_count = int(np.sum(w - w[0] < DEGENERACY_TOL))
    block = v[:, :degenerate_count]
    overlap = float(np.linalg.norm(block.conj().T @ psi))
    return min(overlap, 1.0), degenerate_count > 1


def overlap_trace(spec: AnnealSpec, psi0: np.ndarray,
                  n_samples: int = 65) -> OverlapTrace:
    """Overlap magnitude of the evolving state with the instantaneous ground
    state; for a degenerate ground space, the projection norm onto it."""
    states = dynamics.evolve_trace(spec, psi0, n_samples)
    times = np.array([t for t, _ in states])
    overlaps = np.empty(len(states))
    degenerate = np.zeros(len(states), dtype=bool)
    for i, (t, psi) in enumerate(states):
        overlaps[i], degenerate[i] = _ground_projection(
            hamiltonian_at(spec, t), psi)
    return OverlapTrace(times, overlaps, degenerate)


def adiabatic_bound(spec: AnnealSpec, n_samples: int = 65) -> BoundTrace:
    """Matrix-element-over-gap-squared profile of the adiabaticity condition.

    dH/ds is assembled analytically from the schedule derivatives, so the
    navigator contributes at the endpoints through dC/ds even though C
    vanishes there.
    """
    s_values = np.linspace(0.0, 1.0, _sample_times(spec, n_samples).size)
    bounds = np.empty(n_samples)
    closed = np.zeros(n_samples, dtype=bool)
    for i, s in enumerate(s_values):
        h = hamiltonian_at(spec, s * spec.schedule.T)
        da, db, dc = derivatives(spec.schedule, s)
        dh = da * spec.h_ini + db * spec.h_fin + dc * spec.h_nav
        spectrum = dynamics.full_spectrum(h, k=2)
        gap = spectrum.eigenvalues[1] - spectrum.eigenvalues[0]
        if gap < 1e-12:
            bounds[i] = np.inf
            closed[i] = True
            continue
        phi0 = spectrum.eigenvectors[:, 0]
        phi1 = spectrum.eigenvectors[:, 1]
        element = abs(np.vdot(phi1, to_matrix(dh) @ phi0))
        bounds[i] = element / gap ** 2
    return BoundTrace(s_values, bounds, closed)


@dataclass(frozen=True)
class MeasurementGroup:
    """Simultaneously measurable terms with their basis-rotation plan.

    ``rotations`` maps qubit index to "X->Z" or "Y->Z"; unlisted qubits need
    no rotation.
    """

    terms: tuple[tuple[PauliString, complex], ...]
    rotations: dict[int, str]


@dataclass(frozen=True)
class MeasurementGrouping:
    groups: tuple[MeasurementGroup, ...]

    def __len__(self):
        return len(self.groups)


def group_commuting(h: PauliSum, mode: str = "qubit-wise") -> MeasurementGrouping:
    """Greedy first-fit partition of terms into qubit-wise commuting groups.

    Terms are seeded in order of descending coefficient magnitude (letters
    break ties) so the output is deterministic.
    """
    if mode != "qubit-wise":
        raise ValueError("only qubit-wise grouping is implemented")
    ordered = sorted(h.terms.items(),
                     key=lambda kv: (-abs(kv[1]), kv[0].letters))
    groups: list[list[tuple[PauliString, complex]]] = []
    for string, coeff in ordered:
        for group in groups:
            if all(commutes(string, member, mode="qubit-wise")
                   for member, _ in group):
                group.append((string, coeff))
                break
        else:
            groups.append([(string, coeff)])

    built = []
    for group in groups:
        rotations: dict[int, str] = {}
        for string, _ in group:
            for p in range(string.n_qubits):
                bit = 1 << (string.n_qubits - 1 - p)
                has_x = bool(string.x_mask & bit)
                has_z = bool(string.z_mask & bit)
                if has_x:
                    rotations[p] = "Y->Z" if has_z else "X->Z"
        built.append(MeasurementGroup(tuple(group), rotations))
    return MeasurementGrouping(tuple(built))


_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
# S^dagger then Hadamard maps Y to +Z.
_Y_TO_Z = _HADAMARD @ np.diag([1.0, -1.0j])
_ROTATIONS = {"X->Z": _HADAMARD, "Y->Z": _Y_TO_Z}


def _apply_single_qubit(state: np.ndarray, qubit: int,
                        gate: np.ndarray) -> np.ndarray:
    tensor = state.reshape((1 << qubit, 2, -1))
    return np.einsum("ab,ibj->iaj", gate, tensor).reshape(state.shape)


def measure_grouped(grouping: MeasurementGrouping, state: np.ndarray) -> float:
    """Reconstruct <state|h|state> from per-group rotated Z-basis statistics.

    Each group is evaluated from the measurement probabilities of the rotated
    state alone, mirroring how the groups would be measured on hardware.
    """
    total = 0.0
    for group in grouping.groups:
        rotated = state
        for qubit, kind in sorted(group.rotations.items()):
            rotated = _apply_single_qubit(rotated, qubit, _ROTATIONS[kind])
        probabilities = np.abs(rotated) ** 2
        idx = np.arange(state.size)
        for string, coeff in group.terms:
            z_mask = string.x_mask | string.z_mask
            signs = 1.0 - 2.0 * (np.bitwise_count((idx & z_mask)
                                                  .astype(np.uint64)) & 1)
            value = float(np.dot(probabilities, signs))
            total += (coeff * value).real
    return total
