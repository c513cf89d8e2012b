"""Annealing time-profiles and the instantaneous Hamiltonian assembly.

Units: hbar = 1 and energies in hartree, so annealing times carry units of
inverse hartree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliSum


def _quadratic_abc(s: float, alpha: float) -> tuple[float, float, float]:
    return 1.0 - s * s, s * s, alpha * s * (1.0 - s)


def _quadratic_d_abc(s: float, alpha: float) -> tuple[float, float, float]:
    return -2.0 * s, 2.0 * s, alpha * (1.0 - 2.0 * s)


# Profile family registry: name -> (A/B/C of s, derivatives wrt s).
PROFILES = {"quadratic": (_quadratic_abc, _quadratic_d_abc)}


@dataclass(frozen=True)
class Schedule:
    """One annealing schedule: duration T, navigator scale alpha, profile."""

    T: float
    alpha: float = 1.0
    profile: str = "quadratic"

    def __post_init__(self):
        if self.T < 0:
            raise ValueError("annealing time must be non-negative")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile family {self.profile!r}")


def evaluate(schedule: Schedule, t: float) -> tuple[float, float, float]:
    """Profile amplitudes (A, B, C) at time t in [0, T]."""
    if t < 0 or t > schedule.T:
        raise ValueError(f"t = {t} outside [0, {schedule.T}]")
    if schedule.T == 0.0:
        return 1.0, 0.0, 0.0
    abc, _ = PROFILES[schedule.profile]
    return abc(t / schedule.T, schedule.alpha)


def derivatives(schedule: Schedule, s: float) -> tuple[float, float, float]:
    """(dA/ds, dB/ds, dC/ds) at dimensionless s = t/T in [0, 1]."""
    if s < 0 or s > 1:
        raise ValueError(f"s = {s} outside [0, 1]")
    _, d_abc = PROFILES[schedule.profile]
    return d_abc(s, schedule.alpha)


def default_time_steps(h_ini: PauliSum, h_fin: PauliSum, h_nav: PauliSum,
                       schedule: Schedule) -> int:
    """Step count growing with both duration and energy scale.

    Uses the peak instantaneous coefficient 1-norm over the schedule.
    """
    abc, _ = PROFILES[schedule.profile]
    grid = np.linspace(0.0, 1.0, 257)
    peak = max(abs(a) * h_ini.one_norm + abs(b) * h_fin.one_norm
               + abs(c) * h_nav.one_norm
               for a, b, c in (abc(s, schedule.alpha) for s in grid))
    return max(200, math.ceil(100.0 * schedule.T * peak))


@dataclass(frozen=True)
class AnnealSpec:
    """Everything defining one anneal.

    ``conserved`` may list diagonal (Z/I-only) symmetry operators; the
    propagator uses them to restrict the dynamics to the verified invariant
    sector of the initial state.
    """

    h_ini: PauliSum
    h_fin: PauliSum
    h_nav: PauliSum
    schedule: Schedule
    n_time_steps: int
    conserved: tuple[PauliSum, ...] = ()

    def __post_init__(self):
        n = self.h_ini.n_qubits
        for h in (self.h_fin, self.h_nav, *self.conserved):
            if h.n_qubits != n:
                raise ValueError("all operators in an AnnealSpec must share n_qubits")
        if self.n_time_steps < 1:
            raise ValueError("n_time_steps must be a positive integer")

    @classmethod
    def build(cls, h_ini: PauliSum, h_fin: PauliSum, h_nav: PauliSum | None,
              schedule: Schedule, n_time_steps: int | None = None,
              conserved: tuple[PauliSum, ...] = ()) -> "AnnealSpec":
        if h_nav is None:
            h_nav = PauliSum.zero(h_ini.n_qubits)
        if n_time_steps is None:
            n_time_steps = default_time_steps(h_ini, h_fin, h_nav, schedule)
        return cls(h_ini, h_fin, h_nav, schedule, n_time_steps, tuple(conserved))

    @property
    def n_qubits(self) -> int:
        return self.h_ini.n_qubits


def hamiltonian_at(spec: AnnealSpec, t: float) -> PauliSum:
    """A(t) h_ini + B(t) h_fin + C(t) h_nav, simplified."""
    a, b, c = evaluate(spec.schedule, t)
    return a * spec.h_ini + b * spec.h_fin + c * spec.h_nav
