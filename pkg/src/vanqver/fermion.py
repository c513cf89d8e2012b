"""Molecular integrals, Jordan-Wigner mapping, and qubit Hamiltonian builders.

Spin-orbital ordering is blocked: spatial orbital P with spin up maps to
spin-orbital P, spin down to n_spatial + P.  A qubit in |1> marks an occupied
spin-orbital, which under the standard Jordan-Wigner images used here is the
Z = -1 eigenstate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliString, PauliSum


@dataclass(frozen=True)
class IntegralSet:
    """One- and two-electron integrals over spatial orbitals, in hartree.

    h_pqrs holds chemists'-notation integrals (pq|rs) with the 8-fold
    permutational symmetry of real orbitals.
    """

    n_spatial_orbitals: int
    n_electrons: int
    h_pq: np.ndarray
    h_pqrs: np.ndarray
    e_nuclear: float
    point_group_note: str = ""

    def __post_init__(self):
        m = self.n_spatial_orbitals
        if m < 1 or self.n_electrons < 1:
            raise ValueError("orbital and electron counts must be positive")
        if self.n_electrons > 2 * m:
            raise ValueError("more electrons than spin-orbitals")
        if self.h_pq.shape != (m, m) or self.h_pqrs.shape != (m, m, m, m):
            raise ValueError("integral tensor shapes do not match orbital count")
        if np.max(np.abs(self.h_pq - self.h_pq.T)) > 1e-10:
            raise ValueError("one-electron integrals are not symmetric")
        eri = self.h_pqrs
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if np.max(np.abs(eri - eri.transpose(perm))) > 1e-10:
                raise ValueError("two-electron integrals break 8-fold symmetry")


@dataclass(frozen=True)
class SpinOrbitalMap:
    """Occupied/virtual partition of the blocked spin-orbital register."""

    n_spatial_orbitals: int
    occupied: tuple[int, ...]
    virtual: tuple[int, ...]
    ordering: str = "blocked"

    def __post_init__(self):
        n = self.n_spin_orbitals
        if self.ordering != "blocked":
            raise ValueError("only the blocked spin-orbital ordering is supported")
        if sorted(self.occupied + self.virtual) != list(range(n)):
            raise ValueError("occupied and virtual must partition the register")

    @classmethod
    def closed_shell(cls, n_spatial_orbitals: int, n_electrons: int) -> "SpinOrbitalMap":
        if n_electrons % 2:
            raise ValueError("closed-shell map requires an even electron count")
        n_occ = n_electrons // 2
        if n_occ > n_spatial_orbitals:
            raise ValueError("more electron pairs than spatial orbitals")
        m = n_spatial_orbitals
        occ = tuple(range(n_occ)) + tuple(range(m, m + n_occ))
        vir = tuple(range(n_occ, m)) + tuple(range(m + n_occ, 2 * m))
        return cls(m, occ, vir)

    @property
    def n_spin_orbitals(self) -> int:
        return 2 * self.n_spatial_orbitals

    @property
    def n_electrons(self) -> int:
        return len(self.occupied)

    def spin_of(self, p: int) -> int:
        """0 for the up block, 1 for the down block."""
        return 0 if p < self.n_spatial_orbitals else 1

    def spatial_of(self, p: int) -> int:
        return p % self.n_spatial_orbitals

    def spin_orbital(self, spatial: int, spin: int) -> int:
        return spatial + spin * self.n_spatial_orbitals


@dataclass(frozen=True)
class FermionOperator:
    """Sum of products of fermionic ladder operators.

    Each term is (coefficient, ((index, is_creation), ...)); no normal
    ordering is assumed or required.
    """

    terms: tuple[tuple[complex, tuple[tuple[int, bool], ...]], ...]

    @classmethod
    def from_terms(cls, terms) -> "FermionOperator":
        return cls(tuple((complex(c), tuple((int(i), bool(dag)) for i, dag in ops))
                         for c, ops in terms))

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        return FermionOperator(self.terms + other.terms)

    def hermitian_conjugate(self) -> "FermionOperator":
        out = []
        for c, ops in self.terms:
            out.append((np.conj(c), tuple((i, not dag) for i, dag in reversed(ops))))
        return FermionOperator(tuple(out))


def jordan_wigner(op: FermionOperator, n_spin_orbitals: int) -> PauliSum:
    """Standard Jordan-Wigner image of a fermionic operator.

    a_p -> (X_p + i Y_p)/2 times a Z chain on all indices below p.
    """
    n = n_spin_orbitals
    result = PauliSum.zero(n)
    for coeff, ops in op.terms:
        term = PauliSum.identity(n, coeff)
        for index, is_creation in ops:
            if not 0 <= index < n:
                raise ValueError(f"spin-orbital index {index} out of range")
            chain = {q: "Z" for q in range(index)}
            x_part = PauliString.from_ops(n, {**chain, index: "X"})
            y_part = PauliString.from_ops(n, {**chain, index: "Y"})
            sign = -0.5j if is_creation else 0.5j
            ladder = PauliSum(n, [(x_part, 0.5), (y_part, sign)])
            term = term * ladder
        result = result + term
    return result


def number_operators(smap: SpinOrbitalMap) -> tuple[PauliSum, PauliSum, PauliSum]:
    """JW images of the total, spin-up, and spin-down electron counters."""
    n = smap.n_spin_orbitals
    m = smap.n_spatial_orbitals

    def counter(indices):
        terms = [(PauliString.identity(n), 0.5 * len(indices))]
        for p in indices:
            terms.append((PauliString.from_ops(n, {p: "Z"}), -0.5))
        return PauliSum(n, terms)

    n_up = counter(range(m))
    n_down = counter(range(m, n))
    return n_up + n_down, n_up, n_down


def reference_determinant_index(smap: SpinOrbitalMap) -> int:
    """Basis index of the determinant with occupied spin-orbitals in |1>."""
    n = smap.n_spin_orbitals
    idx = 0
    for p in smap.occupied:
        idx |= 1 << (n - 1 - p)
    return idx


def reference_state(smap: SpinOrbitalMap) -> np.ndarray:
    psi = np.zeros(1 << smap.n_spin_orbitals, dtype=complex)
    psi[reference_determinant_index(smap)] = 1.0
    return psi


def _spin_orbital_one_body(ints: IntegralSet, smap: SpinOrbitalMap,
                           cutoff: float = 1e-12):
    for p in range(ints.n_spatial_orbitals):
        for q in range(ints.n_spatial_orbitals):
            h = ints.h_pq[p, q]
            if abs(h) <= cutoff:
                continue
            for spin in (0, 1):
                yield h, ((smap.spin_orbital(p, spin), True),
                          (smap.spin_orbital(q, spin), False))


def _spin_orbital_two_body(ints: IntegralSet, smap: SpinOrbitalMap,
                           cutoff: float = 1e-12):
    # Physicists' <PQ|RS> over spatial orbitals is the chemists' (PR|QS);
    # spin conservation pairs P with R and Q with S.
    m = ints.n_spatial_orbitals
    eri = ints.h_pqrs
    for p in range(m):
        for q in range(m):
            for r in range(m):
                for s in range(m):
                    v = eri[p, r, q, s]
                    if abs(v) <= cutoff:
                        continue
                    for sp1 in (0, 1):
                        for sp2 in (0, 1):
                            yield 0.5 * v, ((smap.spin_orbital(p, sp1), True),
                                            (smap.spin_orbital(q, sp2), True),
                                            (smap.spin_orbital(s, sp2), False),
                                            (smap.spin_orbital(r, sp1), False))


def build_final_hamiltonian(ints: IntegralSet, smap: SpinOrbitalMap) -> PauliSum:
    """Qubit image of the second-quantized electronic Hamiltonian plus E_nuc."""
    terms = list(_spin_orbital_one_body(ints, smap))
    terms.extend(_spin_orbital_two_body(ints, smap))
    op = FermionOperator.from_terms(terms)
    h = jordan_wigner(op, smap.n_spin_orbitals)
    h = h + PauliSum.identity(smap.n_spin_orbitals, ints.e_nuclear)
    return h.as_hermitian()


def fock_diagonal(ints: IntegralSet, smap: SpinOrbitalMap) -> np.ndarray:
    """Diagonal Fock elements f_pp per spin-orbital for the RHF reference."""
    m = ints.n_spatial_orbitals
    occ_spatial = sorted({smap.spatial_of(p) for p in smap.occupied})
    f_spatial = np.empty(m)
    for p in range(m):
        f = ints.h_pq[p, p]
        for i in occ_spatial:
            f += 2.0 * ints.h_pqrs[p, p, i, i] - ints.h_pqrs[p, i, i, p]
        f_spatial[p] = f
    return np.concatenate([f_spatial, f_spatial])


def build_mp_hamiltonian(ints: IntegralSet, smap: SpinOrbitalMap) -> PauliSum:
    """Diagonal one-body Fock Hamiltonian sum_p f_pp n_p, plus E_nuc.

    The JW image is identity and single-Z terms only; its ground state over
    the whole register is the reference determinant.
    """
    n = smap.n_spin_orbitals
    f = fock_diagonal(ints, smap)
    terms = [(PauliString.identity(n), 0.5 * float(f.sum()) + ints.e_nuclear)]
    for p in range(n):
        terms.append((PauliString.from_ops(n, {p: "Z"}), -0.5 * f[p]))
    return PauliSum(n, terms)


def hf_eta(ints: IntegralSet, smap: SpinOrbitalMap) -> np.ndarray:
    """Z coefficients of the Fock Hamiltonian: positive on occupied orbitals."""
    return -0.5 * fock_diagonal(ints, smap)


def build_initial_hamiltonian(eta: np.ndarray, smap: SpinOrbitalMap,
                              sign_mask: np.ndarray | None = None) -> PauliSum:
    """1-local driver sum_p eta_p Z_p with a fixed sign pattern.

    By default eta_p > 0 on occupied and eta_p < 0 on virtual spin-orbitals,
    which makes the reference determinant (occupied qubits in |1>, the
    Z = -1 eigenstate) the driver ground state.  Near-degenerate systems can
    have mean-field coefficients that break that pattern on frontier
    orbitals; passing the problem's own sign mask keeps those runs on the
    mean-field initialization while still pinning every sign.
    """
    eta = np.asarray(eta, dtype=float)
    n = smap.n_spin_orbitals
    if eta.shape != (n,):
        raise ValueError("eta length must equal the spin-orbital count")
    if sign_mask is None:
        sign_mask = np.array([1.0 if p in smap.occupied else -1.0
                              for p in range(n)])
    for p in range(n):
        if eta[p] == 0.0:
            raise ValueError(f"eta[{p}] = 0 leaves the ground space degenerate")
        if np.sign(eta[p]) != sign_mask[p]:
            raise ValueError(
                f"eta[{p}] = {eta[p]} breaks the fixed sign pattern "
                "and would change the particle-number sector")
    return PauliSum(n, [(PauliString.from_ops(n, {p: "Z"}), eta[p])
                        for p in range(n)])


def excitation_indices(smap: SpinOrbitalMap):
    """Spin-conserving singles (i, a) and doubles (i, j, a, b) index lists.

    Doubles run over i < j occupied and a < b virtual with matching spin
    multisets; permutation-redundant entries are folded away.
    """
    occ, vir = smap.occupied, smap.virtual
    spin = smap.spin_of
    singles = [(i, a) for i in occ for a in vir if spin(i) == spin(a)]
    doubles = []
    for ii, i in enumerate(occ):
        for j in occ[ii + 1:]:
            for ai, a in enumerate(vir):
                for b in vir[ai + 1:]:
                    if sorted((spin(i), spin(j))) == sorted((spin(a), spin(b))):
                        doubles.append((i, j, a, b))
    return singles, doubles


@dataclass(frozen=True)
class ClusterAmplitudes:
    """Real amplitudes over the folded singles/doubles excitation set."""

    smap: SpinOrbitalMap
    singles: tuple[tuple[int, int], ...]
    doubles: tuple[tuple[int, int, int, int], ...]
    values: np.ndarray = field(compare=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (len(self.singles) + len(self.doubles),):
            raise ValueError("amplitude vector length does not match index sets")
        object.__setattr__(self, "values", vals)
        occ, vir = set(self.smap.occupied), set(self.smap.virtual)
        for i, a in self.singles:
            if i not in occ or a not in vir:
                raise ValueError(f"single ({i}, {a}) is not an occ->vir pair")
        for i, j, a, b in self.doubles:
            if not (i in occ and j in occ and a in vir and b in vir):
                raise ValueError(f"double ({i}, {j}, {a}, {b}) leaves the occ/vir partition")

    @classmethod
    def zeros(cls, smap: SpinOrbitalMap) -> "ClusterAmplitudes":
        singles, doubles = excitation_indices(smap)
        return cls(smap, tuple(singles), tuple(doubles),
                   np.zeros(len(singles) + len(doubles)))

    def with_values(self, values: np.ndarray) -> "ClusterAmplitudes":
        return ClusterAmplitudes(self.smap, self.singles, self.doubles, values)

    def __len__(self):
        return len(self.values)


def excitation_generator(smap: SpinOrbitalMap, indices) -> PauliSum:
    """JW image of one excitation plus its Hermitian conjugate, unit amplitude."""
    if len(indices) == 2:
        i, a = indices
        op = FermionOperator.from_terms([(1.0, ((i, True), (a, False)))])
    else:
        i, j, a, b = indices
        op = FermionOperator.from_terms(
            [(1.0, ((i, True), (j, True), (a, False), (b, False)))])
    op = op + op.hermitian_conjugate()
    return jordan_wigner(op, smap.n_spin_orbitals).as_hermitian()


def build_navigator(theta: ClusterAmplitudes, smap: SpinOrbitalMap) -> PauliSum:
    """Hermitian singles/doubles cluster operator with amplitudes theta."""
    if theta.smap != smap:
        raise ValueError("amplitude index sets belong to a different register")
    result = PauliSum.zero(smap.n_spin_orbitals)
    for t, idx in zip(theta.values, theta.singles + theta.doubles):
        if t == 0.0:
            continue
        result = result + float(t) * excitation_generator(smap, idx)
    return result.as_hermitian()


_FCIDUMP_HEADER = re.compile(r"NORB\s*=\s*(\d+).*?NELEC\s*=\s*(\d+).*?MS2\s*=\s*(-?\d+)",
                             re.DOTALL | re.IGNORECASE)


def parse_fcidump(source) -> IntegralSet:
    """Read an FCIDUMP stream or string into an IntegralSet.

    Accepts the Molpro convention: an &FCI header naming NORB/NELEC/MS2 and
    terminated by &END or /, then `value i j k l` lines with 1-based indices,
    chemists' (ij|kl) two-electron entries, `value i j 0 0` one-electron
    entries, and `value 0 0 0 0` for the scalar.
    """
    text = source if isinstance(source, str) else source.read()
    lines = text.splitlines()

    header_lines = []
    body_start = 0
    for k, line in enumerate(lines):
        header_lines.append(line)
        stripped = line.strip().upper()
        if stripped.endswith("&END") or stripped.endswith("/"):
            body_start = k + 1
            break
    else:
        raise ValueError("FCIDUMP header is not terminated by &END or /")
    header = " ".join(header_lines)
    match = _FCIDUMP_HEADER.search(header)
    if not match:
        raise ValueError("FCIDUMP header must define NORB, NELEC, and MS2")
    norb, nelec, _ms2 = (int(g) for g in match.groups())

    h_pq = np.zeros((norb, norb))
    seen_one = np.zeros((norb, norb), dtype=bool)
    h_pqrs = np.zeros((norb, norb, norb, norb))
    seen_two = np.zeros((norb, norb, norb, norb), dtype=bool)
    e_nuclear = 0.0

    def assign_two(value, i, j, k, l):
        for a, b, c, d in ((i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                           (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)):
            if seen_two[a, b, c, d] and abs(h_pqrs[a, b, c, d] - value) > 1e-8:
                raise ValueError(
                    f"two-electron entry ({a + 1} {b + 1}|{c + 1} {d + 1}) breaks "
                    "8-fold symmetry beyond 1e-8")
            h_pqrs[a, b, c, d] = value
            seen_two[a, b, c, d] = True

    for lineno, raw in enumerate(lines[body_start:], start=body_start + 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise ValueError(f"line {lineno}: expected `value i j k l`")
        try:
            # Fortran writers may use D exponents.
            value = float(parts[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError:
            raise ValueError(f"line {lineno}: malformed numeric fields") from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > norb:
                raise ValueError(f"line {lineno}: orbital index {idx} out of range")
        if i == j == k == l == 0:
            e_nuclear = value
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise ValueError(f"line {lineno}: one-electron entry with a zero index")
            a, b = i - 1, j - 1
            if seen_one[a, b] and abs(h_pq[a, b] - value) > 1e-8:
                raise ValueError(f"line {lineno}: asymmetric one-electron entry")
            h_pq[a, b] = h_pq[b, a] = value
            seen_one[a, b] = seen_one[b, a] = True
        else:
            if 0 in (i, j, k, l):
                raise ValueError(f"line {lineno}: two-electron entry with a zero index")
            assign_two(value, i - 1, j - 1, k - 1, l - 1)

    return IntegralSet(n_spatial_orbitals=norb, n_electrons=nelec,
                       h_pq=h_pq, h_pqrs=h_pqrs, e_nuclear=e_nuclear)
