"""FCIDUMP and metadata-sidecar generation from a geometry."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .basis import build_basis, nuclear_charges
from .fci import fci_ground_energy, reference_energy
from .integrals import ao_integrals, nuclear_repulsion
from .molecules import GeometrySpec
from .scf import mo_integrals, restricted_hartree_fock


@dataclass(frozen=True)
class MolecularData:
    spec: GeometrySpec
    h_mo: np.ndarray          # chemists' convention throughout
    g_mo: np.ndarray
    e_nuclear: float
    hf_energy: float
    fci_energy: float
    orbital_energies: np.ndarray


def compute(spec: GeometrySpec) -> MolecularData:
    atoms = spec.atoms_bohr()
    basis = build_basis(atoms)
    nuclei = nuclear_charges(atoms)
    n_electrons = sum(charge for charge, _ in nuclei) - spec.charge
    s, t, v, g = ao_integrals(basis, nuclei)
    e_nuc = nuclear_repulsion(nuclei)
    scf = restricted_hartree_fock(s, t + v, g, n_electrons, e_nuc)
    h_mo, g_mo = mo_integrals(t + v, g, scf.mo_coefficients)
    n_pair = n_electrons // 2
    e_ref = reference_energy(h_mo, g_mo, n_pair, n_pair, e_nuc)
    if abs(e_ref - scf.energy) > 1e-8:
        raise RuntimeError(
            f"determinant reference energy {e_ref} disagrees with SCF {scf.energy}")
    e_fci = fci_ground_energy(h_mo, g_mo, n_pair, n_pair, e_nuc)
    return MolecularData(spec=spec, h_mo=h_mo, g_mo=g_mo, e_nuclear=e_nuc,
                         hf_energy=scf.energy, fci_energy=e_fci,
                         orbital_energies=scf.orbital_energies)


def write_fcidump(data: MolecularData, stream, cutoff: float = 1e-12) -> None:
    n = data.h_mo.shape[0]
    n_electrons = sum(charge for charge, _ in
                      nuclear_charges(data.spec.atoms_bohr())) - data.spec.charge
    stream.write(f" &FCI NORB={n},NELEC={n_electrons},MS2=0,\n")
    stream.write("  ORBSYM=" + "1," * n + "\n")
    stream.write("  ISYM=1,\n")
    stream.write(" &END\n")
    line = " {value:23.16E} {i:4d} {j:4d} {k:4d} {l:4d}\n"
    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                l_top = j if k == i else k
                for l in range(l_top + 1):
                    value = data.g_mo[i, j, k, l]
                    if abs(value) > cutoff:
                        stream.write(line.format(value=value, i=i + 1, j=j + 1,
                                                 k=k + 1, l=l + 1))
    for i in range(n):
        for j in range(i + 1):
            value = data.h_mo[i, j]
            if abs(value) > cutoff:
                stream.write(line.format(value=value, i=i + 1, j=j + 1, k=0, l=0))
    stream.write(line.format(value=data.e_nuclear, i=0, j=0, k=0, l=0))


def write_sidecar(data: MolecularData, stream, extra: dict | None = None) -> None:
    n = data.h_mo.shape[0]
    n_electrons = sum(charge for charge, _ in
                      nuclear_charges(data.spec.atoms_bohr())) - data.spec.charge
    fields = {
        "molecule": data.spec.name,
        "geometry": data.spec.geometry_line(),
        "basis": data.spec.basis,
        "charge": data.spec.charge,
        "multiplicity": data.spec.multiplicity,
        "n_spatial_orbitals": n,
        "n_electrons": n_electrons,
        "spin_orbital_ordering": "blocked",
        "e_nuclear": repr(float(data.e_nuclear)),
        "hf_energy": repr(float(data.hf_energy)),
        "fci_energy": repr(float(data.fci_energy)),
    }
    if extra:
        fields.update(extra)
    for key, value in fields.items():
        stream.write(f"{key} = {value}\n")


def render(data: MolecularData, extra: dict | None = None) -> tuple[str, str]:
    dump, meta = io.StringIO(), io.StringIO()
    write_fcidump(data, dump)
    write_sidecar(data, meta, extra)
    return dump.getvalue(), meta.getvalue()
