"""Bundled molecule geometries and the GeometrySpec container."""

from __future__ import annotations

from dataclasses import dataclass

from scipy.constants import physical_constants

ANGSTROM_TO_BOHR = 1e-10 / physical_constants["Bohr radius"][0]


@dataclass(frozen=True)
class GeometrySpec:
    """Element symbols with Cartesian coordinates in Angstroms."""

    name: str
    atoms: tuple[tuple[str, tuple[float, float, float]], ...]
    basis: str = "sto-3g"
    charge: int = 0
    multiplicity: int = 1

    def __post_init__(self):
        if self.charge != 0 or self.multiplicity != 1:
            raise ValueError("only neutral singlets are supported")
        if self.basis != "sto-3g":
            raise ValueError("only the STO-3G basis is supported")

    def atoms_bohr(self):
        return [(symbol, tuple(c * ANGSTROM_TO_BOHR for c in xyz))
                for symbol, xyz in self.atoms]

    def geometry_line(self) -> str:
        return "; ".join(f"{symbol} {x:.6f} {y:.6f} {z:.6f}"
                         for symbol, (x, y, z) in self.atoms)


def h2(bond_length: float = 1.0) -> GeometrySpec:
    return GeometrySpec("h2", (("H", (0.0, 0.0, 0.0)),
                               ("H", (0.0, 0.0, bond_length))))


def p4(d: float, intramolecular: float = 2.0) -> GeometrySpec:
    """Two parallel hydrogen molecules separated by d Angstroms."""
    return GeometrySpec("p4", (("H", (0.0, 0.0, 0.0)),
                               ("H", (0.0, 0.0, intramolecular)),
                               ("H", (d, 0.0, 0.0)),
                               ("H", (d, 0.0, intramolecular))))


def lih(bond_length: float = 1.0) -> GeometrySpec:
    return GeometrySpec("lih", (("Li", (0.0, 0.0, 0.0)),
                                ("H", (0.0, 0.0, bond_length))))
