"""Bundled molecular fixtures: FCIDUMP files with metadata sidecars."""

from __future__ import annotations

import pathlib
from dataclasses import dataclass
from importlib import resources

from .fermion import IntegralSet, SpinOrbitalMap, parse_fcidump

# Short aliases for the most-used fixtures.
_ALIASES = {
    "h2": "h2_sto3g_r1.00",
    "lih": "lih_sto3g_r1.00",
}


@dataclass(frozen=True)
class Fixture:
    """A parsed fixture: integrals plus the sidecar metadata."""

    name: str
    integrals: IntegralSet
    metadata: dict[str, str]

    @property
    def smap(self) -> SpinOrbitalMap:
        return SpinOrbitalMap.closed_shell(self.integrals.n_spatial_orbitals,
                                           self.integrals.n_electrons)

    @property
    def hf_energy(self) -> float:
        return float(self.metadata["hf_energy"])

    @property
    def fci_energy(self) -> float:
        return float(self.metadata["fci_energy"])


def parse_sidecar(text: str) -> dict[str, str]:
    """Parse `key = value` lines; later keys win, comments start with #."""
    out: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"malformed sidecar line: {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _data_root():
    return resources.files("vanqver").joinpath("data")


def list_fixtures() -> list[str]:
    names = []
    for entry in _data_root().iterdir():
        if entry.name.endswith(".fcidump"):
            names.append(entry.name[:-len(".fcidump")])
    return sorted(names)


def p4_fixture_name(d: float) -> str:
    return f"p4_sto3g_d{d:.2f}"


def load_fixture(name_or_path: str) -> Fixture:
    """Load a bundled fixture by name/alias, or any FCIDUMP by path.

    A sidecar `<stem>.meta` next to the file is read when present.
    """
    path = pathlib.Path(name_or_path)
    if path.suffix == ".fcidump" or path.exists():
        if not path.exists():
            raise FileNotFoundError(f"fixture file not found: {path}")
        text = path.read_text()
        meta_path = path.with_suffix(".meta")
        metadata = parse_sidecar(meta_path.read_text()) if meta_path.exists() else {}
        return Fixture(path.stem, parse_fcidump(text), metadata)

    name = _ALIASES.get(name_or_path, name_or_path)
    root = _data_root()
    dump = root.joinpath(f"{name}.fcidump")
    if not dump.is_file():
        raise FileNotFoundError(
            f"no bundled fixture {name_or_path!r}; known: {', '.join(list_fixtures())}")
    metadata = {}
    meta = root.joinpath(f"{name}.meta")
    if meta.is_file():
        metadata = parse_sidecar(meta.read_text())
    return Fixture(name, parse_fcidump(dump.read_text()), metadata)
