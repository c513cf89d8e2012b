"""STO-3G basis data and contracted Cartesian Gaussian construction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Standard STO-3G parameters: (exponents, contraction coefficients) per shell.
# SP shells share exponents between the 2s and 2p contractions.
STO3G = {
    "H": {
        "shells": [
            ("s", (3.425250914, 0.6239137298, 0.1688554040),
             (0.1543289673, 0.5353281423, 0.4446345422)),
        ],
        "charge": 1,
    },
    "Li": {
        "shells": [
            ("s", (16.11957475, 2.936200663, 0.7946504870),
             (0.1543289673, 0.5353281423, 0.4446345422)),
            ("s", (0.6362897469, 0.1478600533, 0.04808867840),
             (-0.09996722919, 0.3995128261, 0.7001154689)),
            ("p", (0.6362897469, 0.1478600533, 0.04808867840),
             (0.1559162750, 0.6076837186, 0.3919573931)),
        ],
        "charge": 3,
    },
}


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def primitive_norm(alpha: float, lmn: tuple[int, int, int]) -> float:
    l, m, n = lmn
    num = (2.0 * alpha / np.pi) ** 1.5 * (4.0 * alpha) ** (l + m + n)
    den = (_double_factorial(2 * l - 1) * _double_factorial(2 * m - 1)
           * _double_factorial(2 * n - 1))
    return np.sqrt(num / den)


@dataclass(frozen=True)
class BasisFunction:
    """Contracted Cartesian Gaussian with normalized primitives.

    ``coefs`` already include the primitive norms and the overall contraction
    normalization, so matrix elements need no further scaling.
    """

    origin: tuple[float, float, float]
    lmn: tuple[int, int, int]
    exps: tuple[float, ...]
    coefs: tuple[float, ...]


def make_basis_function(origin, lmn, exps, contraction) -> BasisFunction:
    from .integrals import primitive_overlap

    coefs = [c * primitive_norm(a, lmn) for a, c in zip(exps, contraction)]
    self_overlap = 0.0
    for ai, ci in zip(exps, coefs):
        for aj, cj in zip(exps, coefs):
            self_overlap += ci * cj * primitive_overlap(
                ai, lmn, origin, aj, lmn, origin)
    scale = 1.0 / np.sqrt(self_overlap)
    return BasisFunction(tuple(origin), tuple(lmn), tuple(exps),
                         tuple(c * scale for c in coefs))


_P_COMPONENTS = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def build_basis(atoms_bohr) -> list[BasisFunction]:
    """Basis functions for a list of (element, xyz-in-bohr) atoms."""
    functions = []
    for element, xyz in atoms_bohr:
        if element not in STO3G:
            raise ValueError(f"no STO-3G parameters for element {element!r}")
        for kind, exps, contraction in STO3G[element]["shells"]:
            if kind == "s":
                functions.append(make_basis_function(xyz, (0, 0, 0), exps, contraction))
            elif kind == "p":
                for lmn in _P_COMPONENTS:
                    functions.append(make_basis_function(xyz, lmn, exps, contraction))
            else:
                raise ValueError(f"unsupported shell type {kind!r}")
    return functions


def nuclear_charges(atoms_bohr) -> list[tuple[int, tuple[float, float, float]]]:
    return [(STO3G[element]["charge"], tuple(xyz)) for element, xyz in atoms_bohr]
