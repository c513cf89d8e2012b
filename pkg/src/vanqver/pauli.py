"""Exact algebra for weighted sums of n-qubit Pauli strings.

Tensor-ordering convention used by the whole package: qubit 0 is the leftmost
Kronecker factor, i.e. the most significant bit of a computational-basis
index.  Every module that touches matrices or state vectors relies on this.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

# Coefficients below this magnitude are dropped when sums are simplified:
# far below chemical accuracy (1.5e-3 hartree) yet large enough to absorb
# exact-cancellation round-off.
PRUNE_THRESHOLD = 1e-12

# Dense realizations above this qubit count are refused (2^14 = 16384).
MATRIX_QUBIT_CAP = 14

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {bits: letter for letter, bits in _LETTER_BITS.items()}
_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def _parity_signs(masked: np.ndarray) -> np.ndarray:
    """(-1)**popcount(masked), elementwise."""
    return 1.0 - 2.0 * (np.bitwise_count(masked.astype(np.uint64)) & 1)


@dataclass(frozen=True, slots=True)
class PauliString:
    """Tensor product of single-qubit Pauli operators I, X, Y, Z.

    Stored as X/Z bitmasks over basis-index bit positions: qubit p occupies
    bit (n_qubits - 1 - p), so the string maps basis index b to b ^ x_mask
    up to a phase.
    """

    n_qubits: int
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be a positive integer")
        top = 1 << self.n_qubits
        if not (0 <= self.x_mask < top and 0 <= self.z_mask < top):
            raise ValueError("bitmask out of range for qubit count")

    @classmethod
    def from_letters(cls, letters: str) -> "PauliString":
        x = z = 0
        n = len(letters)
        for p, ch in enumerate(letters):
            try:
                xb, zb = _LETTER_BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {ch!r}") from None
            bit = 1 << (n - 1 - p)
            x |= xb * bit
            z |= zb * bit
        return cls(n, x, z)

    @classmethod
    def from_ops(cls, n_qubits: int, ops: dict[int, str]) -> "PauliString":
        """Build from a sparse {qubit index: letter} mapping."""
        x = z = 0
        for p, ch in ops.items():
            if not 0 <= p < n_qubits:
                raise ValueError(f"qubit index {p} out of range")
            xb, zb = _LETTER_BITS[ch]
            bit = 1 << (n_qubits - 1 - p)
            x |= xb * bit
            z |= zb * bit
        return cls(n_qubits, x, z)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits)

    @property
    def letters(self) -> str:
        out = []
        for p in range(self.n_qubits):
            bit = 1 << (self.n_qubits - 1 - p)
            out.append(_BITS_LETTER[(int(bool(self.x_mask & bit)),
                                     int(bool(self.z_mask & bit)))])
        return "".join(out)

    @property
    def weight(self) -> int:
        """Number of non-identity factors."""
        return (self.x_mask | self.z_mask).bit_count()

    @property
    def y_count(self) -> int:
        return (self.x_mask & self.z_mask).bit_count()

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n complex matrix under the package ordering."""
        if self.n_qubits > MATRIX_QUBIT_CAP:
            raise ValueError(
                f"{self.n_qubits} qubits exceeds the dense cap of {MATRIX_QUBIT_CAP}")
        dim = 1 << self.n_qubits
        idx = np.arange(dim)
        m = np.zeros((dim, dim), dtype=complex)
        m[idx ^ self.x_mask, idx] = (_I_POWERS[self.y_count % 4]
                                     * _parity_signs(idx & self.z_mask))
        return m

    def __repr__(self):
        return f"PauliString({self.letters!r})"


def _check_compatible(a, b):
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit-count mismatch: {a.n_qubits} vs {b.n_qubits}")


def multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Operator product a . b as (phase, string) with phase in {1, i, -1, -i}."""
    _check_compatible(a, b)
    x = a.x_mask ^ b.x_mask
    z = a.z_mask ^ b.z_mask
    k = (a.y_count + b.y_count - (x & z).bit_count()
         + 2 * (a.z_mask & b.x_mask).bit_count()) % 4
    return _I_POWERS[k], PauliString(a.n_qubits, x, z)


def commutes(a: PauliString, b: PauliString, mode: str = "full") -> bool:
    """Whether two strings commute.

    ``full`` is the exact operator test; ``qubit-wise`` demands that every
    per-qubit pair of letters commutes, which is sufficient but not
    necessary for full commutation.
    """
    _check_compatible(a, b)
    if mode == "full":
        return ((a.x_mask & b.z_mask).bit_count()
                + (a.z_mask & b.x_mask).bit_count()) % 2 == 0
    if mode == "qubit-wise":
        differ = (a.x_mask ^ b.x_mask) | (a.z_mask ^ b.z_mask)
        both_active = (a.x_mask | a.z_mask) & (b.x_mask | b.z_mask)
        return differ & both_active == 0
    raise ValueError(f"unknown commutation mode {mode!r}")


class PauliSum:
    """Weighted sum of Pauli strings on a fixed qubit register.

    Immutable after construction; all arithmetic returns new sums with like
    terms merged and coefficients below PRUNE_THRESHOLD removed.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits: int, terms=None):
        if n_qubits < 1:
            raise ValueError("n_qubits must be a positive integer")
        merged: dict[PauliString, complex] = {}
        if terms is not None:
            items = terms.items() if hasattr(terms, "items") else terms
            for string, coeff in items:
                if string.n_qubits != n_qubits:
                    raise ValueError("term qubit count differs from sum qubit count")
                c = merged.get(string, 0.0) + complex(coeff)
                if c == 0.0:
                    merged.pop(string, None)
                else:
                    merged[string] = c
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "_terms",
                           {s: c for s, c in merged.items() if abs(c) > PRUNE_THRESHOLD})

    def __setattr__(self, name, value):
        raise AttributeError("PauliSum is immutable")

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits)

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(n_qubits, [(PauliString.identity(n_qubits), coeff)])

    @property
    def terms(self):
        return MappingProxyType(self._terms)

    def coefficient(self, string: PauliString) -> complex:
        return self._terms.get(string, 0.0)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __eq__(self, other):
        return (isinstance(other, PauliSum)
                and self.n_qubits == other.n_qubits
                and self._terms == other._terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        _check_compatible(self, other)
        merged = dict(self._terms)
        for s, c in other._terms.items():
            merged[s] = merged.get(s, 0.0) + c
        return PauliSum(self.n_qubits, merged)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            _check_compatible(self, other)
            acc: dict[PauliString, complex] = {}
            for sa, ca in self._terms.items():
                for sb, cb in other._terms.items():
                    phase, prod = multiply(sa, sb)
                    acc[prod] = acc.get(prod, 0.0) + ca * cb * phase
            return PauliSum(self.n_qubits, acc)
        return PauliSum(self.n_qubits,
                        [(s, c * other) for s, c in self._terms.items()])

    def __rmul__(self, scalar):
        return self.__mul__(scalar)

    @property
    def one_norm(self) -> float:
        """Sum of coefficient magnitudes."""
        return float(sum(abs(c) for c in self._terms.values()))

    @property
    def is_diagonal(self) -> bool:
        """True when every term is a product of Z and I factors only."""
        return all(s.x_mask == 0 for s in self._terms)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def as_hermitian(self, tol: float = 1e-10) -> "PauliSum":
        """Assert real coefficients (within tol) and drop the residues."""
        residue = max((abs(c.imag) for c in self._terms.values()), default=0.0)
        if residue > tol:
            raise ValueError(
                f"sum is not Hermitian: imaginary residue {residue:.3e} exceeds {tol:.1e}")
        return PauliSum(self.n_qubits,
                        [(s, c.real) for s, c in self._terms.items()])

    def diagonal(self, indices: np.ndarray | None = None) -> np.ndarray:
        """Diagonal of the matrix realization, restricted to basis ``indices``.

        Only defined for Z/I sums (real diagonal).
        """
        if not self.is_diagonal:
            raise ValueError("diagonal() requires a Z/I-only sum")
        if indices is None:
            indices = np.arange(1 << self.n_qubits)
        out = np.zeros(len(indices))
        for s, c in self._terms.items():
            if abs(c.imag) > 1e-10:
                raise ValueError("diagonal() requires real coefficients")
            out += c.real * _parity_signs(indices & s.z_mask)
        return out

    def __repr__(self):
        inner = ", ".join(f"{s.letters}: {c:.6g}"
                          for s, c in sorted(self._terms.items(),
                                             key=lambda kv: kv[0].letters)[:6])
        more = "" if len(self) <= 6 else f", ... ({len(self)} terms)"
        return f"PauliSum({self.n_qubits} qubits, {{{inner}{more}}})"


def add(a: PauliSum, b: PauliSum) -> PauliSum:
    return a + b


def to_matrix(h: PauliSum, cap: int = MATRIX_QUBIT_CAP) -> np.ndarray:
    """Dense 2^n x 2^n matrix of a PauliSum under the package ordering."""
    if h.n_qubits > cap:
        raise ValueError(f"{h.n_qubits} qubits exceeds the dense cap of {cap}")
    dim = 1 << h.n_qubits
    idx = np.arange(dim)
    m = np.zeros((dim, dim), dtype=complex)
    for s, c in h.terms.items():
        m[idx ^ s.x_mask, idx] += (c * _I_POWERS[s.y_count % 4]
                                   * _parity_signs(idx & s.z_mask))
    return m


def expectation_of_string(s: PauliString, state: np.ndarray,
                          norm_tol: float = 1e-8) -> float:
    """<state| s |state> for a normalized state vector."""
    state = np.asarray(state)
    if state.shape != (1 << s.n_qubits,):
        raise ValueError("state dimension does not match qubit count")
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > norm_tol:
        raise ValueError(f"state norm {norm} deviates from 1 beyond {norm_tol}")
    idx = np.arange(len(state))
    amp = (_I_POWERS[s.y_count % 4] * _parity_signs(idx & s.z_mask)) * state
    val = np.sum(np.conj(state[idx ^ s.x_mask]) * amp)
    return float(val.real)


def dumps(h: PauliSum) -> str:
    """Line-oriented text form: one `<coeff_re> <coeff_im> <letters>` per line."""
    lines = []
    for s in sorted(h.terms, key=lambda t: t.letters):
        c = h.terms[s]
        lines.append(f"{c.real!r} {c.imag!r} {s.letters}")
    return "\n".join(lines) + ("\n" if lines else "")


def loads(text: str) -> PauliSum:
    """Parse the dumps() format back into a PauliSum."""
    terms = []
    n_qubits = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected `re im letters`")
        re_c, im_c, letters = parts
        if n_qubits is None:
            n_qubits = len(letters)
        elif len(letters) != n_qubits:
            raise ValueError(f"line {lineno}: inconsistent qubit count")
        terms.append((PauliString.from_letters(letters),
                      complex(float(re_c), float(im_c))))
    if n_qubits is None:
        raise ValueError("no terms found")
    return PauliSum(n_qubits, terms)
