"""One-shot STO-3G fixture generator: integrals, RHF, FCI, FCIDUMP export."""

__version__ = "0.1.0"
