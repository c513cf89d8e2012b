"""Command-line fixture generator: geometry -> FCIDUMP + metadata sidecar."""

from __future__ import annotations

import argparse
import pathlib
import sys

from . import fcidump, molecules


def fixture_stem(molecule: str, d: float | None) -> str:
    if molecule == "p4":
        return f"p4_sto3g_d{d:.2f}"
    return f"{molecule}_sto3g_r1.00"


def generate(molecule: str, d: float | None, out_dir: pathlib.Path) -> pathlib.Path:
    if molecule == "h2":
        spec = molecules.h2()
        extra = {}
    elif molecule == "lih":
        spec = molecules.lih()
        extra = {}
    elif molecule == "p4":
        if d is None:
            raise ValueError("p4 requires the intermolecular distance --d")
        spec = molecules.p4(d)
        extra = {"d": f"{d:.2f}"}
    else:
        raise ValueError(f"unknown molecule {molecule!r}")

    data = fcidump.compute(spec)
    dump_text, meta_text = fcidump.render(data, extra)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = fixture_stem(molecule, d)
    dump_path = out_dir / f"{stem}.fcidump"
    dump_path.write_text(dump_text)
    (out_dir / f"{stem}.meta").write_text(meta_text)
    return dump_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="integralgen",
        description="Generate STO-3G FCIDUMP fixtures with HF/FCI sidecars.")
    sub = parser.add_subparsers(dest="command", required=True)
    gen = sub.add_parser("generate", help="generate one fixture")
    gen.add_argument("--molecule", required=True, choices=("h2", "p4", "lih"))
    gen.add_argument("--d", type=float, default=None,
                     help="P4 intermolecular separation in Angstroms")
    gen.add_argument("--out", type=pathlib.Path, required=True,
                     help="output directory")
    args = parser.parse_args(argv)

    try:
        path = generate(args.molecule, args.d, args.out)
    except Exception as exc:  # surface backend failures verbatim
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
