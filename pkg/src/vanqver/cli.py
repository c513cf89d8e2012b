"""Operator-facing command line: runs, searches, sweeps, and diagnostics.

Configuration comes from `key = value` files plus flags (flags win).  Every
artifact embeds a hash of the effective configuration, and repeated
invocations with the same configuration write byte-identical outputs.
Converged runs are cached in VANQVER_RESULTS_DIR (default ./vanqver_results)
keyed by the fixture digest and run settings, so diagnostics can reuse
optimizer output.
"""

from __future__ import annotations

import hashlib
import json
import os
import pathlib
import sys
from concurrent.futures import ProcessPoolExecutor

import click
import numpy as np

from . import diagnostics, pauli
from .fermion import build_initial_hamiltonian, build_navigator
from .fixtures import list_fixtures, load_fixture
from .schedule import AnnealSpec, Schedule
from .solver import (CHEMICAL_ACCURACY, MolecularProblem, OptimizeConfig,
                     RunRecord, optimize, standard_record,
                     time_to_chemical_accuracy)

_RUN_DEFAULTS = {"mode": "vanqver", "T": 0.1, "tol": 1e-3, "steps": None}

_SWEEP_COLUMNS = ("molecule", "d", "T", "epsilon_tol", "E_final", "E_FCI",
                  "dE", "iterations", "converged", "error")


def _read_config(path: str | None) -> dict:
    if path is None:
        return {}
    text = pathlib.Path(path).read_text()
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise click.UsageError(f"{path}:{lineno}: expected `key = value`")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _effective(config: dict, **flags) -> dict:
    """defaults < config file < explicit flags"""
    merged = dict(_RUN_DEFAULTS)
    for key in merged:
        if key in config:
            merged[key] = config[key]
    merged.update({k: v for k, v in config.items() if k not in merged})
    for key, value in flags.items():
        if value is not None:
            merged[key] = value
    if "T" in merged and merged["T"] is not None:
        merged["T"] = float(merged["T"])
    if merged.get("tol") is not None:
        merged["tol"] = float(merged["tol"])
    if merged.get("steps") not in (None, "", "none"):
        merged["steps"] = int(merged["steps"])
    else:
        merged["steps"] = None
    return merged


def _config_hash(settings: dict) -> str:
    canonical = "\n".join(f"{k} = {settings[k]}" for k in sorted(settings))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _results_dir() -> pathlib.Path:
    return pathlib.Path(os.environ.get("VANQVER_RESULTS_DIR",
                                       "vanqver_results"))


def _fixture_digest(name: str) -> str:
    fx = load_fixture(name)
    payload = json.dumps({"n": fx.integrals.n_spatial_orbitals,
                          "meta": sorted(fx.metadata.items())},
                         sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def _cache_key(fixture: str, mode: str, t_value: float, tol: float | None,
               steps: int | None) -> str:
    blob = f"{_fixture_digest(fixture)}|{mode}|{t_value!r}|{tol!r}|{steps!r}"
    return hashlib.sha256(blob.encode()).hexdigest()[:20]


def _record_payload(record: RunRecord, settings: dict) -> str:
    body = record.to_json_dict()
    body["config_hash"] = _config_hash(settings)
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def _execute_run(fixture: str, mode: str, t_value: float, tol: float,
                 steps: int | None, use_cache: bool,
                 settings: dict) -> tuple[RunRecord | None, str]:
    """Returns (record or None when served from cache, payload JSON)."""
    cache_file = (_results_dir()
                  / f"{_cache_key(fixture, mode, t_value, tol, steps)}.json")
    if use_cache and cache_file.exists():
        return None, cache_file.read_text()
    problem = MolecularProblem.from_fixture(fixture)
    if mode == "standard":
        record = standard_record(problem, t_value, steps)
    else:
        record = optimize(problem, t_value, OptimizeConfig(epsilon_tol=tol),
                          n_time_steps=steps)
    payload = _record_payload(record, settings)
    if use_cache:
        cache_file.parent.mkdir(parents=True, exist_ok=True)
        cache_file.write_text(payload)
    return record, payload


@click.group()
def main():
    """Annealing-time experiments on bundled molecular fixtures."""


@main.command()
@click.option("--fixture", required=True, help="bundled name or FCIDUMP path")
@click.option("--mode", type=click.Choice(["vanqver", "standard"]),
              default=None)
@click.option("--T", "t_value", type=float, default=None,
              help="annealing time (1/hartree)")
@click.option("--tol", type=float, default=None,
              help="optimizer termination tolerance")
@click.option("--steps", type=int, default=None,
              help="override the propagation step count")
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="key = value configuration file")
@click.option("--out", type=click.Path(), default=None,
              help="write the run record JSON here")
@click.option("--dump-hamiltonian", "dump_path", type=click.Path(),
              default=None, help="write the target Hamiltonian as text")
@click.option("--no-cache", is_flag=True, help="bypass the results cache")
def run(fixture, mode, t_value, tol, steps, config_path, out, dump_path,
        no_cache):
    """Run one annealing experiment and report the energy verdict."""
    settings = _effective(_read_config(config_path), fixture=fixture,
                          mode=mode, T=t_value, tol=tol, steps=steps)
    try:
        problem_fixture = settings["fixture"]
    except KeyError:
        raise click.UsageError("a fixture must be named")
    try:
        if dump_path is not None:
            problem = MolecularProblem.from_fixture(problem_fixture)
            pathlib.Path(dump_path).write_text(pauli.dumps(problem.h_fin))
        record, payload = _execute_run(
            problem_fixture, settings["mode"], settings["T"], settings["tol"],
            settings["steps"], not no_cache, settings)
    except FileNotFoundError as exc:
        raise click.UsageError(str(exc))
    except Exception as exc:
        click.echo(f"run failed: {exc}", err=True)
        sys.exit(1)
    body = json.loads(payload)
    if out is not None:
        pathlib.Path(out).write_text(payload)
    e_final, e_fci = body["final_energy"], body["e_fci"]
    delta = e_final - e_fci
    click.echo(f"E_final = {e_final!r}")
    click.echo(f"E_FCI   = {e_fci!r}")
    click.echo(f"dE      = {delta!r}")
    click.echo("chemical accuracy: "
               + ("YES" if abs(delta) <= CHEMICAL_ACCURACY else "NO"))


@main.command()
@click.option("--fixture", required=True)
@click.option("--bracket", nargs=2, type=float, default=(0.01, 1.0),
              help="initial [T_lo, T_hi] bracket")
@click.option("--tol", type=float, default=1e-3)
@click.option("--resolution", type=float, default=0.05,
              help="relative bisection resolution")
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None)
@click.option("--out", type=click.Path(), default=None,
              help="write the report as CSV")
def tca(fixture, bracket, tol, resolution, config_path, out):
    """Search the time to chemical accuracy in both modes and compare."""
    settings = _effective(_read_config(config_path), fixture=fixture, tol=tol)
    settings.update({"bracket": list(bracket), "resolution": resolution})
    try:
        problem = MolecularProblem.from_fixture(fixture)
        results = {}
        for mode in ("vanqver", "standard"):
            results[mode] = time_to_chemical_accuracy(
                problem, mode, OptimizeConfig(epsilon_tol=settings["tol"]),
                bracket=tuple(bracket), resolution=resolution)
            for note in results[mode].notes:
                click.echo(f"[{mode}] {note}", err=True)
    except FileNotFoundError as exc:
        raise click.UsageError(str(exc))
    except Exception as exc:
        click.echo(f"tca failed: {exc}", err=True)
        sys.exit(1)
    ratio = results["standard"].t_ca / results["vanqver"].t_ca
    lines = [f"# config_hash={_config_hash(settings)}",
             "mode,T_CA,non_monotonic"]
    for mode in ("vanqver", "standard"):
        r = results[mode]
        lines.append(f"{mode},{r.t_ca!r},{int(r.non_monotonic)}")
    lines.append(f"ratio_standard_over_vanqver,{ratio!r},")
    text = "\n".join(lines) + "\n"
    if out is not None:
        pathlib.Path(out).write_text(text)
    click.echo(text, nl=False)


def _sweep_point(args) -> dict:
    fixture, variable, value, mode, t_value, tol, steps = args
    try:
        if variable == "distance":
            name = f"p4_sto3g_d{float(value):.2f}"
            problem = MolecularProblem.from_fixture(name)
        else:
            problem = MolecularProblem.from_fixture(fixture)
        run_t = float(value) if variable == "T" else float(t_value)
        run_tol = float(value) if variable == "tolerance" else tol
        if mode == "standard":
            record = standard_record(problem, run_t, steps)
        else:
            record = optimize(problem, run_t,
                              OptimizeConfig(epsilon_tol=run_tol),
                              n_time_steps=steps)
        row = record.summary_row(d=problem.metadata.get("d", ""))
        row["error"] = ""
    except Exception as exc:
        row = {c: "" for c in _SWEEP_COLUMNS}
        row.update({"molecule": fixture, "error": str(exc)})
        if variable == "T":
            row["T"] = value
        elif variable == "distance":
            row["d"] = value
        else:
            row["epsilon_tol"] = value
    return row


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


@main.command()
@click.option("--fixture", default=None,
              help="fixture for T/tolerance sweeps (ignored for distance)")
@click.option("--variable", type=click.Choice(["T", "distance", "tolerance"]),
              required=True)
@click.option("--grid", required=True,
              help="comma-separated grid values, e.g. 0.03,0.04,0.05")
@click.option("--mode", type=click.Choice(["vanqver", "standard"]),
              default="vanqver")
@click.option("--T", "t_value", type=float, default=None,
              help="fixed T for distance/tolerance sweeps")
@click.option("--tol", type=float, default=1e-3)
@click.option("--steps", type=int, default=None)
@click.option("--jobs", type=int, default=1,
              help="worker processes; output order is grid order regardless")
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None)
@click.option("--out", type=click.Path(), default=None)
def sweep(fixture, variable, grid, mode, t_value, tol, steps, jobs,
          config_path, out):
    """Grid of runs; emits one CSV row per point, failures included."""
    config = _read_config(config_path)
    settings = _effective(config, fixture=fixture, mode=mode, T=t_value,
                          tol=tol, steps=steps)
    settings.update({"variable": variable, "grid": grid})
    if variable != "distance" and settings.get("fixture") in (None, ""):
        raise click.UsageError("this sweep variable needs --fixture")
    if variable != "T" and t_value is None and "T" not in config:
        raise click.UsageError("this sweep variable needs a fixed --T")
    try:
        values = [float(v) for v in grid.split(",") if v.strip() != ""]
    except ValueError:
        raise click.UsageError(f"malformed grid {grid!r}")
    tasks = [(settings.get("fixture"), variable, v, settings["mode"],
              settings.get("T"), settings["tol"], settings["steps"])
             for v in values]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    lines = [f"# config_hash={_config_hash(settings)}",
             ",".join(_SWEEP_COLUMNS)]
    for row in rows:
        lines.append(",".join(_format_cell(row.get(c, ""))
                              for c in _SWEEP_COLUMNS))
    text = "\n".join(lines) + "\n"
    if out is not None:
        pathlib.Path(out).write_text(text)
    click.echo(text, nl=False)


def _trace_csv(settings: dict, header: str, pairs) -> str:
    lines = [f"# config_hash={_config_hash(settings)}", header]
    lines.extend(f"{t!r},{v!r}" for t, v in pairs)
    return "\n".join(lines) + "\n"


@main.command()
@click.option("--fixture", required=True)
@click.option("--T", "t_value", type=float, required=True)
@click.option("--tol", type=float, default=1e-3)
@click.option("--steps", type=int, default=None)
@click.option("--samples", type=int, default=65)
@click.option("--plot-data", "out_dir", type=click.Path(), default=".",
              help="directory for the trace CSV files")
@click.option("--bound", is_flag=True, help="also emit the adiabatic bound")
@click.option("--groups", "show_groups", is_flag=True,
              help="list the measurement grouping of the target Hamiltonian")
@click.option("--compare-no-navigator", "compare", is_flag=True,
              help="also emit traces with the navigator switched off")
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None)
def diagnose(fixture, t_value, tol, steps, samples, out_dir, bound,
             show_groups, compare, config_path):
    """Gap and overlap traces for the stored converged parameters."""
    settings = _effective(_read_config(config_path), fixture=fixture,
                          T=t_value, tol=tol, steps=steps)
    settings["samples"] = samples
    try:
        problem = MolecularProblem.from_fixture(settings["fixture"])
    except FileNotFoundError as exc:
        raise click.UsageError(str(exc))
    cache_file = (_results_dir()
                  / (_cache_key(settings["fixture"], "vanqver", settings["T"],
                                settings["tol"], settings["steps"]) + ".json"))
    if cache_file.exists():
        stored = json.loads(cache_file.read_text())
        eta = np.array(stored["final_eta"])
        theta_values = np.array(stored["final_theta"])
    else:
        click.echo("no stored converged parameters for this configuration; "
                   "falling back to theta = 0", err=True)
        eta = np.sign(problem.eta_hf)
        theta_values = np.zeros(len(problem.theta_template))

    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        theta = problem.theta_template.with_values(theta_values)
        h_ini = build_initial_hamiltonian(eta, problem.smap,
                                          sign_mask=np.sign(problem.eta_hf))
        schedule = Schedule(T=settings["T"])
        variants = [("", build_navigator(theta, problem.smap))]
        if compare:
            variants.append(
                ("_nonav", pauli.PauliSum.zero(problem.smap.n_spin_orbitals)))
        from .fermion import reference_state
        psi0 = reference_state(problem.smap)
        written = []
        for suffix, h_nav in variants:
            spec = AnnealSpec.build(h_ini, problem.h_fin, h_nav, schedule,
                                    settings["steps"],
                                    conserved=problem.conserved)
            gap = diagnostics.gap_trace(spec, samples)
            overlap = diagnostics.overlap_trace(spec, psi0, samples)
            gap_path = out / f"gap{suffix}.csv"
            gap_path.write_text(_trace_csv(settings, "t,gap",
                                           gap.samples))
            overlap_path = out / f"overlap{suffix}.csv"
            overlap_path.write_text(_trace_csv(settings, "t,overlap",
                                               overlap.samples))
            written.extend([gap_path, overlap_path])
            if bound:
                trace = diagnostics.adiabatic_bound(spec, samples)
                bound_path = out / f"bound{suffix}.csv"
                bound_path.write_text(_trace_csv(settings, "s,bound",
                                                 trace.samples))
                written.append(bound_path)
        if show_groups:
            grouping = diagnostics.group_commuting(problem.h_fin)
            lines = [f"# config_hash={_config_hash(settings)}",
                     f"# {len(grouping)} groups for {len(problem.h_fin)} terms"]
            for g, group in enumerate(grouping.groups):
                rotations = " ".join(f"q{q}:{r}" for q, r in
                                     sorted(group.rotations.items()))
                lines.append(f"group {g}: rotations [{rotations}]")
                for string, coeff in group.terms:
                    lines.append(f"  {coeff.real!r} {string.letters}")
            groups_path = out / "groups.txt"
            groups_path.write_text("\n".join(lines) + "\n")
            written.append(groups_path)
    except Exception as exc:
        click.echo(f"diagnose failed: {exc}", err=True)
        sys.exit(1)
    for path in written:
        click.echo(str(path))


@main.group()
def fixtures():
    """Bundled fixture inspection."""


@fixtures.command("list")
def fixtures_list():
    """Names and reference energies of every bundled fixture."""
    for name in list_fixtures():
        fx = load_fixture(name)
        click.echo(f"{name}: {fx.integrals.n_spatial_orbitals} orbitals, "
                   f"{fx.integrals.n_electrons} electrons, "
                   f"HF {fx.metadata.get('hf_energy', '?')}, "
                   f"FCI {fx.metadata.get('fci_energy', '?')}")


if __name__ == "__main__":
    main()
