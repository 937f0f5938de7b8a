"""Command-line front door: run, verify, attribute, reference.

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 invalid
experiment result.  Output is deterministic for a fixed config and seed
(JSON keys sorted, no timestamps on stdout).
"""

from __future__ import annotations

import csv
import json
import math
import sys

import click

from . import __version__
from .checks import equation_audit, run_invariant_suite
from .dynamics import HopPulse, run_pulse_interference
from .fock import RegisterLayout, parse_ket
from .oracle import oracle_mode_cap
from .protocols import (
    ExperimentResult,
    RingConfig,
    ancilla_measure,
    experiment_full_controlled_swap,
    experiment_half_swap_interference,
    experiment_ring_rotation,
)
from .reference import (
    COWParams,
    NEUTRON_MASS_KG,
    STANDARD_GRAVITY_MS2,
    cow_phase,
    optical_path_phase,
)

EXPERIMENTS = ("full-swap", "half-swap", "ring", "pulse")


def _parse_statistics(text: str, modes: int) -> RegisterLayout:
    text = text.strip()
    try:
        if text == "fermion":
            return RegisterLayout.fermionic(modes)
        if text == "boson":
            return RegisterLayout.hardcore_bosonic(modes)
        if text.startswith("mixed:"):
            parts = text[len("mixed:"):].split(":")
            if len(parts) > 2:
                raise ValueError("too many ':' sections in mixed statistics")
            assignment = parts[0]
            if len(assignment) != modes:
                raise ValueError(
                    f"mixed assignment {assignment!r} names {len(assignment)} modes, need {modes}"
                )
            overrides = {}
            if len(parts) == 2 and parts[1]:
                for item in parts[1].split(","):
                    pair, sep, value = item.partition("=")
                    if not sep or len(pair) != 2 or value not in ("+1", "-1", "1"):
                        raise ValueError(f"bad statistics override {item!r}, expected e.g. ab=+1")
                    overrides[(pair[0], pair[1])] = -1 if value == "-1" else 1
            return RegisterLayout.mixed(assignment, overrides)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    raise click.UsageError(
        f"unknown statistics {text!r}; use fermion, boson, or mixed:<assignment>[:<pair>=<sign>,...]"
    )


def _parse_pulse(obj) -> HopPulse:
    if not isinstance(obj, dict):
        raise click.UsageError("each pulse must be an object with from/to/theta")
    unknown = set(obj) - {"from", "to", "theta"}
    if unknown:
        raise click.UsageError(f"unknown pulse fields: {sorted(unknown)}")
    try:
        return HopPulse(int(obj["from"]), int(obj["to"]), float(obj["theta"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise click.UsageError(f"bad pulse entry {obj!r}: {exc}") from exc


def _load_schedules(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read schedule file: {exc}") from exc
    if not isinstance(data, dict):
        raise click.UsageError("schedule file must be a JSON object")
    unknown = set(data) - {"initial", "branch0", "branch1"}
    if unknown:
        raise click.UsageError(f"unknown schedule fields: {sorted(unknown)}")
    for key in ("branch0", "branch1"):
        if key not in data or not isinstance(data[key], list):
            raise click.UsageError(f"schedule file needs a {key} array of pulses")
    initial = data.get("initial", "1010")
    return (
        tuple(_parse_pulse(p) for p in data["branch0"]),
        tuple(_parse_pulse(p) for p in data["branch1"]),
        initial,
    )


def _run_named(experiment, modes, fermions, statistics, evaluation, theta, schedule, revolution, seed):
    if experiment in ("full-swap", "half-swap"):
        if fermions is not None:
            raise click.UsageError("--n applies to the ring experiment only")
        if revolution:
            raise click.UsageError("--revolution applies to the ring experiment only")
        modes = 4 if modes is None else modes
        if modes != 4:
            raise click.UsageError(f"{experiment} is defined on 4 modes, got {modes}")
        layout = _parse_statistics(statistics, modes)
        runner = (
            experiment_full_controlled_swap
            if experiment == "full-swap"
            else experiment_half_swap_interference
        )
        return runner(layout, evaluation=evaluation, seed=seed)
    if experiment == "ring":
        if fermions is None:
            raise click.UsageError("ring needs --n (particle count)")
        if evaluation != "sequential":
            raise click.UsageError("ring runs in sequential evaluation only")
        try:
            cfg = RingConfig(fermions)
        except ValueError as exc:
            raise click.UsageError(str(exc)) from exc
        if modes is not None and modes != cfg.modes:
            raise click.UsageError(f"ring with n={fermions} uses {cfg.modes} modes, got --modes {modes}")
        layout = _parse_statistics(statistics, cfg.modes)
        return experiment_ring_rotation(cfg, layout, revolution=revolution, seed=seed)
    # pulse
    if evaluation != "sequential":
        raise click.UsageError("pulse schedules run in sequential evaluation only")
    if schedule is not None and theta is not None:
        raise click.UsageError("--theta and --schedule are mutually exclusive")
    if schedule is not None:
        branch0, branch1, initial = _load_schedules(schedule)
    else:
        angle = math.pi / 2 if theta is None else theta
        branch0 = (HopPulse(1, 2, angle), HopPulse(3, 4, angle))
        branch1 = (HopPulse(1, 4, angle), HopPulse(3, 2, angle))
        initial = "1010"
    try:
        _, width = parse_ket(initial)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    if modes is not None and modes != width:
        raise click.UsageError(f"initial state {initial!r} has {width} modes, got --modes {modes}")
    layout = _parse_statistics(statistics, width)
    try:
        return run_pulse_interference(branch0, branch1, initial, layout, seed=seed)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _emit_run_csv(result: ExperimentResult) -> None:
    writer = csv.writer(sys.stdout)
    writer.writerow(
        [
            "experiment",
            "phase_rad",
            "visibility",
            "branch0_final",
            "branch1_final",
            "x_plus",
            "y_plus",
            "seed",
            "version",
        ]
    )
    writer.writerow(
        [
            result.experiment,
            "" if result.phase_rad is None else repr(result.phase_rad),
            repr(result.visibility),
            result.branch_final[0],
            result.branch_final[1],
            repr(result.probabilities["x_plus"]),
            repr(result.probabilities["y_plus"]),
            "" if result.seed is None else result.seed,
            result.version,
        ]
    )


@click.group()
@click.version_option(version=__version__, prog_name="exchange-lab")
def main():
    """Exchange-phase interference laboratory."""


@main.command("run")
@click.argument("experiment", type=click.Choice(EXPERIMENTS))
@click.option("--modes", type=int, default=None, help="Register width (experiment default if omitted).")
@click.option("--n", "fermions", type=int, default=None, help="Ring particle count.")
@click.option("--statistics", default="fermion", show_default=True,
              help="fermion | boson | mixed:<assignment>[:<pair>=<sign>,...]")
@click.option("--mode", "evaluation", type=click.Choice(["literal", "sequential"]),
              default="sequential", show_default=True, help="Branch evaluation convention.")
@click.option("--theta", type=float, default=None, help="Pulse angle (pulse experiment).")
@click.option("--shots", type=int, default=None, help="Sampled ancilla readout count.")
@click.option("--seed", type=int, default=None, help="RNG seed (required with --shots).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--schedule", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON pulse schedule file (pulse experiment).")
@click.option("--revolution", is_flag=True, default=False,
              help="Ring: full 2n-step revolution instead of a single-site step.")
def cmd_run(experiment, modes, fermions, statistics, evaluation, theta, shots, seed, fmt, schedule, revolution):
    """Run a named experiment and emit its serialized result."""
    if shots is not None and seed is None:
        raise click.UsageError("--shots requires --seed (deterministic readout contract)")
    if theta is not None and experiment != "pulse":
        raise click.UsageError("--theta applies to the pulse experiment only")
    if schedule is not None and experiment != "pulse":
        raise click.UsageError("--schedule applies to the pulse experiment only")
    result = _run_named(
        experiment, modes, fermions, statistics, evaluation, theta, schedule, revolution, seed
    )
    if not result.valid:
        click.echo("error: a branch annihilated to the zero vector; no interference result", err=True)
        sys.exit(3)
    if shots is not None:
        result.probabilities = dict(result.probabilities)
        result.probabilities["shots"] = shots
        result.probabilities["x_plus_count"] = ancilla_measure(result, "X", shots, seed)["+"]
        result.probabilities["y_plus_count"] = ancilla_measure(result, "Y", shots, seed)["+"]
    if fmt == "json":
        click.echo(result.to_json())
    else:
        _emit_run_csv(result)


@main.command("verify")
@click.option("--modes", type=int, default=8, show_default=True)
@click.option("--trials", type=int, default=500, show_default=True)
@click.option("--seed", type=int, default=1, show_default=True)
def cmd_verify(modes, trials, seed):
    """Cross-check the fast path against the dense oracle and run all invariants."""
    cap = oracle_mode_cap()
    if modes < 2:
        raise click.UsageError("--modes must be at least 2")
    if modes > cap:
        raise click.UsageError(
            f"--modes {modes} exceeds the dense-oracle cap of {cap}"
            " (raise it via EXCHANGE_LAB_ORACLE_MAX_MODES)"
        )
    if trials < 0:
        raise click.UsageError("--trials must be nonnegative")
    outcomes = run_invariant_suite(modes=modes, trials=trials, seed=seed)
    for outcome in outcomes:
        click.echo(outcome.line())
    _, audit_lines = equation_audit()
    for line in audit_lines:
        click.echo(line)
    if all(outcome.passed for outcome in outcomes):
        click.echo(f"VERIFY PASS ({len(outcomes)} checks)")
    else:
        failed = [o.name for o in outcomes if not o.passed]
        click.echo(f"VERIFY FAIL ({', '.join(failed)})")
        sys.exit(1)


@main.command("attribute")
@click.argument("experiment", type=click.Choice(EXPERIMENTS))
@click.option("--modes", type=int, default=None)
@click.option("--n", "fermions", type=int, default=None)
@click.option("--statistics", default="fermion", show_default=True)
@click.option("--mode", "evaluation", type=click.Choice(["literal", "sequential"]),
              default="sequential", show_default=True)
@click.option("--theta", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="csv", show_default=True)
@click.option("--schedule", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--revolution", is_flag=True, default=False)
def cmd_attribute(experiment, modes, fermions, statistics, evaluation, theta, seed, fmt, schedule, revolution):
    """Emit the per-hop sign ledger table of a sequential experiment."""
    if evaluation != "sequential":
        raise click.UsageError(
            "attribute needs sequential evaluation; literal strings have no per-hop locality"
        )
    result = _run_named(
        experiment, modes, fermions, statistics, evaluation, theta, schedule, revolution, seed
    )
    if not result.valid:
        click.echo("error: a branch annihilated to the zero vector; nothing to attribute", err=True)
        sys.exit(3)
    labels = result.params.get("branches", ["branch0", "branch1"])
    rows = []
    for label, ledger in zip(labels, result.ledgers):
        for entry in ledger:
            rows.append(
                {
                    "branch": label,
                    "step": entry.step,
                    "op": entry.op,
                    "from": "" if entry.src is None else entry.src,
                    "to": "" if entry.dst is None else entry.dst,
                    "interval_parity": entry.interval_parity,
                    "sign": entry.sign,
                    "wrap": entry.wrap,
                }
            )
    products = [ledger.sign_product() for ledger in result.ledgers]
    if fmt == "json":
        click.echo(
            json.dumps(
                {
                    "experiment": result.experiment,
                    "rows": rows,
                    "branch_sign_products": products,
                    "phase_rad": result.phase_rad,
                },
                sort_keys=True,
            )
        )
        return
    writer = csv.writer(sys.stdout)
    header = ["branch", "step", "op", "from", "to", "interval_parity", "sign", "wrap"]
    writer.writerow(header)
    for row in rows:
        writer.writerow([row[key] for key in header])
    for label, product in zip(labels, products):
        writer.writerow([label, "", "branch-sign-product", "", "", "", product, ""])
    phase_cell = "" if result.phase_rad is None else repr(result.phase_rad)
    writer.writerow(["", "", "relative-phase-rad", "", "", "", phase_cell, ""])


@main.command("reference")
@click.argument("source", type=click.File("r"), default="-")
def cmd_reference(source):
    """Evaluate a reference interferometer phase formula (JSON in, JSON out).

    Input is {"kind": "optical-path", "profile1": [[dx, n], ...],
    "profile2": [...], "wavelength_m": ...} or {"kind": "cow",
    "mass_kg": ..., "gravity_ms2": ..., "height_m": ..., "time_s": ...}
    (cow mass/gravity default to the neutron mass and standard gravity).
    """
    try:
        payload = json.load(source)
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"invalid JSON input: {exc}") from exc
    if not isinstance(payload, dict) or "kind" not in payload:
        raise click.UsageError('input must be a JSON object with a "kind" field')
    kind = payload.pop("kind")
    try:
        if kind == "optical-path":
            unknown = set(payload) - {"profile1", "profile2", "wavelength_m"}
            if unknown:
                raise click.UsageError(f"unknown fields: {sorted(unknown)}")
            phase = optical_path_phase(
                payload.get("profile1", []),
                payload.get("profile2", []),
                payload["wavelength_m"],
            )
        elif kind == "cow":
            unknown = set(payload) - {"mass_kg", "gravity_ms2", "height_m", "time_s"}
            if unknown:
                raise click.UsageError(f"unknown fields: {sorted(unknown)}")
            phase = cow_phase(
                COWParams(
                    mass_kg=payload.get("mass_kg", NEUTRON_MASS_KG),
                    gravity_ms2=payload.get("gravity_ms2", STANDARD_GRAVITY_MS2),
                    height_m=payload.get("height_m", 0.0),
                    time_s=payload.get("time_s", 0.0),
                )
            )
        else:
            raise click.UsageError(f"unknown kind {kind!r}; use optical-path or cow")
    except (KeyError, TypeError, ValueError) as exc:
        raise click.UsageError(f"bad reference input: {exc}") from exc
    click.echo(json.dumps({"kind": kind, "phase_rad": phase}, sort_keys=True))


if __name__ == "__main__":
    main()
