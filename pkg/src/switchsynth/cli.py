"""Command-line front end: load a JSON run config, synthesise, write CSV/JSON.

Usage::

    switchsynth run --config example.json --out-dir out/
    switchsynth run --example example1 --strategy pointwise --out-dir out/
    switchsynth examples

Set ``SWITCHSYNTH_LOG_LEVEL`` (e.g. ``DEBUG``) for more logging.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .analysis import DEFAULT_MS_THRESHOLD, compare_areas, spectral_radii, verify_ms_stability
from .errors import ConfigurationError, SwitchSynthError, SynthesisError
from .quadrotor import QuadrotorParams, build_quadrotor_jump_system
from .synthesis import STRATEGIES, SynthesisConfig, synthesize
from .system_model import GaussianBelief, JumpSystem, PlantWithControllers, build_closed_loop, simulate_schedule
from .wasserstein import w2_gaussian_dirac

log = logging.getLogger("switchsynth")

SYSTEM_SOURCES = ("modes", "plant", "quadrotor")
TOP_LEVEL_KEYS = {"name", "description", "initial", "synthesis", "output", *SYSTEM_SOURCES}
SYNTHESIS_KEYS = {
    "strategy": "strategy",
    "horizon": "horizon_T",
    "dk": "dk",
    "gamma": "epsilon_gamma",
    "max_horizon_growth": "max_horizon_growth",
    "total_steps": "total_steps",
}
DEFAULT_OUTPUTS = {"trajectory": "trajectory.csv", "summary": "summary.json"}

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_SYNTHESIS = 3


@dataclass(frozen=True)
class RunConfig:
    name: str
    source: str
    system: JumpSystem
    initial: GaussianBelief
    synthesis: SynthesisConfig
    outputs: dict
    ms_threshold: float = DEFAULT_MS_THRESHOLD


def bundled_examples() -> list[str]:
    files = resources.files("switchsynth").joinpath("configs").iterdir()
    return sorted(p.name[:-5] for p in files if p.name.endswith(".json"))


def bundled_config_path(name: str):
    if name not in bundled_examples():
        raise ConfigurationError(f"no bundled example {name!r}; available: {', '.join(bundled_examples())}")
    return resources.files("switchsynth").joinpath("configs", f"{name}.json")


def load_config(path) -> RunConfig:
    path = Path(path) if not hasattr(path, "read_text") else path
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    return parse_config(data, default_name=Path(str(path)).stem)


def _matrix_list(value, field):
    if not isinstance(value, list) or not value:
        raise ConfigurationError(f"{field}: expected a non-empty list of matrices")
    return value


def _build_system(data) -> tuple[str, JumpSystem]:
    present = [key for key in SYSTEM_SOURCES if key in data]
    if len(present) != 1:
        found = ", ".join(present) if present else "none"
        raise ConfigurationError(
            f"config must contain exactly one system source ({', '.join(SYSTEM_SOURCES)}); found {found}"
        )
    source = present[0]
    if source == "modes":
        return source, JumpSystem(_matrix_list(data["modes"], "modes"))
    if source == "plant":
        plant = data["plant"]
        if not isinstance(plant, dict) or {"A", "B", "gains"} - set(plant):
            raise ConfigurationError("plant: expected an object with fields A, B and gains")
        gains = _matrix_list(plant["gains"], "plant.gains")
        return source, build_closed_loop(PlantWithControllers(plant["A"], plant["B"], tuple(gains)))
    quad = data["quadrotor"]
    if not isinstance(quad, dict) or {"params", "gains", "dt"} - set(quad):
        raise ConfigurationError("quadrotor: expected an object with fields params, gains and dt")
    if not isinstance(quad["params"], dict):
        raise ConfigurationError("quadrotor.params: expected an object")
    params = QuadrotorParams.from_dict(quad["params"])
    gains = _matrix_list(quad["gains"], "quadrotor.gains")
    dt = quad["dt"]
    if not isinstance(dt, (int, float)) or not dt > 0:
        raise ConfigurationError(f"quadrotor.dt: must be a positive number, got {dt!r}")
    return source, build_quadrotor_jump_system(params, gains, float(dt))


def parse_config(data, default_name: str = "run") -> RunConfig:
    """Validate a decoded JSON config and build a :class:`RunConfig`."""
    if not isinstance(data, dict):
        raise ConfigurationError("config: top level must be a JSON object")
    unknown = set(data) - TOP_LEVEL_KEYS
    if unknown:
        raise ConfigurationError(f"config: unknown field(s) {', '.join(sorted(unknown))}")
    source, system = _build_system(data)

    initial = data.get("initial")
    if not isinstance(initial, dict) or {"mu", "sigma"} - set(initial):
        raise ConfigurationError("initial: expected an object with fields mu and sigma")
    try:
        belief = GaussianBelief(initial["mu"], initial["sigma"])
    except ConfigurationError as exc:
        raise ConfigurationError(f"initial.{exc}") from None
    if belief.n != system.n:
        raise ConfigurationError(f"initial.mu: dimension {belief.n} does not match system dimension {system.n}")

    synth = data.get("synthesis", {})
    if not isinstance(synth, dict):
        raise ConfigurationError("synthesis: expected an object")
    unknown = set(synth) - set(SYNTHESIS_KEYS)
    if unknown:
        raise ConfigurationError(f"synthesis: unknown field(s) {', '.join(sorted(unknown))}")
    try:
        config = SynthesisConfig(**{SYNTHESIS_KEYS[k]: v for k, v in synth.items()})
    except ConfigurationError as exc:
        raise ConfigurationError(f"synthesis.{exc}") from None

    outputs = dict(DEFAULT_OUTPUTS)
    outputs.update(data.get("output", {}))
    if set(outputs) != set(DEFAULT_OUTPUTS):
        raise ConfigurationError(f"output: allowed fields are {', '.join(DEFAULT_OUTPUTS)}")
    return RunConfig(str(data.get("name", default_name)), source, system, belief, config, outputs)


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def trajectory_rows(system, initial, report):
    """CSV header and rows ``k, time, mode, w2, mu_1..mu_n, trace_sigma``."""
    steps = report.schedule.total_steps
    beliefs = simulate_schedule(system, initial, report.schedule, steps)
    seq = report.schedule.modes_per_step()
    dk = report.trace.dk
    header = ["k", "time", "mode", "w2", *(f"mu_{i + 1}" for i in range(system.n)), "trace_sigma"]
    rows = []
    for k, belief in enumerate(beliefs):
        mode = str(int(seq[k]) + 1) if k < steps else ""
        rows.append([
            str(k),
            _fmt(k * dk),
            mode,
            _fmt(w2_gaussian_dirac(belief)),
            *(_fmt(v) for v in belief.mu),
            _fmt(np.trace(belief.sigma)),
        ])
    return header, rows


def build_summary(config: RunConfig, report) -> dict:
    synth = config.synthesis
    gamma = synth.epsilon_gamma if report.strategy == "receding_horizon" else 0.0
    verdict = verify_ms_stability(report.trace, report.schedule.jump_times, config.ms_threshold, gamma)
    comparison = compare_areas(report.per_mode_areas, report.switched_area)
    return {
        "name": config.name,
        "strategy": report.strategy,
        "n": config.system.n,
        "m": config.system.m,
        "total_steps": report.schedule.total_steps,
        "dk": synth.dk,
        "horizon": synth.horizon_T,
        "gamma": synth.epsilon_gamma,
        "initial_w2": float(report.trace.values[0]),
        "spectral_radii": {str(i + 1): r for i, r in enumerate(spectral_radii(config.system))},
        "per_mode_areas": {str(i + 1): a for i, a in sorted(report.per_mode_areas.items())},
        "best_constant_mode": comparison.best_mode + 1,
        "best_constant_area": comparison.best_constant_area,
        "switched_area": comparison.switched_area,
        "area_ratio": comparison.ratio,
        "schedule": [[t, i + 1] for t, i in report.schedule.entries],
        "stability": {
            "verdict": verdict.stable,
            "terminal_w2": verdict.terminal_w2,
            "threshold": verdict.threshold,
            "violating_jump_time": verdict.violating_index,
            "reason": verdict.reason,
        },
        "truncation_converged": report.truncation_converged,
        "constraint_log": [
            {
                "jump_time": rec.jump_time,
                "horizon": rec.horizon,
                "chosen_mode": None if rec.chosen_mode is None else rec.chosen_mode + 1,
                "satisfied": rec.satisfied,
                "reference_w2": rec.reference_w2,
                "margin": rec.margin,
                "costs": {str(i + 1): c for i, c in enumerate(rec.costs)},
                "end_w2": {str(i + 1): e for i, e in enumerate(rec.end_w2)},
                "feasible": {str(i + 1): f for i, f in enumerate(rec.feasible)},
            }
            for rec in report.constraint_log
        ],
    }


def run(config: RunConfig, out_dir) -> dict:
    """Synthesise per ``config`` and write the trajectory CSV and summary JSON.

    Returns the summary dictionary that was written.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    log.info("%s: %s on %d modes, n=%d, %d steps", config.name, config.synthesis.strategy,
             config.system.m, config.system.n, config.synthesis.total_steps)
    report = synthesize(config.system, config.initial, config.synthesis)
    header, rows = trajectory_rows(config.system, config.initial, report)
    with open(out_dir / config.outputs["trajectory"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    summary = build_summary(config, report)
    with open(out_dir / config.outputs["summary"], "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, allow_nan=False)
        fh.write("\n")
    log.info("switched area %.6g, best constant mode %d (area %.6g)", summary["switched_area"],
             summary["best_constant_mode"], summary["best_constant_area"])
    return summary


def _origin(exc) -> str:
    """Package module the exception was raised in, e.g. ``synthesis``."""
    tb = exc.__traceback__
    module = "switchsynth"
    while tb is not None:
        name = tb.tb_frame.f_globals.get("__name__", "")
        if name.startswith("switchsynth."):
            module = name
        tb = tb.tb_next
    return module.removeprefix("switchsynth.")


def _parser():
    parser = argparse.ArgumentParser(prog="switchsynth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="synthesise a switching schedule and write CSV/JSON outputs")
    src = p_run.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="path to a JSON run config")
    src.add_argument("--example", help="name of a bundled config (see `switchsynth examples`)")
    p_run.add_argument("--strategy", choices=STRATEGIES)
    p_run.add_argument("--steps", type=int, help="total number of steps")
    p_run.add_argument("--horizon", type=int, help="receding horizon length T in steps")
    p_run.add_argument("--dk", type=float, help="sampling interval used for areas")
    p_run.add_argument("--gamma", type=float, help="stability margin factor in (0, 1)")
    p_run.add_argument("--out-dir", required=True)

    sub.add_parser("examples", help="list bundled example configs")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("SWITCHSYNTH_LOG_LEVEL", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = _parser().parse_args(argv)
    if args.command == "examples":
        for name in bundled_examples():
            print(name)
        return EXIT_OK

    try:
        config = load_config(args.config if args.config else bundled_config_path(args.example))
        synth = config.synthesis.with_overrides(
            strategy=args.strategy, total_steps=args.steps, horizon_T=args.horizon,
            dk=args.dk, epsilon_gamma=args.gamma,
        )
        config = RunConfig(config.name, config.source, config.system, config.initial, synth,
                           config.outputs, config.ms_threshold)
    except SwitchSynthError as exc:
        print(f"switchsynth: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        summary = run(config, args.out_dir)
    except SynthesisError as exc:
        print(f"switchsynth: [{_origin(exc)}] synthesis error: {exc}", file=sys.stderr)
        return EXIT_SYNTHESIS
    except SwitchSynthError as exc:
        print(f"switchsynth: [{_origin(exc)}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SYNTHESIS
    except OSError as exc:
        print(f"switchsynth: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"{summary['name']}: {summary['strategy']} switched area {summary['switched_area']:.6g}, "
          f"best constant mode {summary['best_constant_mode']} area {summary['best_constant_area']:.6g}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
