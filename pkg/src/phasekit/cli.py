"""Command-line front end.

Eleven subcommands cover the library surface: flow (closed-form flow
matrix), propagate (phase-plane propagator), wigner / fracwigner
(distributions), reconstruct (windowed adjoint), weyl-symbol (kernel to
angle symbol), star (symbol products), expect (operator expectations),
bopp-spectrum (phase-plane eigensolve), evolve (paired dynamics), and
verify (the acceptance suite).

Every run writes its artifacts plus a JSON manifest recording the resolved
inputs, output paths, and any achieved errors next to the tolerance used.
Settings come from an optional JSON config file (--config) with flags
winning over config values.  Runs are deterministic for a fixed config and
seed; nothing here consults the clock.  Thread count for the FFT layer
comes from the PHASEKIT_THREADS environment variable.

State and window specs are small strings: "gaussian", "hermite:2",
"coherent:0.6+0.4j", "chirp", "chirp:0.8", or a path to a function1d grid
file.  Exit codes: 0 success, 1 numerical failure (verify), 2 usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any

import numpy as np

from . import gridfile, states, verify
from .bopp import REPRESENTATIONS, bopp_spectrum, evolve_pair
from .grid import ConfigurationError, Grid1D, PhaseFunction2D, SampledFunction1D
from .gridfile import FileFormatError
from .metaplectic import propagate
from .symplectic import THETA_WIGNER, flow_matrix
from .weyl import (
    OperatorKernel,
    Symbol2D,
    expectation,
    fractional_symbol,
    kernel_to_symbol,
    symbol_oscillator,
    symbol_x,
    symbol_xi,
    theta_product,
)
from .wigner import Window, wigner_fractional, wigner_metaplectic, windowed_adjoint

__all__ = ["main"]

EXIT_PASS = 0
EXIT_NUMERIC = 1
EXIT_USAGE = 2

COMMANDS = ("flow", "propagate", "wigner", "fracwigner", "reconstruct",
            "weyl-symbol", "star", "expect", "bopp-spectrum", "evolve", "verify")

_GRID_DEFAULTS = {"n": 256, "x_min": -8.0, "dx": 0.0625}


class UsageError(Exception):
    """Configuration or input problem; maps to exit code 2."""


# --------------------------------------------------------------------------
# settings: config file merged under flags


class Settings:
    """Flag values layered over a config file over defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config: dict[str, Any] = {}
        path = getattr(args, "config", None)
        if path:
            try:
                with open(path, "r", encoding="utf-8") as fh:
                    loaded = json.load(fh)
            except FileNotFoundError:
                raise UsageError(f"config file not found: {path}")
            except json.JSONDecodeError as exc:
                raise UsageError(f"config file is not valid JSON: {exc}")
            if not isinstance(loaded, dict):
                raise UsageError("config file must hold a JSON object")
            self.config = loaded
            declared = loaded.get("command")
            if declared is not None and declared != args.command:
                raise UsageError(
                    f"config declares command {declared!r} but "
                    f"{args.command!r} was invoked"
                )

    def get(self, key: str, default: Any = None) -> Any:
        flag = getattr(self.args, key.replace("-", "_"), None)
        if flag is not None:
            return flag
        if key in self.config:
            return self.config[key]
        return default

    def theta(self) -> float:
        value = self.get("theta")
        return THETA_WIGNER if value is None else float(value)

    def seed(self) -> int:
        return int(self.get("seed", 0))

    def payload(self) -> str:
        value = self.get("payload", "csv")
        if value not in gridfile.PAYLOADS:
            raise UsageError(f"payload must be one of {gridfile.PAYLOADS}")
        return value

    def grid(self) -> Grid1D:
        spec = dict(_GRID_DEFAULTS)
        spec.update({k: v for k, v in self.config.get("grid", {}).items()})
        n = self.get("n")
        if n is not None:
            spec["n"] = int(n)
        half = self.get("half_width")
        if half is not None:
            spec["x_min"] = -float(half)
            spec["dx"] = 2.0 * float(half) / spec["n"]
        for key in ("x_min", "dx"):
            flag = getattr(self.args, key, None)
            if flag is not None:
                spec[key] = float(flag)
        try:
            return Grid1D(int(spec["n"]), float(spec["x_min"]), float(spec["dx"]))
        except ConfigurationError as exc:
            raise UsageError(str(exc))

    def describe_grid(self, grid: Grid1D) -> dict:
        return {"n": grid.n, "x_min": grid.x_min, "dx": grid.dx}


def _resolve_state(spec: str, grid: Grid1D) -> SampledFunction1D:
    """Build a state from a spec string or load it from a grid file."""
    token, _, arg = spec.partition(":")
    if token == "gaussian" and not arg:
        return states.gaussian(grid)
    if token == "hermite":
        try:
            return states.hermite(grid, int(arg))
        except ValueError:
            raise UsageError(f"hermite spec needs an integer level: {spec!r}")
    if token == "coherent":
        try:
            return states.coherent(grid, complex(arg))
        except ValueError:
            raise UsageError(f"coherent spec needs a complex amplitude: {spec!r}")
    if token == "chirp":
        try:
            return states.chirp(grid, float(arg)) if arg else states.chirp(grid)
        except ValueError:
            raise UsageError(f"chirp spec rate must be a number: {spec!r}")
    if os.path.exists(spec):
        obj = gridfile.read(spec)
        if not isinstance(obj, SampledFunction1D):
            raise UsageError(f"{spec}: expected a function1d grid file")
        return obj
    raise UsageError(
        f"unknown state spec {spec!r} (gaussian, hermite:M, coherent:Z, "
        "chirp[:RATE], or a function1d file path)"
    )


def _read_kind(path: str, kinds: tuple[type, ...], what: str):
    obj = gridfile.read(path)
    if not isinstance(obj, kinds):
        names = "|".join(k.__name__ for k in kinds)
        raise UsageError(f"{path}: expected {what} ({names}), "
                         f"got {type(obj).__name__}")
    return obj


def _write_manifest(path: str, payload: dict) -> None:
    payload = {"format_version": gridfile.FORMAT_VERSION, **payload}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _float_csv(value: float) -> str:
    return repr(float(value) + 0.0)  # the +0.0 folds -0.0 into 0.0


# --------------------------------------------------------------------------
# subcommand handlers; each returns an exit code


def _cmd_flow(s: Settings) -> int:
    theta = 0.0 if s.get("theta") is None else float(s.get("theta"))
    M = flow_matrix(theta)
    output = s.get("output", "flow.csv")
    with open(output, "w", encoding="utf-8") as fh:
        for row in M:
            fh.write(",".join(_float_csv(v) for v in row) + "\n")
    manifest = s.get("manifest", output + ".manifest.json")
    _write_manifest(manifest, {
        "command": "flow",
        "inputs": {"theta": theta},
        "outputs": {"matrix": output},
    })
    print(f"flow matrix at theta={theta:g} -> {output}")
    return EXIT_PASS


def _cmd_propagate(s: Settings) -> int:
    path = s.get("input")
    if not path:
        raise UsageError("propagate needs --input <phase2d grid file>")
    F = _read_kind(path, (PhaseFunction2D,), "a phase-plane function")
    theta = s.theta()
    out_obj = propagate(F, theta)
    output = s.get("output", "propagate.csv")
    gridfile.write(output, out_obj, s.payload())
    manifest = s.get("manifest", output + ".manifest.json")
    _write_manifest(manifest, {
        "command": "propagate",
        "inputs": {"input": path, "theta": theta, "payload": s.payload()},
        "outputs": {"phase2d": output},
    })
    print(f"propagated by theta={theta:g} -> {output}")
    return EXIT_PASS


def _wigner_common(s: Settings, theta: float | None, default_out: str,
                   command: str) -> int:
    grid = s.grid()
    psi_spec = "gaussian" if s.get("gaussian") else s.get("state", "gaussian")
    phi_spec = s.get("phi", psi_spec)
    psi = _resolve_state(psi_spec, grid)
    phi = _resolve_state(phi_spec, psi.grid)
    if theta is None:
        W = wigner_metaplectic(psi, phi)
        theta_used = THETA_WIGNER
    else:
        W = wigner_fractional(psi, phi, theta)
        theta_used = theta
    output = s.get("output", default_out)
    gridfile.write(output, W, s.payload())
    manifest = s.get("manifest", output + ".manifest.json")
    _write_manifest(manifest, {
        "command": command,
        "inputs": {"state": psi_spec, "phi": phi_spec, "theta": theta_used,
                   "grid": s.describe_grid(psi.grid), "payload": s.payload()},
        "outputs": {"phase2d": output},
    })
    print(f"{command}({psi_spec}, {phi_spec}) at theta={theta_used:g} -> {output}")
    return EXIT_PASS


def _cmd_wigner(s: Settings) -> int:
    return _wigner_common(s, None, "wigner.csv", "wigner")


def _cmd_fracwigner(s: Settings) -> int:
    return _wigner_common(s, s.theta(), "fracwigner.csv", "fracwigner")


def _cmd_reconstruct(s: Settings) -> int:
    path = s.get("input")
    if not path:
        raise UsageError("reconstruct needs --input <phase2d grid file>")
    F = _read_kind(path, (PhaseFunction2D,), "a phase-plane function")
    window_spec = s.get("window", "gaussian")
    window = Window(_resolve_state(window_spec, F.grid_x))
    theta = s.theta()
    psi = windowed_adjoint(F, window, theta)
    output = s.get("output", "reconstruct.csv")
    gridfile.write(output, psi, s.payload())
    manifest = s.get("manifest", output + ".manifest.json")
    _write_manifest(manifest, {
        "command": "reconstruct",
        "inputs": {"input": path, "window": window_spec, "theta": theta,
                   "payload": s.payload()},
        "outputs": {"function1d": output},
    })
    print(f"reconstructed with window {window_spec} at theta={theta:g} -> {output}")
    return EXIT_PASS


def _cmd_weyl_symbol(s: Settings) -> int:
    path = s.get("kernel")
    if not path:
        raise UsageError("weyl-symbol needs --kernel <kernel grid file>")
    kernel = _read_kind(path, (OperatorKernel,), "an operator kernel")
    theta = s.theta()
    # The distinguished angle has an exact route; other angles go through
    # the propagator.
    if theta == THETA_WIGNER:
        symbol = kernel_to_symbol(kernel)
    else:
        symbol = fractional_symbol(kernel, theta)
    output = s.get("output", "weyl-symbol.csv")
    gridfile.write(output, symbol, s.payload())
    manifest = s.get("manifest", output + ".manifest.json")
    _write_manifest(manifest, {
        "command": "weyl-symbol",
        "inputs": {"kernel": path, "theta": theta, "payload": s.payload()},
        "outputs": {"symbol": output},
    })
    print(f"symbol at theta={theta:g} -> {output}")
    return EXIT_PASS


_BUILTIN_SYMBOLS = ("oscillator", "x", "xi")


def _resolve_symbol(spec: str, grid: Grid1D | None) -> Symbol2D:
    if spec in _BUILTIN_SYMBOLS:
        if grid is None:
            raise UsageError(f"builtin symbol {spec!r} needs a grid "
                             "(--n/--x-min/--dx or --half-width)")
        return {"oscillator": symbol_oscillator,
                "x": symbol_x, "xi": symbol_xi}[spec](grid)
    if os.path.exists(spec):
        obj = gridfile.read(spec)
        if not isinstance(obj, Symbol2D):
            raise UsageError(f"{spec}: expected a symbol grid file")
        return obj
    raise UsageError(f"unknown symbol spec {spec!r} "
                     f"(one of {_BUILTIN_SYMBOLS} or a symbol file path)")


def _cmd_star(s: Settings) -> int:
    a_spec, b_spec = s.get("a"), s.get("b")
    if not a_spec or not b_spec:
        raise UsageError("star needs --a and --b (symbol files or builtins)")
    grid = s.grid()
    a = _resolve_symbol(a_spec, grid)
    b = _resolve_symbol(b_spec, a.grid_x)
    theta = s.theta()
    method = s.get("method")
    product = theta_product(a, b, theta, method=method)
    output = s.get("output", "star.csv")
    gridfile.write(output, product, s.payload())
    manifest = s.get("manifest", output + ".manifest.json")
    _write_manifest(manifest, {
        "command": "star",
        "inputs": {"a": a_spec, "b": b_spec, "theta": theta,
                   "method": method or "auto", "payload": s.payload()},
        "outputs": {"symbol": output},
    })
    print(f"star product at theta={theta:g} -> {output}")
    return EXIT_PASS


def _cmd_expect(s: Settings) -> int:
    op_spec = s.get("op")
    if not op_spec:
        raise UsageError("expect needs --op <kernel or symbol grid file>")
    grid = s.grid()
    if op_spec in _BUILTIN_SYMBOLS:
        op: OperatorKernel | Symbol2D = _resolve_symbol(op_spec, grid)
        op_grid = op.grid_x
    else:
        op = _read_kind(op_spec, (OperatorKernel, Symbol2D),
                        "an operator kernel or symbol")
        op_grid = op.grid if isinstance(op, OperatorKernel) else op.grid_x
    state_spec = s.get("state", "gaussian")
    state = _resolve_state(state_spec, op_grid)
    theta = s.theta()
    result = expectation(op, state, theta)
    output = s.get("output", "expect.json")
    record = {
        "value": [result.value.real, result.value.imag],
        "phase_value": [result.phase_value.real, result.phase_value.imag],
        "residual": result.residual,
        "self_adjoint": result.self_adjoint,
    }
    if result.adjoint_value is not None:
        record["adjoint_value"] = [result.adjoint_value.real,
                                   result.adjoint_value.imag]
    with open(output, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest = s.get("manifest", output + ".manifest.json")
    _write_manifest(manifest, {
        "command": "expect",
        "inputs": {"op": op_spec, "state": state_spec, "theta": theta},
        "outputs": {"expectation": output},
        "results": record,
    })
    print(f"expectation value {result.value:.12g} "
          f"(phase-space route residual {result.residual:.3e}) -> {output}")
    return EXIT_PASS


def _cmd_bopp_spectrum(s: Settings) -> int:
    symbol_spec = s.get("symbol")
    count = s.get("count")
    if not symbol_spec or count is None:
        raise UsageError("bopp-spectrum needs --symbol and --count")
    grid = s.grid()
    symbol = _resolve_symbol(symbol_spec, grid)
    window_spec = s.get("window", "gaussian")
    window = Window(_resolve_state(window_spec, symbol.grid_x))
    representation = s.get("representation", "bopp_conjugated")
    kwargs = {}
    gap = s.get("gap")
    if gap is not None:
        kwargs["gap"] = float(gap)
    report = bopp_spectrum(symbol, int(count), window,
                           representation=representation, **kwargs)
    base = s.get("output", "bopp-spectrum")
    json_path, csv_path = base + ".json", base + ".csv"
    # pushforward_residuals is per cluster, nan where unpaired or skipped;
    # nan is not valid JSON, so those slots become null.
    pushforwards = [None if np.isnan(r) else float(r)
                    for r in report.pushforward_residuals]
    record = {
        "eigenvalues": [float(v) for v in report.eigenvalues],
        "multiplicities": [int(m) for m in report.multiplicities],
        "residuals": [float(r) for r in report.residuals],
        "pairing": {str(k): int(v) for k, v in report.pairing.items()},
        "reference_eigenvalues": [float(v) for v in report.reference_eigenvalues],
        "pushforward_residuals": pushforwards,
        "pushforward_skipped": [int(i) for i in report.pushforward_skipped],
        "gap": float(report.gap),
    }
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("index,eigenvalue,multiplicity,residual,reference,pushforward\n")
        for i, (lam, mult, res) in enumerate(zip(
                record["eigenvalues"], record["multiplicities"],
                record["residuals"])):
            ref = report.pairing.get(i)
            ref_txt = _float_csv(record["reference_eigenvalues"][ref]) \
                if ref is not None else ""
            push_txt = _float_csv(pushforwards[i]) \
                if pushforwards[i] is not None else ""
            fh.write(f"{i},{_float_csv(lam)},{mult},{_float_csv(res)},"
                     f"{ref_txt},{push_txt}\n")
    manifest = s.get("manifest", base + ".manifest.json")
    _write_manifest(manifest, {
        "command": "bopp-spectrum",
        "inputs": {"symbol": symbol_spec, "count": int(count),
                   "window": window_spec, "representation": representation,
                   "gap": record["gap"]},
        "outputs": {"report_json": json_path, "report_csv": csv_path},
        "results": {"eigenvalues": record["eigenvalues"],
                    "max_residual": max(record["residuals"], default=0.0)},
    })
    eig_txt = ", ".join(f"{v:.6f}" for v in record["eigenvalues"])
    print(f"lowest {count} cluster eigenvalues: {eig_txt} -> {json_path}, {csv_path}")
    return EXIT_PASS


def _cmd_evolve(s: Settings) -> int:
    symbol_spec = s.get("symbol", "oscillator")
    t_final = s.get("t")
    if t_final is None:
        raise UsageError("evolve needs --t <final time>")
    steps = int(s.get("steps", 16))
    grid = s.grid()
    symbol = _resolve_symbol(symbol_spec, grid)
    state_spec = s.get("state", "gaussian")
    state = _resolve_state(state_spec, symbol.grid_x)
    window_spec = s.get("window", "gaussian")
    window = Window(_resolve_state(window_spec, symbol.grid_x))
    representation = s.get("representation", "bopp_conjugated")
    result = evolve_pair(symbol, state, window, float(t_final), steps,
                         representation=representation)
    base = s.get("output", "evolve")
    state_path, phase_path = base + "-state.csv", base + "-phase.csv"
    table_path = base + "-divergence.csv"
    payload = s.payload()
    gridfile.write(state_path, result.state, payload)
    gridfile.write(phase_path, result.phase, payload)
    with open(table_path, "w", encoding="utf-8") as fh:
        fh.write("time,divergence\n")
        for t, d in zip(result.times, result.divergences):
            fh.write(f"{_float_csv(t)},{_float_csv(d)}\n")
    manifest = s.get("manifest", base + ".manifest.json")
    _write_manifest(manifest, {
        "command": "evolve",
        "inputs": {"symbol": symbol_spec, "state": state_spec,
                   "window": window_spec, "t": float(t_final), "steps": steps,
                   "representation": representation, "payload": payload},
        "outputs": {"state": state_path, "phase": phase_path,
                    "divergence_table": table_path},
        "results": {"divergence": result.divergence,
                    "state_norm_drift": result.state_norm_drift,
                    "phase_norm_drift": result.phase_norm_drift},
    })
    print(f"evolved to t={float(t_final):g} in {steps} checkpoints; "
          f"divergence {result.divergence:.3e} -> {state_path}, {phase_path}")
    return EXIT_PASS


def _parse_tolerance_overrides(s: Settings) -> dict[str, float]:
    overrides: dict[str, float] = {}
    for key, value in s.config.get("tolerances", {}).items():
        overrides[str(key)] = float(value)
    for item in (getattr(s.args, "tolerance", None) or []):
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tolerance needs criterion/check=value: {item!r}")
        try:
            overrides[key] = float(value)
        except ValueError:
            raise UsageError(f"--tolerance value is not a number: {item!r}")
    return overrides


def _cmd_verify(s: Settings) -> int:
    suite = s.get("suite", "all")
    try:
        names = verify.resolve_suite(suite)
    except KeyError as exc:
        raise UsageError(str(exc.args[0]))
    seed = s.seed()
    overrides = _parse_tolerance_overrides(s)
    results = verify.run_all(seed=seed, names=names)

    rows = []
    failing: list[str] = []
    for r in results:
        key = f"{r.criterion}/{r.check}"
        tolerance = float(overrides.get(key, r.tolerance))
        passed = bool(float(r.error) <= tolerance)
        rows.append({"criterion": r.criterion, "check": r.check,
                     "tolerance": tolerance, "error": float(r.error),
                     "passed": passed, "detail": r.detail})
        if not passed and r.criterion not in failing:
            failing.append(r.criterion)

    width = max(len(f"{row['criterion']}/{row['check']}") for row in rows)
    for row in rows:
        status = "pass" if row["passed"] else "FAIL"
        name = f"{row['criterion']}/{row['check']}"
        print(f"{status}  {name:<{width}}  error={row['error']:.3e}  "
              f"tolerance={row['tolerance']:.1e}")
    total = len(rows)
    good = sum(row["passed"] for row in rows)
    print(f"{good}/{total} checks passed (suite {suite}, seed {seed})")

    manifest = s.get("manifest", "verify.manifest.json")
    _write_manifest(manifest, {
        "command": "verify",
        "inputs": {"suite": suite, "seed": seed,
                   "criteria": list(names),
                   "tolerance_overrides": overrides},
        "outputs": {},
        "checks": rows,
        "passed": not failing,
    })
    if failing:
        print(f"failing criteria: {', '.join(failing)}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_PASS


_HANDLERS = {
    "flow": _cmd_flow,
    "propagate": _cmd_propagate,
    "wigner": _cmd_wigner,
    "fracwigner": _cmd_fracwigner,
    "reconstruct": _cmd_reconstruct,
    "weyl-symbol": _cmd_weyl_symbol,
    "star": _cmd_star,
    "expect": _cmd_expect,
    "bopp-spectrum": _cmd_bopp_spectrum,
    "evolve": _cmd_evolve,
    "verify": _cmd_verify,
}


# --------------------------------------------------------------------------
# argument parsing


def _add_common(parser: argparse.ArgumentParser, grid: bool = True) -> None:
    parser.add_argument("--config", help="JSON config file; flags win over it")
    parser.add_argument("--output", help="output path (or base path)")
    parser.add_argument("--manifest", help="manifest path "
                        "(default: <output>.manifest.json)")
    parser.add_argument("--payload", choices=gridfile.PAYLOADS,
                        help="grid file payload encoding (default csv)")
    if grid:
        parser.add_argument("--n", type=int, help="grid size (even)")
        parser.add_argument("--x-min", type=float, dest="x_min",
                            help="left grid edge")
        parser.add_argument("--dx", type=float, help="grid spacing")
        parser.add_argument("--half-width", type=float, dest="half_width",
                            help="centered grid shortcut: x_min=-H, dx=2H/n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasekit",
        description="Phase-space transforms, symbol calculus, and the "
                    "verification suite.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("flow", help="closed-form 4x4 flow matrix as CSV")
    p.add_argument("--theta", type=float, help="flow parameter (default 0)")
    _add_common(p, grid=False)

    p = sub.add_parser("propagate", help="apply the phase-plane propagator")
    p.add_argument("--input", help="phase2d grid file")
    p.add_argument("--theta", type=float,
                   help="angle (default: the distinguished angle)")
    _add_common(p, grid=False)

    for name, text in (("wigner", "distribution at the distinguished angle"),
                       ("fracwigner", "distribution at any angle")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--state", help="state spec (default gaussian)")
        p.add_argument("--phi", help="second state spec (default: same)")
        p.add_argument("--gaussian", action="store_true",
                       help="shorthand for --state gaussian")
        if name == "fracwigner":
            p.add_argument("--theta", type=float, help="angle (default: "
                           "the distinguished angle)")
        _add_common(p)

    p = sub.add_parser("reconstruct", help="windowed adjoint of a "
                       "phase-plane function")
    p.add_argument("--input", help="phase2d grid file")
    p.add_argument("--window", help="window spec (default gaussian)")
    p.add_argument("--theta", type=float)
    _add_common(p, grid=False)

    p = sub.add_parser("weyl-symbol", help="angle symbol of an operator kernel")
    p.add_argument("--kernel", help="kernel grid file")
    p.add_argument("--theta", type=float)
    _add_common(p, grid=False)

    p = sub.add_parser("star", help="star product of two symbols")
    p.add_argument("--a", help="first symbol (file or builtin oscillator/x/xi)")
    p.add_argument("--b", help="second symbol")
    p.add_argument("--theta", type=float)
    p.add_argument("--method", choices=("algebraic", "kernel", "quadrature"))
    _add_common(p)

    p = sub.add_parser("expect", help="operator expectation in a state")
    p.add_argument("--op", help="kernel/symbol file or builtin symbol")
    p.add_argument("--state", help="state spec (default gaussian)")
    p.add_argument("--theta", type=float)
    _add_common(p)

    p = sub.add_parser("bopp-spectrum", help="eigenvalue clusters of a "
                       "phase-plane operator")
    p.add_argument("--symbol", help="symbol file or builtin oscillator/x/xi")
    p.add_argument("--count", type=int, help="number of clusters")
    p.add_argument("--window", help="window spec (default gaussian)")
    p.add_argument("--representation", choices=REPRESENTATIONS)
    p.add_argument("--gap", type=float, help="cluster gap threshold")
    _add_common(p)

    p = sub.add_parser("evolve", help="evolve a state and its phase-plane "
                       "lift side by side")
    p.add_argument("--symbol", help="generator symbol (default oscillator)")
    p.add_argument("--state", help="initial state spec (default gaussian)")
    p.add_argument("--window", help="window spec (default gaussian)")
    p.add_argument("--t", type=float, help="final time")
    p.add_argument("--steps", type=int, help="checkpoint count (default 16)")
    p.add_argument("--representation", choices=REPRESENTATIONS)
    _add_common(p)

    p = sub.add_parser("verify", help="run acceptance criteria")
    p.add_argument("--suite", help="criterion or alias (default all)")
    p.add_argument("--seed", type=int, help="seed for randomized checks")
    p.add_argument("--tolerance", action="append", metavar="CHECK=VALUE",
                   help="override a tolerance, e.g. "
                        "propagator/group-law=1e-5 (repeatable)")
    _add_common(p, grid=False)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings(args)
        return _HANDLERS[args.command](settings)
    except (UsageError, ConfigurationError, FileFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
