"""Command-line interface.

Usage::

    qdesire COMMAND --scenario FILE [--tol NAME=VALUE ...] [--seed N] [--format json|text]

Exit codes: 0 success (or coherent), 2 incoherent assessments (the report
carries the certificate), 1 any error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .credal import (CredalSet, check_coherence, check_independence, condition_nonselective,
                     evolve, frechet_check, marginal, natural_extension)
from .credal.composite import MarginalCredalSet
from .credal.conditioning import ConditionalCredalSet
from .errors import Incoherent, QDesireError
from .game import Scenario, run_simulation
from .linalg import pauli_coords
from .measurement import born_probabilities, canonical_measurement, make_measurement
from .scenario import DEFAULT_TOLERANCES, ModelBlock, ScenarioFile, matrix_to_json, parse_scenario

COMMANDS = ("check", "prevision", "member", "condition", "marginal", "extend", "evolve", "born",
            "frechet", "independence", "simulate", "pauli")
EXIT_OK, EXIT_ERROR, EXIT_INCOHERENT = 0, 1, 2
DEFAULT_TRIALS = 10_000


class CommandError(QDesireError, ValueError):
    pass


def _num(x):
    """Round to 12 significant digits for stable output."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    r = float(f"{x:.12g}")
    return 0.0 if r == 0 else r


def _mat(m):
    return [[[_num(v.real), _num(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def _require(value, name):
    if value is None:
        raise CommandError(f"scenario field '{name}' is required for this command")
    return value


def _certificate_dict(report) -> dict:
    cert = report.certificate
    return {"alpha": [_num(a) for a in cert.alpha], "beta": _num(cert.beta), "boundary": bool(cert.boundary)}


def build_model(block: ModelBlock, coherence_tol: float) -> CredalSet:
    """Credal set described by a scenario model block.

    Raises
    ------
    Incoherent
        when the assessments incur partial loss.
    """
    if block.extreme_points is not None:
        return CredalSet.from_extreme_points(block.extreme_points, classical=block.classical)
    if block.assessments:
        report = check_coherence(block.assessments, block.dim, tol=coherence_tol)
        if not report.coherent:
            raise Incoherent(report)
        return CredalSet(block.dim, constraints=[a.gamble for a in block.assessments],
                         classical=block.classical, _verified=True)
    if block.dim is None:
        raise CommandError("model needs 'dim', 'assessments' or 'extreme_points'")
    return CredalSet.vacuous(block.dim, classical=block.classical)


def _describe_model(M) -> dict:
    if isinstance(M, CredalSet):
        out = {"dim": M.dim, "classical": M.classical}
        if M.kind == "V":
            out["representation"] = "extreme_points"
            out["extreme_points"] = [_mat(p) for p in M.points]
        else:
            out["representation"] = "constraints"
            out["constraints"] = len(M.constraints)
            out["vacuous"] = not M.constraints
        return out
    if isinstance(M, ConditionalCredalSet):
        return {"dim": M.dim, "representation": "implicit conditional",
                "event_probability": [_num(M.p_lower), _num(M.p_upper)]}
    if isinstance(M, MarginalCredalSet):
        return {"dim": M.dim, "representation": "implicit marginal", "keep": M.keep}
    return {"dim": M.dim}


def _previsions(M, gambles) -> list:
    out = []
    for G in gambles or []:
        lo, hi = M.prevision(G)
        out.append({"lower": _num(lo), "upper": _num(hi)})
    return out


def _measurement(sc: ScenarioFile, n: int):
    if sc.measurement is None:
        return canonical_measurement(n)
    return make_measurement(sc.measurement)


# --------------------------------------------------------------------------
# commands


def cmd_check(sc, opts):
    block = sc.model
    report = check_coherence(block.assessments, block.dim, tol=sc.tolerance("coherence"))
    out = {"status": "coherent" if report.coherent else "incoherent", "margin": _num(report.margin)}
    if report.coherent:
        if report.witness is not None:
            out["witness"] = _mat(report.witness)
        return EXIT_OK, out
    out["certificate"] = _certificate_dict(report)
    return EXIT_INCOHERENT, out


def cmd_prevision(sc, opts):
    M = build_model(sc.model, sc.tolerance("coherence"))
    return EXIT_OK, {"model": _describe_model(M), "previsions": _previsions(M, _require(sc.gambles, "gambles"))}


def _candidates(sc):
    states = list(sc.states or [])
    if sc.state is not None:
        states.insert(0, sc.state)
    return _require(states or None, "states")


def cmd_member(sc, opts):
    M = build_model(sc.model, sc.tolerance("coherence"))
    tol = sc.tolerance("membership")
    return EXIT_OK, {"members": [bool(M.contains(s, tol)) for s in _candidates(sc)]}


def cmd_condition(sc, opts):
    M = build_model(sc.model, sc.tolerance("coherence"))
    meas = _measurement(sc, M.dim)
    idx = sc.indices if sc.indices is not None else [0]
    C = condition_nonselective(M, meas, idx)
    return EXIT_OK, {"indices": list(idx), "model": _describe_model(C), "previsions": _previsions(C, sc.gambles)}


def cmd_marginal(sc, opts):
    M = build_model(sc.model, sc.tolerance("coherence"))
    dims = _require(sc.dims, "dims")
    keep = sc.keep or "A"
    Mm = marginal(M, dims, keep)
    out = {"keep": keep, "model": _describe_model(Mm), "previsions": _previsions(Mm, sc.gambles)}
    if sc.state is not None or sc.states:
        tol = sc.tolerance("membership")
        check = Mm.contains if isinstance(Mm, CredalSet) else Mm.membership
        out["members"] = [bool(check(s, max(tol, 1e-7))) for s in _candidates(sc)]
    return EXIT_OK, out


def cmd_extend(sc, opts):
    models = _require(sc.models, "models")
    if len(models) != 2:
        raise CommandError("'models' must list exactly two operand models")
    MA = build_model(models[0], sc.tolerance("coherence"))
    MB = build_model(models[1], sc.tolerance("coherence"))
    E = natural_extension(MA, MB)
    out = {"dims": [MA.dim, MB.dim], "model": _describe_model(E)}
    if sc.state is not None or sc.states:
        tol = sc.tolerance("membership")
        out["members"] = [bool(E.contains(s, tol)) for s in _candidates(sc)]
    out["previsions"] = _previsions(E, sc.gambles)
    return EXIT_OK, out


def cmd_evolve(sc, opts):
    M = build_model(sc.model, sc.tolerance("coherence"))
    U = _require(sc.unitary, "unitary")
    E = evolve(M, U)
    return EXIT_OK, {"model": _describe_model(E), "previsions": _previsions(E, sc.gambles)}


def cmd_born(sc, opts):
    rho = _require(sc.state, "state")
    meas = _measurement(sc, rho.shape[0])
    return EXIT_OK, {"probabilities": [_num(p) for p in born_probabilities(rho, meas)]}


def cmd_frechet(sc, opts):
    rho = _require(sc.state, "state")
    dims = _require(sc.dims, "dims")
    rep = frechet_check(rho, dims)
    tests = [{"test": lab, "passed": ok, "min_eigenvalue": _num(ev)}
             for lab, ok, ev in zip(rep.labels, rep.passed, rep.min_eigenvalues)]
    return EXIT_OK, {"tests": tests, "all_pass": rep.all_pass}


def cmd_independence(sc, opts):
    rho = _require(sc.state, "state")
    dims = _require(sc.dims, "dims")
    rep = check_independence(rho, dims)
    return EXIT_OK, {"independent": bool(rep.residual <= sc.tolerance("independence")),
                     "residual": _num(rep.residual), "rho_A": _mat(rep.rho_A), "rho_B": _mat(rep.rho_B)}


def cmd_simulate(sc, opts):
    rho = _require(sc.state, "state")
    gambles = _require(sc.gambles, "gambles")
    seed = opts.seed if opts.seed is not None else (sc.seed if sc.seed is not None else 0)
    meas = make_measurement(sc.measurement) if sc.measurement is not None else None
    s = Scenario(rho, tuple(gambles), sc.trials or DEFAULT_TRIALS, seed, meas)
    led = run_simulation(s)
    bounds = led.deviation_bounds(4.0)
    rows = []
    for k in range(len(gambles)):
        rows.append({"gamble": k, "empirical_mean": _num(led.means[k]), "expectation": _num(led.expectations[k]),
                     "abs_deviation": _num(abs(led.means[k] - led.expectations[k])),
                     "sigma_bound": _num(bounds[k]), "cumulative_payoff": _num(led.totals[k])})
    counts = np.bincount(led.outcomes, minlength=len(s.measurement))
    return EXIT_OK, {"trials": s.trials, "seed": seed, "outcome_counts": [int(c) for c in counts], "table": rows}


def cmd_pauli(sc, opts):
    gambles = _require(sc.gambles, "gambles")
    return EXIT_OK, {"coordinates": [dict(zip("vxyz", map(_num, pauli_coords(G)))) for G in gambles]}


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def dispatch(command: str, sc: ScenarioFile, opts=None) -> tuple[int, dict]:
    """Run ``command`` on a parsed scenario; returns ``(exit_code, result)``.

    Incoherent assessments map to exit code 2 with the certificate in the result.
    """
    if command not in HANDLERS:
        raise CommandError(f"unknown command '{command}'")
    opts = opts or argparse.Namespace(seed=None)
    try:
        code, body = HANDLERS[command](sc, opts)
    except Incoherent as exc:
        rep = exc.report
        code, body = EXIT_INCOHERENT, {"status": "incoherent", "margin": _num(rep.margin),
                                       "certificate": _certificate_dict(rep)}
    result = {"command": command, "exit_code": code}
    result.update(body)
    result["tolerances"] = {k: sc.tolerance(k) for k in DEFAULT_TOLERANCES}
    return code, result


# --------------------------------------------------------------------------
# output


def _is_matrix(v) -> bool:
    return (isinstance(v, list) and v and isinstance(v[0], list) and v[0]
            and isinstance(v[0][0], list) and len(v[0][0]) == 2 and not isinstance(v[0][0][0], list))


def _fmt_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _fmt_complex(pair) -> str:
    re, im = pair
    if im == 0:
        return f"{re:.12g}"
    return f"{re:.12g}{im:+.12g}i"


def _text_lines(key, value, indent=""):
    if _is_matrix(value):
        yield f"{indent}{key}:"
        for row in value:
            yield f"{indent}  [" + ", ".join(_fmt_complex(p) for p in row) + "]"
    elif isinstance(value, dict):
        yield f"{indent}{key}:"
        for k, v in value.items():
            yield from _text_lines(k, v, indent + "  ")
    elif isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
        yield f"{indent}{key}:"
        for i, item in enumerate(value):
            yield from _text_lines(f"[{i}]", item, indent + "  ")
    elif isinstance(value, list) and value and all(_is_matrix(v) for v in value):
        yield f"{indent}{key}:"
        for i, item in enumerate(value):
            yield from _text_lines(f"[{i}]", item, indent + "  ")
    elif isinstance(value, list):
        yield f"{indent}{key}: [" + ", ".join(_fmt_scalar(v) for v in value) + "]"
    else:
        yield f"{indent}{key}: {_fmt_scalar(value)}"


def emit_report(result: dict, fmt: str = "text") -> str:
    """Render a dispatch result as JSON or as aligned text lines."""
    if fmt == "json":
        return json.dumps(result, indent=2, ensure_ascii=False)
    lines = []
    cmd = result.get("command")
    if "status" in result:
        lines.append(f"status: {result['status']}, margin: {_fmt_scalar(result['margin'])}")
    if cmd == "prevision" or "previsions" in result:
        for k, p in enumerate(result.get("previsions", [])):
            lines.append(f"gamble {k}: [{p['lower']:.12g}, {p['upper']:.12g}]")
    if cmd == "simulate":
        lines.append(f"trials: {result['trials']}  seed: {result['seed']}")
        lines.append(f"{'gamble':>6} {'empirical mean':>20} {'expectation':>20} {'|delta|':>20} {'4 sigma/sqrt(N)':>20}")
        for r in result["table"]:
            lines.append(f"{r['gamble']:>6} {r['empirical_mean']:>20.12g} {r['expectation']:>20.12g} "
                         f"{r['abs_deviation']:>20.12g} {r['sigma_bound']:>20.12g}")
    skip = {"status", "margin", "previsions", "tolerances", "table"}
    for k, v in result.items():
        if k in skip:
            continue
        lines.extend(_text_lines(k, v))
    return "\n".join(lines)


# --------------------------------------------------------------------------
# documented expectations


def _as_complex(v):
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    return None


def mismatches(actual, expected, tol: float = 1e-6, path: str = "$") -> list[str]:
    """Differences between a result and an expected sub-structure.

    Dicts match on the expected keys only; lists match element-wise; numbers
    (and ``[re, im]`` pairs, where a bare number means a real entry) match
    within ``tol``.
    """
    if isinstance(expected, dict):
        if not isinstance(actual, dict):
            return [f"{path}: expected an object"]
        out = []
        for k, v in expected.items():
            if k not in actual:
                out.append(f"{path}.{k}: missing")
            else:
                out.extend(mismatches(actual[k], v, tol, f"{path}.{k}"))
        return out
    if isinstance(expected, bool) or isinstance(actual, bool):
        same = isinstance(actual, bool) and isinstance(expected, bool) and actual == expected
        return [] if same else [f"{path}: {actual!r} != {expected!r}"]
    e, a = _as_complex(expected), _as_complex(actual)
    if e is not None and a is not None:
        return [] if abs(a - e) <= tol else [f"{path}: {actual} != {expected}"]
    if isinstance(expected, list):
        if not isinstance(actual, list) or len(actual) != len(expected):
            return [f"{path}: expected a list of length {len(expected)}"]
        out = []
        for i, (x, y) in enumerate(zip(actual, expected)):
            out.extend(mismatches(x, y, tol, f"{path}[{i}]"))
        return out
    return [] if actual == expected else [f"{path}: {actual!r} != {expected!r}"]


def run_expectation(sc: ScenarioFile, tol: float = 1e-6) -> tuple[dict, list[str]]:
    """Run a scenario's documented command; return the result and any mismatches."""
    exp = _require(sc.expect, "expect")
    code, result = dispatch(exp["command"], sc)
    problems = []
    if "exit_code" in exp and code != exp["exit_code"]:
        problems.append(f"exit code {code} != {exp['exit_code']}")
    problems.extend(mismatches(result, exp.get("output", {}), tol))
    return result, problems


# --------------------------------------------------------------------------
# entry point


def bundled_scenarios() -> list[str]:
    root = resources.files("qdesire") / "scenarios"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def read_scenario_text(path: str) -> str:
    """Read a scenario file, falling back to the bundled copies by file name."""
    p = Path(path)
    if p.exists():
        return p.read_text(encoding="utf-8")
    name = p.name if p.suffix == ".json" else p.name + ".json"
    bundled = resources.files("qdesire") / "scenarios" / name
    if bundled.is_file():
        return bundled.read_text(encoding="utf-8")
    raise FileNotFoundError(f"scenario file not found: {path}")


def _parse_tol(items) -> dict:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise CommandError(f"--tol expects NAME=VALUE, got '{item}'")
        if name not in DEFAULT_TOLERANCES:
            raise CommandError(f"unknown tolerance '{name}'; known: {', '.join(DEFAULT_TOLERANCES)}")
        try:
            v = float(value)
        except ValueError:
            raise CommandError(f"tolerance '{name}' needs a number, got '{value}'") from None
        if not v > 0:
            raise CommandError(f"tolerance '{name}' must be positive")
        out[name] = v
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdesire", description="Desirable gambles over Hermitian matrices.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS + ("list",), help="operation to run ('list' shows bundled scenarios)")
    p.add_argument("--scenario", help="scenario JSON file, or the name of a bundled scenario")
    p.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance (repeatable)")
    p.add_argument("--seed", type=int, help="random seed for simulate (unsigned 64-bit)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        print("\n".join(bundled_scenarios()))
        return EXIT_OK
    try:
        if not args.scenario:
            raise CommandError("--scenario is required")
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise CommandError("--seed must be an unsigned 64-bit integer")
        sc = parse_scenario(read_scenario_text(args.scenario), _parse_tol(args.tol))
        code, result = dispatch(args.command, sc, args)
    except (QDesireError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(emit_report(result, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
