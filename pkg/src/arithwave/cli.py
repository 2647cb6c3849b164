"""Command-line driver: one subcommand per experiment, CSV or JSON output.

Parameters come from subcommand defaults, then an optional ``key=value``
config file, then command-line flags.  The normalized configuration is
written next to the output so that any run can be repeated from it.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__, _parallel
from .errors import ArgumentError, ArithwaveError, ResourceError

EXIT_OK = 0
EXIT_ARGUMENT = 2
EXIT_RESOURCE = 3


# -- parameter schema ----------------------------------------------------------


@dataclass(frozen=True)
class Param:
    kind: str  # int, float, str, bool, floats
    default: Any = None
    required: bool = False
    choices: tuple | None = None
    minimum: float | None = None
    maximum: float | None = None
    strict_min: bool = False
    help: str = ""


def _seed() -> Param:
    return Param("int", 0, minimum=0, maximum=2**64 - 1, help="base seed of the per-trial streams")


def _n(default=None) -> Param:
    return Param("int", default, required=default is None, minimum=1, help="the integer n")


def _positive(kind: str, default, help_: str = "") -> Param:
    return Param(kind, default, minimum=0, strict_min=True, help=help_)


_T_DEFAULT = tuple(k / 4 for k in range(-20, 21))

COMMON = {
    "output": Param("str", "", help="output path; empty writes to stdout"),
    "format": Param("str", "csv", choices=("csv", "json"), help="output format"),
}

SCHEMAS: dict[str, dict[str, Param]] = {
    "factor": {"n": _n()},
    "points": {"n": _n()},
    "corr": {
        "n": _n(),
        "l": Param("int", None, required=True, minimum=2, maximum=8),
        "budget": _positive("int", 10**8, "work budget for one half-sum table join"),
    },
    "quasi": {
        "n": _n(),
        "l": Param("int", None, required=True, minimum=2, maximum=8),
        "K": Param("float", None, required=True, minimum=0, strict_min=True,
                   help="radius of the quasi-correlation disc"),
        "budget": _positive("int", 10**8),
        "witness_cap": Param("int", 10, minimum=0),
    },
    "census": {
        "X": Param("int", None, required=True, minimum=1),
        "l": Param("int", 2, minimum=2, maximum=8),
        "rule": Param("str", "theorem1", choices=("theorem1", "fraction", "explicit")),
        "value": Param("float", 0.1, minimum=0, help="epsilon, fraction of sqrt(n), or K"),
        "budget": _positive("int", 10**8),
        "include_one": Param("bool", False),
    },
    "measure": {"n": _n()},
    "construct-pmq": {
        "w": Param("float", None, required=True, minimum=0, maximum=1),
        "tol": _positive("float", 0.05),
        "m": Param("int", 1, minimum=1),
        "p_max": Param("int", 10**5, minimum=5),
    },
    "construct-3p": {
        "angle_tol": _positive("float", 0.02),
        "p_max": Param("int", 10**5, minimum=5),
    },
    "simulate": {
        "n": _n(),
        "s": _positive("float", 0.5),
        "trials": Param("int", 500, minimum=2),
        "h": Param("float", 0.0, minimum=0, help="grid step; 0 picks a twentieth of a wavelength"),
        "seed": _seed(),
    },
    "moments": {
        "n": _n(),
        "l": Param("int", 2, choices=(2, 4, 6)),
        "s": _positive("float", 0.1),
    },
    "variance": {
        "n": _n(),
        "s": Param("float", 0.2, minimum=0, maximum=0.5, strict_min=True),
        "trials": Param("int", 2000, minimum=100),
        "seed": _seed(),
        "torus": Param("bool", True),
        "kacrice": Param("bool", True),
        "K": Param("int", 0, minimum=0, help="torus grid size; 0 picks a power of two"),
    },
    "cf": {
        "n": _n(),
        "R": Param("float", 2.0, minimum=1),
        "t": Param("floats", _T_DEFAULT),
        "trials": Param("int", 2000, minimum=2),
        "seed": _seed(),
        "M": Param("int", 256, minimum=16),
        "bootstrap": Param("int", 200, minimum=2),
    },
    "stability": {
        "mode": Param("str", "arw", choices=("arw", "plane")),
        "n": _n(25),
        "seeds": Param("int", 100, minimum=1),
        "seed": _seed(),
        "eps": _positive("float", 1e-4),
        "tau": Param("float", 0.01, minimum=0),
        "R": Param("float", 2.0, minimum=1),
        "C": _positive("float", 100.0),
    },
    "version": {},
}


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    values: dict

    def lines(self) -> list[str]:
        out = [f"command={self.command}"]
        for k, v in self.values.items():
            out.append(f"{k}={format_value(v)}")
        return out


def format_value(v) -> str:
    """Round-trip text form: ``repr`` floats, lowercase booleans, comma lists."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (tuple, list)):
        return ",".join(format_value(x) for x in v)
    if v is None:
        return ""
    return str(v)


def _parse(kind: str, text: str):
    text = text.strip()
    if kind == "int":
        return int(text)
    if kind == "float":
        x = float(text)
        if not math.isfinite(x):
            raise ValueError("not finite")
        return x
    if kind == "bool":
        low = text.lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise ValueError("not a boolean")
    if kind == "floats":
        vals = tuple(float(x) for x in text.split(",") if x.strip())
        if not vals or not all(math.isfinite(x) for x in vals):
            raise ValueError("need a nonempty list of finite numbers")
        return vals
    return text


def _check(name: str, p: Param, v, problems: list[str]) -> None:
    if p.choices is not None and v not in p.choices:
        problems.append(f"{name} must be one of {', '.join(map(str, p.choices))}, got {format_value(v)}")
        return
    if p.kind in ("int", "float") and p.minimum is not None:
        if (p.strict_min and p.minimum == 0 and not v > 0) or (p.minimum >= 1 and v <= 0):
            problems.append(f"{name} must be positive")
        elif p.strict_min and not v > p.minimum:
            problems.append(f"{name} must exceed {format_value(p.minimum)}")
        elif v < p.minimum:
            problems.append(f"{name} must be at least {format_value(p.minimum)}")
    if p.kind in ("int", "float") and p.maximum is not None and v > p.maximum:
        problems.append(f"{name} must be at most {p.maximum}")


def parse_config_text(text: str) -> dict[str, str]:
    """``key=value`` lines; blank lines and ``#`` comments are skipped."""
    raw: dict[str, str] = {}
    problems = []
    for i, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {i}: expected key=value, got {line!r}")
            continue
        k, v = line.split("=", 1)
        raw[k.strip()] = v.strip()
    if problems:
        raise ArgumentError("; ".join(problems))
    return raw


def normalize(command: str, raw: dict[str, Any]) -> ExperimentConfig:
    """Fill defaults, parse and check every value, reporting all problems at once."""
    if command not in SCHEMAS:
        raise ArgumentError(f"unknown command {command!r}")
    schema = {**SCHEMAS[command], **(COMMON if command != "version" else {})}
    problems = []
    raw = dict(raw)
    given_cmd = raw.pop("command", None)
    if given_cmd is not None and given_cmd != command:
        problems.append(f"config is for command {given_cmd!r}, not {command!r}")
    for k in raw:
        if k not in schema:
            problems.append(f"unknown key {k!r}")
    values = {}
    for k, p in schema.items():
        if k in raw and raw[k] is not None:
            v = raw[k]
            if isinstance(v, str):
                try:
                    v = _parse(p.kind, v)
                except ValueError:
                    problems.append(f"{k} must be of type {p.kind}, got {raw[k]!r}")
                    continue
            _check(k, p, v, problems)
            values[k] = v
        elif p.required:
            problems.append(f"missing required key {k!r}")
        else:
            values[k] = p.default
    if problems:
        raise ArgumentError("; ".join(problems))
    return ExperimentConfig(command, values)


def validate_config(path: str | os.PathLike, command: str, overrides: dict | None = None) -> ExperimentConfig:
    """Normalized config from a file, with ``overrides`` applied on top."""
    p = Path(path)
    if not p.is_file():
        raise ArgumentError(f"config file {str(p)!r} does not exist")
    raw = parse_config_text(p.read_text())
    raw.update(overrides or {})
    return normalize(command, raw)


# -- output ----------------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, float) and math.isnan(v):
        return "nan"
    if isinstance(v, complex):
        return repr(v)
    return format_value(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (tuple, list)):
        return [_json_value(x) for x in v]
    return v


def render(cfg: ExperimentConfig, rows: list[dict]) -> str:
    if cfg.values.get("format") == "json":
        doc = {
            "command": cfg.command,
            "config": {k: _json_value(v) for k, v in cfg.values.items()},
            "rows": [{k: _json_value(v) for k, v in r.items()} for r in rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if rows:
        w.writerow(list(rows[0].keys()))
        for r in rows:
            w.writerow([_cell(v) for v in r.values()])
    return buf.getvalue()


# -- commands ----------------------------------------------------------------------


def _cmd_factor(c, workers):
    from .gaussint import factorize, r2_count

    f = factorize(c["n"])
    row = {
        "n": f.n,
        "alpha2": f.alpha2,
        "split": tuple(f"{p}^{a}" for p, a, _ in f.split),
        "gaussian_primes": tuple(f"{P.re}+{P.im}i" for _, _, P in f.split),
        "inert": tuple(f"{q}^{b}" for q, b in f.inert),
        "in_S": f.in_S,
        "in_S_prime": f.in_S_prime,
        "r2": r2_count(f.n),
    }
    return [row], f"n={f.n} r2={row['r2']} omega={f.omega}"


def _cmd_points(c, workers):
    from .gaussint import lattice_points

    pts = lattice_points(c["n"])
    rows = [{"x": int(x), "y": int(y), "angle": float(a)} for (x, y), a in zip(pts.points, pts.angles)]
    return rows, f"n={c['n']} N={len(pts)}"


def _cmd_corr(c, workers):
    from .correlations import spectral_correlations
    from .gaussint import lattice_points

    pts = lattice_points(c["n"])
    if len(pts) == 0:
        raise ArgumentError(f"n={c['n']} is not a sum of two squares")
    rep = spectral_correlations(pts, c["l"], c["budget"])
    row = {"n": rep.n, "N": len(pts), "l": rep.l, "count": rep.count, "min_gap_sq": rep.min_nonzero_norm_sq}
    return [row], f"S(l={rep.l}, n={rep.n}) = {rep.count}"


def _cmd_quasi(c, workers):
    from .correlations import quasi_correlations
    from .gaussint import lattice_points

    pts = lattice_points(c["n"])
    if len(pts) == 0:
        raise ArgumentError(f"n={c['n']} is not a sum of two squares")
    rep = quasi_correlations(pts, c["l"], c["K"], c["budget"], c["witness_cap"])
    wit = tuple(" ".join(f"({x},{y})" for x, y in t) for t in rep.witnesses)
    row = {"n": rep.n, "N": len(pts), "l": rep.l, "K": rep.K, "count": rep.count,
           "min_gap_sq": rep.min_nonzero_norm_sq, "witnesses": wit}
    return [row], f"Q(l={rep.l}, n={rep.n}, K={rep.K!r}) = {rep.count}, min_gap_sq={rep.min_nonzero_norm_sq}"


def _cmd_census(c, workers):
    from .correlations import ThresholdRule, census

    rule = ThresholdRule(c["rule"], c["value"])
    rows = census(c["X"], c["l"], rule, c["budget"], c["include_one"], workers)
    out = [{"n": r.n, "N": r.N, "l": r.l, "K": r.K, "min_gap_sq": r.min_gap_sq, "count": r.count,
            "nonempty": r.nonempty, "status": r.status} for r in rows]
    done = [r for r in rows if r.count is not None]
    nonempty = sum(r.count > 0 for r in done)
    flagged = len(rows) - len(done)
    frac = nonempty / len(done) if done else math.nan
    return out, f"{len(rows)} rows, nonempty fraction {frac!r}, {flagged} over budget"


def _cmd_measure(c, workers):
    from .gaussint import lattice_points
    from .spectral import circular_discrepancy, fourier_coefficient, interval_discrepancy, spectral_measure

    pts = lattice_points(c["n"])
    if len(pts) == 0:
        raise ArgumentError(f"n={c['n']} is not a sum of two squares")
    m = spectral_measure(pts)
    row = {"n": c["n"], "N": len(pts), "mu4": fourier_coefficient(m, 4),
           "discrepancy": interval_discrepancy(m), "circular_discrepancy": circular_discrepancy(m)}
    return [row], f"n={c['n']} N={len(pts)} mu4={row['mu4']!r} discrepancy={row['discrepancy']!r}"


def _cmd_pmq(c, workers):
    from .construct import build_pmq

    r = build_pmq(c["w"], c["tol"], c["m"], c["p_max"])
    row = {"n": r.n, "p": r.params["p"], "q": r.params["q"], "m": r.params["m"], "target": r.target,
           "achieved": r.achieved, "abs_error": abs(r.achieved - r.target)}
    return [row], f"n={r.n} = {row['p']}^{row['m']} * {row['q']}, mu4={r.achieved!r}"


def _cmd_3p(c, workers):
    from .construct import build_three_prime

    r = build_three_prime(c["angle_tol"], c["p_max"])
    triple = r.witnesses[0]
    row = {"n": r.n, "primes": r.params["primes"], "norm_sq": r.params["norm_sq"], "achieved": r.achieved,
           "triple": tuple(f"({x},{y})" for x, y in triple)}
    return [row], f"n={r.n} |xi1+xi2+xi3|/sqrt(n)={r.achieved!r}"


def _cmd_simulate(c, workers):
    from .nodal.experiments import mean_length_experiment

    r = mean_length_experiment(c["n"], c["s"], c["trials"], c["seed"], c["h"] or None, workers)
    row = {"n": r.n, "s": r.s, "trials": r.trials, "mean": r.mean, "stderr": r.stderr,
           "expected": r.expected, "ratio": r.ratio, "grid_step": r.grid_step, "seed": r.seed}
    return [row], f"mean length {r.mean!r} vs Kac-Rice {r.expected!r} (ratio {r.ratio!r})"


def _cmd_moments(c, workers):
    from .gaussint import lattice_points
    from .nodal.kacrice import moment_integral

    pts = lattice_points(c["n"])
    if len(pts) == 0:
        raise ArgumentError(f"n={c['n']} is not a sum of two squares")
    closed, quad, tail = moment_integral(pts, c["l"], c["s"])
    row = {"n": c["n"], "N": len(pts), "l": c["l"], "s": c["s"], "closed_form": float(closed),
           "quadrature": float(quad), "bessel_tail": float(tail),
           "rel_diff": abs(closed - quad) / abs(quad) if quad else math.nan}
    return [row], f"closed form {row['closed_form']!r}, quadrature {row['quadrature']!r}"


def _cmd_variance(c, workers):
    from .nodal.experiments import variance_experiment

    r = variance_experiment(c["n"], c["s"], c["trials"], c["seed"], K=c["K"] or None, torus=c["torus"],
                            kacrice=c["kacrice"], workers=workers)
    return [r.row()], f"mc_var={r.mc_var!r} formula={r.formula!r} ratio={r.mc_var / r.formula!r}"


def _cmd_cf(c, workers):
    from .nodal.experiments import cf_compare

    tab = cf_compare(c["n"], c["R"], c["t"], c["trials"], c["seed"], c["M"], workers=workers,
                     bootstrap=c["bootstrap"])
    return [r.row() for r in tab.rows], f"max abs_diff {tab.max_abs_diff!r} (discrepancy {tab.discrepancy!r})"


def _cmd_stability(c, workers):
    from .nodal.experiments import arw_stability_trial, stability_check
    from .nodal.fields import AffineField

    if c["mode"] == "plane":
        results = [(None, stability_check(AffineField(0.0, 1.0), AffineField(c["tau"]), C=c["C"]))]
    else:
        seeds = [c["seed"] + i for i in range(c["seeds"])]
        results = list(zip(seeds, _parallel.ordered_map(
            lambda sd: arw_stability_trial(c["n"], sd, c["eps"], c["R"]), seeds, workers)))
    rows = []
    for sd, r in results:
        rows.append({"seed": sd, "beta": r.beta, "M": r.M, "tau": r.tau, "L_h": r.L_h,
                     "L_h_plus_theta": r.L_h_plus_theta, "rel_change": r.rel_change, "bound": r.bound,
                     "hypotheses_ok": r.hypotheses_ok, "bound_satisfied": r.bound_satisfied})
    ok = sum(r["bound_satisfied"] for r in rows)
    return rows, f"bound satisfied on {ok}/{len(rows)}"


COMMANDS: dict[str, Callable] = {
    "factor": _cmd_factor,
    "points": _cmd_points,
    "corr": _cmd_corr,
    "quasi": _cmd_quasi,
    "census": _cmd_census,
    "measure": _cmd_measure,
    "construct-pmq": _cmd_pmq,
    "construct-3p": _cmd_3p,
    "simulate": _cmd_simulate,
    "moments": _cmd_moments,
    "variance": _cmd_variance,
    "cf": _cmd_cf,
    "stability": _cmd_stability,
}


def version_text() -> str:
    from .kernels import BACKEND

    return (
        f"arithwave {__version__}\n"
        f"backend={BACKEND}\n"
        f"python={platform.python_version()}\n"
        f"numpy={np.__version__}\n"
    )


# -- entry point ---------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="arithwave", description="Experiments on lattice points and arithmetic random waves.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, schema in SCHEMAS.items():
        sp = sub.add_parser(name)
        if name == "version":
            continue
        sp.add_argument("--config", help="key=value file; flags override it")
        sp.add_argument("--workers", type=int, default=None,
                        help=f"worker threads (the {_parallel.ENV_THREADS} variable takes precedence)")
        for key, p in {**schema, **COMMON}.items():
            sp.add_argument(f"--{key}", dest=key, default=None, help=p.help or None)
    return parser


def _workers(flag: int | None) -> int:
    if os.environ.get(_parallel.ENV_THREADS):
        return _parallel.default_workers()
    if flag is not None:
        if flag < 1:
            raise ArgumentError("workers must be positive")
        return flag
    return _parallel.default_workers()


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "version":
            sys.stdout.write(version_text())
            return EXIT_OK
        keys = {**SCHEMAS[args.command], **COMMON}
        flags = {k: getattr(args, k) for k in keys if getattr(args, k) is not None}
        if args.config:
            cfg = validate_config(args.config, args.command, flags)
        else:
            cfg = normalize(args.command, flags)
        workers = _workers(args.workers)
        rows, summary = COMMANDS[args.command](cfg.values, workers)
        text = render(cfg, rows)
        out = cfg.values["output"]
        if out:
            path = Path(out)
            path.write_text(text)
            path.with_name(path.name + ".config").write_text("\n".join(cfg.lines()) + "\n")
            print(f"{args.command}: {summary} -> {out}")
        else:
            sys.stdout.write(text)
            print(f"{args.command}: {summary}", file=sys.stderr)
        return EXIT_OK
    except ArgumentError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ARGUMENT
    except ResourceError as e:
        print(f"resource error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except ArithwaveError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ARGUMENT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
