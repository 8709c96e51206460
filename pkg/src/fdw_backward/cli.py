"""Command-line front end.

    fdw-backward <command> [options] [--json | --csv] [--threads N] [--seed S]

Exit status: 0 success, 1 input or numerical error, 2 ill-posed backward
problem (diagnostics are still written), 64 usage error (the problem-file
schema is printed to stderr).
"""

from __future__ import annotations

import argparse
import io as _stdio
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

import numpy as np

from . import io as fio
from .contour_bound import bound_report, default_config, safe_time_threshold
from .errors import IllPosedError
from .psi_zero import BRACKET_RTOL, LINEAR_POINTS, default_zeros, find_zeros, psi_many
from .solver import (
    PSI_FLOOR,
    backward,
    empirical_stability,
    exceptional_set,
    forward,
    null_datum,
    ode_backward,
    ode_forward,
)
from .special_fn import MLQuery, ml
from .spectral_model import SpectrumKind, dirichlet_laplacian_1d, evaluate, norm_l2

__all__ = ["COMMANDS", "RunConfig", "UsageError", "build_parser", "run", "main"]

logger = logging.getLogger(__name__)

COMMANDS = (
    "ml",
    "psi-zeros",
    "psi-table",
    "bound",
    "lambda-set",
    "forward",
    "backward",
    "nullmode",
    "roundtrip",
    "ode",
)
# plot data defaults to CSV, everything else to JSON
_CSV_DEFAULT = {"psi-table"}

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ILL_POSED = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation: the command, its options and output settings."""

    command: str
    options: dict = field(default_factory=dict)
    output: str = "json"
    seed: int = 0
    threads: int = 1
    problem: Path | None = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.output not in ("json", "csv"):
            raise UsageError(f"unknown output format {self.output!r}")
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")
        if self.problem is not None and not Path(self.problem).is_file():
            raise FileNotFoundError(f"problem file {self.problem} does not exist")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_common(p: argparse.ArgumentParser) -> None:
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="output", action="store_const", const="json")
    fmt.add_argument("--csv", dest="output", action="store_const", const="csv")
    p.add_argument("--threads", type=int, default=1, help="worker threads for per-mode work")
    p.add_argument("--seed", type=int, default=0, help="seed for randomised commands")


def _add_spectrum(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", type=Path, help="problem file supplying the spectrum")
    p.add_argument("--length", type=float, default=math.pi, help="interval length of the built-in Laplacian")
    p.add_argument("--modes", type=int, default=16, help="number of modes of the built-in Laplacian")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fdw-backward", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ml", help="Mittag-Leffler function E_{a,b}(-eta)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--eta", type=float, required=True)

    p = sub.add_parser("psi-zeros", help="positive zeros of psi")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--grid-points", type=int, default=LINEAR_POINTS)
    p.add_argument("--bracket-tol", type=float, default=BRACKET_RTOL)

    p = sub.add_parser("psi-table", help="psi sampled on a grid (plot data)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--eta-min", type=float, default=0.0)
    p.add_argument("--eta-max", type=float, required=True)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--log", action="store_true", help="log-spaced samples (needs eta-min > 0)")

    p = sub.add_parser("bound", help="upper bound on the zeros of psi and safe final time")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--theta", type=float, help="path angle in (pi*alpha/2, pi)")
    p.add_argument("--mu-min", type=float, help="smallest eigenvalue, adds the safe final time")

    p = sub.add_parser("lambda-set", help="exceptional final times up to T_max")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--t-max", type=float, help="default: largest possible exceptional time")
    _add_spectrum(p)

    p = sub.add_parser("forward", help="evolve initial data a, b to time t")
    p.add_argument("--problem", type=Path, required=True)
    p.add_argument("--t", type=float, help="overrides 't' (or 'T') of the problem file")
    p.add_argument("--grid-points", type=int, default=128, help="profile resolution for --csv")

    p = sub.add_parser("backward", help="recover a, b from final data aT, bT")
    p.add_argument("--problem", type=Path, required=True)
    p.add_argument("--T", dest="T", type=float, help="overrides 'T' of the problem file")
    p.add_argument("--psi-floor", type=float)
    p.add_argument("--force", action="store_true", help="zero refused modes instead of failing")
    p.add_argument("--grid-points", type=int, default=128, help="profile resolution for --csv")

    p = sub.add_parser("nullmode", help="non-uniqueness witness at T = (eta_k/mu_n)^(1/alpha)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--mode", type=int, default=1, help="1-based mode index n")
    p.add_argument("--zero", type=int, default=1, help="1-based zero index k")
    _add_spectrum(p)

    p = sub.add_parser("roundtrip", help="backward(forward(.)) on random data with norm ratios")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--T", dest="T", type=float, help="final time (default: t-factor x safe time)")
    p.add_argument("--t-factor", type=float, default=1.1)
    _add_spectrum(p)

    p = sub.add_parser("ode", help="scalar equation d^a v = -lambda v")
    p.add_argument("--direction", choices=("forward", "backward"), required=True)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--t", type=float, required=True, help="evaluation time (forward) or final time (backward)")
    p.add_argument("--a", type=float, required=True, help="v(0) (forward) or v(t) (backward)")
    p.add_argument("--b", type=float, required=True, help="v'(0) (forward) or v'(t) (backward)")
    p.add_argument("--psi-floor", type=float, default=PSI_FLOOR)

    for sp in sub.choices.values():
        _add_common(sp)
    return parser


def config_from_args(argv: list[str]) -> RunConfig:
    ns = build_parser().parse_args(argv)
    opts = vars(ns).copy()
    command = opts.pop("command")
    output = opts.pop("output") or ("csv" if command in _CSV_DEFAULT else "json")
    seed = opts.pop("seed")
    threads = opts.pop("threads")
    problem = opts.pop("problem", None)
    return RunConfig(command, opts, output, seed, threads, problem)


# -- command handlers: return (json payload, csv table or None) ---------------


def _spectrum(cfg: RunConfig):
    if cfg.problem is not None:
        return fio.load_problem(cfg.problem).spectrum
    return dirichlet_laplacian_1d(cfg.options["length"], cfg.options["modes"])


def _cmd_ml(cfg):
    o = cfg.options
    v = ml(MLQuery(o["alpha"], o["beta"], o["eta"]))
    payload = {
        "alpha": o["alpha"],
        "beta": o["beta"],
        "eta": o["eta"],
        "value": v.value,
        "abs_error_estimate": v.abs_error_estimate,
        "regime": v.regime.value,
    }
    table = (["alpha", "beta", "eta", "value"], [[o["alpha"]], [o["beta"]], [o["eta"]], [v.value]])
    return payload, table


def _cmd_psi_zeros(cfg):
    o = cfg.options
    if (o["grid_points"], o["bracket_tol"]) == (LINEAR_POINTS, BRACKET_RTOL):
        zs = default_zeros(o["alpha"])
    else:
        zs = find_zeros(o["alpha"], grid_points=o["grid_points"], bracket_tol=o["bracket_tol"])
    payload = zs.to_dict()
    z = zs.zeros
    table = (
        ["index", "eta", "lo", "hi", "residual"],
        [
            np.arange(1, len(z) + 1),
            np.array([q.eta for q in z]),
            np.array([q.lo for q in z]),
            np.array([q.hi for q in z]),
            np.array([q.residual for q in z]),
        ],
    )
    return payload, table


def _cmd_psi_table(cfg):
    o = cfg.options
    if o["points"] < 2 or not o["eta_max"] > o["eta_min"] >= 0:
        raise UsageError("psi-table needs 0 <= eta-min < eta-max and at least 2 points")
    if o["log"]:
        if o["eta_min"] <= 0:
            raise UsageError("--log needs eta-min > 0")
        etas = np.geomspace(o["eta_min"], o["eta_max"], o["points"])
    else:
        etas = np.linspace(o["eta_min"], o["eta_max"], o["points"])
    values = psi_many(o["alpha"], etas)
    payload = {"alpha": o["alpha"], "rows": [{"eta": e, "psi": v} for e, v in zip(etas, values)]}
    return payload, (["eta", "psi"], [etas, values])


def _cmd_bound(cfg):
    o = cfg.options
    ccfg = default_config(o["alpha"], theta=o["theta"])
    payload = bound_report(o["alpha"], ccfg).to_dict()
    if o["mu_min"] is not None:
        payload["mu_min"] = o["mu_min"]
        payload["safe_time"] = safe_time_threshold(o["alpha"], o["mu_min"], ccfg)
    names = list(payload)
    return payload, (["name", "value"], [np.array(names), np.array([float(payload[k]) for k in names])])


def _cmd_lambda_set(cfg):
    o = cfg.options
    s = _spectrum(cfg)
    zs = default_zeros(o["alpha"])
    t_max = o["t_max"]
    if t_max is None:
        t_max = float((zs.largest / s.mu_min) ** (1.0 / o["alpha"]))
    lam = exceptional_set(s, zs, o["alpha"], t_max)
    payload = lam.to_dict()
    table = (
        ["T", "n", "k"],
        [lam.times, np.array([e.n for e in lam.entries], dtype=int), np.array([e.k for e in lam.entries], dtype=int)],
    )
    return payload, table


def _profile_or_modes(s, names, coeffs, points):
    if s.kind is SpectrumKind.DIRICHLET_LAPLACIAN_1D:
        profiles = [evaluate(c, s, points) for c in coeffs]
        return ["x", *names], [profiles[0].x, *[g.values for g in profiles]]
    return ["mode", *names], [s.mode_of_slot(), *[c.values for c in coeffs]]


def _cmd_forward(cfg):
    o = cfg.options
    pspec = fio.load_problem(cfg.problem)
    pspec.require("a", "b")
    t = o["t"] if o["t"] is not None else (pspec.t if pspec.t is not None else pspec.T)
    if t is None:
        raise fio.ProblemSpecError("forward needs a time: 't'/'T' in the problem file or --t")
    u, du = forward(pspec.spectrum, pspec.a, pspec.b, pspec.alpha, t, threads=cfg.threads)
    payload = {"alpha": pspec.alpha, "t": t, "u": u.values, "du": du.values}
    return payload, _profile_or_modes(pspec.spectrum, ["u", "du"], [u, du], o["grid_points"])


def _ill_posed_payload(exc: IllPosedError) -> dict:
    return {"status": "ill_posed", "modes": list(exc.modes), "diagnostics": exc.diagnostics.to_dict()}


def _cmd_backward(cfg):
    o = cfg.options
    pspec = fio.load_problem(cfg.problem)
    pspec.require("aT", "bT")
    T = o["T"] if o["T"] is not None else pspec.T
    if T is None:
        raise fio.ProblemSpecError("backward needs 'T' in the problem file or --T")
    floor = o["psi_floor"] or pspec.psi_floor or PSI_FLOOR
    a, b, diag = backward(
        pspec.spectrum, pspec.aT, pspec.bT, pspec.alpha, T, floor, force=o["force"], threads=cfg.threads
    )
    payload = {"status": "ok", "a": a.values, "b": b.values, "diagnostics": diag.to_dict()}
    return payload, _profile_or_modes(pspec.spectrum, ["a", "b"], [a, b], o["grid_points"])


def _cmd_nullmode(cfg):
    o = cfg.options
    s = _spectrum(cfg)
    alpha = o["alpha"]
    if not 1 <= o["mode"] <= s.n_modes:
        raise UsageError(f"--mode must lie in 1..{s.n_modes}")
    zs = default_zeros(alpha)
    if not 1 <= o["zero"] <= len(zs):
        raise UsageError(f"--zero must lie in 1..{len(zs)}")
    mu = float(s.eigenvalues[o["mode"] - 1])
    T = float((zs.zeros[o["zero"] - 1].eta / mu) ** (1.0 / alpha))
    a, b, nm = null_datum(s, alpha, T, o["mode"])
    u, du = forward(s, a, b, alpha, T, threads=cfg.threads)
    payload = {
        "alpha": alpha,
        "T": T,
        "mode": o["mode"],
        "zero_index": o["zero"],
        "eta": nm.eta,
        "psi": nm.psi,
        "a0": nm.a0,
        "b0": nm.b0,
        "a": a.values,
        "b": b.values,
        "final_u_norm": norm_l2(u),
        "final_du_norm": norm_l2(du),
    }
    return payload, (["mode", "a", "b"], [s.mode_of_slot(), a.values, b.values])


def _cmd_roundtrip(cfg):
    o = cfg.options
    s = _spectrum(cfg)
    alpha = o["alpha"]
    T = o["T"] if o["T"] is not None else o["t_factor"] * safe_time_threshold(alpha, s.mu_min)
    rep = empirical_stability(s, alpha, T, samples=o["samples"], seed=cfg.seed, threads=cfg.threads)
    payload = {"alpha": alpha, "T": T, "seed": cfg.seed, **rep.to_dict()}
    names = list(payload)
    return payload, (["name", "value"], [np.array(names), np.array([float(payload[k]) for k in names])])


def _cmd_ode(cfg):
    o = cfg.options
    if o["direction"] == "forward":
        v, dv = ode_forward(o["lam"], o["a"], o["b"], o["alpha"], o["t"])
        payload = {"direction": "forward", "status": "ok", "t": o["t"], "a": v, "b": dv}
    else:
        a, b, diag = ode_backward(o["lam"], o["a"], o["b"], o["alpha"], o["t"], o["psi_floor"])
        payload = {
            "direction": "backward",
            "status": "ok",
            "t": o["t"],
            "a": a,
            "b": b,
            "diagnostics": diag.to_dict(),
        }
    return payload, (["name", "value"], [np.array(["a", "b"]), np.array([payload["a"], payload["b"]])])


_HANDLERS = {
    "ml": _cmd_ml,
    "psi-zeros": _cmd_psi_zeros,
    "psi-table": _cmd_psi_table,
    "bound": _cmd_bound,
    "lambda-set": _cmd_lambda_set,
    "forward": _cmd_forward,
    "backward": _cmd_backward,
    "nullmode": _cmd_nullmode,
    "roundtrip": _cmd_roundtrip,
    "ode": _cmd_ode,
}


def _json_text(command: str, payload: dict) -> str:
    text = fio.dumps(payload)
    # what is written must parse back into something its own schema accepts
    fio.validate_output(command, json.loads(text))
    return text + "\n"


def _emit(cfg: RunConfig, payload: dict, table, out: IO[str]) -> None:
    text = _json_text(cfg.command, payload)
    if cfg.output == "csv" and table is not None:
        fio.write_csv(out, *table)
    else:
        out.write(text)


def _usage(err: IO[str], message: str) -> int:
    err.write(f"error: {message}\n\nProblem file schema:\n{fio.problem_schema_text()}\n")
    return EXIT_USAGE


def run(cfg: RunConfig, out: IO[str] | None = None, err: IO[str] | None = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        cfg.validate()
        # buffer so that a failure never leaves partial output behind
        buf = _stdio.StringIO()
        payload, table = _HANDLERS[cfg.command](cfg)
        _emit(cfg, payload, table, buf)
        out.write(buf.getvalue())
        return EXIT_OK
    except IllPosedError as exc:
        payload = _ill_posed_payload(exc)
        if cfg.command == "ode":
            payload = {"direction": "backward", **payload}
        out.write(_json_text(cfg.command, payload))
        err.write(f"ill-posed: {exc}\n")
        return EXIT_ILL_POSED
    except (UsageError, fio.ProblemSpecError) as exc:
        return _usage(err, str(exc))
    except (ValueError, ArithmeticError, OSError, RuntimeError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_ERROR


def main(argv: list[str] | None = None, out: IO[str] | None = None, err: IO[str] | None = None) -> int:
    err = sys.stderr if err is None else err
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = config_from_args(argv)
    except UsageError as exc:
        return _usage(err, str(exc))
    return run(cfg, out, err)


if __name__ == "__main__":
    raise SystemExit(main())
