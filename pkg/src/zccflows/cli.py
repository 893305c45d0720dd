"""Command-line harness.

Exit codes: 0 pass, 1 verification failure, 2 usage or configuration error.
Every JSON report carries ``"schema": "zccflows/1"``, the resolved config
and the seed.  Settings come from flags, optionally layered over a JSON
``--config`` file (flags win).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import freelie, sl3
from .exprfun import PlusPart, Proj, from_json, theorem_residual
from .flows import (SCHEMA, IntegratorConfig, dressed_flow, dressing_solve, flow, word_criterion_check,
                    write_trajectory_csv, zcc_check)
from .integrate import METHODS, IntegrationError
from .liealg import (SL3, SPLITTINGS, LieAlgebraError, check_splitting, frobenius, get_splitting,
                     matrix_from_json)
from .pvf import lax, lift, promote

log = logging.getLogger("zccflows")

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- helpers ------------------------------------------------------------------


def atomic_write(path, text: str) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        raise UsageError(f"output directory {path.parent} does not exist")
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    except OSError as exc:
        raise UsageError(f"cannot write to {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_report(report: dict, out) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _matrix_arg(value, default):
    if value is None:
        return default
    if isinstance(value, str):
        try:
            value = json.loads(value)
        except json.JSONDecodeError as exc:
            raise UsageError(f"matrix literal is not valid JSON: {exc}") from exc
    try:
        return SL3.validate(matrix_from_json(value))
    except LieAlgebraError as exc:
        raise UsageError(str(exc)) from exc


def _grid_arg(value) -> list[float]:
    if isinstance(value, (list, tuple)):
        vals = [float(v) for v in value]
    else:
        try:
            vals = [float(v) for v in str(value).split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"bad grid {value!r}") from exc
    if not vals:
        raise UsageError("grid must be non-empty")
    return vals


def _integrator(cfg: dict) -> IntegratorConfig:
    try:
        return IntegratorConfig(
            method=cfg["integrator"],
            step=cfg["step"],
            rel_tol=cfg["rtol"],
            abs_tol=cfg["atol"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _check_tol(cfg: dict) -> None:
    if not cfg["tol"] > 0:
        raise UsageError("--tol must be positive")


# -- subcommands --------------------------------------------------------------


def run_verify_theorem(cfg: dict) -> tuple[int, dict]:
    _check_tol(cfg)
    if cfg["degree"] < 2:
        raise UsageError("--degree must be at least 2")
    letters = [int(v) for v in _grid_arg(cfg["letters"])]
    if any(n < 1 for n in letters) or cfg["points"] < 1:
        raise UsageError("letters and points must be positive")
    split = get_splitting(cfg["splitting"])
    rng = np.random.default_rng(cfg["seed"])
    rows = []
    worst = {"scaled_residual": 0.0, "word": None, "n_letters": None}
    for n in letters:
        pts = [SL3.random(rng, cfg["points"]) for _ in range(n)]
        norm = np.sqrt(sum(frobenius(p) ** 2 for p in pts))
        families = [("lyndon", freelie.commutator_ideal_basis(n, cfg["degree"]))]
        if cfg["right_nested"]:
            families.append(("right-nested", freelie.right_nested_monomials(n, cfg["degree"])))
        for family, trees in families:
            for tree in trees:
                res = theorem_residual(tree, pts, split)
                scaled = float(np.max(res / (1.0 + norm) ** tree.degree))
                rows.append({
                    "n_letters": n, "family": family, "word": tree.to_json(),
                    "degree": tree.degree, "max_residual": float(np.max(res)),
                    "scaled_residual": scaled,
                })
                if scaled > worst["scaled_residual"] or worst["word"] is None:
                    worst = {"scaled_residual": scaled, "word": tree.to_json(), "n_letters": n}
    passed = worst["scaled_residual"] <= cfg["tol"]
    report = {
        "kind": "verify-theorem",
        "splitting": split.name,
        "splitting_check": check_splitting(split),
        "n_words": len(rows),
        "worst": worst,
        "max_residual": max(r["max_residual"] for r in rows),
        "pass": passed,
        "words": rows,
    }
    return (EXIT_PASS if passed else EXIT_FAIL), report


def _random_probes(cfg: dict) -> list:
    if cfg["probes"] < 1:
        raise UsageError("--probes must be at least 1")
    rng = np.random.default_rng(cfg["seed"])
    return list(SL3.random(rng, cfg["probes"]))


def _xi(cfg):
    return lax(PlusPart(Proj(1, 1)), get_splitting(cfg["splitting"]))


def run_zcc(cfg: dict) -> tuple[int, dict]:
    _check_tol(cfg)
    a = _matrix_arg(cfg["a"], sl3.A0)
    b = _matrix_arg(cfg["b"], sl3.B0)
    probes = _random_probes(cfg)
    rep = zcc_check(_xi(cfg), a, b, probes, cfg["s"], cfg["t"], _integrator(cfg), cfg["tol"])
    body = rep.to_json()
    body.pop("schema")
    code = EXIT_PASS if rep.passed else EXIT_FAIL
    return code, body


def run_word_criterion(cfg: dict) -> tuple[int, dict]:
    _check_tol(cfg)
    if cfg["degree"] < 2:
        raise UsageError("--degree must be at least 2")
    a = _matrix_arg(cfg["a"], sl3.A0)
    b = _matrix_arg(cfg["b"], sl3.B0)
    probes = _random_probes(cfg)
    rep = word_criterion_check(_xi(cfg), a, b, probes, cfg["degree"], cfg["tol"])
    body = rep.to_json()
    body.pop("schema")
    return (EXIT_PASS if rep.passed else EXIT_FAIL), body


def run_flow(cfg: dict) -> tuple[int, dict]:
    """Integrate the lift of ``xi_f`` and write the trajectory as CSV."""
    if cfg["function"] is None:
        f = PlusPart(Proj(1, 1))
    else:
        src = cfg["function"]
        if isinstance(src, str):
            try:
                src = json.loads(Path(src).read_text() if Path(src).is_file() else src)
            except (json.JSONDecodeError, OSError) as exc:
                raise UsageError(f"cannot read --function: {exc}") from exc
        try:
            f = from_json(src)
        except (ValueError, LieAlgebraError) as exc:
            raise UsageError(str(exc)) from exc
    xi = lax(f, get_splitting(cfg["splitting"]))
    if cfg["state"] is None:
        state = [sl3.A0] * (xi.order + 1)
    else:
        raw = json.loads(cfg["state"]) if isinstance(cfg["state"], str) else cfg["state"]
        state = [_matrix_arg(m, None) for m in raw]
    if len(state) != xi.order + 1:
        raise UsageError(f"--state needs {xi.order + 1} matrices for a function of arity {xi.order}")
    final, times, states = flow(lift(xi), state, cfg["time"], _integrator(cfg), record=True)
    names = [f"x{i}" for i in range(1, xi.order + 1)] + ["y"]
    if cfg["out"]:
        _write_csv_atomic(Path(cfg["out"]), times, states, names)
    report = {
        "kind": "flow",
        "function": repr(f),
        "n_steps": len(times) - 1,
        "final": [np.asarray(m).tolist() for m in final],
        "pass": True,
    }
    return EXIT_PASS, report


def _write_csv_atomic(path: Path, times, states, names):
    if not path.parent.exists():
        raise UsageError(f"output directory {path.parent} does not exist")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        write_trajectory_csv(tmp, times, states, names)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def run_sl3_demo(cfg: dict) -> tuple[int, dict]:
    """Closed forms vs numerics for every quantity of the sl_3 example."""
    _check_tol(cfg)
    grid = _grid_arg(cfg["grid"])
    icfg = _integrator(cfg)
    xi = lax(PlusPart(Proj(1, 1)))
    xi1, xi2 = promote(xi, 1), promote(xi, 2)
    tables = {name: [] for name in ("a_s", "sigma_s", "b_s", "b_st", "tau_st", "a_st")}
    for s in grid:
        (a_s, b_s, _), sigma = dressed_flow(xi1, [sl3.A0, sl3.B0, sl3.A0], s, cfg=icfg)
        sigma_direct = dressing_solve(sl3.a_plus_of_s, s, cfg=icfg)
        tables["a_s"].append(((s,), a_s, sl3.closed_form_a(s)))
        tables["sigma_s"].append(((s,), sigma_direct, sl3.closed_form_sigma(s)))
        tables["b_s"].append(((s,), b_s, sl3.closed_form_b_s(s)))
        for t in grid:
            (a_st, b_st, _), tau = dressed_flow(xi2, [a_s, b_s, a_s], t, g0=sigma, cfg=icfg)
            tables["b_st"].append(((s, t), b_st, sl3.closed_form_b_st(s, t)))
            tables["tau_st"].append(((s, t), tau, sl3.closed_form_tau(s, t)))
            tables["a_st"].append(((s, t), a_st, sl3.closed_form_a_st(s, t)))
    errors = {}
    out_dir = Path(cfg["out"]) if cfg["out"] else None
    if out_dir is not None and not out_dir.is_dir():
        raise UsageError(f"--out must be an existing directory for sl3-demo, got {out_dir}")
    for name, rows in tables.items():
        errs = [float(np.max(np.abs(num - exact))) for _, num, exact in rows]
        errors[name] = max(errs)
        if out_dir is not None:
            lines = []
            params = ["s"] if len(rows[0][0]) == 1 else ["s", "t"]
            header = params + [f"{kind}_{i}{j}" for kind in ("closed", "numeric") for i in range(1, 4) for j in range(1, 4)]
            header.append("max_abs_error")
            lines.append(",".join(header))
            for (p, num, exact), err in zip(rows, errs):
                vals = [repr(float(v)) for v in p]
                vals += [repr(float(v)) for v in np.asarray(exact).reshape(-1)]
                vals += [repr(float(v)) for v in np.asarray(num).reshape(-1)]
                vals.append(repr(err))
                lines.append(",".join(vals))
            atomic_write(out_dir / f"{name}.csv", "\n".join(lines) + "\n")
    worst = max(errors.values())
    passed = worst <= cfg["tol"]
    report = {"kind": "sl3-demo", "grid": grid, "max_errors": errors, "max_error": worst, "pass": passed}
    return (EXIT_PASS if passed else EXIT_FAIL), report


COMMANDS = {
    "verify-theorem": run_verify_theorem,
    "zcc-check": run_zcc,
    "word-criterion": run_word_criterion,
    "flow": run_flow,
    "sl3-demo": run_sl3_demo,
}

DEFAULTS = {
    "common": {"seed": 0, "integrator": "dp54_adaptive", "step": 1e-2, "rtol": 1e-10, "atol": 1e-12,
               "splitting": "skew-upper", "out": None, "report": None},
    "verify-theorem": {"tol": 1e-9, "degree": 5, "letters": "2,3", "points": 25, "right_nested": False},
    "zcc-check": {"tol": 1e-6, "a": None, "b": None, "s": 1.0, "t": 1.0, "probes": 5},
    "word-criterion": {"tol": 1e-5, "a": None, "b": None, "degree": 3, "probes": 3},
    "flow": {"tol": 1e-6, "function": None, "state": None, "time": 1.0},
    "sl3-demo": {"tol": 1e-6, "grid": "0,0.5,1,1.5"},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zccflows", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file of settings; flags override it")
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--out", help="report path; CSV path for flow, directory for sl3-demo")
        p.add_argument("--integrator", choices=METHODS)
        p.add_argument("--step", type=float, help="RK4 step")
        p.add_argument("--rtol", type=float)
        p.add_argument("--atol", type=float)
        p.add_argument("--splitting", choices=sorted(SPLITTINGS))
        return p

    p = common(sub.add_parser("verify-theorem", help="sweep the projected word identity"))
    p.add_argument("--degree", type=int)
    p.add_argument("--letters", help="comma-separated letter counts")
    p.add_argument("--points", type=int)
    p.add_argument("--right-nested", action="store_true", default=None)

    for name, helptext in (("zcc-check", "compare both orders of the two flows"),
                           ("word-criterion", "evaluate commutator words of the promoted fields")):
        p = common(sub.add_parser(name, help=helptext))
        p.add_argument("--a", help="JSON matrix literal")
        p.add_argument("--b", help="JSON matrix literal")
        p.add_argument("--probes", type=int, help="number of random probe points")
        if name == "zcc-check":
            p.add_argument("--s", type=float)
            p.add_argument("--t", type=float)
        else:
            p.add_argument("--degree", type=int)

    p = common(sub.add_parser("flow", help="integrate a Lax flow and write its trajectory"))
    p.add_argument("--function", help="expression JSON (inline or file)")
    p.add_argument("--state", help="JSON list of initial matrices")
    p.add_argument("--time", type=float)
    p.add_argument("--report", help="JSON report path")

    p = common(sub.add_parser("sl3-demo", help="closed forms vs numerics for the sl3 example"))
    p.add_argument("--grid", help="comma-separated values used for both s and t")
    p.add_argument("--report", help="JSON report path")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS["common"])
    cfg.update(DEFAULTS[args.command])
    if getattr(args, "config", None):
        try:
            file_cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(file_cfg) - set(cfg)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    for key, value in vars(args).items():
        if key in cfg and value is not None:
            cfg[key] = value
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    started = time.perf_counter()
    try:
        cfg = resolve_config(args)
        code, body = COMMANDS[args.command](cfg)
        report = {"schema": SCHEMA, "command": args.command, "config": cfg, "seed": cfg["seed"], **body}
        report["wall_time"] = time.perf_counter() - started
        out = cfg["report"] if args.command in ("flow", "sl3-demo") else cfg["out"]
        dump_report(report, out)
    except UsageError as exc:
        print(f"zccflows {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LieAlgebraError, ValueError) as exc:
        print(f"zccflows {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrationError as exc:
        print(f"zccflows {args.command}: integration failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    log.info("%s finished with exit code %d", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
