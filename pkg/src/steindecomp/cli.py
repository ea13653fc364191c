"""Command-line entry point: bound | simulate | rate | verify | distance.

Exit codes: 0 success, 1 numeric or check failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import math
import os
import sys

import numpy as np

from . import config as cfgmod
from .bound import BoundInputs, bound_report
from .checks import format_table, run_all
from .config import ConfigError, ExperimentConfig
from .decomposition import (DependencyModel, TupleBudgetExceeded, parse_model_file,
                            structure_params)
from .distance import SetFamily, default_family, estimate_dc, family_from_spec, rate_fit, read_family
from .graphmodel import (ColoringModel, EnumerationBudgetExceeded, circulant_graph, covariance_matrix,
                         dependency_model, mean_vector, read_edge_list, sample_counts,
                         standardize)
from .linalg import ConvergenceError, NotPositiveDefiniteError

LOWER_BOUND_NOTE = "dc_lower is a lower bound: the maximum gap over a finite convex-set family"


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(cfg: ExperimentConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header=None) -> str:
    buf = io.StringIO()
    if header:
        buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# model construction


def coloring_model(cfg: ExperimentConfig, n: int | None = None) -> ColoringModel:
    if cfg.pi is None:
        raise UsageError("missing required field 'pi' (color probabilities, e.g. --pi 0.5,0.5)")
    if cfg.edges:
        graph = read_edge_list(_read(cfg.edges))
    else:
        n = cfg.n if n is None else n
        if n is None or cfg.m is None:
            raise UsageError("missing graph: give --graph n=..,m=..,d=.. or --edges FILE")
        graph = circulant_graph(n, cfg.m)
    if cfg.d is not None and cfg.d != len(cfg.pi):
        raise UsageError(f"pi has {len(cfg.pi)} entries but d={cfg.d}")
    return ColoringModel(graph, cfg.pi)


def generic_model(cfg: ExperimentConfig) -> DependencyModel:
    if cfg.d is None:
        raise UsageError("missing required field 'd' for --model (use --graph d=..)")
    if cfg.beta is None:
        raise UsageError("missing required field 'beta' for --model")
    return parse_model_file(_read(cfg.model), cfg.d, cfg.beta)


def _family(cfg: ExperimentConfig, d: int) -> SetFamily:
    spec = cfg.family
    if os.path.isfile(spec):
        fam = read_family(_read(spec))
        if fam.dim != d:
            raise UsageError(f"family file has d={fam.dim}, model has d={d}")
        return fam
    if spec == "default":
        return default_family(d, cfg.seed)
    return family_from_spec(spec, d, cfg.seed)


# ---------------------------------------------------------------------------
# subcommands


def cmd_bound(cfg: ExperimentConfig) -> int:
    if cfg.model:
        dep = generic_model(cfg)
        params = structure_params(dep)
        inp = BoundInputs(dep.d, dep.n, params, cfg.C)
        rep = bound_report(inp)
    else:
        model = coloring_model(cfg)
        dep = dependency_model(model)
        params = structure_params(dep)
        inp = BoundInputs(model.d, dep.n, params, cfg.C)
        # unstandardized summands e_c - pi^2 take d + 1 values; beta is their largest norm
        p2 = np.asarray(model.pi) ** 2
        raw_beta = float(max(np.linalg.norm(p2), np.max(np.linalg.norm(np.eye(model.d) - p2, axis=1))))
        raw = BoundInputs(model.d, dep.n, dataclasses.replace(params, beta=raw_beta), cfg.C)
        rep = bound_report(inp, graph=(model.graph.n_vertices, model.graph.degree, model.pi),
                           c_d=cfg.cd)
        rep.remark1 = bound_report(raw, sigma=covariance_matrix(model)).remark1
    fmt_ = cfg.format or "text"
    if fmt_ == "json":
        text = json.dumps(rep.to_dict(), indent=2) + "\n"
    elif fmt_ == "csv":
        text = _csv(((k, "" if v is None else v) for k, v in rep.to_dict().items()), ["key", "value"])
    else:
        text = rep.to_text()
    _write(cfg, text)
    return 0


def cmd_simulate(cfg: ExperimentConfig) -> int:
    model = coloring_model(cfg)
    W = sample_counts(model, cfg.samples, cfg.seed, cfg.workers)
    if cfg.summary:
        lam = mean_vector(model)
        sigma = covariance_matrix(model)
        k = W.shape[0]
        emp_mean = W.mean(axis=0)
        centered = W - emp_mean
        emp_cov = centered.T @ centered / max(k - 1, 1)
        rows = []
        for i in range(model.d):
            se = math.sqrt(emp_cov[i, i] / k)
            rows.append(("mean", i, i, emp_mean[i], se, lam[i]))
        for i in range(model.d):
            for j in range(model.d):
                prod = centered[:, i] * centered[:, j]
                se = float(prod.std(ddof=1) / math.sqrt(k)) if k > 1 else math.inf
                rows.append(("cov", i, j, emp_cov[i, j], se, sigma[i, j]))
        text = _csv(rows, ["stat", "i", "j", "empirical", "se", "closed_form"])
    else:
        Z = standardize(model, W)
        text = _csv(Z, [f"z{i + 1}" for i in range(model.d)])
    if cfg.format == "json":
        lines = text.splitlines()
        header = lines[0].split(",")
        text = json.dumps([dict(zip(header, ln.split(","))) for ln in lines[1:]]) + "\n"
    _write(cfg, text)
    return 0


RATE_HEADER = ["n", "d", "m", "seed", "samples", "dc_lower", "ci", "bound_thm1", "bound_prop1", "ratio"]


def rate_rows(cfg: ExperimentConfig):
    if not cfg.sweep or len(cfg.sweep) < 3:
        raise UsageError("rate needs --sweep with at least 3 values of n")
    if cfg.edges:
        raise UsageError("rate sweeps circulant graphs; --edges is not supported here")
    if cfg.m is None:
        raise UsageError("missing graph degree: give --graph m=..,d=..")
    rows = []
    for n in cfg.sweep:
        model = coloring_model(cfg, n)
        dep = dependency_model(model)
        inp = BoundInputs(model.d, dep.n, structure_params(dep), cfg.C)
        x = standardize(model, sample_counts(model, cfg.samples, cfg.seed, cfg.workers))
        est = estimate_dc(x, _family(cfg, model.d), sweep_offsets=cfg.sweep_offsets, seed=cfg.seed)
        rep = bound_report(inp, graph=(n, model.graph.degree, model.pi))
        rows.append((n, model.d, model.graph.degree, cfg.seed, cfg.samples, est.dc_lower,
                     est.ci_halfwidth, rep.theorem1, rep.prop1, est.dc_lower / rep.theorem1))
    return rows


def cmd_rate(cfg: ExperimentConfig) -> int:
    rows = rate_rows(cfg)
    fit = rate_fit([(r[0], r[5]) for r in rows])
    if cfg.format == "json":
        text = json.dumps({"rows": [dict(zip(RATE_HEADER, r)) for r in rows],
                           "slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2,
                           "note": LOWER_BOUND_NOTE}, indent=2) + "\n"
    else:
        text = _csv(rows, RATE_HEADER)
        text += f"# slope={fmt(fit.slope)},intercept={fmt(fit.intercept)},r2={fmt(fit.r2)}\n"
        text += f"# {LOWER_BOUND_NOTE}\n"
    _write(cfg, text)
    return 0


def cmd_verify(cfg: ExperimentConfig) -> int:
    results = run_all(quick=cfg.quick, seed=cfg.seed, workers=cfg.workers)
    text = format_table(results)
    for r in results:
        if not r.passed:
            text += f"FAILED {r.name}: worst {r.worst:.6g}; {r.failures[:5]}\n"
    _write(cfg, text)
    return 0 if all(r.passed for r in results) else 1


def cmd_distance(cfg: ExperimentConfig) -> int:
    if cfg.input:
        x = np.loadtxt(io.StringIO(_read(cfg.input)), delimiter=",", ndmin=2, skiprows=1)
    else:
        model = coloring_model(cfg)
        x = standardize(model, sample_counts(model, cfg.samples, cfg.seed, cfg.workers))
    fam = _family(cfg, x.shape[1])
    est = estimate_dc(x, fam, sweep_offsets=cfg.sweep_offsets, seed=cfg.seed)
    out = {"dc_lower": est.dc_lower, "ci_halfwidth": est.ci_halfwidth, "argmax_set": est.argmax_set,
           "samples": est.samples, "family_size": len(fam), "seed": cfg.seed,
           "offset": est.offset, "note": LOWER_BOUND_NOTE}
    if cfg.format == "json":
        text = json.dumps(out, indent=2) + "\n"
    else:
        text = _csv([[fmt(v) if v is not None else "" for v in out.values()]], list(out))
    for w in est.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _write(cfg, text)
    return 0


COMMANDS = {"bound": cmd_bound, "simulate": cmd_simulate, "rate": cmd_rate,
            "verify": cmd_verify, "distance": cmd_distance}


# ---------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="steindecomp", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    S = argparse.SUPPRESS
    p.add_argument("--config", metavar="FILE", help="flat key = value config; flags override it")
    p.add_argument("--dump-config", action="store_true", help="print the resolved config and exit")
    p.add_argument("--seed", default=S)
    p.add_argument("--workers", default=S)
    p.add_argument("--samples", default=S)
    p.add_argument("--graph", default=S, metavar="n=..,m=..,d=..")
    p.add_argument("--pi", default=S, metavar="P1,P2,..")
    p.add_argument("--edges", default=S, metavar="FILE")
    p.add_argument("--model", default=S, metavar="FILE", help="dependency model, lines 'i: a1,a2'")
    p.add_argument("--beta", default=S)
    p.add_argument("--family", default=S, metavar="FILE|SPEC")
    p.add_argument("--sweep", default=S, metavar="N1,N2,..")
    p.add_argument("--sweep-offsets", dest="sweep_offsets", action="store_const", const="true", default=S)
    p.add_argument("--C", dest="C", default=S)
    p.add_argument("--cd", default=S)
    p.add_argument("--out", default=S, metavar="FILE")
    p.add_argument("--input", default=S, metavar="FILE", help="CSV of points for 'distance'")
    p.add_argument("--format", default=S, choices=["csv", "json", "text"])
    p.add_argument("--quick", action="store_const", const="true", default=S)
    p.add_argument("--summary", action="store_const", const="true", default=S)
    return p


def _graph_fields(text: str) -> dict:
    out = {}
    for part in text.split(","):
        key, sep, value = part.partition("=")
        key = key.strip()
        if not sep or key not in ("n", "m", "d"):
            raise UsageError(f"--graph expects n=..,m=..,d=.. (got {text!r})")
        out[key] = value
    return out


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    values = {}
    if args.config:
        values.update(cfgmod.parse(_read(args.config)))
    raw = {k: v for k, v in vars(args).items() if k not in ("command", "config", "dump_config")}
    if "graph" in raw:
        raw.update(_graph_fields(raw.pop("graph")))
    for key, text in raw.items():
        values[key] = cfgmod.convert(key, text)
    if "workers" not in values or values["workers"] is None:
        values["workers"] = cfgmod.default_workers()
    values = {k: v for k, v in values.items() if v is not None}
    return ExperimentConfig(**values).validate()


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        if args.dump_config:
            sys.stdout.write(cfgmod.dump(cfg))
            return 0
        return COMMANDS[args.command](cfg)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NotPositiveDefiniteError as exc:
        print(f"error: covariance is singular or indefinite; smallest eigenvalue {exc.eigenvalue:.6g}",
              file=sys.stderr)
        return 1
    except (ConvergenceError, EnumerationBudgetExceeded, TupleBudgetExceeded,
            FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # model and parameter validation inside the library
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
