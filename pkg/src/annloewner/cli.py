"""Batch front-end: ``annloewner {kernel,evolve,classify,validate,chain,selftest}``.

Each command reads an optional JSON config (``--config``), writes JSON
reports and CSV series into ``--out`` and returns

    0  success
    1  usage or config error
    2  a verification failed
    3  the ODE solver failed

``ANNLOEWNER_THREADS`` caps the worker threads used for independent points.
Outputs do not depend on the thread count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import jsonschema
import numpy as np

from . import acceptance, io
from . import presets as P
from .chain import (ChainApproximation, boundary_bound_check, chain_compat_defect, chain_eval,
                    loewner_range_estimate, out_domain_check, pde_residual_check,
                    sample_chain_configs)
from .classify import classify_type
from .errors import AnnLoewnerError, ConfigError, SolverError
from .evolution import SolverConfig, annulus_grid, trajectories
from .kernel import CircleMeasure, circle_nodes, free_term, herglotz_eval, villat_eval, villat_reconstruct
from .vector_field import driving_from_dict, validate_driving

EXIT_OK, EXIT_CONFIG, EXIT_CHECK, EXIT_SOLVER = 0, 1, 2, 3

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_POINT = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
_SOLVER = {
    "type": "object",
    "additionalProperties": False,
    "properties": {"rel_tol": _POS, "abs_tol": _POS, "max_step": _POS,
                   "boundary_guard": _POS, "max_steps": {"type": "integer", "minimum": 1}},
}
_SOURCE = {"preset": {"type": "string"}, "driving": {"type": "object"}, "solver": _SOLVER}


def _schema(props: dict, need_source: bool = True) -> dict:
    schema = {"type": "object", "additionalProperties": False,
              "properties": {**(_SOURCE if need_source else {}), **props}}
    if need_source:
        schema["oneOf"] = [{"required": ["preset"]}, {"required": ["driving"]}]
    return schema


SCHEMAS = {
    "kernel": _schema({
        "r": {"type": "array", "items": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
              "minItems": 1},
        "grid": {"type": "integer", "minimum": 2},
        "measures": {"type": "object", "additionalProperties": False,
                     "properties": {"mu1": {"type": "object"}, "mu2": {"type": "object"}}},
        "reconstruct": {"type": "object", "additionalProperties": False,
                        "properties": {"r": {"type": "number", "exclusiveMinimum": 0,
                                             "exclusiveMaximum": 1},
                                       "nodes": {"type": "integer", "minimum": 64},
                                       "points": {"type": "integer", "minimum": 1},
                                       "laurent": {"type": "array", "items": {
                                           "type": "array", "items": _NUM,
                                           "minItems": 3, "maxItems": 3}}}},
    }, need_source=False),
    "evolve": _schema({
        "s": {"type": "number", "minimum": 0}, "t": {"type": "number", "minimum": 0},
        "points": {"type": "array", "items": _POINT, "minItems": 1},
        "grid": {"type": "integer", "minimum": 1},
    }),
    "classify": _schema({
        "T_max": _POS, "horizon": _POS, "T_big": _POS, "theta_zero": _POS, "threshold": _POS,
        "points": {"type": "array", "items": _POINT, "minItems": 1},
    }),
    "validate": _schema({"horizon": _POS, "threshold": _POS}),
    "chain": _schema({
        "horizon": _POS,
        "samples": {"type": "integer", "minimum": 1},
        "grid": {"type": "integer", "minimum": 1},
        "pde": {"type": "object", "additionalProperties": False,
                "properties": {"s": _POS, "z": _POINT,
                               "h": {"type": "array", "items": _POS, "minItems": 2}}},
    }),
    "selftest": _schema({"criteria": {"type": "array", "minItems": 1,
                                      "items": {"type": "integer", "minimum": 1,
                                                "maximum": len(acceptance.CRITERIA)}}},
                        need_source=False),
}

DEFAULT_CONFIGS = {"evolve": {"preset": "split"}, "classify": {"preset": "split"},
                   "validate": {"preset": "split"}, "chain": {"preset": "scaling"},
                   "kernel": {}, "selftest": {}}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="annloewner", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SCHEMAS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON config file")
        p.add_argument("--out", type=Path, help="output directory for JSON/CSV artifacts")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled configurations")
        p.add_argument("--tol", type=float, help="solver relative tolerance (abs = tol/100)")
    return parser


def load_config(command: str, path: Path | None) -> dict:
    if path is None:
        cfg = dict(DEFAULT_CONFIGS[command])
    else:
        try:
            cfg = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        jsonschema.validate(cfg, SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from None
    return cfg


def thread_count() -> int:
    raw = os.environ.get("ANNLOEWNER_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"ANNLOEWNER_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("ANNLOEWNER_THREADS must be >= 1")
    return n


def _ordered_map(fn, items, threads):
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _solver(cfg: dict, tol: float | None) -> SolverConfig:
    sc = SolverConfig(**cfg.get("solver", {}))
    if tol is not None:
        sc = replace(sc, rel_tol=tol, abs_tol=tol * 1e-2)
    return sc


def _driving(cfg: dict):
    if "preset" in cfg:
        return P.get_preset(cfg["preset"])
    return driving_from_dict(cfg["driving"])


def _points(raw):
    return np.array([complex(a, b) for a, b in raw])


class Context:
    def __init__(self, args, cfg):
        self.args, self.cfg = args, cfg
        self.out = args.out
        self.threads = thread_count()

    def write_json(self, name, obj):
        if self.out is not None:
            io.write_json(self.out / name, obj)

    def write_csv(self, name, header, rows):
        if self.out is not None:
            io.write_csv(self.out / name, header, rows)


def cmd_kernel(ctx: Context) -> int:
    cfg = ctx.cfg
    radii = cfg.get("r", [0.0, 0.1, 0.2, 0.3, 0.5])
    n = cfg.get("grid", 20)
    mu = cfg.get("measures")
    mu1 = CircleMeasure.from_dict(mu.get("mu1", {})) if mu else None
    mu2 = CircleMeasure.from_dict(mu.get("mu2", {})) if mu else None
    rows, free = [], {}
    for r in radii:
        z = annulus_grid(r, n)
        k = villat_eval(r, z)
        p = herglotz_eval(r, mu1, mu2, z) if mu else np.full(z.shape, np.nan, dtype=complex)
        rows += [(r, zz.real, zz.imag, kk.real, kk.imag, pp.real, pp.imag)
                 for zz, kk, pp in zip(z, k, p)]
        rho = math.sqrt(r) if r > 0 else 0.5
        free[str(r)] = abs(free_term(villat_eval(r, circle_nodes(512, rho))) - 1.0)
    rec = cfg.get("reconstruct", {})
    r_rec = rec.get("r", 0.2)
    coeffs = rec.get("laurent", [[1, 2.0, 0.0], [0, 3.0, 0.0], [-1, 0.04, 0.0]])

    def f(z):
        return sum(complex(a, b) * z ** int(k) for k, a, b in coeffs)

    nodes = rec.get("nodes", 1024)
    outer, inner = circle_nodes(nodes), circle_nodes(nodes, r_rec)
    zs = annulus_grid(r_rec, max(1, int(math.isqrt(rec.get("points", 50)))))
    im_mean = float(np.mean(f(outer)).imag)
    err = float(np.max(np.abs(villat_reconstruct(r_rec, f(outer).real, f(inner).real, im_mean, zs) - f(zs))))
    ok = err <= 1e-8 and max(free.values()) <= 1e-9
    ctx.write_csv("kernel.csv", ("r", "re_z", "im_z", "re_K", "im_K", "re_p", "im_p"), rows)
    ctx.write_json("kernel_report.json", {"free_term_error": free, "reconstruction_error": err,
                                          "passed": ok})
    print(f"kernel: {len(rows)} grid values; max |N(K_r)-1| = {max(free.values()):.2e}; "
          f"reconstruction error {err:.2e} -> {'ok' if ok else 'FAILED'}")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_evolve(ctx: Context) -> int:
    cfg = ctx.cfg
    data = _driving(cfg)
    sc = _solver(cfg, ctx.args.tol)
    s, t = cfg.get("s", 0.0), cfg.get("t", 1.0)
    if t < s:
        raise ConfigError("need s <= t")
    z = _points(cfg["points"]) if "points" in cfg else annulus_grid(data.system.r(s), cfg.get("grid", 3))
    # one integration per point keeps results independent of the thread count
    trajs = _ordered_map(lambda zz: trajectories(data, sc, s, t, zz)[0], list(z), ctx.threads)
    if ctx.out is not None:
        io.write_trajectories(ctx.out / "trajectories.csv", trajs, data.system)
    summary = {"s": s, "t": t, "n_points": len(trajs),
               "trajectories": [dict(tr.summary(), z0=[zz.real, zz.imag]) for tr, zz in zip(trajs, z)]}
    ctx.write_json("evolve_summary.json", summary)
    failed = [k for k, tr in enumerate(trajs) if not tr.completed]
    print(f"evolve: {len(trajs)} points from s={s} to t={t}; {len(failed)} halted early")
    for k in failed:
        print(f"  point {k}: {trajs[k].status} at t={trajs[k].status_time}")
    return EXIT_SOLVER if failed else EXIT_OK


def _validation_report(ctx, data):
    cfg = ctx.cfg
    rep = validate_driving(data, cfg.get("horizon", 40.0), cfg.get("threshold", 30.0))
    for key, ok in rep.conditions.items():
        print(f"  {key:28s} {'ok' if ok else 'FAILED'}")
    for msg in rep.messages:
        print(f"  note: {msg}")
    return rep


def cmd_validate(ctx: Context) -> int:
    data = _driving(ctx.cfg)
    print("validate:")
    rep = _validation_report(ctx, data)
    ctx.write_json("validation.json", rep.to_dict())
    return EXIT_OK if rep.passed else EXIT_CHECK


def cmd_classify(ctx: Context) -> int:
    cfg = ctx.cfg
    data = _driving(cfg)
    print("validate:")
    val = _validation_report(ctx, data)
    if not val.passed:
        ctx.write_json("type_report.json", {"validation": val.to_dict(), "type": None})
        print("classify: driving data rejected; no evolution family to classify")
        return EXIT_CHECK
    z_set = _points(cfg["points"]) if "points" in cfg else None
    rep = classify_type(data, _solver(cfg, ctx.args.tol), cfg.get("T_max", 40.0),
                        cfg.get("threshold", 30.0), cfg.get("T_big", 40.0),
                        cfg.get("theta_zero", 0.02), z_set)
    print(rep.verdict_line())
    for key in ("I1", "I2", "I"):
        v = getattr(rep, key)
        if v is not None:
            state = "divergent" if v.divergent else "finite"
            print(f"  {key:3s} = {v.value:<14.6g} {state}")
    ctx.write_json("type_report.json", {"validation": val.to_dict(), "type": rep.to_dict()})
    return EXIT_OK if rep.consistent else EXIT_CHECK


def cmd_chain(ctx: Context) -> int:
    cfg = ctx.cfg
    data = _driving(cfg)
    chain = ChainApproximation(data, cfg.get("horizon", 2.0), _solver(cfg, ctx.args.tol))
    rng = np.random.default_rng(ctx.args.seed)
    configs = sample_chain_configs(chain, cfg.get("samples", 20), rng)
    sys_ = data.system

    def compat(c):
        t, _, z = c
        return chain_compat_defect(chain, 0.5 * t, t, z)

    defects = _ordered_map(compat, configs, ctx.threads)
    bound_ok = boundary_bound_check(chain, [(t, z) for t, _, z in configs])
    outs = _ordered_map(lambda c: out_domain_check(chain, *c), configs, ctx.threads)
    pde = cfg.get("pde", {})
    s = pde.get("s", 0.5 * chain.horizon)
    zp = complex(*pde.get("z", [0.0, 0.0])) if "z" in pde else \
        math.exp(0.5 * math.log(max(max(sys_.r(s * 0.9), sys_.r(s * 1.1)), 0.01))) * np.exp(0.3j)
    hs = pde.get("h", [1e-2, 1e-3, 1e-4])
    res = [pde_residual_check(chain, s, zp, h) for h in hs]
    orders = [math.log10(a / b) / math.log10(h0 / h1) if b > 0 else math.inf
              for a, b, h0, h1 in zip(res, res[1:], hs, hs[1:])]
    grid_times = np.linspace(0.0, chain.horizon, 5)
    grid = [(t, annulus_grid(sys_.r(t), cfg.get("grid", 6))) for t in grid_times]
    rng_rep = loewner_range_estimate(chain, grid)
    rows = []
    for t, z in grid:
        f = chain_eval(chain, t, z)
        rows += [(t, zz.real, zz.imag, ff.real, ff.imag, abs(ff)) for zz, ff in zip(z, f)]
    ctx.write_csv("chain.csv", io.CHAIN_COLUMNS, rows)
    checks = {"compat_defect": max(defects) <= 1e-6, "boundary_bound": bound_ok,
              "out_domain": all(outs), "pde_order": min(orders) >= 1.8}
    report = {"checks": checks, "max_compat_defect": max(defects), "pde_residuals": res,
              "pde_orders": orders, "range": rng_rep.to_dict(), "samples": len(configs)}
    ctx.write_json("chain_report.json", report)
    print(f"chain: horizon {chain.horizon}, {len(configs)} sampled configurations")
    for key, ok in checks.items():
        print(f"  {key:16s} {'ok' if ok else 'FAILED'}")
    print(f"  range |f| in [{rng_rep.min_abs:.4g}, {rng_rep.max_abs:.4g}]; type "
          f"{rng_rep.declared_type} -> {rng_rep.label}")
    return EXIT_OK if all(checks.values()) else EXIT_CHECK


def cmd_selftest(ctx: Context) -> int:
    numbers = ctx.cfg.get("criteria")
    results = acceptance.run_all(numbers)
    for res in results:
        print(res.line())
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    ctx.write_json("selftest.json", [{k: v for k, v in r.to_dict().items() if k != "seconds"}
                                     for r in results])
    return EXIT_OK if passed == len(results) else EXIT_CHECK


COMMANDS = {"kernel": cmd_kernel, "evolve": cmd_evolve, "classify": cmd_classify,
            "validate": cmd_validate, "chain": cmd_chain, "selftest": cmd_selftest}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.tol is not None and not args.tol > 0:
            raise ConfigError("--tol must be positive")
        cfg = load_config(args.command, args.config)
        ctx = Context(args, cfg)
        return COMMANDS[args.command](ctx)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (AnnLoewnerError, ValueError, TypeError) as exc:
        # DomainError and friends derive from ValueError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
