"""Batch front end: ``qwalk {simulate,limit,compare,moments,sweep} --config FILE``.

Exit codes: 0 success, 1 configuration or validation error, 2 numeric
failure. Errors print one line to stderr, prefixed ``qwalk: error[<kind>]:``.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as config_mod
from .config import ConfigError, RunConfig
from .convergence import (
    DEFAULT_PROJECTIONS_2D,
    compare_to_limit,
    cramer_wold_suite,
    empirical_cdf,
    hadamard_closed_form,
)
from .errors import NumericError, ValidationError
from .evolution import evolve_distribution
from .export import distribution_table, law_table, write_csv, write_json
from .spectral import limit_cdf, limit_moment, omega_measure
from .walk import MixedState

log = logging.getLogger("qwalk")


def _projections(cfg: RunConfig, dim: int) -> list[tuple[float, ...]]:
    if cfg.projections is not None:
        for c in cfg.projections:
            if len(c) != dim:
                raise ConfigError(f"projection {c} has length {len(c)}, walk has d={dim}")
        return [tuple(c) for c in cfg.projections]
    if dim == 2:
        return list(DEFAULT_PROJECTIONS_2D)
    return [tuple(np.eye(dim)[0])]


def _emit(out: Path, stem: str, fmt: str, table=None, obj=None) -> None:
    if fmt in ("csv", "both") and table is not None:
        write_csv(out / f"{stem}.csv", *table)
    if fmt in ("json", "both") or table is None:
        if obj is None:
            header, rows = table
            obj = {"columns": header, "rows": rows}
        write_json(out / f"{stem}.json", obj)


def _method(cfg: RunConfig, default: str) -> str:
    return default if cfg.method == "auto" else cfg.method


def _require_schedule(cfg: RunConfig, command: str) -> list[int]:
    if not cfg.schedule:
        raise ConfigError(f"'{command}' needs a non-empty 'schedule'")
    return list(cfg.schedule)


def cmd_simulate(cfg: RunConfig, out: Path, fmt: str, threads: int) -> None:
    spec = cfg.build_walk()
    initial = cfg.build_initial(spec)
    for n in _require_schedule(cfg, "simulate"):
        dist = evolve_distribution(initial, spec, n, method=_method(cfg, "direct"))
        _emit(out, f"distribution_n{n}", fmt, distribution_table(dist))
        log.info("simulate n=%d: %d sites", n, len(dist.probabilities))


def cmd_limit(cfg: RunConfig, out: Path, fmt: str, threads: int) -> None:
    spec = cfg.build_walk()
    initial = cfg.build_initial(spec)
    law = omega_measure(spec, initial, cfg.grid)
    _emit(out, "limit_law", fmt, law_table(law))
    meta = {
        "spec": spec.label,
        "grid": law.grid_size,
        "atoms": len(law),
        "dropped_nodes": law.n_dropped,
        "trivial_coin": spec.trivial,
        "projections": [],
    }
    for i, c in enumerate(_projections(cfg, spec.dim)):
        cdf = limit_cdf(law, c)
        _emit(out, f"limit_cdf_p{i}", fmt, (["value", "cdf"], list(zip(cdf.jumps.tolist(), cdf.cumulative.tolist()))))
        meta["projections"].append({"c": list(c), "support": list(law.support(c))})
    write_json(out / "limit_meta.json", meta)


def _closed_form(cfg: RunConfig, spec, initial):
    if spec.dim == 1 and isinstance(initial, MixedState) and cfg.walk.family in ("hadamard", "unbiased"):
        return hadamard_closed_form()
    return None


def cmd_compare(cfg: RunConfig, out: Path, fmt: str, threads: int) -> None:
    spec = cfg.build_walk()
    initial = cfg.build_initial(spec)
    schedule = _require_schedule(cfg, "compare")
    method = _method(cfg, "spectral")
    projections = _projections(cfg, spec.dim)
    if spec.dim == 2:
        reports = cramer_wold_suite(spec, initial, schedule, cfg.grid, projections, method=method, threads=threads)
    else:
        law = omega_measure(spec, initial, cfg.grid)
        closed = _closed_form(cfg, spec, initial)
        reports = [compare_to_limit(spec, initial, schedule, cfg.grid, c, closed_form=closed, law=law,
                                    method=method, threads=threads) for c in projections]
    for i, rep in enumerate(reports):
        _emit(out, f"report_p{i}", fmt, rep.table() if fmt != "json" else None, rep.to_dict())


def cmd_moments(cfg: RunConfig, out: Path, fmt: str, threads: int) -> None:
    spec = cfg.build_walk()
    initial = cfg.build_initial(spec)
    schedule = _require_schedule(cfg, "moments")
    law = omega_measure(spec, initial, cfg.grid)
    projections = _projections(cfg, spec.dim)
    rows = []
    for n in schedule:
        dist = evolve_distribution(initial, spec, n, method=_method(cfg, "spectral"))
        for i, c in enumerate(projections):
            emp = empirical_cdf(dist, n, c)
            for r in cfg.moments:
                scaled, limit = emp.moment(r), limit_moment(law, r, c)
                rows.append([n, i, r, scaled, limit, abs(scaled - limit)])
    _emit(out, "moments", fmt, (["n", "projection", "r", "scaled_moment", "limit_moment", "error"], rows))


COMMANDS = {
    "simulate": cmd_simulate,
    "limit": cmd_limit,
    "compare": cmd_compare,
    "moments": cmd_moments,
}


def cmd_sweep(cfg: RunConfig, out: Path, fmt: str, threads: int) -> None:
    if cfg.sweep is None:
        raise ConfigError("'sweep' needs a 'sweep' section")
    if cfg.walk.family is None:
        raise ConfigError("'sweep' varies family parameters and needs 'walk.family'")
    names = sorted(cfg.sweep["params"])
    command = COMMANDS[cfg.sweep["command"]]
    for values in itertools.product(*(cfg.sweep["params"][k] for k in names)):
        params = dict(cfg.walk.params)
        params.update(zip(names, values))
        sub = replace(cfg, walk=replace(cfg.walk, params=params), sweep=None)
        tag = ",".join(f"{k}={v!r}" for k, v in zip(names, values))
        command(sub, out / tag, fmt, threads)


def _threads(arg: int | None) -> int:
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("QWALK_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"QWALK_THREADS must be an integer, got {env!r}")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwalk", description="Quantum walk weak-limit experiments")
    parser.add_argument("command", choices=[*COMMANDS, "sweep"])
    parser.add_argument("--config", required=True, help="YAML run configuration")
    parser.add_argument("--out", help="output directory (overrides output.dir)")
    parser.add_argument("--format", choices=config_mod.FORMATS, help="overrides output.format")
    parser.add_argument("--grid", type=int, help="momentum points per axis (overrides grid)")
    parser.add_argument("--threads", type=int, help="worker threads (fallback: QWALK_THREADS)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _fail(kind: str, msg: str, code: int) -> int:
    print(f"qwalk: error[{kind}]: {' '.join(str(msg).split())}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        cfg = config_mod.load(args.config)
        if args.grid is not None:
            cfg.grid = args.grid
        if args.format is not None:
            cfg.output_format = args.format
        cfg.validate()
        out = Path(args.out or cfg.output_dir)
        threads = _threads(args.threads)
        handler = cmd_sweep if args.command == "sweep" else COMMANDS[args.command]
        handler(cfg, out, cfg.output_format, threads)
    except ConfigError as exc:
        return _fail("config", exc, 1)
    except ValidationError as exc:
        return _fail("validation", exc, 1)
    except OSError as exc:
        return _fail("io", exc, 1)
    except NumericError as exc:
        return _fail("numeric", exc, 2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
