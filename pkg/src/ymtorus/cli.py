"""Command-line front end.

Subcommands: verify (invariant suites), curvature, residual, matrix-form
(2x2 block system export), solve, and diagnostics (measured distributions,
archived as CSV).  Every command that writes files also writes exactly one
``manifest.json`` capturing the fully resolved configuration, the library
version, the kernel backend and a timestamp; ``--from-manifest`` reruns a
verify or solve from that record, and in deterministic mode the rerun
reproduces the original outputs byte for byte (the original timestamp is
part of the reproduced configuration, and the kernel backend is pinned).

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .cochain import TorusGrid, make_form, serialize
from .errors import ConfigError, GridMismatch, ParseError, YmtError
from .exterior_calc import inner, norm_sq
from .matrix_form import (
    EDGE_ORDER_2X2,
    flatten_connection,
    matrix_residual,
    stencil_matrices_2x2,
)
from .algebra import mat_to_json
from .cochain import pairing
from .solver import SolverConfig, solve
from .verify import DEFAULT_GRIDS, DEFAULT_TRIALS, run_verification
from .yang_mills import (
    Connection,
    curvature,
    laplacian_A,
    residual_delta,
    residual_dstar,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(out_dir: Path, name: str, text: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text, encoding="utf-8")


def _write_manifest(out_dir: Path, command: str, config: dict, seed, deterministic: bool,
                    timestamp: str | None) -> None:
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
        "backend": kernels.active_backend(),
        "deterministic": deterministic,
        "timestamp": timestamp if timestamp is not None else _utc_now(),
    }
    _write(out_dir, "manifest.json", _dump_json(manifest))


def _load_manifest(path: str, expected_command: str) -> dict:
    try:
        manifest = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid manifest JSON: {exc}") from exc
    if not isinstance(manifest, dict) or "command" not in manifest or "config" not in manifest:
        raise ParseError("manifest needs 'command' and 'config' keys")
    if manifest["command"] != expected_command:
        raise ConfigError(
            f"manifest records command {manifest['command']!r}, expected {expected_command!r}"
        )
    if manifest.get("deterministic"):
        backend = manifest.get("backend")
        if backend and backend != kernels.active_backend():
            kernels.use_backend(backend)  # ConfigError if unavailable
    return manifest


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        n, m = text.lower().split("x")
        n, m = int(n), int(m)
    except ValueError as exc:
        raise ConfigError(f"grid must look like NxM, got {text!r}") from exc
    if n < 1 or m < 1:
        raise ConfigError(f"grid dimensions must be positive, got {text!r}")
    return n, m


def _parse_grids(text: str) -> tuple[tuple[int, int], ...]:
    return tuple(_parse_grid(part) for part in text.split(",") if part)


def _read_connection(path: str) -> Connection:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read connection file {path}: {exc}") from exc
    try:
        return Connection.from_json(text)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from exc


# --- commands -----------------------------------------------------------


def cmd_verify(args) -> int:
    if args.from_manifest:
        manifest = _load_manifest(args.from_manifest, "verify")
        cfg = manifest["config"]
        grids = tuple(tuple(g) for g in cfg["grids"])
        seed, trials, corrupt = cfg["seed"], cfg["trials"], cfg.get("corrupt")
        deterministic = bool(manifest.get("deterministic"))
        timestamp = manifest.get("timestamp")
    else:
        grids = _parse_grids(args.grids)
        seed, trials, corrupt = args.seed, args.trials, args.corrupt
        deterministic = args.deterministic
        timestamp = None
    if trials < 0:
        raise ConfigError(f"trials must be nonnegative, got {trials}")
    report = run_verification(grids=grids, seed=seed, trials=trials, corrupt=corrupt)
    if trials == 0:
        print("warning: no trials requested; nothing verified")
    print(report.format_table())
    if args.out:
        out_dir = Path(args.out)
        _write(out_dir, "verify_report.json", _dump_json(report.to_dict()))
        config = {
            "grids": [list(g) for g in grids],
            "seed": seed,
            "trials": trials,
            "corrupt": corrupt,
        }
        _write_manifest(out_dir, "verify", config, seed, deterministic, timestamp)
    if trials == 0:
        return EXIT_OK
    if not report.passed:
        print("violated invariants: " + ", ".join(report.failures()), file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_curvature(args) -> int:
    A = _read_connection(args.input)
    F = curvature(A)
    out_dir = Path(args.out)
    _write(out_dir, "curvature.json", serialize(F.form) + "\n")
    diagnostics = {
        "norm_sq": norm_sq(F.form),
        "max_su2_deviation": F.su2_deviation_max,
    }
    _write(out_dir, "diagnostics.json", _dump_json(diagnostics))
    config = {"input": str(Path(args.input).resolve())}
    _write_manifest(out_dir, "curvature", config, None, args.deterministic, None)
    print(f"norm_sq={diagnostics['norm_sq']!r} max_su2_deviation={F.su2_deviation_max!r}")
    return EXIT_OK


def cmd_residual(args) -> int:
    A = _read_connection(args.input)
    res = residual_delta(A) if args.equation == "delta" else residual_dstar(A)
    out_dir = Path(args.out)
    _write(out_dir, "residual.json", serialize(res) + "\n")
    summary = {
        "equation": args.equation,
        "max_abs": res.max_abs(),
        "norm_sq": norm_sq(res),
    }
    _write(out_dir, "summary.json", _dump_json(summary))
    config = {"input": str(Path(args.input).resolve()), "equation": args.equation}
    _write_manifest(out_dir, "residual", config, None, args.deterministic, None)
    print(f"equation={args.equation} max_abs={summary['max_abs']!r} norm_sq={summary['norm_sq']!r}")
    return EXIT_OK


def cmd_matrix_form(args) -> int:
    A = _read_connection(args.input)
    if A.grid.shape != (2, 2):
        raise GridMismatch(
            f"matrix-form needs a 2x2 connection, got {A.grid.n}x{A.grid.m}"
        )
    D, S, D1, D2 = stencil_matrices_2x2()
    a_vec, f_vec, ssa_vec = flatten_connection(A)
    payload = {
        "D": D.tolist(),
        "S": S.tolist(),
        "D1": D1.tolist(),
        "D2": D2.tolist(),
        "edge_order": [list(e) for e in EDGE_ORDER_2X2],
        "A": [mat_to_json(mat) for mat in a_vec.entries],
        "F": [mat_to_json(mat) for mat in f_vec.entries],
        "star_star_A": [mat_to_json(mat) for mat in ssa_vec.entries],
    }
    consistency = {}
    for eq in ("dstar", "delta"):
        blocks = matrix_residual(A, eq)
        stencil = residual_delta(A) if eq == "delta" else residual_dstar(A)
        direct = np.stack([pairing(stencil, e) for e in EDGE_ORDER_2X2])
        max_diff = float(np.max(np.abs(blocks.entries - direct)))
        payload[f"residual_{eq}"] = [mat_to_json(mat) for mat in blocks.entries]
        consistency[eq] = {
            "max_diff_vs_stencil": max_diff,
            "consistent": max_diff <= 1e-12,
        }
    payload["consistency"] = consistency
    out_dir = Path(args.out)
    _write(out_dir, "matrix_form.json", _dump_json(payload))
    config = {"input": str(Path(args.input).resolve())}
    _write_manifest(out_dir, "matrix-form", config, None, args.deterministic, None)
    flags = ", ".join(
        f"{eq}: {'consistent' if consistency[eq]['consistent'] else 'INCONSISTENT'}"
        for eq in ("dstar", "delta")
    )
    print(flags)
    return EXIT_OK


def _solver_config_from_sources(args) -> SolverConfig:
    fields = {}
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot read config file {args.config}: {exc}") from exc
        try:
            loaded = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{args.config}: invalid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ParseError(f"{args.config}: config must be a JSON object")
        known = {f.name for f in dataclasses.fields(SolverConfig)}
        unknown = set(loaded) - known
        if unknown:
            raise ConfigError(f"unknown solver config keys: {sorted(unknown)}")
        fields.update(loaded)
    if args.grid:
        fields["n"], fields["m"] = _parse_grid(args.grid)
    if args.seed is not None:
        fields["seed"] = args.seed
    if args.equation:
        fields["equation"] = args.equation
    if args.tol is not None:
        fields["tol_residual"] = args.tol
    if args.max_iters is not None:
        fields["max_iters"] = args.max_iters
    if args.init:
        fields["init"] = args.init
    if args.init_path:
        fields["init_path"] = str(Path(args.init_path).resolve())
        fields.setdefault("init", "file")
    if args.scale is not None:
        fields["scale"] = args.scale
    try:
        return SolverConfig(**fields)
    except TypeError as exc:
        raise ConfigError(f"bad solver configuration: {exc}") from exc


def cmd_solve(args) -> int:
    if args.from_manifest:
        manifest = _load_manifest(args.from_manifest, "solve")
        try:
            cfg = SolverConfig(**manifest["config"])
        except TypeError as exc:
            raise ConfigError(f"bad solver config in manifest: {exc}") from exc
        deterministic = bool(manifest.get("deterministic"))
        timestamp = manifest.get("timestamp")
    else:
        cfg = _solver_config_from_sources(args)
        deterministic = args.deterministic
        timestamp = None
    cfg.validate()
    A, trace = solve(cfg)
    out_dir = Path(args.out)
    _write(out_dir, "trace.csv", trace.to_csv())
    _write(out_dir, "connection.json", A.to_json() + "\n")
    _write_manifest(
        out_dir, "solve", dataclasses.asdict(cfg), cfg.seed, deterministic, timestamp
    )
    last = trace.rows[-1]
    F = curvature(A)
    print(
        f"status={trace.status.value} iterations={last.iteration} "
        f"objective={last.objective!r} grad_norm={last.grad_norm!r} "
        f"curvature_norm_sq={norm_sq(F.form)!r}"
    )
    return EXIT_OK


def cmd_diagnostics(args) -> int:
    grids = _parse_grids(args.grids)
    if args.trials < 0:
        raise ConfigError(f"trials must be nonnegative, got {args.trials}")
    lines = ["grid,trial,su2_deviation_max_F,re_inner_laplacian,im_inner_laplacian"]
    for gi, (n, m) in enumerate(grids):
        grid = TorusGrid(n, m)
        for trial in range(args.trials):
            rng = np.random.default_rng(np.random.SeedSequence((args.seed, gi, trial)))
            seeds = rng.integers(0, 2**63 - 1, size=2)
            A = Connection.random(grid, seed=int(seeds[0]))
            F = curvature(A)
            f = make_form(grid, 1, "random-su2", seed=int(seeds[1]))
            val = inner(laplacian_A(A, f), f)
            lines.append(
                f"{n}x{m},{trial},{F.su2_deviation_max!r},{val.real!r},{val.imag!r}"
            )
    out_dir = Path(args.out)
    _write(out_dir, "diagnostics.csv", "\n".join(lines) + "\n")
    config = {"grids": [list(g) for g in grids], "trials": args.trials, "seed": args.seed}
    _write_manifest(out_dir, "diagnostics", config, args.seed, args.deterministic, None)
    print(f"wrote {len(lines) - 1} samples to {out_dir / 'diagnostics.csv'}")
    return EXIT_OK


# --- parser -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ymtorus",
        description=(
            "Discrete exterior calculus with 2x2 complex matrix coefficients on a "
            "periodic grid: verification suites, curvature and Yang-Mills residual "
            "evaluation, the 2x2 block-matrix system, and a residual-minimizing solver."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run every invariant suite")
    p.add_argument("--grids", default="1x1,2x2,3x5,8x8", help="comma-separated NxM list")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="directory for report and manifest")
    p.add_argument("--deterministic", action="store_true")
    p.add_argument("--from-manifest", default=None, metavar="FILE")
    p.add_argument("--corrupt", default=None, help=argparse.SUPPRESS)  # test hook
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("curvature", help="curvature of a connection file")
    p.add_argument("--input", required=True, help="connection JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--deterministic", action="store_true")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("residual", help="Yang-Mills residual of a connection file")
    p.add_argument("--input", required=True, help="connection JSON")
    p.add_argument("--equation", choices=("dstar", "delta"), default="delta")
    p.add_argument("--out", required=True)
    p.add_argument("--deterministic", action="store_true")
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("matrix-form", help="export the 2x2 block-matrix system")
    p.add_argument("--input", required=True, help="2x2 connection JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--deterministic", action="store_true")
    p.set_defaults(func=cmd_matrix_form)

    p = sub.add_parser("solve", help="minimize the residual norm")
    p.add_argument("--config", default=None, help="solver config JSON")
    p.add_argument("--grid", default=None, help="NxM")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--equation", choices=("dstar", "delta"), default=None)
    p.add_argument("--tol", type=float, default=None, help="objective tolerance")
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--init", choices=("zero", "random", "file"), default=None)
    p.add_argument("--init-path", default=None, help="connection JSON for init=file")
    p.add_argument("--scale", type=float, default=None, help="random init amplitude")
    p.add_argument("--out", required=True)
    p.add_argument("--deterministic", action="store_true")
    p.add_argument("--from-manifest", default=None, metavar="FILE")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser(
        "diagnostics",
        help="measured distributions (curvature su(2) drift, Laplacian quadratic form)",
    )
    p.add_argument("--grids", default="2x2,3x5,8x8")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--deterministic", action="store_true")
    p.set_defaults(func=cmd_diagnostics)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except YmtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
