"""Command-line front end.

    quadspec dirichlet --dim 2 --n 20 --c 1 --out-csv spec.csv --out-svg spec.svg
    quadspec periodic --dim 2 --n 12 --coeff const:1 --coeff "const:sqrt(2)"
    quadspec pseudospectrum --n 8 --c 1 --grid=-2,12,-15,15,40,40 --out-fig ps.png
    quadspec sweep --preset c --out-dir runs/

Exit codes: 0 success, 1 configuration error, 2 solver failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig, build_config, load_config, parse_complex
from .io import (
    OutputError,
    emit_csv,
    emit_field_csv,
    emit_field_json,
    emit_index,
    emit_json,
    emit_svg_scatter,
)
from .periodic import _parse_real

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("quadspec")

# Figure-matrix resolutions at desk scale; --paper-scale switches to the full N=100 (2D) / N=25 (3D).
DESK_N = {2: 40, 3: 12}
FULL_N = {2: 100, 3: 25}
PRESETS = {
    "c": dict(problem="dirichlet", sweep_c=(0.0, 0.5, 1.0, 2.0, 5.0, 10.0)),
    "n": dict(problem="dirichlet", c=1.0),
    "extent": dict(problem="dirichlet", c=1.0, sweep_extent=(0.5, 1.0, 2.0)),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _real(text: str) -> float:
    try:
        return _parse_real(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None


def _reals(text: str) -> list[float]:
    return [_real(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None


def _common(p: argparse.ArgumentParser, problem_flag: bool = False, lists: bool = False):
    p.add_argument("--config", help="key = value config file; flags override it")
    if problem_flag:
        p.add_argument("--problem", choices=("dirichlet", "periodic"))
    p.add_argument("--dim", type=int, choices=(1, 2, 3))
    if lists:
        p.add_argument("--extent", type=_reals, help="half-width (Dirichlet) or period; comma list sweeps")
        p.add_argument("--n", type=_ints, help="points per axis; comma list sweeps")
        p.add_argument("--c", type=_reals, help="coupling c; comma list sweeps")
    else:
        p.add_argument("--extent", type=_real, help="half-width L (Dirichlet) or period (periodic)")
        p.add_argument("--n", type=int, help="points per axis")
        p.add_argument("--c", type=_real, help="coupling c of the Dirichlet operator")
    p.add_argument("--coeff", action="append", metavar="SPEC",
                   help="const:V or sin[:amp[:freq]], once per dimension (periodic)")
    p.add_argument("--origin", type=_real, help="left end of the periodic cell (default 0)")
    p.add_argument("--solver", choices=("dense", "arnoldi"))
    p.add_argument("--shift", action="append", metavar="RE,IM", help="Arnoldi shift (repeatable)")
    p.add_argument("--want", type=int, help="eigenvalues per shift")
    p.add_argument("--subspace", type=int, help="Arnoldi subspace dimension")
    p.add_argument("--tol", type=_real, help="Arnoldi convergence tolerance")
    p.add_argument("--out-csv")
    p.add_argument("--out-json")
    p.add_argument("--out-svg")
    p.add_argument("--out-fig", help="matplotlib figure (.png, .pdf, .svg)")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--force", action="store_true", default=None,
                   help="allow dense solves beyond the desk-scale guard")
    p.add_argument("--timing", action="store_true", default=None,
                   help="include wall time in JSON output")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quadspec", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _common(sub.add_parser("dirichlet", help="H0 = -Lap + |x|^4, H1 = -2c|x|^2 on [-L, L]^dim"))
    _common(sub.add_parser("periodic", help="H0 = -Lap, H1 = (1/i) sum a_j d/dx_j on a torus"))
    ps = sub.add_parser("pseudospectrum", help="s_min(A - zI) on a grid of shifts")
    _common(ps, problem_flag=True)
    ps.add_argument("--grid", metavar="RE0,RE1,IM0,IM1,NX,NY")
    sw = sub.add_parser("sweep", help="cartesian sweep over c, N and L")
    _common(sw, problem_flag=True, lists=True)
    sw.add_argument("--preset", choices=sorted(PRESETS), help="figure matrix to reproduce")
    sw.add_argument("--paper-scale", action="store_true",
                    help="full resolutions N=100 (2D) / N=25 (3D), solved by Arnoldi shifts")
    sw.add_argument("--out-dir", help="directory for per-run files and index.json")
    sw.add_argument("--figures", action="store_true", help="also render PNG figures")
    return parser


_FLAG_FIELDS = {
    "problem": "problem", "dim": "dim", "extent": "extent", "n": "n_points", "c": "c",
    "origin": "origin", "solver": "solver", "want": "want", "subspace": "subspace", "tol": "tol",
    "out_csv": "out_csv", "out_json": "out_json", "out_svg": "out_svg", "out_fig": "out_fig",
    "seed": "seed", "workers": "workers", "force": "force", "timing": "timing", "grid": "grid",
    "out_dir": "out_dir",
}


def _flag_values(args: argparse.Namespace) -> dict:
    out = {}
    for attr, fname in _FLAG_FIELDS.items():
        if hasattr(args, attr) and getattr(args, attr) is not None:
            out[fname] = getattr(args, attr)
    if args.coeff:
        out["coefficients"] = tuple(args.coeff)
    if args.shift:
        out["shifts"] = tuple(parse_complex(s) for s in args.shift)
    for key, sweep_key in (("extent", "sweep_extent"), ("n_points", "sweep_n"), ("c", "sweep_c")):
        val = out.get(key)
        if isinstance(val, list):
            if len(val) == 0:
                raise ConfigError(f"{key}: empty list")
            if len(val) == 1:
                out[key] = val[0]
            else:
                out[sweep_key] = tuple(val)
                out.pop(key)
    return out


def _config(args: argparse.Namespace, problem: Optional[str]) -> ExperimentConfig:
    file_values = load_config(args.config) if args.config else {}
    flags = _flag_values(args)
    if problem is not None:
        if file_values.get("problem", problem) != problem:
            raise ConfigError(f"problem: config file says {file_values['problem']!r} "
                              f"but the subcommand is {problem!r}")
        flags["problem"] = problem
    return build_config(file_values, flags)


def _summary(rec) -> str:
    if not rec.ok:
        return f"{rec.tag}: FAILED ({rec.error})"
    lam = rec.eigenvalues
    extra = "".join(f" {k}={v:.3e}" for k, v in rec.oracle.items())
    return (f"{rec.tag}: {len(lam)} eigenvalues, max|Re|={np.abs(lam.real).max():.6g}, "
            f"max|Im|={np.abs(lam.imag).max():.6g}, max residual="
            f"{rec.stats.get('max_residual', 0):.2e}{extra}")


def _emit_record(rec, cfg: ExperimentConfig) -> None:
    if cfg.out_csv:
        emit_csv(rec, cfg.out_csv)
    if cfg.out_json:
        emit_json(rec, cfg.out_json, include_timing=cfg.timing)
    if rec.ok and cfg.out_svg:
        emit_svg_scatter(rec, cfg.out_svg)
    if rec.ok and cfg.out_fig:
        from .plotting import plot_spectrum
        plot_spectrum(rec, cfg.out_fig)


def cmd_single(args, problem: str) -> int:
    from .experiments import run

    cfg = _config(args, problem)
    if cfg.is_sweep():
        raise ConfigError("sweep lists need the 'sweep' subcommand")
    rec = run(cfg)
    print(_summary(rec))
    _emit_record(rec, cfg)
    return EXIT_OK if rec.ok else EXIT_SOLVER


def cmd_pseudospectrum(args) -> int:
    from .experiments import build_pencil, dense_spectrum
    from .pseudospectra import ZGrid, scan

    cfg = _config(args, None)
    p = build_pencil(cfg)
    eig = None
    if cfg.grid:
        try:
            grid = ZGrid.parse(cfg.grid)
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from None
    else:
        eig = dense_spectrum(p, force=cfg.force).eigenvalues
        lo_r, hi_r = eig.real.min(), eig.real.max()
        lo_i, hi_i = eig.imag.min(), eig.imag.max()
        pad_r = 0.05 * max(hi_r - lo_r, 1.0)
        pad_i = 0.05 * max(hi_i - lo_i, 1.0)
        grid = ZGrid(lo_r - pad_r, hi_r + pad_r, lo_i - pad_i, hi_i + pad_i, 20, 20)
    fld = scan(p, grid, seed=cfg.seed or 20240531, workers=cfg.workers)
    bad = [f for f in fld.flags.ravel() if str(f).startswith("error")]
    print(f"{p.label}: {grid.nx}x{grid.ny} shifts, min s_min={np.nanmin(fld.values):.3e}, "
          f"max s_min={np.nanmax(fld.values):.3e}, max iterations={fld.iterations.max()}, "
          f"errors={len(bad)}")
    if cfg.out_csv:
        emit_field_csv(fld, cfg.out_csv)
    if cfg.out_json:
        emit_field_json(fld, cfg.out_json)
    if cfg.out_svg:
        emit_svg_scatter(fld, cfg.out_svg)
    if cfg.out_fig:
        from .plotting import plot_pseudospectrum
        if eig is None and 2 * p.order <= 2000:
            eig = dense_spectrum(p).eigenvalues
        plot_pseudospectrum(fld, cfg.out_fig, eigenvalues=eig)
    return EXIT_SOLVER if bad else EXIT_OK


def _apply_preset(args, file_values: dict) -> dict:
    values = dict(file_values)
    if not args.preset:
        return values
    values.update(PRESETS[args.preset])
    dim = args.dim or values.get("dim", 2)
    table = FULL_N if args.paper_scale else DESK_N
    values["n_points"] = table.get(dim, 12)
    if args.preset == "n":
        hi = table.get(dim, 12)
        values["sweep_n"] = (hi // 2, hi) if dim == 2 else ((3 * hi) // 5, hi)
    return values


def cmd_sweep(args) -> int:
    from .experiments import sweep

    file_values = load_config(args.config) if args.config else {}
    file_values = _apply_preset(args, file_values)
    flags = _flag_values(args)
    if args.paper_scale:
        flags.setdefault("solver", "arnoldi")
        if "shifts" not in flags and "shifts" not in file_values:
            # probe the upper half plane near the imaginary axis
            flags["shifts"] = (0.5 + 5j, 0.5 + 20j, 0.5 + 50j)
    cfg = build_config(file_values, flags)
    out_dir = Path(cfg.out_dir or "sweep_out")
    records = sweep(cfg, workers=cfg.workers)
    files = []
    for rec, sub in zip(records, cfg.expand()):
        print(_summary(rec))
        entry = {"json": str(out_dir / f"{rec.tag}.json")}
        emit_json(rec, entry["json"], include_timing=cfg.timing)
        if rec.ok:
            entry["csv"] = str(emit_csv(rec, out_dir / f"{rec.tag}.csv"))
            entry["svg"] = str(emit_svg_scatter(rec, out_dir / f"{rec.tag}.svg"))
            if args.figures:
                from .plotting import plot_spectrum
                entry["png"] = str(plot_spectrum(rec, out_dir / f"{rec.tag}.png"))
        files.append(entry)
    emit_index(records, out_dir / "index.json", files)
    if args.figures and any(r.ok for r in records):
        from .plotting import plot_overlay
        plot_overlay(records, out_dir / "overlay.png", title=f"{cfg.problem} sweep")
    return EXIT_OK if all(r.ok for r in records) else EXIT_SOLVER


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help/--version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command in ("dirichlet", "periodic"):
            return cmd_single(args, args.command)
        if args.command == "pseudospectrum":
            return cmd_pseudospectrum(args)
        return cmd_sweep(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
