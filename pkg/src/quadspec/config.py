"""Experiment configuration: flat ``key = value`` files plus CLI overrides.

A config file looks like::

    # figure 2, coarse
    problem = dirichlet
    dim = 2
    extent = 1
    n = 16
    c = [0, 0.5, 1, 2, 5, 10]

A bracketed list on ``c``, ``n`` or ``extent`` turns that field into a
sweep axis. ``coeff`` takes a list of coefficient specs, one per dimension.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .periodic import CoefficientSpec, _parse_real


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the offending field."""


@dataclass
class ExperimentConfig:
    problem: str = "dirichlet"
    dim: int = 2
    extent: float = 1.0
    n_points: int = 12
    c: float = 1.0
    coefficients: tuple[str, ...] = ()
    origin: Optional[float] = None
    solver: str = "dense"
    shifts: tuple[complex, ...] = ()
    want: int = 20
    subspace: int = 80
    tol: float = 1e-10
    seed: int = 0
    workers: int = 1
    force: bool = False
    grid: Optional[str] = None
    out_csv: Optional[str] = None
    out_json: Optional[str] = None
    out_svg: Optional[str] = None
    out_fig: Optional[str] = None
    out_dir: Optional[str] = None
    timing: bool = False
    sweep_c: tuple[float, ...] = ()
    sweep_n: tuple[int, ...] = ()
    sweep_extent: tuple[float, ...] = ()

    def validate(self) -> "ExperimentConfig":
        if self.problem not in ("dirichlet", "periodic"):
            raise ConfigError(f"problem: expected 'dirichlet' or 'periodic', got {self.problem!r}")
        if self.dim not in (1, 2, 3):
            raise ConfigError(f"dim: expected 1, 2 or 3, got {self.dim}")
        if not self.extent > 0:
            raise ConfigError(f"extent: must be positive, got {self.extent}")
        if self.n_points < 3:
            raise ConfigError(f"n: must be at least 3, got {self.n_points}")
        if self.solver not in ("dense", "arnoldi"):
            raise ConfigError(f"solver: expected 'dense' or 'arnoldi', got {self.solver!r}")
        if self.problem == "periodic":
            if len(self.coefficients) != self.dim:
                raise ConfigError(
                    f"coeff: periodic problems need {self.dim} coefficients, got {len(self.coefficients)}"
                )
            for text in self.coefficients:
                try:
                    CoefficientSpec.parse(text)
                except ValueError as exc:
                    raise ConfigError(f"coeff: {exc}") from None
            if self.sweep_c:
                raise ConfigError("c: sweeping c only applies to dirichlet problems")
        elif self.coefficients:
            raise ConfigError("coeff: only periodic problems take coefficients")
        if self.origin is not None and self.problem != "periodic":
            raise ConfigError("origin: only periodic problems take an origin")
        if self.solver == "arnoldi":
            if not self.shifts:
                raise ConfigError("shift: the arnoldi solver needs at least one --shift")
            if not 1 <= self.want <= self.subspace // 2:
                raise ConfigError(f"want: must lie in 1..subspace/2 ({self.subspace // 2})")
        if self.workers < 1:
            raise ConfigError("workers: must be >= 1")
        if not self.tol > 0:
            raise ConfigError("tol: must be positive")
        return self

    def coefficient_specs(self) -> tuple[CoefficientSpec, ...]:
        return tuple(CoefficientSpec.parse(t) for t in self.coefficients)

    def is_sweep(self) -> bool:
        return bool(self.sweep_c or self.sweep_n or self.sweep_extent)

    def expand(self) -> list["ExperimentConfig"]:
        """Cartesian product of the sweep lists, one plain config per tuple."""
        cs = self.sweep_c or (self.c,)
        ns = self.sweep_n or (self.n_points,)
        ls = self.sweep_extent or (self.extent,)
        out = []
        for c in cs:
            for n in ns:
                for ext in ls:
                    out.append(dataclasses.replace(self, c=c, n_points=n, extent=ext,
                                                   sweep_c=(), sweep_n=(), sweep_extent=()))
        return out

    def tag(self) -> str:
        base = f"{self.problem}_{self.dim}d_N{self.n_points}_L{self.extent:g}"
        if self.problem == "dirichlet":
            return f"{base}_c{self.c:g}"
        return base + "_a" + "_".join(CoefficientSpec.parse(t).label() for t in self.coefficients)

    def echo(self) -> dict[str, Any]:
        """Plain-data view used as provenance in emitted records."""
        d = dataclasses.asdict(self)
        d["shifts"] = [[z.real, z.imag] for z in self.shifts]
        for k in ("coefficients", "sweep_c", "sweep_n", "sweep_extent"):
            d[k] = list(d[k])
        for k in ("out_csv", "out_json", "out_svg", "out_fig", "out_dir", "workers", "timing", "force"):
            d.pop(k)
        return d


# key aliases accepted in files and on the command line
_ALIASES = {"n": "n_points", "coeff": "coefficients", "shift": "shifts", "l": "extent"}
_LIST_FIELDS = {"c": "sweep_c", "n_points": "sweep_n", "extent": "sweep_extent"}


def parse_complex(text: str) -> complex:
    """``RE,IM`` or a Python complex literal such as ``2+20j``."""
    text = text.strip()
    if "," in text:
        re_s, im_s = text.split(",", 1)
        return complex(_parse_real(re_s), _parse_real(im_s))
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"shift: cannot parse {text!r}; use RE,IM") from None


def _split_list(text: str) -> list[str]:
    inner = text.strip()[1:-1]
    items, depth, cur = [], 0, ""
    for ch in inner:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            items.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if cur.strip():
        items.append(cur.strip())
    return items


def _coerce(key: str, raw: str) -> Any:
    ftype = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}[key]
    try:
        if key == "coefficients":
            raw = raw.strip()
            items = _split_list(raw) if raw.startswith("[") else raw.split()
            return tuple(items)
        if key == "shifts":
            raw = raw.strip()
            items = _split_list(raw) if raw.startswith("[") else [raw]
            return tuple(parse_complex(s.strip("() ")) for s in items)
        if "bool" in str(ftype):
            low = raw.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if "int" in str(ftype) and "float" not in str(ftype):
            return int(raw)
        if "float" in str(ftype):
            return _parse_real(raw)
        return raw.strip()
    except (ValueError, TypeError):
        raise ConfigError(f"{key}: cannot parse value {raw!r}") from None


def parse_config_text(text: str, source: str = "<config>") -> dict[str, Any]:
    """Parse ``key = value`` lines into field overrides for :class:`ExperimentConfig`."""
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    out: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower().replace("-", "_")
        key = _ALIASES.get(key, key)
        if key not in names:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in _LIST_FIELDS and value.startswith("["):
            items = _split_list(value)
            if not items:
                raise ConfigError(f"{source}:{lineno}: sweep list for {key!r} is empty")
            out[_LIST_FIELDS[key]] = tuple(_coerce(key, s) for s in items)
        else:
            out[key] = _coerce(key, value)
    return out


def load_config(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    return parse_config_text(text, str(path))


def build_config(file_values: dict[str, Any], flag_values: dict[str, Any]) -> ExperimentConfig:
    """Merge file settings with command-line flags (flags win) and validate."""
    merged = dict(file_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    cfg = ExperimentConfig(**merged)
    return cfg.validate()
