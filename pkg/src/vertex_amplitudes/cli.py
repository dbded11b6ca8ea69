"""Command-line front end: sweeps, resonance tables, bound states and cascades.

Settings come from flags and, optionally, a ``key = value`` file given with
``--config``; flags win over the file.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .core import SquareWell, Tabulated, TwoTerminalGraph, VertexAmplitudeError
from .models import RingSpec, find_resonances, ring_transfer_matrix
from .solver import scatter
from .spectrum import (
    find_bound_states,
    finite_support_amplitudes,
    parallel_wells_bound_state,
)
from .transfer import cascade

log = logging.getLogger("vertex_amplitudes")

SUBJECTS = ("ring", "ab_ring", "parallel_wells", "cascade", "finite_support")
SWEPT = ("k", "l2", "alpha", "n_wells")
CSV_HEADER = ("param", "re_t", "im_t", "T", "re_r", "im_r", "R")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    subject: str = "ring"
    swept: str = "k"
    k_min: float = 0.1
    k_max: float = 10.0
    points: int = 1000
    k: float = 1.0  # fixed wave number when something else is swept
    l1: float = 1.0
    l2: float = 2.1
    alpha: float = 0.0
    depth_ev: float = -0.5
    width_nm: float = 1.0
    n_wells: int = 1
    n_rings: int = 2
    links: tuple[float, ...] = ()
    potential_file: str | None = None
    kappa_min: float = 0.0
    kappa_max: float | None = None
    format: str = "csv"
    out: str | None = None
    skip_log: str | None = None
    workers: int = 1

    def validate(self) -> "SweepConfig":
        if self.subject not in SUBJECTS:
            raise ConfigError(f"unknown subject {self.subject!r}")
        if self.swept not in SWEPT:
            raise ConfigError(f"cannot sweep {self.swept!r}")
        if self.swept == "n_wells" and self.subject != "parallel_wells":
            raise ConfigError("n_wells can only be swept for parallel_wells")
        if self.swept in ("l2", "alpha") and self.subject not in ("ring", "ab_ring", "cascade"):
            raise ConfigError(f"{self.swept} can only be swept for ring subjects")
        if self.points < 2:
            raise ConfigError("points must be >= 2")
        if not self.k_min < self.k_max:
            raise ConfigError(f"empty range: start {self.k_min} >= stop {self.k_max}")
        if self.swept == "k" and self.k_min <= 0:
            raise ConfigError("wave numbers must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.subject == "cascade" and self.links and len(self.links) != self.n_rings - 1:
            raise ConfigError(f"cascade of {self.n_rings} rings needs {self.n_rings - 1} links")
        return self

    def grid(self) -> np.ndarray:
        if self.swept == "n_wells":
            lo, hi = int(math.ceil(self.k_min)), int(math.floor(self.k_max))
            if lo < 1:
                raise ConfigError("n_wells range must start at 1 or above")
            return np.arange(lo, hi + 1, dtype=float)
        return np.linspace(self.k_min, self.k_max, self.points)


# --- evaluation ----------------------------------------------------------------


def _ring(cfg: SweepConfig, p: float) -> RingSpec:
    l2 = p if cfg.swept == "l2" else cfg.l2
    alpha = p if cfg.swept == "alpha" else (cfg.alpha if cfg.subject != "ring" else 0.0)
    return RingSpec(cfg.l1, l2, alpha)


def evaluate_point(cfg: SweepConfig, p: float):
    """``(t, r)`` at one grid value of the swept parameter."""
    k = p if cfg.swept == "k" else cfg.k
    if cfg.subject in ("ring", "ab_ring"):
        res = scatter(_ring(cfg, p).graph(), k)
        return res.t, res.r
    if cfg.subject == "parallel_wells":
        n = int(p) if cfg.swept == "n_wells" else cfg.n_wells
        res = scatter(TwoTerminalGraph.parallel_wells(n, cfg.depth_ev, cfg.width_nm), k)
        return res.t, res.r
    if cfg.subject == "cascade":
        spec = _ring(cfg, p)
        links = cfg.links if cfg.links else None
        tm = cascade([ring_transfer_matrix(spec, k)] * cfg.n_rings, links)
        return tm.t, tm.r
    if cfg.subject == "finite_support":
        res = finite_support_amplitudes(_potential(cfg), k)
        return res.t, res.r
    raise ConfigError(cfg.subject)


def _potential(cfg: SweepConfig):
    if cfg.potential_file:
        try:
            return Tabulated.from_file(cfg.potential_file)
        except OSError as exc:
            raise ConfigError(f"cannot read {cfg.potential_file}: {exc}") from exc
    return SquareWell(cfg.depth_ev, cfg.width_nm)


def _evaluate_chunk(args):
    cfg, params = args
    out = []
    for p in params:
        try:
            t, r = evaluate_point(cfg, p)
            out.append((complex(t), complex(r), None))
        except (VertexAmplitudeError, ZeroDivisionError) as exc:
            out.append((None, None, f"{type(exc).__name__}: {exc}"))
    return out


def run_points(cfg: SweepConfig, grid: np.ndarray):
    """Evaluate the grid, in input order, on ``cfg.workers`` processes."""
    params = [float(p) for p in grid]
    if cfg.workers == 1:
        return _evaluate_chunk((cfg, params))
    n_chunks = cfg.workers * 4
    size = max(1, math.ceil(len(params) / n_chunks))
    chunks = [(cfg, params[i:i + size]) for i in range(0, len(params), size)]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        results = list(pool.map(_evaluate_chunk, chunks))
    return [row for chunk in results for row in chunk]


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _rows(grid, results):
    rows, skipped = [], []
    for p, (t, r, err) in zip(grid, results):
        if err is not None:
            skipped.append((float(p), err))
            rows.append((float(p),) + (math.nan,) * 6)
        else:
            rows.append((float(p), t.real, t.imag, abs(t) ** 2, r.real, r.imag, abs(r) ** 2))
    return rows, skipped


def format_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_safe(v):
    return None if isinstance(v, float) and not math.isfinite(v) else v


def format_json(payload) -> str:
    def clean(obj):
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [clean(v) for v in obj]
        return _json_safe(obj)

    return json.dumps(clean(payload), indent=1, allow_nan=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def run_sweep(cfg: SweepConfig) -> int:
    cfg.validate()
    grid = cfg.grid()
    results = run_points(cfg, grid)
    rows, skipped = _rows(grid, results)
    if cfg.format == "csv":
        text = format_csv(rows)
    else:
        text = format_json({"columns": list(CSV_HEADER), "rows": rows,
                            "skipped": [{"param": p, "reason": why} for p, why in skipped]})
    _emit(text, cfg.out)
    _write_skip_log(cfg, skipped)
    log.info("%d points, %d skipped", len(rows), len(skipped))
    if skipped and len(skipped) == len(rows):
        log.error("every grid point was singular")
        return EXIT_NUMERIC
    return EXIT_OK


def _write_skip_log(cfg: SweepConfig, skipped) -> None:
    lines = "".join(f"{_fmt(p)}\t{why}\n" for p, why in skipped)
    if cfg.skip_log:
        Path(cfg.skip_log).write_text(lines)
    elif skipped:
        sys.stderr.write(lines)


def run_resonances(cfg: SweepConfig) -> int:
    if cfg.subject not in ("ring", "ab_ring"):
        raise ConfigError("resonances need subject ring or ab_ring")
    if cfg.k_max < cfg.k_min:
        raise ConfigError("k_max < k_min")
    spec = RingSpec(cfg.l1, cfg.l2, cfg.alpha if cfg.subject == "ab_ring" else 0.0)
    try:
        reports = find_resonances(spec, cfg.k_min, cfg.k_max)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _emit(format_json({"l1": spec.l1, "l2": spec.l2, "alpha": spec.alpha,
                       "resonances": [r.as_dict() for r in reports]}), cfg.out)
    return EXIT_OK


def run_bound_states(cfg: SweepConfig) -> int:
    rows = []
    if cfg.subject == "parallel_wells":
        for n in range(1, cfg.n_wells + 1):
            st = parallel_wells_bound_state(n, cfg.depth_ev, cfg.width_nm)
            rows.append({"n_wells": n, "kappa": st.kappa, "energy_ev": st.energy})
    elif cfg.subject == "finite_support":
        kappa_range = (cfg.kappa_min, cfg.kappa_max if cfg.kappa_max is not None else math.inf)
        for st in find_bound_states(_potential(cfg), kappa_range):
            rows.append({"n_wells": 1, "kappa": st.kappa, "energy_ev": st.energy})
    else:
        raise ConfigError("bound states need subject finite_support or parallel_wells")
    _emit(format_json({"bound_states": rows}), cfg.out)
    return EXIT_OK


# --- argument handling -------------------------------------------------------------


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, dashes equal underscores."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value.strip("\"'")
    return out


def _coerce(name: str, value):
    types = {f.name: f.type for f in fields(SweepConfig)}
    if name not in types:
        raise ConfigError(f"unknown setting {name!r}")
    if value is None or not isinstance(value, str):
        return value
    kind = types[name]
    try:
        if name == "links":
            return tuple(float(v) for v in value.replace(",", " ").split())
        if "int" in kind:
            return int(value)
        if "float" in kind:
            return None if value.lower() == "none" else float(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {value!r}") from exc
    return value


def build_config(ns: argparse.Namespace, **forced) -> SweepConfig:
    values = {}
    if getattr(ns, "config", None):
        values.update(read_config_file(ns.config))
    for f in fields(SweepConfig):
        v = getattr(ns, f.name, None)
        if v is not None:
            values[f.name] = v
    values.update(forced)
    return SweepConfig(**{k: _coerce(k, v) for k, v in values.items()})


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value settings file (flags win)")
    p.add_argument("--subject", choices=SUBJECTS)
    p.add_argument("--swept", choices=SWEPT, help="swept parameter (default k)")
    p.add_argument("--l1", type=float)
    p.add_argument("--l2", type=float)
    p.add_argument("--alpha", type=float, help="flux parameter alpha (nm^-1)")
    p.add_argument("--depth-ev", dest="depth_ev", type=float)
    p.add_argument("--width-nm", dest="width_nm", type=float)
    p.add_argument("--n-wells", dest="n_wells", type=int)
    p.add_argument("--n-rings", dest="n_rings", type=int)
    p.add_argument("--k-min", dest="k_min", type=float, help="start of the swept range")
    p.add_argument("--k-max", dest="k_max", type=float, help="end of the swept range")
    p.add_argument("--k", type=float, help="fixed wave number when sweeping l2/alpha/n_wells")
    p.add_argument("--points", type=int)
    p.add_argument("--kappa-min", dest="kappa_min", type=float)
    p.add_argument("--kappa-max", dest="kappa_max", type=float)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--potential-file", dest="potential_file", help="two columns: xi_nm V_eV")
    p.add_argument("--links", type=lambda s: tuple(float(v) for v in s.replace(",", " ").split()),
                   help="free-segment lengths between cascade rings")
    p.add_argument("--skip-log", dest="skip_log")
    p.add_argument("--workers", type=int)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vertex-amplitudes",
                                     description="Scattering on two-terminal quantum graphs.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("sweep", "t, r over a parameter grid"),
                        ("resonances", "FTR/STR table of a ring"),
                        ("bound-states", "bound-state table"),
                        ("cascade", "sweep a chain of identical rings")):
        _common(sub.add_parser(name, help=help_))
    return parser


def main(argv=None) -> int:
    ns = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if ns.command == "sweep":
            return run_sweep(build_config(ns))
        if ns.command == "cascade":
            return run_sweep(build_config(ns, subject="cascade"))
        if ns.command == "resonances":
            return run_resonances(build_config(ns))
        if ns.command == "bound-states":
            return run_bound_states(build_config(ns))
    except (ConfigError, ValueError) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("i/o error: %s", exc)
        return EXIT_CONFIG
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
