"""Batch front end: configuration loading, parallel sweeps, reports.

Configuration is a flat key = value file (SI units, '#' comments, unknown
keys rejected).  Physical keys are the PhysicalParams field names; sweep keys
are omega_min, omega_max, omega_count, omega_spacing, temperatures, workers,
emit_components, brownian_kernel, require_stable.

Exit codes: 0 success, 2 configuration error, 3 unstable drift (only when
require_stable is set), 4 numerical singularity, 5 unphysical covariance.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys as _sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dynamics, entanglement, model
from .errors import (
    ConfigError, DriftUnstableError, InvalidParameterError, MirrorPairError,
    SingularityError, UnphysicalStateError,
)

CSV_COLUMNS = (
    "omega", "temperature", "var_u", "var_v", "commutator_sq",
    "degree", "degree_clipped", "entangled", "epr",
)
CSV_COLUMNS_BARE = (
    "omega", "temperature", "degree", "degree_clipped", "entangled", "epr",
)

_PARAM_KEYS = {f.name for f in dataclasses.fields(model.PhysicalParams)}
_SWEEP_KEYS = {
    "omega_min", "omega_max", "omega_count", "omega_spacing", "temperatures",
    "workers", "emit_components", "brownian_kernel", "require_stable",
}


def parse_config_text(text: str) -> dict:
    """Parse flat key = value lines into a string dict."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not key or not val:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = val
    unknown = set(values) - _PARAM_KEYS - _SWEEP_KEYS
    if unknown:
        raise ConfigError("unknown keys: %s" % ", ".join(sorted(unknown)))
    return values


def _parse_bool(val: str) -> bool:
    low = val.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ConfigError(f"expected a boolean, got {val!r}")


@dataclass(frozen=True)
class SweepSpec:
    """Grid and execution settings for one sweep."""

    params: model.PhysicalParams
    omega_min: float
    omega_max: float
    omega_count: int
    omega_spacing: str = "linear"       # linear | log | hybrid
    temperatures: tuple = (0.1, 1.0, 4.0)
    workers: int = 1
    emit_components: bool = True
    brownian_kernel: str = "corrected"
    require_stable: bool = False

    def __post_init__(self):
        if self.omega_count < 1 or not self.omega_min <= self.omega_max:
            raise ConfigError("omega grid must be non-empty and increasing")
        if self.omega_min <= 0:
            raise ConfigError("omega_min must be positive")
        if self.omega_spacing not in ("linear", "log", "hybrid"):
            raise ConfigError("omega_spacing must be linear, log or hybrid")
        if len(self.temperatures) == 0:
            raise ConfigError("temperature list must be non-empty")
        if any(t2 <= t1 for t1, t2 in zip(self.temperatures, self.temperatures[1:])):
            raise ConfigError("temperatures must be strictly increasing")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @classmethod
    def from_config(cls, values: dict) -> "SweepSpec":
        try:
            params = model.PhysicalParams.from_dict(
                {k: v for k, v in values.items() if k in _PARAM_KEYS}
            )
        except (InvalidParameterError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        omega_m = params.big_omega
        kwargs = {
            "params": params,
            "omega_min": float(values.get("omega_min", 0.5 * omega_m)),
            "omega_max": float(values.get("omega_max", 1.5 * omega_m)),
            "omega_count": int(values.get("omega_count", 2001)),
            "omega_spacing": values.get("omega_spacing", "linear"),
        }
        if "temperatures" in values:
            try:
                temps = tuple(
                    float(t) for t in values["temperatures"].split(",") if t.strip()
                )
            except ValueError as exc:
                raise ConfigError("bad temperature list") from exc
            kwargs["temperatures"] = temps
        if "workers" in values:
            kwargs["workers"] = int(values["workers"])
        if "emit_components" in values:
            kwargs["emit_components"] = _parse_bool(values["emit_components"])
        if "brownian_kernel" in values:
            kwargs["brownian_kernel"] = values["brownian_kernel"]
        if "require_stable" in values:
            kwargs["require_stable"] = _parse_bool(values["require_stable"])
        return cls(**kwargs)

    def omega_grid(self) -> np.ndarray:
        if self.omega_spacing == "linear":
            return np.linspace(self.omega_min, self.omega_max, self.omega_count)
        if self.omega_spacing == "log":
            return np.geomspace(self.omega_min, self.omega_max, self.omega_count)
        return dynamics.hybrid_grid(self.params.big_omega)


def _eval_chunk(args):
    sys_obj, kernel, temperature, omegas = args
    noise = dynamics.NoiseModel(
        temperature=temperature,
        big_gamma=sys_obj.params.big_gamma,
        big_omega=sys_obj.params.big_omega,
        kernel=kernel,
    )
    return entanglement.degree_sweep(sys_obj, noise, omegas)


def _sweep_rows(spec: SweepSpec):
    """Evaluate the sweep grid; returns (omegas, per-T dict of result arrays).

    Results are deterministic and independent of the worker count: the grid
    is chunked by index and reassembled in order.
    """
    sys_obj = dynamics.build_linear_system(
        spec.params, require_stable=spec.require_stable
    )
    omegas = spec.omega_grid()
    # Chunk size is independent of the worker count so the arithmetic (and
    # therefore the output bytes) cannot depend on the degree of parallelism.
    n_chunks = max(1, -(-omegas.size // 256))
    tasks = []
    for temp in spec.temperatures:
        for chunk in np.array_split(omegas, n_chunks):
            tasks.append((sys_obj, spec.brownian_kernel, temp, chunk))
    if spec.workers == 1:
        outs = [_eval_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            outs = list(pool.map(_eval_chunk, tasks, chunksize=1))
    results = {}
    for i, temp in enumerate(spec.temperatures):
        parts = outs[i * n_chunks:(i + 1) * n_chunks]
        results[temp] = {
            key: np.concatenate([p[key] for p in parts])
            for key in ("var_u", "var_v", "commutator_sq", "degree")
        }
    return omegas, results


def _fmt(x: float) -> str:
    return format(x, ".12e")


def _bands(omegas, mask):
    """Contiguous omega intervals where mask holds."""
    bands = []
    start = None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            bands.append([float(omegas[start]), float(omegas[i - 1])])
            start = None
    if start is not None:
        bands.append([float(omegas[start]), float(omegas[-1])])
    return bands


def run_sweep(spec: SweepSpec, out_dir, emit_grid: bool = False) -> dict:
    """Run the sweep and write sweep.csv, summary.json and optionally
    sweep.grid (gnuplot block format).  Returns the summary dict."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    omegas, results = _sweep_rows(spec)

    columns = CSV_COLUMNS if spec.emit_components else CSV_COLUMNS_BARE
    lines = [",".join(columns)]
    for temp in spec.temperatures:
        res = results[temp]
        for i, w in enumerate(omegas):
            degree = res["degree"][i]
            row = {
                "omega": _fmt(w),
                "temperature": _fmt(temp),
                "var_u": _fmt(res["var_u"][i]),
                "var_v": _fmt(res["var_v"][i]),
                "commutator_sq": _fmt(res["commutator_sq"][i]),
                "degree": _fmt(degree),
                "degree_clipped": _fmt(min(degree, 1.0)),
                "entangled": "true" if degree < 1.0 else "false",
                "epr": "true" if degree < 0.25 else "false",
            }
            lines.append(",".join(row[c] for c in columns))
    (out / "sweep.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    summary = {"temperatures": []}
    for temp in spec.temperatures:
        degree = results[temp]["degree"]
        imin = int(np.argmin(degree))
        summary["temperatures"].append({
            "temperature": temp,
            "min_degree": float(degree[imin]),
            "argmin_omega": float(omegas[imin]),
            "entangled_bands": _bands(omegas, degree < 1.0),
            "epr_bands": _bands(omegas, degree < 0.25),
        })
    (out / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    if emit_grid:
        blocks = []
        for temp in spec.temperatures:
            degree = results[temp]["degree"]
            blocks.append("\n".join(
                f"{_fmt(w)} {_fmt(temp)} {_fmt(min(d, 1.0))}"
                for w, d in zip(omegas, degree)
            ))
        (out / "sweep.grid").write_text(
            "\n\n".join(blocks) + "\n", encoding="utf-8"
        )
    return summary


def check_state(path, out=_sys.stdout) -> dict:
    """Evaluate the separability criterion on a covariance file."""
    state = entanglement.GaussianState.from_file(path)
    state.require_physical()
    product, bound = entanglement.separability_product(state, 1.0)
    best_a, best_product = entanglement.optimize_separability(state)
    report = {
        "product_at_unit_a": product,
        "bound": bound,
        "optimal_a": best_a,
        "optimal_product": best_product,
        "entangled": best_product < bound,
        "epr": best_product < bound / 4.0,
    }
    print(f"product (a=1):    {_fmt(product)}", file=out)
    print(f"bound:            {_fmt(bound)}", file=out)
    print(f"optimal a:        {_fmt(best_a)}", file=out)
    print(f"optimal product:  {_fmt(best_product)}", file=out)
    print(f"entangled:        {'yes' if report['entangled'] else 'no'}", file=out)
    print(f"EPR correlations: {'yes' if report['epr'] else 'no'}", file=out)
    return report


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mirrorpair",
        description="Radiation-pressure mirror-entanglement sweep engine",
    )
    parser.add_argument("--config", type=Path, help="key = value config file")
    parser.add_argument("--out", type=Path, default=Path("."),
                        help="output directory for sweep results")
    parser.add_argument("--workers", type=int, help="parallel worker count")
    mode = parser.add_mutually_exclusive_group(required=True)
    mode.add_argument("--sweep", action="store_true",
                      help="run a frequency/temperature sweep")
    mode.add_argument("--check-state", type=Path, metavar="PATH",
                      help="evaluate the separability criterion on a "
                           "covariance matrix file")
    parser.add_argument("--emit-grid", action="store_true",
                        help="also write a gnuplot-compatible grid file")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.check_state is not None:
            check_state(args.check_state)
            return 0
        values = {}
        if args.config is not None:
            values = parse_config_text(args.config.read_text(encoding="utf-8"))
        spec = SweepSpec.from_config(values)
        if args.workers is not None:
            spec = dataclasses.replace(spec, workers=args.workers)
        run_sweep(spec, args.out, emit_grid=args.emit_grid)
        return 0
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2
    except DriftUnstableError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 3
    except SingularityError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 4
    except UnphysicalStateError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 5
    except MirrorPairError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
