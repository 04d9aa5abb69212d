"""Convergence, conditioning and Lebesgue-constant benchmark harness.

Sweeps a family of Fibonacci grids with a smooth test field, evaluates
the approximation on a fixed random test set for several ansatz spaces
with support radius tied to the fill distance, and writes the
per-grid worst-case numbers to CSV files for external plotting.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bases import ANSATZ_KINDS, AnsatzSpec
from .nodes import fibonacci_grid
from .solver import MlsConfig, MultipleOfFill, evaluate_field_diagnostics
from .weights import hat_squared

__all__ = [
    "TestFunctionParams",
    "default_test_function",
    "random_uniform_sphere",
    "SweepConfig",
    "AnsatzRecord",
    "SweepRecord",
    "OrderEstimate",
    "default_r_factors",
    "run_sweep",
    "write_sweep_csvs",
    "estimate_order",
    "stable_records",
]

RAD2DEG = 180.0 / np.pi

# Fixed columns of errors.csv / conds.csv, matching the historical data
# layout these benchmarks are compared against.
SWEEP_COLUMNS = ("all_harm", "even_harm", "even_mon_cent", "tangent")

# Defaults for the canonical benchmark: sums of five localized
# exponential bumps, c_i * exp(-alpha_i * (1 - <p_i, y>)).
_DEFAULT_CENTERS = (
    (0.0, 0.0, 1.0),
    (0.932039, 0.0, 0.362358),
    (-0.362154, 0.612280, 0.696707),
    (0.904035, 0.279651, -0.323290),
    (-0.047932, -0.424684, -0.904072),
)
_DEFAULT_EXPONENTS = (1, 1, 2, 1, 1)
_DEFAULT_DECAY = (5.0, 7.0, 6.0, 5.0, 2.1)
_DEFAULT_AMPLITUDE = (2.0, 0.5, -2.0, -2.0, 0.2)


@dataclass(frozen=True, eq=False)
class TestFunctionParams:
    """Parameters of the bump-superposition test field.

    Each term contributes ``amplitude_i * exp(-decay_i * (1 - <p_i, y>))``.
    The integer ``term_exponents`` are kept for compatibility with older
    parameter tables but do not enter the default formula; with
    ``use_term_exponents`` the i-th exponential is raised to that power,
    i.e. the decay is multiplied by it.
    """

    __test__ = False  # not a pytest class despite the name

    centers: np.ndarray
    decay: np.ndarray
    amplitude: np.ndarray
    term_exponents: np.ndarray
    use_term_exponents: bool = False

    def __post_init__(self):
        # published center tables are truncated and one classic row is
        # ~0.4% off unit norm; accept anything that close and renormalize
        centers = np.asarray(self.centers, dtype=float)
        norms = np.linalg.norm(centers, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-2):
            raise ValueError("bump centers must be unit vectors within 1e-2")
        object.__setattr__(self, "centers", centers / norms[:, None])
        object.__setattr__(self, "decay",
                           np.asarray(self.decay, dtype=float))
        object.__setattr__(self, "amplitude",
                           np.asarray(self.amplitude, dtype=float))
        object.__setattr__(self, "term_exponents",
                           np.asarray(self.term_exponents, dtype=int))

    def evaluate(self, points) -> np.ndarray | float:
        """Test field values at one point or a stack of points."""
        points = np.asarray(points, dtype=float)
        single = points.ndim == 1
        pts = points[None, :] if single else points
        rate = self.decay
        if self.use_term_exponents:
            rate = rate * self.term_exponents
        terms = np.exp(-rate * (1.0 - pts @ self.centers.T))
        out = terms @ self.amplitude
        return float(out[0]) if single else out

    __call__ = evaluate


def default_test_function(use_term_exponents: bool = False) -> TestFunctionParams:
    """The canonical five-bump test field."""
    return TestFunctionParams(
        centers=np.array(_DEFAULT_CENTERS),
        decay=np.array(_DEFAULT_DECAY),
        amplitude=np.array(_DEFAULT_AMPLITUDE),
        term_exponents=np.array(_DEFAULT_EXPONENTS),
        use_term_exponents=use_term_exponents,
    )


def random_uniform_sphere(m: int, seed: int, dim: int = 3) -> np.ndarray:
    """``m`` reproducible uniform points on ``S^{dim-1}``.

    Normalized standard Gaussian draws; the same seed always yields the
    same sequence, and a longer draw extends a shorter one.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((m, dim))
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms == 0):  # pragma: no cover - essentially impossible
        redo = norms == 0
        g[redo] = rng.standard_normal((int(redo.sum()), dim))
        norms = np.linalg.norm(g, axis=1)
    return g / norms[:, None]


def default_r_factors(kinds=SWEEP_COLUMNS) -> dict[str, float]:
    """Support radius multiples: 4.5 for the full harmonic space (its
    dimension is larger), 3.5 for the reduced and tangent families."""
    return {kind: 4.5 if kind == "all_harm" else 3.5 for kind in kinds}


@dataclass
class SweepConfig:
    """Configuration of one benchmark sweep.

    Grids are the Fibonacci family ``n = 5 * 2^k`` for ``k`` in
    ``grid_exponents``; the test set of ``test_set_size`` uniform random
    points is drawn once from ``seed`` and shared by all grids.
    """

    grid_exponents: list[int] = field(default_factory=lambda: list(range(1, 11)))
    ansatz_kinds: tuple[str, ...] = SWEEP_COLUMNS
    degree: int = 3
    r_factors: dict[str, float] | None = None
    test_set_size: int = 10_000
    seed: int = 0
    outdir: str | Path | None = None
    fill_samples: int = 20_000
    rescale_diagonal: bool = True
    n_jobs: int = 1
    params: TestFunctionParams | None = None

    def __post_init__(self):
        if self.test_set_size < 1:
            raise ValueError("test_set_size must be >= 1")
        unknown = set(self.ansatz_kinds) - set(ANSATZ_KINDS)
        if unknown:
            raise ValueError(f"unknown ansatz kinds: {sorted(unknown)}")
        if self.r_factors is None:
            self.r_factors = default_r_factors(self.ansatz_kinds)


@dataclass
class AnsatzRecord:
    """Worst-case numbers of one ansatz on one grid (NaN when failed)."""

    linf_error: float
    worst_condition: float
    max_lebesgue: float
    n_failed: int
    delta: float


@dataclass
class SweepRecord:
    """Per-grid sweep results; ``results`` maps ansatz kind to its record."""

    k: int
    n_nodes: int
    fill_deg: float
    sep_deg: float
    uniformity: float
    results: dict[str, AnsatzRecord]


def run_sweep(config: SweepConfig, progress=None) -> list[SweepRecord]:
    """Run the sweep and optionally write the CSV outputs.

    ``progress`` may be a callable taking a status string.  Returns one
    record per grid exponent; failed solves are skipped and counted, so a
    partially failing ansatz still yields a record (flagged by
    ``n_failed > 0``).
    """
    params = config.params if config.params is not None \
        else default_test_function()
    test_set = random_uniform_sphere(config.test_set_size, config.seed)
    f_test = params.evaluate(test_set)
    records = []
    for k in config.grid_exponents:
        nodes = fibonacci_grid(5 * 2 ** k)
        h = nodes.fill_distance_estimate(samples=config.fill_samples,
                                         seed=config.seed + 1)
        q = nodes.separation_distance
        f_nodes = params.evaluate(nodes.points)
        results = {}
        for kind in config.ansatz_kinds:
            r_factor = config.r_factors[kind]
            cfg = MlsConfig(
                ansatz=AnsatzSpec(kind, config.degree),
                profile=hat_squared(),
                delta_rule=MultipleOfFill(r_factor),
                rescale_diagonal=config.rescale_diagonal,
                on_error="skip",
            )
            diag = evaluate_field_diagnostics(
                cfg, nodes, f_nodes, test_set, h=h, n_jobs=config.n_jobs)
            ok = ~np.isnan(diag.values)
            results[kind] = AnsatzRecord(
                linf_error=float(np.abs(diag.values[ok] - f_test[ok]).max())
                if np.any(ok) else float("nan"),
                worst_condition=float(np.nanmax(diag.gram_condition))
                if np.any(ok) else float("nan"),
                max_lebesgue=float(np.nanmax(diag.lebesgue))
                if np.any(ok) else float("nan"),
                n_failed=diag.n_failed,
                delta=r_factor * h,
            )
            if progress is not None:
                progress(f"k={k} N={nodes.n} {kind}: "
                         f"linf={results[kind].linf_error:.3e} "
                         f"failed={diag.n_failed}")
        records.append(SweepRecord(
            k=k,
            n_nodes=nodes.n,
            fill_deg=h * RAD2DEG,
            sep_deg=q * RAD2DEG,
            uniformity=h / q,
            results=results,
        ))
    if config.outdir is not None:
        write_sweep_csvs(records, config.outdir, config.ansatz_kinds)
    return records


def _fmt(x) -> str:
    return format(x, ".17g")


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_sweep_csvs(records: list[SweepRecord], outdir,
                     kinds=SWEEP_COLUMNS) -> dict[str, Path]:
    """Write errors.csv, conds.csv, lebesgue.csv and grid.csv.

    ``errors.csv`` and ``conds.csv`` always carry the four fixed ansatz
    columns (missing or failed entries are empty); ``conds.csv`` stores
    raw condition numbers, not their logarithms.  ``lebesgue.csv`` has
    one column per swept ansatz.
    """
    outdir = Path(outdir)
    paths = {}

    def cell(record: SweepRecord, kind: str, attr: str) -> str:
        rec = record.results.get(kind)
        if rec is None or rec.n_failed > 0 or not np.isfinite(getattr(rec, attr)):
            return ""
        return _fmt(getattr(rec, attr))

    header = ["filldist_deg"] + list(SWEEP_COLUMNS)
    for name, attr in (("errors.csv", "linf_error"),
                       ("conds.csv", "worst_condition")):
        rows = [[_fmt(r.fill_deg)] + [cell(r, kind, attr)
                                      for kind in SWEEP_COLUMNS]
                for r in records]
        paths[name] = outdir / name
        _write_csv(paths[name], header, rows)

    leb_header = ["filldist_deg"] + list(kinds)
    leb_rows = [[_fmt(r.fill_deg)] + [cell(r, kind, "max_lebesgue")
                                      for kind in kinds]
                for r in records]
    paths["lebesgue.csv"] = outdir / "lebesgue.csv"
    _write_csv(paths["lebesgue.csv"], leb_header, leb_rows)

    grid_rows = [[str(r.n_nodes), _fmt(r.fill_deg), _fmt(r.sep_deg),
                  _fmt(r.uniformity)] for r in records]
    paths["grid.csv"] = outdir / "grid.csv"
    _write_csv(paths["grid.csv"], ["N", "fill_deg", "sep_deg", "uniformity"],
               grid_rows)
    return paths


@dataclass(frozen=True)
class OrderEstimate:
    """Least squares slope of log(error) against log(fill distance)."""

    slope: float
    intercept: float
    residual: float
    n_used: int


def estimate_order(records: list[SweepRecord], kind: str,
                   h_range_deg: tuple[float, float]) -> OrderEstimate:
    """Empirical convergence order of one ansatz over an h window.

    Uses every record whose fill distance lies in ``h_range_deg`` and
    whose error is finite with no failed points; requires at least three
    such records.  ``residual`` is the RMS misfit of the line.
    """
    lo, hi = h_range_deg
    hs, errs = [], []
    for r in records:
        rec = r.results.get(kind)
        if rec is None or rec.n_failed > 0:
            continue
        if lo <= r.fill_deg <= hi and np.isfinite(rec.linf_error) \
                and rec.linf_error > 0:
            hs.append(r.fill_deg)
            errs.append(rec.linf_error)
    if len(hs) < 3:
        raise ValueError(
            f"need at least 3 usable records in h range [{lo}, {hi}] deg "
            f"for {kind!r}, found {len(hs)}")
    x = np.log(np.asarray(hs))
    y = np.log(np.asarray(errs))
    slope, intercept = np.polyfit(x, y, 1)
    fit = slope * x + intercept
    residual = float(np.sqrt(np.mean((y - fit) ** 2)))
    return OrderEstimate(slope=float(slope), intercept=float(intercept),
                         residual=residual, n_used=len(hs))


def stable_records(records: list[SweepRecord], kind: str,
                   max_condition: float = 1e8) -> list[SweepRecord]:
    """Records where ``kind`` ran in its stable regime.

    Stable means: no failed evaluation points, worst Gram condition at
    most ``max_condition`` (past that the least squares digits are gone),
    and support radius below pi/2 so every local problem really is local.
    """
    out = []
    for r in records:
        rec = r.results.get(kind)
        if rec is None or rec.n_failed > 0:
            continue
        if not np.isfinite(rec.worst_condition) \
                or rec.worst_condition > max_condition:
            continue
        if rec.delta >= np.pi / 2:
            continue
        out.append(r)
    return out
