"""Seeded Monte-Carlo experiments over the graph ensembles.

Every experiment follows the same reproducibility contract:

* per-trial randomness comes from ``stable_trial_seed(master_seed, index)``
  (a SHA-256 of the pair), so results are independent of execution order
  and of the worker count;
* reports are assembled in trial-index order and serialize to canonical
  JSON bytes, so a rerun with the same config is byte-identical;
* dense linear algebra inside trials is pinned to a single BLAS thread,
  removing the one source of thread-count-dependent rounding.

Eigenvalue counts are compared against the limit law under two documented
conventions (see ``LocalLawConfig``): the predicted count defaults to
``(m+n) * mass`` and the spectrum scale to ``1/sqrt(m)``, which are the
choices under which the symmetrized law with its ``(alpha-1)/(alpha+1)``
atom describes the whole block spectrum.  The small-side variants
(``n * mass``, ``1/sqrt(n)``) are available behind flags; for m = n the
conventions coincide.

Regular graphs come from the switch-chain sampler, so "uniform ensemble"
results are approximate by construction; reports carry the caveat.
"""

from __future__ import annotations

import contextlib
import hashlib
import json
import math
import os
import platform
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy

from . import __version__
from .factors import FactorSpec, find_f_factor
from .graphs import (
    BipartiteGraph,
    DegreeSpec,
    normalized_er,
    normalized_regular,
    sample_er,
    sample_regular,
)
from .mplaw import Interval, LimitLaw, cdf, measure
from .spectra import Spectrum, bipartite_spectrum, count_in_interval, trace_statistic

try:
    from threadpoolctl import threadpool_limits
except ImportError:  # pragma: no cover
    @contextlib.contextmanager
    def threadpool_limits(*args, **kwargs):
        yield

__all__ = [
    "SCHEMA_VERSION",
    "SAMPLER_NOTE",
    "InfeasibleConfigError",
    "LocalLawConfig",
    "ExperimentReport",
    "stable_trial_seed",
    "guaranteed_interval_length",
    "default_interval_grid",
    "run_local_law_regular",
    "run_local_law_er",
    "esd_kolmogorov_distance",
    "wilson_interval",
    "estimate_regularity_probability",
    "regular_factor_frequency",
    "concentration_tail_check",
    "convergence_rate_sweep",
]

SCHEMA_VERSION = 1

SAMPLER_NOTE = (
    "regular graphs are sampled by a finite switch chain; "
    "uniformity over the ensemble is approximate"
)

#: predicted counts below this are reported as zero-measure, not pass/fail
ZERO_MASS_EPS = 1e-12

#: Phi^{-1}(0.975), the two-sided 95% normal quantile
_WILSON_Z = 1.959963984540054


class InfeasibleConfigError(ValueError):
    """Configuration asks for an object that cannot exist (exit code 3)."""


def stable_trial_seed(master_seed: int, index: int) -> int:
    """Deterministic 64-bit seed for one trial, stable across platforms."""
    digest = hashlib.sha256(f"{master_seed}:{index}".encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def _environment() -> dict:
    return {
        "package": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
    }


def wilson_interval(successes: int, trials: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def _parallel_map(worker, arg_tuples: list, threads: int) -> list:
    """Order-preserving map, in-process or over a process pool."""
    if threads == 0:
        threads = os.cpu_count() or 1
    if threads <= 1 or len(arg_tuples) <= 1:
        return [worker(args) for args in arg_tuples]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        chunk = max(1, len(arg_tuples) // (threads * 4))
        return list(pool.map(worker, arg_tuples, chunksize=chunk))


# ---------------------------------------------------------------------------
# report container
# ---------------------------------------------------------------------------


@dataclass
class ExperimentReport:
    """Per-trial records plus aggregates, serializable to canonical JSON."""

    kind: str
    config: dict
    intervals: list = field(default_factory=list)
    trials: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    environment: dict = field(default_factory=_environment)

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "kind": self.kind,
            "config": self.config,
            "environment": self.environment,
            "notes": self.notes,
            "intervals": self.intervals,
            "trials": self.trials,
            "aggregates": self.aggregates,
        }

    def to_json_bytes(self) -> bytes:
        text = json.dumps(self.to_json_dict(), sort_keys=True, indent=2, ensure_ascii=True)
        return (text + "\n").encode("ascii")

    def write_json(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_json_bytes())

    def summary_csv_text(self) -> str:
        """Per trial x interval summary: counts vs predictions."""
        lines = ["trial,interval_lo,interval_hi,N_I,predicted,rel_dev,pass"]
        for rec in self.trials:
            if "counts" not in rec:
                continue
            for k, iv in enumerate(self.intervals):
                count = rec["counts"][k]
                if iv["status"] == "zero_measure":
                    verdict, rel = "zero_measure", ""
                else:
                    rel = f"{rec['rel_devs'][k]:.17g}"
                    verdict = "1" if rec["passes"][k] else "0"
                lines.append(
                    f"{rec['index']},{iv['lo']:.17g},{iv['hi']:.17g},"
                    f"{count},{iv['predicted']:.17g},{rel},{verdict}"
                )
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(self.summary_csv_text())


# ---------------------------------------------------------------------------
# local law
# ---------------------------------------------------------------------------


def guaranteed_interval_length(degree: float, delta: float) -> float:
    """Interval length above which the count concentration is claimed,
    ``(log(d) / (delta^3 sqrt(d)))^(1/4)`` for growth parameter d."""
    if degree <= 1 or delta <= 0:
        raise ValueError("need degree > 1 and delta > 0")
    return (math.log(degree) / (delta ** 3 * math.sqrt(degree))) ** 0.25


def default_interval_grid(law: LimitLaw, count: int, length: float,
                          bulk_margin: float = 0.1) -> tuple[Interval, ...]:
    """Mirrored grid of 0-avoiding intervals anchored in the spectral bulk.

    ``count//2`` left endpoints are spread evenly over the positive bulk
    window (support shrunk by ``bulk_margin`` per side); each anchors an
    interval of the requested length, and the grid is mirrored to the
    negative axis.  Long intervals simply overhang the support edge.
    """
    if count < 2 or count % 2:
        raise ValueError("interval count must be even and >= 2")
    if length <= 0:
        raise ValueError("interval length must be positive")
    if not 0 < bulk_margin < 0.5:
        raise ValueError("bulk margin must be in (0, 0.5)")
    w0 = law.a + bulk_margin * (law.b - law.a)
    w1 = law.b - bulk_margin * (law.b - law.a)
    anchors = np.linspace(w0, w1, count // 2, endpoint=False)
    grid = [Interval(t, t + length) for t in anchors]
    grid += [Interval(-t - length, -t) for t in anchors]
    return tuple(sorted(grid, key=lambda iv: iv.lo))


@dataclass(frozen=True)
class LocalLawConfig:
    """Configuration for an eigenvalue-count experiment.

    Exactly one of ``d_left`` (regular model) or ``p`` (independent-edge
    model) is used by the corresponding runner.  ``interval_length=None``
    means the guaranteed length for the model's degree parameter.

    ``count_basis`` selects the predicted count ``basis * mass(I)``:
    ``"m+n"`` (default; the law normalizes the full block spectrum) or
    ``"n"`` (small side).  ``scale_basis`` selects the eigenvalue scale
    ``1/sqrt(basis)``: ``"m"`` (default; matches the law's support) or
    ``"n"``.
    """

    m: int
    n: int
    d_left: int | None = None
    p: float | None = None
    delta: float = 0.15
    trials: int = 50
    seed: int = 0
    intervals: tuple[Interval, ...] | None = None
    n_intervals: int = 8
    interval_length: float | None = None
    bulk_margin: float = 0.1
    count_basis: str = "m+n"
    scale_basis: str = "m"
    mixing_steps: int | None = None
    threads: int = 1

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("vertex counts must be >= 1")
        if self.m < self.n:
            raise ValueError("need m >= n (aspect ratio >= 1)")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.count_basis not in ("m+n", "n"):
            raise ValueError("count_basis must be 'm+n' or 'n'")
        if self.scale_basis not in ("m", "n"):
            raise ValueError("scale_basis must be 'm' or 'n'")
        if self.intervals is not None:
            object.__setattr__(self, "intervals", tuple(self.intervals))

    @property
    def alpha(self) -> float:
        return self.m / self.n

    def count_base(self) -> int:
        return self.m + self.n if self.count_basis == "m+n" else self.n

    def spectrum_scale(self) -> float:
        base = self.m if self.scale_basis == "m" else self.n
        return 1.0 / math.sqrt(base)

    def config_dict(self, model: str) -> dict:
        d = {
            "model": model,
            "m": self.m,
            "n": self.n,
            "d_left": self.d_left,
            "p": self.p,
            "delta": self.delta,
            "trials": self.trials,
            "seed": self.seed,
            "n_intervals": self.n_intervals,
            "interval_length": self.interval_length,
            "bulk_margin": self.bulk_margin,
            "count_basis": self.count_basis,
            "scale_basis": self.scale_basis,
            "mixing_steps": self.mixing_steps,
        }
        if self.intervals is not None:
            d["intervals"] = [[iv.lo, iv.hi] for iv in self.intervals]
        return d


def _resolve_grid(cfg: LocalLawConfig, law: LimitLaw, degree: float) -> tuple[Interval, ...]:
    if cfg.intervals is not None:
        grid = cfg.intervals
    else:
        length = cfg.interval_length
        if length is None:
            length = guaranteed_interval_length(degree, cfg.delta)
        grid = default_interval_grid(law, cfg.n_intervals, length, cfg.bulk_margin)
    for iv in grid:
        if iv.contains_zero:
            raise ValueError(
                f"interval {iv} contains 0; count intervals must avoid the atom at 0"
            )
    return grid


def _count_trial_regular(args) -> list[int]:
    m, n, d_left, d_right, mixing, seed, scale, bounds = args
    with threadpool_limits(limits=1):
        g = sample_regular(m, n, DegreeSpec(d_left, d_right), seed, mixing)
        norm = normalized_regular(g, DegreeSpec(d_left, d_right))
        s = bipartite_spectrum(norm.block, scale=scale)
        return [count_in_interval(s, Interval(lo, hi)) for lo, hi in bounds]


def _count_trial_er(args) -> list[int]:
    m, n, p, seed, scale, bounds = args
    with threadpool_limits(limits=1):
        g = sample_er(m, n, p, seed)
        norm = normalized_er(g, p)
        s = bipartite_spectrum(norm.block, scale=scale)
        return [count_in_interval(s, Interval(lo, hi)) for lo, hi in bounds]


def _assemble_local_law_report(cfg: LocalLawConfig, model: str, grid, law: LimitLaw,
                               all_counts: list[list[int]], notes: list[str]) -> ExperimentReport:
    base = cfg.count_base()
    interval_rows = []
    for iv in grid:
        mass = measure(iv, law)
        predicted = base * mass
        status = "zero_measure" if predicted <= ZERO_MASS_EPS else "ok"
        interval_rows.append(
            {"lo": iv.lo, "hi": iv.hi, "mass": mass, "predicted": predicted, "status": status}
        )
    trials = []
    n_pass = n_eval = 0
    max_rel = 0.0
    for t, counts in enumerate(all_counts):
        rel_devs = []
        passes = []
        for k, row in enumerate(interval_rows):
            if row["status"] == "zero_measure":
                rel_devs.append(None)
                passes.append(None)
                continue
            rel = abs(counts[k] - row["predicted"]) / row["predicted"]
            ok = rel < cfg.delta
            rel_devs.append(rel)
            passes.append(ok)
            n_eval += 1
            n_pass += ok
            max_rel = max(max_rel, rel)
        trials.append(
            {
                "index": t,
                "seed": stable_trial_seed(cfg.seed, t),
                "counts": [int(c) for c in counts],
                "rel_devs": rel_devs,
                "passes": passes,
            }
        )
    aggregates = {
        "pass_rate": (n_pass / n_eval) if n_eval else None,
        "n_pass": n_pass,
        "n_eval": n_eval,
        "max_rel_dev": max_rel if n_eval else None,
        "zero_measure_intervals": [
            k for k, row in enumerate(interval_rows) if row["status"] == "zero_measure"
        ],
    }
    return ExperimentReport(
        kind=f"local_law_{model}",
        config=cfg.config_dict(model),
        intervals=interval_rows,
        trials=trials,
        aggregates=aggregates,
        notes=notes,
    )


def run_local_law_regular(cfg: LocalLawConfig) -> ExperimentReport:
    """Eigenvalue counts of sampled regular graphs vs the limit law.

    Per trial: sample an exactly (d_left, d_right)-regular graph, form the
    centered/normalized block matrix, scale its spectrum, and count
    eigenvalues in each grid interval.  A trial-interval passes when the
    count deviates from the predicted count by a relative factor < delta.
    """
    if cfg.d_left is None:
        raise ValueError("regular model needs d_left")
    if (cfg.m * cfg.d_left) % cfg.n:
        raise InfeasibleConfigError(
            f"handshake fails: m*d_left={cfg.m * cfg.d_left} not divisible by n={cfg.n}"
        )
    d_right = (cfg.m * cfg.d_left) // cfg.n
    DegreeSpec(cfg.d_left, d_right).validate_for(cfg.m, cfg.n)
    if cfg.d_left in (0, cfg.n):
        raise InfeasibleConfigError("degenerate density d_left/n in {0, 1}")
    law = LimitLaw(cfg.alpha)
    grid = _resolve_grid(cfg, law, float(cfg.d_left))
    notes = [SAMPLER_NOTE]
    if cfg.d_left <= math.log(cfg.n):
        notes.append(
            f"d_left={cfg.d_left} is not large relative to log(n)={math.log(cfg.n):.2f}; "
            "the concentration regime assumes faster degree growth"
        )
        warnings.warn(notes[-1], stacklevel=2)
    bounds = tuple((iv.lo, iv.hi) for iv in grid)
    args = [
        (cfg.m, cfg.n, cfg.d_left, d_right, cfg.mixing_steps,
         stable_trial_seed(cfg.seed, t), cfg.spectrum_scale(), bounds)
        for t in range(cfg.trials)
    ]
    counts = _parallel_map(_count_trial_regular, args, cfg.threads)
    return _assemble_local_law_report(cfg, "regular", grid, law, counts, notes)


def run_local_law_er(cfg: LocalLawConfig) -> ExperimentReport:
    """Same pipeline on the independent-edge ensemble (standardized entries)."""
    if cfg.p is None:
        raise ValueError("independent-edge model needs p")
    if not 0.0 < cfg.p < 1.0:
        raise ValueError(f"need 0 < p < 1, got {cfg.p}")
    law = LimitLaw(cfg.alpha)
    degree = cfg.n * cfg.p
    if degree <= 1:
        raise InfeasibleConfigError(f"expected degree n*p={degree} too small")
    grid = _resolve_grid(cfg, law, degree)
    notes = []
    if degree <= math.log(cfg.n):
        notes.append(
            f"expected degree n*p={degree:.2f} is not large relative to "
            f"log(n)={math.log(cfg.n):.2f}"
        )
        warnings.warn(notes[-1], stacklevel=2)
    bounds = tuple((iv.lo, iv.hi) for iv in grid)
    args = [
        (cfg.m, cfg.n, cfg.p, stable_trial_seed(cfg.seed, t), cfg.spectrum_scale(), bounds)
        for t in range(cfg.trials)
    ]
    counts = _parallel_map(_count_trial_er, args, cfg.threads)
    return _assemble_local_law_report(cfg, "er", grid, law, counts, notes)


def esd_kolmogorov_distance(s: Spectrum, law: LimitLaw) -> float:
    """Kolmogorov distance between an empirical spectrum and the limit law.

    Handles the tied zeros and the law's atom at 0 by comparing both
    one-sided limits of the step functions at every distinct eigenvalue.
    """
    vals = s.scaled_values
    total = len(vals)
    uniq, counts = np.unique(vals, return_counts=True)
    cum = np.cumsum(counts)
    dist = 0.0
    for v, hi_count, lo_count in zip(uniq, cum, cum - counts):
        f = cdf(float(v), law)
        f_minus = f - (law.atom0 if v == 0.0 else 0.0)
        dist = max(dist, abs(f - hi_count / total), abs(f_minus - lo_count / total))
    return dist


# ---------------------------------------------------------------------------
# regularity probability
# ---------------------------------------------------------------------------


def estimate_regularity_probability(m: int, n: int, p: float, trials: int,
                                    seed: int) -> ExperimentReport:
    """Monte-Carlo estimate of P(G(m,n,p) is (n*p, m*p)-regular).

    Requires integer expected degrees (otherwise the probability is 0 and
    the configuration is rejected).  Trials are vectorized in fixed-size
    chunks, each seeded from (seed, chunk index).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    d_left_f, d_right_f = n * p, m * p
    if abs(d_left_f - round(d_left_f)) > 1e-9 or abs(d_right_f - round(d_right_f)) > 1e-9:
        raise InfeasibleConfigError(
            f"expected degrees n*p={d_left_f}, m*p={d_right_f} are not integers; "
            "regular outcomes are impossible"
        )
    d_left, d_right = int(round(d_left_f)), int(round(d_right_f))
    chunk = max(1, min(4096, (1 << 22) // (m * n)))
    successes = 0
    done = 0
    chunk_idx = 0
    while done < trials:
        k = min(chunk, trials - done)
        rng = np.random.default_rng(stable_trial_seed(seed, chunk_idx))
        block = rng.random((k, m, n)) < p
        rows_ok = (block.sum(axis=2) == d_left).all(axis=1)
        cols_ok = (block.sum(axis=1) == d_right).all(axis=1)
        successes += int((rows_ok & cols_ok).sum())
        done += k
        chunk_idx += 1
    estimate = successes / trials
    lo, hi = wilson_interval(successes, trials)
    return ExperimentReport(
        kind="regularity_probability",
        config={"m": m, "n": n, "p": p, "trials": trials, "seed": seed,
                "d_left": d_left, "d_right": d_right, "chunk": chunk},
        aggregates={"successes": successes, "estimate": estimate,
                    "ci95_low": lo, "ci95_high": hi},
    )


# ---------------------------------------------------------------------------
# regular factor frequency
# ---------------------------------------------------------------------------


def _factor_trial(args) -> bool:
    m, n, p, seed, d_left_f, d_right_f = args
    g = sample_er(m, n, p, seed)
    spec = FactorSpec((d_left_f,) * m, (d_right_f,) * n)
    return find_f_factor(g, spec).factor is not None


def regular_factor_frequency(m: int, n: int, p: float, delta_param: float,
                             trials: int, seed: int, threads: int = 1) -> ExperimentReport:
    """Frequency with which G(m,n,p) contains a shaved-down regular factor.

    Demands are ``d_left' = floor(n*p*(1-delta_param))`` per left vertex
    and ``d_right' = m*d_left'/n`` per right vertex; the configuration is
    rejected unless d_right' is an integer (demands must balance exactly).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must be in [0, 1], got {p}")
    if not 0.0 <= delta_param < 1.0:
        raise ValueError("shaving fraction must be in [0, 1)")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    d_left_f = math.floor(n * p * (1.0 - delta_param))
    if (m * d_left_f) % n:
        raise InfeasibleConfigError(
            f"rounded demand d_left'={d_left_f} gives non-integer "
            f"d_right'=m*d_left'/n={m * d_left_f / n}"
        )
    d_right_f = (m * d_left_f) // n
    if d_left_f > n or d_right_f > m:
        raise InfeasibleConfigError("rounded demands exceed class sizes")
    args = [(m, n, p, stable_trial_seed(seed, t), d_left_f, d_right_f)
            for t in range(trials)]
    found = _parallel_map(_factor_trial, args, threads)
    successes = int(sum(found))
    lo, hi = wilson_interval(successes, trials)
    return ExperimentReport(
        kind="regular_factor_frequency",
        config={"m": m, "n": n, "p": p, "delta_param": delta_param,
                "trials": trials, "seed": seed,
                "d_left_factor": d_left_f, "d_right_factor": d_right_f},
        trials=[{"index": t, "seed": stable_trial_seed(seed, t), "found": bool(v)}
                for t, v in enumerate(found)],
        aggregates={"successes": successes, "frequency": successes / trials,
                    "ci95_low": lo, "ci95_high": hi},
    )


# ---------------------------------------------------------------------------
# trace-statistic concentration
# ---------------------------------------------------------------------------


def _trace_trial(args) -> float:
    m, n, p, seed, scale, f = args
    with threadpool_limits(limits=1):
        g = sample_er(m, n, p, seed)
        norm = normalized_er(g, p)
        s = bipartite_spectrum(norm.block, scale=scale)
        return trace_statistic(s, f)


def concentration_tail_check(m: int, n: int, p: float, f, lipschitz: float,
                             t_grid, trials: int, seed: int, threads: int = 1,
                             c_reference: float | None = None,
                             scale_basis: str = "m") -> ExperimentReport:
    """Empirical tails of a Lipschitz trace statistic vs the Gaussian-type bound.

    ``f`` must be convex and ``lipschitz``-Lipschitz (supplied by the
    caller, who knows the construction); standardized entries are bounded
    by ``K = max(p, 1-p)/sqrt(p(1-p))``.  For each threshold T the report
    carries the empirical ``P(|Z - mean| >= T)``, the fitted constant
    ``-log(tail/4) * K^2 L^2 / T^2``, and, when ``c_reference`` is given,
    the reference curve ``4 exp(-c T^2 / (K^2 L^2))``.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"need 0 < p < 1, got {p}")
    if lipschitz <= 0:
        raise ValueError("degenerate window: the Lipschitz constant must be positive")
    if trials < 2:
        raise ValueError("need at least 2 trials")
    t_grid = [float(t) for t in t_grid]
    if not t_grid or any(t <= 0 for t in t_grid):
        raise ValueError("thresholds must be positive")
    if scale_basis not in ("m", "n"):
        raise ValueError("scale_basis must be 'm' or 'n'")
    base = m if scale_basis == "m" else n
    scale = 1.0 / math.sqrt(base)
    bound_k = max(p, 1.0 - p) / math.sqrt(p * (1.0 - p))
    args = [(m, n, p, stable_trial_seed(seed, t), scale, f) for t in range(trials)]
    zs = _parallel_map(_trace_trial, args, threads)
    zs_arr = np.asarray(zs)
    center = float(zs_arr.mean())
    dev = np.abs(zs_arr - center)
    rows = []
    fitted = []
    kl2 = bound_k * bound_k * lipschitz * lipschitz
    for t in t_grid:
        tail = float((dev >= t).mean())
        row = {"T": t, "tail": tail}
        if tail > 0:
            row["fitted_c"] = -math.log(tail / 4.0) * kl2 / (t * t)
            fitted.append(row["fitted_c"])
        else:
            row["fitted_c"] = None
        if c_reference is not None:
            row["bound"] = 4.0 * math.exp(-c_reference * t * t / kl2)
        rows.append(row)
    return ExperimentReport(
        kind="concentration_tail",
        config={"m": m, "n": n, "p": p, "lipschitz": lipschitz, "t_grid": t_grid,
                "trials": trials, "seed": seed, "scale_basis": scale_basis,
                "c_reference": c_reference, "entry_bound": bound_k},
        trials=[{"index": t, "seed": stable_trial_seed(seed, t), "z": z}
                for t, z in enumerate(zs)],
        aggregates={"mean_z": center, "std_z": float(zs_arr.std()),
                    "tails": rows, "fitted_c": min(fitted) if fitted else None},
    )


# ---------------------------------------------------------------------------
# convergence-rate sweep
# ---------------------------------------------------------------------------


def convergence_rate_sweep(n_list, alpha: float, p: float, interval: Interval,
                           trials: int, seed: int, threads: int = 1,
                           count_basis: str = "m+n",
                           scale_basis: str = "m") -> ExperimentReport:
    """Deviation of mean interval counts from the limit prediction vs n.

    For each n the mean of N_I over the trials is compared to the
    predicted count; the fitted exponent gamma of |deviation| ~ n^gamma
    is reported (expected <= 0.5: the absolute deviation grows at most
    like sqrt(n), i.e. the relative one decays).
    """
    n_list = [int(v) for v in n_list]
    if len(n_list) < 3:
        raise ValueError("need at least 3 sizes to fit a rate")
    if sorted(n_list) != n_list or len(set(n_list)) != len(n_list):
        raise ValueError("sizes must be strictly increasing")
    if not 0.0 < p < 1.0:
        raise ValueError(f"need 0 < p < 1, got {p}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if count_basis not in ("m+n", "n") or scale_basis not in ("m", "n"):
        raise ValueError("unknown normalization basis")
    law = LimitLaw(alpha)
    mass = measure(interval, law)
    pairs = []
    for n in n_list:
        m_f = alpha * n
        if abs(m_f - round(m_f)) > 1e-9:
            raise InfeasibleConfigError(f"alpha*n={m_f} is not an integer for n={n}")
        pairs.append((int(round(m_f)), n))
    bounds = ((interval.lo, interval.hi),)
    args = []
    for size_idx, (m, n) in enumerate(pairs):
        scale = 1.0 / math.sqrt(m if scale_basis == "m" else n)
        for t in range(trials):
            args.append((m, n, p, stable_trial_seed(seed, size_idx * trials + t),
                         scale, bounds))
    counts = _parallel_map(_count_trial_er, args, threads)
    rows = []
    rel_devs = []
    for size_idx, (m, n) in enumerate(pairs):
        block = [counts[size_idx * trials + t][0] for t in range(trials)]
        mean_count = float(np.mean(block))
        base = m + n if count_basis == "m+n" else n
        predicted = base * mass
        abs_dev = abs(mean_count - predicted)
        rel_dev = abs_dev / predicted if predicted > ZERO_MASS_EPS else None
        rows.append({"m": m, "n": n, "mean_count": mean_count, "predicted": predicted,
                     "abs_dev": abs_dev, "rel_dev": rel_dev, "counts": block})
        rel_devs.append(rel_dev)
    gamma = None
    if all(row["abs_dev"] > 0 for row in rows):
        logs_n = np.log([row["n"] for row in rows])
        logs_d = np.log([row["abs_dev"] for row in rows])
        gamma = float(np.polyfit(logs_n, logs_d, 1)[0])
    non_increasing = all(
        a is not None and b is not None and b <= a
        for a, b in zip(rel_devs, rel_devs[1:])
    )
    return ExperimentReport(
        kind="convergence_rate_sweep",
        config={"n_list": n_list, "alpha": alpha, "p": p,
                "interval": [interval.lo, interval.hi], "trials": trials,
                "seed": seed, "count_basis": count_basis, "scale_basis": scale_basis},
        intervals=[{"lo": interval.lo, "hi": interval.hi, "mass": mass,
                    "predicted": None, "status": "ok"}],
        trials=rows,
        aggregates={"gamma": gamma, "rel_devs": rel_devs,
                    "rel_dev_non_increasing": non_increasing},
    )
