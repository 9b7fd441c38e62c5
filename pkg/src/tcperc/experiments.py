"""Monte Carlo harnesses.

Every trial draws its open edges from a :class:`~tcperc.env.UniformField`
keyed by ``(base_seed, trial)``, so the same trial sees nested open sets at
increasing densities and results do not depend on the worker count.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.stats import binomtest

from .core import (
    NEVER,
    Environment,
    Trajectory,
    distances,
    longest_occupied_length,
    run,
    run_kd_completion,
)
from .edgeset import EdgeSet
from .env import UniformField, open_from_field, trial_key
from .families import FamilyKind, FamilySpec, make

CSV_COLUMNS = (
    "family",
    "n",
    "p_left",
    "p_right",
    "seed",
    "trial",
    "saturated",
    "max_right",
    "max_left",
    "rounds",
)

DEFAULT_ALPHA = 4.0


def wilson_interval(successes: int, trials: int, confidence: float = 0.95):
    ci = binomtest(successes, trials).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


def _as_pair(p) -> tuple[float, float]:
    if np.isscalar(p):
        return float(p), float(p)
    p_left, p_right = p
    return float(p_left), float(p_right)


def _thresholds(p):
    return float(p) if np.isscalar(p) else _as_pair(p)


@dataclass(frozen=True)
class Dynamics:
    kind: str = "transitive"
    d: int = 3

    def __post_init__(self):
        if self.kind not in ("transitive", "kd"):
            raise ValueError(f"unknown dynamics {self.kind!r}")

    def run(self, env: Environment) -> Trajectory:
        if self.kind == "kd":
            return run_kd_completion(env, self.d)
        return run(env)


TRANSITIVE = Dynamics()


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    saturated: bool
    max_right: int
    max_left: int
    rounds: int
    occupied_count: int


@dataclass
class Instance:
    """A family materialised once per experiment: edges plus their lengths."""

    spec: FamilySpec
    e0: EdgeSet
    dist: np.ndarray

    @classmethod
    def build(cls, spec: FamilySpec) -> "Instance":
        e0 = make(spec)
        return cls(spec, e0, distances(e0))

    @property
    def n(self) -> int:
        return self.e0.n

    def environment(self, key, p, unoriented: bool = False) -> Environment:
        field_ = UniformField.generate(self.n, key)
        op = open_from_field(self.e0, field_, _thresholds(p), unoriented)
        return Environment(self.e0, op)


def _outcome(trial: int, env: Environment, traj: Trajectory, dist) -> TrialOutcome:
    never = traj.time == NEVER
    saturated = not (env.open.to_dense() & never).any()
    lengths = longest_occupied_length(env, traj, dist=dist)
    return TrialOutcome(
        trial=trial,
        saturated=bool(saturated),
        max_right=lengths.right,
        max_left=lengths.left,
        rounds=traj.t_max,
        occupied_count=int((~never).sum()),
    )


def _map(fn: Callable, items: Iterable, threads: int) -> list:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _check_linear(spec: FamilySpec, p) -> None:
    if not np.isscalar(p) and not spec.has_linear_order:
        raise ValueError(f"left/right densities need a linear family, got {spec.kind.value}")


def run_trials(
    instance: Instance,
    p,
    trials: int,
    base_seed: int,
    *,
    unoriented: bool = False,
    dynamics: Dynamics = TRANSITIVE,
    threads: int = 1,
) -> list[TrialOutcome]:
    _check_linear(instance.spec, p)

    def one(t: int) -> TrialOutcome:
        env = instance.environment(trial_key(base_seed, t), p, unoriented)
        return _outcome(t, env, dynamics.run(env), instance.dist)

    return _map(one, range(trials), threads)


@dataclass(frozen=True)
class SaturationEstimate:
    successes: int
    trials: int
    low: float
    high: float
    outcomes: tuple = field(default=(), repr=False, compare=False)

    @property
    def estimate(self) -> float:
        return self.successes / self.trials


def _estimate(outcomes: Sequence[TrialOutcome]) -> SaturationEstimate:
    k = sum(o.saturated for o in outcomes)
    low, high = wilson_interval(k, len(outcomes))
    return SaturationEstimate(k, len(outcomes), low, high, tuple(outcomes))


def saturation_prob(
    family: FamilySpec | Instance,
    p,
    trials: int,
    base_seed: int,
    *,
    unoriented: bool = False,
    dynamics: Dynamics = TRANSITIVE,
    threads: int = 1,
) -> SaturationEstimate:
    """Fraction of trials in which every open edge ends up occupied.

    ``p`` is ``p_open`` or a ``(p_left, p_right)`` pair.  The interval is the
    95% Wilson score interval.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    inst = family if isinstance(family, Instance) else Instance.build(family)
    outcomes = run_trials(
        inst, p, trials, base_seed, unoriented=unoriented, dynamics=dynamics, threads=threads
    )
    return _estimate(outcomes)


# -- Catalan saturation limit -----------------------------------------------

@dataclass(frozen=True)
class Tc3Row:
    n: int
    p_right: float
    alpha: float
    estimate: float
    low: float
    high: float
    trials: int

    @property
    def limit(self) -> float:
        return math.exp(-self.alpha**2)


def catalan_density(alpha: float, n: int) -> float:
    p = 1.0 - alpha / math.sqrt(n)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"alpha={alpha} gives p_right={p} outside [0, 1] at n={n}")
    return p


def tc3_curve(
    alpha: float, n_list: Sequence[int], trials: int, base_seed: int, threads: int = 1
) -> list[Tc3Row]:
    """Catalan saturation frequency at ``p_right = 1 - alpha / sqrt(n)``."""
    rows = []
    for n in n_list:
        if n < 100:
            raise ValueError(f"n={n} is below the supported minimum of 100")
        p = catalan_density(alpha, n)
        inst = Instance.build(FamilySpec(FamilyKind.LINEAR_ORIENTED, n))
        est = saturation_prob(inst, (0.0, p), trials, base_seed, threads=threads)
        rows.append(Tc3Row(n, p, alpha, est.estimate, est.low, est.high, trials))
    return rows


# -- regimes ----------------------------------------------------------------

class Regime(enum.Enum):
    SATURATED = "saturated"
    INTERMEDIATE_RIGHT = "intermediate-right"
    INTERMEDIATE_LEFT = "intermediate-left"
    SUBCRITICAL = "subcritical"
    OTHER = "other"


@dataclass(frozen=True)
class RegimeLabel:
    regime: Regime
    alpha: float


def classify_regime(
    traj: Trajectory, env: Environment, alpha: float = DEFAULT_ALPHA, dist=None
) -> RegimeLabel:
    """Label a run on a linear family by the long-edge statements.

    With ``L = alpha * log(n)``:

    * SATURATED: at least one open edge and all open edges occupied;
    * INTERMEDIATE_RIGHT: some open rightward edge longer than ``L`` exists,
      all of them are occupied and no occupied leftward edge is longer than
      ``L`` (INTERMEDIATE_LEFT mirrored);
    * SUBCRITICAL: no occupied non-initial edge longer than ``L``;
    * OTHER: anything else.
    """
    n = env.n
    if n < 8:
        raise ValueError("regime classification needs n >= 8")
    if dist is None:
        dist = distances(env.e0)
    cut = alpha * math.log(n)
    op = env.open.to_dense()
    occ = (traj.time != NEVER) & ~env.e0.to_dense()
    if op.any() and not (op & ~occ).any():
        return RegimeLabel(Regime.SATURATED, alpha)
    long_ = dist > cut
    upper = np.triu(np.ones((n, n), dtype=bool), 1)
    lower = upper.T
    for regime, side, other in (
        (Regime.INTERMEDIATE_RIGHT, upper, lower),
        (Regime.INTERMEDIATE_LEFT, lower, upper),
    ):
        targets = op & side & long_
        if targets.any() and occ[targets].all() and not (occ & other & long_).any():
            return RegimeLabel(regime, alpha)
    if not (occ & long_).any():
        return RegimeLabel(Regime.SUBCRITICAL, alpha)
    return RegimeLabel(Regime.OTHER, alpha)


def regime_counts(
    instance: Instance,
    p,
    trials: int,
    base_seed: int,
    alpha: float = DEFAULT_ALPHA,
    threads: int = 1,
) -> dict[Regime, int]:
    _check_linear(instance.spec, p)

    def one(t: int) -> Regime:
        env = instance.environment(trial_key(base_seed, t), p)
        return classify_regime(run(env), env, alpha, instance.dist).regime

    counts = {r: 0 for r in Regime}
    for r in _map(one, range(trials), threads):
        counts[r] += 1
    return counts


# -- sweeps -----------------------------------------------------------------

@dataclass(frozen=True)
class CellSummary:
    p_left: float
    p_right: float
    trials: int
    saturated: int
    mean_max_right: float
    mean_max_left: float
    regimes: dict

    @property
    def saturation_fraction(self) -> float:
        return self.saturated / self.trials


@dataclass
class SweepResult:
    family: FamilySpec
    n: int
    base_seed: int
    rows: list[dict]
    cells: list[CellSummary]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()

    def summary(self) -> list[dict]:
        out = []
        for c in self.cells:
            d = asdict(c)
            d["regimes"] = {k.value: v for k, v in c.regimes.items()}
            d["saturation_fraction"] = c.saturation_fraction
            out.append(d)
        return out


def sweep(
    family: FamilySpec,
    grid: Sequence,
    trials: int,
    base_seed: int,
    *,
    alpha: float = DEFAULT_ALPHA,
    unoriented: bool = False,
    dynamics: Dynamics = TRANSITIVE,
    threads: int = 1,
) -> SweepResult:
    """Run ``trials`` coupled trials at every grid point.

    Grid points are ``p_open`` values or ``(p_left, p_right)`` pairs.  Regime
    labels are only computed for linear families with ``n >= 8``.
    """
    if not grid:
        raise ValueError("grid must be nonempty")
    inst = Instance.build(family)
    label = inst.n >= 8 and family.has_linear_order
    rows: list[dict] = []
    cells: list[CellSummary] = []
    for p in grid:
        _check_linear(family, p)
        p_left, p_right = _as_pair(p)

        def one(t: int, p=p):
            env = inst.environment(trial_key(base_seed, t), p, unoriented)
            traj = dynamics.run(env)
            out = _outcome(t, env, traj, inst.dist)
            reg = classify_regime(traj, env, alpha, inst.dist).regime if label else None
            return out, reg

        results = _map(one, range(trials), threads)
        regimes = {r: 0 for r in Regime} if label else {}
        for out, reg in results:
            rows.append(
                {
                    "family": family.kind.value,
                    "n": inst.n,
                    "p_left": p_left,
                    "p_right": p_right,
                    "seed": base_seed,
                    "trial": out.trial,
                    "saturated": int(out.saturated),
                    "max_right": out.max_right,
                    "max_left": out.max_left,
                    "rounds": out.rounds,
                }
            )
            if reg is not None:
                regimes[reg] += 1
        outs = [o for o, _ in results]
        cells.append(
            CellSummary(
                p_left,
                p_right,
                trials,
                sum(o.saturated for o in outs),
                float(np.mean([o.max_right for o in outs])),
                float(np.mean([o.max_left for o in outs])),
                regimes,
            )
        )
    return SweepResult(family, inst.n, base_seed, rows, cells)


@dataclass
class MonotonicityReport:
    trials: int
    set_violations: list = field(default_factory=list)
    indicator_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.set_violations and not self.indicator_violations


def coupled_monotonicity(
    family: FamilySpec | Instance,
    p_values: Sequence[float],
    trials: int,
    base_seed: int,
    *,
    unoriented: bool = False,
    threads: int = 1,
) -> MonotonicityReport:
    """Check nested occupied sets and nondecreasing saturation along increasing ``p``.

    ``p_values`` are uniform densities, or ``(p_left, p_right)`` pairs that
    increase componentwise.
    """
    inst = family if isinstance(family, Instance) else Instance.build(family)
    pairs = [_as_pair(p) for p in p_values]
    for a, b in zip(pairs, pairs[1:]):
        if b[0] < a[0] or b[1] < a[1]:
            raise ValueError("densities must be nondecreasing")

    def one(t: int):
        key = trial_key(base_seed, t)
        field_ = UniformField.generate(inst.n, key)
        prev_final = prev_sat = None
        bad_set, bad_ind = [], []
        for idx, p in enumerate(p_values):
            env = Environment(inst.e0, open_from_field(inst.e0, field_, _thresholds(p), unoriented))
            traj = run(env)
            final = traj.final
            sat = not (env.open - final)
            if prev_final is not None:
                if not prev_final <= final:
                    bad_set.append((t, idx))
                if prev_sat and not sat:
                    bad_ind.append((t, idx))
            prev_final, prev_sat = final, sat
        return bad_set, bad_ind

    report = MonotonicityReport(trials)
    for bad_set, bad_ind in _map(one, range(trials), threads):
        report.set_violations.extend(bad_set)
        report.indicator_violations.extend(bad_ind)
    return report


# -- critical density -------------------------------------------------------

class PcNotFound(RuntimeError):
    pass


@dataclass(frozen=True)
class PcEstimate:
    p_c: float
    low: float
    high: float
    freq_low: float | None
    freq_high: float
    probes: tuple

    @property
    def half_width(self) -> float:
        return (self.high - self.low) / 2


def estimate_pc(
    family: FamilySpec | Instance,
    trials_per_point: int = 200,
    tolerance: float = 1 / 256,
    base_seed: int = 0,
    *,
    unoriented: bool = False,
    dynamics: Dynamics = TRANSITIVE,
    threads: int = 1,
) -> PcEstimate:
    """Bisect for the smallest density whose saturation frequency reaches 1/2.

    All probes reuse the per-trial uniform fields.  ``p = 0`` is never probed
    (it saturates vacuously); if no probe falls below 1/2 the estimate is 0.
    """
    if tolerance < 1 / 256:
        raise ValueError("tolerance must be at least 1/256")
    inst = family if isinstance(family, Instance) else Instance.build(family)
    probes = []

    def freq(p: float) -> float:
        outs = run_trials(
            inst, p, trials_per_point, base_seed,
            unoriented=unoriented, dynamics=dynamics, threads=threads,
        )
        f = sum(o.saturated for o in outs) / trials_per_point
        probes.append((p, f))
        return f

    f_hi = freq(1.0)
    if f_hi < 0.5:
        raise PcNotFound(f"saturation frequency {f_hi} < 1/2 even at p = 1")
    lo, hi = 0.0, 1.0
    f_lo = None
    while hi - lo > tolerance:
        mid = (lo + hi) / 2
        f = freq(mid)
        if f >= 0.5:
            hi, f_hi = mid, f
        else:
            lo, f_lo = mid, f
    p_c = 0.0 if f_lo is None else hi
    return PcEstimate(p_c, lo, hi, f_lo, f_hi, tuple(probes))
