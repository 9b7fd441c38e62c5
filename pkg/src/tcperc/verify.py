"""Randomised checks of the structural lemmas on small instances.

Each suite draws its instances from streams keyed by ``(seed, suite code,
instance)`` so a single suite can be rerun in isolation and the report lists
the per-instance keys of every failure.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .core import NEVER, Environment, run, run_slowed
from .edgeset import EdgeSet
from .env import OpenModel, sample_open, uniform_stream
from .families import FamilyKind, FamilySpec, make
from .oracles import (
    bracketings,
    catalan,
    catalan_environment,
    catalan_minimal_sets,
    chain,
    check_al_property,
    connected_necessary_violations,
    ie_good_violations,
    ie_lemma_violations,
    minimal_sets_exhaustive,
    run_tilde,
    site_reachability,
    verify_trading,
    witness_table,
)

MAX_WITNESS_N = 16
_MAX_REPORTED = 5


@dataclass
class SuiteResult:
    name: str
    instances: int = 0
    checks: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, key, detail) -> None:
        if len(self.failures) < _MAX_REPORTED:
            self.failures.append({"key": list(key), "detail": detail})
        else:
            self.failures.append(None)

    def to_dict(self) -> dict:
        shown = [f for f in self.failures if f is not None]
        return {
            "name": self.name,
            "passed": self.passed,
            "instances": self.instances,
            "checks": self.checks,
            "failure_count": len(self.failures),
            "failures": shown,
            "seconds": round(self.seconds, 3),
        }


@dataclass
class VerifyReport:
    config: dict
    suites: list[SuiteResult]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "passed": self.passed,
            "suites": [s.to_dict() for s in self.suites],
        }


class _Draws:
    """Deterministic parameter draws for one instance."""

    def __init__(self, key):
        self.key = key
        self.u = uniform_stream(key, "order", 16)
        self.pos = 0

    def uniform(self, lo: float, hi: float) -> float:
        x = self.u[self.pos]
        self.pos += 1
        return lo + (hi - lo) * float(x)

    def integer(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``."""
        return lo + min(int(self.uniform(0, hi - lo + 1)), hi - lo)

    def seed(self) -> int:
        return int(self.uniform(0, 2**31))


def _linear_env(d: _Draws, n: int, lo: float = 0.05, hi: float = 0.6) -> Environment:
    e0 = make(FamilySpec(FamilyKind.LINEAR_UNORIENTED, n))
    model = OpenModel.left_right(d.uniform(lo, hi), d.uniform(lo, hi), seed=d.seed())
    return Environment(e0, sample_open(e0, model))


def _random_env(d: _Draws, n: int) -> Environment:
    """An instance from a randomly chosen family and density."""
    pick = d.integer(0, 4)
    if pick == 0:
        spec = FamilySpec(FamilyKind.LINEAR_UNORIENTED, n)
    elif pick == 1:
        spec = FamilySpec(FamilyKind.LINEAR_ORIENTED, n)
    elif pick == 2:
        spec = FamilySpec(FamilyKind.ER_INITIAL, n, p_initial=d.uniform(0.05, 0.3), seed=d.seed())
    elif pick == 3:
        spec = FamilySpec(FamilyKind.R_PAIRS, n - n % 2)
    else:
        spec = FamilySpec(FamilyKind.HYPERCUBE, dim=max(1, min(5, n.bit_length() - 1)))
    e0 = make(spec)
    p = d.uniform(0.05, 0.6)
    if d.uniform(0, 1) < 0.5:
        model = OpenModel.uniform(p, seed=d.seed())
    elif spec.has_linear_order:
        model = OpenModel.left_right(p, d.uniform(0.05, 0.6), seed=d.seed())
    else:
        model = OpenModel.uniform(p, seed=d.seed(), unoriented=True)
    return Environment(e0, sample_open(e0, model))


def _rightward_open(d: _Draws, n: int) -> EdgeSet:
    c = chain(n)
    model = OpenModel.left_right(0.0, d.uniform(0.1, 0.8), seed=d.seed())
    return sample_open(c, model).rightward()


SUITES = (
    "connected-necessary",
    "ie-lemma",
    "al-property",
    "ie-good",
    "slowed-parallel",
    "site-path",
    "tilde-dominates",
    "edge-trading",
    "catalan-counts",
)


def _suite_code(name: str) -> int:
    return SUITES.index(name)


def run_verification(
    max_n: int = 12,
    instances: int = 50,
    seed: int = 1,
    suites=None,
    order_seeds: int = 3,
    max_n_large: int = 60,
) -> VerifyReport:
    """Run the lemma suites and collect per-suite results.

    Witness-based suites use ``4 <= n <= max_n`` (capped at 16 for the
    exhaustive search); the slowed, trading and site-path suites use
    ``n <= max_n_large``.
    """
    if max_n < 4:
        raise ValueError("max_n must be at least 4")
    if max_n > MAX_WITNESS_N:
        raise ValueError(f"max_n above {MAX_WITNESS_N} makes the witness search infeasible")
    names = SUITES if suites is None else tuple(suites)
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}")
    config = {
        "max_n": max_n,
        "instances": instances,
        "seed": seed,
        "suites": list(names),
        "order_seeds": order_seeds,
        "max_n_large": max_n_large,
    }
    results = []
    for name in names:
        res = SuiteResult(name)
        start = time.perf_counter()
        _RUNNERS[name](res, max_n, instances, seed, order_seeds, max_n_large)
        res.seconds = time.perf_counter() - start
        results.append(res)
    return VerifyReport(config, results)


def _keys(name: str, seed: int, instances: int):
    code = _suite_code(name)
    for i in range(instances):
        key = (seed, code, i)
        yield key, _Draws(key)


def _connected(res, max_n, instances, seed, *_):
    for key, d in _keys(res.name, seed, instances):
        env = _random_env(d, d.integer(4, max(4, 3 * max_n)))
        bad = connected_necessary_violations(env, run(env))
        res.instances += 1
        res.checks += env.n * (env.n - 1)
        if bad:
            res.fail(key, {"n": env.n, "edges": bad[:5]})


def _ie(res, max_n, instances, seed, *_):
    for key, d in _keys(res.name, seed, instances):
        env = _random_env(d, d.integer(4, max_n))
        table = witness_table(env)
        bad = ie_lemma_violations(env, table=table)
        res.instances += 1
        res.checks += int((table >= 0).sum())
        if bad:
            res.fail(key, {"n": env.n, "violations": [list(map(str, b)) for b in bad[:5]]})


def _al(res, max_n, instances, seed, *_):
    for key, d in _keys(res.name, seed, instances):
        env = _linear_env(d, d.integer(4, max_n))
        report = check_al_property(env)
        res.instances += 1
        res.checks += report.longest
        if not report.ok:
            res.fail(key, {"n": env.n, "missing_scales": report.missing_scales})


def _good(res, max_n, instances, seed, *_):
    for key, d in _keys(res.name, seed, instances):
        n = d.integer(4, max_n)
        opr = _rightward_open(d, n)
        bad = ie_good_violations(n, opr)
        res.instances += 1
        res.checks += int(np.triu(run_tilde(n, opr).time != NEVER, 2).sum())
        if bad:
            res.fail(key, {"n": n, "violations": [list(map(list, b)) for b in bad[:5]]})


def _slowed(res, max_n, instances, seed, order_seeds, max_n_large):
    for key, d in _keys(res.name, seed, instances):
        env = _random_env(d, d.integer(4, max_n_large))
        final = run(env).final
        res.instances += 1
        for s in range(order_seeds):
            res.checks += 1
            if run_slowed(env, d.seed() + s).final != final:
                res.fail(key, {"n": env.n, "order_index": s})
        res.checks += 1
        if run_slowed(env, 0, lexicographic=True).final != final:
            res.fail(key, {"n": env.n, "order": "lexicographic"})


def _site(res, max_n, instances, seed, order_seeds, max_n_large):
    for key, d in _keys(res.name, seed, instances):
        n = d.integer(4, max_n_large)
        env = catalan_environment(n, _rightward_open(d, n))
        reach = site_reachability(env)
        missed = reach & (run(env).time == NEVER)
        res.instances += 1
        res.checks += int(reach.sum())
        if missed.any():
            res.fail(key, {"n": n, "edges": np.argwhere(missed)[:5].tolist()})


def _tilde(res, max_n, instances, seed, order_seeds, max_n_large):
    for key, d in _keys(res.name, seed, instances):
        n = d.integer(4, max_n_large)
        opr = _rightward_open(d, n)
        cat = run(catalan_environment(n, opr)).final
        til = run_tilde(n, opr).final
        res.instances += 1
        res.checks += len(cat)
        if not cat <= til:
            res.fail(key, {"n": n, "missing": (cat - til).edges()[:5]})


def _trading(res, max_n, instances, seed, order_seeds, max_n_large):
    for key, d in _keys(res.name, seed, instances):
        env = _linear_env(d, d.integer(4, max_n_large), 0.05, 0.5)
        report = verify_trading(env)
        res.instances += 1
        res.checks += report.rounds + 2
        if not report.ok:
            res.fail(
                key,
                {
                    "n": env.n,
                    "first_failing_round": report.first_failing_round,
                    "hat_dominates": report.hat_dominates,
                    "left_contained": report.left_contained,
                },
            )


def _catalan(res, *_):
    for ell in range(2, 7):
        exhaustive = catalan_minimal_sets(ell, method="exhaustive")
        res.instances += 1
        res.checks += 3
        same = minimal_sets_exhaustive(ell) == bracketings(ell)
        if exhaustive.count != catalan(ell - 1) or not same:
            res.fail((ell,), {"count": exhaustive.count, "expected": catalan(ell - 1)})
        if not exhaustive.all_sizes_ell_minus_one:
            res.fail((ell,), {"sizes": sorted(exhaustive.sizes)})


_RUNNERS = {
    "connected-necessary": _connected,
    "ie-lemma": _ie,
    "al-property": _al,
    "ie-good": _good,
    "slowed-parallel": _slowed,
    "site-path": _site,
    "tilde-dominates": _tilde,
    "edge-trading": _trading,
    "catalan-counts": _catalan,
}
