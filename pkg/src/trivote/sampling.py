"""Impartial-culture profiles and the Monte Carlo satisfaction experiment."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Optional, Sequence

import numpy as np

from trivote.axioms import AxiomId, check
from trivote.errors import ConfigError
from trivote.model import CandidateSet, ElectionInstance, TrichotomousBallot, validate_instance
from trivote.rules import RULES, SEQUENTIAL_RULES, RuleConfig, run_rule

__all__ = [
    "SAMPLERS",
    "TABLE_AXIOMS",
    "ExperimentConfig",
    "SatisfactionTable",
    "sample_ballot",
    "sample_instance",
    "profile_rng",
    "run_experiment",
]

SAMPLERS = ("uniform", "weak-order")
TABLE_AXIOMS = (AxiomId.WA, AxiomId.WAR, AxiomId.WTPJR, AxiomId.WNCR, AxiomId.NCR)


def _surjection_count(m: int, tiers: int) -> int:
    """Ordered partitions of m items into exactly ``tiers`` nonempty blocks."""
    return sum((-1) ** j * math.comb(tiers, j) * (tiers - j) ** m for j in range(tiers + 1))


def sample_ballot(m: int, rng: np.random.Generator, variant: str = "uniform") -> TrichotomousBallot:
    """Draw one ballot.

    ``uniform`` puts each candidate in approve / indifferent / disapprove with
    probability 1/3, i.e. uniform over the ``3**m`` trichotomous ballots.
    ``weak-order`` is uniform over weak orders with at most three nonempty
    tiers; three tiers read as (+, 0, -), two as (+, -), one as all-indifferent.
    """
    if m < 1:
        raise ConfigError(f"need m >= 1, got {m}")
    if variant == "uniform":
        classes = rng.integers(0, 3, size=m)
    elif variant == "weak-order":
        counts = np.array([_surjection_count(m, t) for t in (1, 2, 3)], dtype=float)
        tiers = int(rng.choice([1, 2, 3], p=counts / counts.sum()))
        while True:
            draw = rng.integers(0, tiers, size=m)
            if len(set(draw.tolist())) == tiers:
                break
        mapping = {1: (1,), 2: (0, 2), 3: (0, 1, 2)}[tiers]
        classes = np.array([mapping[t] for t in draw])
    else:
        raise ConfigError(f"unknown sampler {variant!r}; choose from {SAMPLERS}")
    approve = CandidateSet.of(np.flatnonzero(classes == 0).tolist(), m)
    disapprove = CandidateSet.of(np.flatnonzero(classes == 2).tolist(), m)
    return TrichotomousBallot(approve, disapprove)


@dataclass(frozen=True)
class ExperimentConfig:
    """Monte Carlo setup.  The defaults are the desk-scale run; see
    :meth:`paper_scale` for the 10,000-profile version."""

    num_profiles: int = 2000
    n_range: tuple[int, int] = (4, 14)
    m_range: tuple[int, int] = (2, 12)
    seed: int = 0
    rules: tuple[str, ...] = SEQUENTIAL_RULES
    axioms: tuple[AxiomId, ...] = TABLE_AXIOMS
    oracle_bound: int = 14
    sampler: str = "uniform"
    alpha: int = 1
    stv_mode: str = "literal"
    workers: int = 1

    @classmethod
    def paper_scale(cls, **overrides) -> "ExperimentConfig":
        values = dict(num_profiles=10_000, n_range=(4, 20), m_range=(2, 15), oracle_bound=20)
        values.update(overrides)
        return cls(**values)

    def validate(self) -> None:
        if self.num_profiles < 1:
            raise ConfigError(f"num_profiles must be >= 1, got {self.num_profiles}")
        n_lo, n_hi = self.n_range
        m_lo, m_hi = self.m_range
        if not 1 <= n_lo <= n_hi:
            raise ConfigError(f"bad voter range {self.n_range}")
        if not 2 <= m_lo <= m_hi:
            raise ConfigError(f"bad candidate range {self.m_range}; need 2 <= lo <= hi so k in [1, m-1] is nonempty")
        if self.oracle_bound < n_lo:
            raise ConfigError(f"oracle bound {self.oracle_bound} is below the smallest n={n_lo}")
        if not self.rules or not self.axioms:
            raise ConfigError("need at least one rule and one axiom")
        for rule in self.rules:
            if rule not in RULES:
                raise ConfigError(f"unknown rule {rule!r}")
        for axiom in self.axioms:
            if not isinstance(axiom, AxiomId):
                raise ConfigError(f"axioms must be AxiomId values, got {axiom!r}")
        if self.sampler not in SAMPLERS:
            raise ConfigError(f"unknown sampler {self.sampler!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        RuleConfig(alpha=self.alpha, stv_mode=self.stv_mode)
        if self.alpha > 1 and m_lo - 1 < self.alpha:
            raise ConfigError(f"alpha={self.alpha} exceeds the smallest possible k={m_lo - 1}")


def profile_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for profile ``index``; no dependence on execution order."""
    return np.random.default_rng([seed, index])


def _draw(config: ExperimentConfig, rng: np.random.Generator) -> tuple[ElectionInstance, int]:
    n_lo, n_hi = config.n_range
    resampled = 0
    n = int(rng.integers(n_lo, n_hi + 1))
    while n > config.oracle_bound:
        resampled += 1
        n = int(rng.integers(n_lo, n_hi + 1))
    m = int(rng.integers(config.m_range[0], config.m_range[1] + 1))
    k = int(rng.integers(1, m))
    ballots = [sample_ballot(m, rng, config.sampler) for _ in range(n)]
    return validate_instance(ballots, m, k), resampled


def sample_instance(config: ExperimentConfig, rng: np.random.Generator) -> ElectionInstance:
    """n, m uniform over their ranges, k uniform over [1, m-1], then n ballots."""
    return _draw(config, rng)[0]


def _evaluate_profile(args: tuple[ExperimentConfig, int]) -> tuple[dict[tuple[str, str], bool], int]:
    config, index = args
    rng = profile_rng(config.seed, index)
    instance, resampled = _draw(config, rng)
    rule_seed = int(rng.integers(0, 2**63))
    rule_config = RuleConfig(alpha=config.alpha, seed=rule_seed, stv_mode=config.stv_mode)
    verdicts = {}
    for rule in config.rules:
        committee = run_rule(rule, instance, rule_config).committee
        for axiom in config.axioms:
            verdicts[rule, axiom.value] = check(instance, committee, axiom, bound=config.oracle_bound).satisfied
    return verdicts, resampled


@dataclass
class SatisfactionTable:
    config: ExperimentConfig
    satisfied: dict[tuple[str, str], int]
    total: dict[tuple[str, str], int]
    resampled: int = 0
    cells: list[tuple[str, str]] = field(default_factory=list)

    def probability(self, rule: str, axiom) -> float:
        key = (rule, AxiomId.parse(axiom).value)
        return self.satisfied[key] / self.total[key]

    def _prob_text(self, key: tuple[str, str]) -> str:
        exact = Decimal(self.satisfied[key]) / Decimal(self.total[key])
        return str(exact.quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["rule", "axiom", "satisfied", "total", "probability"])
        for key in self.cells:
            writer.writerow([key[0], key[1], self.satisfied[key], self.total[key], self._prob_text(key)])
        return buf.getvalue()

    def to_json(self) -> str:
        cfg = asdict(self.config)
        cfg["axioms"] = [a.value for a in self.config.axioms]
        doc = {
            "config": cfg,
            "seed": self.config.seed,
            "resampled": self.resampled,
            "cells": [
                {"rule": r, "axiom": a, "satisfied": self.satisfied[r, a], "total": self.total[r, a],
                 "probability": self._prob_text((r, a))}
                for r, a in self.cells
            ],
        }
        return json.dumps(doc, indent=2) + "\n"

    def render(self) -> str:
        """Rules as rows, axioms as columns."""
        axioms = [a.value for a in self.config.axioms]
        width = max(len(r) for r in self.config.rules)
        lines = [" " * width + "".join(f"{a.upper():>9}" for a in axioms)]
        for rule in self.config.rules:
            row = "".join(f"{self._prob_text((rule, a)):>9}" for a in axioms)
            lines.append(f"{rule:<{width}}{row}")
        lines.append(f"({self.config.num_profiles} profiles, seed {self.config.seed}, "
                     f"{self.resampled} n-draws resampled)")
        return "\n".join(lines)


def run_experiment(config: ExperimentConfig, progress: Optional[callable] = None) -> SatisfactionTable:
    """Tally how often each rule's committee satisfies each axiom."""
    config.validate()
    cells = [(rule, axiom.value) for rule in config.rules for axiom in config.axioms]
    satisfied = dict.fromkeys(cells, 0)
    resampled = 0
    jobs = [(config, i) for i in range(config.num_profiles)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = pool.map(_evaluate_profile, jobs, chunksize=16)
            for done, (verdicts, extra) in enumerate(results, 1):
                resampled += extra
                for key, ok in verdicts.items():
                    satisfied[key] += ok
                if progress:
                    progress(done)
    else:
        for done, job in enumerate(jobs, 1):
            verdicts, extra = _evaluate_profile(job)
            resampled += extra
            for key, ok in verdicts.items():
                satisfied[key] += ok
            if progress:
                progress(done)
    total = dict.fromkeys(cells, config.num_profiles)
    return SatisfactionTable(config, satisfied, total, resampled, cells)
