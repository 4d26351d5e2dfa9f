"""Committee selection rules for trichotomous ballots.

All scores are exact (ints or ``Fraction``).  Every "random" or "arbitrary"
step goes through :class:`RuleConfig` (a seed or the lowest-index policy), so
rerunning a rule with the same config reproduces committee and trace.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Optional, Sequence

from trivote.errors import BudgetError, ConfigError, RangeError
from trivote.model import CandidateSet, ElectionInstance, TrichotomousBallot

__all__ = [
    "RuleConfig",
    "RuleOutcome",
    "RULES",
    "SEQUENTIAL_RULES",
    "run_rule",
    "harmonic",
    "sat_tcc",
    "tpav_net",
    "droop_quota",
    "exact_tcc",
    "exact_tpav",
    "seq_tcc",
    "seq_tpav",
    "seq_monroe",
    "droop_stv",
    "greedy_ncr",
    "seq_phragmen",
]

STV_MODES = ("literal", "transfer")
TIE_POLICIES = ("lowest-index", "seeded-random")


@dataclass(frozen=True)
class RuleConfig:
    """Knobs shared by all rules.

    ``tie_policy=None`` means the rule's own default: seeded-random for
    Droop-STV, lowest-index everywhere else.  ``monroe_fill`` controls how
    sequential Monroe fills seats once every voter is assigned.
    """

    alpha: int = 1
    seed: int = 0
    stv_mode: str = "literal"
    tie_policy: Optional[str] = None
    stv_elect_on_equality: bool = True
    monroe_fill: str = "lowest-index"
    budget: int = 200_000

    def __post_init__(self) -> None:
        if self.alpha < 1:
            raise ConfigError(f"alpha must be >= 1, got {self.alpha}")
        if self.stv_mode not in STV_MODES:
            raise ConfigError(f"stv_mode must be one of {STV_MODES}, got {self.stv_mode!r}")
        if self.tie_policy is not None and self.tie_policy not in TIE_POLICIES:
            raise ConfigError(f"tie_policy must be one of {TIE_POLICIES}, got {self.tie_policy!r}")
        if self.monroe_fill not in TIE_POLICIES:
            raise ConfigError(f"monroe_fill must be one of {TIE_POLICIES}, got {self.monroe_fill!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")


@dataclass
class RuleOutcome:
    committee: CandidateSet
    score: Any
    trace: list[dict] = field(default_factory=list)
    # sequential Monroe only: elected candidate -> assigned voters
    assignment: Optional[dict[int, tuple[int, ...]]] = None


# --------------------------------------------------------------------------
# objectives


@lru_cache(maxsize=None)
def harmonic(p: int) -> Fraction:
    if p <= 0:
        return Fraction(0)
    return harmonic(p - 1) + Fraction(1, p)


def sat_tcc(ballot: TrichotomousBallot, W: CandidateSet, alpha: int = 1) -> int:
    """1 if the ballot sees at least ``alpha`` more approved than disapproved members."""
    return _sat_tcc(ballot.approve.bits, ballot.disapprove.bits, W.bits, alpha)


def tpav_net(ballot: TrichotomousBallot, W: CandidateSet) -> Fraction:
    """Harmonic satisfaction from approved members minus harmonic dissatisfaction."""
    return _tpav_net(ballot.approve.bits, ballot.disapprove.bits, W.bits)


def _sat_tcc(plus: int, minus: int, w: int, alpha: int) -> int:
    return int((plus & w).bit_count() - (minus & w).bit_count() >= alpha)


def _tpav_net(plus: int, minus: int, w: int) -> Fraction:
    return harmonic((plus & w).bit_count()) - harmonic((minus & w).bit_count())


def _tcc_total(instance: ElectionInstance, w: int, alpha: int) -> int:
    return sum(_sat_tcc(p, q, w, alpha) for p, q in zip(instance.plus, instance.minus))


def _tpav_total(instance: ElectionInstance, w: int) -> Fraction:
    return sum((_tpav_net(p, q, w) for p, q in zip(instance.plus, instance.minus)), Fraction(0))


def droop_quota(n: int, k: int) -> int:
    return n // (k + 1) + 1


# --------------------------------------------------------------------------
# helpers


def _pick(tied: Sequence[int], policy: str, rng: random.Random) -> int:
    tied = sorted(tied)
    if policy == "seeded-random" and len(tied) > 1:
        return rng.choice(tied)
    return tied[0]


def _fill(instance: ElectionInstance, w: int, policy: str, rng: random.Random, trace: list) -> int:
    spare = [c for c in range(instance.m) if not w >> c & 1]
    while w.bit_count() < instance.k:
        c = _pick(spare, policy, rng)
        spare.remove(c)
        w |= 1 << c
        trace.append({"step": "fill", "candidate": c})
    return w


def _check_alpha(instance: ElectionInstance, config: RuleConfig) -> None:
    if config.alpha > instance.k:
        raise ConfigError(f"alpha={config.alpha} exceeds committee size k={instance.k}")


# --------------------------------------------------------------------------
# exact rules


def _exact(instance: ElectionInstance, config: RuleConfig, objective: Callable[[int], Any]) -> RuleOutcome:
    total = math.comb(instance.m, instance.k)
    if total > config.budget:
        raise BudgetError(f"C({instance.m},{instance.k}) = {total} committees exceeds budget {config.budget}")
    best_w, best = 0, None
    # combinations() yields members in lexicographic order; keep the first optimum
    for members in itertools.combinations(range(instance.m), instance.k):
        w = sum(1 << c for c in members)
        value = objective(w)
        if best is None or value > best:
            best_w, best = w, value
    trace = [{"step": "optimum", "committee": sorted(CandidateSet(best_w, instance.m)), "score": best,
              "committees_scanned": total}]
    return RuleOutcome(CandidateSet(best_w, instance.m), best, trace)


def exact_tcc(instance: ElectionInstance, config: RuleConfig = RuleConfig()) -> RuleOutcome:
    _check_alpha(instance, config)
    return _exact(instance, config, lambda w: _tcc_total(instance, w, config.alpha))


def exact_tpav(instance: ElectionInstance, config: RuleConfig = RuleConfig()) -> RuleOutcome:
    return _exact(instance, config, lambda w: _tpav_total(instance, w))


# --------------------------------------------------------------------------
# sequential rules


def _sequential(instance: ElectionInstance, config: RuleConfig, objective: Callable[[int], Any]) -> RuleOutcome:
    policy = config.tie_policy or "lowest-index"
    rng = random.Random(config.seed)
    w, value, trace = 0, objective(0), []
    for round_no in range(instance.k):
        options = [(c, objective(w | 1 << c)) for c in range(instance.m) if not w >> c & 1]
        best = max(v for _, v in options)
        chosen = _pick([c for c, v in options if v == best], policy, rng)
        w |= 1 << chosen
        value = best
        trace.append({"step": "add", "round": round_no + 1, "candidate": chosen, "score": best,
                      "options": options})
    return RuleOutcome(CandidateSet(w, instance.m), value, trace)


def seq_tcc(instance: ElectionInstance, config: RuleConfig = RuleConfig()) -> RuleOutcome:
    _check_alpha(instance, config)
    return _sequential(instance, config, lambda w: _tcc_total(instance, w, config.alpha))


def seq_tpav(instance: ElectionInstance, config: RuleConfig = RuleConfig()) -> RuleOutcome:
    return _sequential(instance, config, lambda w: _tpav_total(instance, w))


def seq_monroe(instance: ElectionInstance, config: RuleConfig = RuleConfig()) -> RuleOutcome:
    """Greedy Monroe: each round seats the candidate whose best ``ceil(n/k)``
    unassigned voters have the highest summed position, then retires them."""
    n, m, k = instance.n, instance.m, instance.k
    policy = config.tie_policy or "lowest-index"
    rng = random.Random(config.seed)
    quota = -(-n // k)
    plus, minus = instance.plus, instance.minus

    def pos(i: int, c: int) -> int:
        return (plus[i] >> c & 1) - (minus[i] >> c & 1)

    pool = list(range(n))
    w, total, trace = 0, 0, []
    assignment: dict[int, tuple[int, ...]] = {}
    for round_no in range(k):
        if not pool:
            break
        options = []
        for c in range(m):
            if w >> c & 1:
                continue
            group = sorted(pool, key=lambda i: (-pos(i, c), i))[:quota]
            options.append((c, sum(pos(i, c) for i in group), tuple(sorted(group))))
        best = max(score for _, score, _ in options)
        chosen = _pick([c for c, score, _ in options if score == best], policy, rng)
        group = next(g for c, _, g in options if c == chosen)
        w |= 1 << chosen
        total += best
        assignment[chosen] = group
        pool = [i for i in pool if i not in group]
        trace.append({"step": "add", "round": round_no + 1, "candidate": chosen, "score": best,
                      "assigned": list(group)})
    w = _fill(instance, w, config.monroe_fill, rng, trace)
    return RuleOutcome(CandidateSet(w, m), total, trace, assignment)


def droop_stv(instance: ElectionInstance, config: RuleConfig = RuleConfig()) -> RuleOutcome:
    """Droop-quota STV over the weak orders approve > indifferent > disapprove.

    A voter splits her current weight evenly over the candidates of her best
    nonempty tier among those still in the race.  The plurality leader is
    elected once her score reaches the quota; otherwise the plurality loser
    is eliminated.  In ``transfer`` mode an elected candidate consumes exactly
    a quota of weight from her supporters, pro rata; in ``literal`` mode
    voters keep their weight.
    """
    n, m, k = instance.n, instance.m, instance.k
    policy = config.tie_policy or "seeded-random"
    rng = random.Random(config.seed)
    q = droop_quota(n, k)
    weights = [Fraction(1)] * n
    remaining = (1 << m) - 1
    w, elected_score, trace = 0, Fraction(0), []

    def top_tier(i: int) -> int:
        for tier in (instance.plus[i], instance.zero[i], instance.minus[i]):
            if tier & remaining:
                return tier & remaining
        return 0

    while w.bit_count() < k:
        if not remaining:
            break
        seats = k - w.bit_count()
        if remaining.bit_count() <= seats:
            for c in CandidateSet(remaining, m):
                trace.append({"step": "elect-remaining", "candidate": c})
            w |= remaining
            remaining = 0
            break
        scores = {c: Fraction(0) for c in CandidateSet(remaining, m)}
        tops = [top_tier(i) for i in range(n)]
        for i, top in enumerate(tops):
            if top and weights[i]:
                share = weights[i] / top.bit_count()
                for c in CandidateSet(top, m):
                    scores[c] += share
        best = max(scores.values())
        leader = _pick([c for c, s in scores.items() if s == best], policy, rng)
        reaches = best >= q if config.stv_elect_on_equality else best > q
        if reaches:
            w |= 1 << leader
            elected_score += best
            if config.stv_mode == "transfer":
                for i, top in enumerate(tops):
                    if top >> leader & 1 and weights[i]:
                        weights[i] -= weights[i] / top.bit_count() * q / best
            trace.append({"step": "elect", "candidate": leader, "score": best, "quota": q,
                          "scores": sorted(scores.items())})
            remaining &= ~(1 << leader)
        else:
            worst = min(scores.values())
            loser = _pick([c for c, s in scores.items() if s == worst], policy, rng)
            trace.append({"step": "eliminate", "candidate": loser, "score": worst, "leader_score": best,
                          "quota": q, "scores": sorted(scores.items())})
            remaining &= ~(1 << loser)
    w = _fill(instance, w, "lowest-index", rng, trace)
    return RuleOutcome(CandidateSet(w, m), elected_score, trace)


def greedy_ncr(instance: ElectionInstance, config: RuleConfig = RuleConfig()) -> RuleOutcome:
    """Constructive NCR procedure: serve the largest group jointly approving
    ``l'`` unseated candidates while it meets the ``l'`` quota, lowering
    ``l'`` from k to 1, then fill arbitrarily (lowest index)."""
    n, m, k = instance.n, instance.m, instance.k
    plus = instance.plus
    unserved = list(range(n))
    w, level, trace = 0, k, []
    while level > 0:
        if w.bit_count() + level > k:
            level -= 1
            continue
        approved = 0
        for i in unserved:
            approved |= plus[i]
        pool = [c for c in range(m) if not w >> c & 1 and approved >> c & 1]
        best_set, best_group = None, ()
        for subset in itertools.combinations(pool, level):
            mask = sum(1 << c for c in subset)
            group = tuple(i for i in unserved if plus[i] & mask == mask)
            if best_set is None or len(group) > len(best_group):
                best_set, best_group = mask, group
        if best_set is None or len(best_group) * k < level * n:
            trace.append({"step": "lower", "level": level,
                          "best_support": len(best_group)})
            level -= 1
            continue
        w |= best_set
        unserved = [i for i in unserved if i not in best_group]
        trace.append({"step": "serve", "level": level, "candidates": sorted(CandidateSet(best_set, m)),
                      "voters": list(best_group)})
    served = n - len(unserved)
    w = _fill(instance, w, "lowest-index", random.Random(0), trace)
    return RuleOutcome(CandidateSet(w, m), served, trace)


def seq_phragmen(instance: ElectionInstance, config: RuleConfig = RuleConfig()) -> RuleOutcome:
    """Sequential Phragmén on the approval sets, with exact loads."""
    n, m, k = instance.n, instance.m, instance.k
    plus = instance.plus
    loads = [Fraction(0)] * n
    w, trace = 0, []
    while w.bit_count() < k:
        best_c, best_load = None, None
        for c in range(m):
            if w >> c & 1:
                continue
            supporters = [i for i in range(n) if plus[i] >> c & 1]
            if not supporters:
                continue
            new_load = (1 + sum(loads[i] for i in supporters)) / len(supporters)
            if best_load is None or new_load < best_load:
                best_c, best_load = c, new_load
        if best_c is None:
            break
        w |= 1 << best_c
        for i in range(n):
            if plus[i] >> best_c & 1:
                loads[i] = best_load
        trace.append({"step": "add", "candidate": best_c, "load": best_load})
    w = _fill(instance, w, "lowest-index", random.Random(0), trace)
    return RuleOutcome(CandidateSet(w, m), max(loads), trace)


RULES: dict[str, Callable[[ElectionInstance, RuleConfig], RuleOutcome]] = {
    "exact-tcc": exact_tcc,
    "exact-tpav": exact_tpav,
    "seq-tcc": seq_tcc,
    "seq-tpav": seq_tpav,
    "seq-monroe": seq_monroe,
    "droop-stv": droop_stv,
    "greedy-ncr": greedy_ncr,
    "seq-phragmen": seq_phragmen,
}

# the four rules evaluated in the satisfaction experiment, in table order
SEQUENTIAL_RULES = ("seq-monroe", "seq-tcc", "droop-stv", "seq-tpav")


def run_rule(name: str, instance: ElectionInstance, config: RuleConfig = RuleConfig()) -> RuleOutcome:
    try:
        rule = RULES[name]
    except KeyError:
        raise RangeError(f"unknown rule {name!r}; choose from {sorted(RULES)}") from None
    return rule(instance, config)
