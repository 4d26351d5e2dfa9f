"""Exact checkers for the proportionality axioms.

Every axiom has the shape "no group V' with |V'| >= l*n/k whose antecedent set
has at least l candidates may see fewer than l of its consequent set seated".
For a fixed group the violated levels form the range
``consequent < l <= min(antecedent, floor(|V'| k / n), k)``, so one comparison
per group decides the verdict.

The group-based checkers evaluate that comparison for all ``2**n`` voter
subsets at once on a numpy lattice of unions and intersections.  NCR is
checked from the candidate side instead: for each candidate set C' the
largest group jointly approving C' is the only one worth testing.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Union

import numpy as np

from trivote.errors import BudgetError, RangeError, SizeError
from trivote.model import (
    CandidateSet,
    DichotomousProfile,
    ElectionInstance,
    meets_quota,
    project_approvals,
)

__all__ = [
    "AxiomId",
    "GroupWitness",
    "AxiomReport",
    "CLASS_I",
    "CLASS_II",
    "DEFAULT_ORACLE_BOUND",
    "check",
    "check_jr",
    "check_pjr",
    "check_spr",
    "check_wtjr",
    "check_wtpjr",
    "check_war",
    "check_wa",
    "check_ncr",
    "check_wncr",
    "exists_committee",
    "verify_witness",
    "group_sets",
]

DEFAULT_ORACLE_BOUND = 20
DEFAULT_COMMITTEE_BUDGET = 200_000
# masks live in int64 lattices
_MAX_M = 62


class AxiomId(str, enum.Enum):
    JR = "jr"
    PJR = "pjr"
    SPR = "spr"
    WTJR = "wtjr"
    WTPJR = "wtpjr"
    WAR = "war"
    WA = "wa"
    NCR = "ncr"
    WNCR = "wncr"

    @classmethod
    def parse(cls, name: Union[str, "AxiomId"]) -> "AxiomId":
        if isinstance(name, AxiomId):
            return name
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise RangeError(f"unknown axiom {name!r}; choose from {[a.value for a in cls]}") from None

    @property
    def dichotomous(self) -> bool:
        return self in (AxiomId.JR, AxiomId.PJR)


CLASS_I = (AxiomId.SPR, AxiomId.WTJR, AxiomId.WTPJR, AxiomId.WAR, AxiomId.WA)
CLASS_II = (AxiomId.NCR, AxiomId.WNCR)


@dataclass(frozen=True)
class GroupWitness:
    """A voter group certifying a violation.

    ``cohesion_set`` is the antecedent set (``U+ minus U-`` for Class I and
    SPR, the approval intersection for NCR/WNCR/PJR, the approval union for
    JR).  ``representation_found`` counts the seated members of the
    consequent set; SPR's consequent is all-or-nothing, so it is 0 there and
    ``seated_disapproved`` names any unanimously disapproved seated candidate.
    """

    voters: tuple[int, ...]
    level: int
    cohesion_set: CandidateSet
    representation_found: int
    seated_disapproved: Optional[CandidateSet] = None


@dataclass(frozen=True)
class AxiomReport:
    axiom: AxiomId
    satisfied: bool
    witness: Optional[GroupWitness] = None

    def __bool__(self) -> bool:
        return self.satisfied


def _members(bits: int) -> tuple[int, ...]:
    return tuple(i for i in range(bits.bit_length()) if bits >> i & 1)


def _require_committee(W: CandidateSet, m: int, k: int) -> None:
    if W.m != m:
        raise SizeError(f"committee is over m={W.m}, instance has m={m}")
    if len(W) != k:
        raise SizeError(f"committee has {len(W)} members, expected k={k}")


def group_sets(
    plus: Iterable[int], minus: Iterable[int], zero: Iterable[int], voters: Iterable[int], m: int
) -> dict[str, int]:
    """Unions and intersections of a group's ballots as raw bitmasks."""
    full = (1 << m) - 1
    sets = dict(u_plus=0, u_minus=0, u_zero=0, i_plus=full, i_minus=full, i_zero=full)
    plus, minus, zero = tuple(plus), tuple(minus), tuple(zero)
    for i in voters:
        sets["u_plus"] |= plus[i]
        sets["u_minus"] |= minus[i]
        sets["u_zero"] |= zero[i]
        sets["i_plus"] &= plus[i]
        sets["i_minus"] &= minus[i]
        sets["i_zero"] &= zero[i]
    return sets


# --------------------------------------------------------------------------
# numpy subset lattice


def _or_lattice(masks: tuple[int, ...]) -> np.ndarray:
    arr = np.zeros(1, dtype=np.int64)
    for mask in masks:
        arr = np.concatenate([arr, arr | np.int64(mask)])
    return arr


def _and_lattice(masks: tuple[int, ...], full: int) -> np.ndarray:
    arr = np.full(1, full, dtype=np.int64)
    for mask in masks:
        arr = np.concatenate([arr, arr & np.int64(mask)])
    return arr


class _Lattice:
    """Per-subset unions/intersections; index ``s`` has voter ``i`` iff bit i."""

    def __init__(self, plus, minus, zero, m: int) -> None:
        self.plus, self.minus, self.zero, self.m = plus, minus, zero, m
        self.n = len(plus)
        self._cache: dict[str, np.ndarray] = {}

    def get(self, name: str) -> np.ndarray:
        arr = self._cache.get(name)
        if arr is None:
            full = (1 << self.m) - 1
            if name == "size":
                arr = np.bitwise_count(np.arange(1 << self.n, dtype=np.int64)).astype(np.int64)
            elif name == "u_plus":
                arr = _or_lattice(self.plus)
            elif name == "u_minus":
                arr = _or_lattice(self.minus)
            elif name == "u_zero":
                arr = _or_lattice(self.zero)
            elif name == "i_plus":
                arr = _and_lattice(self.plus, full)
            elif name == "i_minus":
                arr = _and_lattice(self.minus, full)
            elif name == "i_zero":
                arr = _and_lattice(self.zero, full)
            else:
                raise KeyError(name)
            self._cache[name] = arr
        return arr

    def max_level(self, k: int) -> np.ndarray:
        key = f"lmax{k}"
        arr = self._cache.get(key)
        if arr is None:
            arr = np.minimum(k, self.get("size") * k // self.n)
            self._cache[key] = arr
        return arr


@lru_cache(maxsize=4)
def _lattice(plus: tuple[int, ...], minus: tuple[int, ...], zero: tuple[int, ...], m: int) -> _Lattice:
    return _Lattice(plus, minus, zero, m)


def _pop(arr: np.ndarray) -> np.ndarray:
    return np.bitwise_count(arr).astype(np.int64)


def _lattice_check(
    axiom: AxiomId,
    plus: tuple[int, ...],
    minus: tuple[int, ...],
    zero: tuple[int, ...],
    m: int,
    k: int,
    W: CandidateSet,
    bound: int,
) -> AxiomReport:
    n = len(plus)
    if n > bound:
        raise BudgetError(f"n={n} voters exceeds the exhaustive-check bound {bound}")
    if m > _MAX_M:
        raise BudgetError(f"m={m} exceeds the lattice mask width")
    lat = _lattice(plus, minus, zero, m)
    w = np.int64(W.bits)
    lmax = lat.max_level(k)

    if axiom is AxiomId.JR:
        up = lat.get("u_plus")
        violated = (lmax >= 1) & (up != 0) & ((up & w) == 0)
        cohesion, cons = up, np.zeros_like(up)
    elif axiom is AxiomId.SPR:
        up = lat.get("u_plus")
        cohesion = up & ~lat.get("u_minus")
        seated_dis = lat.get("i_minus") & w
        violated = (lmax >= 1) & (cohesion != 0) & (((up & w) == 0) | (seated_dis != 0))
        cons = np.zeros_like(up)
    elif axiom in (AxiomId.PJR, AxiomId.NCR, AxiomId.WNCR):
        cohesion = lat.get("i_plus")
        target = cohesion if axiom is AxiomId.NCR else lat.get("u_plus")
        cons = _pop(target & w)
        violated = cons < np.minimum(_pop(cohesion), lmax)
    else:
        up = lat.get("u_plus")
        cohesion = up & ~lat.get("u_minus")
        if axiom in (AxiomId.WTJR, AxiomId.WTPJR):
            target = up
        elif axiom is AxiomId.WAR:
            target = up | lat.get("i_zero")
        elif axiom is AxiomId.WA:
            target = up | lat.get("u_zero")
        else:  # pragma: no cover
            raise RangeError(f"unhandled axiom {axiom}")
        cons = _pop(target & w)
        limit = np.minimum(_pop(cohesion), lmax)
        if axiom is AxiomId.WTJR:
            limit = np.minimum(limit, 1)
        violated = cons < limit

    hits = np.flatnonzero(violated)
    if hits.size == 0:
        return AxiomReport(axiom, True)
    s = int(hits[0])
    found = int(cons[s])
    witness = GroupWitness(
        voters=_members(s),
        level=found + 1,
        cohesion_set=CandidateSet(int(cohesion[s]), m),
        representation_found=found,
        seated_disapproved=CandidateSet(int(seated_dis[s]), m) if axiom is AxiomId.SPR else None,
    )
    return AxiomReport(axiom, False, witness)


# --------------------------------------------------------------------------
# public checkers


def check_jr(dic: DichotomousProfile, k: int, W: CandidateSet, *, bound: int = DEFAULT_ORACLE_BOUND) -> AxiomReport:
    """Justified representation on approval ballots.

    A group only counts when its approval union is nonempty: voters who
    approve nobody cannot be "unrepresented".
    """
    _require_committee(W, dic.m, k)
    plus = tuple(a.bits for a in dic.approval_sets)
    return _lattice_check(AxiomId.JR, plus, (0,) * len(plus), (0,) * len(plus), dic.m, k, W, bound)


def check_pjr(dic: DichotomousProfile, k: int, W: CandidateSet, *, bound: int = DEFAULT_ORACLE_BOUND) -> AxiomReport:
    _require_committee(W, dic.m, k)
    plus = tuple(a.bits for a in dic.approval_sets)
    return _lattice_check(AxiomId.PJR, plus, (0,) * len(plus), (0,) * len(plus), dic.m, k, W, bound)


def _instance_check(axiom: AxiomId, instance: ElectionInstance, W: CandidateSet, bound: int) -> AxiomReport:
    _require_committee(W, instance.m, instance.k)
    return _lattice_check(axiom, instance.plus, instance.minus, instance.zero, instance.m, instance.k, W, bound)


def check_spr(instance: ElectionInstance, W: CandidateSet, *, bound: int = DEFAULT_ORACLE_BOUND) -> AxiomReport:
    """Strong preliminary representation, evaluated at level 1."""
    return _instance_check(AxiomId.SPR, instance, W, bound)


def check_wtjr(instance: ElectionInstance, W: CandidateSet, *, bound: int = DEFAULT_ORACLE_BOUND) -> AxiomReport:
    return _instance_check(AxiomId.WTJR, instance, W, bound)


def check_wtpjr(instance: ElectionInstance, W: CandidateSet, *, bound: int = DEFAULT_ORACLE_BOUND) -> AxiomReport:
    return _instance_check(AxiomId.WTPJR, instance, W, bound)


def check_war(instance: ElectionInstance, W: CandidateSet, *, bound: int = DEFAULT_ORACLE_BOUND) -> AxiomReport:
    return _instance_check(AxiomId.WAR, instance, W, bound)


def check_wa(instance: ElectionInstance, W: CandidateSet, *, bound: int = DEFAULT_ORACLE_BOUND) -> AxiomReport:
    return _instance_check(AxiomId.WA, instance, W, bound)


def check_wncr(instance: ElectionInstance, W: CandidateSet, *, bound: int = DEFAULT_ORACLE_BOUND) -> AxiomReport:
    return _instance_check(AxiomId.WNCR, instance, W, bound)


@lru_cache(maxsize=64)
def _candidate_subsets(m: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Nonempty candidate subsets of size <= k ordered by (size, encoding)."""
    sets = np.arange(1, 1 << m, dtype=np.int64)
    sizes = _pop(sets)
    keep = sizes <= k
    sets, sizes = sets[keep], sizes[keep]
    order = np.argsort(sizes, kind="stable")
    return sets[order], sizes[order]


def check_ncr(
    instance: ElectionInstance,
    W: CandidateSet,
    *,
    candidate_bound: int = 20,
) -> AxiomReport:
    """New cohesiveness representation via candidate-side enumeration.

    For C' of size l, the voters approving all of C' form the largest group
    whose common approvals contain C'; any smaller such group has a larger
    common approval set, so it can only be easier to satisfy.
    """
    m, k, n = instance.m, instance.k, instance.n
    _require_committee(W, m, k)
    if m > candidate_bound:
        raise BudgetError(f"m={m} exceeds the candidate-subset bound {candidate_bound}")
    sets, sizes = _candidate_subsets(m, k)
    plus = np.array(instance.plus, dtype=np.int64)
    full = np.int64((1 << m) - 1)
    supports = (sets[:, None] & plus[None, :]) == sets[:, None]
    count = supports.sum(axis=1)
    common = np.bitwise_and.reduce(np.where(supports, plus[None, :], full), axis=1)
    seated = _pop(common & np.int64(W.bits))
    violated = (count * k >= sizes * n) & (seated < sizes)
    hits = np.flatnonzero(violated)
    if hits.size == 0:
        return AxiomReport(AxiomId.NCR, True)
    j = int(hits[0])
    witness = GroupWitness(
        voters=tuple(int(i) for i in np.flatnonzero(supports[j])),
        level=int(sizes[j]),
        cohesion_set=CandidateSet(int(common[j]), m),
        representation_found=int(seated[j]),
    )
    return AxiomReport(AxiomId.NCR, False, witness)


_INSTANCE_CHECKERS = {
    AxiomId.SPR: check_spr,
    AxiomId.WTJR: check_wtjr,
    AxiomId.WTPJR: check_wtpjr,
    AxiomId.WAR: check_war,
    AxiomId.WA: check_wa,
    AxiomId.WNCR: check_wncr,
}


def check(
    instance: ElectionInstance,
    W: CandidateSet,
    axiom: Union[str, AxiomId],
    *,
    bound: int = DEFAULT_ORACLE_BOUND,
) -> AxiomReport:
    """Dispatch to the specialised checker; JR and PJR see the approval projection."""
    axiom = AxiomId.parse(axiom)
    if axiom is AxiomId.JR:
        return check_jr(project_approvals(instance), instance.k, W, bound=bound)
    if axiom is AxiomId.PJR:
        return check_pjr(project_approvals(instance), instance.k, W, bound=bound)
    if axiom is AxiomId.NCR:
        return check_ncr(instance, W)
    return _INSTANCE_CHECKERS[axiom](instance, W, bound=bound)


def exists_committee(
    instance: ElectionInstance,
    axiom: Union[str, AxiomId],
    *,
    budget: int = DEFAULT_COMMITTEE_BUDGET,
    bound: int = DEFAULT_ORACLE_BOUND,
) -> Optional[CandidateSet]:
    """First committee in lexicographic order satisfying ``axiom``, or None."""
    axiom = AxiomId.parse(axiom)
    total = math.comb(instance.m, instance.k)
    if total > budget:
        raise BudgetError(f"C({instance.m},{instance.k}) = {total} committees exceeds budget {budget}")
    for members in itertools.combinations(range(instance.m), instance.k):
        W = instance.committee(members)
        if check(instance, W, axiom, bound=bound).satisfied:
            return W
    return None


def verify_witness(instance: ElectionInstance, W: CandidateSet, report: AxiomReport) -> bool:
    """Re-derive a violation from its witness alone."""
    if report.satisfied:
        return report.witness is None
    wit = report.witness
    if wit is None or not wit.voters:
        return False
    n, k, m = instance.n, instance.k, instance.m
    axiom = report.axiom
    if not 1 <= wit.level <= k or not meets_quota(len(wit.voters), wit.level, n, k):
        return False
    zeros = (0,) * n
    if axiom.dichotomous:
        g = group_sets(instance.plus, zeros, zeros, wit.voters, m)
    else:
        g = group_sets(instance.plus, instance.minus, instance.zero, wit.voters, m)
    w = W.bits
    level = wit.level
    if axiom is AxiomId.JR:
        return level == 1 and g["u_plus"] != 0 and g["u_plus"] & w == 0
    if axiom is AxiomId.SPR:
        cohesion = g["u_plus"] & ~g["u_minus"]
        failed = (g["u_plus"] & w) == 0 or (g["i_minus"] & w) != 0
        return level == 1 and cohesion != 0 and failed
    if axiom in (AxiomId.PJR, AxiomId.NCR, AxiomId.WNCR):
        antecedent = g["i_plus"]
        target = antecedent if axiom is AxiomId.NCR else g["u_plus"]
    else:
        antecedent = g["u_plus"] & ~g["u_minus"]
        target = {
            AxiomId.WTJR: g["u_plus"],
            AxiomId.WTPJR: g["u_plus"],
            AxiomId.WAR: g["u_plus"] | g["i_zero"],
            AxiomId.WA: g["u_plus"] | g["u_zero"],
        }[axiom]
        if axiom is AxiomId.WTJR and level != 1:
            return False
    return antecedent.bit_count() >= level and (target & w).bit_count() < level
