"""Reference oracle: every axiom evaluated literally over every voter group.

Deliberately naive and independent of the numpy lattice in
:mod:`trivote.axioms`.  Groups are visited in ascending binary encoding
(voter ``i`` is bit ``i``); each group's unions and intersections are
extended from the group without its lowest voter.
"""

from __future__ import annotations

from typing import Union

from trivote.axioms import DEFAULT_ORACLE_BOUND, AxiomId, AxiomReport, GroupWitness
from trivote.errors import BudgetError, SizeError
from trivote.model import CandidateSet, ElectionInstance, meets_quota

__all__ = ["brute_force_check"]


def _count(bits: int) -> int:
    return bin(bits).count("1")


def _evaluate(axiom, l, group, plus, W, u_plus, u_minus, u_zero, i_plus, i_minus, i_zero):
    """Return (antecedent holds, consequent holds, cohesion set, representation)."""
    if axiom is AxiomId.JR:
        # a group approving nobody has no claim
        return u_plus != 0, (u_plus & W) != 0, u_plus, _count(u_plus & W)
    if axiom is AxiomId.PJR:
        return _count(i_plus) >= l, _count(u_plus & W) >= l, i_plus, _count(u_plus & W)
    if axiom is AxiomId.SPR:
        liked = u_plus & ~u_minus
        someone_served = any(_count(W & plus[i]) >= 1 for i in group)
        nothing_hated = _count(W & i_minus) == 0
        ok = someone_served and nothing_hated
        return _count(liked) >= 1, ok, liked, 1 if ok else 0
    if axiom in (AxiomId.WTJR, AxiomId.WTPJR, AxiomId.WAR, AxiomId.WA):
        liked = u_plus & ~u_minus
        if axiom is AxiomId.WAR:
            target = u_plus | i_zero
        elif axiom is AxiomId.WA:
            target = u_plus | u_zero
        else:
            target = u_plus
        got = _count(target & W)
        return _count(liked) >= l, got >= l, liked, got
    if axiom is AxiomId.NCR:
        got = _count(i_plus & W)
        return _count(i_plus) >= l, got >= l, i_plus, got
    if axiom is AxiomId.WNCR:
        got = _count(u_plus & W)
        return _count(i_plus) >= l, got >= l, i_plus, got
    raise ValueError(axiom)


_LEVEL_ONE = (AxiomId.JR, AxiomId.SPR, AxiomId.WTJR)


def brute_force_check(
    instance: ElectionInstance,
    W: CandidateSet,
    axiom: Union[str, AxiomId],
    *,
    bound: int = DEFAULT_ORACLE_BOUND,
) -> AxiomReport:
    """Check ``axiom`` for committee ``W`` by enumerating all voter groups.

    JR and PJR are evaluated on the approval sets only.  Returns the first
    violation in (group encoding, level) order.
    """
    axiom = AxiomId.parse(axiom)
    n, m, k = instance.n, instance.m, instance.k
    if n > bound:
        raise BudgetError(f"n={n} voters exceeds the oracle bound {bound}")
    if W.m != m or len(W) != k:
        raise SizeError(f"committee {sorted(W)} is not a size-{k} subset of {m} candidates")

    plus = list(instance.plus)
    if axiom.dichotomous:
        minus = [0] * n
        zero = [0] * n
    else:
        minus = list(instance.minus)
        zero = list(instance.zero)
    full = (1 << m) - 1
    w = W.bits
    top_level = 1 if axiom in _LEVEL_ONE else k

    total = 1 << n
    u_plus = [0] * total
    u_minus = [0] * total
    u_zero = [0] * total
    i_plus = [full] * total
    i_minus = [full] * total
    i_zero = [full] * total
    for s in range(1, total):
        low = s & -s
        i = low.bit_length() - 1
        rest = s ^ low
        u_plus[s] = u_plus[rest] | plus[i]
        u_minus[s] = u_minus[rest] | minus[i]
        u_zero[s] = u_zero[rest] | zero[i]
        i_plus[s] = i_plus[rest] & plus[i]
        i_minus[s] = i_minus[rest] & minus[i]
        i_zero[s] = i_zero[rest] & zero[i]

        group = [v for v in range(n) if s >> v & 1]
        for l in range(1, top_level + 1):
            if not meets_quota(len(group), l, n, k):
                break
            antecedent, consequent, cohesion, got = _evaluate(
                axiom, l, group, plus, w,
                u_plus[s], u_minus[s], u_zero[s], i_plus[s], i_minus[s], i_zero[s],
            )
            if antecedent and not consequent:
                seated = CandidateSet(i_minus[s] & w, m) if axiom is AxiomId.SPR else None
                witness = GroupWitness(
                    voters=tuple(group),
                    level=l,
                    cohesion_set=CandidateSet(cohesion, m),
                    representation_found=got,
                    seated_disapproved=seated,
                )
                return AxiomReport(axiom, False, witness)
    return AxiomReport(axiom, True)
