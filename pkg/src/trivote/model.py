"""Trichotomous ballots, election instances and the shared group-size test.

Candidates are identified by index ``0..m-1``; names only matter at the I/O
boundary.  Sets of candidates are bitmasks wrapped in :class:`CandidateSet`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

from trivote.errors import OverlapError, RangeError

__all__ = [
    "CandidateSet",
    "Committee",
    "TrichotomousBallot",
    "ElectionInstance",
    "DichotomousProfile",
    "validate_instance",
    "position",
    "positional_score",
    "project_approvals",
    "is_decisive",
    "meets_quota",
    "default_names",
]


class CandidateSet:
    """An immutable set of candidate indices below ``m``, stored as a bitmask."""

    __slots__ = ("bits", "m")

    def __init__(self, bits: int, m: int) -> None:
        if m < 0:
            raise RangeError(f"m must be non-negative, got {m}")
        if bits < 0 or bits >> m:
            raise RangeError(f"bitmask {bits:#x} has bits outside 0..{m - 1}")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "m", m)

    def __setattr__(self, name, value):
        raise AttributeError("CandidateSet is immutable")

    def __reduce__(self):
        return (CandidateSet, (self.bits, self.m))

    @classmethod
    def of(cls, indices: Iterable[int], m: int) -> "CandidateSet":
        bits = 0
        for c in indices:
            if not 0 <= c < m:
                raise RangeError(f"candidate index {c} outside 0..{m - 1}")
            bits |= 1 << c
        return cls(bits, m)

    @classmethod
    def empty(cls, m: int) -> "CandidateSet":
        return cls(0, m)

    @classmethod
    def full(cls, m: int) -> "CandidateSet":
        return cls((1 << m) - 1, m)

    def _coerce(self, other) -> int:
        if isinstance(other, CandidateSet):
            if other.m != self.m:
                raise RangeError(f"cannot combine sets over m={self.m} and m={other.m}")
            return other.bits
        return NotImplemented

    def __or__(self, other):
        bits = self._coerce(other)
        if bits is NotImplemented:
            return bits
        return CandidateSet(self.bits | bits, self.m)

    def __and__(self, other):
        bits = self._coerce(other)
        if bits is NotImplemented:
            return bits
        return CandidateSet(self.bits & bits, self.m)

    def __sub__(self, other):
        bits = self._coerce(other)
        if bits is NotImplemented:
            return bits
        return CandidateSet(self.bits & ~bits, self.m)

    def complement(self) -> "CandidateSet":
        return CandidateSet(((1 << self.m) - 1) & ~self.bits, self.m)

    def issubset(self, other: "CandidateSet") -> bool:
        return self.bits & ~self._coerce(other) == 0

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __contains__(self, c: object) -> bool:
        return isinstance(c, int) and 0 <= c < self.m and bool(self.bits >> c & 1)

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CandidateSet):
            return NotImplemented
        return self.bits == other.bits and self.m == other.m

    def __hash__(self) -> int:
        return hash((self.bits, self.m))

    def __repr__(self) -> str:
        return f"CandidateSet({sorted(self)}, m={self.m})"


# A committee is just a candidate set; checkers enforce its size against k.
Committee = CandidateSet

BallotLike = Union["TrichotomousBallot", Sequence]


@dataclass(frozen=True)
class TrichotomousBallot:
    """One voter's split of the candidates into approved, indifferent and
    disapproved.  The indifferent part is always derived."""

    approve: CandidateSet
    disapprove: CandidateSet

    def __post_init__(self) -> None:
        if self.approve.m != self.disapprove.m:
            raise RangeError("approve and disapprove sets use different m")
        overlap = self.approve & self.disapprove
        if overlap:
            raise OverlapError(f"candidates {sorted(overlap)} both approved and disapproved")

    @classmethod
    def of(cls, approve: Iterable[int], disapprove: Iterable[int], m: int) -> "TrichotomousBallot":
        return cls(CandidateSet.of(approve, m), CandidateSet.of(disapprove, m))

    @property
    def m(self) -> int:
        return self.approve.m

    @property
    def indifferent(self) -> CandidateSet:
        return (self.approve | self.disapprove).complement()


@dataclass(frozen=True)
class DichotomousProfile:
    m: int
    approval_sets: tuple[CandidateSet, ...]

    @property
    def n(self) -> int:
        return len(self.approval_sets)


def default_names(m: int) -> tuple[str, ...]:
    """``a, b, ..., z, c26, c27, ...``"""
    return tuple(chr(ord("a") + c) if c < 26 else f"c{c}" for c in range(m))


@dataclass(frozen=True)
class ElectionInstance:
    m: int
    ballots: tuple[TrichotomousBallot, ...]
    k: int
    candidate_names: tuple[str, ...] = field(default=(), compare=False)

    @property
    def n(self) -> int:
        return len(self.ballots)

    @property
    def names(self) -> tuple[str, ...]:
        return self.candidate_names or default_names(self.m)

    # raw bitmasks, used by the hot loops in axioms and rules
    @cached_property
    def plus(self) -> tuple[int, ...]:
        return tuple(b.approve.bits for b in self.ballots)

    @cached_property
    def minus(self) -> tuple[int, ...]:
        return tuple(b.disapprove.bits for b in self.ballots)

    @cached_property
    def zero(self) -> tuple[int, ...]:
        return tuple(b.indifferent.bits for b in self.ballots)

    def committee(self, members: Iterable[int]) -> CandidateSet:
        return CandidateSet.of(members, self.m)

    def committee_by_name(self, names: Iterable[str]) -> CandidateSet:
        lookup = {name: c for c, name in enumerate(self.names)}
        try:
            return CandidateSet.of((lookup[name] for name in names), self.m)
        except KeyError as exc:
            raise RangeError(f"unknown candidate name {exc.args[0]!r}") from None

    def format_set(self, s: CandidateSet) -> str:
        return "{" + ", ".join(self.names[c] for c in s) + "}"


def _as_ballot(raw, m: int) -> TrichotomousBallot:
    if isinstance(raw, TrichotomousBallot):
        if raw.m != m:
            raise RangeError(f"ballot over m={raw.m} in an instance with m={m}")
        return raw
    approve, disapprove = raw
    if isinstance(approve, CandidateSet) and isinstance(disapprove, CandidateSet):
        if approve.m != m or disapprove.m != m:
            raise RangeError(f"ballot sets do not use m={m}")
        return TrichotomousBallot(approve, disapprove)
    return TrichotomousBallot.of(approve, disapprove, m)


def validate_instance(
    ballots: Iterable[BallotLike],
    m: int,
    k: int,
    candidate_names: Sequence[str] | None = None,
) -> ElectionInstance:
    """Build a checked :class:`ElectionInstance`.

    Each raw ballot is either a :class:`TrichotomousBallot` or a pair
    ``(approved, disapproved)`` of index iterables / candidate sets.

    Raises :class:`OverlapError` when a ballot approves and disapproves the
    same candidate, :class:`RangeError` for bad ``m``/``k``, unknown indices
    or an empty electorate.
    """
    if m < 1:
        raise RangeError(f"need at least one candidate, got m={m}")
    if not 1 <= k <= m:
        raise RangeError(f"committee size k={k} outside 1..{m}")
    checked = tuple(_as_ballot(raw, m) for raw in ballots)
    if not checked:
        raise RangeError("need at least one voter")
    names: tuple[str, ...] = ()
    if candidate_names is not None:
        names = tuple(candidate_names)
        if len(names) != m:
            raise RangeError(f"{len(names)} candidate names for m={m}")
        if len(set(names)) != m:
            raise RangeError("candidate names must be distinct")
    return ElectionInstance(m=m, ballots=checked, k=k, candidate_names=names)


def position(ballot: TrichotomousBallot, c: int) -> int:
    """+1, 0 or -1 as ``c`` is approved, indifferent or disapproved."""
    if not 0 <= c < ballot.m:
        raise RangeError(f"candidate index {c} outside 0..{ballot.m - 1}")
    if c in ballot.approve:
        return 1
    if c in ballot.disapprove:
        return -1
    return 0


def positional_score(instance: ElectionInstance, c: int) -> int:
    return sum(position(b, c) for b in instance.ballots)


def project_approvals(instance: ElectionInstance) -> DichotomousProfile:
    """Keep only the approval sets (indifference and disapproval merge)."""
    return DichotomousProfile(instance.m, tuple(b.approve for b in instance.ballots))


def is_decisive(instance: ElectionInstance) -> bool:
    return not any(instance.zero)


def meets_quota(group_size: int, l: int, n: int, k: int) -> bool:
    """``group_size >= l * n / k`` in exact integer arithmetic."""
    return group_size * k >= l * n
