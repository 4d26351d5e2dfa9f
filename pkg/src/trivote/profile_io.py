"""Line-based JSON profile documents.

The first JSON line is a header, every following line one ballot::

    {"version": "1", "candidates": ["a", "b", "c"], "k": 2}
    {"approve": ["a"], "disapprove": ["c"]}
    {"approve": ["b", "c"], "disapprove": [], "indifferent": ["a"]}

Blank lines and lines starting with ``#`` are ignored.  ``indifferent`` is
optional; when given it must equal the candidates not otherwise listed.
"""

from __future__ import annotations

import json

from trivote.errors import ConsistencyError, ParseError, RangeError
from trivote.model import ElectionInstance, TrichotomousBallot, validate_instance

__all__ = ["FORMAT_VERSION", "parse_profile", "serialize_profile", "load_profile"]

FORMAT_VERSION = "1"


def _names(record: dict, key: str, lineno: int) -> list[str]:
    value = record.get(key, [])
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise ParseError(f"line {lineno}: {key!r} must be a list of candidate names")
    return value


def parse_profile(text: str) -> ElectionInstance:
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            record = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(record, dict):
            raise ParseError(f"line {lineno}: expected a JSON object")
        records.append((lineno, record))
    if not records:
        raise ParseError("empty profile document")

    lineno, header = records[0]
    if str(header.get("version")) != FORMAT_VERSION:
        raise ParseError(f"line {lineno}: unsupported or missing version {header.get('version')!r}")
    candidates = header.get("candidates")
    if not isinstance(candidates, list) or not all(isinstance(c, str) for c in candidates):
        raise ParseError(f"line {lineno}: 'candidates' must be a list of names")
    k = header.get("k")
    if not isinstance(k, int) or isinstance(k, bool):
        raise ParseError(f"line {lineno}: 'k' must be an integer")
    index = {name: c for c, name in enumerate(candidates)}
    if len(index) != len(candidates):
        raise RangeError("duplicate candidate names in header")
    m = len(candidates)
    if m < 1:
        raise RangeError("need at least one candidate")

    def lookup(names: list[str], lineno: int) -> list[int]:
        try:
            return [index[name] for name in names]
        except KeyError as exc:
            raise RangeError(f"line {lineno}: unknown candidate {exc.args[0]!r}") from None

    ballots = []
    for lineno, record in records[1:]:
        unknown = set(record) - {"approve", "disapprove", "indifferent"}
        if unknown:
            raise ParseError(f"line {lineno}: unexpected fields {sorted(unknown)}")
        approve = lookup(_names(record, "approve", lineno), lineno)
        disapprove = lookup(_names(record, "disapprove", lineno), lineno)
        ballot = TrichotomousBallot.of(approve, disapprove, m)
        if "indifferent" in record:
            stated = set(lookup(_names(record, "indifferent", lineno), lineno))
            if stated != set(ballot.indifferent):
                raise ConsistencyError(f"line {lineno}: 'indifferent' is not the complement of approve/disapprove")
        ballots.append(ballot)
    return validate_instance(ballots, m, k, candidates)


def serialize_profile(instance: ElectionInstance) -> str:
    names = instance.names
    lines = [json.dumps({"version": FORMAT_VERSION, "candidates": list(names), "k": instance.k})]
    for ballot in instance.ballots:
        lines.append(json.dumps({
            "approve": [names[c] for c in ballot.approve],
            "disapprove": [names[c] for c in ballot.disapprove],
        }))
    return "\n".join(lines) + "\n"


def load_profile(path) -> ElectionInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_profile(fh.read())
