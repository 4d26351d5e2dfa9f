"""Exception types raised across the package."""


class TrivoteError(Exception):
    """Base class for every error raised by trivote."""


class OverlapError(TrivoteError, ValueError):
    """A ballot places a candidate in both its approval and disapproval set."""


class RangeError(TrivoteError, ValueError):
    """A size, index or committee size lies outside its allowed range."""


class SizeError(TrivoteError, ValueError):
    """A committee handed to a checker does not have exactly k members."""


class BudgetError(TrivoteError, RuntimeError):
    """An exhaustive enumeration would exceed its configured bound."""


class ConfigError(TrivoteError, ValueError):
    """An experiment configuration is empty or inconsistent."""


class ParseError(TrivoteError, ValueError):
    """A profile document is malformed."""


class ConsistencyError(TrivoteError, ValueError):
    """An explicit indifference set disagrees with the derived complement."""
