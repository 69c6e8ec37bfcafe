"""Exception types; the CLI maps them onto exit codes."""


class PreconditionError(ValueError):
    """An operation was called outside its stated domain."""


class ResourceGuardError(RuntimeError):
    """A quadratic-cost or memory-heavy computation was refused without ``force``."""
