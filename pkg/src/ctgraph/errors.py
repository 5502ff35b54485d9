"""Exception types shared across the package."""


class CtGraphError(Exception):
    """Base class for all ctgraph errors."""


class ConfigError(CtGraphError):
    """Invalid configuration: bad key, bad value, or violated invariant.

    Raised at load/construction time so that reset/step never have to
    validate configuration.
    """


class InvalidActionError(CtGraphError):
    """Action outside the valid range [0..branching]."""


class EpisodeDoneError(CtGraphError):
    """step() called on a terminated episode."""


class ContractError(CtGraphError):
    """API misuse: incomplete decision trace, policy queried at a terminal
    state, or similar caller-side violations."""
