class InputError(ValueError):
    """Bad user-supplied data or a violated precondition."""


class ConsistencyError(RuntimeError):
    """An internal identity that must hold exactly was found broken."""


class TailNotComputable(InputError):
    """The infinite tail of a functional has no closed form for this weight."""
