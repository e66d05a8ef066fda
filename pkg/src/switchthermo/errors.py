"""Exception types raised on violated contracts."""


class ContractError(ValueError):
    """An input does not satisfy an operation's precondition."""


class SizeError(ValueError):
    """Matrix dimensions are incompatible or exceed the 4-qubit register."""
