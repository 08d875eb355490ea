"""Exception types raised across the package."""


class CantorCVTError(Exception):
    """Base class for all package errors."""


class ParamOutOfRange(CantorCVTError, ValueError):
    pass


class OverlappingCylinders(CantorCVTError, ValueError):
    pass


class IndexOutOfRange(CantorCVTError, IndexError):
    pass


class LevelTooLarge(CantorCVTError, ValueError):
    pass


class PartitionMismatch(CantorCVTError, ValueError):
    pass


class NTooLarge(CantorCVTError, ValueError):
    pass


class SymmetryPruningInvalid(CantorCVTError, ValueError):
    pass


class NoCvtFoundUpToMMax(CantorCVTError):
    """Level escalation ran past ``m_max`` without finding a CVT."""

    def __init__(self, n, last_level):
        self.n = n
        self.last_level = last_level
        super().__init__(f"no CVT with n={n} found up to level m={last_level}")


class EmptyList(CantorCVTError, ValueError):
    pass


class EmptyCell(CantorCVTError):
    """A Lloyd generator captured no atoms."""


class SpecInvalid(CantorCVTError, ValueError):
    pass
