"""Exception hierarchy shared by all modules.

Exit-code mapping used by the CLI: ArgumentError -> 2,
PrecisionError / NonconvergenceError -> 3, BudgetError / ResourceError -> 4.
"""


class FCrystalError(Exception):
    pass


class ArgumentError(FCrystalError, ValueError):
    """Bad input: wrong shapes, non-prime p, non-invertible twist, ..."""


class DocumentError(ArgumentError):
    """Schema violation in a crystal document; carries a field path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class PrecisionError(FCrystalError):
    """A needed valuation or pivot could not be certified at the working
    precision.  Callers are expected to retry at doubled precision."""


class SplitFailed(PrecisionError):
    """Two distinct slopes coincide at the working precision."""


class NonconvergenceError(FCrystalError):
    """A lattice chain exceeded its iteration cap."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class ResourceError(FCrystalError):
    """A size guard was exceeded (symbolic Witt tables and the like)."""


class BudgetError(ResourceError):
    """Brute-force search space exceeds the given budget."""


class ExtendBaseField(FCrystalError):
    """The coordinate equations are unsolvable over the current residue
    field; retry after base_extend.  `suggested_degree` is a hint only."""

    def __init__(self, message, suggested_degree=2):
        self.suggested_degree = suggested_degree
        super().__init__(message)
