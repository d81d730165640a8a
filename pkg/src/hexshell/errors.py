"""Exception hierarchy shared by all hexshell modules."""


class HexShellError(Exception):
    """Base class for every error raised by hexshell."""


class InvalidQuadrangulation(HexShellError, ValueError):
    """The quads given do not form a valid quadrangulation of the sphere."""


class NonManifoldEdge(InvalidQuadrangulation):
    pass


class DegenerateQuad(InvalidQuadrangulation):
    pass


class NotASphere(InvalidQuadrangulation):
    pass


class NotOrientable(InvalidQuadrangulation):
    pass


class OddQuadCount(HexShellError, ValueError):
    """Only quadrangulations with an even number of quads bound a hex mesh."""


class OverSharedFace(HexShellError, ValueError):
    pass


class WouldCreateNonSimpleBoundary(HexShellError):
    """Performing the flip would give a boundary with a doubled edge or quad."""


class IncompatibleHex(HexShellError, ValueError):
    pass


class NonLifoUndo(HexShellError, RuntimeError):
    pass


class UnderflowExit(HexShellError, RuntimeError):
    pass


class BudgetExhausted(HexShellError):
    """A node or time budget ran out before the search finished.

    ``partial`` holds whatever solutions were found before the cut-off.
    """

    def __init__(self, message, partial=None, stats=None):
        super().__init__(message)
        self.partial = list(partial or [])
        self.stats = stats


class NotFound(HexShellError):
    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats


class OutOfMemoryBudget(HexShellError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class TableFormatError(HexShellError, ValueError):
    pass


class ParseError(HexShellError, ValueError):
    pass
