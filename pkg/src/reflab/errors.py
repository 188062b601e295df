"""Exception types raised across reflab."""

from __future__ import annotations


class ReflabError(Exception):
    """Base class for every error raised by this package."""


class InvalidMatrix(ReflabError, ValueError):
    """A Coxeter matrix violates symmetry, diagonal or weight constraints."""


class ExactModeUnavailable(ReflabError):
    """Exact arithmetic was requested but a form entry is irrational."""


class SliceTooLarge(ReflabError):
    """Root generation exceeded the configured root-count cap."""

    def __init__(self, cap: int, depth: int):
        super().__init__(f"root count exceeded cap {cap} while generating depth {depth}")
        self.cap = cap
        self.depth = depth


class NotARoot(ReflabError, ValueError):
    """A coefficient vector does not descend to a simple root."""


class DegenerateQuadratic(ReflabError):
    """Every coefficient of the segment quadratic vanished."""


class RankUnsupported(ReflabError):
    """The requested operation only exists for rank 3."""


class ClosureEscapesSlice(ReflabError):
    """Too few subgroup roots lie in the slice to fix the canonical pair."""


class EqualNormalizedCoordinates(ReflabError):
    """Two distinct roots produced identical lexicographic keys."""


class NotAnInversionPrefix(ReflabError):
    """An order prefix is not the inversion sequence of a reduced word."""

    def __init__(self, index: int, detail: str = ""):
        msg = f"order prefix breaks the inversion-sequence peel at position {index}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.index = index


class InsufficientCandidates(ReflabError):
    """No k+1 pairwise cone-crossing near-cone roots exist in the slice."""


class NotFiniteType(ReflabError):
    """Root generation did not saturate; the matrix is not of finite type."""


class WordNotReduced(ReflabError):
    """A word produced a non-positive or repeated inversion root."""

    def __init__(self, index: int):
        super().__init__(f"word is not reduced at letter {index}")
        self.index = index


class NotAPartition(ReflabError):
    """Two inversion sets overlap or fail to cover the affine slice."""


class BlockViolation(ReflabError):
    """The universal block structure failed on a truncated order."""

    def __init__(self, message: str, ids: list[int]):
        super().__init__(f"{message}: {ids[:10]}")
        self.ids = ids
