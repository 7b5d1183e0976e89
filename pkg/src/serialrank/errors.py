"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class SerialRankError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSizeError(SerialRankError, ValueError):
    pass


class InvalidParameterError(SerialRankError, ValueError):
    pass


class DegenerateNoiseError(InvalidParameterError):
    """The debiasing factor ``2p - 1`` is not positive."""


class RangeError(SerialRankError, ValueError):
    pass


class ParseError(SerialRankError, ValueError):
    """Malformed input record; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateDegreeError(SerialRankError, ValueError):
    def __init__(self, item: int, label: str | None = None) -> None:
        self.item = item
        name = f"{item}" if label is None else f"{item} ({label})"
        super().__init__(f"item {name} has zero total similarity; normalized Laplacian undefined")


class ConnectivityError(SerialRankError):
    """The similarity (or comparison) graph has more than one component.

    ``components`` holds one list of item indices per component, largest first.
    """

    def __init__(self, components: list[list[int]], labels: list[str] | None = None) -> None:
        self.components = components
        self.labels = labels
        shown = []
        for comp in components[:5]:
            names = [labels[i] for i in comp] if labels is not None else comp
            if len(names) > 8:
                names = list(names[:8]) + ["..."]
            shown.append("{" + ", ".join(str(x) for x in names) + "}")
        more = "" if len(components) <= 5 else f" (+{len(components) - 5} more)"
        super().__init__(
            f"similarity graph is disconnected: {len(components)} components "
            + " ".join(shown) + more
        )


class ConvergenceError(SerialRankError):
    def __init__(self, message: str, residual: float) -> None:
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")


class DegeneracyError(SerialRankError, ValueError):
    pass
