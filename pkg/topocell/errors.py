# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


class TopoCellError(Exception):
    """Base class of every error raised on purpose by topocell."""

    exit_code = EXIT_VALIDATION


class LayoutFormatError(TopoCellError, ValueError):
    """The layout file or its sidecar does not follow the expected format."""


class LayoutParseError(TopoCellError, ValueError):
    """A layout row holds a value that cannot be parsed."""


class LayoutValidationError(TopoCellError, ValueError):
    """A layout breaks an invariant (bounds, class ids, canvas)."""


class PairingError(TopoCellError, ValueError):
    """Two layout collections cannot be paired."""


class EmptyForegroundError(TopoCellError, ValueError):
    """A distance transform was requested on an all-background grid."""


class DiagramError(TopoCellError, ValueError):
    """A persistence diagram or filtration spec is not usable."""


class ParameterError(TopoCellError, ValueError):
    """A numeric parameter is out of its valid range."""


class GenerationError(TopoCellError, ValueError):
    """A point-process spec could not be realised."""


class InsufficientDataError(TopoCellError, ValueError):
    """Not enough samples for the requested statistic."""


class NumericalError(TopoCellError, ArithmeticError):
    """A metric or loss evaluated to a non-finite value."""

    exit_code = EXIT_NUMERICAL
