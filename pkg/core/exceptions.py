"""
Exception hierarchy shared by every app.

The CLI maps these onto exit codes: parameter problems exit 2, numeric
failures exit 3, unreadable or malformed files exit 4.
"""


class RobustBoundError(Exception):
    """Root of all errors raised by the library"""


class ParameterError(RobustBoundError, ValueError):
    """A caller-supplied value is out of range; `parameter` names it"""

    def __init__(self, parameter, message):
        self.parameter = parameter
        super().__init__(f'{parameter}: {message}')


class IncompatibleGridError(RobustBoundError, ValueError):
    """Two grids were combined although their GridSpecs differ"""

    def __init__(self, left, right, operation='combine'):
        self.left = left
        self.right = right
        super().__init__(f'cannot {operation} grids with different specs: {left} vs {right}')


class NumericError(RobustBoundError):
    """A numerical procedure could not produce a trustworthy value"""


class DegenerateDensityError(NumericError):
    """A density that must be normalized has zero (or non-finite) mass"""


class MassLeakError(NumericError):
    """Probability mass falls outside the grid extents"""

    def __init__(self, what, leak, threshold):
        self.what = what
        self.leak = leak
        self.threshold = threshold
        super().__init__(
            f'{what}: {leak:.3g} of the mass leaks past the grid extents '
            f'(threshold {threshold:.3g}); enlarge the domain with --grid'
        )


class QuadratureError(NumericError):
    """Adaptive quadrature did not converge before the refinement cap"""

    def __init__(self, what, previous, last, panels):
        self.previous = previous
        self.last = last
        self.panels = panels
        super().__init__(
            f'{what}: no convergence after {panels} panels '
            f'(last two estimates {previous!r} and {last!r})'
        )


class KernelTooLargeError(NumericError):
    """The vicinity kernel does not fit inside the density grid"""


class DataFileError(RobustBoundError):
    """An input file is missing, unreadable or malformed"""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f'{path}: {message}')
