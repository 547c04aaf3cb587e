"""Exception types raised across the package."""


class HeightMuError(Exception):
    """Base class for all package errors."""


class AllZero(HeightMuError, ValueError):
    pass


class NotARoot(HeightMuError, ValueError):
    pass


class MapSyntaxError(HeightMuError, ValueError):
    """Malformed map text. ``pos`` is the 0-based offset of the problem."""

    def __init__(self, message, text="", pos=0):
        self.text = text
        self.pos = pos
        if text:
            message = f"{message} at position {pos}: {text[:pos]}<HERE>{text[pos:]}"
        super().__init__(message)


class InhomogeneousError(HeightMuError, ValueError):
    pass


class DegreeMismatch(HeightMuError, ValueError):
    pass


class DimensionMismatch(HeightMuError, ValueError):
    pass


class DimensionTooLarge(HeightMuError, ValueError):
    pass


class UnluckyPrimeExhaustion(HeightMuError, RuntimeError):
    pass


class EmptyRegion(HeightMuError, RuntimeError):
    pass


class OrbitLeftChart(HeightMuError, ArithmeticError):
    pass


class BoundedOrbit(HeightMuError, ArithmeticError):
    pass


class InverseCheckFailed(HeightMuError, ValueError):
    pass


class DegenerateForm(HeightMuError, ValueError):
    pass


class DegenerateFiber(HeightMuError, ArithmeticError):
    pass


class LinearFormVanishes(HeightMuError, ArithmeticError):
    pass


class NotOnSurface(HeightMuError, ValueError):
    pass


class PeriodicOrbit(HeightMuError, ArithmeticError):
    pass


class HeightOverflow(HeightMuError, ArithmeticError):
    pass


class SearchExhausted(HeightMuError, RuntimeError):
    pass
