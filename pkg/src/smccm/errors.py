"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid configuration value or unsupported option."""


class NumericalError(ArithmeticError):
    """A recursion lost numerical validity (non-finite data, lost
    positive-definiteness, or a predicted-unstable operating point)."""


class PredictedInstabilityError(NumericalError):
    """Closed-form performance prediction fell outside its stability
    region; carries the (non-positive) stability margin."""

    def __init__(self, margin: float):
        super().__init__(f"predicted instability: stability margin {margin:.6g} <= 0")
        self.margin = margin
