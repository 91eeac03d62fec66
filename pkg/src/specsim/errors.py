"""Exception types shared across the package."""


class NumericError(ArithmeticError):
    """A numerical operation left its supported regime (singular system,
    condition estimate past the cutoff, non-finite values)."""


class SingularFrequencyError(NumericError):
    """Spectral density requested at a frequency where it diverges."""
