class MersenneError(Exception):
    """Base class for data and parameter errors raised by the library."""


class DomainError(MersenneError, ValueError):
    """An input lies outside the domain an operation is defined on."""


class ModulusError(MersenneError, ValueError):
    """Invalid modulus, family or bucket parameters."""


class SketchFormatError(MersenneError, ValueError):
    """Serialized sketch state is malformed, or two sketches cannot be combined."""


class StreamFormatError(MersenneError, ValueError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class BudgetExceededError(MersenneError, RuntimeError):
    def __init__(self, message: str, required: int | float):
        self.required = required
        super().__init__(message)


class WideOverflowError(AssertionError):
    """A fixed-width UWide operation would exceed its 256-bit capacity."""
