"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A numeric parameter lies outside its admissible domain."""


class StructuralError(ValueError):
    """Array shapes or dimensions are inconsistent."""


class GenerationError(RuntimeError):
    """A randomized construction gave up after exhausting its retry budget."""

    def __init__(self, message, attempts=None):
        super().__init__(message)
        self.attempts = attempts


class ConfigError(ValueError):
    """Experiment configuration failed validation.

    ``fields`` lists the offending configuration keys.
    """

    def __init__(self, problems):
        # problems: mapping of key -> reason
        self.problems = dict(problems)
        self.fields = sorted(self.problems)
        lines = [f"{k}: {v}" for k, v in sorted(self.problems.items())]
        super().__init__("invalid configuration: " + "; ".join(lines))
