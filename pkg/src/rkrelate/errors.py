"""Exception types shared across the package."""

from __future__ import annotations


class ExpressionSyntaxError(ValueError):
    """Malformed expression text. ``position`` is a 0-based character offset."""

    def __init__(self, message: str, text: str = "", position: int = 0):
        self.text = text
        self.position = position
        if text:
            message = f"{message} at position {position}\n  {text}\n  {' ' * position}^"
        super().__init__(message)


class EvaluationError(ArithmeticError):
    """A field or map produced a non-finite value or hit a singular point."""


class TableauError(ValueError):
    pass


class NetworkError(ValueError):
    pass


class StepError(RuntimeError):
    """Raised when a stepper cannot complete a step.

    Carries whatever location information is known: the stage index, the
    Picard iteration (implicit path only), the trajectory step and the side
    ("X" or "Y") in paired experiments.
    """

    def __init__(self, message, *, stage=None, iteration=None, step=None, side=None):
        self.stage = stage
        self.iteration = iteration
        self.step = step
        self.side = side
        self.reason = message
        super().__init__(self._describe())

    def _describe(self):
        where = []
        if self.side is not None:
            where.append(f"{self.side}-side")
        if self.step is not None:
            where.append(f"step {self.step}")
        if self.iteration is not None:
            where.append(f"iteration {self.iteration}")
        if self.stage is not None:
            where.append(f"stage {self.stage}")
        prefix = ", ".join(where)
        return f"{prefix}: {self.reason}" if prefix else str(self.reason)

    def located(self, **kwargs) -> "StepError":
        """Return a copy with extra location fields filled in."""
        fields = dict(stage=self.stage, iteration=self.iteration, step=self.step, side=self.side)
        fields.update({k: v for k, v in kwargs.items() if v is not None})
        return StepError(self.reason, **fields)
