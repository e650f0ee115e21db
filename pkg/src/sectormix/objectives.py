"""Loss values for training-loop integration."""

import math
from dataclasses import dataclass

from .errors import DomainError

CLAMP_EPS = 1e-7


@dataclass(frozen=True)
class Prediction:
    """Detector output y_prime against target y; y_prime is clamped away
    from {0, 1} so the loss stays finite at saturated predictions."""

    y_prime: float
    y: float

    def __post_init__(self):
        for name, value in (("y_prime", self.y_prime), ("y", self.y)):
            if math.isnan(value):
                raise DomainError(f"{name} is NaN")
        if not (0.0 <= self.y <= 1.0):
            raise DomainError(f"target must lie in [0, 1], got {self.y}")
        clamped = min(max(float(self.y_prime), CLAMP_EPS), 1.0 - CLAMP_EPS)
        object.__setattr__(self, "y_prime", clamped)


def bce_loss(pred):
    """Binary cross-entropy ``-[y log y' + (1 - y) log(1 - y')]``."""
    y, yp = pred.y, pred.y_prime
    return -(y * math.log(yp) + (1.0 - y) * math.log(1.0 - yp))


def batch_mean(values):
    """Arithmetic mean of a nonempty list of loss values."""
    values = list(values)
    if not values:
        raise DomainError("cannot average an empty batch")
    return sum(values) / len(values)
