"""First and second moments of the triple (X_kw, Y_kw, Z)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter

AXES = ("X", "Y", "Z")


@dataclass(frozen=True)
class FieldMoments:
    """``first[i] = <E_i>``, ``second[i, j] = <(E_i E_j + E_j E_i)/2>``.

    ``weight`` is the unnormalised trace of the conditioned state (the
    detection-event weight), or 1 for states that were already normalised.
    """

    n: int
    first: np.ndarray
    second: np.ndarray
    weight: float = 1.0
    _tol: float = field(default=1e-8, repr=False, compare=False)

    def __post_init__(self):
        first = np.array(self.first, dtype=float).reshape(3)
        second = np.array(self.second, dtype=float).reshape(3, 3)
        scale = max(1.0, float(self.n) ** 2)
        if not np.allclose(second, second.T, atol=self._tol * scale, rtol=0):
            raise InvalidParameter("second-moment matrix must be symmetric")
        second = 0.5 * (second + second.T)
        diag = np.diag(second)
        if np.any(diag < -self._tol * scale) or np.any(diag > scale * (1 + self._tol)):
            raise InvalidParameter(f"second moments {diag} outside [0, n^2]")
        if self.weight < 0:
            raise InvalidParameter("detection weight must be nonnegative")
        first.setflags(write=False)
        second.setflags(write=False)
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "second", second)
        object.__setattr__(self, "weight", float(self.weight))

    @property
    def variances(self) -> np.ndarray:
        return np.diag(self.second) - self.first ** 2

    @property
    def length2(self) -> float:
        """``<X^2 + Y^2 + Z^2>``."""
        return float(np.trace(self.second))

    @classmethod
    def diagonal(cls, n, first, diag, weight=1.0) -> "FieldMoments":
        return cls(n, first, np.diag(np.asarray(diag, dtype=float)), weight)
