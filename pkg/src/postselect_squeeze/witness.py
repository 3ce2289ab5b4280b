"""Squeezing parameters and field-based entanglement witnesses from moments."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .moments import AXES, FieldMoments

ENTANGLED = "entangled"
NOT_DETECTED = "not-detected"
INDETERMINATE = "indeterminate"

# round-off below this (relative to n^2) is clamped to an exact zero numerator
_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class SqueezingReport:
    xi2: float | None
    minimizer: object  # "X" | "Y" | "Z" or a unit 3-vector
    numerator: float
    denominator: float
    db: float | None
    verdict: str

    @property
    def minimizer_label(self) -> str:
        if isinstance(self.minimizer, str):
            return self.minimizer
        return "(" + " ".join(repr(float(c)) for c in self.minimizer) + ")"


def to_db(xi2: float) -> float:
    """``-10 log10(xi2)``; exactly 0 maps to ``+inf``."""
    if xi2 == 0:
        return math.inf
    return -10.0 * math.log10(xi2)


def _report(numerator, denominator, minimizer, n) -> SqueezingReport:
    if abs(numerator) <= _ZERO_TOL * n * n:
        numerator = 0.0
    if denominator <= 0:
        return SqueezingReport(None, minimizer, numerator, denominator, None, INDETERMINATE)
    xi2 = max(numerator, 0.0) / denominator
    verdict = ENTANGLED if xi2 < 1.0 else NOT_DETECTED
    return SqueezingReport(xi2, minimizer, numerator, denominator, to_db(xi2), verdict)


def _denominator(m: FieldMoments) -> float:
    return m.length2 - 2.0 * m.n


def xi2_fixed(m: FieldMoments) -> SqueezingReport:
    """Minimum over the fixed triple X, Y, Z (ties resolved in that order)."""
    n = m.n
    diag = np.diag(m.second)
    nums = (n - 1) * (diag - m.first ** 2) + diag
    i = int(np.argmin(nums))
    return _report(float(nums[i]), _denominator(m), AXES[i], n)


def xi2_optimal(m: FieldMoments) -> SqueezingReport:
    """Minimum over every direction of the (X, Y, Z) space.

    ``(n-1) Var(E_u) + <E_u^2> = u^T A u`` with ``A = n M - (n-1) m m^T``, so the
    optimum is the smallest eigenpair of ``A``.
    """
    n = m.n
    A = n * m.second - (n - 1) * np.outer(m.first, m.first)
    vals, vecs = np.linalg.eigh(A)
    u = vecs[:, 0]
    u = u if u[np.argmax(np.abs(u))] > 0 else -u
    return _report(float(vals[0]), _denominator(m), tuple(float(c) for c in u), n)


def xi1(m: FieldMoments) -> float:
    return float(m.variances.sum() / (2.0 * m.n))


_ASSIGNMENTS = ((1, 2, 0), (0, 2, 1), (0, 1, 2))  # (n1, n2, n3) with n3 = X, Y, Z


def xi3(m: FieldMoments):
    """Pair-variance parameter, minimised over which axis plays ``n3``.

    ``None`` when every assignment has a nonpositive denominator.
    """
    n = m.n
    var = m.variances
    diag = np.diag(m.second)
    best = None
    for a, b, c in _ASSIGNMENTS:
        den = diag[c] + n * (n - 2)
        if den <= 0:
            continue
        val = (n - 1) * (var[a] + var[b]) / den
        if best is None or val < best:
            best = val
    return None if best is None else float(best)


def witness_values(m: FieldMoments):
    """``(w1, w2, w3)``; a negative value certifies entanglement."""
    n = m.n
    var = m.variances
    diag = np.diag(m.second)
    w1 = var.sum() - 2.0 * n
    # 2n + (n-1) Var_i - (sum of the other two second moments), best i
    w2 = min(2.0 * n + (n - 1) * var[i] - (diag.sum() - diag[i]) for i in range(3))
    w3 = min((n - 1) * (var[a] + var[b]) - diag[c] - n * (n - 2) for a, b, c in _ASSIGNMENTS)
    return float(w1), float(w2), float(w3)
