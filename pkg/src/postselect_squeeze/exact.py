"""Brute-force dense engine.

Basis convention: index bit ``p`` is emitter ``p`` (1 = excited), emitter 0 is
the least significant bit.  Collective operators are never materialised; they
are applied through :mod:`postselect_squeeze.kernels` as sums of single-site
actions.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CapacityExceeded, ImpossibleDetection, InvalidParameter
from .model import DetectionPlan, Geometry, ProductState, WaveDirection
from .moments import FieldMoments

MAX_PURE = 20
MAX_MIXED = 12
IMPOSSIBLE_TOL = 1e-12

__all__ = [
    "DenseQuantumState",
    "realize",
    "postselect",
    "field_moments",
    "purity",
    "intensity",
    "postselected_moments",
    "dump_state_csv",
    "MAX_PURE",
    "MAX_MIXED",
]


@dataclass(frozen=True)
class DenseQuantumState:
    """Pure vector of length ``2**n`` or ``2**n x 2**n`` density matrix."""

    n: int
    data: np.ndarray

    @property
    def kind(self) -> str:
        return "pure" if self.data.ndim == 1 else "mixed"

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    def norm(self) -> float:
        """Squared norm (pure) or trace (mixed)."""
        if self.is_pure:
            return float(np.vdot(self.data, self.data).real)
        return float(np.trace(self.data).real)

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def _columns(self) -> np.ndarray:
        return self.data[:, None] if self.is_pure else self.data


# -- operator coefficients ----------------------------------------------------


def _zeros(n):
    return np.zeros(n, dtype=complex)


def lowering_coeffs(k: WaveDirection, geometry: Geometry):
    """``E+_k = sum_p exp(-i k.r_p) s-_p``."""
    w = np.exp(-1j * geometry.phases(k))
    return w, _zeros(geometry.n), _zeros(geometry.n)


def quadrature_coeffs(k_w: WaveDirection, geometry: Geometry):
    """Coefficient triples of ``X_kw``, ``Y_kw`` and ``Z`` in that order."""
    n = geometry.n
    w = np.exp(-1j * geometry.phases(k_w))
    zero = _zeros(n)
    return (
        (w, w.conj(), zero),
        (1j * w, -1j * w.conj(), zero),
        (zero, zero, np.ones(n, dtype=complex)),
    )


# -- operations ---------------------------------------------------------------


def _single_vector(e) -> np.ndarray:
    # rank-1 factor |v><v| with v = (v_g, v_e); pick the better-conditioned branch
    if e.ee >= e.gg:
        ve = np.sqrt(e.ee)
        return np.array([np.conj(e.eg) / ve, ve], dtype=complex)
    vg = np.sqrt(e.gg)
    return np.array([vg, e.eg / vg], dtype=complex)


def realize(state: ProductState) -> DenseQuantumState:
    """Tensor product of the single-emitter factors."""
    n = state.n
    pure = state.is_pure()
    cap = MAX_PURE if pure else MAX_MIXED
    if n > cap:
        raise CapacityExceeded(
            f"{n} emitters exceed the dense {'pure' if pure else 'mixed'} cap of {cap}"
        )
    # emitter 0 is the least significant bit, i.e. the last kron factor
    out = np.ones(1, dtype=complex) if pure else np.ones((1, 1), dtype=complex)
    for e in reversed(state.emitters):
        out = np.kron(out, _single_vector(e) if pure else e.matrix())
    return DenseQuantumState(n, out)


def _apply(M, coeffs):
    return kernels.apply_site_sum(M, *coeffs)


def postselect(state: DenseQuantumState, plan: DetectionPlan, geometry: Geometry):
    """Apply ``E+`` for every detected photon, normalise, return ``(state, weight)``.

    ``weight`` is the squared norm (pure) or trace (mixed) after all
    ``plan.nu`` applications and before normalisation, for a normalised input.
    """
    if geometry.n != state.n:
        raise InvalidParameter(f"geometry has {geometry.n} emitters, state has {state.n}")
    plan.check_against(state.n)
    initial = state.norm()
    data = state.data
    for k in plan.directions:
        coeffs = lowering_coeffs(k, geometry)
        if state.is_pure:
            data = _apply(data[:, None], coeffs)[:, 0]
        else:
            data = _apply(_apply(data, coeffs).conj().T, coeffs)
    if not state.is_pure:
        data = 0.5 * (data + data.conj().T)
    out = DenseQuantumState(state.n, data)
    weight = out.norm() / initial
    if weight <= IMPOSSIBLE_TOL:
        raise ImpossibleDetection(
            f"detection record has weight {weight:.3g} (<= {IMPOSSIBLE_TOL})"
        )
    return DenseQuantumState(state.n, data / (weight * initial)), weight


def field_moments(
    state: DenseQuantumState, k_w: WaveDirection, geometry: Geometry, weight: float = 1.0
) -> FieldMoments:
    ops = quadrature_coeffs(k_w, geometry)
    norm = state.norm()
    first = np.zeros(3)
    second = np.zeros((3, 3))
    if state.is_pure:
        psi = state.data[:, None]
        applied = [_apply(psi, op)[:, 0] for op in ops]
        for i in range(3):
            first[i] = np.vdot(state.data, applied[i]).real
            for j in range(i, 3):
                second[i, j] = second[j, i] = np.vdot(applied[i], applied[j]).real
    else:
        rho = state.data
        for j in range(3):
            first[j] = kernels.trace_site_sum(rho, *ops[j]).real
            b_rho = _apply(rho, ops[j])
            for i in range(j + 1):
                second[i, j] = second[j, i] = kernels.trace_site_sum(b_rho, *ops[i]).real
            del b_rho
    return FieldMoments(state.n, first / norm, second / norm, weight)


def purity(state: DenseQuantumState) -> float:
    if state.is_pure:
        return 1.0
    rho = state.data
    return float(np.vdot(rho, rho).real / np.trace(rho).real ** 2)


def intensity(state: DenseQuantumState, k_w: WaveDirection, geometry: Geometry) -> float:
    """``<E-_kw E+_kw>``."""
    coeffs = lowering_coeffs(k_w, geometry)
    if state.is_pure:
        v = _apply(state.data[:, None], coeffs)
        val = np.vdot(v, v).real
    else:
        w, zero, _ = coeffs
        t = _apply(state.data, coeffs)
        val = kernels.trace_site_sum(t, zero, w.conj(), zero).real
    return float(max(val, 0.0) / state.norm())


def postselected_moments(
    initial: ProductState, plan: DetectionPlan, k_w: WaveDirection
) -> FieldMoments:
    """Realise, postselect on ``plan`` and measure along ``k_w`` in one call."""
    dense = realize(initial)
    out, weight = postselect(dense, plan, initial.geometry)
    return field_moments(out, k_w, initial.geometry, weight)


def dump_state_csv(state: DenseQuantumState, path) -> None:
    """Debug dump with columns ``index,re,im`` (row-major index for matrices)."""
    if state.n > 6:
        raise CapacityExceeded("state dumps are limited to n <= 6")
    flat = state.data.ravel()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "re", "im"])
        for i, z in enumerate(flat):
            w.writerow([i, repr(float(z.real)), repr(float(z.imag))])
