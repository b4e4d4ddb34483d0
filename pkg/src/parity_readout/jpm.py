"""Measurement stage: cavity coupled to a three-level photon counter (JPM).

Counter levels are ordered (ground, excited, measured) = (0, 1, 2). The
composite space is cavity (x) counter, cavity slowest. Rates gamma_* are
plain 1/s values; the coupling g_j is angular (rad/s).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock
from .lindblad import EvolutionResult, LindbladModel, evolve

GROUND, EXCITED, MEASURED = 0, 1, 2
JPM_LEVELS = 3
MAX_DIM = 5000


class EmptyStateError(ValueError):
    """Photon subtraction annihilated the state (nothing left to normalise)."""


@dataclass(frozen=True)
class JpmParams:
    omega_j: float = 0.0
    g_j: float = 2 * math.pi * 50e6
    gamma_j: float = 200e6
    gamma_r: float = 200e6
    gamma_d: float = 1e6
    measured_level_energy: float = 0.0

    def __post_init__(self):
        for name in ("gamma_j", "gamma_r", "gamma_d", "g_j"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


DEFAULT_JPM = JpmParams()


@dataclass
class MeasurementCurve:
    times: np.ndarray
    p_click: np.ndarray
    label: str = "bright"
    result: EvolutionResult | None = None


@dataclass(frozen=True)
class ResetSpec:
    alpha_m: complex

    def __post_init__(self):
        if not np.isfinite(self.alpha_m):
            raise ValueError("reset amplitude must be finite")


def build_measurement_model(detuning: float, params: JpmParams, cavity_dim: int) -> LindbladModel:
    """Cavity-counter model in the frame rotating at the counter frequency.

    ``detuning`` is (shifted cavity frequency - counter frequency) in rad/s.
    """
    total = cavity_dim * JPM_LEVELS
    if total > MAX_DIM:
        raise ValueError(f"composite dimension {total} exceeds the {MAX_DIM} limit")
    a = fock.destroy(cavity_dim)
    n_c = a.conj().T @ a
    eye_c = np.eye(cavity_dim)
    ket = np.eye(JPM_LEVELS)
    sigma_plus = np.outer(ket[EXCITED], ket[GROUND])
    h = (
        detuning * np.kron(n_c, np.eye(JPM_LEVELS))
        + params.measured_level_energy * np.kron(eye_c, np.outer(ket[MEASURED], ket[MEASURED]))
        + params.g_j * (np.kron(a, sigma_plus) + np.kron(a.conj().T, sigma_plus.T))
    )
    jumps = [
        math.sqrt(params.gamma_d) * np.kron(eye_c, np.outer(ket[MEASURED], ket[GROUND])),
        math.sqrt(params.gamma_r) * np.kron(eye_c, np.outer(ket[GROUND], ket[EXCITED])),
        math.sqrt(params.gamma_j) * np.kron(eye_c, np.outer(ket[MEASURED], ket[EXCITED])),
    ]
    return LindbladModel(h.astype(complex), jumps)


def measured_projector(cavity_dim: int) -> np.ndarray:
    return np.kron(np.eye(cavity_dim), fock.projector(JPM_LEVELS, MEASURED))


def detection_probability(
    cavity_state,
    detuning: float,
    params: JpmParams,
    t_grid,
    cavity_dim: int | None = None,
    tol: float = 1e-10,
    label: str = "bright",
) -> MeasurementCurve:
    """Click probability versus measurement time.

    ``cavity_state`` is a coherent amplitude, a cavity ket, or a cavity
    density matrix; the counter starts in its ground state.
    """
    if np.ndim(cavity_state) == 0:
        alpha = complex(cavity_state)
        dim = cavity_dim or fock.recommended_dim(abs(alpha))
        rho_c = fock.ket2dm(fock.coherent_state(alpha, dim))
    else:
        arr = np.asarray(cavity_state, dtype=complex)
        rho_c = fock.ket2dm(arr) if arr.ndim == 1 else arr
        dim = rho_c.shape[0]
    t_grid = np.asarray(t_grid, dtype=float)
    model = build_measurement_model(detuning, params, dim)
    rho0 = np.kron(rho_c, fock.projector(JPM_LEVELS, GROUND))
    result = evolve(model, rho0, t_grid, tol=tol)
    proj = measured_projector(dim)
    p = np.real(np.einsum("ij,tji->t", proj, result.states))
    return MeasurementCurve(t_grid, p, label, result)


def contrast_curve(bright: MeasurementCurve, dark: MeasurementCurve) -> MeasurementCurve:
    if bright.times.shape != dark.times.shape or not np.allclose(bright.times, dark.times, rtol=0, atol=0):
        raise ValueError("bright and dark curves must share one time grid")
    return MeasurementCurve(bright.times, bright.p_click - dark.p_click, "contrast")


def analytic_detection_probability(alpha: complex, params: JpmParams | None = None) -> dict[str, float]:
    """Ideal and relaxation-corrected click probabilities of a coherent state."""
    n = abs(alpha) ** 2
    ideal = -math.expm1(-n)
    if params is None or params.gamma_j + params.gamma_r == 0:
        corrected = ideal
    else:
        corrected = -math.expm1(-n * (params.gamma_j / (params.gamma_j + params.gamma_r)))
    return {"ideal": ideal, "relaxation": corrected}


def subtraction_operator(dim: int) -> np.ndarray:
    """Bare lowering S|n> = |n-1>, S|0> = 0."""
    return np.eye(dim, k=1, dtype=complex)


def post_click_state(alpha_in: complex, photons_removed: int, dim: int | None = None) -> np.ndarray:
    """Normalised S^k |alpha_in>."""
    k = int(photons_removed)
    if k < 1:
        raise ValueError("at least one photon must be removed")
    dim = dim or fock.recommended_dim(abs(alpha_in))
    psi = fock.coherent_state(alpha_in, dim)
    # S^k shifts amplitudes down by k levels
    out = np.zeros_like(psi)
    out[: dim - k] = psi[k:]
    norm = np.linalg.norm(out)
    if norm < 1e-300 or norm / max(np.linalg.norm(psi), 1e-300) < 1e-150:
        raise EmptyStateError(f"S^{k} annihilates |alpha={alpha_in}>")
    return out / norm


def mean_field(psi: np.ndarray) -> complex:
    return complex(np.vdot(psi, fock.destroy(len(psi)) @ psi))


def reset_for(state: np.ndarray) -> ResetSpec:
    """Reset that removes the mean field of ``state``."""
    return ResetSpec(mean_field(state))


def apply_reset(state: np.ndarray, reset: ResetSpec) -> np.ndarray:
    d = fock.displacement_operator(-reset.alpha_m, len(state))
    return d @ state
