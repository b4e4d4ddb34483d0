"""Cavity loss acting on qubit-conditioned cavity states.

``kappa`` is the amplitude damping rate: a coherent amplitude decays as
exp(-kappa t), which corresponds to collapse operators sqrt(2 kappa (nbar+1)) a
and sqrt(2 kappa nbar) a_dag. The characteristic function is
chi(xi) = Tr[rho D(xi)].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import fock
from .jpm import apply_reset, mean_field, post_click_state, ResetSpec
from .lindblad import LindbladModel, evolve

RESET_POLICIES = ("shared-pulse", "branch-mean")


@dataclass(frozen=True)
class DecayParams:
    kappa: float
    omega: float = 0.0
    nbar: float = 0.0

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")
        if self.nbar < 0:
            raise ValueError("thermal occupation must be non-negative")

    @property
    def eta(self) -> float:
        return 1.0 + 2.0 * self.nbar


def coherent_pair_characteristic(ket: complex, bra: complex, xi: complex) -> complex:
    """chi(xi) of the operator |ket><bra| in closed form."""
    # <bra| D(xi) |ket> = exp((xi conj(ket) - conj(xi) ket)/2) <bra|ket + xi>
    phase = np.exp(0.5 * (xi * np.conj(ket) - np.conj(xi) * ket))
    return complex(phase * fock.coherent_overlap(bra, ket + xi))


def characteristic_function(rho: np.ndarray, xi: complex) -> complex:
    """chi(xi) = Tr[rho D(xi)] on a truncated space."""
    d = fock.displacement_operator(xi, rho.shape[0])
    return complex(np.trace(rho @ d))


def characteristic_evolution(ket: complex, bra: complex, params: DecayParams, xi: complex, t: float) -> complex:
    """chi(xi, t) of the damped operator that starts as |ket><bra|."""
    shrink = np.exp(-t * (params.kappa - 1j * params.omega))
    env = math.exp(0.5 * params.eta * abs(xi) ** 2 * math.expm1(-2 * t * params.kappa))
    return coherent_pair_characteristic(ket, bra, xi * shrink) * env


def steady_characteristic(ket: complex, bra: complex, params: DecayParams, xi: complex) -> complex:
    """t -> infinity limit: Tr(|ket><bra|) times the thermal characteristic function."""
    return fock.coherent_overlap(bra, ket) * math.exp(-0.5 * params.eta * abs(xi) ** 2)


def damping_factor(alpha_0: complex, alpha_1: complex) -> complex:
    """F_01 = <alpha_1|alpha_0>: steady-state weight of the |0><1| qubit coherence."""
    return fock.coherent_overlap(alpha_1, alpha_0)


def damping_envelope(psi_0: np.ndarray, psi_1: np.ndarray) -> complex:
    """F_01 = <psi_1|psi_0> for general branch states."""
    return complex(np.vdot(psi_1, psi_0))


def steady_state_coherence(occupation: float, epsilon_over_chi: float) -> float:
    """|F| = exp(-N_C (1 - cos(pi eps / chi))) for the two-qubit odd pair."""
    if occupation < 0:
        raise ValueError("occupation must be non-negative")
    return math.exp(-occupation * (1 - math.cos(math.pi * epsilon_over_chi)))


def odd_pair_amplitudes(occupation: float, epsilon_over_chi: float) -> tuple[complex, complex]:
    """Two-qubit odd-pair amplitudes (alpha_01, alpha_10) rescaled to ``occupation``."""
    # -(exp(i theta) - 1) / theta has phase -i exp(i theta / 2) for |theta| < 2 pi
    theta = math.pi * epsilon_over_chi
    a01 = -1j * math.sqrt(occupation) * np.exp(0.5j * theta)
    return complex(a01), complex(-np.conj(a01))


def decay_model(params: DecayParams, cavity_dim: int, n_qubit_levels: int = 2) -> LindbladModel:
    """Qubit-pair (x) cavity model with cavity loss; qubits are static in their frame."""
    a = fock.destroy(cavity_dim)
    eye_q = np.eye(n_qubit_levels)
    h = params.omega * np.kron(eye_q, a.conj().T @ a)
    ops = [math.sqrt(2 * params.kappa * (params.nbar + 1)) * np.kron(eye_q, a)]
    if params.nbar > 0:
        ops.append(math.sqrt(2 * params.kappa * params.nbar) * np.kron(eye_q, a.conj().T))
    return LindbladModel(h.astype(complex), ops)


def lindblad_steady_coherence(
    alpha_0: complex,
    alpha_1: complex,
    params: DecayParams,
    cavity_dim: int | None = None,
    decay_times: float = 20.0,
    tol: float = 1e-10,
):
    """Evolve (|0>|a0> + |1>|a1>)/sqrt2 under cavity loss; return (|F|, result).

    |F| is twice the modulus of the reduced qubit coherence at the final time.
    """
    dim = cavity_dim or fock.recommended_dim(max(abs(alpha_0), abs(alpha_1))) + int(10 * params.nbar) + 4
    psi = np.concatenate([fock.coherent_state(alpha_0, dim), fock.coherent_state(alpha_1, dim)]) / math.sqrt(2)
    rho0 = fock.ket2dm(psi)
    model = decay_model(params, dim)
    t_end = decay_times / params.kappa
    times = np.linspace(0.0, t_end, 11)
    result = evolve(model, rho0, times, tol=tol)
    rho_q = fock.partial_trace(result.states[-1], [2, dim], keep=0)
    return 2 * abs(rho_q[0, 1]), result


def reset_branches(
    alpha_0: complex,
    alpha_1: complex,
    photons_removed: int,
    policy: str = "shared-pulse",
    dim: int | None = None,
) -> tuple[np.ndarray, np.ndarray, complex]:
    """Post-click, post-reset branch states for the pair (alpha_0, alpha_1).

    ``shared-pulse``: one reset pulse, sized from the mean field of the branch-0
    post-click state, acts on each branch through that branch's linear drive
    response, i.e. as D(-alpha_M * alpha_s / alpha_0).
    ``branch-mean``: each branch is displaced by minus its own mean field.
    """
    if policy not in RESET_POLICIES:
        raise ValueError(f"unknown reset policy {policy!r}; choose from {RESET_POLICIES}")
    dim = dim or fock.recommended_dim(max(abs(alpha_0), abs(alpha_1))) + 10
    psi_0 = post_click_state(alpha_0, photons_removed, dim)
    psi_1 = post_click_state(alpha_1, photons_removed, dim)
    alpha_m = mean_field(psi_0)
    if policy == "shared-pulse":
        out_0 = apply_reset(psi_0, ResetSpec(alpha_m))
        out_1 = apply_reset(psi_1, ResetSpec(alpha_m * alpha_1 / alpha_0))
    else:
        out_0 = apply_reset(psi_0, ResetSpec(alpha_m))
        out_1 = apply_reset(psi_1, ResetSpec(mean_field(psi_1)))
    return out_0, out_1, alpha_m


def post_reset_decay_envelope(
    occupations: Sequence[float],
    photons_removed: Sequence[int] = (1, 2, 3),
    policy: str = "shared-pulse",
) -> np.ndarray:
    """1 - |F_01| for the worst-case pair alpha_0 = -alpha_1 real.

    Returns an array of shape (len(occupations), len(photons_removed)).
    """
    surface = np.empty((len(occupations), len(photons_removed)))
    for i, n in enumerate(occupations):
        alpha = math.sqrt(n)
        for j, k in enumerate(photons_removed):
            psi_0, psi_1, _ = reset_branches(alpha, -alpha, k, policy)
            surface[i, j] = 1.0 - abs(damping_envelope(psi_0, psi_1))
    return surface
