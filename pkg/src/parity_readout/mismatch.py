"""Dispersive-shift mismatch: split detunings, occupation series, coherence loss
inside a parity subspace, and the measurement-basis change from unequal
detection probabilities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock
from .jpm import JpmParams, analytic_detection_probability
from .protocol import (
    DrivePulse,
    QubitRegister,
    amplitude_for_occupation,
    drive_outcome,
    optimal_drive_time,
    parity_tones,
)

SERIES_FLOOR = 1e-15
PAIRS = {2: {"even": ("00", "11"), "odd": ("01", "10")}}


@dataclass
class MismatchScenario:
    register: QubitRegister
    pulse: DrivePulse
    amplitudes: dict[str, complex]
    parities: dict[str, str]


@dataclass
class CoherenceReport:
    factor: complex
    magnitude: float
    phase: float
    exponent: complex  # -ln D
    series_exponent: complex  # leading Taylor estimate of -ln D


@dataclass
class OverlapReport:
    p_a: float
    p_b: float
    overlap: float
    overlap_approx: float
    infidelity: float  # 1 - overlap, evaluated without cancellation
    infidelity_approx: float
    delta: float


def four_qubit_pattern(eps: float) -> tuple[float, float, float]:
    """Default (eps_2, eps_3, eps_4) used for four-qubit sweeps."""
    return (eps, eps / 2, -eps / 2)


def mismatch_register(n_qubits: int, chi: float, eps: float) -> QubitRegister:
    if n_qubits == 2:
        return QubitRegister(2, chi, (0.0, eps))
    if n_qubits == 4:
        return QubitRegister(4, chi, (0.0,) + four_qubit_pattern(eps))
    raise ValueError("mismatch scenarios are defined for 2 or 4 qubits")


def mismatch_amplitudes(register: QubitRegister, pulse: DrivePulse | None = None, occupation: float = 9.0) -> MismatchScenario:
    """Post-drive amplitudes of every basis state at t_D = pi/chi.

    Without an explicit pulse, the parity tones of the mismatch-free register are
    used with a0 set so the resonant occupation would be ``occupation``.
    """
    if pulse is None:
        t_d = optimal_drive_time(register)
        pulse = DrivePulse(amplitude_for_occupation(occupation, t_d), parity_tones(register), t_d)
    out = drive_outcome(register, pulse)
    return MismatchScenario(register, pulse, out.amplitudes, out.parities)


def two_qubit_amplitudes(a0: float, chi: float, eps: float) -> dict[str, complex]:
    """Explicit two-qubit amplitudes after t_D = pi/chi, resonant drive at omega_C."""
    theta = math.pi * eps / chi
    even = a0 / (2 * (2 * chi + eps))
    if eps == 0:
        odd01 = -0.5j * a0 * math.pi / chi
        odd10 = odd01
    else:
        odd01 = -(a0 / (2 * eps)) * np.expm1(1j * theta)
        odd10 = (a0 / (2 * eps)) * np.expm1(-1j * theta)
    return {
        "00": complex(even * np.expm1(-1j * theta)),
        "11": complex(-even * np.expm1(1j * theta)),
        "01": complex(odd01),
        "10": complex(odd10),
    }


def occupation_expansions(scenario: MismatchScenario) -> dict[str, float]:
    """Exact two-qubit band occupations and their second-order series."""
    reg = scenario.register
    if reg.n_qubits != 2:
        raise ValueError("series expansions are available for the two-qubit register")
    chi, eps, a0 = reg.chi, reg.epsilons[1], scenario.pulse.a0
    theta = math.pi * eps / chi
    explicit = two_qubit_amplitudes(a0, chi, eps)
    odd_exact = abs(explicit["01"]) ** 2
    even_exact = abs(explicit["00"]) ** 2
    base = (a0 / 2) ** 2 * (math.pi / chi) ** 2
    odd_series = base * (1 - theta**2 / 12)
    even_series_mid = (a0 / (2 * (2 * chi + eps))) ** 2 * theta**2
    even_series = base * (eps / (2 * chi)) ** 2

    def rel(series, exact):
        return abs(series - exact) / max(abs(exact), SERIES_FLOOR)

    return {
        "odd_exact": odd_exact,
        "even_exact": even_exact,
        "odd_series": odd_series,
        "even_series": even_series,
        "even_series_mid": even_series_mid,
        "odd_rel_error": rel(odd_series, odd_exact),
        "even_rel_error": rel(even_series, even_exact),
        "even_mid_rel_error": rel(even_series_mid, even_exact),
    }


def intra_subspace_decoherence(scenario: MismatchScenario, parity: str) -> CoherenceReport:
    """Overlap D = <alpha_s'|alpha_s> for the two-qubit same-parity pair."""
    reg = scenario.register
    if reg.n_qubits != 2:
        raise ValueError("pairwise decoherence is defined here for the two-qubit register")
    s, s2 = PAIRS[2][parity]
    a_s, a_s2 = scenario.amplitudes[s], scenario.amplitudes[s2]
    d = fock.coherent_overlap(a_s, a_s2)
    exponent = 0.5 * abs(a_s) ** 2 + 0.5 * abs(a_s2) ** 2 - np.conj(a_s) * a_s2
    chi, eps, a0 = reg.chi, reg.epsilons[1], scenario.pulse.a0
    theta = math.pi * eps / chi
    if parity == "odd":
        # A_O^2 (theta^4/2 + i theta^3) with A_O = a0/(2 eps), written without 1/eps
        pref = (a0 / 2) ** 2 * (math.pi / chi) ** 2
        series = pref * (0.5 * theta**2 + 1j * theta)
    else:
        # alpha_00 carries exp(-i theta) where alpha_01 carries exp(+i theta),
        # so the cubic phase term enters with the opposite sign
        pref = (a0 / (2 * (2 * chi + eps))) ** 2
        series = pref * (0.5 * theta**4 - 1j * theta**3)
    return CoherenceReport(d, abs(d), float(np.angle(d)), complex(exponent), complex(series))


def detection_ratio(params: JpmParams | None) -> float:
    if params is None or params.gamma_j + params.gamma_r == 0:
        return 1.0
    return params.gamma_j / (params.gamma_j + params.gamma_r)


def overlap_damping(alpha: complex, params: JpmParams | None = None) -> float:
    """Prefactor of delta^2 in the basis-overlap error: (r|a|^2)^2 e^{-2 r |a|^2} / 4."""
    x = detection_ratio(params) * abs(alpha) ** 2
    return x**2 * math.exp(-2 * x) / 4


def measurement_basis_overlap(alpha_a: complex, alpha_b: complex, params: JpmParams | None = None) -> OverlapReport:
    """Overlap of the post-measurement qubit state with the target superposition.

    With ``params`` the relaxation-corrected detection probability is used,
    otherwise the ideal subtraction-detector value.
    """
    key = "ideal" if params is None else "relaxation"
    p_a = analytic_detection_probability(alpha_a, params)[key]
    p_b = analytic_detection_probability(alpha_b, params)[key]
    if p_a + p_b == 0:
        raise ValueError("overlap undefined when both detection probabilities vanish")
    infid = (math.sqrt(p_a) - math.sqrt(p_b)) ** 2 / (2 * (p_a + p_b))
    overlap = 0.5 * (1 + 2 * math.sqrt(p_a * p_b) / (p_a + p_b))
    if abs(alpha_a) == 0:
        delta = math.inf
        infid_approx = math.nan
    else:
        delta = abs(alpha_b) / abs(alpha_a) - 1
        r = detection_ratio(params)
        x = r * abs(alpha_a) ** 2
        # leading Taylor term in delta of the exact expression
        infid_approx = delta**2 * x**2 * math.exp(-2 * x) / (4 * math.expm1(-x) ** 2)
    return OverlapReport(p_a, p_b, overlap, 1 - infid_approx, infid, infid_approx, delta)


def loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def even_occupation_exponent(chi: float, ratios: np.ndarray, occupation: float = 9.0) -> float:
    """Fitted exponent of the even-band occupation versus the mismatch."""
    occ = []
    for r in ratios:
        sc = mismatch_amplitudes(mismatch_register(2, chi, r * chi), occupation=occupation)
        occ.append(abs(sc.amplitudes["00"]) ** 2)
    return loglog_slope(np.asarray(ratios) * chi, np.asarray(occ))
