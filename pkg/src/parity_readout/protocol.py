"""Dispersive drive stage: parity bands, closed-form amplitudes, ODE oracle.

Angular frequencies are in rad/s and times in s. A computational bit value
of 1 marks an excited qubit, which pulls the cavity by ``+chi_n``; a ground
qubit pulls it by ``-chi_n``. Qubit 1 is the leftmost character of a label.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import fock, ode

RESONANT_THRESHOLD = 1e-8


@dataclass(frozen=True)
class QubitRegister:
    n_qubits: int
    chi: float
    epsilons: tuple[float, ...] = ()
    omega_c: float = 0.0

    def __post_init__(self):
        if self.n_qubits not in (1, 2, 4):
            raise ValueError(f"n_qubits must be 1, 2 or 4, got {self.n_qubits}")
        eps = tuple(float(e) for e in self.epsilons) or (0.0,) * self.n_qubits
        if len(eps) == self.n_qubits - 1:
            eps = (0.0,) + eps
        if len(eps) != self.n_qubits:
            raise ValueError(f"need {self.n_qubits} mismatches (or {self.n_qubits - 1} with eps_1=0), got {len(eps)}")
        if eps[0] != 0.0:
            raise ValueError("the first qubit defines chi; its mismatch must be 0")
        if self.chi != 0 and any(abs(e) >= abs(self.chi) for e in eps):
            raise ValueError("mismatches must satisfy |eps_i| < chi")
        object.__setattr__(self, "epsilons", eps)

    @property
    def chis(self) -> np.ndarray:
        return self.chi + np.asarray(self.epsilons)


@dataclass(frozen=True)
class BasisStateShift:
    label: str
    parity: str
    shift: float


@dataclass(frozen=True)
class DrivePulse:
    """Multi-tone drive a0 * sum_i cos(omega_i t + phi_i) for 0 <= t <= t_d."""

    a0: float
    tones: tuple[tuple[float, float], ...]
    t_d: float

    def __post_init__(self):
        tones = tuple((float(w), float(p)) for w, p in self.tones)
        if not tones:
            raise ValueError("a drive needs at least one tone")
        if not self.t_d > 0:
            raise ValueError("drive duration must be positive")
        object.__setattr__(self, "tones", tones)

    def with_duration(self, t_d: float) -> "DrivePulse":
        return DrivePulse(self.a0, self.tones, t_d)


@dataclass
class DriveOutcome:
    amplitudes: dict[str, complex]
    parities: dict[str, str]
    shifts: dict[str, float] = field(default_factory=dict)


def basis_labels(n_qubits: int) -> list[str]:
    return ["".join(bits) for bits in itertools.product("01", repeat=n_qubits)]


def parity_of(label: str) -> str:
    return "odd" if label.count("1") % 2 else "even"


def band_shifts(register: QubitRegister) -> list[BasisStateShift]:
    """Total dispersive shift sum_n s_n chi_n for every computational basis state."""
    out = []
    for label in basis_labels(register.n_qubits):
        signs = np.array([1.0 if b == "1" else -1.0 for b in label])
        out.append(BasisStateShift(label, parity_of(label), float(signs @ register.chis)))
    return out


def parity_tones(register: QubitRegister) -> tuple[tuple[float, float], ...]:
    """Drive frequencies on every odd-parity spectral line of the mismatch-free register."""
    chi, wc = register.chi, register.omega_c
    if register.n_qubits == 1:
        return ((wc + chi, 0.0),)
    if register.n_qubits == 2:
        return ((wc, 0.0),)
    return ((wc + 2 * chi, 0.0), (wc - 2 * chi, 0.0))


def optimal_drive_time(register: QubitRegister) -> float:
    if not register.chi > 0:
        raise ValueError(f"chi must be positive, got {register.chi}")
    return math.pi / register.chi


def amplitude_for_occupation(occupation: float, t_d: float) -> float:
    """Drive amplitude a0 giving a resonant band mean photon number ``occupation``."""
    return 2.0 * math.sqrt(occupation) / t_d


def tone_detunings(shift: float, pulse: DrivePulse, omega_c: float = 0.0) -> np.ndarray:
    return np.array([omega_c + shift - w for w, _ in pulse.tones])


def _tone_integral(detuning: float, t: float) -> complex:
    """(exp(i*d*t) - 1) / d with its d -> 0 limit i*t."""
    x = detuning * t
    if abs(x) < RESONANT_THRESHOLD:
        return 1j * t * (1 + 0.5j * x)
    return complex(np.expm1(1j * x) / detuning)


def drive_amplitude_closed_form(
    shift: float | BasisStateShift, pulse: DrivePulse, omega_c: float = 0.0, t: float | None = None
) -> complex:
    """Coherent amplitude alpha(t_D) reached from vacuum under the multi-tone drive.

    alpha = -(a0/2) sum_i exp(-i phi_i) (exp(i Delta_i t) - 1) / Delta_i,
    with Delta_i = omega_c + shift - omega_Di; exact because the second Magnus
    term of a linearly driven oscillator is a global phase.
    """
    if isinstance(shift, BasisStateShift):
        shift = shift.shift
    t = pulse.t_d if t is None else t
    total = 0j
    for (w, phi), det in zip(pulse.tones, tone_detunings(shift, pulse, omega_c)):
        total += np.exp(-1j * phi) * _tone_integral(det, t)
    return complex(-0.5 * pulse.a0 * total)


def drive_outcome(register: QubitRegister, pulse: DrivePulse) -> DriveOutcome:
    shifts = band_shifts(register)
    return DriveOutcome(
        amplitudes={s.label: drive_amplitude_closed_form(s.shift, pulse, register.omega_c) for s in shifts},
        parities={s.label: s.parity for s in shifts},
        shifts={s.label: s.shift for s in shifts},
    )


def occupation_curves(register: QubitRegister, pulse: DrivePulse, t_grid: Sequence[float]) -> dict[float, np.ndarray]:
    """|alpha(t)|^2 per distinct band shift, with the drive duration swept over ``t_grid``."""
    t_grid = np.asarray(t_grid, dtype=float)
    bands = sorted({round(s.shift, 6): s.shift for s in band_shifts(register)}.values())
    curves = {}
    for shift in bands:
        alphas = np.array([drive_amplitude_closed_form(shift, pulse, register.omega_c, t) for t in t_grid])
        curves[shift] = np.abs(alphas) ** 2
    return curves


def drive_hamiltonian(pulse: DrivePulse, detunings: Sequence[float], dim: int):
    """Rotating-frame H'(t) = (a0/2) [a sum_i exp(-i Delta_i t + i phi_i) + h.c.]."""
    a = fock.destroy(dim)
    adag = a.conj().T
    dets = np.asarray(detunings, dtype=float)
    phis = np.array([p for _, p in pulse.tones])

    def hamiltonian(t: float) -> np.ndarray:
        if t > pulse.t_d:
            return np.zeros((dim, dim), complex)
        f = 0.5 * pulse.a0 * np.sum(np.exp(-1j * dets * t + 1j * phis))
        return f * a + np.conj(f) * adag

    return hamiltonian


def drive_unitary_numeric(
    shift: float | BasisStateShift,
    pulse: DrivePulse,
    dim: int | None = None,
    omega_c: float = 0.0,
    tol: float = 1e-10,
) -> complex:
    """<a> after integrating the Schrodinger equation from vacuum (independent oracle)."""
    if isinstance(shift, BasisStateShift):
        shift = shift.shift
    if dim is None:
        bound = 0.5 * abs(pulse.a0) * pulse.t_d * len(pulse.tones)
        dim = fock.recommended_dim(bound)
    dets = tone_detunings(shift, pulse, omega_c)
    ham = drive_hamiltonian(pulse, dets, dim)
    a = fock.destroy(dim)

    def rhs(t, psi):
        return -1j * (ham(t) @ psi)

    psi = ode.integrate(rhs, fock.basis(dim, 0), np.array([0.0, pulse.t_d]), tol=tol)[-1]
    return complex(np.vdot(psi, a @ psi))
