"""Driven cavity with full Jaynes-Cummings qubit coupling.

Space ordering is qubit_1 (x) ... (x) qubit_N (x) cavity; qubit level 1 is
the excited state and matches bit value 1 of a basis label. With
omega_C > omega_Q and chi = g^2 / (omega_C - omega_Q) > 0 an excited qubit
pulls the cavity down by chi, so a JC label ``b`` sits on the dispersive band
of the complementary label in ``protocol`` conventions.

Evolution runs in the interaction picture of the undriven JC Hamiltonian
(dressed basis). Each step exponentiates the exact time integral of the
drive there, which is exact for a linear oscillator and accurate at
second order in the step otherwise, regardless of the qubit-cavity detuning.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from . import fock
from .jpm import JpmParams, contrast_curve, detection_probability
from .protocol import DrivePulse, QubitRegister, basis_labels, parity_of


@dataclass(frozen=True)
class JcModel:
    n_qubits: int
    omega_c: float
    omega_q: tuple[float, ...]
    g: tuple[float, ...]
    cavity_dim: int

    @property
    def chis(self) -> np.ndarray:
        return np.asarray(self.g) ** 2 / (self.omega_c - np.asarray(self.omega_q))

    @property
    def dims(self) -> list[int]:
        return [2] * self.n_qubits + [self.cavity_dim]

    @property
    def detuning(self) -> float:
        return self.omega_c - self.omega_q[0]


@dataclass
class JcDriveResult:
    times: np.ndarray
    occupations: dict[str, np.ndarray]
    cavity_states: dict[str, np.ndarray]
    norms: dict[str, np.ndarray] = field(default_factory=dict)


def build_jc_model(register: QubitRegister, detuning: float, cavity_dim: int = 40) -> JcModel:
    """JC model whose dispersive limit reproduces ``register``.

    ``detuning`` is omega_C - omega_Q (rad/s), shared by all qubits; mismatches
    enter through the couplings g_k = sqrt(chi_k * detuning).
    """
    if detuning == 0:
        raise ValueError("cavity-qubit detuning must be non-zero")
    chis = register.chis
    if np.any(chis * detuning <= 0):
        raise ValueError("chi and detuning must share a sign (g^2 = chi * detuning > 0)")
    g = tuple(float(math.sqrt(c * detuning)) for c in chis)
    wq = tuple(float(register.omega_c - detuning) for _ in chis)
    return JcModel(register.n_qubits, float(register.omega_c), wq, g, int(cavity_dim))


def dispersive_shift(model: JcModel, label: str) -> float:
    """Cavity pull of basis state ``label`` in the dispersive limit."""
    signs = np.array([-1.0 if b == "1" else 1.0 for b in label])
    return float(signs @ model.chis)


def protocol_label(label: str) -> str:
    """The ``protocol`` label carrying the same dispersive band as JC ``label``."""
    return "".join("0" if b == "1" else "1" for b in label)


def _operators(model: JcModel):
    dims = model.dims
    n = model.n_qubits
    lower = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
    a = fock.embed(fock.destroy(model.cavity_dim), n, dims)
    sm = [fock.embed(lower, k, dims) for k in range(n)]
    return a, sm


def hamiltonian(model: JcModel) -> np.ndarray:
    """Undriven JC Hamiltonian in the frame rotating at omega_C for all excitations."""
    a, sm = _operators(model)
    h = np.zeros_like(a)
    for k in range(model.n_qubits):
        sp = sm[k].conj().T
        h += (model.omega_q[k] - model.omega_c) * (sp @ sm[k])
        h += model.g[k] * (sp @ a + sm[k] @ a.conj().T)
    return h


def excitation_number(model: JcModel) -> np.ndarray:
    a, sm = _operators(model)
    return a.conj().T @ a + sum(s.conj().T @ s for s in sm)


def basis_ket(model: JcModel, label: str) -> np.ndarray:
    vecs = [fock.basis(2, int(b)) for b in label] + [fock.basis(model.cavity_dim, 0)]
    return fock.tensor(*vecs)


def _expm_apply(omega: np.ndarray, y: np.ndarray, tol: float = 1e-16) -> np.ndarray:
    """exp(omega) @ y by Taylor series with scaling so each factor has norm <= 1/2."""
    norm = float(np.max(np.sum(np.abs(omega), axis=0))) if omega.size else 0.0
    s = max(1, int(math.ceil(norm / 0.5)))
    op = omega / s
    for _ in range(s):
        term = y
        acc = y.copy()
        for k in range(1, 40):
            term = (op @ term) / k
            acc = acc + term
            if np.max(np.abs(term)) <= tol * max(1.0, np.max(np.abs(acc))):
                break
        y = acc
    return y


def _drive_terms(pulse: DrivePulse, omega_c: float):
    """Per-tone (detuning from omega_C, phase) pairs."""
    return [(omega_c - w, phi) for w, phi in pulse.tones]


def jc_drive_evolution(
    model: JcModel,
    pulse: DrivePulse,
    labels: Sequence[str] | str | None = None,
    step: float | None = None,
    t_end: float | None = None,
) -> JcDriveResult:
    """Drive the cavity from |label>|0> and record the photon number on a uniform grid.

    The drive stays on for the whole run, so ``occupations[label][i]`` is the
    cavity occupation right after a pulse of length ``times[i]``. Reduced cavity
    states are stored at the end of the run (``t_end``, default the pulse length).
    """
    if isinstance(labels, str):
        labels = [labels]
    labels = list(labels) if labels is not None else basis_labels(model.n_qubits)
    t_end = pulse.t_d if t_end is None else t_end
    if step is None:
        step = min(0.25e-9, t_end / 100)
    n_steps = max(1, int(math.ceil(t_end / step - 1e-9)))
    h = t_end / n_steps
    times = np.linspace(0.0, t_end, n_steps + 1)

    energies, vecs = scipy.linalg.eigh(hamiltonian(model))
    a, _ = _operators(model)
    n_op = a.conj().T @ a
    a_dressed = vecs.conj().T @ a @ vecs

    tones = _drive_terms(pulse, model.omega_c)
    weights = []
    for det, _ in tones:
        w = energies[:, None] - energies[None, :] - det
        x = w * h
        small = np.abs(x) < 1e-8
        k_int = np.where(small, h * (1 + 0.5j * x), np.expm1(1j * np.where(small, 1.0, x)) / np.where(small, 1.0, 1j * w))
        weights.append(a_dressed * k_int)

    psi0 = np.stack([basis_ket(model, lab) for lab in labels], axis=1)
    y = vecs.conj().T @ psi0
    occ = np.empty((len(times), len(labels)))
    norms = np.empty((len(times), len(labels)))

    def observe(i, t, y):
        psi = vecs @ (np.exp(-1j * energies * t)[:, None] * y)
        occ[i] = np.real(np.einsum("ij,ij->j", psi.conj(), n_op @ psi))
        norms[i] = np.linalg.norm(psi, axis=0)
        return psi

    psi = observe(0, 0.0, y)
    half_a0 = 0.5 * pulse.a0
    for i in range(n_steps):
        t = times[i]
        rot = np.exp(1j * energies * t)
        m = np.zeros_like(a_dressed)
        for (det, phi), wk in zip(tones, weights):
            m += np.exp(1j * (phi - det * t)) * wk
        m = rot[:, None] * m * rot.conj()[None, :]
        gen = -1j * half_a0 * (m + m.conj().T)
        y = _expm_apply(gen, y)
        psi = observe(i + 1, times[i + 1], y)

    dims = model.dims
    n = model.n_qubits
    cavity_states = {}
    for j, lab in enumerate(labels):
        rho = fock.ket2dm(psi[:, j])
        cavity_states[lab] = fock.partial_trace(rho, dims, keep=n)
    return JcDriveResult(
        times=times,
        occupations={lab: occ[:, j] for j, lab in enumerate(labels)},
        cavity_states=cavity_states,
        norms={lab: norms[:, j] for j, lab in enumerate(labels)},
    )


def jc_contrast(
    model: JcModel,
    pulse: DrivePulse,
    params: JpmParams,
    t_grid: Sequence[float],
    t_window: float | None = 40e-9,
    drive: JcDriveResult | None = None,
    tol: float = 1e-10,
) -> dict:
    """Worst-case parity contrast after a JC drive stage.

    The even state with the largest residual photon number is the dark input
    and the odd state with the smallest occupation the bright input; each is
    measured at the detuning of its own dispersive band.
    """
    labels = basis_labels(model.n_qubits)
    if drive is None:
        drive = jc_drive_evolution(model, pulse, labels)
    final = {lab: float(drive.occupations[lab][-1]) for lab in labels}
    even = [lab for lab in labels if parity_of(lab) == "even"]
    odd = [lab for lab in labels if parity_of(lab) == "odd"]
    dark_label = max(even, key=lambda lab: final[lab])
    bright_label = min(odd, key=lambda lab: final[lab])
    t_grid = np.asarray(t_grid, dtype=float)
    bright = detection_probability(
        drive.cavity_states[bright_label], dispersive_shift(model, bright_label), params, t_grid, tol=tol
    )
    dark = detection_probability(
        drive.cavity_states[dark_label], dispersive_shift(model, dark_label), params, t_grid, tol=tol, label="dark"
    )
    contrast = contrast_curve(bright, dark)
    mask = np.ones_like(t_grid, dtype=bool) if t_window is None else t_grid <= t_window * (1 + 1e-12)
    idx = int(np.argmax(np.where(mask, contrast.p_click, -np.inf)))
    return {
        "max_contrast": float(contrast.p_click[idx]),
        "t_max": float(t_grid[idx]),
        "bright": bright,
        "dark": dark,
        "contrast": contrast,
        "bright_label": bright_label,
        "dark_label": dark_label,
        "occupations": final,
    }
