"""Dense Lindblad master-equation evolution with invariant monitoring."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
import scipy.linalg

from . import ode
from .ode import StepSizeUnderflow  # noqa: F401  (re-exported)

Hamiltonian = Union[np.ndarray, Callable[[float], np.ndarray]]


class InvariantError(RuntimeError):
    """A stored density matrix breached trace, Hermiticity or positivity bounds."""


@dataclass
class LindbladModel:
    """H (constant matrix or callable ``H(t)``) plus collapse operators."""

    hamiltonian: Hamiltonian
    collapse_ops: Sequence[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        self.collapse_ops = [np.asarray(c, dtype=complex) for c in self.collapse_ops]
        h0 = self.hamiltonian_at(0.0)
        d = h0.shape[0]
        if h0.shape != (d, d):
            raise ValueError(f"Hamiltonian must be square, got {h0.shape}")
        for c in self.collapse_ops:
            if c.shape != (d, d):
                raise ValueError(f"collapse operator shape {c.shape} != Hamiltonian shape {(d, d)}")
        herm = float(np.max(np.abs(h0 - h0.conj().T))) if d else 0.0
        if herm > 1e-10 * max(1.0, float(np.max(np.abs(h0)))):
            raise ValueError(f"Hamiltonian is not Hermitian (deviation {herm:.3e})")
        self._ldag_l = sum((c.conj().T @ c for c in self.collapse_ops), np.zeros((d, d), complex))

    @property
    def dim(self) -> int:
        return self.hamiltonian_at(0.0).shape[0]

    @property
    def time_dependent(self) -> bool:
        return callable(self.hamiltonian)

    def hamiltonian_at(self, t: float) -> np.ndarray:
        if callable(self.hamiltonian):
            return np.asarray(self.hamiltonian(t), dtype=complex)
        return np.asarray(self.hamiltonian, dtype=complex)

    def rhs(self, t: float, rho: np.ndarray) -> np.ndarray:
        """Right-hand side of the master equation."""
        # -i[H, rho] - 1/2 {L^dag L, rho} through the non-Hermitian effective Hamiltonian
        heff = self.hamiltonian_at(t) - 0.5j * self._ldag_l
        out = -1j * (heff @ rho) + 1j * (rho @ heff.conj().T)
        for c in self.collapse_ops:
            out += c @ rho @ c.conj().T
        return out

    def liouvillian(self, t: float = 0.0) -> np.ndarray:
        """Column-stacked superoperator: vec(drho/dt) = L @ vec(rho)."""
        d = self.dim
        eye = np.eye(d)
        heff = self.hamiltonian_at(t) - 0.5j * self._ldag_l
        sup = -1j * (np.kron(eye, heff) - np.kron(heff.conj(), eye))
        for c in self.collapse_ops:
            sup += np.kron(c.conj(), c)
        return sup


@dataclass
class EvolutionResult:
    times: np.ndarray
    states: np.ndarray  # shape (n_times, d, d)
    diagnostics: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)


def _symmetrize(rho: np.ndarray) -> np.ndarray:
    return 0.5 * (rho + rho.conj().T)


def evolve(
    model: LindbladModel,
    rho0: np.ndarray,
    times: Sequence[float],
    tol: float = 1e-10,
    *,
    check: bool = True,
) -> EvolutionResult:
    """Integrate the master equation and return the state at each time in ``times``.

    ``times`` must start at the initial time of ``rho0`` and increase strictly.
    Hermiticity is restored after every accepted step; trace and positivity
    are only monitored, at the stored times.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    d = model.dim
    if rho0.shape != (d, d):
        raise ValueError(f"rho0 shape {rho0.shape} does not match model dimension {d}")
    times = np.asarray(times, dtype=float)

    def rhs(t, rho):
        return model.rhs(t, rho)

    states = ode.integrate(rhs, rho0, times, tol=tol, post_step=_symmetrize)
    result = EvolutionResult(times=times, states=states)
    result.diagnostics = invariant_report(result)
    if check:
        assert_invariants(result)
    return result


def invariant_report(result: EvolutionResult) -> dict:
    traces = np.real(np.einsum("tii->t", result.states))
    herm = np.max(np.abs(result.states - np.conj(np.transpose(result.states, (0, 2, 1)))), axis=(1, 2))
    min_eigs = np.array([np.min(np.linalg.eigvalsh(_symmetrize(r))) for r in result.states])
    return {
        "trace_error": np.abs(traces - np.real(np.trace(result.states[0]))),
        "hermiticity": herm,
        "min_eigenvalue": min_eigs,
    }


def assert_invariants(
    result: EvolutionResult,
    *,
    trace_tol: float = 1e-8,
    herm_tol: float = 1e-10,
    eig_tol: float = 1e-9,
) -> None:
    rep = result.diagnostics or invariant_report(result)
    checks = [
        ("trace", rep["trace_error"], lambda v: v > trace_tol),
        ("hermiticity", rep["hermiticity"], lambda v: v > herm_tol),
        ("positivity", rep["min_eigenvalue"], lambda v: v < -eig_tol),
    ]
    for name, series, bad in checks:
        mask = bad(series)
        if np.any(mask):
            worst = int(np.argmax(series) if name != "positivity" else np.argmin(series))
            raise InvariantError(
                f"{name} invariant breached; worst value {series[worst]:.3e} at t={result.times[worst]:.6g}"
            )


def expectation_series(result: EvolutionResult, observable: np.ndarray, *, hermitian: bool | None = None):
    """Tr(O rho(t)) at every stored time; real-valued when O is Hermitian."""
    op = np.asarray(observable, dtype=complex)
    d = result.states.shape[1]
    if op.shape != (d, d):
        raise ValueError(f"observable shape {op.shape} does not match state dimension {d}")
    values = np.einsum("ij,tji->t", op, result.states)
    if hermitian is None:
        hermitian = bool(np.allclose(op, op.conj().T, atol=1e-12))
    if hermitian:
        resid = float(np.max(np.abs(values.imag))) if values.size else 0.0
        if resid > 1e-8 * max(1.0, float(np.max(np.abs(op)))):
            raise InvariantError(f"imaginary residue {resid:.3e} for Hermitian observable")
        return values.real
    return values


def exact_unitary_evolution(hamiltonian: np.ndarray, rho0: np.ndarray, times: Sequence[float]) -> np.ndarray:
    """e^{-iHt} rho0 e^{iHt} by eigendecomposition; reference for closed systems."""
    w, v = scipy.linalg.eigh(hamiltonian)
    rho_e = v.conj().T @ rho0 @ v
    out = []
    for t in times:
        ph = np.exp(-1j * w * t)
        out.append(v @ (ph[:, None] * rho_e * ph.conj()[None, :]) @ v.conj().T)
    return np.array(out)


def steady_state(model: LindbladModel) -> np.ndarray:
    """Null vector of the Liouvillian, normalised to unit trace."""
    sup = model.liouvillian()
    _, s, vh = np.linalg.svd(sup)
    d = model.dim
    rho = vh[-1].conj().reshape(d, d, order="F")
    rho = _symmetrize(rho / np.trace(rho))
    return rho
