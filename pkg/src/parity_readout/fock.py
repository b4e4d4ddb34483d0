"""Truncated Fock-space operators and multipartite composition.

States and operators are plain numpy arrays. Composite spaces use
Kronecker ordering with the leftmost factor as the slowest-varying index,
so ``kron(A, B)[i*dB + j, k*dB + l] == A[i, k] * B[j, l]``.
"""
from __future__ import annotations

import math
import warnings
from functools import reduce
from typing import Sequence

import numpy as np
import scipy.linalg


class InvalidSpaceError(ValueError):
    """Raised for Hilbert spaces that cannot host the requested object."""


class TruncationWarning(UserWarning):
    """Emitted when a Fock truncation is too small for a coherent amplitude."""


def recommended_dim(amplitude: float) -> int:
    """Fock truncation that holds a coherent state of modulus ``amplitude``."""
    r = abs(amplitude)
    return int(math.ceil(r * r + 6.0 * r + 10.0))


def _check_dim(dim: int) -> None:
    if int(dim) != dim or dim < 2:
        raise InvalidSpaceError(f"Hilbert space dimension must be an integer >= 2, got {dim!r}")


def _warn_truncation(alpha: complex, dim: int) -> None:
    if recommended_dim(abs(alpha)) > dim:
        warnings.warn(
            f"dim={dim} is below the recommended truncation {recommended_dim(abs(alpha))} "
            f"for |alpha|={abs(alpha):.4g}",
            TruncationWarning,
            stacklevel=3,
        )


def ladder_operators(dim: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (a, a_dag, n) on a ``dim``-level truncated oscillator."""
    _check_dim(dim)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    adag = a.conj().T.copy()
    return a, adag, adag @ a


def destroy(dim: int) -> np.ndarray:
    return ladder_operators(dim)[0]


def number(dim: int) -> np.ndarray:
    _check_dim(dim)
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def basis(dim: int, n: int) -> np.ndarray:
    _check_dim(dim)
    if not 0 <= n < dim:
        raise InvalidSpaceError(f"level {n} outside a {dim}-level space")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def projector(dim: int, n: int) -> np.ndarray:
    v = basis(dim, n)
    return np.outer(v, v.conj())


def displacement_operator(alpha: complex, dim: int) -> np.ndarray:
    """D(alpha) = exp(alpha a_dag - conj(alpha) a) by dense matrix exponential.

    The result is exactly unitary on the truncated space; the hard edge of the
    truncation only distorts the top ~3|alpha| levels.
    """
    _check_dim(dim)
    _warn_truncation(alpha, dim)
    a, adag, _ = ladder_operators(dim)
    return scipy.linalg.expm(alpha * adag - np.conj(alpha) * a)


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Unnormalised Fock amplitudes exp(-|a|^2/2) a^n / sqrt(n!) for n < dim."""
    n = np.arange(dim)
    log_fact = np.array([math.lgamma(k + 1.0) for k in n])
    if alpha == 0:
        out = np.zeros(dim, dtype=complex)
        out[0] = 1.0
        return out
    log_mod = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * log_fact
    return np.exp(log_mod) * np.exp(1j * n * np.angle(alpha))


def coherent_state(alpha: complex, dim: int) -> np.ndarray:
    """Coherent state |alpha>, renormalised after truncation."""
    _check_dim(dim)
    _warn_truncation(alpha, dim)
    psi = coherent_amplitudes(alpha, dim)
    return psi / np.linalg.norm(psi)


def coherent_overlap(alpha: complex, beta: complex) -> complex:
    """<alpha|beta> for untruncated coherent states."""
    return complex(np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * abs(beta) ** 2 + np.conj(alpha) * beta))


def ket2dm(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of operators or vectors, leftmost factor slowest."""
    if len(ops) == 1 and isinstance(ops[0], (list, tuple)):
        ops = tuple(ops[0])
    if not ops:
        raise InvalidSpaceError("tensor() needs at least one factor")
    return reduce(np.kron, [np.asarray(o, dtype=complex) for o in ops])


def tensor_embed(ops: Sequence[np.ndarray]) -> np.ndarray:
    """Compose square operators on a product space."""
    for op in ops:
        op = np.asarray(op)
        if op.ndim != 2 or op.shape[0] != op.shape[1]:
            raise InvalidSpaceError(f"operator of shape {op.shape} is not square")
    return tensor(*ops)


def embed(op: np.ndarray, index: int, dims: Sequence[int]) -> np.ndarray:
    """Place ``op`` on factor ``index`` of a product space with identities elsewhere."""
    dims = list(dims)
    if np.shape(op) != (dims[index], dims[index]):
        raise InvalidSpaceError(f"operator shape {np.shape(op)} does not match factor dim {dims[index]}")
    factors = [np.eye(d, dtype=complex) for d in dims]
    factors[index] = op
    return tensor(*factors)


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int] | int) -> np.ndarray:
    """Reduced operator on the factors listed in ``keep`` (kept in their original order)."""
    dims = [int(d) for d in dims]
    rho = np.asarray(rho)
    total = math.prod(dims)
    if rho.shape != (total, total):
        raise InvalidSpaceError(f"rho of shape {rho.shape} does not match dims {dims}")
    if isinstance(keep, (int, np.integer)):
        keep = [int(keep)]
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise InvalidSpaceError(f"keep={keep} out of range for {len(dims)} factors")
    nsys = len(dims)
    t = rho.reshape(dims + dims)
    traced = [k for k in range(nsys) if k not in keep]
    # einsum labels: row indices 0..n-1, column indices n..2n-1, traced columns reuse row labels
    row = list(range(nsys))
    col = [k if k in traced else nsys + k for k in range(nsys)]
    out = [k for k in keep] + [nsys + k for k in keep]
    reduced = np.einsum(t, row + col, out)
    d_keep = math.prod(dims[k] for k in keep)
    return reduced.reshape(d_keep, d_keep)


def expect(op: np.ndarray, state: np.ndarray) -> complex:
    """<op> for a ket (1-d) or density matrix (2-d)."""
    state = np.asarray(state)
    if state.ndim == 1:
        return complex(np.vdot(state, op @ state))
    return complex(np.trace(op @ state))


def check_density_matrix(
    rho: np.ndarray,
    *,
    herm_tol: float = 1e-10,
    trace_tol: float = 1e-8,
    eig_tol: float = 1e-9,
) -> dict:
    """Measure density-matrix invariants; raise ValueError if any is violated."""
    rho = np.asarray(rho)
    herm = float(np.max(np.abs(rho - rho.conj().T))) if rho.size else 0.0
    trace_err = abs(complex(np.trace(rho)) - 1.0)
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    report = {"hermiticity": herm, "trace_error": trace_err, "min_eigenvalue": min_eig}
    if herm > herm_tol or trace_err > trace_tol or min_eig < -eig_tol:
        raise ValueError(f"density matrix invariants violated: {report}")
    return report
