"""Adaptive Dormand-Prince 5(4) integrator for complex array-valued ODEs."""
from __future__ import annotations

from typing import Callable

import numpy as np

# Dormand & Prince (1980) tableau, FSAL form.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B_LOW = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B - _B_LOW


class StepSizeUnderflow(RuntimeError):
    """The adaptive step shrank below the resolvable limit."""


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    times: np.ndarray,
    *,
    tol: float = 1e-9,
    first_step: float | None = None,
    max_steps: int = 10_000_000,
    post_step: Callable[[np.ndarray], np.ndarray] | None = None,
) -> np.ndarray:
    """Integrate ``dy/dt = rhs(t, y)`` and return ``y`` at each entry of ``times``.

    The error test uses the max-norm with mixed tolerance ``tol * (1 + |y|)``.
    Steps are clipped to land exactly on every requested time. ``post_step``
    is applied to each accepted state (e.g. re-symmetrisation).
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-d grid")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")

    y = np.array(y0, dtype=complex)
    out = np.empty((times.size,) + y.shape, dtype=complex)
    out[0] = y
    if times.size == 1:
        return out

    t = float(times[0])
    span = float(times[-1] - times[0])
    h_min = 1e-14 * max(span, abs(t), np.finfo(float).tiny)
    h = first_step if first_step is not None else _initial_step(rhs, t, y, tol, span)
    k1 = rhs(t, y)
    steps = 0

    for idx in range(1, times.size):
        t_target = float(times[idx])
        while t < t_target:
            if steps >= max_steps:
                raise StepSizeUnderflow(f"exceeded {max_steps} steps at t={t:.6g}")
            last = t + h >= t_target - 1e-12 * span
            h_try = t_target - t if last else h
            ks = [k1]
            for s in range(1, 7):
                acc = y.copy()
                for j, a in enumerate(_A[s]):
                    if a != 0.0:
                        acc += (h_try * a) * ks[j]
                ks.append(rhs(t + _C[s] * h_try, acc))
            y_new = acc  # stage 7 argument equals the 5th-order solution (FSAL)
            err = ks[0] * _E[0]
            for j in range(2, 7):
                err = err + ks[j] * _E[j]
            err *= h_try
            scale = tol * (1.0 + np.maximum(np.abs(y), np.abs(y_new)))
            err_norm = float(np.max(np.abs(err) / scale))
            if not np.isfinite(err_norm):
                err_norm = np.inf
            if err_norm <= 1.0:
                t = t_target if last else t + h_try
                y = post_step(y_new) if post_step is not None else y_new
                k1 = ks[6] if post_step is None else rhs(t, y)
                steps += 1
                factor = 5.0 if err_norm == 0.0 else min(5.0, 0.9 * err_norm ** -0.2)
                if not last or h_try >= h:
                    h = h_try * factor
            else:
                h = h_try * max(0.2, 0.9 * err_norm**-0.2)
                if h < h_min:
                    raise StepSizeUnderflow(
                        f"step size {h:.3e} below {h_min:.3e} at t={t:.6g} (tol={tol:g})"
                    )
        out[idx] = y
    return out


def _initial_step(rhs, t, y, tol, span) -> float:
    f0 = rhs(t, y)
    d0 = float(np.max(np.abs(y))) or 1.0
    d1 = float(np.max(np.abs(f0)))
    if d1 == 0.0:
        return span / 100.0
    h = 0.01 * d0 / d1 * tol ** 0.2
    return min(h, span / 10.0)
