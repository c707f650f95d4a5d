"""Central finite differences for checking hand-written gradients."""

from __future__ import annotations

import numpy as np


def relative_error(analytic, numeric):
    """``||a - n|| / (||a|| + ||n||)``, zero when both vanish."""
    a, n = np.ravel(analytic), np.ravel(numeric)
    denom = np.linalg.norm(a) + np.linalg.norm(n)
    if denom < 1e-12:
        return 0.0
    return float(np.linalg.norm(a - n) / denom)


def numerical_gradient(f, x, h=1e-5):
    """Gradient of scalar ``f()`` w.r.t. array ``x``, perturbing ``x`` in place."""
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        old = x[idx]
        x[idx] = old + h
        fp = f()
        x[idx] = old - h
        fm = f()
        x[idx] = old
        grad[idx] = (fp - fm) / (2.0 * h)
    return grad


def numerical_param_gradients(f, params, h=1e-5):
    return {name: numerical_gradient(f, p, h) for name, p in params.items()}


def joint_relative_error(analytic, numeric):
    """Relative error over all named arrays concatenated."""
    keys = sorted(analytic)
    return relative_error(
        np.concatenate([np.ravel(analytic[k]) for k in keys]),
        np.concatenate([np.ravel(numeric[k]) for k in keys]),
    )
