"""NumPy reference implementation of the pointwise hot kernels.

Kept formula-for-formula identical to the compiled twin in ``_core.pyx``;
the parity test holds both to near machine agreement.
"""

import numpy as np


def aniso_2d(px, py, sigma, folds, quartic, grad_reg):
    """Anisotropy factor and its gradient-space derivative, 2-D.

    Returns ``(m, hx, hy, g2)`` where ``g2 = |grad phi|^2`` and ``(hx, hy)``
    is the derivative of ``m`` with respect to the gradient components.
    Below the ``grad_reg`` threshold the orientation is undefined and the
    kernel returns ``m = 1``, ``h = 0``.
    """
    g2 = px * px + py * py
    ok = g2 > grad_reg
    safe = np.where(ok, g2, 1.0)
    if quartic:
        px2 = px * px
        py2 = py * py
        quart = px2 * px2 + py2 * py2
        inv2 = 1.0 / (safe * safe)
        m = np.where(ok, (1.0 - 3.0 * sigma) + 4.0 * sigma * quart * inv2, 1.0)
        c = 16.0 * sigma * inv2 / safe
        hx = np.where(ok, c * px * (px2 * py2 - py2 * py2), 0.0)
        hy = np.where(ok, c * py * (px2 * py2 - px2 * px2), 0.0)
    else:
        theta = np.arctan2(py, px)
        m = np.where(ok, 1.0 + sigma * np.cos(folds * theta), 1.0)
        amp = sigma * folds * np.sin(folds * theta) / safe
        hx = np.where(ok, amp * py, 0.0)
        hy = np.where(ok, -amp * px, 0.0)
    return m, hx, hy, g2


def aniso_3d(px, py, pz, sigma, grad_reg):
    """Fourfold (quartic-form) anisotropy in 3-D; see :func:`aniso_2d`."""
    g2 = px * px + py * py + pz * pz
    ok = g2 > grad_reg
    safe = np.where(ok, g2, 1.0)
    px2 = px * px
    py2 = py * py
    pz2 = pz * pz
    quart = px2 * px2 + py2 * py2 + pz2 * pz2
    inv2 = 1.0 / (safe * safe)
    m = np.where(ok, (1.0 - 3.0 * sigma) + 4.0 * sigma * quart * inv2, 1.0)
    c = 16.0 * sigma * inv2 / safe
    hx = np.where(ok, c * px * (px2 * py2 + px2 * pz2 - py2 * py2 - pz2 * pz2), 0.0)
    hy = np.where(ok, c * py * (py2 * pz2 + px2 * py2 - px2 * px2 - pz2 * pz2), 0.0)
    hz = np.where(ok, c * pz * (px2 * pz2 + py2 * pz2 - px2 * px2 - py2 * py2), 0.0)
    return m, hx, hy, hz, g2


def double_well(phi, eps):
    """Double-well density ``(phi^2-1)^2 / (4 eps^2)`` and its derivative."""
    inv_eps2 = 1.0 / (eps * eps)
    w = phi * phi - 1.0
    big_f = 0.25 * inv_eps2 * (w * w)
    little_f = inv_eps2 * (phi * w)
    return big_f, little_f
