"""Jacobi elliptic functions and the complete elliptic integral of the first kind.

Everything here takes the *modulus* ``k`` (not the parameter ``m = k**2``).
The implementation uses the arithmetic-geometric mean and the descending
Landen recurrence, so no external special-function library is needed.
"""

import math

import numpy as np

from .errors import DomainError

_SERIES_CUTOFF = 1e-8
_AGM_TOL = 1e-16


def _check_modulus(k):
    k = float(k)
    if not (0.0 <= k < 1.0):
        raise DomainError(f"elliptic modulus must satisfy 0 <= k < 1, got {k!r}")
    return k


def agm(a, b):
    """Arithmetic-geometric mean of two positive numbers."""
    a, b = float(a), float(b)
    for _ in range(64):
        if abs(a - b) <= _AGM_TOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_K(k):
    """Complete elliptic integral of the first kind, K(k) = pi / (2 agm(1, k')).

    Raises
    ------
    DomainError
        If ``k`` is outside ``[0, 1)``.
    """
    k = _check_modulus(k)
    return math.pi / (2.0 * agm(1.0, math.sqrt((1.0 - k) * (1.0 + k))))


def period_tau(b, k):
    """Period ``4 K(k) / b`` of ``cn(b t, k)`` (and of the sn*dn drive)."""
    if b <= 0:
        raise DomainError(f"frequency scale b must be positive, got {b!r}")
    return 4.0 * complete_K(k) / b


def _landen_ladder(k):
    a = [1.0]
    c = [k]
    b = math.sqrt((1.0 - k) * (1.0 + k))
    while abs(c[-1]) > _AGM_TOL:
        an, bn = a[-1], b
        a.append(0.5 * (an + bn))
        c.append(0.5 * (an - bn))
        b = math.sqrt(an * bn)
        if len(a) > 64:
            break
    return a, c


def jacobi(u, k):
    """Return ``(sn, cn, dn)`` evaluated at ``u`` for modulus ``k``.

    ``u`` may be a scalar or an array; the outputs have the same shape.
    The argument is first reduced modulo the real period ``4K`` so that
    long time series keep full accuracy.
    """
    k = _check_modulus(k)
    u = np.asarray(u, dtype=float)
    if k < _SERIES_CUTOFF:
        m = k * k
        s, c = np.sin(u), np.cos(u)
        corr = 0.25 * m * (u - s * c)
        sn = s - corr * c
        cn = c + corr * s
        dn = 1.0 - 0.5 * m * s * s
        return sn, cn, dn

    quarter = complete_K(k)
    u = u - 4.0 * quarter * np.round(u / (4.0 * quarter))

    a, c = _landen_ladder(k)
    n = len(a) - 1
    phi = (2.0 ** n) * a[n] * u
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c[j] / a[j] * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    # dn >= k' > 0 on the real line, so the positive root is the right branch
    dn = np.sqrt(1.0 - k * k * sn * sn)
    return sn, cn, dn


def drive_parameters(mu, S, m, A, delta):
    """Frequency scale ``b`` and modulus ``k`` of the exact cn-wave drive.

    For a longitudinal mode with eigenvalue ``mu`` and x-wavenumber ``m``,
    the Duffing mode equation with stretch ``S`` is solved exactly by
    ``-(A/delta) cn(b t, k)`` when forced by ``A b sn(bt,k) dn(bt,k)``.
    """
    if delta <= 0:
        raise DomainError("damping delta must be positive for the cn-wave drive")
    if A <= 0:
        raise DomainError("drive amplitude A must be positive")
    x = S * m ** 4 * A * A
    b = math.sqrt(mu + x / (delta * delta))
    k = math.sqrt(x / (2.0 * (mu * delta * delta + x)))
    return b, k


def sn_dn_drive(A, b, k, t):
    """The forcing waveform ``A b sn(bt,k) dn(bt,k)``."""
    sn, _, dn = jacobi(b * np.asarray(t, dtype=float), k)
    return A * b * sn * dn


def exact_cn_solution(A, delta, b, k, t):
    """Modal coefficient ``-(A/delta) cn(bt, k)`` of the exact periodic solution."""
    _, cn, _ = jacobi(b * np.asarray(t, dtype=float), k)
    return -(A / delta) * cn
