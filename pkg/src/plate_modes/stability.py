"""Torsional-stability verdicts, asymptotic energy bounds and the decay threshold.

"limsup as t -> infinity" is read as the supremum over a trailing window,
by default the last quarter of the simulated horizon.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .modal import energy_series, norms

TRAILING_FRACTION = 0.25
DEFAULT_POISSON = 0.2


class TorsionalDecay(enum.Enum):
    DECAYED = "Decayed"
    PERSISTENT = "Persistent"
    UNDETERMINED = "Undetermined"


@dataclass
class StabilityVerdict:
    torsional_decay: TorsionalDecay
    trailing_torsional_sup: float
    global_torsional_max: float
    local_instability_flag: bool
    peak_torsional_coord: float
    decay_rate_estimate: float = None
    diagnostic: str = ""


@dataclass
class BoundReport:
    bound_name: str
    theoretical_value: float
    observed_value: float
    satisfied: bool


def torsional_norm_pair(traj, sys):
    """``||u^T_t||_{L2} + ||u^T||_H`` at every sample."""
    nm = norms(sys, traj.h, traj.hdot)
    return np.sqrt(nm["T_Ut"]) + np.sqrt(nm["T_H2"])


def _trailing_mask(t, window):
    return t >= t[-1] - window


def _default_window(traj):
    return TRAILING_FRACTION * (traj.t[-1] - traj.t[0])


def classify_trajectory(traj, sys, window=None, tol=1e-2):
    """Classify the torsional behaviour of a trajectory.

    Decayed: trailing sup of the torsional norm pair is below ``tol`` and
    below 1% of its global max.  Persistent: trailing sup above 10% of the
    global max.  The local-instability flag marks a torsional coordinate
    that starts at rest with ``|h(0)| >= 0.01`` and later exceeds ten times
    its initial size, in a trajectory that decays.
    """
    horizon = traj.t[-1] - traj.t[0]
    window = _default_window(traj) if window is None else float(window)
    tmask = sys.torsional
    peak = float(np.max(np.abs(traj.h[:, tmask]))) if np.any(tmask) else 0.0

    if window <= 0 or horizon < 3.0 * window * (1 - 1e-12):
        return StabilityVerdict(TorsionalDecay.UNDETERMINED, math.nan, math.nan, False, peak,
                                diagnostic="trajectory too short: needs at least 3 windows")

    pair = torsional_norm_pair(traj, sys)
    gmax = float(np.max(pair))
    tsup = float(np.max(pair[_trailing_mask(traj.t, window)]))

    if gmax == 0.0:
        verdict = TorsionalDecay.DECAYED
        diagnostic = "torsional component identically zero"
    elif tsup < tol and tsup < 0.01 * gmax:
        verdict = TorsionalDecay.DECAYED
        diagnostic = f"trailing sup {tsup:.3g} below tol and 1% of max {gmax:.3g}"
    elif tsup > 0.1 * gmax:
        verdict = TorsionalDecay.PERSISTENT
        diagnostic = f"trailing sup {tsup:.3g} exceeds 10% of max {gmax:.3g}"
    else:
        verdict = TorsionalDecay.UNDETERMINED
        diagnostic = f"trailing sup {tsup:.3g} vs max {gmax:.3g}: inconclusive"

    flag = False
    if verdict is TorsionalDecay.DECAYED:
        for j in np.flatnonzero(tmask):
            h0, v0 = traj.h[0, j], traj.hdot[0, j]
            # 1e-12 slack only absorbs the rounding of 10 * 0.01
            if v0 == 0.0 and 10.0 * abs(h0) >= 0.1 * (1 - 1e-12):
                if np.any(np.abs(traj.h[:, j]) > 10.0 * abs(h0)):
                    flag = True

    rate = fit_decay_rate(traj, sys) if verdict is TorsionalDecay.DECAYED and gmax > 0 else None
    return StabilityVerdict(verdict, tsup, gmax, flag, peak, rate, diagnostic)


def fit_decay_rate(traj, sys, fraction=0.5):
    """Exponential rate ``eta`` of ``||u^T||_H^2 + ||u^T_t||^2`` over the trailing ``fraction``.

    Least-squares slope of the log of the squared norm pair; samples that
    underflowed to zero are dropped.  Returns ``None`` when the fit is
    rejected: fewer than three usable samples, or less than one e-fold of
    fitted decay across the window (no clear exponential decay).
    """
    nm = norms(sys, traj.h, traj.hdot)
    q = nm["T_Ut"] + nm["T_H2"]
    t0 = traj.t[-1] - fraction * (traj.t[-1] - traj.t[0])
    sel = (traj.t >= t0) & (q > 1e-290)
    if np.count_nonzero(sel) < 3:
        return None
    t, y = traj.t[sel], np.log(q[sel])
    slope = np.polyfit(t, y, 1)[0]
    eta = -float(slope)
    if eta * (t[-1] - t[0]) < 1.0:
        return None
    return eta


# -- asymptotic bounds --------------------------------------------------------

def energy_parameter(delta, lambda_1, P):
    """``(alpha, E_bound_factor)`` for the energy bound.

    ``E_alpha(inf) <= factor * g_inf**2`` with ``alpha = delta/2`` and
    factor ``2/delta**2`` when ``delta**2 <= 4(lambda_1 - P)``; otherwise
    ``alpha = delta/2 - sqrt(delta**2 - 4(lambda_1 - P))/2`` and factor
    ``1/(2(lambda_1 - P))``.
    """
    c = lambda_1 - P
    if c <= 0:
        raise DomainError("need P < lambda_1")
    if delta <= 0:
        raise DomainError("need delta > 0")
    if delta * delta <= 4.0 * c:
        return 0.5 * delta, 2.0 / (delta * delta), "energy_half_delta"
    alpha = 0.5 * delta - 0.5 * math.sqrt(delta * delta - 4.0 * c)
    return alpha, 1.0 / (2.0 * c), "energy_mu"


def l2_bound(E, lambda_1, P, S):
    """Asymptotic bound ``Psi`` on ``||u||^2`` given the energy bound ``E``."""
    c = lambda_1 - P
    E = max(E, 0.0)
    return 4.0 * E / (math.sqrt(c * c + 4.0 * S * E) + c)


def ux_bound(E, alpha, psi, lambda_1, P, S):
    c = lambda_1 - P
    E = max(E, 0.0)
    num = 4.0 * E + 2.0 * alpha * alpha * psi
    return num / (math.sqrt(c * c + 2.0 * S * (2.0 * E + alpha * alpha * psi)) + c)


def ut_bound(E, alpha, psi, lambda_1, P, S, lam=1.0):
    """Bound on ``||u_t||^2``; ``lam > 0`` is the free Young-inequality weight."""
    if lam <= 0:
        raise DomainError("Young weight must be positive")
    c = lambda_1 - P
    slope = (lam + 1.0) * alpha * alpha - c
    s_star = slope / S if S > 0 else (psi if slope > 0 else 0.0)
    s_star = min(max(s_star, 0.0), psi)
    best = slope * s_star - 0.5 * S * s_star * s_star
    return (1.0 + lam) / lam * (2.0 * max(E, 0.0) + best)


def h2_bound(E, alpha, psi, lambda_1, P):
    return 2.0 * lambda_1 / (lambda_1 - P) * (max(E, 0.0) + 0.5 * alpha * alpha * psi)


def energy_bound_report(traj, sys, g_inf, *, lambda_1=None, window=None, young_weight=1.0,
                        tol=1e-9):
    """Compare asymptotic bounds against trailing-window sups of the trajectory.

    ``lambda_1`` defaults to :attr:`ModalSystem.coercivity`, the constant for
    which both embedding inequalities used by the bounds hold on the
    retained modes.
    """
    lam1 = sys.coercivity if lambda_1 is None else float(lambda_1)
    P, S = sys.P, sys.S
    alpha, factor, ename = energy_parameter(sys.delta, lam1, P)
    E = factor * g_inf * g_inf
    psi = l2_bound(E, lam1, P, S)

    window = _default_window(traj) if window is None else float(window)
    sel = _trailing_mask(traj.t, window)
    h, v = traj.h[sel], traj.hdot[sel]
    observed_E = float(np.max(energy_series(sys, h, v, alpha).total))
    nm = norms(sys, h, v)

    rows = [
        (ename, E, observed_E),
        ("l2", psi, float(np.max(nm["L2"]))),
        ("ux", ux_bound(E, alpha, psi, lam1, P, S), float(np.max(nm["Ux"]))),
        ("ut", ut_bound(E, alpha, psi, lam1, P, S, young_weight), float(np.max(nm["Ut"]))),
        ("h2", h2_bound(E, alpha, psi, lam1, P), float(np.max(nm["H2"]))),
    ]
    return [BoundReport(name, theo, obs, bool(obs <= theo * (1.0 + tol) + 1e-300))
            for name, theo, obs in rows]


# -- decay threshold ----------------------------------------------------------

def _threshold_curve(delta, P, nu_12, gamma_const, n_grid):
    etas = 0.5 * delta * np.geomspace(1e-6, 1.0, n_grid + 1)[:-1]
    K = nu_12 - P - etas * (delta - etas)
    ok = K > 0
    etas, K = etas[ok], K[ok]
    bracket = 1.0 + np.maximum(4.0 * K / (delta - 2.0 * etas) ** 2, 1.0)
    return etas, np.sqrt(gamma_const * K * K / nu_12 / bracket)


def torsion_decay_threshold(delta, P, S, nu_12, gamma_const=1.0 - DEFAULT_POISSON ** 2,
                            n_grid=128, return_eta=False):
    """Certified bound ``chi`` on ``limsup ||u_x||^2`` that forces torsional decay.

    For each rate ``eta`` on a geometric grid in ``(0, delta/2)`` with
    ``K = nu_12 - P - eta (delta - eta) > 0``, a stretching term
    ``a = S ||u_x||^2`` with ``limsup a**2 < gamma K**2 / nu_12 / (1 + max(4K/(delta-2 eta)**2, 1))``
    makes the torsional energy vanish like ``exp(-eta t)``.  The largest
    such bound over the grid is returned, divided by ``S``.
    """
    if delta <= 0:
        raise DomainError("need delta > 0")
    if S <= 0:
        raise DomainError("need S > 0")
    if not (0.0 <= P < nu_12):
        raise DomainError(f"need 0 <= P < nu_12 = {nu_12!r}")
    etas, a_max = _threshold_curve(delta, P, nu_12, gamma_const, n_grid)
    if a_max.size == 0:
        return (0.0, None) if return_eta else 0.0
    j = int(np.argmax(a_max))
    chi = float(a_max[j]) / S
    return (chi, float(etas[j])) if return_eta else chi
