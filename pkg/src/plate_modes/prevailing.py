"""Linear resonance analysis: which longitudinal mode prevails at a given frequency.

Each symmetric longitudinal mode responds to a uniform load ``W**2 sin(wt)``
like a damped linear oscillator; its amplitude weighted by the mode's sup
norm decides the prevailing mode ``k_p(w)``.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, OverdampedError
from .spectrum import PlateGeometry, solve_mu, sup_norm_of, tabulated_sup_norm

DEFAULT_DELTA = 0.58
SCAN_STEP = 0.01
BISECT_TOL = 1e-6


@dataclass(frozen=True)
class LinearModeParams:
    lambda_k: float
    m: int
    gamma_k: float
    sup_norm: float
    P: float = 0.0
    delta: float = DEFAULT_DELTA
    label: int = None

    def __post_init__(self):
        if self.lambda_k <= 0 or self.m < 1 or self.sup_norm <= 0 or self.gamma_k < 0:
            raise DomainError("need lambda_k > 0, m >= 1, gamma_k >= 0, sup_norm > 0")
        if self.P < 0 or self.delta <= 0:
            raise DomainError("need P >= 0 and delta > 0")
        if self.stiffness <= 0:
            raise DomainError(f"need lambda_k - P m^2 > 0, got {self.stiffness!r}")
        if self.label is None:
            object.__setattr__(self, "label", int(self.m))

    @property
    def stiffness(self):
        return self.lambda_k - self.P * self.m * self.m

    @property
    def underdamped(self):
        return 4.0 * self.stiffness > self.delta * self.delta


def _denominator(p, omega):
    kappa = p.stiffness
    return (kappa - omega * omega) ** 2 + (p.delta * omega) ** 2


def linear_response(params, W, omega, t, *, numeric_fallback=False):
    """Modal coefficient ``S_k(t)`` of the linear problem started from rest.

    Closed form for the underdamped oscillator.  When ``4(lambda_k - P m^2) <= delta**2``
    an :class:`OverdampedError` is raised unless ``numeric_fallback`` is set,
    in which case the ODE is integrated numerically.
    """
    p = params
    t = np.asarray(t, dtype=float)
    if not p.underdamped:
        if not numeric_fallback:
            raise OverdampedError("overdamped mode: closed form does not apply")
        return linear_response_numeric(p, W, omega, t)
    amp = W * W * p.gamma_k / _denominator(p, omega)
    kappa, d = p.stiffness, p.delta
    big = 0.5 * math.sqrt(4.0 * kappa - d * d)
    c1 = amp * d * omega
    c2 = amp * (0.5 * d * d * omega - (kappa - omega * omega) * omega) / big
    steady = amp * ((kappa - omega * omega) * np.sin(omega * t) - d * omega * np.cos(omega * t))
    transient = np.exp(-0.5 * d * t) * (c1 * np.cos(big * t) + c2 * np.sin(big * t))
    return steady + transient


def linear_response_numeric(params, W, omega, t):
    """``S_k(t)`` by numerical integration; valid in every damping regime."""
    p = params
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise DomainError("times must be nonnegative")
    g = W * W * p.gamma_k
    out = np.zeros_like(t)
    pos = t > 0
    if np.any(pos):
        order = np.argsort(t[pos])
        ts = t[pos][order]
        sol = solve_ivp(lambda s, y: [y[1], g * math.sin(omega * s) - p.delta * y[1] - p.stiffness * y[0]],
                        (0.0, float(ts[-1])), [0.0, 0.0], method="DOP853", t_eval=ts,
                        rtol=1e-11, atol=1e-14)
        vals = np.empty_like(ts)
        vals[order] = sol.y[0]
        out[pos] = vals
    return out


def amplitude(params, omega):
    """Sup-norm weighted resonance amplitude ``A_k(w)``."""
    p = params
    return p.gamma_k * p.sup_norm / np.sqrt(_denominator(p, np.asarray(omega, dtype=float)))


def peak_frequency(params):
    """Frequency maximizing :func:`amplitude`, or 0 when the curve is monotone."""
    p = params
    w2 = p.stiffness - 0.5 * p.delta * p.delta
    return math.sqrt(w2) if w2 > 0 else 0.0


def _with_loading(table, P, delta):
    if not table:
        raise DomainError("mode table is empty")
    return [replace(p, P=float(P), delta=float(delta)) for p in table]


def _amplitudes(table, omega):
    return np.array([amplitude(p, omega) for p in table])


def prevailing_mode(omega, P, delta, mode_table):
    """Label of the mode with the largest amplitude at ``omega`` (ties go to the first)."""
    table = _with_loading(mode_table, P, delta)
    return table[int(np.argmax(_amplitudes(table, omega)))].label


def _winner_index(table, omega):
    return int(np.argmax(_amplitudes(table, omega)))


def _scan(table, omega_max, step):
    grid = np.arange(step, omega_max + 0.5 * step, step)
    amps = np.array([amplitude(p, grid) for p in table])
    return grid, np.argmax(amps, axis=0)


def _refine(table, lo, hi, j_lo, tol):
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _winner_index(table, mid) == j_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def prevailing_intervals(P, delta, mode_table, omega_max, step=SCAN_STEP, tol=BISECT_TOL):
    """``[(omega_lo, omega_hi, label), ...]`` partitioning ``(0, omega_max]``."""
    if omega_max <= 0:
        raise DomainError("omega_max must be positive")
    table = _with_loading(mode_table, P, delta)
    grid, winners = _scan(table, omega_max, step)
    intervals = []
    lo = 0.0
    current = int(_winner_index(table, 0.5 * min(step, omega_max)))
    for i in range(len(grid)):
        w = int(winners[i])
        left = grid[i - 1] if i > 0 else 0.5 * min(step, omega_max)
        # a cell may hide several switches; peel them off one at a time
        while w != current:
            edge = _refine(table, left, grid[i], current, tol)
            intervals.append((float(lo), float(edge), table[current].label))
            lo, left = edge, edge + tol
            current = _winner_index(table, min(left, grid[i]))
            if left >= grid[i]:
                current = w
    intervals.append((float(lo), float(omega_max), table[current].label))
    return intervals


def crossover_frequencies(P, delta, mode_table, omega_max, step=SCAN_STEP, tol=BISECT_TOL):
    """Frequencies in ``(0, omega_max)`` where the prevailing mode changes."""
    return [iv[1] for iv in prevailing_intervals(P, delta, mode_table, omega_max, step, tol)[:-1]]


def wind_to_frequency(W, St, H):
    """Vortex-shedding frequency ``St * W / H``."""
    if W <= 0 or St <= 0 or H <= 0:
        raise DomainError("W, St and H must be positive")
    return St * W / H


def symmetric_mode_table(m_max=17, geom=None, *, P=0.0, delta=DEFAULT_DELTA, weights="tabulated"):
    """Mode table of the odd-``m`` longitudinal modes ``mu_{m,1}``, ``m <= m_max``.

    ``weights="tabulated"`` uses :func:`tabulated_sup_norm`, the convention
    behind the published amplitude tables; ``"linf"`` uses the true sup norm
    of the L2-normalized mode.
    """
    geom = geom or PlateGeometry()
    norm = {"tabulated": tabulated_sup_norm, "linf": sup_norm_of}.get(weights)
    if norm is None:
        raise DomainError("weights must be 'tabulated' or 'linf'")
    table = []
    for m in range(1, m_max + 1, 2):
        mode = solve_mu(m, 1, geom)
        table.append(LinearModeParams(mode.lam, m, mode.gamma, norm(mode), P, delta))
    return table
