"""Truncated modal dynamics of the nonlocal plate equation.

Each retained mode ``k`` (eigenvalue ``lam_k``, x-wavenumber ``m_k``) obeys::

    h_k'' + delta h_k' + lam_k h_k + m_k**2 (S X - P) h_k = g_k(t),
    X = sum_j m_j**2 h_j**2

The system is written in first-order form ``(h, h')`` and advanced with the
classical fourth-order Runge-Kutta scheme.  The fixed-step path runs in a
numba kernel on pre-sampled forcing, the adaptive path (step doubling) in
plain Python.
"""

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from . import elliptic
from .errors import BlowUpError, DomainError, StepSizeError
from .spectrum import PlateGeometry, solve_mu, solve_nu, least_eigenvalues

MAX_STEP_RESOLUTION = 0.1


# -- forcing ------------------------------------------------------------------

class Forcing:
    """Scalar modal forcing ``g_k(t)``; subclasses are vectorized in ``t``."""

    is_zero = False

    def __call__(self, t):
        raise NotImplementedError

    def sup(self):
        """``sup_t |g(t)|``."""
        raise NotImplementedError

    def describe(self):
        return {"variant": type(self).__name__}


@dataclass(frozen=True)
class ZeroForcing(Forcing):
    is_zero = True

    def __call__(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def sup(self):
        return 0.0


@dataclass(frozen=True)
class Sinusoid(Forcing):
    amplitude: float
    omega: float

    @property
    def is_zero(self):
        return self.amplitude == 0.0

    def __call__(self, t):
        return self.amplitude * np.sin(self.omega * np.asarray(t, dtype=float))

    def sup(self):
        return abs(self.amplitude)

    def describe(self):
        return {"variant": "Sinusoid", "A": self.amplitude, "omega": self.omega}


@dataclass(frozen=True)
class EllipticCnDrive(Forcing):
    """``A b sn(bt, k) dn(bt, k)``: the drive that makes ``-(A/delta) cn`` exact."""

    amplitude: float
    b: float
    k: float

    def __post_init__(self):
        if not (0.0 <= self.k and self.k * self.k < 0.5):
            raise DomainError(f"cn-wave drive needs k**2 < 1/2, got k={self.k!r}")

    def __call__(self, t):
        return elliptic.sn_dn_drive(self.amplitude, self.b, self.k, t)

    def sup(self):
        # max |sn dn| = sqrt(1 - k^2) when k^2 < 1/2
        return abs(self.amplitude) * self.b * math.sqrt(1.0 - self.k ** 2)

    @property
    def period(self):
        return elliptic.period_tau(self.b, self.k)

    def describe(self):
        return {"variant": "EllipticCnDrive", "A": self.amplitude, "b": self.b, "k": self.k}


@dataclass(frozen=True)
class SampledForcing(Forcing):
    """Piecewise-linear interpolation of a recorded series (zero outside it)."""

    times: tuple
    values: tuple

    def __post_init__(self):
        if len(self.times) != len(self.values) or len(self.times) < 2:
            raise DomainError("sampled forcing needs matching times/values of length >= 2")
        if np.any(np.diff(self.times) <= 0):
            raise DomainError("sampled forcing times must be strictly increasing")

    @property
    def is_zero(self):
        return not np.any(np.asarray(self.values))

    def __call__(self, t):
        return np.interp(np.asarray(t, dtype=float), self.times, self.values, left=0.0, right=0.0)

    def sup(self):
        return float(np.max(np.abs(self.values)))

    def describe(self):
        return {"variant": "SampledForcing", "n_samples": len(self.times)}


# -- system and state ---------------------------------------------------------

@dataclass
class ModalSystem:
    """Retained modes plus damping ``delta``, prestress ``P`` and stretch ``S``."""

    lam: np.ndarray
    m: np.ndarray
    torsional: np.ndarray
    delta: float = 0.58
    P: float = 0.0
    S: float = 1.0
    forcing: tuple = None
    modes: tuple = ()

    def __post_init__(self):
        self.lam = np.atleast_1d(np.asarray(self.lam, dtype=float))
        self.m = np.atleast_1d(np.asarray(self.m, dtype=np.int64))
        self.torsional = np.atleast_1d(np.asarray(self.torsional, dtype=bool))
        n = self.lam.size
        if self.m.shape != (n,) or self.torsional.shape != (n,):
            raise DomainError("lam, m and torsional must have the same length")
        if np.any(self.lam <= 0) or np.any(self.m < 1):
            raise DomainError("eigenvalues must be positive and wavenumbers >= 1")
        if n > 1 and np.any(np.diff(self.lam) <= 0):
            raise DomainError("modes must be distinct and sorted by eigenvalue")
        if self.delta < 0:
            raise DomainError("damping delta must be nonnegative")
        if self.S < 0:
            raise DomainError("stretch S must be nonnegative")
        if not (0.0 <= self.P < self.lam[0]):
            raise DomainError(f"prestress must satisfy 0 <= P < lambda_1 = {self.lam[0]:.6g}")
        if self.forcing is None:
            self.forcing = tuple(ZeroForcing() for _ in range(n))
        self.forcing = tuple(self.forcing)
        if len(self.forcing) != n:
            raise DomainError("need exactly one forcing per mode")

    @classmethod
    def from_modes(cls, modes, delta=0.58, P=0.0, S=1.0, forcing=None):
        modes = tuple(modes)
        return cls(
            lam=[md.lam for md in modes],
            m=[md.m for md in modes],
            torsional=[md.torsional for md in modes],
            delta=delta, P=P, S=S, forcing=forcing, modes=modes,
        )

    @property
    def n_modes(self):
        return self.lam.size

    @property
    def coercivity(self):
        """``min_k lam_k / m_k**2``: the constant in ``c ||u_x||^2 <= ||u||_H^2``.

        It also bounds ``c ||u||^2 <= ||u||_H^2`` since ``m_k >= 1``.
        """
        return float(np.min(self.lam / self.m.astype(float) ** 2))

    def forcing_values(self, t):
        """Forcing sampled at times ``t``; shape ``t.shape + (n_modes,)``."""
        t = np.asarray(t, dtype=float)
        return np.stack([f(t) for f in self.forcing], axis=-1)

    def forcing_sup_norm(self):
        """Upper bound of ``sup_t ||g(t)||_{L2} = sup_t sqrt(sum_k g_k(t)**2)``.

        Exact when at most one mode is forced.
        """
        return math.sqrt(sum(f.sup() ** 2 for f in self.forcing))

    def describe(self):
        return {
            "lam": self.lam.tolist(),
            "m": self.m.tolist(),
            "torsional": self.torsional.tolist(),
            "delta": self.delta, "P": self.P, "S": self.S,
            "forcing": [f.describe() for f in self.forcing],
            "modes": [md.label for md in self.modes],
        }


@dataclass
class ModalState:
    t: float
    h: np.ndarray
    hdot: np.ndarray

    def __post_init__(self):
        self.h = np.atleast_1d(np.asarray(self.h, dtype=float))
        self.hdot = np.atleast_1d(np.asarray(self.hdot, dtype=float))
        if self.h.shape != self.hdot.shape:
            raise DomainError("h and hdot must have the same dimension")


@dataclass
class EnergyBreakdown:
    """``total = longitudinal + torsional + coupling``; fields may be arrays."""

    alpha: float
    total: object
    longitudinal: object
    torsional: object
    coupling: object


@dataclass
class Trajectory:
    t: np.ndarray
    h: np.ndarray
    hdot: np.ndarray
    energy: EnergyBreakdown = None
    energy_index: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.t.size

    def state(self, i):
        return ModalState(float(self.t[i]), self.h[i].copy(), self.hdot[i].copy())

    @property
    def final(self):
        return self.state(-1)

    def concat(self, other):
        """Join a continuation that starts at this trajectory's final state."""
        if other.t[0] != self.t[-1]:
            raise ValueError("continuation must start at the final sample")
        energy = None
        index = None
        if self.energy is not None and other.energy is not None:
            fields_ = ("total", "longitudinal", "torsional", "coupling")
            keep = other.energy_index > 0
            parts = {f: np.concatenate([getattr(self.energy, f), getattr(other.energy, f)[keep]])
                     for f in fields_}
            energy = EnergyBreakdown(self.energy.alpha, **parts)
            index = np.concatenate([self.energy_index, other.energy_index[keep] + len(self) - 1])
        return Trajectory(
            np.concatenate([self.t, other.t[1:]]),
            np.concatenate([self.h, other.h[1:]]),
            np.concatenate([self.hdot, other.hdot[1:]]),
            energy, index, dict(self.meta),
        )


# -- right-hand side and energy ----------------------------------------------

def rhs(sys, state):
    """Modal accelerations ``h''`` at ``state``."""
    h, v = state.h, state.hdot
    if h.shape != (sys.n_modes,):
        raise DomainError(f"state has dimension {h.shape}, system has {sys.n_modes} modes")
    m2 = sys.m.astype(float) ** 2
    stretch = float(np.dot(m2, h * h))
    g = sys.forcing_values(state.t)
    return g - sys.delta * v - (sys.lam + m2 * (sys.S * stretch - sys.P)) * h


def _energy_parts(sys, h, v, alpha):
    m2 = sys.m.astype(float) ** 2
    parts = []
    xs = []
    for mask in (~sys.torsional, sys.torsional):
        hh, vv = h[..., mask], v[..., mask]
        x = np.sum(m2[mask] * hh * hh, axis=-1)
        e = (0.5 * np.sum(vv * vv, axis=-1) + 0.5 * np.sum(sys.lam[mask] * hh * hh, axis=-1)
             - 0.5 * sys.P * x + 0.25 * sys.S * x * x + alpha * np.sum(hh * vv, axis=-1))
        parts.append(e)
        xs.append(x)
    coupling = 0.5 * sys.S * xs[0] * xs[1]
    return parts[0], parts[1], coupling


def energy(sys, state, alpha=0.0):
    """Energy ``E_alpha`` of a modal state, split longitudinal/torsional/coupling."""
    el, et, ec = _energy_parts(sys, state.h, state.hdot, alpha)
    el, et, ec = float(el), float(et), float(ec)
    return EnergyBreakdown(alpha, el + et + ec, el, et, ec)


def energy_series(sys, h, hdot, alpha=0.0):
    el, et, ec = _energy_parts(sys, np.asarray(h), np.asarray(hdot), alpha)
    return EnergyBreakdown(alpha, el + et + ec, el, et, ec)


def norms(sys, h, hdot):
    """Modal Parseval sums along a series.

    Returns a dict of ``L2`` (``||u||^2``), ``Ux`` (``||u_x||^2``), ``Ut``
    (``||u_t||^2``), ``H2`` (``||u||_H^2``), and the torsional-only
    counterparts ``T_L2``, ``T_Ut``, ``T_H2``.
    """
    h, v = np.asarray(h), np.asarray(hdot)
    m2 = sys.m.astype(float) ** 2
    tmask = sys.torsional
    return {
        "L2": np.sum(h * h, axis=-1),
        "Ux": np.sum(m2 * h * h, axis=-1),
        "Ut": np.sum(v * v, axis=-1),
        "H2": np.sum(sys.lam * h * h, axis=-1),
        "T_L2": np.sum(h[..., tmask] ** 2, axis=-1),
        "T_Ut": np.sum(v[..., tmask] ** 2, axis=-1),
        "T_H2": np.sum(sys.lam[tmask] * h[..., tmask] ** 2, axis=-1),
    }


# -- integration --------------------------------------------------------------

@numba.njit(cache=True)
def _accel(lam, m2, delta, P, S, h, v, g, out):
    x = 0.0
    for j in range(h.size):
        x += m2[j] * h[j] * h[j]
    shift = S * x - P
    for j in range(h.size):
        out[j] = g[j] - delta * v[j] - (lam[j] + m2[j] * shift) * h[j]


@numba.njit(cache=True)
def _rk4_kernel(lam, m2, delta, P, S, G, h0, v0, dt, nsteps, H, V):
    K = h0.size
    H[0, :] = h0
    V[0, :] = v0
    a1 = np.empty(K)
    a2 = np.empty(K)
    a3 = np.empty(K)
    a4 = np.empty(K)
    hs = np.empty(K)
    vs = np.empty(K)
    half = 0.5 * dt
    for n in range(nsteps):
        h = H[n]
        v = V[n]
        _accel(lam, m2, delta, P, S, h, v, G[2 * n], a1)
        for j in range(K):
            hs[j] = h[j] + half * v[j]
            vs[j] = v[j] + half * a1[j]
        v2 = vs.copy()
        _accel(lam, m2, delta, P, S, hs, vs, G[2 * n + 1], a2)
        for j in range(K):
            hs[j] = h[j] + half * v2[j]
            vs[j] = v[j] + half * a2[j]
        v3 = vs.copy()
        _accel(lam, m2, delta, P, S, hs, vs, G[2 * n + 1], a3)
        for j in range(K):
            hs[j] = h[j] + dt * v3[j]
            vs[j] = v[j] + dt * a3[j]
        v4 = vs.copy()
        _accel(lam, m2, delta, P, S, hs, vs, G[2 * n + 2], a4)
        ok = True
        for j in range(K):
            hn = h[j] + dt / 6.0 * (v[j] + 2.0 * v2[j] + 2.0 * v3[j] + v4[j])
            vn = v[j] + dt / 6.0 * (a1[j] + 2.0 * a2[j] + 2.0 * a3[j] + a4[j])
            if not (np.isfinite(hn) and np.isfinite(vn)):
                ok = False
            H[n + 1, j] = hn
            V[n + 1, j] = vn
        if not ok:
            return n
    return nsteps


def _check_dt(sys, dt, check_step):
    if not dt > 0:
        raise StepSizeError(f"dt must be positive, got {dt!r}")
    if check_step and dt * math.sqrt(float(np.max(sys.lam))) > MAX_STEP_RESOLUTION * (1 + 1e-12):
        raise StepSizeError(
            f"dt too large for stiffest mode: dt*sqrt(lambda_max) = "
            f"{dt * math.sqrt(float(np.max(sys.lam))):.4g} > {MAX_STEP_RESOLUTION}"
        )


def _attach_energy(sys, traj, alpha, energy_every):
    idx = np.arange(0, len(traj), max(int(energy_every), 1))
    if idx[-1] != len(traj) - 1:
        idx = np.append(idx, len(traj) - 1)
    with np.errstate(over="ignore", invalid="ignore"):
        traj.energy = energy_series(sys, traj.h[idx], traj.hdot[idx], alpha)
    traj.energy_index = idx
    return traj


def integrate(sys, ic, t_end, dt, record_energy=True, alpha=0.0, *, check_step=True,
              energy_every=1, adaptive=False, rtol=1e-9):
    """Integrate ``sys`` from ``ic`` up to ``t_end``.

    Fixed-step RK4 by default; the step count is ``ceil((t_end - t0)/dt)``
    so the final time may overshoot ``t_end`` by less than one step.  With
    ``adaptive=True`` the step is controlled by step doubling at relative
    tolerance ``rtol`` and ``dt`` is only the initial guess.

    Raises
    ------
    StepSizeError
        If ``dt * sqrt(max lam) > 0.1`` and ``check_step`` is true.
    BlowUpError
        If the state becomes non-finite; ``err.trajectory`` holds the finite part.
    """
    if ic.h.shape != (sys.n_modes,):
        raise DomainError("initial state dimension does not match the system")
    _check_dt(sys, dt, check_step and not adaptive)
    t0 = float(ic.t)
    if adaptive:
        traj = _integrate_adaptive(sys, ic, t_end, dt, rtol)
    else:
        nsteps = max(int(math.ceil((t_end - t0) / dt - 1e-9)), 0)
        tgrid = t0 + 0.5 * dt * np.arange(2 * nsteps + 1)
        G = np.ascontiguousarray(sys.forcing_values(tgrid).reshape(2 * nsteps + 1, sys.n_modes))
        H = np.empty((nsteps + 1, sys.n_modes))
        V = np.empty((nsteps + 1, sys.n_modes))
        m2 = sys.m.astype(float) ** 2
        done = _rk4_kernel(sys.lam, m2, float(sys.delta), float(sys.P), float(sys.S), G,
                           ic.h.copy(), ic.hdot.copy(), float(dt), nsteps, H, V)
        times = tgrid[::2]
        if done < nsteps:
            partial = Trajectory(times[:done + 1], H[:done + 1], V[:done + 1])
            if record_energy:
                _attach_energy(sys, partial, alpha, energy_every)
            raise BlowUpError(f"blow-up detected at t={times[done + 1]:.6g}", times[done + 1], partial)
        traj = Trajectory(times, H, V)
    traj.meta.update(dt=dt, adaptive=adaptive, alpha=alpha)
    if record_energy:
        _attach_energy(sys, traj, alpha, energy_every)
    return traj


def _first_order(sys, t, y):
    n = sys.n_modes
    return np.concatenate([y[n:], rhs(sys, ModalState(t, y[:n], y[n:]))])


def _rk4_step(sys, t, y, dt):
    k1 = _first_order(sys, t, y)
    k2 = _first_order(sys, t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = _first_order(sys, t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = _first_order(sys, t + dt, y + dt * k3)
    return y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _integrate_adaptive(sys, ic, t_end, dt, rtol, atol=1e-12):
    n = sys.n_modes
    t = float(ic.t)
    y = np.concatenate([ic.h, ic.hdot])
    ts, ys = [t], [y]
    while t < t_end - 1e-14 * max(1.0, abs(t_end)):
        dt = min(dt, t_end - t)
        full = _rk4_step(sys, t, y, dt)
        mid = _rk4_step(sys, t, y, 0.5 * dt)
        two = _rk4_step(sys, t + 0.5 * dt, mid, 0.5 * dt)
        err = np.max(np.abs(two - full) / (atol + rtol * np.maximum(np.abs(two), np.abs(y)))) / 15.0
        if not np.all(np.isfinite(two)):
            partial = Trajectory(np.array(ts), np.array(ys)[:, :n], np.array(ys)[:, n:])
            raise BlowUpError(f"blow-up detected at t={t + dt:.6g}", t + dt, partial)
        if err <= 1.0:
            t += dt
            y = two + (two - full) / 15.0
            ts.append(t)
            ys.append(y)
        dt *= min(2.0, max(0.2, 0.9 * (1.0 / max(err, 1e-300)) ** 0.2))
    ys = np.array(ys)
    return Trajectory(np.array(ts), ys[:, :n], ys[:, n:])


def integrate_until(sys, ic, dt, stop, t_max, chunk=50.0, **kwargs):
    """Integrate in chunks until ``stop(traj)`` flags a sample or ``t_max`` is reached.

    ``stop`` receives each chunk and returns a boolean array over its
    samples; the result is truncated just after the first flagged sample.
    """
    traj = None
    state = ic
    while True:
        t_next = min(state.t + chunk, t_max)
        piece = integrate(sys, state, t_next, dt, **kwargs)
        hits = np.flatnonzero(np.asarray(stop(piece)))
        if hits.size:
            cut = int(hits[0]) + 1
            piece = Trajectory(piece.t[:cut], piece.h[:cut], piece.hdot[:cut], meta=piece.meta)
            if kwargs.get("record_energy", True):
                _attach_energy(sys, piece, kwargs.get("alpha", 0.0), kwargs.get("energy_every", 1))
        traj = piece if traj is None else traj.concat(piece)
        if hits.size or piece.t[-1] >= t_max - 1e-12:
            traj.meta["stopped"] = bool(hits.size)
            return traj
        state = piece.final


def periodicity_defect(traj, tau, coord=0, window=None):
    """``sup |h(t) - h(t - tau)|`` over the trailing ``window`` (default ``tau``).

    The shifted series is linearly interpolated; this diagnoses, but does
    not certify, convergence to a tau-periodic regime.
    """
    t, x = traj.t, traj.h[:, coord]
    window = tau if window is None else window
    sel = t >= max(t[-1] - window, t[0] + tau)
    if not np.any(sel):
        raise ValueError("trajectory shorter than one period")
    shifted = np.interp(t[sel] - tau, t, x)
    return float(np.max(np.abs(x[sel] - shifted)))


# -- system builders ----------------------------------------------------------

def build_single_mode_elliptic(m, delta, S, A, geom=None):
    """One longitudinal mode ``mu_{m,1}`` under the exact cn-wave drive."""
    mode = solve_mu(m, 1, geom or PlateGeometry())
    b, k = elliptic.drive_parameters(mode.lam, S, m, A, delta)
    return ModalSystem.from_modes([mode], delta=delta, P=0.0, S=S,
                                  forcing=[EllipticCnDrive(A, b, k)])


def build_two_mode_elliptic(m, n, delta, S, A, geom=None):
    """``mu_{m,1}`` driven by the cn-wave forcing, coupled to the torsional ``nu_{n,2}``."""
    geom = geom or PlateGeometry()
    lon, tor = solve_mu(m, 1, geom), solve_nu(n, 2, geom)
    b, k = elliptic.drive_parameters(lon.lam, S, m, A, delta)
    return ModalSystem.from_modes([lon, tor], delta=delta, P=0.0, S=S,
                                  forcing=[EllipticCnDrive(A, b, k), ZeroForcing()])


def build_two_mode_sinusoid(m, n, delta, S, A, omega, geom=None):
    """``mu_{m,1}`` forced by ``A sin(omega t)``, coupled to the torsional ``nu_{n,2}``."""
    geom = geom or PlateGeometry()
    lon, tor = solve_mu(m, 1, geom), solve_nu(n, 2, geom)
    return ModalSystem.from_modes([lon, tor], delta=delta, P=0.0, S=S,
                                  forcing=[Sinusoid(A, omega), ZeroForcing()])


def uniform_load(modes, amplitude, omega):
    """Modal projections ``gamma_k * amplitude * sin(omega t)`` of a load uniform in space."""
    return [Sinusoid(amplitude * md.gamma, omega) if md.gamma != 0.0 else ZeroForcing()
            for md in modes]


def build_truncated(n_modes=20, delta=0.58, P=0.0, S=1.0, forcing=None, geom=None):
    """System on the ``n_modes`` least eigenmodes (default: the 20 of the classic table)."""
    modes = least_eigenvalues(n_modes, geom or PlateGeometry())
    return ModalSystem.from_modes(modes, delta=delta, P=P, S=S, forcing=forcing)


def cn_benchmark(m=2, delta=0.58, S=279.0, A=0.2645, steps_per_period=4096, periods=1, geom=None):
    """Integrate the single cn-wave driven mode from its exact initial state.

    Returns a dict with the period ``tau``, drive parameters ``b`` and ``k``
    and ``max_rel_error``: the largest deviation from ``-(A/delta) cn(bt, k)``
    divided by the wave amplitude ``A/delta``.
    """
    sys = build_single_mode_elliptic(m, delta, S, A, geom)
    drive = sys.forcing[0]
    tau = drive.period
    dt = tau / steps_per_period
    ic = ModalState(0.0, [-A / delta], [0.0])
    traj = integrate(sys, ic, periods * tau, dt, record_energy=False, check_step=False)
    exact = elliptic.exact_cn_solution(A, delta, drive.b, drive.k, traj.t)
    err = float(np.max(np.abs(traj.h[:, 0] - exact))) / (A / delta)
    return {"m": m, "delta": delta, "S": S, "A": A, "b": drive.b, "k": drive.k, "tau": tau,
            "dt": dt, "steps": int(len(traj) - 1), "max_rel_error": err}
