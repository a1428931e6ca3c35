"""Dimensional deck and wind data to the nondimensional plate model."""

import math
import warnings
from dataclasses import asdict, dataclass

from .errors import DomainError

DECAY_FACTOR = math.log(100.0) / 20.0


@dataclass(frozen=True)
class PhysicalParams:
    """Deck geometry, material and wind data in consistent SI units.

    ``A_cross`` defaults to ``2 ell d``.  ``eps`` defaults to the damping
    that reduces oscillations to 1% within 20 seconds.  Wind fields
    (``rho``, ``W``, ``C_L``, ``St``) may be omitted; the forcing is then
    left undefined.
    """

    L: float
    ell: float
    d: float
    H: float
    D: float
    M: float
    E_young: float
    sigma: float = 0.2
    P_prestress: float = 0.0
    eps: float = None
    A_cross: float = None
    rho: float = None
    W: float = None
    C_L: float = None
    St: float = None

    def __post_init__(self):
        for name in ("L", "ell", "d", "H", "E_young"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if not (0.0 < self.sigma < 1.0):
            raise DomainError("sigma must lie in (0, 1)")
        if self.P_prestress < 0:
            raise DomainError("P_prestress must be nonnegative")
        for name in ("eps", "A_cross", "rho", "W", "St"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise DomainError(f"{name} must be positive when given")
        if self.C_L is not None and self.C_L < 0:
            raise DomainError("C_L must be nonnegative")

    @property
    def area(self):
        return 2.0 * self.ell * self.d if self.A_cross is None else self.A_cross

    @property
    def damping(self):
        return damping_from_decay(self.M) if self.eps is None else self.eps


@dataclass(frozen=True)
class ModelParams:
    delta: float
    S: float
    ell_nd: float
    sigma: float
    P: float
    H_nd: float
    forcing_amp: float = None
    forcing_omega: float = None

    def to_dict(self):
        return asdict(self)


def damping_from_decay(M):
    """Damping ``eps`` solving ``exp(-20 eps / M) = 1/100``."""
    if not M > 0:
        raise DomainError("M must be positive")
    return DECAY_FACTOR * M


def check_underdamped(eps, M, alpha):
    """Warn when ``eps >= 2 sqrt(alpha M)``; the decay-based damping then loses its meaning."""
    ok = eps < 2.0 * math.sqrt(alpha * M)
    if not ok:
        warnings.warn(f"eps={eps:.6g} is not below 2 sqrt(alpha M)={2 * math.sqrt(alpha * M):.6g}",
                      RuntimeWarning, stacklevel=2)
    return ok


def vortex_forcing(rho, W, H, ell, C_L, St):
    """Lift amplitude ``(rho/2) W^2 (H/2ell) C_L`` and shedding frequency ``St W / H``."""
    if min(rho, W, H, ell, St) <= 0 or C_L < 0:
        raise DomainError("vortex forcing inputs must be positive")
    return 0.5 * rho * W * W * (H / (2.0 * ell)) * C_L, St * W / H


def time_scale(D, M, L):
    """Factor ``sqrt(D/M) pi^2 / L^2`` converting physical time to model time."""
    return math.sqrt(D / M) * math.pi ** 2 / L ** 2


def nondimensionalize(p):
    """Scale a :class:`PhysicalParams` onto the strip of length ``pi``."""
    if not (p.D > 0 and p.M > 0):
        raise DomainError("need D > 0 and M > 0")
    L2 = p.L * p.L
    delta = L2 / math.pi ** 2 * p.damping / math.sqrt(p.D * p.M)
    S = p.area * p.E_young * p.L / (2.0 * p.D * math.pi ** 2)
    amp = omega_nd = None
    if p.W is not None and p.St is not None:
        omega = p.St * p.W / p.H
        omega_nd = math.sqrt(p.M / p.D) * L2 / math.pi ** 2 * omega
        amp = float(p.W) ** 2
    return ModelParams(
        delta=delta, S=S, ell_nd=math.pi * p.ell / p.L, sigma=p.sigma, P=p.P_prestress,
        H_nd=math.pi * p.H / p.L, forcing_amp=amp, forcing_omega=omega_nd,
    )
