"""Eigenmodes of the hinged/free plate ``(0, pi) x (-ell, ell)``.

Every eigenfunction has the separated form ``w(x, y) = C phi(y) sin(m x)``
where, with ``s = sqrt(lambda)``, ``c = (1 - sigma) m**2`` and
``a = sqrt(m**2 + s)``::

    phi(y) = (s - c) H(y) + (s + c) T(y)

``H`` is ``cosh(a y)/cosh(a ell)`` (even modes) or ``sinh(a y)/sinh(a ell)``
(odd modes) and ``T`` is the matching hyperbolic or trigonometric function
of ``sqrt(|m**2 - s|) y``.  The four families are

=======  ============  ==================================  =============
family   parity        T                                   eigenvalue
=======  ============  ==================================  =============
i        even          cosh(b y)/cosh(b ell),  s < m**2    mu_{m,1}
ii       even          cos(beta y)/cos(beta ell), s > m**2 mu_{m,k>=2}
iii      odd           sin(beta y)/sin(beta ell), s > m**2 nu_{m,k>=2}
iv       odd           sinh(b y)/sinh(b ell),  s < m**2    nu_{m,1}
=======  ============  ==================================  =============

The first free-edge condition ``phi'' - sigma m**2 phi = 0`` holds for any
``s`` with these coefficients; the second, ``phi''' - (2 - sigma) m**2 phi' = 0``,
is the characteristic equation solved here in the variable ``s``.
"""

import enum
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar

from .errors import (
    DomainError,
    ModeDoesNotExistError,
    ProfileCollapseError,
    RootNotIsolatedError,
)

DEFAULT_HALF_WIDTH = math.pi / 150.0
DEFAULT_POISSON = 0.2

SCAN_INTERVALS = 64
RESIDUAL_TOL = 1e-9
_QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-13, limit=200)


class ModeKind(enum.Enum):
    LONGITUDINAL = "mu"
    TORSIONAL = "nu"


@dataclass(frozen=True)
class PlateGeometry:
    """Nondimensional plate: length ``pi``, half-width ``half_width``."""

    half_width: float = DEFAULT_HALF_WIDTH
    poisson: float = DEFAULT_POISSON

    def __post_init__(self):
        if not (0.0 < self.half_width < math.pi):
            raise DomainError(f"half-width must lie in (0, pi), got {self.half_width!r}")
        if not (0.0 < self.poisson < 1.0):
            raise DomainError(f"Poisson ratio must lie in (0, 1), got {self.poisson!r}")


@dataclass(frozen=True)
class Eigenmode:
    """One classified eigenpair.

    ``k`` is the y-direction family index (``mu_{m,k}`` / ``nu_{m,k}``), not the
    position of the eigenvalue in the ordered spectrum.
    """

    kind: ModeKind
    m: int
    k: int
    family: str
    sqrt_lambda: float
    geometry: PlateGeometry = field(default_factory=PlateGeometry)
    norm_const: float = math.nan
    gamma: float = math.nan
    sup_norm: float = math.nan

    @property
    def lam(self):
        return self.sqrt_lambda ** 2

    @property
    def torsional(self):
        return self.kind is ModeKind.TORSIONAL

    @property
    def label(self):
        return f"{self.kind.value}_{{{self.m},{self.k}}}"

    @property
    def coefficients(self):
        """``(s - c, s + c)``: weights of the two y-profile components."""
        s = self.sqrt_lambda
        c = (1.0 - self.geometry.poisson) * self.m ** 2
        return s - c, s + c

    @property
    def hyperbolic_second(self):
        """True when the second profile component is hyperbolic (``s < m**2``)."""
        return self.family in ("i", "iv")

    def profile(self, y, deriv=0):
        """Unnormalized y-profile ``phi`` (or its ``deriv``-th derivative)."""
        y = np.asarray(y, dtype=float)
        ell = self.geometry.half_width
        m2 = float(self.m ** 2)
        s = self.sqrt_lambda
        p, q = self.coefficients
        even = self.kind is ModeKind.LONGITUDINAL
        first = _hyperbolic(y, math.sqrt(m2 + s), ell, even, deriv)
        if self.hyperbolic_second:
            second = _hyperbolic(y, math.sqrt(max(m2 - s, 0.0)), ell, even, deriv)
        else:
            second = _trigonometric(y, math.sqrt(max(s - m2, 0.0)), ell, even, deriv)
        return p * first + q * second


def _hyperbolic(y, a, ell, even, deriv):
    # cosh(ay)/cosh(a ell) or sinh(ay)/sinh(a ell) in exp-difference form
    ay = np.abs(y)
    decay = np.exp(a * (ay - ell))
    plus = (1.0 + np.exp(-2.0 * a * ay)) * decay
    minus = -np.expm1(-2.0 * a * ay) * decay * np.sign(y)
    if even:
        den = 1.0 + math.exp(-2.0 * a * ell)
        num = plus if deriv % 2 == 0 else minus
    else:
        den = -math.expm1(-2.0 * a * ell)
        if den == 0.0:
            # a -> 0 limit: sinh(ay)/sinh(a ell) -> y/ell
            return (y / ell) if deriv == 0 else (np.full_like(y, 1.0 / ell) if deriv == 1 else np.zeros_like(y))
        num = minus if deriv % 2 == 0 else plus
    return (a ** deriv) * num / den


def _trigonometric(y, beta, ell, even, deriv):
    # cos(beta y)/cos(beta ell) or sin(beta y)/sin(beta ell)
    phase = beta * y + (0.0 if even else -0.5 * math.pi) + 0.5 * math.pi * deriv
    den = math.cos(beta * ell) if even else math.sin(beta * ell)
    return (beta ** deriv) * np.cos(phase) / den


# -- characteristic functions -------------------------------------------------

def _tanhc(x, ell):
    # tanh(ell x) / x with the x -> 0 limit
    return ell if x == 0.0 else math.tanh(ell * x) / x


def _sinc(x, ell):
    # sin(ell x) / x with the x -> 0 limit
    return ell if x == 0.0 else math.sin(ell * x) / x


def characteristic(family, s, m, geom):
    """Value and magnitude scale of the pole-free characteristic function.

    Returns ``(F, scale)`` where ``scale`` is the size of the dominant term,
    so ``abs(F) / scale`` is a relative residual.
    """
    ell, sigma = geom.half_width, geom.poisson
    m2 = float(m * m)
    c = (1.0 - sigma) * m2
    a = math.sqrt(m2 + s)
    p2, q2 = (s - c) ** 2, (s + c) ** 2
    if family == "i":
        b = math.sqrt(max(m2 - s, 0.0))
        t1, t2 = p2 * a * math.tanh(ell * a), q2 * b * math.tanh(ell * b)
        return t1 - t2, max(abs(t1), abs(t2))
    if family == "ii":
        beta = math.sqrt(max(s - m2, 0.0))
        t1 = p2 * a * math.tanh(ell * a) * math.cos(ell * beta)
        t2 = q2 * beta * math.sin(ell * beta)
        return t1 + t2, max(abs(t1), abs(t2), p2 * a * math.tanh(ell * a))
    if family == "iii":
        beta = math.sqrt(max(s - m2, 0.0))
        t1 = p2 * a * _sinc(beta, ell)
        t2 = q2 * math.tanh(ell * a) * math.cos(ell * beta)
        return t1 - t2, max(abs(t1), abs(t2), q2 * math.tanh(ell * a))
    if family == "iv":
        b = math.sqrt(max(m2 - s, 0.0))
        t1, t2 = p2 * a * _tanhc(b, ell), q2 * math.tanh(ell * a)
        return t1 - t2, max(abs(t1), abs(t2))
    raise ValueError(f"unknown family {family!r}")


def _bracketed_root(family, m, geom, lo, hi):
    f = lambda s: characteristic(family, s, m, geom)[0]
    grid = np.linspace(lo, hi, SCAN_INTERVALS + 1)
    values = [f(s) for s in grid]
    for j in range(SCAN_INTERVALS):
        if values[j] == 0.0:
            return grid[j]
        if values[j] * values[j + 1] < 0.0:
            root = brentq(f, grid[j], grid[j + 1], xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
            val, scale = characteristic(family, root, m, geom)
            if abs(val) > RESIDUAL_TOL * scale:
                raise RootNotIsolatedError(
                    f"characteristic equation root not isolated for family {family}, m={m}: "
                    f"residual {abs(val) / scale:.2e}"
                )
            return root
    raise RootNotIsolatedError(
        f"characteristic equation root not isolated for family {family}, m={m} in s-bracket "
        f"({lo:.6g}, {hi:.6g}); geometry outside validated regime?"
    )


def _check_index(name, value, minimum):
    if int(value) != value or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def mu_bracket(m, k, geom):
    """Open s-interval that contains ``sqrt(mu_{m,k})``."""
    m2 = float(m * m)
    if k == 1:
        return math.sqrt(1.0 - geom.poisson ** 2) * m2, m2
    w = (math.pi / geom.half_width) ** 2
    return m2 + w * (k - 1.5) ** 2, m2 + w * (k - 1) ** 2


def nu_bracket(m, k, geom):
    """Open s-interval that contains ``sqrt(nu_{m,k})`` for ``k >= 2``."""
    m2 = float(m * m)
    w = (math.pi / geom.half_width) ** 2
    return m2 + w * (k - 2) ** 2, m2 + w * (k - 1.5) ** 2


def torsional_regime_margin(m, geom):
    """``tanh(sqrt2 m ell) - (sigma/(2-sigma))**2 sqrt2 m ell``.

    Positive: torsional modes start at ``nu_{m,2}``.  Negative: an extra
    torsional eigenvalue ``nu_{m,1}`` below ``m**4`` exists.
    """
    x = math.sqrt(2.0) * m * geom.half_width
    r = (geom.poisson / (2.0 - geom.poisson)) ** 2
    return math.tanh(x) - r * x


def degenerate_wavenumber(geom):
    """Positive root ``s*`` of ``tanh(sqrt2 s ell) = (sigma/(2-sigma))**2 sqrt2 s ell``.

    When ``s*`` is an integer the plate has one extra eigenvalue that this
    module does not construct; :func:`least_eigenvalues` warns in that case.
    """
    r = (geom.poisson / (2.0 - geom.poisson)) ** 2
    g = lambda x: math.tanh(x) - r * x
    x = brentq(g, 1e-12 + 1e-6, 1.0 / r + 1.0, xtol=1e-15)
    s_star = x / (math.sqrt(2.0) * geom.half_width)
    near = round(s_star)
    if near >= 1 and abs(torsional_regime_margin(near, geom)) < 1e-10:
        warnings.warn(
            f"wavenumber {near} satisfies the degenerate edge condition; "
            "one extra eigenvalue is not represented",
            RuntimeWarning,
            stacklevel=2,
        )
    return s_star


def solve_mu(m, k, geom=None):
    """Longitudinal eigenmode ``mu_{m,k}`` (families i and ii), normalized."""
    geom = geom or PlateGeometry()
    m = _check_index("m", m, 1)
    k = _check_index("k", k, 1)
    family = "i" if k == 1 else "ii"
    lo, hi = mu_bracket(m, k, geom)
    s = _bracketed_root(family, m, geom, lo, hi)
    return _finish(Eigenmode(ModeKind.LONGITUDINAL, m, k, family, s, geom))


def solve_nu(m, k, geom=None):
    """Torsional eigenmode ``nu_{m,k}``, ``k >= 2`` (family iii), normalized."""
    geom = geom or PlateGeometry()
    m = _check_index("m", m, 1)
    k = _check_index("k", k, 2)
    if torsional_regime_margin(m, geom) <= 0.0:
        raise ModeDoesNotExistError(
            f"m={m} is a nu_{{m,1}}-regime wavenumber; use solve_nu_first instead"
        )
    lo, hi = nu_bracket(m, k, geom)
    s = _bracketed_root("iii", m, geom, lo, hi)
    return _finish(Eigenmode(ModeKind.TORSIONAL, m, k, "iii", s, geom))


def solve_nu_first(m, geom=None):
    """Torsional eigenmode ``nu_{m,1}`` (family iv), which lies in ``(mu_{m,1}, m**4)``."""
    geom = geom or PlateGeometry()
    m = _check_index("m", m, 1)
    if torsional_regime_margin(m, geom) >= 0.0:
        raise ModeDoesNotExistError(f"nu_{{m,1}} does not exist for this m (m={m})")
    lo = solve_mu(m, 1, geom).sqrt_lambda
    s = _bracketed_root("iv", m, geom, lo, float(m * m))
    return _finish(Eigenmode(ModeKind.TORSIONAL, m, 1, "iv", s, geom))


def _finish(mode):
    mode = normalize(mode)
    return replace(mode, gamma=gamma_of(mode), sup_norm=sup_norm_of(mode))


def normalize(mode):
    """Return ``mode`` with ``norm_const`` set so that ``int_Omega w**2 = 1``."""
    ell = mode.geometry.half_width
    integrand = lambda y: float(mode.profile(y)) ** 2
    half, _ = quad(integrand, 0.0, ell, **_QUAD_OPTS)
    total = 2.0 * half
    p, q = mode.coefficients
    if not np.isfinite(total) or total <= 1e-24 * (abs(p) + abs(q)) ** 2 * ell:
        raise ProfileCollapseError(f"profile collapse for {mode.label}")
    return replace(mode, norm_const=math.sqrt(2.0 / (math.pi * total)))


def _require_normalized(mode):
    if not np.isfinite(mode.norm_const):
        raise ValueError(f"{mode.label} is not normalized; call normalize() first")


def eigenfunction_value(mode, x, y):
    """Normalized eigenfunction ``C phi(y) sin(m x)``; broadcasts over ``x`` and ``y``."""
    _require_normalized(mode)
    return mode.norm_const * mode.profile(y) * np.sin(mode.m * np.asarray(x, dtype=float))


def gamma_of(mode):
    """``int_Omega w``; exactly zero for torsional modes and even ``m``."""
    _require_normalized(mode)
    if mode.torsional or mode.m % 2 == 0:
        return 0.0
    ell = mode.geometry.half_width
    # sign-changing profiles nearly cancel, so a purely relative tolerance is unattainable
    floor = 1e-14 * ell * sum(abs(c) for c in mode.coefficients)
    half, _ = quad(lambda y: float(mode.profile(y)), 0.0, ell, epsabs=floor, epsrel=1e-13, limit=200)
    return mode.norm_const * 2.0 * half * 2.0 / mode.m


def _max_abs_profile(mode):
    ell = mode.geometry.half_width
    if mode.family == "i":
        # both components are positive and increasing in |y|
        return abs(float(mode.profile(ell)))
    ys = np.linspace(0.0, ell, 2049)
    vals = np.abs(mode.profile(ys))
    j = int(np.argmax(vals))
    lo, hi = ys[max(j - 1, 0)], ys[min(j + 1, len(ys) - 1)]
    if hi > lo:
        res = minimize_scalar(lambda y: -abs(float(mode.profile(y))), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-14 * ell})
        return max(vals[j], -res.fun)
    return vals[j]


def sup_norm_of(mode):
    """``max |w|`` over the plate of the L2-normalized mode."""
    _require_normalized(mode)
    return mode.norm_const * _max_abs_profile(mode)


def tabulated_sup_norm(mode):
    """Amplitude weight ``sqrt(m C) max|phi|`` of the classic prevailing-mode tables.

    The widely quoted table of "sup norms" for the symmetric longitudinal
    modes (2.764, 14.37, ..., 194.6 at the default geometry) is reproduced
    by this expression to four digits, and the prevailing-mode breakpoints
    quoted alongside it need exactly these weights.  It is *not* the L-inf
    norm of the L2-normalized mode; that is :func:`sup_norm_of`, which stays
    close to ``1/sqrt(pi ell)`` for every thin-plate family-i mode.
    """
    _require_normalized(mode)
    return math.sqrt(mode.m * mode.norm_const) * _max_abs_profile(mode)


def h2_norm_sq(mode):
    """``||w||^2`` in the plate energy inner product, by quadrature in y.

    For a normalized eigenmode this equals ``lambda`` (Rayleigh identity).
    """
    _require_normalized(mode)
    m2 = float(mode.m ** 2)
    sigma = mode.geometry.poisson

    def integrand(y):
        f0, f1, f2 = (float(mode.profile(y, d)) for d in (0, 1, 2))
        return m2 * m2 * f0 * f0 + f2 * f2 + 2.0 * (1.0 - sigma) * m2 * f1 * f1 - 2.0 * sigma * m2 * f0 * f2

    half, _ = quad(integrand, 0.0, mode.geometry.half_width, **_QUAD_OPTS)
    return mode.norm_const ** 2 * 0.5 * math.pi * 2.0 * half


def l2_inner(mode_a, mode_b):
    """``int_Omega w_a w_b``; the x-integral is done exactly."""
    _require_normalized(mode_a)
    _require_normalized(mode_b)
    if mode_a.m != mode_b.m:
        return 0.0
    ell = mode_a.geometry.half_width
    f = lambda y: float(mode_a.profile(y) * mode_b.profile(y))
    val, _ = quad(f, -ell, ell, **_QUAD_OPTS)
    return 0.5 * math.pi * mode_a.norm_const * mode_b.norm_const * val


def _lower_bound(family, m, k, geom):
    if family == "i":
        return (1.0 - geom.poisson ** 2) * m ** 4
    if family == "ii":
        return mu_bracket(m, k, geom)[0] ** 2
    if family == "iii":
        return nu_bracket(m, k, geom)[0] ** 2
    return (1.0 - geom.poisson ** 2) * m ** 4


def least_eigenvalues(n, geom=None):
    """The ``n`` smallest eigenmodes, sorted by eigenvalue.

    The n-th smallest ``mu_{m,1}`` over ``m = 1..n`` is an upper bound for
    the n-th eigenvalue, so every family member whose bracket starts below
    it is a candidate; all of them are solved and the n least are kept.
    """
    geom = geom or PlateGeometry()
    n = _check_index("n", n, 1)
    degenerate_wavenumber(geom)

    first = [solve_mu(m, 1, geom) for m in range(1, n + 1)]
    threshold = sorted(md.lam for md in first)[n - 1]
    found = {(md.kind, md.m, md.k): md for md in first}

    m = 1
    while (1.0 - geom.poisson ** 2) * m ** 4 < threshold or float(m) ** 4 < threshold:
        if (ModeKind.LONGITUDINAL, m, 1) not in found and _lower_bound("i", m, 1, geom) < threshold:
            found[(ModeKind.LONGITUDINAL, m, 1)] = solve_mu(m, 1, geom)
        k = 2
        while _lower_bound("ii", m, k, geom) < threshold:
            found[(ModeKind.LONGITUDINAL, m, k)] = solve_mu(m, k, geom)
            k += 1
        regular = torsional_regime_margin(m, geom) > 0.0
        if not regular and _lower_bound("iv", m, 1, geom) < threshold:
            found[(ModeKind.TORSIONAL, m, 1)] = solve_nu_first(m, geom)
        k = 2
        while _lower_bound("iii", m, k, geom) < threshold:
            if regular:
                found[(ModeKind.TORSIONAL, m, k)] = solve_nu(m, k, geom)
            elif k >= 3:
                lo, hi = nu_bracket(m, k, geom)
                s = _bracketed_root("iii", m, geom, lo, hi)
                found[(ModeKind.TORSIONAL, m, k)] = _finish(
                    Eigenmode(ModeKind.TORSIONAL, m, k, "iii", s, geom))
            k += 1
        m += 1

    ordered = sorted(found.values(), key=lambda md: (md.lam, md.kind.value, md.m, md.k))
    return ordered[:n]
