import math

import pytest

from plate_modes.errors import DomainError
from plate_modes.physical import (PhysicalParams, check_underdamped, damping_from_decay,
                                  nondimensionalize, vortex_forcing)

BASE = dict(L=890.0, ell=6.0, d=2.5, H=2.4, D=1e10, M=7000.0, E_young=2e11)


def test_damping_from_decay():
    assert damping_from_decay(1.0) == pytest.approx(0.2303, abs=1e-4)
    assert damping_from_decay(2.0) == pytest.approx(2 * damping_from_decay(1.0))
    for M in (0.5, 3.0, 7000.0):
        assert math.exp(-20 * damping_from_decay(M) / M) == pytest.approx(0.01, rel=1e-12)
    with pytest.raises(DomainError):
        damping_from_decay(0.0)


def test_default_damping_and_delta():
    p = PhysicalParams(**BASE)
    model = nondimensionalize(p)
    eps = damping_from_decay(p.M)
    assert model.delta == pytest.approx(p.L ** 2 / math.pi ** 2 * eps / math.sqrt(p.D * p.M), rel=1e-14)
    assert model.forcing_amp is None and model.forcing_omega is None


def test_identity_scaling():
    p = PhysicalParams(L=math.pi, ell=0.1, d=0.01, H=0.05, D=1.0, M=1.0, E_young=1.0, eps=0.58)
    model = nondimensionalize(p)
    assert model.delta == pytest.approx(0.58)
    assert model.ell_nd == pytest.approx(0.1)
    assert model.H_nd == pytest.approx(0.05)


def test_homogeneities():
    p = PhysicalParams(**BASE, eps=3.0)
    a = nondimensionalize(p)
    b = nondimensionalize(PhysicalParams(**{**BASE, "E_young": 4e11}, eps=3.0))
    assert b.S == pytest.approx(2 * a.S)
    c = nondimensionalize(PhysicalParams(**{**BASE, "D": 4e10}, eps=3.0))
    assert c.delta == pytest.approx(a.delta / 2) and c.S == pytest.approx(a.S / 4)
    assert a.S == pytest.approx(2 * 6.0 * 2.5 * 2e11 * 890.0 / (2 * 1e10 * math.pi ** 2))


def test_prestress_passes_through():
    assert nondimensionalize(PhysicalParams(**BASE, P_prestress=0.37)).P == 0.37


def test_forcing_frequency():
    p = PhysicalParams(**BASE, W=20.0, St=0.12)
    model = nondimensionalize(p)
    omega = 0.12 * 20.0 / 2.4
    assert model.forcing_omega == pytest.approx(math.sqrt(p.M / p.D) * p.L ** 2 / math.pi ** 2 * omega)
    assert model.forcing_amp == 400.0


def test_vortex_forcing():
    amp, omega = vortex_forcing(1.25, 10.0, 1.0, 6.0, 0.7, 0.1)
    assert amp == pytest.approx(3.6458, abs=1e-4)
    amp2, omega2 = vortex_forcing(1.25, 20.0, 1.0, 6.0, 0.7, 0.1)
    assert amp2 == pytest.approx(4 * amp) and omega2 == pytest.approx(2 * omega)
    assert vortex_forcing(1.25, 10.0, 1.0, 6.0, 0.0, 0.1)[0] == 0.0


def test_underdamped_check_warns():
    assert check_underdamped(0.1, 1.0, 1.0)
    with pytest.warns(RuntimeWarning):
        assert not check_underdamped(5.0, 1.0, 1.0)


@pytest.mark.parametrize("field,value", [("L", 0.0), ("sigma", 1.0), ("d", -1.0), ("W", 0.0)])
def test_invalid_inputs(field, value):
    with pytest.raises(DomainError):
        PhysicalParams(**{**BASE, field: value})


def test_nonpositive_DM():
    with pytest.raises(DomainError):
        nondimensionalize(PhysicalParams(**{**BASE, "D": 0.0}, eps=1.0))
