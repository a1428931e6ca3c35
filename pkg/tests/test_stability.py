import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plate_modes.errors import DomainError
from plate_modes.modal import (ModalState, ModalSystem, Sinusoid, Trajectory, ZeroForcing,
                               build_two_mode_elliptic, build_two_mode_sinusoid, integrate, norms)
from plate_modes.stability import (TorsionalDecay, classify_trajectory, energy_bound_report,
                                   energy_parameter, fit_decay_rate, h2_bound, l2_bound,
                                   torsion_decay_threshold, torsional_norm_pair, ut_bound, ux_bound)

IC = ModalState(0.0, [0.0, 0.01], [0.0, 0.0])


def default_dt(sys):
    return 0.1 / math.sqrt(float(np.max(sys.lam)))


@pytest.fixture(scope="module")
def run_69():
    sys = build_two_mode_elliptic(2, 1, 0.58, 279.0, 0.018)
    return sys, integrate(sys, IC, 60.0, default_dt(sys))


@pytest.fixture(scope="module")
def run_610():
    sys = build_two_mode_sinusoid(2, 2, 0.4, 250.0, 62500.0, 275.0)
    return sys, integrate(sys, IC, 60.0, default_dt(sys))


def linear_torsional(delta=0.2, nu=25.0, t_end=80.0):
    sys = ModalSystem(lam=[1.0, nu], m=[1, 1], torsional=[False, True], delta=delta, S=0.0)
    return sys, integrate(sys, ModalState(0.0, [0.0, 1.0], [0.0, 0.0]), t_end, 1e-2)


def test_small_amplitude_elliptic_decays(run_69):
    sys, traj = run_69
    v = classify_trajectory(traj, sys)
    assert v.torsional_decay is TorsionalDecay.DECAYED
    assert not v.local_instability_flag
    assert v.decay_rate_estimate is not None and v.decay_rate_estimate > 0


def test_large_sinusoid_persists(run_610):
    sys, traj = run_610
    v = classify_trajectory(traj, sys)
    assert v.torsional_decay is TorsionalDecay.PERSISTENT
    assert fit_decay_rate(traj, sys) is None or fit_decay_rate(traj, sys) <= 0


def test_short_trajectory_is_undetermined(run_69):
    sys, traj = run_69
    v = classify_trajectory(traj, sys, window=30.0)
    assert v.torsional_decay is TorsionalDecay.UNDETERMINED
    assert "short" in v.diagnostic


def test_decoupled_trajectory_has_exact_zero_sup():
    sys = build_two_mode_elliptic(2, 1, 0.58, 279.0, 0.2645)
    traj = integrate(sys, ModalState(0.0, [0.1, 0.0], [0.0, 0.0]), 20.0, default_dt(sys))
    v = classify_trajectory(traj, sys)
    assert v.torsional_decay is TorsionalDecay.DECAYED
    assert v.trailing_torsional_sup == 0.0


def test_linear_decay_rate_equals_delta():
    sys, traj = linear_torsional(delta=0.2)
    assert fit_decay_rate(traj, sys) == pytest.approx(0.2, rel=0.02)


def synthetic(h_tor, t=None):
    t = np.linspace(0, 10, len(h_tor)) if t is None else t
    h = np.column_stack([np.zeros_like(t), h_tor])
    return Trajectory(t, h, np.zeros_like(h))


SYS2 = ModalSystem(lam=[1.0, 4.0], m=[1, 1], torsional=[False, True])


def test_local_instability_flag_literal():
    t = np.linspace(0, 10, 1001)
    grow = 0.01 + 0.2 * np.sin(np.pi * t / 4) * (t < 4) + 0.0
    grow[t >= 4] = 1e-9
    v = classify_trajectory(synthetic(grow, t), SYS2, window=2.0, tol=1e-3)
    assert v.torsional_decay is TorsionalDecay.DECAYED
    assert v.local_instability_flag
    # growth below the factor ten does not count
    small = np.where(t < 4, 0.01 + 0.08 * np.sin(np.pi * t / 4), 1e-9)
    assert not classify_trajectory(synthetic(small, t), SYS2, window=2.0, tol=1e-3).local_instability_flag
    # initial size below 0.01 does not count
    tiny = np.where(t < 4, 0.005 + 0.2 * np.sin(np.pi * t / 4), 1e-9)
    assert not classify_trajectory(synthetic(tiny, t), SYS2, window=2.0, tol=1e-3).local_instability_flag


def test_flag_needs_zero_initial_velocity():
    t = np.linspace(0, 10, 1001)
    grow = np.where(t < 4, 0.01 + 0.2 * np.sin(np.pi * t / 4), 1e-9)
    traj = synthetic(grow, t)
    traj.hdot[0, 1] = 1e-3
    assert not classify_trajectory(traj, SYS2, window=2.0, tol=1e-3).local_instability_flag


def test_flag_requires_decay():
    t = np.linspace(0, 10, 1001)
    grow = 0.01 + 0.2 * np.abs(np.sin(t))
    v = classify_trajectory(synthetic(grow, t), SYS2, window=2.0)
    assert v.torsional_decay is not TorsionalDecay.DECAYED and not v.local_instability_flag


def test_bounds_hold_and_vanish_without_forcing():
    # long enough for the damped state to underflow to exact zero
    sys = ModalSystem(lam=[1.0, 30.0], m=[1, 2], torsional=[False, True], delta=0.5, S=2.0)
    traj = integrate(sys, ModalState(0.0, [1.0, 0.3], [0.0, 0.0]), 2400.0, 1e-2, record_energy=False)
    reports = energy_bound_report(traj, sys, 0.0)
    assert all(r.theoretical_value == 0.0 for r in reports)
    assert all(r.observed_value == 0.0 for r in reports)
    assert all(r.satisfied for r in reports)


def test_longer_window_keeps_report_satisfied():
    sys = ModalSystem(lam=[1.0, 30.0], m=[1, 2], torsional=[False, True], delta=0.5, S=2.0,
                      forcing=[Sinusoid(0.8, 1.7), ZeroForcing()])
    traj = integrate(sys, ModalState(0.0, [0.0, 0.01], [0.0, 0.0]), 200.0, 1e-2, record_energy=False)
    for window in (50.0, 100.0, 150.0):
        assert all(r.satisfied for r in energy_bound_report(traj, sys, 0.8, window=window))


def test_bound_formulas_at_zero_energy():
    assert l2_bound(0.0, 1.0, 0.0, 5.0) == 0.0
    assert ux_bound(0.0, 0.3, 0.0, 1.0, 0.0, 5.0) == 0.0
    assert h2_bound(0.0, 0.3, 0.0, 1.0, 0.0) == 0.0
    assert ut_bound(0.0, 0.3, 0.0, 1.0, 0.0, 5.0) == 0.0


def test_energy_parameter_branches():
    alpha, factor, name = energy_parameter(0.58, 0.96, 0.0)
    assert alpha == 0.29 and factor == pytest.approx(2 / 0.58 ** 2) and name == "energy_half_delta"
    alpha, factor, name = energy_parameter(3.0, 1.0, 0.0)
    assert alpha == pytest.approx(1.5 - 0.5 * math.sqrt(5.0))
    assert factor == 0.5 and name == "energy_mu"
    with pytest.raises(DomainError):
        energy_parameter(0.5, 1.0, 1.0)


def test_l2_bound_solves_riccati_inequality():
    # Psi is the positive root of (lambda_1 - P) s + S s**2 / 4 = E
    E, lam1, P, S = 3.0, 2.0, 0.5, 7.0
    psi = l2_bound(E, lam1, P, S)
    assert (lam1 - P) * psi / 2 + S * psi ** 2 / 4 == pytest.approx(E, rel=1e-12)


def test_threshold_monotone_and_limits():
    nu = 104.61 ** 2
    chi = torsion_decay_threshold(0.58, 0.0, 279.0, nu)
    assert chi > 0
    assert torsion_decay_threshold(0.58, 0.0, 558.0, nu) == pytest.approx(chi / 2, rel=1e-12)
    assert torsion_decay_threshold(0.58, nu * (1 - 1e-9), 279.0, nu) < 1e-6 * chi
    with pytest.raises(DomainError):
        torsion_decay_threshold(0.58, nu, 279.0, nu)
    with pytest.raises(DomainError):
        torsion_decay_threshold(0.0, 0.0, 279.0, nu)


@settings(max_examples=40, deadline=None)
@given(P1=st.floats(0, 50), P2=st.floats(0, 50), S=st.floats(1, 500), delta=st.floats(0.05, 2))
def test_threshold_nonincreasing_in_P(P1, P2, S, delta):
    nu = 100.0
    lo, hi = sorted((P1, P2))
    assert torsion_decay_threshold(delta, hi, S, nu) <= torsion_decay_threshold(delta, lo, S, nu) * (1 + 1e-12)


def test_threshold_certificate_on_a_run():
    # amplitude small enough that the trailing stretch stays below chi
    sys = build_two_mode_elliptic(2, 1, 0.58, 279.0, 0.005)
    traj = integrate(sys, IC, 60.0, default_dt(sys))
    chi = torsion_decay_threshold(0.58, 0.0, 279.0, sys.lam[1])
    trailing = norms(sys, traj.h, traj.hdot)["Ux"][traj.t >= 45.0]
    assert np.max(trailing) < chi
    v = classify_trajectory(traj, sys)
    assert v.torsional_decay is TorsionalDecay.DECAYED
    assert fit_decay_rate(traj, sys) > 0


def test_norm_pair_definition(run_69):
    sys, traj = run_69
    pair = torsional_norm_pair(traj, sys)
    expected = np.abs(traj.hdot[:, 1]) + math.sqrt(sys.lam[1]) * np.abs(traj.h[:, 1])
    np.testing.assert_allclose(pair, expected, rtol=1e-13)
