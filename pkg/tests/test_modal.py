import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from plate_modes import elliptic
from plate_modes.errors import BlowUpError, DomainError, StepSizeError
from plate_modes.modal import (EllipticCnDrive, ModalState, ModalSystem, SampledForcing, Sinusoid,
                               ZeroForcing, build_single_mode_elliptic, build_truncated,
                               build_two_mode_elliptic, build_two_mode_sinusoid, cn_benchmark,
                               energy, energy_series, integrate, integrate_until, norms,
                               periodicity_defect, rhs, uniform_load)


def small_system(delta=0.3, S=2.0, P=0.0, forcing=None):
    return ModalSystem(lam=[1.0, 9.0, 30.0], m=[1, 2, 1], torsional=[False, False, True],
                       delta=delta, P=P, S=S, forcing=forcing)


def reference(sys, ic, t_end, t_eval):
    n = sys.n_modes

    def f(t, y):
        return np.concatenate([y[n:], rhs(sys, ModalState(t, y[:n], y[n:]))])

    sol = solve_ivp(f, (ic.t, t_end), np.concatenate([ic.h, ic.hdot]), method="DOP853",
                    t_eval=t_eval, rtol=1e-12, atol=1e-14)
    return sol.y[:n].T


def test_rk4_matches_high_order_reference():
    sys = small_system(forcing=[Sinusoid(0.7, 1.3), ZeroForcing(), Sinusoid(0.2, 4.0)])
    ic = ModalState(0.0, [0.3, -0.1, 0.05], [0.0, 0.2, 0.0])
    traj = integrate(sys, ic, 10.0, 1e-3)
    ref = reference(sys, ic, traj.t[-1], traj.t[::500])
    np.testing.assert_allclose(traj.h[::500], ref, atol=1e-10)


def test_fourth_order_convergence():
    sys = small_system(forcing=[Sinusoid(0.7, 1.3), ZeroForcing(), ZeroForcing()])
    ic = ModalState(0.0, [0.3, -0.1, 0.05], [0.0, 0.2, 0.0])
    ref = reference(sys, ic, 5.0, [5.0])[0]
    errs = [np.max(np.abs(integrate(sys, ic, 5.0, 5.0 / n).h[-1] - ref)) for n in (500, 1000, 2000)]
    assert errs[0] / errs[1] > 14 and errs[1] / errs[2] > 14


def test_energy_conserved_without_damping_or_forcing():
    sys = small_system(delta=0.0, S=5.0)
    ic = ModalState(0.0, [0.4, 0.1, 0.2], [0.1, 0.0, -0.3])
    traj = integrate(sys, ic, 50.0, 2e-3)
    E = traj.energy.total
    assert np.max(np.abs(E - E[0])) / E[0] < 1e-9


def test_energy_balance_with_damping_and_forcing():
    # dE/dt = -delta |h'|^2 + g . h'
    sys = small_system(delta=0.4, S=3.0, P=0.5, forcing=[Sinusoid(1.0, 2.0), Sinusoid(0.5, 0.7), ZeroForcing()])
    ic = ModalState(0.0, [0.2, 0.1, 0.3], [0.0, 0.0, 0.0])
    traj = integrate(sys, ic, 10.0, 1e-3)
    g = sys.forcing_values(traj.t)
    power = -sys.delta * np.sum(traj.hdot ** 2, axis=1) + np.sum(g * traj.hdot, axis=1)
    dt = np.diff(traj.t)
    work = np.concatenate([[0.0], np.cumsum(0.5 * dt * (power[1:] + power[:-1]))])
    E = traj.energy.total
    assert np.max(np.abs(E - E[0] - work)) < 1e-5 * np.max(np.abs(E))


def test_energy_decreases_when_unforced():
    sys = small_system(delta=0.5, S=1.0)
    traj = integrate(sys, ModalState(0.0, [1.0, 0.5, 0.3], [0, 0, 0]), 20.0, 1e-3)
    assert np.all(np.diff(traj.energy.total) <= 1e-12)


def test_energy_breakdown_sums():
    sys = small_system(S=4.0, P=0.3)
    st_ = ModalState(0.0, [0.3, 0.2, 0.1], [0.5, -0.2, 0.3])
    e = energy(sys, st_, alpha=0.2)
    assert e.total == pytest.approx(e.longitudinal + e.torsional + e.coupling)
    m2 = np.array([1.0, 4.0, 1.0])
    X = np.sum(m2 * st_.h ** 2)
    direct = (0.5 * np.sum(st_.hdot ** 2) + 0.5 * np.sum(sys.lam * st_.h ** 2) - 0.5 * sys.P * X
              + 0.25 * sys.S * X * X + 0.2 * np.sum(st_.h * st_.hdot))
    assert e.total == pytest.approx(direct, rel=1e-14)


def test_norms_are_parseval_sums():
    sys = small_system()
    h = np.array([[1.0, 2.0, 3.0]])
    v = np.array([[0.5, 0.0, 1.0]])
    nm = norms(sys, h, v)
    assert nm["Ux"][0] == 1 + 16 + 9
    assert nm["H2"][0] == 1 + 36 + 270
    assert nm["T_Ut"][0] == 1.0


def test_decoupling_is_exact_over_many_steps():
    sys = build_two_mode_elliptic(2, 1, 0.58, 279.0, 0.2645)
    dt = 9e-4
    traj = integrate(sys, ModalState(0.0, [0.1, 0.0], [0.0, 0.0]), 1e5 * dt, dt, record_energy=False)
    assert len(traj) == 100001
    assert not np.any(traj.h[:, 1].view(np.uint64))
    assert not np.any(traj.hdot[:, 1].view(np.uint64))


def test_step_size_guard():
    sys = small_system()
    with pytest.raises(StepSizeError):
        integrate(sys, ModalState(0.0, [0, 0, 0], [0, 0, 0]), 1.0, 0.1)
    with pytest.raises(StepSizeError):
        integrate(sys, ModalState(0.0, [0, 0, 0], [0, 0, 0]), 1.0, -1e-3)


def test_blow_up_keeps_partial_trajectory():
    # negative effective stiffness is rejected, so force blow-up through a huge unstable step
    sys = small_system(S=1e6)
    ic = ModalState(0.0, [10.0, 0, 0], [0, 0, 0])
    with pytest.raises(BlowUpError) as err:
        integrate(sys, ic, 5.0, 0.01, check_step=False)
    part = err.value.trajectory
    assert part is not None and np.all(np.isfinite(part.h))
    assert err.value.t > part.t[-1]


def test_system_validation():
    with pytest.raises(DomainError):
        ModalSystem(lam=[2.0, 1.0], m=[1, 1], torsional=[False, True])
    with pytest.raises(DomainError):
        ModalSystem(lam=[1.0], m=[1], torsional=[False], P=1.0)
    with pytest.raises(DomainError):
        ModalSystem(lam=[1.0], m=[1], torsional=[False], S=-1.0)
    with pytest.raises(DomainError):
        ModalSystem(lam=[1.0], m=[1], torsional=[False], forcing=[ZeroForcing(), ZeroForcing()])


def test_adaptive_matches_fixed():
    sys = small_system(forcing=[Sinusoid(0.7, 1.3), ZeroForcing(), ZeroForcing()])
    ic = ModalState(0.0, [0.3, -0.1, 0.05], [0.0, 0.2, 0.0])
    a = integrate(sys, ic, 5.0, 0.01, adaptive=True, rtol=1e-10)
    ref = reference(sys, ic, 5.0, [a.t[-1]])[0]
    assert a.t[-1] == pytest.approx(5.0)
    np.testing.assert_allclose(a.h[-1], ref, atol=1e-8)


def test_integrate_until_stops_and_concatenates():
    sys = small_system(delta=1.0)
    ic = ModalState(0.0, [1.0, 0.0, 0.5], [0, 0, 0])
    traj = integrate_until(sys, ic, 1e-2, lambda p: np.abs(p.h[:, 2]) + np.abs(p.hdot[:, 2]) < 1e-3,
                           t_max=200.0, chunk=3.0)
    assert traj.meta["stopped"]
    tail = np.abs(traj.h[-1, 2]) + np.abs(traj.hdot[-1, 2])
    assert tail < 1e-3
    assert np.all(np.diff(traj.t) > 0)
    assert len(traj.energy.total) == len(traj)
    whole = integrate(sys, ic, traj.t[-1], 1e-2)
    np.testing.assert_allclose(whole.h[-1], traj.h[-1], atol=1e-12)


def test_cn_benchmark_fourth_order():
    coarse = cn_benchmark(steps_per_period=512)
    fine = cn_benchmark(steps_per_period=1024)
    assert coarse["max_rel_error"] / fine["max_rel_error"] > 12


def test_periodicity_defect_of_exact_wave():
    sys = build_single_mode_elliptic(2, 0.58, 279.0, 0.2645)
    tau = sys.forcing[0].period
    traj = integrate(sys, ModalState(0.0, [-0.2645 / 0.58], [0.0]), 3 * tau, tau / 2048, check_step=False)
    assert periodicity_defect(traj, tau) < 1e-9


def test_forcing_variants():
    e = EllipticCnDrive(0.2645, 30.72, 0.70133)
    t = np.linspace(0, e.period, 20001)
    assert np.max(np.abs(e(t))) == pytest.approx(e.sup(), rel=1e-6)
    with pytest.raises(DomainError):
        EllipticCnDrive(1.0, 1.0, 0.8)
    s = SampledForcing((0.0, 1.0, 2.0), (0.0, 2.0, 0.0))
    assert s(0.5) == pytest.approx(1.0) and s(5.0) == 0.0 and s.sup() == 2.0


def test_uniform_load_projects_on_gamma(least20):
    forcing = uniform_load(least20, 3.0, 2.0)
    for md, f in zip(least20, forcing):
        assert f.sup() == pytest.approx(3.0 * md.gamma)
        if md.gamma == 0.0:
            assert isinstance(f, ZeroForcing)


def test_truncated_system_builds():
    sys = build_truncated(20)
    assert sys.n_modes == 20 and sys.coercivity == pytest.approx(0.960009, rel=1e-5)


def test_builders_pair_modes():
    sys = build_two_mode_sinusoid(2, 2, 0.4, 250.0, 62500.0, 275.0)
    assert list(sys.torsional) == [False, True]
    assert list(sys.m) == [2, 2]
    b, k = elliptic.drive_parameters(sys.lam[0], 279.0, 2, 0.2645, 0.58)
    e = build_two_mode_elliptic(2, 1, 0.58, 279.0, 0.2645).forcing[0]
    assert (e.b, e.k) == (b, k)


@settings(max_examples=30, deadline=None)
@given(h=st.lists(st.floats(-2, 2), min_size=3, max_size=3),
       v=st.lists(st.floats(-2, 2), min_size=3, max_size=3),
       alpha=st.floats(0, 1))
def test_energy_series_matches_pointwise(h, v, alpha):
    sys = small_system(S=2.0, P=0.2)
    e1 = energy(sys, ModalState(0.0, h, v), alpha)
    e2 = energy_series(sys, np.array([h]), np.array([v]), alpha)
    assert e1.total == pytest.approx(float(e2.total[0]), rel=1e-12, abs=1e-12)
