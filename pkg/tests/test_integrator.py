"""Coefficients, point kernels, sweeps, composition, integrate loop."""
import math

import numpy as np
import pytest

from dpavf.executor import SerialExecutor
from dpavf.grid import FieldState, GridSpec, PhysParams, discrete_energy
from dpavf.harness import make_schedule
from dpavf.integrator import (integrate, precompute_coefficients,
                              step_adjoint, step_base, step_dpavf2,
                              update_point_adjoint, update_point_base)
from dpavf.scenarios import seeded_random_state

EX = SerialExecutor()


class TestCoefficients:
    def test_d2_paper_constants(self):
        g = GridSpec(2, 0.0, 8.0, 8)  # h = 1
        tau, k1, k2, mu = 0.1, 1.5, 2.0, 3.0
        c = precompute_coefficients(PhysParams(k1, k2, mu, 1.0), tau, g)
        assert c.alpha == pytest.approx(tau * k1 / g.h**2)
        assert c.beta == pytest.approx(tau * k1 / (2 * g.h**2))
        assert c.c_uv == pytest.approx(2 * tau * k2 / g.h**2 + tau * mu**2 / 2)

    def test_hand_inverse(self):
        g = GridSpec(1, 0.0, 4.0, 4)  # h = 1
        c = precompute_coefficients(PhysParams(1.0, 0.0, 1.0, 1.0), 2.0, g)
        assert c.c_uv == pytest.approx(1.0)
        (i00, i01), (i10, i11) = c.uv_inv
        assert (i00, i01, i10, i11) == pytest.approx((0.5, 0.5, -0.5, 0.5))

    def test_inverse_identity(self):
        g = GridSpec(3, -1.0, 1.0, 6)
        c = precompute_coefficients(PhysParams(0.3, 1.7, 0.9, 1.1), 0.05, g)
        m = np.array([[1.0, -c.tau / 2], [c.c_uv, 1.0]])
        inv = np.array(c.uv_inv)
        assert np.allclose(inv @ m, np.eye(2), atol=1e-14)

    def test_kappa1_zero(self):
        g = GridSpec(2, 0.0, 1.0, 8)
        c = precompute_coefficients(PhysParams(kappa1=0.0), 0.1, g)
        assert c.alpha == 0.0 and c.beta == 0.0

    def test_tau_zero_rejected(self):
        g = GridSpec(2, 0.0, 1.0, 8)
        with pytest.raises(ValueError, match="tau"):
            precompute_coefficients(PhysParams(), 0.0, g)


class TestPointKernels:
    def test_psi_unchanged_when_decoupled(self):
        g = GridSpec(2, 0.0, 4.0, 4)
        c = precompute_coefficients(PhysParams(0.0, 1.0, 1.0, 0.0), 0.3, g)
        s = seeded_random_state(g, 1, 0.5)
        p0, q0 = s.P[5], s.Q[5]
        update_point_base(s, 5, c, g)
        assert s.P[5] == p0 and s.Q[5] == q0
        update_point_adjoint(s, 5, c, g)
        assert s.P[5] == p0 and s.Q[5] == q0

    def test_oscillator_half_period(self):
        # kappa2=0, gamma=0, mu=1, tau=2: (U,V)=(1,0) -> (0,-1), exactly.
        g = GridSpec(1, 0.0, 4.0, 4)
        c = precompute_coefficients(PhysParams(1.0, 0.0, 1.0, 0.0), 2.0, g)
        s = FieldState.zeros(g)
        s.U[2] = 1.0
        update_point_base(s, 2, c, g)
        assert s.U[2] == pytest.approx(0.0, abs=1e-15)
        assert s.V[2] == pytest.approx(-1.0, rel=1e-15)

    def test_zero_fixed_point(self):
        g = GridSpec(2, 0.0, 1.0, 4)
        c = precompute_coefficients(PhysParams(), 0.1, g)
        s = FieldState.zeros(g)
        update_point_base(s, 3, c, g)
        update_point_adjoint(s, 7, c, g)
        assert s.is_finite()
        assert np.all(s.P == 0) and np.all(s.U == 0) and np.all(s.V == 0)

    def test_gamma_zero_kernels_agree(self):
        g = GridSpec(2, 0.0, 1.0, 4)
        c = precompute_coefficients(PhysParams(1.0, 1.0, 1.0, 0.0), 0.2, g)
        a = seeded_random_state(g, 8, 0.4)
        b = a.copy()
        update_point_base(a, 6, c, g)
        update_point_adjoint(b, 6, c, g)
        assert a.P[6] == b.P[6] and a.Q[6] == b.Q[6]
        assert a.U[6] == b.U[6] and a.V[6] == b.V[6]

    def test_point_adjoint_base_roundtrip(self):
        # adjoint(tau) then base(-tau) with frozen neighbors restores a point
        g = GridSpec(2, 0.0, 1.0, 4)
        p = PhysParams(0.9, 1.1, 1.2, 0.7)
        s = seeded_random_state(g, 4, 0.5)
        ref = s.copy()
        cf = precompute_coefficients(p, 0.05, g)
        cb = precompute_coefficients(p, -0.05, g)
        update_point_adjoint(s, 9, cf, g)
        update_point_base(s, 9, cb, g)
        for f, r in ((s.P, ref.P), (s.Q, ref.Q), (s.U, ref.U), (s.V, ref.V)):
            assert f[9] == pytest.approx(r[9], rel=1e-13, abs=1e-13)


ALL_STRATEGIES = [("lexicographic-forward", {}), ("lexicographic-reverse", {}),
                  ("seeded-random", {"seed": 13}),
                  ("block-split", {"workers": 2}), ("checkerboard", {})]


class TestSweeps:
    @pytest.mark.parametrize("strategy,kw", ALL_STRATEGIES)
    def test_energy_conserved_base_and_adjoint(self, strategy, kw):
        g = GridSpec(2, -10.0, 10.0, 8)
        p = PhysParams(1.0, 1.0, 1.0, 1.0)
        c = precompute_coefficients(p, 0.05, g)
        sch = make_schedule(strategy, g, **kw)
        for step in (step_base, step_adjoint):
            s = seeded_random_state(g, 42, 0.5)
            e0 = discrete_energy(s, p, g)
            step(s, sch, c, EX, g)
            e1 = discrete_energy(s, p, g)
            assert abs(e1 - e0) <= 1e-12 * abs(e0)

    def test_t_advances(self):
        g = GridSpec(1, 0.0, 1.0, 8)
        s = seeded_random_state(g, 2, 0.1)
        sch = make_schedule("lexicographic-forward", g)
        c = precompute_coefficients(PhysParams(), 0.25, g)
        step_base(s, sch, c, EX, g)
        assert s.t == pytest.approx(0.25)
        step_adjoint(s, sch, c, EX, g)
        assert s.t == pytest.approx(0.5)

    def test_adjoint_roundtrip(self):
        g = GridSpec(2, -1.0, 1.0, 8)
        p = PhysParams(0.8, 1.2, 1.1, 0.9)
        s = seeded_random_state(g, 21, 0.5)
        ref = s.copy()
        sch = make_schedule("seeded-random", g, seed=5)
        cf = precompute_coefficients(p, 0.04, g)
        cb = precompute_coefficients(p, -0.04, g)
        step_adjoint(s, sch, cf, EX, g)
        step_base(s, sch, cb, EX, g)
        scale = max(np.abs(ref.P).max(), np.abs(ref.V).max())
        for f, r in ((s.P, ref.P), (s.Q, ref.Q), (s.U, ref.U), (s.V, ref.V)):
            assert np.abs(f - r).max() <= 1e-11 * scale

    def test_time_symmetry_dpavf2(self):
        g = GridSpec(2, -1.0, 1.0, 8)
        p = PhysParams(1.0, 1.0, 1.0, 1.0)
        s = seeded_random_state(g, 33, 0.5)
        ref = s.copy()
        sch = make_schedule("checkerboard", g)
        ch = precompute_coefficients(p, 0.05, g)
        chn = precompute_coefficients(p, -0.05, g)
        step_dpavf2(s, sch, ch, EX, g)
        step_dpavf2(s, sch, chn, EX, g)
        scale = max(np.abs(ref.P).max(), np.abs(ref.V).max())
        for f, r in ((s.P, ref.P), (s.Q, ref.Q), (s.U, ref.U), (s.V, ref.V)):
            assert np.abs(f - r).max() <= 1e-10 * scale

    def test_self_convergence_order2(self):
        """Error halving-rate between (tau) and (tau/2) runs, fixed grid."""
        g = GridSpec(1, -10.0, 10.0, 64)
        p = PhysParams()
        x = g.axis_coords()
        base = FieldState(np.exp(-x**2), np.exp(-x**2), np.tanh(x**2),
                          np.sin(x) * np.exp(-2 * x**2), 0.0)
        sch = make_schedule("lexicographic-forward", g)
        T = 0.5
        finals = []
        for tau in (0.02, 0.01, 0.005):
            s = base.copy()
            integrate(s, g, p, sch, EX, tau, T, record_stride=10**6)
            finals.append(s)
        e01 = np.abs(finals[0].U - finals[1].U).max()
        e12 = np.abs(finals[1].U - finals[2].U).max()
        ratio = e01 / e12
        assert 4 * 0.75 <= ratio <= 4 * 1.25


class TestIntegrate:
    def _setup(self):
        g = GridSpec(2, -1.0, 1.0, 8)
        p = PhysParams()
        s = seeded_random_state(g, 3, 0.4)
        sch = make_schedule("lexicographic-forward", g)
        return g, p, s, sch

    def test_T_zero_single_record(self):
        g, p, s, sch = self._setup()
        before = s.copy()
        trace = integrate(s, g, p, sch, EX, 0.1, 0.0)
        assert trace.steps == [0] and trace.rel_error == [0.0]
        assert np.array_equal(s.P, before.P)

    def test_trace_length_stride(self):
        g, p, s, sch = self._setup()
        trace = integrate(s, g, p, sch, EX, 0.05, 1.0, record_stride=3)
        assert len(trace.steps) == 20 // 3 + 1

    def test_nan_abort_names_step(self):
        g, p, s, sch = self._setup()
        s.U[0] = np.inf
        with pytest.raises(FloatingPointError, match="step 1"):
            integrate(s, g, p, sch, EX, 0.05, 1.0)

    def test_zero_energy_absolute_guard(self):
        g, p, _, sch = self._setup()
        s = FieldState.zeros(g)
        trace = integrate(s, g, p, sch, EX, 0.05, 0.2)
        assert trace.re_is_absolute
        assert trace.max_rel_error() == 0.0

    def test_bad_args(self):
        g, p, s, sch = self._setup()
        with pytest.raises(ValueError):
            integrate(s, g, p, sch, EX, -0.1, 1.0)
        with pytest.raises(ValueError):
            integrate(s, g, p, sch, EX, 0.1, 1.0, record_stride=0)

    def test_snapshot_callback_cadence(self):
        g, p, s, sch = self._setup()
        seen = []
        integrate(s, g, p, sch, EX, 0.1, 1.0, snapshot_stride=4,
                  snapshot_writer=lambda st, n: seen.append(n))
        assert seen == [4, 8]

    def test_energy_trace_machine_precision(self):
        g, p, s, sch = self._setup()
        trace = integrate(s, g, p, sch, EX, 0.05, 2.0)
        assert trace.max_rel_error() <= 1e-12
        assert trace.rel_error[0] == 0.0
