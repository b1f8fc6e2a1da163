# Tests of the optimal control solvers
#
# Copyright (C) 2026 the siri-control developers
#
# This file is part of siri-control, optimal protection and vaccination
# for SIRI epidemics.
#
# siri-control is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# siri-control is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with siri-control. If not, see <http://www.gnu.org/licenses/gpl.html>.

import unittest
import numpy
from siri_control import *
from test.trajectoryinvariants import TrajectoryInvariants


class SolverTests(unittest.TestCase):

    def setUp(self):
        self._scenario = preset(2).withGrid(10.0, 100)
        self._opts = SolveOptions(segments=10, max_iters=100)


    # ---------- Options ----------

    def testOptionsValidated(self):
        '''Test bad options are rejected.'''
        with self.assertRaises(DomainError):
            SolveOptions(method='newton')
        with self.assertRaises(DomainError):
            SolveOptions(segments=0)
        with self.assertRaises(DomainError):
            SolveOptions(shrink=1.0)
        with self.assertRaises(DomainError):
            SolveOptions(damping=0.0)
        with self.assertRaises(DomainError):
            SolveOptions(tol=0.0)

    def testOptionsParameters(self):
        '''Test options convert to and from experiment parameters.'''
        opts = SolveOptions(method=FBSM, segments=30, sharpen=True, damping=0.5)
        self.assertEqual(SolveOptions.fromParameters(opts.parameters()), opts)
        self.assertEqual(SolveOptions.fromParameters({}), SolveOptions())

    def testOptionsFlags(self):
        '''Test flags given as strings.'''
        self.assertFalse(SolveOptions.fromParameters({SolveOptions.P_SPECTRAL: 'False'}).spectral_step)
        self.assertTrue(SolveOptions.fromParameters({SolveOptions.P_SHARPEN: 'yes'}).sharpen)
        with self.assertRaises(DomainError):
            SolveOptions.fromParameters({SolveOptions.P_SHARPEN: 'perhaps'})


    # ---------- Objective and gradient ----------

    def testObjective(self):
        '''Test the objective is the accumulated cost.'''
        sc = self._scenario
        u = ControlSignal.constant(sc.grid(), ControlValue(0.5, 0.1))
        traj = integrate_forward(sc.z0(), u, sc.params, sc.weights, sc.grid())
        self.assertEqual(objective(u, sc), traj.terminalCost())

    def testObjectiveZeroWeights(self):
        '''Test a problem with no costs has zero cost and zero gradient.'''
        sc = Scenario(self._scenario.params, CostWeights(0.0, 0.0, 0.0), self._scenario.bounds,
                      self._scenario.x0, 10.0, 100)
        rng = numpy.random.default_rng(5)
        u = ControlSignal(TimeGrid(10.0, 10), rng.uniform(0.2, 1.0, 10), rng.uniform(0.0, 0.9, 10))
        self.assertEqual(objective(u, sc), 0.0)
        (gP, gV) = gradient_adjoint(u, sc)
        numpy.testing.assert_array_equal(gP, numpy.zeros(10))
        numpy.testing.assert_array_equal(gV, numpy.zeros(10))

    def testObjectiveRefined(self):
        '''Test the objective agrees with an integration on a much finer grid.'''
        sc = preset(2)
        u = ControlValue(sc.bounds.u_P_min, 0.0)
        J = objective(ControlSignal.constant(sc.grid(), u), sc)
        fine = sc.withGrid(sc.horizon, 8 * sc.n_steps)
        Jf = objective(ControlSignal.constant(fine.grid(), u), fine)
        self.assertLess(abs(J - Jf), 1e-4 * Jf)

    def testObjectiveQuadrature(self):
        '''Test the accumulated cost against the trapezoid rule applied to the running cost.'''
        sc = preset(2)
        u = ControlValue(sc.bounds.u_P_min, 0.0)
        J = objective(ControlSignal.constant(sc.grid(), u), sc)
        fine = sc.withGrid(sc.horizon, 4 * sc.n_steps)
        traj = integrate_forward(fine.z0(), ControlSignal.constant(fine.grid(), u), fine.params, fine.weights, fine.grid())
        Ls = numpy.array([running_cost(traj.state(k).toEpidemic(), u, fine.weights) for k in range(traj.nodeCount())])
        q = fine.grid().step * (numpy.sum(Ls) - (Ls[0] + Ls[-1]) / 2)
        self.assertLess(abs(J - q), 1e-5 * q)

    def testGradient(self):
        '''Test the adjoint gradient against central differences of the objective.'''
        sc = preset(2).withGrid(20.0, 400)
        b = sc.bounds
        segments = TimeGrid(20.0, 40)
        rng = numpy.random.default_rng(11)
        d = 1e-6
        for _ in range(20):
            uP = rng.uniform(b.u_P_min, 1.0, 40)
            uV = rng.uniform(0.0, b.u_V_max, 40)
            (gP, gV) = gradient_adjoint(ControlSignal(segments, uP, uV), sc)
            self.assertEqual(gP.shape, (40,))
            for k in range(40):
                for (us, g) in [(uP, gP), (uV, gV)]:
                    us[k] += d
                    Jp = objective(ControlSignal(segments, uP, uV), sc)
                    us[k] -= 2 * d
                    Jm = objective(ControlSignal(segments, uP, uV), sc)
                    us[k] += d
                    fd = (Jp - Jm) / (2 * d)
                    self.assertLess(abs(g[k] - fd), 1e-4 * abs(fd) + 1e-7,
                                    f'segment {k}: adjoint {g[k]}, difference {fd}')


    # ---------- Direct shooting ----------

    def testDirect(self):
        '''Test direct shooting improves on no intervention.'''
        sc = self._scenario
        J0 = objective(ControlSignal.constant(sc.grid(), ControlValue(1.0, 0.0)), sc)
        (u, rc) = solve_direct(sc, self._opts)
        self.assertEqual(rc.method, DIRECT_SHOOTING)
        self.assertEqual(len(u), 10)
        self.assertTrue(u.isAdmissible(sc.bounds))
        self.assertEqual(rc.cost_history[0], J0)
        self.assertLess(rc.objective, J0)
        self.assertTrue(numpy.all(numpy.diff(rc.cost_history) <= 0.0))
        self.assertEqual(rc.iterations, len(rc.cost_history) - 1)
        self.assertEqual(rc.objective, rc.cost_history[-1])
        TrajectoryInvariants().checkInvariants(rc.trajectory)

    def testDirectPlain(self):
        '''Test direct shooting without spectral steps also descends.'''
        opts = SolveOptions(segments=10, max_iters=50, spectral_step=False)
        (_, rc) = solve_direct(self._scenario, opts)
        self.assertTrue(numpy.all(numpy.diff(rc.cost_history) <= 0.0))

    def testDirectSharpen(self):
        '''Test sharpening leaves admissible controls at no real extra cost.'''
        opts = SolveOptions(segments=10, max_iters=500, sharpen=True)
        (u, rc) = solve_direct(self._scenario, opts)
        self.assertTrue(u.isAdmissible(self._scenario.bounds))
        self.assertLessEqual(rc.objective, rc.cost_history[-1] * (1 + SHARPEN_SLACK))

    def testDirectFirstOrder(self):
        '''Test a converged solution satisfies the first-order conditions for the control box.'''
        sc = self._scenario
        b = sc.bounds
        (u, rc) = solve_direct(sc, SolveOptions(segments=10, max_iters=500, cost_tol=0.0))
        self.assertTrue(rc.converged)
        (gP, gV) = gradient_adjoint(u, sc)
        for (us, gs, lo, hi) in [(u.uPValues(), gP, b.u_P_min, 1.0), (u.uVValues(), gV, 0.0, b.u_V_max)]:
            for (v, g) in zip(us, gs):
                if abs(g) > 1e-4 * (1 + abs(g)):
                    self.assertAlmostEqual(v, lo if g > 0 else hi, delta=1e-5)

    def testDirectCostStall(self):
        '''Test direct shooting stops once the cost stalls.'''
        opts = SolveOptions(segments=30, tol=1e-300, cost_tol=1e6)
        (_, rc) = solve_direct(preset(3), opts)
        self.assertEqual(rc.stop_reason, STOP_COST)
        self.assertTrue(rc.converged)
        self.assertEqual(rc.iterations, STALL_WINDOW)
        self.assertEqual(rc.asDict()['stop_reason'], STOP_COST)

    def testDirectIterationLimit(self):
        '''Test running out of iterations is reported as not converging.'''
        opts = SolveOptions(segments=10, max_iters=1, tol=1e-300)
        (_, rc) = solve_direct(self._scenario, opts)
        self.assertEqual(rc.stop_reason, STOP_ITERATIONS)
        self.assertFalse(rc.converged)
        self.assertEqual(rc.iterations, 1)

    def testSegmentsMustDivide(self):
        '''Test the segments must divide the grid steps.'''
        with self.assertRaises(ArgumentError):
            solve_direct(self._scenario, SolveOptions(segments=7))

    def testReport(self):
        '''Test the solve report.'''
        (_, rc) = solve_direct(self._scenario, self._opts)
        d = rc.asDict()
        for k in ['method', 'objective', 'cost_history', 'projected_gradient_norm', 'iterations',
                  'converged', 'stop_reason', 'pmp_residual', 'cost_breakdown', 'diagnostics']:
            self.assertIn(k, d)
        self.assertEqual(rc.pmp_residual, rc.diagnostics.pmp_residual)
        self.assertLess(abs(rc.cost_breakdown.total - rc.objective), 1e-6 * rc.objective)


    # ---------- Forward-backward sweep ----------

    def testFBSM(self):
        '''Test the sweep produces admissible controls.'''
        sc = self._scenario
        opts = SolveOptions(method=FBSM, segments=10, max_iters=50)
        (u, rc) = solve_fbsm(sc, opts)
        self.assertEqual(rc.method, FBSM)
        self.assertTrue(u.isAdmissible(sc.bounds))
        self.assertEqual(rc.iterations, len(rc.cost_history) - 1)
        self.assertLessEqual(rc.iterations, 50)
        TrajectoryInvariants().checkInvariants(rc.trajectory)

    def testSolveDispatch(self):
        '''Test solving by the method named in the options.'''
        (_, rc) = solve(self._scenario, SolveOptions(method=FBSM, segments=10, max_iters=5))
        self.assertEqual(rc.method, FBSM)
        (_, rc) = solve(self._scenario, SolveOptions(segments=10, max_iters=5))
        self.assertEqual(rc.method, DIRECT_SHOOTING)


class SolverPresetTests(unittest.TestCase):
    '''Solve the three standard cases over the full horizon.'''

    def _nodeControls(self, traj):
        uP = numpy.append(traj.controls.uPValues(), traj.controls.uPValues()[-1])
        uV = numpy.append(traj.controls.uVValues(), traj.controls.uVValues()[-1])
        return (uP, uV)

    def _checkCoherent(self, rc):
        self.assertLessEqual(rc.pmp_residual, 1e-2 * rc.objective)
        traj = rc.trajectory
        self.assertLess(numpy.max(numpy.abs(traj.costates[:, 0] - 1.0)), 1e-12)
        numpy.testing.assert_array_equal(traj.costates[-1], [1.0, 0.0, 0.0])
        TrajectoryInvariants().checkInvariants(traj)

    def testCase1(self):
        '''Test case 1 protects late in the horizon and never vaccinates.'''
        sc = preset(1)
        (u, rc) = solve_direct(sc, SolveOptions())
        self.assertTrue(rc.converged)
        self.assertLess(numpy.max(u.uVValues()), 1e-3)
        ss = rc.diagnostics.switchesOf(PROTECTION)
        self.assertEqual(len(ss), 1)
        self.assertLess(ss[0].from_value, ss[0].to_value)
        self.assertGreaterEqual(ss[0].time, 37.0)
        self.assertLessEqual(ss[0].time, 47.0)
        self._checkCoherent(rc)

    def testCase2(self):
        '''Test case 2 protects throughout and never vaccinates.'''
        sc = preset(2)
        (u, rc) = solve_direct(sc, SolveOptions(cost_tol=0.0))
        (uP, uV) = u.segmentValues(DEFAULT_SEGMENTS)
        self.assertGreaterEqual(numpy.mean(numpy.abs(uP - sc.bounds.u_P_min) <= 1e-2), 0.99)
        self.assertLess(numpy.max(uV), 1e-3)
        self._checkCoherent(rc)

    def testCase3(self):
        '''Test case 3 protects throughout and vaccinates on a singular arc.'''
        sc = preset(3)
        (u, rc) = solve_direct(sc, SolveOptions(cost_tol=0.0))
        self.assertTrue(numpy.all(numpy.abs(u.uPValues() - sc.bounds.u_P_min) <= 1e-2))
        arcs = [iv for iv in rc.diagnostics.singularIntervalsOf(VACCINATION) if iv.length >= 0.1 * sc.horizon]
        self.assertGreater(len(arcs), 0)
        traj = rc.trajectory
        (_, uV) = self._nodeControls(traj)
        ts = traj.times()
        interior = []
        for iv in arcs:
            on = (ts >= iv.t_start) & (ts <= iv.t_end)
            inside = (uV[on] >= 1e-2) & (uV[on] <= sc.bounds.u_V_max - 1e-2)
            interior.append(numpy.mean(inside) >= 0.5)
        self.assertTrue(any(interior))

    def testFBSMAgreesCase2(self):
        '''Test the sweep finds the same controls as direct shooting for case 2.'''
        sc = preset(2)
        (ud, _) = solve_direct(sc, SolveOptions(cost_tol=0.0))
        (uf, _) = solve_fbsm(sc, SolveOptions(method=FBSM))
        for (a, b) in zip(ud.segmentValues(DEFAULT_SEGMENTS), uf.segmentValues(DEFAULT_SEGMENTS)):
            self.assertLessEqual(numpy.max(numpy.abs(a - b)), 1e-2)

    def testFBSMCostCase1(self):
        '''Test the sweep comes close to the cost found by direct shooting for case 1.'''
        sc = preset(1)
        (_, rd) = solve_direct(sc, SolveOptions())
        (_, rf) = solve_fbsm(sc, SolveOptions(method=FBSM))
        self.assertLessEqual(abs(rf.objective - rd.objective), 2e-2 * rd.objective)


if __name__ == '__main__':
    unittest.main()
