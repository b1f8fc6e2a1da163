# Tests of integration
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


class ODETests(unittest.TestCase):

    def setUp(self):
        # case 2 of the presets
        self._p = ModelParams(1.0, 2.0, 0.1)
        self._w = CostWeights(0.3, 2.0, 5.0)
        self._z0 = EpidemicState(0.8, 0.2, 0.0).toReduced()
        self._invariants = TrajectoryInvariants()

    def _constant(self, grid, u_P, u_V):
        return ControlSignal.constant(grid, ControlValue(u_P, u_V))

    def _run(self, grid, u_P, u_V, z0=None):
        if z0 is None:
            z0 = self._z0
        return integrate_forward(z0, self._constant(grid, u_P, u_V), self._p, self._w, grid)


    # ---------- Forward ----------

    def testForwardInvariants(self):
        '''Test the forward integration stays on the simplex with increasing cost.'''
        grid = TimeGrid(60.0, 600)
        for (u_P, u_V) in [(1.0, 0.0), (0.2, 0.0), (0.2, 0.9), (0.6, 0.3)]:
            traj = self._run(grid, u_P, u_V)
            self._invariants.checkInvariants(traj)
            self.assertEqual(traj.nodeCount(), 601)
            self.assertGreater(traj.terminalCost(), 0.0)

    def testForwardTimeVarying(self):
        '''Test integration under switching controls on a coarser grid.'''
        grid = TimeGrid(60.0, 600)
        u = ControlSignal.fromSegments(TimeGrid(60.0, 60), [1.0, 0.2, 0.5] * 20, [0.0, 0.9, 0.3] * 20)
        traj = integrate_forward(self._z0, u, self._p, self._w, grid)
        self._invariants.checkInvariants(traj)
        self.assertEqual(traj.controls.grid(), grid)

    def testInfectionFree(self):
        '''Test that a population without infection stays put at no cost.'''
        grid = TimeGrid(10.0, 100)
        z0 = EpidemicState(0.75, 0.0, 0.25).toReduced()
        traj = self._run(grid, 1.0, 0.0, z0=z0)
        numpy.testing.assert_array_equal(traj.infected(), numpy.zeros(101))
        numpy.testing.assert_array_equal(traj.states[:, 1], numpy.full(101, 0.75))
        self.assertEqual(traj.terminalCost(), 0.0)

    def testInitialCost(self):
        '''Test we must start with no accumulated cost.'''
        grid = TimeGrid(10.0, 100)
        with self.assertRaises(ArgumentError):
            self._run(grid, 1.0, 0.0, z0=ReducedState(1.0, 0.8, 0.0))

    def testDiverges(self):
        '''Test that a wildly unstable integration is stopped.'''
        grid = TimeGrid(10.0, 10)
        with self.assertRaises(IntegrationDivergedError) as cm:
            self._run(grid, 1.0, 50.0)
        e = cm.exception
        self.assertGreaterEqual(e.node, 1)
        self.assertEqual(e.time, grid.time(e.node))

    def testOrder(self):
        '''Test the forward integration converges at fourth order.'''
        reference = self._run(TimeGrid(20.0, 1280), 0.5, 0.05).states[-1]
        e80 = numpy.max(numpy.abs(self._run(TimeGrid(20.0, 80), 0.5, 0.05).states[-1] - reference))
        e160 = numpy.max(numpy.abs(self._run(TimeGrid(20.0, 160), 0.5, 0.05).states[-1] - reference))
        ratio = e80 / e160
        self.assertGreater(ratio, 12)
        self.assertLess(ratio, 20)

    def testFullAgrees(self):
        '''Test the full three-compartment integration agrees with the Mayer form.'''
        grid = TimeGrid(60.0, 600)
        u = ControlSignal.fromSegments(grid, [1.0, 0.2, 0.6], [0.0, 0.5, 0.1])
        traj = integrate_forward(self._z0, u, self._p, self._w, grid)
        df = simulate_full(EpidemicState(0.8, 0.2, 0.0), u, self._p, grid)
        self.assertEqual(list(df.columns), ['t', 'x_S', 'x_I', 'x_R'])
        numpy.testing.assert_allclose(df['x_S'], traj.states[:, 1], atol=1e-10)
        numpy.testing.assert_allclose(df['x_I'], traj.infected(), atol=1e-10)
        drift = numpy.max(numpy.abs(df['x_S'] + df['x_I'] + df['x_R'] - 1.0))
        self.assertLess(drift, 1e-12)


    # ---------- Trajectories ----------

    def testTrajectoryShape(self):
        '''Test trajectories check their arrays.'''
        grid = TimeGrid(10.0, 10)
        u = self._constant(grid, 1.0, 0.0)
        with self.assertRaises(ArgumentError):
            Trajectory(grid, numpy.zeros((10, 3)), u)
        states = numpy.zeros((11, 3))
        states[0, 0] = 0.5
        with self.assertRaises(ArgumentError):
            Trajectory(grid, states, u)
        with self.assertRaises(ArgumentError):
            Trajectory(grid, numpy.zeros((11, 3)), self._constant(TimeGrid(10.0, 20), 1.0, 0.0))

    def testTrajectoryDataFrame(self):
        '''Test converting a trajectory to a DataFrame.'''
        grid = TimeGrid(10.0, 100)
        traj = self._run(grid, 0.5, 0.1)
        df = traj.toDataFrame()
        self.assertEqual(list(df.columns), ['t', 'x_S', 'x_I', 'x_R', 'x_C', 'u_P', 'u_V'])
        self.assertEqual(len(df), 101)
        traj = integrate_costate_backward(traj, self._p, self._w)
        df = traj.toDataFrame()
        for c in ['phi_P', 'phi_V', 'lambda_S', 'lambda_R']:
            self.assertIn(c, df.columns)


    # ---------- Costates ----------

    def testCostateInvariants(self):
        '''Test the terminal condition and constant cost costate.'''
        grid = TimeGrid(60.0, 600)
        traj = integrate_costate_backward(self._run(grid, 0.6, 0.3), self._p, self._w)
        self._invariants.checkInvariants(traj)
        self.assertTrue(traj.hasCostates())
        self.assertEqual(traj.costate(600), CostateVec(1.0, 0.0, 0.0))

    def testCostateNeedsControls(self):
        '''Test we can't integrate costates without controls.'''
        grid = TimeGrid(10.0, 10)
        traj = Trajectory(grid, numpy.zeros((11, 3)), None)
        with self.assertRaises(ArgumentError):
            integrate_costate_backward(traj, self._p, self._w)

    def testCostateSensitivity(self):
        '''Test the initial costates are the sensitivities of the cost to the initial state.'''
        grid = TimeGrid(20.0, 200)
        (s0, r0) = (0.6, 0.2)
        traj = integrate_costate_backward(self._run(grid, 0.6, 0.1, z0=ReducedState(0.0, s0, r0)),
                                          self._p, self._w)
        d = 1e-6
        fdS = (self._run(grid, 0.6, 0.1, z0=ReducedState(0.0, s0 + d, r0)).terminalCost() -
               self._run(grid, 0.6, 0.1, z0=ReducedState(0.0, s0 - d, r0)).terminalCost()) / (2 * d)
        fdR = (self._run(grid, 0.6, 0.1, z0=ReducedState(0.0, s0, r0 + d)).terminalCost() -
               self._run(grid, 0.6, 0.1, z0=ReducedState(0.0, s0, r0 - d)).terminalCost()) / (2 * d)
        self.assertLess(abs(traj.costates[0, 1] - fdS), 1e-4 * (1 + abs(fdS)))
        self.assertLess(abs(traj.costates[0, 2] - fdR), 1e-4 * (1 + abs(fdR)))

    def testCostateRates(self):
        '''Test the costate rates are minus the state gradient of the Hamiltonian.'''
        z = ReducedState(0.0, 0.5, 0.3)
        u = ControlValue(0.7, 0.2)
        lam = CostateVec(1.0, -0.4, 0.9)
        rates = costate_rates(z, u, lam, self._p, self._w)
        d = 1e-6
        dHdS = (hamiltonian(ReducedState(0.0, 0.5 + d, 0.3), u, lam, self._p, self._w) -
                hamiltonian(ReducedState(0.0, 0.5 - d, 0.3), u, lam, self._p, self._w)) / (2 * d)
        dHdR = (hamiltonian(ReducedState(0.0, 0.5, 0.3 + d), u, lam, self._p, self._w) -
                hamiltonian(ReducedState(0.0, 0.5, 0.3 - d), u, lam, self._p, self._w)) / (2 * d)
        self.assertEqual(rates[0], 0.0)
        self.assertAlmostEqual(rates[1], -dHdS, places=7)
        self.assertAlmostEqual(rates[2], -dHdR, places=7)

    def testHamiltonianConstant(self):
        '''Test the Hamiltonian is constant along a constant-control extremal.'''
        grid = TimeGrid(10.0, 200)
        u = ControlValue(0.6, 0.3)
        traj = integrate_costate_backward(self._run(grid, u.u_P, u.u_V), self._p, self._w)
        Hs = numpy.array([hamiltonian(traj.state(k), u, traj.costate(k), self._p, self._w)
                          for k in range(traj.nodeCount())])
        self.assertLess(numpy.max(numpy.abs(Hs - Hs[-1])), 1e-5 * (1 + abs(Hs[-1])))

    def testSwitchingArrays(self):
        '''Test the stored switching functions agree with direct evaluation.'''
        grid = TimeGrid(10.0, 100)
        traj = integrate_costate_backward(self._run(grid, 0.6, 0.3), self._p, self._w)
        for k in [0, 37, 100]:
            phi = switching_functions(traj.state(k), traj.costate(k), self._p, self._w)
            self.assertAlmostEqual(traj.phi[k, 0], phi.phi_P, places=12)
            self.assertAlmostEqual(traj.phi[k, 1], phi.phi_V, places=12)


    # ---------- Quadrature ----------

    def testInterleave(self):
        '''Test interleaving nodes and midpoints.'''
        xs = interleave(numpy.array([0.0, 2.0, 4.0]), numpy.array([1.0, 3.0]))
        numpy.testing.assert_array_equal(xs, [0.0, 1.0, 2.0, 3.0, 4.0])

    def testMidpoints(self):
        '''Test the reconstructed midpoints lie close to integrated ones.'''
        grid = TimeGrid(10.0, 100)
        traj = self._run(grid, 0.6, 0.3)
        (zm, lm) = step_midpoints(traj, self._p, self._w)
        self.assertIsNone(lm)
        self.assertEqual(zm.shape, (100, 3))
        fine = self._run(TimeGrid(10.0, 200), 0.6, 0.3)
        numpy.testing.assert_allclose(zm, fine.states[1::2], atol=1e-5)

    def testSegmentIntegrals(self):
        '''Test integrating over segments.'''
        grid = TimeGrid(10.0, 100)
        traj = self._run(grid, 0.6, 0.3)
        ts = grid.times()
        mids = (ts[:-1] + ts[1:]) / 2
        I = segment_integrals(traj, ts, mids, 5)
        # integral of t over [2k, 2k + 2]
        numpy.testing.assert_allclose(I, [4.0 * k + 2.0 for k in range(5)], atol=1e-12)
        with self.assertRaises(ArgumentError):
            segment_integrals(traj, ts, mids, 7)

    def testCostBreakdown(self):
        '''Test the parts of the cost sum to the objective.'''
        grid = TimeGrid(60.0, 600)
        u = ControlSignal.fromSegments(grid, [1.0, 0.2, 0.6], [0.0, 0.5, 0.1])
        traj = integrate_forward(self._z0, u, self._p, self._w, grid)
        cb = cost_breakdown(traj, self._p, self._w)
        self.assertGreater(cb.protection, 0.0)
        self.assertGreater(cb.vaccination, 0.0)
        self.assertGreater(cb.infection, 0.0)
        self.assertLess(abs(cb.total - traj.terminalCost()), 1e-6 * traj.terminalCost())
        self.assertEqual(set(cb.asDict().keys()), set(['protection', 'vaccination', 'infection', 'total']))

    def testCostBreakdownNoIntervention(self):
        '''Test that without intervention all the cost is infection.'''
        grid = TimeGrid(60.0, 600)
        traj = self._run(grid, 1.0, 0.0)
        cb = cost_breakdown(traj, self._p, self._w)
        self.assertEqual(cb.protection, 0.0)
        self.assertEqual(cb.vaccination, 0.0)
        self.assertLess(abs(cb.infection - traj.terminalCost()), 1e-6 * traj.terminalCost())


if __name__ == '__main__':
    unittest.main()
