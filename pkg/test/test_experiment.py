# Tests of experiments
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
from epyc import Experiment, Lab, LabNotebook
from siri_control import *


class ExperimentTests(unittest.TestCase):

    def setUp(self):
        self._nb = LabNotebook()
        self._lab = Lab(notebook=self._nb)


    # ---------- Simulation ----------

    def testSimulateToEquilibrium(self):
        '''Test a long simulation settles at the endemic equilibrium.'''
        e = SIRISimulation(preset(2))
        rc = e.set({SIRISimulation.P_U_P: 0.2,
                    SIRISimulation.P_U_V: 0.1,
                    Scenario.P_HORIZON: 400.0,
                    Scenario.P_STEPS: 4000}).run()
        self.assertTrue(rc[Experiment.METADATA][Experiment.STATUS])
        res = rc[Experiment.RESULTS]
        self.assertLess(abs(res[SIRISimulation.X_S]), 1e-3)
        self.assertLess(abs(res[SIRISimulation.X_I] - 0.75), 1e-3)
        self.assertLess(abs(res[SIRISimulation.X_R] - 0.25), 1e-3)
        self.assertLess(res[SIRISimulation.DRIFT], 1e-9)
        self.assertGreaterEqual(res[SIRISimulation.PEAK], 0.2)
        self.assertGreater(res[SIRISimulation.COST], 0.0)

    def testSimulatePerturbed(self):
        '''Test a perturbed start also settles at the endemic equilibrium of case 1.'''
        e = SIRISimulation(preset(1))
        rc = e.set({SIRISimulation.P_U_P: 0.2,
                    SIRISimulation.P_U_V: 0.1,
                    Scenario.P_X_S0: 0.7,
                    Scenario.P_X_I0: 0.25,
                    Scenario.P_X_R0: 0.05,
                    Scenario.P_HORIZON: 400.0,
                    Scenario.P_STEPS: 4000}).run()
        res = rc[Experiment.RESULTS]
        self.assertLess(abs(res[SIRISimulation.X_I] - 0.24), 1e-3)
        self.assertLess(abs(res[SIRISimulation.X_R] - 0.76), 1e-3)

    def testSimulateInadmissible(self):
        '''Test inadmissible controls are recorded as a failure.'''
        e = SIRISimulation(preset(2).withGrid(10.0, 100))
        rc = e.set({SIRISimulation.P_U_P: 0.1}).run()
        self.assertTrue(rc[Experiment.METADATA][Experiment.STATUS])
        self.assertEqual(rc[Experiment.RESULTS][SIRIExperiment.FAILURE], 'DomainError')

    def testNoScenario(self):
        '''Test an experiment without enough parameters fails.'''
        e = SIRISimulation()
        rc = e.set({SIRISimulation.P_U_P: 0.5}).run()
        self.assertFalse(rc[Experiment.METADATA][Experiment.STATUS])

    def testParametersOnly(self):
        '''Test an experiment built entirely from parameters.'''
        e = SIRISimulation()
        params = preset(2).withGrid(10.0, 100).parameters()
        rc = e.set(params).run()
        self.assertTrue(rc[Experiment.METADATA][Experiment.STATUS])
        self.assertIn(SIRISimulation.COST, rc[Experiment.RESULTS])

    def testLab(self):
        '''Test sweeping protection levels in a lab.'''
        self._lab[SIRISimulation.P_U_P] = [0.2, 0.6, 1.0]
        self._lab[SIRISimulation.P_U_V] = 0.0
        self._lab[Scenario.P_HORIZON] = 10.0
        self._lab[Scenario.P_STEPS] = 100
        self._lab.runExperiment(SIRISimulation(preset(2)))
        df = self._nb.dataframe()
        self.assertEqual(len(df), 3)
        for k in [SIRISimulation.X_S, SIRISimulation.X_I, SIRISimulation.X_R,
                  SIRISimulation.COST, SIRISimulation.PEAK, SIRISimulation.DRIFT]:
            self.assertIn(k, df.columns)
        self.assertCountEqual(df[SIRISimulation.P_U_P], [0.2, 0.6, 1.0])


    # ---------- Optimal control ----------

    def testOptimalControl(self):
        '''Test solving as an experiment.'''
        e = SIRIOptimalControl(preset(2).withGrid(10.0, 100), SolveOptions(segments=10, max_iters=20))
        rc = e.set({}).run()
        self.assertTrue(rc[Experiment.METADATA][Experiment.STATUS])
        res = rc[Experiment.RESULTS]
        self.assertEqual(res[SIRIOptimalControl.COST], e.report().objective)
        self.assertLessEqual(res[SIRIOptimalControl.ITERATIONS], 20)
        self.assertEqual(res[SIRIOptimalControl.STOP_REASON], e.report().stop_reason)
        self.assertEqual(res[SIRIOptimalControl.CONVERGED], e.report().converged)
        self.assertIsInstance(res[SIRIOptimalControl.SWITCHES_P], list)
        self.assertAlmostEqual(res[SIRIOptimalControl.COST_PROTECTION] +
                               res[SIRIOptimalControl.COST_VACCINATION] +
                               res[SIRIOptimalControl.COST_INFECTION],
                               res[SIRIOptimalControl.COST], places=5)
        self.assertEqual(len(e.controls()), 10)

    def testOptimalControlOptions(self):
        '''Test solver options given as parameters.'''
        e = SIRIOptimalControl(preset(2).withGrid(10.0, 100), SolveOptions(segments=10, max_iters=5))
        e.set({SolveOptions.P_METHOD: FBSM}).run()
        self.assertEqual(e.report().method, FBSM)

    def testOptimalControlFails(self):
        '''Test a solve with unusable options is recorded as a failure.'''
        e = SIRIOptimalControl(preset(2).withGrid(10.0, 100))
        rc = e.set({SolveOptions.P_SEGMENTS: 7}).run()
        self.assertEqual(rc[Experiment.RESULTS][SIRIExperiment.FAILURE], 'ArgumentError')
        self.assertIsNone(e.report())


if __name__ == '__main__':
    unittest.main()
