# Simulation under fixed controls
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

import logging
import numpy
from typing import Dict, Any, Final
from siri_control.exceptions import SIRIError
from siri_control.model import ControlValue
from siri_control.controlsignal import ControlSignal
from siri_control.ode import integrate_forward, simulate_full
from siri_control.experiment import SIRIExperiment


logger = logging.getLogger(__name__)


class SIRISimulation(SIRIExperiment):
    '''Simulate a scenario under constant controls, which default to
    no intervention.'''

    # Experimental parameters
    P_U_P: Final[str] = 'siri.simulation.u_P'      #: Parameter for the protection control.
    P_U_V: Final[str] = 'siri.simulation.u_V'      #: Parameter for the vaccination control.

    # Results
    X_S: Final[str] = 'siri.simulation.x_S'        #: Result holding the terminal susceptible fraction.
    X_I: Final[str] = 'siri.simulation.x_I'        #: Result holding the terminal infected fraction.
    X_R: Final[str] = 'siri.simulation.x_R'        #: Result holding the terminal recovered fraction.
    COST: Final[str] = 'siri.simulation.J'         #: Result holding the accumulated cost.
    PEAK: Final[str] = 'siri.simulation.peak'      #: Result holding the peak infected fraction.
    DRIFT: Final[str] = 'siri.simulation.drift'    #: Result holding the largest departure from the simplex.

    def do(self, params: Dict[str, Any]) -> Dict[str, Any]:
        '''Integrate the dynamics.

        :param params: the experimental parameters
        :returns: the results'''
        s = self.scenario()
        u = ControlValue(float(params.get(self.P_U_P, 1.0)), float(params.get(self.P_U_V, 0.0)))
        try:
            s.bounds.check(u)
            grid = s.grid()
            sig = ControlSignal.constant(grid, u)
            traj = integrate_forward(s.z0(), sig, s.params, s.weights, grid)
            df = simulate_full(s.x0, sig, s.params, grid)
        except SIRIError as e:
            logger.warning('Simulation of {l} failed: {e}'.format(l=s.label, e=e))
            return self.failed(e)

        drift = numpy.abs(df['x_S'] + df['x_I'] + df['x_R'] - 1.0).max()
        last = df.iloc[-1]
        return {self.X_S: float(last['x_S']),
                self.X_I: float(last['x_I']),
                self.X_R: float(last['x_R']),
                self.COST: traj.terminalCost(),
                self.PEAK: float(df['x_I'].max()),
                self.DRIFT: float(drift)}
