# Optimal control as an experiment
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
from typing import Dict, Any, Optional, Final
from siri_control.exceptions import SIRIError
from siri_control.controlsignal import ControlSignal
from siri_control.pmp import PROTECTION, VACCINATION
from siri_control.solver import SolveOptions, SolveReport, solve
from siri_control.experiment import SIRIExperiment


logger = logging.getLogger(__name__)


class SIRIOptimalControl(SIRIExperiment):
    '''Solve the optimal control problem for a scenario. The solver
    options are taken from the ``siri.solver.*`` parameters, falling
    back to those given at construction.

    The summary of the solve goes into the results. The controls
    and full report of the most recent run stay available from
    :meth:`controls` and :meth:`report`.

    :param scenario: (optional) a base scenario
    :param opts: (optional) base solver options'''

    # Results
    COST: Final[str] = 'siri.oc.J'                          #: Result holding the optimal cost.
    CONVERGED: Final[str] = 'siri.oc.converged'             #: Result holding whether the solver converged.
    STOP_REASON: Final[str] = 'siri.oc.stop_reason'         #: Result holding the rule that stopped the solver.
    ITERATIONS: Final[str] = 'siri.oc.iterations'           #: Result holding the iterations taken.
    PGNORM: Final[str] = 'siri.oc.pgnorm'                   #: Result holding the final projected gradient norm.
    PMP_RESIDUAL: Final[str] = 'siri.oc.pmp_residual'       #: Result holding the residual of the maximum principle.
    SWITCHES_P: Final[str] = 'siri.oc.switches.u_P'         #: Result holding the switch times of protection.
    SWITCHES_V: Final[str] = 'siri.oc.switches.u_V'         #: Result holding the switch times of vaccination.
    SINGULAR: Final[str] = 'siri.oc.singular'               #: Result holding the number of singular vaccination intervals.
    COST_PROTECTION: Final[str] = 'siri.oc.J.protection'    #: Result holding the protection part of the cost.
    COST_VACCINATION: Final[str] = 'siri.oc.J.vaccination'  #: Result holding the vaccination part of the cost.
    COST_INFECTION: Final[str] = 'siri.oc.J.infection'      #: Result holding the infection part of the cost.

    def __init__(self, scenario=None, opts: SolveOptions = None):
        super().__init__(scenario)
        self._opts = SolveOptions() if opts is None else opts
        self._controls: Optional[ControlSignal] = None
        self._report: Optional[SolveReport] = None

    def controls(self) -> Optional[ControlSignal]:
        '''Return the optimal controls of the last run.

        :returns: the controls, or None'''
        return self._controls

    def report(self) -> Optional[SolveReport]:
        '''Return the solve report of the last run.

        :returns: the report, or None'''
        return self._report

    def do(self, params: Dict[str, Any]) -> Dict[str, Any]:
        '''Solve the problem.

        :param params: the experimental parameters
        :returns: the results'''
        ps = self._opts.parameters()
        ps.update({k: v for (k, v) in params.items() if k.startswith('siri.solver.')})
        opts = SolveOptions.fromParameters(ps)
        try:
            (self._controls, self._report) = solve(self.scenario(), opts)
        except SIRIError as e:
            logger.warning('Solve of {l} failed: {e}'.format(l=self.scenario().label, e=e))
            (self._controls, self._report) = (None, None)
            return self.failed(e)

        r = self._report
        d = r.diagnostics
        return {self.COST: r.objective,
                self.CONVERGED: r.converged,
                self.STOP_REASON: r.stop_reason,
                self.ITERATIONS: r.iterations,
                self.PGNORM: r.projected_gradient_norm,
                self.PMP_RESIDUAL: r.pmp_residual,
                self.SWITCHES_P: [s.time for s in d.switchesOf(PROTECTION)],
                self.SWITCHES_V: [s.time for s in d.switchesOf(VACCINATION)],
                self.SINGULAR: len(d.singularIntervalsOf(VACCINATION)),
                self.COST_PROTECTION: r.cost_breakdown.protection,
                self.COST_VACCINATION: r.cost_breakdown.vaccination,
                self.COST_INFECTION: r.cost_breakdown.infection}
