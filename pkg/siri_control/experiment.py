# Base class for SIRI experiments
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

from typing import Dict, Any, Optional, Final
from epyc import Experiment
from siri_control.exceptions import SIRIError
from siri_control.scenario import Scenario


class SIRIExperiment(Experiment):
    '''Base class for experiments over the SIRI model. The experimental
    parameters are decoded into a :class:`Scenario` in :meth:`setUp`,
    using the ``P_*`` keys of that class, so any element of a scenario
    can be swept by a lab. Sub-classes override :meth:`do`.

    An experiment can also be given a fixed scenario, in which case
    the parameters only override the elements they name.

    :param scenario: (optional) a base scenario'''

    # Results
    FAILURE: Final[str] = 'siri.failure'    #: Result holding the type of any failure that terminated the run.

    def __init__(self, scenario: Scenario = None):
        super().__init__()
        self._base = scenario
        self._scenario: Optional[Scenario] = None

    def scenario(self) -> Scenario:
        '''Return the scenario for the current run.

        :returns: the scenario'''
        return self._scenario

    def setUp(self, params: Dict[str, Any]):
        '''Build the scenario from the base scenario (if any)
        overridden by the experimental parameters.

        :param params: the experimental parameters'''
        super().setUp(params)
        ps = {} if self._base is None else self._base.parameters()
        ps.update({k: v for (k, v) in params.items() if k.startswith('siri.')})
        self._scenario = Scenario.fromParameters(ps)

    def tearDown(self):
        '''Release the scenario.'''
        self._scenario = None
        super().tearDown()

    def failed(self, e: SIRIError) -> Dict[str, Any]:
        '''Record a domain failure as a result rather than an exception,
        so that sweeps carry on past parameter points that can't be solved.

        :param e: the exception
        :returns: a results dict'''
        return {self.FAILURE: type(e).__name__}
