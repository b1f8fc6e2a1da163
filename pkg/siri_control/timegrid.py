# Uniform time grids
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

import math
from dataclasses import dataclass
from typing import Final
import numpy
from siri_control.exceptions import DomainError, ArgumentError


DEFAULT_HORIZON: Final[float] = 60.0     #: Default horizon, days.
DEFAULT_STEPS: Final[int] = 600          #: Default number of steps (h = 0.1 d).


@dataclass(frozen=True)
class TimeGrid:
    '''A uniform grid of :math:`n + 1` nodes over :math:`[0, T]`.

    States are held at the nodes, controls are constant across the
    steps between them.

    :param horizon: the horizon T, days
    :param n_steps: the number of steps'''

    horizon: float = DEFAULT_HORIZON
    n_steps: int = DEFAULT_STEPS

    def __post_init__(self):
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise DomainError(f'horizon must be > 0 (got {self.horizon})')
        if isinstance(self.n_steps, bool) or int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise DomainError(f'n_steps must be a positive integer (got {self.n_steps})')

    @property
    def t0(self) -> float:
        '''The start time, always 0.'''
        return 0.0

    @property
    def step(self) -> float:
        '''The step length :math:`h = T / n`.'''
        return self.horizon / self.n_steps

    def nodeCount(self) -> int:
        '''Return the number of nodes, one more than the number of steps.

        :returns: the node count'''
        return self.n_steps + 1

    def times(self) -> numpy.ndarray:
        '''Return the node times. The last node is exactly T.

        :returns: an array of times'''
        return numpy.linspace(0.0, self.horizon, self.nodeCount())

    def time(self, k: int) -> float:
        '''Return the time of node k.

        :param k: the node index
        :returns: the time'''
        if k == self.n_steps:
            return self.horizon
        return k * self.step

    def stepContaining(self, t: float) -> int:
        '''Return the index of the step containing the given time. Node
        times belong to the step they start, except T which belongs to
        the last step.

        :param t: the time
        :returns: the step index'''
        if t < 0 or t > self.horizon * (1 + 1e-12):
            raise ArgumentError(f'Time {t} outside [0, {self.horizon}]')
        return min(int(math.floor(t / self.step + 1e-9)), self.n_steps - 1)

    def coarsen(self, segments: int) -> 'TimeGrid':
        '''Return the grid with the same horizon and the given number
        of steps, which must divide the number of steps of this grid.

        :param segments: the number of steps of the coarser grid
        :returns: the coarser grid'''
        if segments < 1 or self.n_steps % segments != 0:
            raise ArgumentError(f'{segments} segments do not divide {self.n_steps} steps')
        return TimeGrid(self.horizon, segments)
