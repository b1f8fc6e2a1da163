# Piecewise-constant control signals
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

from uuid import uuid4
from typing import List, Tuple, Sequence, Optional
import numpy
from pandas import DataFrame
from siri_control.exceptions import ArgumentError
from siri_control.model import ControlValue, ControlBounds
from siri_control.timegrid import TimeGrid


class ControlSignal:
    '''A piecewise-constant pair of controls :math:`(u_P, u_V)` over
    a uniform time grid, holding one value of each control per step.

    Control signals are immutable: operations that change values, such
    as :meth:`project`, return new signals. A signal defined on a coarse
    grid can be expanded onto any finer grid whose steps nest inside it
    using :meth:`refine`, which is how optimisation over a small number
    of segments drives integration on a finer grid.

    If no name is given then a UUID is generated.

    :param grid: the grid
    :param u_P: the protection relaxation on each step
    :param u_V: the vaccination rate on each step
    :param name: (optional) the name of the signal'''

    def __init__(self, grid: TimeGrid, u_P: Sequence[float], u_V: Sequence[float], name: str = None):
        if name is None:
            name = str(uuid4())
        u_P = numpy.array(u_P, dtype=float)
        u_V = numpy.array(u_V, dtype=float)
        if u_P.shape != (grid.n_steps,) or u_V.shape != (grid.n_steps,):
            raise ArgumentError(f'Control signal needs {grid.n_steps} values per control (got {u_P.shape} and {u_V.shape})')
        if not (numpy.all(numpy.isfinite(u_P)) and numpy.all(numpy.isfinite(u_V))):
            raise ArgumentError('Control values must be finite')
        u_P.setflags(write=False)
        u_V.setflags(write=False)
        self._name = name
        self._grid = grid
        self._u_P = u_P
        self._u_V = u_V

    @staticmethod
    def constant(grid: TimeGrid, u: ControlValue, name: str = None) -> 'ControlSignal':
        '''Create a signal holding the same controls throughout.

        :param grid: the grid
        :param u: the controls
        :param name: (optional) the signal name
        :returns: the signal'''
        return ControlSignal(grid,
                             numpy.full(grid.n_steps, u.u_P),
                             numpy.full(grid.n_steps, u.u_V),
                             name)

    @staticmethod
    def fromSegments(grid: TimeGrid, u_P: Sequence[float], u_V: Sequence[float], name: str = None) -> 'ControlSignal':
        '''Create a signal on a grid from values on a coarser set of equal
        segments. The number of segments must divide the number of steps.

        :param grid: the grid
        :param u_P: protection relaxation per segment
        :param u_V: vaccination per segment
        :param name: (optional) the signal name
        :returns: the signal'''
        segments = len(u_P)
        return ControlSignal(grid.coarsen(segments), u_P, u_V, name).refine(grid)


    # ---------- Accessing the signal ----------

    def name(self) -> str:
        '''Return the signal name.

        :returns: the name'''
        return self._name

    def grid(self) -> TimeGrid:
        '''Return the grid over which the signal is defined.

        :returns: the grid'''
        return self._grid

    def uPValues(self) -> numpy.ndarray:
        '''Return the (read-only) array of protection relaxation values.

        :returns: one value per step'''
        return self._u_P

    def uVValues(self) -> numpy.ndarray:
        '''Return the (read-only) array of vaccination values.

        :returns: one value per step'''
        return self._u_V

    def at(self, k: int) -> ControlValue:
        '''Return the controls applied over step k.

        :param k: the step index
        :returns: the controls'''
        return ControlValue(float(self._u_P[k]), float(self._u_V[k]))

    def __getitem__(self, t: float) -> ControlValue:
        '''Return the controls in force at the given time.

        :param t: the time
        :returns: the controls'''
        return self.at(self._grid.stepContaining(t))

    def __len__(self) -> int:
        '''Return the number of steps.

        :returns: the number of steps'''
        return self._grid.n_steps

    def transitions(self, jump_tol: float = 0.0) -> List[float]:
        '''Return the times at which either control changes by more
        than the given tolerance, in ascending order.

        :param jump_tol: (optional) the size of change ignored (defaults to 0)
        :returns: a list of times'''
        dP = numpy.abs(numpy.diff(self._u_P))
        dV = numpy.abs(numpy.diff(self._u_V))
        ks = numpy.nonzero((dP > jump_tol) | (dV > jump_tol))[0]
        return [self._grid.time(k + 1) for k in ks]


    # ---------- Bounds ----------

    def isAdmissible(self, bounds: ControlBounds, tol: float = 0.0) -> bool:
        '''Test whether all values lie within the control box.

        :param bounds: the bounds
        :param tol: (optional) slack allowed on each bound
        :returns: True if the signal is admissible'''
        return bool(numpy.all(self._u_P >= bounds.u_P_min - tol) and
                    numpy.all(self._u_P <= 1.0 + tol) and
                    numpy.all(self._u_V >= -tol) and
                    numpy.all(self._u_V <= bounds.u_V_max + tol))

    def project(self, bounds: ControlBounds) -> 'ControlSignal':
        '''Return the Euclidean projection of the signal onto the control
        box, which clips each value independently.

        :param bounds: the bounds
        :returns: the projected signal'''
        return ControlSignal(self._grid,
                             numpy.clip(self._u_P, bounds.u_P_min, 1.0),
                             numpy.clip(self._u_V, 0.0, bounds.u_V_max),
                             self._name)


    # ---------- Regridding ----------

    def refine(self, grid: TimeGrid) -> 'ControlSignal':
        '''Expand the signal onto a finer grid with the same horizon,
        each of whose steps lies within a single step of this signal.

        :param grid: the finer grid
        :returns: the signal on the finer grid'''
        if grid == self._grid:
            return self
        if abs(grid.horizon - self._grid.horizon) > 1e-12 * grid.horizon:
            raise ArgumentError(f'Control horizon {self._grid.horizon} does not match grid horizon {grid.horizon}')
        if grid.n_steps % self._grid.n_steps != 0:
            raise ArgumentError(f'Control steps ({self._grid.n_steps}) do not align with grid steps ({grid.n_steps})')
        m = grid.n_steps // self._grid.n_steps
        return ControlSignal(grid, numpy.repeat(self._u_P, m), numpy.repeat(self._u_V, m), self._name)

    def segmentValues(self, segments: int) -> Tuple[numpy.ndarray, numpy.ndarray]:
        '''Return the mean values of the controls over a number of equal
        segments, which must divide the number of steps.

        :param segments: the number of segments
        :returns: a pair of arrays of protection and vaccination values'''
        self._grid.coarsen(segments)
        m = self._grid.n_steps // segments
        return (self._u_P.reshape(segments, m).mean(axis=1),
                self._u_V.reshape(segments, m).mean(axis=1))


    # ---------- Converting ----------

    def toDataFrame(self) -> DataFrame:
        '''Convert the signal to a ``pandas`` DataFrame with one row
        per step, with columns ``t_start``, ``t_end``, ``u_P``, and ``u_V``.

        :returns: the DataFrame'''
        ts = self._grid.times()
        return DataFrame({'t_start': ts[:-1],
                          't_end': ts[1:],
                          'u_P': self._u_P,
                          'u_V': self._u_V})

    @staticmethod
    def fromDataFrame(df: DataFrame, name: Optional[str] = None) -> 'ControlSignal':
        '''Load a signal from a DataFrame in the form produced by
        :meth:`toDataFrame`.

        :param df: the DataFrame
        :param name: (optional) the signal name
        :returns: the signal'''
        if len(df) == 0:
            raise ArgumentError('Empty control table')
        grid = TimeGrid(float(df['t_end'].iloc[-1]), len(df))
        return ControlSignal(grid, df['u_P'].to_numpy(), df['u_V'].to_numpy(), name)
