# Pontryagin conditions along trajectories
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

'''The Hamiltonian, switching functions, and the tests of Pontryagin's
conditions applied to solved trajectories.

The Hamiltonian is affine in the controls, so an optimal control sits
at the bound selected by the sign of each switching function
(bang-bang), except on intervals where a switching function vanishes
(singular arcs). The diagnostics here find the switches and singular
arcs in a solution and measure how far it is from minimising the
Hamiltonian.
'''

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Dict, Any, Final, Tuple
import numpy
from siri_control.exceptions import ArgumentError
from siri_control.model import (ModelParams, CostWeights, ControlBounds, ControlValue, ReducedState,
                                fields_reduced)
from siri_control.timegrid import TimeGrid
from siri_control.controlsignal import ControlSignal
from siri_control.ode import CostateVec, Trajectory
from siri_control.lie import delta1, singularity_coefficients


logger = logging.getLogger(__name__)


# Controls
PROTECTION: Final[str] = 'u_P'      #: Name of the protection control in diagnostics.
VACCINATION: Final[str] = 'u_V'     #: Name of the vaccination control in diagnostics.

# Defaults
DEFAULT_HOLD_TOLERANCE: Final[float] = 1e-8    #: Switching-function magnitude below which controls are held.
DEFAULT_SINGULAR_FRACTION: Final[float] = 1e-3  #: Singular threshold as a fraction of the largest switching value.
DEFAULT_SINGULAR_LENGTH: Final[float] = 2.0     #: Shortest singular arc reported, days.
DELTA1_STATE_FLOOR: Final[float] = 1e-6        #: Smallest x_S and x_I at which the determinant is tracked.
SINGULAR_BOUND_DISTANCE: Final[float] = 1e-3   #: Distance from a bound within which a control is taken to sit on it.


@dataclass(frozen=True)
class SwitchingValues:
    '''The switching functions :math:`\\phi_P = \\langle \\lambda, g_P \\rangle`
    and :math:`\\phi_V = \\langle \\lambda, g_V \\rangle`.'''

    phi_P: float
    phi_V: float


def hamiltonian(z: ReducedState, u: ControlValue, lam: CostateVec, p: ModelParams, w: CostWeights) -> float:
    '''The Hamiltonian :math:`\\langle \\lambda, f + g_P u_P + g_V u_V \\rangle`.

    :param z: the state
    :param u: the controls
    :param lam: the costates
    :param p: the model parameters
    :param w: the cost weights
    :returns: the Hamiltonian'''
    (f, g_P, g_V) = fields_reduced(z, p, w)
    return float(lam.asArray() @ (f + g_P * u.u_P + g_V * u.u_V))


def switching_functions(z: ReducedState, lam: CostateVec, p: ModelParams, w: CostWeights) -> SwitchingValues:
    '''The switching functions, the coefficients of the controls in the
    Hamiltonian.

    :param z: the state
    :param lam: the costates
    :param p: the model parameters
    :param w: the cost weights
    :returns: the switching values'''
    (_, g_P, g_V) = fields_reduced(z, p, w)
    l = lam.asArray()
    return SwitchingValues(float(l @ g_P), float(l @ g_V))


def bang_bang_policy(phi: SwitchingValues, b: ControlBounds, prev: ControlValue,
                     tol: float = DEFAULT_HOLD_TOLERANCE) -> ControlValue:
    '''Minimise the Hamiltonian over the control box. A positive
    switching function selects the lower bound and a negative one the
    upper bound; within the tolerance of zero the previous control is held.

    :param phi: the switching values
    :param b: the control bounds
    :param prev: the previous controls
    :param tol: (optional) the hold tolerance
    :returns: the controls'''
    if not tol > 0:
        raise ArgumentError(f'Hold tolerance must be > 0 (got {tol})')
    if phi.phi_P > tol:
        u_P = b.u_P_min
    elif phi.phi_P < -tol:
        u_P = 1.0
    else:
        u_P = min(max(prev.u_P, b.u_P_min), 1.0)
    if phi.phi_V > tol:
        u_V = 0.0
    elif phi.phi_V < -tol:
        u_V = b.u_V_max
    else:
        u_V = min(max(prev.u_V, 0.0), b.u_V_max)
    return ControlValue(u_P, u_V)


def _nodeControls(traj: Trajectory):
    # the control at each node is that of the step it starts, repeating the last
    uP = numpy.append(traj.controls.uPValues(), traj.controls.uPValues()[-1])
    uV = numpy.append(traj.controls.uVValues(), traj.controls.uVValues()[-1])
    return (uP, uV)


def pmp_residuals(traj: Trajectory, b: ControlBounds) -> numpy.ndarray:
    '''The amount by which the controls fail to minimise the Hamiltonian
    at each node: the sum over both controls of each switching
    function's magnitude times the distance of the control from the bound
    that the switching function's sign selects.

    :param traj: the trajectory, with costates
    :param b: the control bounds
    :returns: the residual at each node'''
    if not traj.hasCostates():
        raise ArgumentError('PMP residual needs a trajectory with costates')
    if traj.controls is None:
        raise ArgumentError('PMP residual needs the controls of the trajectory')
    (uP, uV) = _nodeControls(traj)
    (phiP, phiV) = (traj.phi[:, 0], traj.phi[:, 1])
    return (numpy.maximum(0.0, phiP) * (uP - b.u_P_min) +
            numpy.maximum(0.0, -phiP) * (1.0 - uP) +
            numpy.maximum(0.0, phiV) * uV +
            numpy.maximum(0.0, -phiV) * (b.u_V_max - uV))


def pmp_residual(traj: Trajectory, b: ControlBounds, exempt: Optional[numpy.ndarray] = None) -> float:
    '''The largest violation of the Hamiltonian minimisation condition
    over the nodes of a trajectory. This is zero exactly when the
    controls minimise the Hamiltonian everywhere.

    :param traj: the trajectory, with costates
    :param b: the control bounds
    :param exempt: (optional) boolean mask of nodes to ignore, such as those on singular arcs
    :returns: the residual'''
    rs = pmp_residuals(traj, b)
    if exempt is not None:
        if exempt.shape != rs.shape:
            raise ArgumentError(f'Exemption mask should have shape {rs.shape} (got {exempt.shape})')
        rs = rs[~exempt]
    if len(rs) == 0:
        return 0.0
    return float(max(0.0, numpy.max(rs)))


# ---------- Switches and singular arcs ----------

@dataclass(frozen=True)
class SwitchEvent:
    '''A jump in a control at a step boundary.'''

    control: str
    time: float
    from_value: float
    to_value: float


@dataclass(frozen=True)
class SingularInterval:
    '''An interval on which a switching function stays close to zero.'''

    control: str
    t_start: float
    t_end: float
    mean_abs_phi: float

    @property
    def length(self) -> float:
        '''The length of the interval.'''
        return self.t_end - self.t_start


def _switches(name: str, us: numpy.ndarray, grid: TimeGrid, jump_tol: Optional[float], lo: Optional[float], hi: Optional[float]) -> List[SwitchEvent]:
    if jump_tol is not None:
        ks = numpy.nonzero(numpy.abs(numpy.diff(us)) > jump_tol)[0]
    else:
        # crossings of the middle of the box
        mid = (lo + hi) / 2
        side = us > mid
        ks = numpy.nonzero(side[1:] != side[:-1])[0]
    return [SwitchEvent(name, grid.time(k + 1), float(us[k]), float(us[k + 1])) for k in ks]


def detect_switches(u: ControlSignal, jump_tol: Optional[float] = None,
                    b: Optional[ControlBounds] = None) -> List[SwitchEvent]:
    '''Find the switches in a control signal.

    Given a jump tolerance, a switch is reported at every step boundary
    where either control jumps by more than the tolerance. Without one,
    a switch is reported wherever a control crosses the middle of its
    box, which reports a single switch even when the jump between the
    bounds passes through a step at an intermediate value.

    :param u: the controls
    :param jump_tol: (optional) the jump tolerance
    :param b: (optional) the control bounds, needed if there is no jump tolerance
    :returns: the switches in time order'''
    if jump_tol is None:
        if b is None:
            raise ArgumentError('Switch detection needs either a jump tolerance or control bounds')
        (loP, hiP, loV, hiV) = (b.u_P_min, 1.0, 0.0, b.u_V_max)
    else:
        if not jump_tol > 0:
            raise ArgumentError(f'Jump tolerance must be > 0 (got {jump_tol})')
        (loP, hiP, loV, hiV) = (None, None, None, None)
    grid = u.grid()
    ss = (_switches(PROTECTION, u.uPValues(), grid, jump_tol, loP, hiP) +
          _switches(VACCINATION, u.uVValues(), grid, jump_tol, loV, hiV))
    return sorted(ss, key=lambda s: (s.time, s.control))


def detect_singular_arcs(phi: numpy.ndarray, grid: TimeGrid,
                         eps: Optional[float] = None, min_len: float = DEFAULT_SINGULAR_LENGTH,
                         control: str = VACCINATION,
                         u: Optional[numpy.ndarray] = None,
                         box: Optional[Tuple[float, float]] = None) -> List[SingularInterval]:
    '''Find the maximal intervals on which a switching function stays
    within a tolerance of zero at every node.

    Given the control at each node and its box, nodes where the control
    sits within :attr:`SINGULAR_BOUND_DISTANCE` of a bound are excluded,
    so that a switching function that merely vanishes while the control
    rests on a bound (as happens where the costates decay towards the
    horizon) isn't mistaken for a singular arc.

    :param phi: the switching function at each node
    :param grid: the grid
    :param eps: (optional) the tolerance (defaults to a fraction of the largest magnitude of the switching function)
    :param min_len: (optional) the shortest interval reported, days
    :param control: (optional) the control the switching function belongs to
    :param u: (optional) the control at each node
    :param box: (optional) the bounds of the control, needed with the control values
    :returns: the intervals in time order'''
    phi = numpy.asarray(phi, dtype=float)
    if phi.shape != (grid.nodeCount(),):
        raise ArgumentError(f'Switching path should have {grid.nodeCount()} values (got {phi.shape})')
    if eps is None:
        eps = max(DEFAULT_SINGULAR_FRACTION * float(numpy.max(numpy.abs(phi))), 1e-12)
    if not eps > 0:
        raise ArgumentError(f'Singular tolerance must be > 0 (got {eps})')
    if not min_len > 0:
        raise ArgumentError(f'Minimum singular length must be > 0 (got {min_len})')

    small = numpy.abs(phi) < eps
    if u is not None:
        if box is None:
            raise ArgumentError('Excluding controls on their bounds needs the bounds')
        u = numpy.asarray(u, dtype=float)
        if u.shape != phi.shape:
            raise ArgumentError(f'Control path should have {grid.nodeCount()} values (got {u.shape})')
        (lo, hi) = box
        small &= (u > lo + SINGULAR_BOUND_DISTANCE) & (u < hi - SINGULAR_BOUND_DISTANCE)
    intervals = []
    k = 0
    N = len(phi)
    while k < N:
        if small[k]:
            j = k
            while j + 1 < N and small[j + 1]:
                j += 1
            (t0, t1) = (grid.time(k), grid.time(j))
            if t1 - t0 >= min_len - 1e-9 * grid.step:
                intervals.append(SingularInterval(control, t0, t1,
                                                  float(numpy.mean(numpy.abs(phi[k:j + 1])))))
            k = j + 1
        else:
            k += 1
    return intervals


def singular_mask(intervals: List[SingularInterval], grid: TimeGrid) -> numpy.ndarray:
    '''Mark the nodes lying within any of a list of intervals.

    :param intervals: the intervals
    :param grid: the grid
    :returns: a boolean array over the nodes'''
    ts = grid.times()
    mask = numpy.zeros(len(ts), dtype=bool)
    tol = 1e-9 * grid.step
    for iv in intervals:
        mask |= (ts >= iv.t_start - tol) & (ts <= iv.t_end + tol)
    return mask


# ---------- Diagnostics ----------

@dataclass(frozen=True, eq=False)
class DiagnosticsReport:
    '''The diagnostics of a solved trajectory.'''

    switch_times: List[SwitchEvent]
    singular_intervals: List[SingularInterval]
    pmp_residual: float
    delta1_min_abs: Optional[float]
    kappa_summary: Optional[Dict[str, float]]
    delta1_trace: numpy.ndarray = field(repr=False)

    def switchesOf(self, control: str) -> List[SwitchEvent]:
        '''Return the switches of one control.

        :param control: the control name
        :returns: the switches'''
        return [s for s in self.switch_times if s.control == control]

    def singularIntervalsOf(self, control: str) -> List[SingularInterval]:
        '''Return the singular intervals of one control.

        :param control: the control name
        :returns: the intervals'''
        return [s for s in self.singular_intervals if s.control == control]

    def asDict(self) -> Dict[str, Any]:
        '''Return the report as a JSON-friendly dict, without the trace.

        :returns: the dict'''
        return dict(switch_times=[dict(control=s.control, time=s.time, from_value=s.from_value, to_value=s.to_value)
                                  for s in self.switch_times],
                    singular_intervals=[dict(control=s.control, t_start=s.t_start, t_end=s.t_end, mean_abs_phi=s.mean_abs_phi)
                                        for s in self.singular_intervals],
                    pmp_residual=self.pmp_residual,
                    delta1_min_abs=self.delta1_min_abs,
                    kappa_summary=self.kappa_summary)


def diagnose(traj: Trajectory, p: ModelParams, w: CostWeights, b: ControlBounds,
             eps: Optional[float] = None, min_len: float = DEFAULT_SINGULAR_LENGTH) -> DiagnosticsReport:
    '''Diagnose a trajectory with costates: its switches, its singular
    arcs, its PMP residual with the singular arcs exempted, and the
    traces of the simultaneous-singularity determinant and of
    :math:`\\kappa`.

    :param traj: the trajectory, with costates
    :param p: the model parameters
    :param w: the cost weights
    :param b: the control bounds
    :param eps: (optional) singular-arc tolerance
    :param min_len: (optional) shortest singular arc, days
    :returns: the report'''
    if not traj.hasCostates():
        raise ArgumentError('Diagnostics need a trajectory with costates')
    grid = traj.grid
    switches = detect_switches(traj.controls, b=b)
    (uP, uV) = _nodeControls(traj)
    singular = (detect_singular_arcs(traj.phi[:, 0], grid, eps, min_len, PROTECTION,
                                     u=uP, box=(b.u_P_min, 1.0)) +
                detect_singular_arcs(traj.phi[:, 1], grid, eps, min_len, VACCINATION,
                                     u=uV, box=(0.0, b.u_V_max)))
    residual = pmp_residual(traj, b, singular_mask(singular, grid))

    d1 = numpy.empty(traj.nodeCount())
    kappas = []
    for k in range(traj.nodeCount()):
        z = traj.state(k)
        d1[k] = delta1(z, float(uP[k]), p, w)
        c = singularity_coefficients(z, p, w)
        if c.kappa_defined:
            kappas.append(c.kappa)
    tracked = (traj.states[:, 1] > DELTA1_STATE_FLOOR) & (traj.infected() > DELTA1_STATE_FLOOR)
    d1_min = float(numpy.min(numpy.abs(d1[tracked]))) if numpy.any(tracked) else None
    kappa_summary = None
    if len(kappas) > 0:
        kappa_summary = dict(min=float(numpy.min(kappas)),
                             max=float(numpy.max(kappas)),
                             mean=float(numpy.mean(kappas)))

    logger.info('Diagnosed {n} switches, {m} singular intervals, PMP residual {r:.3g}'.format(n=len(switches), m=len(singular), r=residual))
    return DiagnosticsReport(switches, singular, residual, d1_min, kappa_summary, d1)
