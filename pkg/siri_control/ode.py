# Forward and backward integration of the Mayer-form dynamics
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

'''Fixed-step integration of the controlled dynamics.

States are integrated forward with the classical fourth-order
Runge-Kutta scheme on a uniform grid whose nodes include every point
at which the controls change, so no step straddles a discontinuity.
Costates are integrated backward with the same scheme, taking the
states at the half-step stage points from the cubic Hermite
interpolant of the stored nodes.
'''

import math
import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Dict, Any, Final
import numpy
from pandas import DataFrame
from scipy.integrate import simpson
from siri_control.exceptions import IntegrationDivergedError, ArgumentError
from siri_control.model import (ModelParams, CostWeights, ControlValue, EpidemicState, ReducedState,
                                mayer_rates, fields_arrays)
from siri_control.timegrid import TimeGrid
from siri_control.controlsignal import ControlSignal


logger = logging.getLogger(__name__)


DIVERGENCE_TOLERANCE: Final[float] = 1e-7   #: Invariant breach tolerated before an integration is declared diverged.


@dataclass(frozen=True)
class CostateVec:
    '''The costates (adjoint variables) of the Mayer-form state.'''

    lambda_C: float
    lambda_S: float
    lambda_R: float

    def asArray(self) -> numpy.ndarray:
        '''Return the costates as an array.

        :returns: the array :math:`(\\lambda_C, \\lambda_S, \\lambda_R)`'''
        return numpy.array([self.lambda_C, self.lambda_S, self.lambda_R])


@dataclass(frozen=True, eq=False)
class Trajectory:
    '''A solution of the Mayer-form dynamics on a grid.

    States are held as an array with one row :math:`(x_C, x_S, x_R)`
    per node, and the controls as a signal on the same grid. Costates
    and switching functions are optional, and are filled in by
    :func:`integrate_costate_backward`. All arrays are read-only.

    :param grid: the grid
    :param states: array of shape (n + 1, 3)
    :param controls: the controls applied over each step
    :param costates: (optional) array of shape (n + 1, 3)
    :param phi: (optional) array of shape (n + 1, 2) of :math:`(\\phi_P, \\phi_V)`'''

    grid: TimeGrid
    states: numpy.ndarray
    controls: Optional[ControlSignal]
    costates: Optional[numpy.ndarray] = None
    phi: Optional[numpy.ndarray] = None

    def __post_init__(self):
        N = self.grid.nodeCount()
        if self.states.shape != (N, 3):
            raise ArgumentError(f'States should have shape {(N, 3)} (got {self.states.shape})')
        if self.states[0, 0] != 0.0:
            raise ArgumentError(f'Trajectory must start with zero accumulated cost (got {self.states[0, 0]})')
        if self.controls is not None and self.controls.grid() != self.grid:
            raise ArgumentError('Controls are not defined on the trajectory grid')
        if self.costates is not None and self.costates.shape != (N, 3):
            raise ArgumentError(f'Costates should have shape {(N, 3)} (got {self.costates.shape})')
        if self.phi is not None and self.phi.shape != (N, 2):
            raise ArgumentError(f'Switching functions should have shape {(N, 2)} (got {self.phi.shape})')
        for a in [self.states, self.costates, self.phi]:
            if a is not None:
                a.setflags(write=False)

    def nodeCount(self) -> int:
        '''Return the number of nodes.

        :returns: the node count'''
        return self.grid.nodeCount()

    def times(self) -> numpy.ndarray:
        '''Return the node times.

        :returns: the times'''
        return self.grid.times()

    def hasCostates(self) -> bool:
        '''Test whether costates and switching functions are present.

        :returns: True if the trajectory has costates'''
        return self.costates is not None and self.phi is not None

    def state(self, k: int) -> ReducedState:
        '''Return the state at node k, projected back onto the simplex
        to remove the drift an integration is allowed.

        :param k: the node index
        :returns: the state'''
        z = numpy.maximum(self.states[k], 0.0)
        total = z[1] + z[2]
        if total > 1.0:
            z[1:] /= total
        return ReducedState.fromArray(z)

    def costate(self, k: int) -> CostateVec:
        '''Return the costate at node k.

        :param k: the node index
        :returns: the costate'''
        if self.costates is None:
            raise ArgumentError('Trajectory has no costates')
        return CostateVec(*(float(v) for v in self.costates[k]))

    def terminalCost(self) -> float:
        '''Return the accumulated cost at the horizon, the objective.

        :returns: :math:`x_C(T)`'''
        return float(self.states[-1, 0])

    def infected(self) -> numpy.ndarray:
        '''Return the infected fraction at each node.

        :returns: the array of :math:`x_I`'''
        return 1.0 - self.states[:, 1] - self.states[:, 2]

    def withCostates(self, costates: numpy.ndarray, phi: numpy.ndarray) -> 'Trajectory':
        '''Return a copy of this trajectory with costates attached.

        :param costates: the costates at each node
        :param phi: the switching functions at each node
        :returns: a new trajectory'''
        return Trajectory(self.grid, self.states, self.controls, costates, phi)

    def toDataFrame(self) -> DataFrame:
        '''Convert the trajectory to a ``pandas`` DataFrame with one row
        per node. Controls are those of the step starting at each node,
        with the last node repeating the controls of the final step.
        Switching function and costate columns are included when present.

        :returns: the DataFrame'''
        cols: Dict[str, Any] = dict(t=self.times(),
                                    x_S=self.states[:, 1],
                                    x_I=self.infected(),
                                    x_R=self.states[:, 2],
                                    x_C=self.states[:, 0])
        if self.controls is not None:
            cols['u_P'] = numpy.append(self.controls.uPValues(), self.controls.uPValues()[-1])
            cols['u_V'] = numpy.append(self.controls.uVValues(), self.controls.uVValues()[-1])
        if self.hasCostates():
            cols['phi_P'] = self.phi[:, 0]
            cols['phi_V'] = self.phi[:, 1]
            cols['lambda_S'] = self.costates[:, 1]
            cols['lambda_R'] = self.costates[:, 2]
        return DataFrame(cols)


# ---------- Forward integration ----------

def _diverged(msg: str, k: int, grid: TimeGrid):
    t = grid.time(k)
    logger.warning('Integration diverged at node {k} (t = {t:.4g}): {m}'.format(k=k, t=t, m=msg))
    raise IntegrationDivergedError(msg, k, t)


def integrate_forward(z0: ReducedState, u: ControlSignal, p: ModelParams, w: CostWeights, grid: TimeGrid) -> Trajectory:
    '''Integrate the Mayer-form dynamics forward from an initial state.

    The controls may be defined on any grid whose steps nest within
    those of the integration grid. After every step the state is checked
    against the invariants of the simplex and the monotonicity of the
    accumulated cost, and the integration is abandoned at the first node
    breaching them by more than :attr:`DIVERGENCE_TOLERANCE`.

    :param z0: the initial state, with zero accumulated cost
    :param u: the controls
    :param p: the model parameters
    :param w: the cost weights
    :param grid: the integration grid
    :returns: the trajectory'''
    if z0.x_C != 0.0:
        raise ArgumentError(f'Initial accumulated cost must be 0 (got {z0.x_C})')
    u = u.refine(grid)
    (uPs, uVs) = (u.uPValues(), u.uVValues())
    n = grid.n_steps
    h = grid.step
    h2 = h / 2
    tol = DIVERGENCE_TOLERANCE

    zs = numpy.empty((n + 1, 3))
    (c, s, r) = (0.0, z0.x_S, z0.x_R)
    zs[0] = (c, s, r)
    for k in range(n):
        (uP, uV) = (float(uPs[k]), float(uVs[k]))
        (c1, s1, r1) = mayer_rates(s, r, uP, uV, p, w)
        (c2, s2, r2) = mayer_rates(s + h2 * s1, r + h2 * r1, uP, uV, p, w)
        (c3, s3, r3) = mayer_rates(s + h2 * s2, r + h2 * r2, uP, uV, p, w)
        (c4, s4, r4) = mayer_rates(s + h * s3, r + h * r3, uP, uV, p, w)
        cn = c + h / 6 * (c1 + 2 * c2 + 2 * c3 + c4)
        s = s + h / 6 * (s1 + 2 * s2 + 2 * s3 + s4)
        r = r + h / 6 * (r1 + 2 * r2 + 2 * r3 + r4)

        if not (math.isfinite(cn) and math.isfinite(s) and math.isfinite(r)):
            _diverged('non-finite state', k + 1, grid)
        if s < -tol or r < -tol or s + r > 1 + tol:
            _diverged(f'state (x_S = {s}, x_R = {r}) left the simplex', k + 1, grid)
        if cn < c - tol:
            _diverged(f'accumulated cost decreased from {c} to {cn}', k + 1, grid)
        c = cn
        zs[k + 1] = (c, s, r)

    return Trajectory(grid, zs, u)


def simulate_full(state0: EpidemicState, u: ControlSignal, p: ModelParams, grid: TimeGrid) -> DataFrame:
    '''Integrate the full three-compartment dynamics, without cost
    accounting, returning the compartment fractions at each node.

    :param state0: the initial state
    :param u: the controls
    :param p: the model parameters
    :param grid: the integration grid
    :returns: a DataFrame with columns ``t``, ``x_S``, ``x_I``, and ``x_R``'''
    u = u.refine(grid)
    (uPs, uVs) = (u.uPValues(), u.uVValues())
    n = grid.n_steps
    h = grid.step
    h2 = h / 2
    tol = DIVERGENCE_TOLERANCE
    (b, bh, g) = (p.beta, p.beta_hat, p.gamma)

    def rates(S, I, R, uP, uV):
        infection = b * S * I * uP
        dS = -infection - S * uV
        dI = infection + bh * R * I * uP - g * I
        return (dS, dI, -(dS + dI))

    xs = numpy.empty((n + 1, 3))
    (S, I, R) = (state0.x_S, state0.x_I, state0.x_R)
    xs[0] = (S, I, R)
    for k in range(n):
        (uP, uV) = (float(uPs[k]), float(uVs[k]))
        k1 = rates(S, I, R, uP, uV)
        k2 = rates(S + h2 * k1[0], I + h2 * k1[1], R + h2 * k1[2], uP, uV)
        k3 = rates(S + h2 * k2[0], I + h2 * k2[1], R + h2 * k2[2], uP, uV)
        k4 = rates(S + h * k3[0], I + h * k3[1], R + h * k3[2], uP, uV)
        S = S + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        I = I + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        R = R + h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])

        if not (math.isfinite(S) and math.isfinite(I) and math.isfinite(R)):
            _diverged('non-finite state', k + 1, grid)
        if min(S, I, R) < -tol or abs(S + I + R - 1.0) > tol:
            _diverged(f'state ({S}, {I}, {R}) left the simplex', k + 1, grid)
        xs[k + 1] = (S, I, R)

    return DataFrame(dict(t=grid.times(), x_S=xs[:, 0], x_I=xs[:, 1], x_R=xs[:, 2]))


# ---------- Costates ----------

def _costate_rates(x_S, x_R, u_P, u_V, l_C, l_S, l_R, p: ModelParams, w: CostWeights):
    # works on floats or on equal-length arrays
    x_I = 1.0 - x_S - x_R
    dHdS = (l_C * (w.c_P * (1.0 - u_P) + w.c_V * u_V - w.c_I) +
            l_S * (-p.beta * (x_I - x_S) * u_P - u_V) +
            l_R * (p.beta_hat * x_R * u_P + u_V - p.gamma))
    dHdR = (l_C * (w.c_P * (1.0 - u_P) - w.c_I) +
            l_S * (p.beta * x_S * u_P) +
            l_R * (-p.beta_hat * (x_I - x_R) * u_P - p.gamma))
    return (0.0 * l_C, -dHdS, -dHdR)


def costate_rates(z: ReducedState, u: ControlValue, lam: CostateVec, p: ModelParams, w: CostWeights) -> numpy.ndarray:
    '''The right-hand side of the costate dynamics,
    :math:`\\dot{\\lambda} = -\\partial H / \\partial z`. The cost costate
    has zero rate, since nothing depends on the accumulated cost.

    :param z: the state
    :param u: the controls
    :param lam: the costates
    :param p: the model parameters
    :param w: the cost weights
    :returns: the array :math:`(\\dot{\\lambda}_C, \\dot{\\lambda}_S, \\dot{\\lambda}_R)`'''
    return numpy.array(_costate_rates(z.x_S, z.x_R, u.u_P, u.u_V,
                                      lam.lambda_C, lam.lambda_S, lam.lambda_R, p, w))


def switching_arrays(states: numpy.ndarray, costates: numpy.ndarray,
                     p: ModelParams, w: CostWeights) -> numpy.ndarray:
    '''Evaluate the switching functions along a path.

    :param states: array of shape (N, 3) of states
    :param costates: array of shape (N, 3) of costates
    :param p: the model parameters
    :param w: the cost weights
    :returns: array of shape (N, 2) of :math:`(\\phi_P, \\phi_V)`'''
    (_, g_P, g_V) = fields_arrays(states.T, p, w)
    return numpy.column_stack([numpy.sum(costates.T * g_P, axis=0),
                               numpy.sum(costates.T * g_V, axis=0)])


def integrate_costate_backward(traj: Trajectory, p: ModelParams, w: CostWeights) -> Trajectory:
    '''Integrate the costates backward from the terminal condition
    :math:`\\lambda(T) = (1, 0, 0)` along a stored trajectory, and
    evaluate the switching functions at every node.

    The scheme is RK4 in reversed time. The states at each step's
    midpoint come from the cubic Hermite interpolant of the two
    surrounding nodes, using the rates under that step's controls.

    :param traj: the trajectory
    :param p: the model parameters
    :param w: the cost weights
    :returns: a copy of the trajectory with costates and switching functions attached'''
    if traj.controls is None:
        raise ArgumentError('Costates need the controls of the trajectory')
    grid = traj.grid
    (uPs, uVs) = (traj.controls.uPValues(), traj.controls.uVValues())
    zs = traj.states
    n = grid.n_steps
    h = grid.step
    h2 = h / 2

    lams = numpy.empty((n + 1, 3))
    (lC, lS, lR) = (1.0, 0.0, 0.0)
    lams[n] = (lC, lS, lR)
    for k in reversed(range(n)):
        (uP, uV) = (float(uPs[k]), float(uVs[k]))
        (s0, r0) = (float(zs[k, 1]), float(zs[k, 2]))
        (s1, r1) = (float(zs[k + 1, 1]), float(zs[k + 1, 2]))
        (_, ds0, dr0) = mayer_rates(s0, r0, uP, uV, p, w)
        (_, ds1, dr1) = mayer_rates(s1, r1, uP, uV, p, w)
        sm = (s0 + s1) / 2 + h / 8 * (ds0 - ds1)
        rm = (r0 + r1) / 2 + h / 8 * (dr0 - dr1)

        (_, a1S, a1R) = _costate_rates(s1, r1, uP, uV, lC, lS, lR, p, w)
        (_, a2S, a2R) = _costate_rates(sm, rm, uP, uV, lC, lS - h2 * a1S, lR - h2 * a1R, p, w)
        (_, a3S, a3R) = _costate_rates(sm, rm, uP, uV, lC, lS - h2 * a2S, lR - h2 * a2R, p, w)
        (_, a4S, a4R) = _costate_rates(s0, r0, uP, uV, lC, lS - h * a3S, lR - h * a3R, p, w)
        lS = lS - h / 6 * (a1S + 2 * a2S + 2 * a3S + a4S)
        lR = lR - h / 6 * (a1R + 2 * a2R + 2 * a3R + a4R)
        lams[k] = (lC, lS, lR)

    return traj.withCostates(lams, switching_arrays(zs, lams, p, w))


# ---------- Step midpoints and quadrature ----------

def step_midpoints(traj: Trajectory, p: ModelParams, w: CostWeights) -> Tuple[numpy.ndarray, Optional[numpy.ndarray]]:
    '''Reconstruct the states (and costates, if present) at the midpoint
    of every step from the cubic Hermite interpolant of the two
    surrounding nodes, using the rates under that step's controls.

    :param traj: the trajectory
    :param p: the model parameters
    :param w: the cost weights
    :returns: arrays of shape (n, 3) of midpoint states and costates (None if absent)'''
    if traj.controls is None:
        raise ArgumentError('Midpoints need the controls of the trajectory')
    h = traj.grid.step
    (uP, uV) = (traj.controls.uPValues(), traj.controls.uVValues())
    (z0, z1) = (traj.states[:-1], traj.states[1:])
    d0 = numpy.column_stack(mayer_rates(z0[:, 1], z0[:, 2], uP, uV, p, w))
    d1 = numpy.column_stack(mayer_rates(z1[:, 1], z1[:, 2], uP, uV, p, w))
    zm = (z0 + z1) / 2 + h / 8 * (d0 - d1)

    lm = None
    if traj.costates is not None:
        (l0, l1) = (traj.costates[:-1], traj.costates[1:])
        e0 = numpy.column_stack(_costate_rates(z0[:, 1], z0[:, 2], uP, uV, l0[:, 0], l0[:, 1], l0[:, 2], p, w))
        e1 = numpy.column_stack(_costate_rates(z1[:, 1], z1[:, 2], uP, uV, l1[:, 0], l1[:, 1], l1[:, 2], p, w))
        lm = (l0 + l1) / 2 + h / 8 * (e0 - e1)
    return (zm, lm)


def interleave(nodes: numpy.ndarray, mids: numpy.ndarray) -> numpy.ndarray:
    '''Interleave node and midpoint samples into a single sequence on
    the half-step grid.

    :param nodes: n + 1 node samples
    :param mids: n midpoint samples
    :returns: 2n + 1 samples'''
    out = numpy.empty((2 * len(mids) + 1,) + nodes.shape[1:])
    out[0::2] = nodes
    out[1::2] = mids
    return out


@dataclass(frozen=True)
class CostBreakdown:
    '''The objective split into its protection, vaccination,
    and infection parts.'''

    protection: float
    vaccination: float
    infection: float

    @property
    def total(self) -> float:
        '''The sum of the parts.'''
        return self.protection + self.vaccination + self.infection

    def asDict(self) -> Dict[str, float]:
        '''Return the breakdown as a dict.

        :returns: the dict'''
        return dict(protection=self.protection, vaccination=self.vaccination,
                    infection=self.infection, total=self.total)


def cost_breakdown(traj: Trajectory, p: ModelParams, w: CostWeights) -> CostBreakdown:
    '''Split the accumulated cost into its three parts, each integrated
    by Simpson's rule over the nodes and the reconstructed step midpoints.
    The parts sum to :math:`x_C(T)` to within the accuracy of the
    integration.

    :param traj: the trajectory
    :param p: the model parameters
    :param w: the cost weights
    :returns: the breakdown'''
    (zm, _) = step_midpoints(traj, p, w)
    h = traj.grid.step
    (uP, uV) = (traj.controls.uPValues(), traj.controls.uVValues())
    (z0, z1) = (traj.states[:-1], traj.states[1:])

    def per_step(integrand) -> float:
        # Simpson on each step with that step's controls at both ends
        y = integrand(z0) + 4 * integrand(zm) + integrand(z1)
        return float(numpy.sum(y) * h / 6)

    return CostBreakdown(protection=per_step(lambda z: w.c_P * (1.0 - uP) * (z[:, 1] + z[:, 2])),
                         vaccination=per_step(lambda z: w.c_V * uV * z[:, 1]),
                         infection=per_step(lambda z: w.c_I * (1.0 - z[:, 1] - z[:, 2])))


def segment_integrals(traj: Trajectory, values: numpy.ndarray, mids: numpy.ndarray, segments: int) -> numpy.ndarray:
    '''Integrate a quantity over each of a number of equal segments of a
    trajectory's grid, using composite Simpson on the half-step grid.

    :param traj: the trajectory
    :param values: the quantity at each node, shape (n + 1,) or (n + 1, m)
    :param mids: the quantity at each step midpoint
    :param segments: the number of segments, which must divide the steps
    :returns: array of integrals, one row per segment'''
    grid = traj.grid
    grid.coarsen(segments)
    m = grid.n_steps // segments
    samples = interleave(values, mids)
    idx = (2 * m * numpy.arange(segments))[:, None] + numpy.arange(2 * m + 1)[None, :]
    return simpson(samples[idx], dx=grid.step / 2, axis=1)
