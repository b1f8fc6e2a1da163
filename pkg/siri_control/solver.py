# Optimal control solvers
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

'''Solvers for the optimal protection and vaccination problem.

The direct solver treats the controls as piecewise-constant over a
number of equal segments and minimises the terminal cost by projected
gradient descent, with gradients from the costates: the derivative of
the cost with respect to a control on a segment is the integral of its
switching function over that segment. The forward-backward sweep
instead repeatedly replaces the controls by a damped step towards the
bang-bang controls that minimise the Hamiltonian.

Neither solver claims global optimality, since the problem isn't
convex. Every solution is diagnosed against Pontryagin's conditions.
'''

import logging
from dataclasses import dataclass, field
from typing import Tuple, List, Dict, Any, ClassVar, Final
import numpy
from siri_control.exceptions import DomainError
from siri_control.model import ControlValue
from siri_control.controlsignal import ControlSignal
from siri_control.ode import (Trajectory, CostBreakdown, integrate_forward, integrate_costate_backward,
                              step_midpoints, switching_arrays, segment_integrals, cost_breakdown)
from siri_control.pmp import SwitchingValues, DiagnosticsReport, bang_bang_policy, diagnose, DEFAULT_HOLD_TOLERANCE
from siri_control.scenario import Scenario


logger = logging.getLogger(__name__)


# Methods
DIRECT_SHOOTING: Final[str] = 'direct_shooting'   #: Projected-gradient direct shooting.
FBSM: Final[str] = 'fbsm'                         #: Forward-backward sweep.
METHODS: Final = (DIRECT_SHOOTING, FBSM)

DEFAULT_SEGMENTS: Final[int] = 120                #: Default number of control segments.
SHARPEN_DISTANCE: Final[float] = 1e-2             #: Distance from a bound within which sharpening snaps a value.
SHARPEN_SLACK: Final[float] = 1e-6                #: Relative increase in cost tolerated by sharpening.
BB_RANGE: Final[Tuple[float, float]] = (1e-3, 1e3)  #: Range of spectral steps, relative to the initial step.
STALL_WINDOW: Final[int] = 20                    #: Iterations over which the relative fall in cost is measured.

# Reasons a solve stopped
STOP_GRADIENT: Final[str] = 'gradient'          #: Projected gradient below the tolerance.
STOP_COST: Final[str] = 'cost'                  #: Cost stalled.
STOP_CHANGE: Final[str] = 'change'              #: Controls stopped changing (sweeps).
STOP_LINE_SEARCH: Final[str] = 'line_search'    #: No step gave sufficient decrease.
STOP_ITERATIONS: Final[str] = 'iterations'      #: Iteration limit reached.


def _flag(v: Any) -> bool:
    # parameters may arrive as strings from the command line or a notebook
    if isinstance(v, str):
        if v.strip().lower() in ('true', 'yes', 'on', '1'):
            return True
        if v.strip().lower() in ('false', 'no', 'off', '0', ''):
            return False
        raise DomainError(f'Not a boolean: {v}')
    return bool(v)


@dataclass(frozen=True)
class SolveOptions:
    '''Options for the solvers, convertible to and from experiment
    parameters in the same way as :class:`Scenario`.'''

    # Experiment parameters
    P_METHOD: ClassVar[str] = 'siri.solver.method'           #: Parameter for the solution method.
    P_SEGMENTS: ClassVar[str] = 'siri.solver.segments'       #: Parameter for the number of control segments.
    P_MAX_ITERS: ClassVar[str] = 'siri.solver.max_iters'     #: Parameter for the iteration limit.
    P_TOL: ClassVar[str] = 'siri.solver.tol'                 #: Parameter for the stopping tolerance.
    P_COST_TOL: ClassVar[str] = 'siri.solver.cost_tol'       #: Parameter for the relative cost stall tolerance.
    P_STEP: ClassVar[str] = 'siri.solver.armijo.step'        #: Parameter for the initial line-search step.
    P_SHRINK: ClassVar[str] = 'siri.solver.armijo.shrink'    #: Parameter for the line-search shrink factor.
    P_DECREASE: ClassVar[str] = 'siri.solver.armijo.decrease'  #: Parameter for the sufficient-decrease constant.
    P_SPECTRAL: ClassVar[str] = 'siri.solver.spectral'       #: Parameter for using spectral trial steps.
    P_DAMPING: ClassVar[str] = 'siri.solver.fbsm.damping'    #: Parameter for the sweep damping weight.
    P_SHARPEN: ClassVar[str] = 'siri.solver.sharpen'         #: Parameter for bang-bang sharpening.
    P_U_P_INIT: ClassVar[str] = 'siri.solver.init.u_P'       #: Parameter for the initial protection relaxation.
    P_U_V_INIT: ClassVar[str] = 'siri.solver.init.u_V'       #: Parameter for the initial vaccination.

    method: str = DIRECT_SHOOTING
    segments: int = DEFAULT_SEGMENTS
    max_iters: int = 2000
    tol: float = 1e-6
    cost_tol: float = 1e-10
    step: float = 1.0
    shrink: float = 0.5
    decrease: float = 1e-4
    spectral_step: bool = True
    damping: float = 0.3
    sharpen: bool = False
    initial_u_P: float = 1.0
    initial_u_V: float = 0.0
    max_backtracks: int = 60

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f'method must be one of {", ".join(METHODS)} (got {self.method})')
        for (n, v) in [('segments', self.segments), ('max_iters', self.max_iters), ('max_backtracks', self.max_backtracks)]:
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise DomainError(f'{n} must be a positive integer (got {v})')
        for (n, v) in [('tol', self.tol), ('step', self.step), ('decrease', self.decrease)]:
            if not v > 0:
                raise DomainError(f'{n} must be > 0 (got {v})')
        if not self.cost_tol >= 0:
            raise DomainError(f'cost_tol must be >= 0 (got {self.cost_tol})')
        if not 0 < self.shrink < 1:
            raise DomainError(f'shrink must lie in (0, 1) (got {self.shrink})')
        if not 0 < self.damping <= 1:
            raise DomainError(f'damping must lie in (0, 1] (got {self.damping})')

    def parameters(self) -> Dict[str, Any]:
        '''Return the options as a dict of experiment parameters.

        :returns: the parameters'''
        return {SolveOptions.P_METHOD: self.method,
                SolveOptions.P_SEGMENTS: self.segments,
                SolveOptions.P_MAX_ITERS: self.max_iters,
                SolveOptions.P_TOL: self.tol,
                SolveOptions.P_COST_TOL: self.cost_tol,
                SolveOptions.P_STEP: self.step,
                SolveOptions.P_SHRINK: self.shrink,
                SolveOptions.P_DECREASE: self.decrease,
                SolveOptions.P_SPECTRAL: self.spectral_step,
                SolveOptions.P_DAMPING: self.damping,
                SolveOptions.P_SHARPEN: self.sharpen,
                SolveOptions.P_U_P_INIT: self.initial_u_P,
                SolveOptions.P_U_V_INIT: self.initial_u_V}

    @staticmethod
    def fromParameters(params: Dict[str, Any]) -> 'SolveOptions':
        '''Build options from experiment parameters, using defaults for
        any that are missing.

        :param params: the parameters
        :returns: the options'''
        d = SolveOptions()
        return SolveOptions(method=str(params.get(SolveOptions.P_METHOD, d.method)),
                            segments=int(params.get(SolveOptions.P_SEGMENTS, d.segments)),
                            max_iters=int(params.get(SolveOptions.P_MAX_ITERS, d.max_iters)),
                            tol=float(params.get(SolveOptions.P_TOL, d.tol)),
                            cost_tol=float(params.get(SolveOptions.P_COST_TOL, d.cost_tol)),
                            step=float(params.get(SolveOptions.P_STEP, d.step)),
                            shrink=float(params.get(SolveOptions.P_SHRINK, d.shrink)),
                            decrease=float(params.get(SolveOptions.P_DECREASE, d.decrease)),
                            spectral_step=_flag(params.get(SolveOptions.P_SPECTRAL, d.spectral_step)),
                            damping=float(params.get(SolveOptions.P_DAMPING, d.damping)),
                            sharpen=_flag(params.get(SolveOptions.P_SHARPEN, d.sharpen)),
                            initial_u_P=float(params.get(SolveOptions.P_U_P_INIT, d.initial_u_P)),
                            initial_u_V=float(params.get(SolveOptions.P_U_V_INIT, d.initial_u_V)))


@dataclass(frozen=True, eq=False)
class SolveReport:
    '''The record of a solve.'''

    method: str
    cost_history: List[float]
    projected_gradient_norm: float
    iterations: int
    converged: bool
    stop_reason: str
    pmp_residual: float
    diagnostics: DiagnosticsReport
    cost_breakdown: CostBreakdown
    trajectory: Trajectory = field(repr=False)

    @property
    def objective(self) -> float:
        '''The final cost.'''
        return self.trajectory.terminalCost()

    def asDict(self) -> Dict[str, Any]:
        '''Return the report as a JSON-friendly dict.

        :returns: the dict'''
        return dict(method=self.method,
                    objective=self.objective,
                    cost_history=list(self.cost_history),
                    projected_gradient_norm=self.projected_gradient_norm,
                    iterations=self.iterations,
                    converged=self.converged,
                    stop_reason=self.stop_reason,
                    pmp_residual=self.pmp_residual,
                    cost_breakdown=self.cost_breakdown.asDict(),
                    diagnostics=self.diagnostics.asDict())


# ---------- Objective and gradient ----------

def objective(u: ControlSignal, scenario: Scenario) -> float:
    '''The cost of a control signal, the accumulated cost at the horizon.

    :param u: the controls
    :param scenario: the scenario
    :returns: the cost'''
    traj = integrate_forward(scenario.z0(), u, scenario.params, scenario.weights, scenario.grid())
    return traj.terminalCost()


def _gradient(traj: Trajectory, scenario: Scenario, segments: int) -> Tuple[numpy.ndarray, numpy.ndarray]:
    (p, w) = (scenario.params, scenario.weights)
    (zm, lm) = step_midpoints(traj, p, w)
    phim = switching_arrays(zm, lm, p, w)
    G = segment_integrals(traj, traj.phi, phim, segments)
    return (G[:, 0], G[:, 1])


def gradient_adjoint(u: ControlSignal, scenario: Scenario) -> Tuple[numpy.ndarray, numpy.ndarray]:
    '''The gradient of the cost with respect to the control values on
    each step of the control signal, computed by integrating the
    switching functions over each step.

    :param u: the controls, on a grid nesting into the scenario's
    :param scenario: the scenario
    :returns: a pair of arrays of derivatives with respect to protection and vaccination'''
    (p, w) = (scenario.params, scenario.weights)
    traj = integrate_forward(scenario.z0(), u, p, w, scenario.grid())
    traj = integrate_costate_backward(traj, p, w)
    return _gradient(traj, scenario, len(u))


def _projectedGradientNorm(uP, uV, gP, gV, scenario: Scenario) -> float:
    b = scenario.bounds
    rP = uP - numpy.clip(uP - gP, b.u_P_min, 1.0)
    rV = uV - numpy.clip(uV - gV, 0.0, b.u_V_max)
    return float(max(numpy.max(numpy.abs(rP)), numpy.max(numpy.abs(rV))))


class _Evaluator:
    '''Evaluate costs and gradients of per-segment controls.'''

    def __init__(self, scenario: Scenario, segments: int):
        self._scenario = scenario
        self._grid = scenario.grid()
        self._segmentGrid = self._grid.coarsen(segments)
        self._segments = segments
        self.evaluations = 0

    def signal(self, uP, uV) -> ControlSignal:
        return ControlSignal(self._segmentGrid, uP, uV, self._scenario.label)

    def forward(self, uP, uV) -> Trajectory:
        self.evaluations += 1
        s = self._scenario
        return integrate_forward(s.z0(), self.signal(uP, uV), s.params, s.weights, self._grid)

    def backward(self, traj: Trajectory) -> Tuple[Trajectory, numpy.ndarray, numpy.ndarray]:
        s = self._scenario
        traj = integrate_costate_backward(traj, s.params, s.weights)
        (gP, gV) = _gradient(traj, s, self._segments)
        return (traj, gP, gV)


def _initialControls(scenario: Scenario, opts: SolveOptions) -> Tuple[numpy.ndarray, numpy.ndarray]:
    b = scenario.bounds
    uP = numpy.full(opts.segments, min(max(opts.initial_u_P, b.u_P_min), 1.0))
    uV = numpy.full(opts.segments, min(max(opts.initial_u_V, 0.0), b.u_V_max))
    return (uP, uV)


def _finish(method: str, ev: _Evaluator, traj: Trajectory, uP, uV, gP, gV,
            history: List[float], iterations: int, stop_reason: str, scenario: Scenario) -> Tuple[ControlSignal, SolveReport]:
    converged = stop_reason in (STOP_GRADIENT, STOP_COST, STOP_CHANGE)
    (p, w, b) = (scenario.params, scenario.weights, scenario.bounds)
    diagnostics = diagnose(traj, p, w, b)
    report = SolveReport(method=method,
                         cost_history=history,
                         projected_gradient_norm=_projectedGradientNorm(uP, uV, gP, gV, scenario),
                         iterations=iterations,
                         converged=converged,
                         stop_reason=stop_reason,
                         pmp_residual=diagnostics.pmp_residual,
                         diagnostics=diagnostics,
                         cost_breakdown=cost_breakdown(traj, p, w),
                         trajectory=traj)
    logger.info('{m} solve of {l} {c} ({s}) after {i} iterations ({e} integrations): J = {j:.6g}, PMP residual {r:.3g}'.format(
        m=method, l=scenario.label, c='converged' if converged else 'did not converge', s=stop_reason,
        i=iterations, e=ev.evaluations, j=report.objective, r=report.pmp_residual))
    return (ev.signal(uP, uV), report)


# ---------- Direct shooting ----------

def solve_direct(scenario: Scenario, opts: SolveOptions = None) -> Tuple[ControlSignal, SolveReport]:
    '''Solve by projected gradient descent over piecewise-constant
    controls on equal segments, starting from no intervention.

    Each iteration takes a trial step (a safeguarded Barzilai-Borwein
    step if spectral steps are enabled), projects onto the control box,
    and backtracks until the Armijo sufficient-decrease condition holds,
    so the history of costs never increases. The solve converges when the
    max-norm of the projected gradient falls below the tolerance, or when
    the cost has fallen by no more than the cost tolerance (relative to
    the cost) over the last :attr:`STALL_WINDOW` iterations.

    :param scenario: the scenario
    :param opts: (optional) the solver options
    :returns: the controls and the solve report'''
    if opts is None:
        opts = SolveOptions()
    b = scenario.bounds
    ev = _Evaluator(scenario, opts.segments)
    logger.info('Direct shooting solve of {l} over {k} segments'.format(l=scenario.label, k=opts.segments))

    (uP, uV) = _initialControls(scenario, opts)
    traj = ev.forward(uP, uV)
    J = traj.terminalCost()
    (traj, gP, gV) = ev.backward(traj)
    history = [J]
    stop = STOP_ITERATIONS
    (xPrev, gPrev) = (None, None)
    it = 0
    while it < opts.max_iters:
        pgn = _projectedGradientNorm(uP, uV, gP, gV, scenario)
        if pgn <= opts.tol:
            stop = STOP_GRADIENT
            break
        if it >= STALL_WINDOW and history[-1 - STALL_WINDOW] - J <= opts.cost_tol * abs(J):
            stop = STOP_COST
            break

        # trial step
        alpha = opts.step
        x = numpy.concatenate([uP, uV])
        g = numpy.concatenate([gP, gV])
        if opts.spectral_step and xPrev is not None:
            s = x - xPrev
            y = g - gPrev
            sy = float(s @ y)
            if sy > 0:
                alpha = min(max(float(s @ s) / sy, BB_RANGE[0] * opts.step), BB_RANGE[1] * opts.step)

        # backtracking line search
        accepted = False
        for _ in range(opts.max_backtracks):
            nP = numpy.clip(uP - alpha * gP, b.u_P_min, 1.0)
            nV = numpy.clip(uV - alpha * gV, 0.0, b.u_V_max)
            decrease = float(gP @ (nP - uP) + gV @ (nV - uV))
            trial = ev.forward(nP, nV)
            Jn = trial.terminalCost()
            if Jn <= J + opts.decrease * decrease:
                accepted = True
                break
            alpha *= opts.shrink
        if not accepted:
            logger.debug('Line search failed at iteration {i}'.format(i=it))
            stop = STOP_LINE_SEARCH
            break

        (xPrev, gPrev) = (x, g)
        (uP, uV, J) = (nP, nV, Jn)
        (traj, gP, gV) = ev.backward(trial)
        history.append(J)
        it += 1
        logger.debug('Iteration {i}: J = {j:.10g}, projected gradient {g:.3g}, step {a:.3g}'.format(i=it, j=J, g=pgn, a=alpha))

    if opts.sharpen and stop in (STOP_GRADIENT, STOP_COST):
        (uP, uV, traj, gP, gV, J) = _sharpen(ev, scenario, uP, uV, traj, gP, gV, J)

    return _finish(DIRECT_SHOOTING, ev, traj, uP, uV, gP, gV, history, it, stop, scenario)


def _sharpen(ev: _Evaluator, scenario: Scenario, uP, uV, traj, gP, gV, J):
    # snap values near a bound onto it, keeping the result only if the cost barely moves
    b = scenario.bounds

    def snap(u, lo, hi):
        u = u.copy()
        u[numpy.abs(u - lo) < SHARPEN_DISTANCE] = lo
        u[numpy.abs(u - hi) < SHARPEN_DISTANCE] = hi
        return u

    sP = snap(uP, b.u_P_min, 1.0)
    sV = snap(uV, 0.0, b.u_V_max)
    sharpened = ev.forward(sP, sV)
    Js = sharpened.terminalCost()
    if Js <= J * (1 + SHARPEN_SLACK):
        logger.debug('Sharpened controls, J {j:.10g} -> {js:.10g}'.format(j=J, js=Js))
        (straj, sgP, sgV) = ev.backward(sharpened)
        return (sP, sV, straj, sgP, sgV, Js)
    logger.debug('Sharpening rejected, J {j:.10g} -> {js:.10g}'.format(j=J, js=Js))
    return (uP, uV, traj, gP, gV, J)


# ---------- Forward-backward sweep ----------

def solve_fbsm(scenario: Scenario, opts: SolveOptions = None) -> Tuple[ControlSignal, SolveReport]:
    '''Solve by the forward-backward sweep method. Each sweep integrates
    the states forward and the costates backward, finds the bang-bang
    controls that minimise the Hamiltonian given the mean switching
    function over each segment, and moves the controls part of the way
    towards them. The sweep stops when the largest change in a control
    falls below the tolerance.

    Sweeps may oscillate for bang-bang problems, in which case the report
    says the solve did not converge.

    :param scenario: the scenario
    :param opts: (optional) the solver options
    :returns: the controls and the solve report'''
    if opts is None:
        opts = SolveOptions(method=FBSM)
    b = scenario.bounds
    ev = _Evaluator(scenario, opts.segments)
    segLen = scenario.horizon / opts.segments
    wt = opts.damping
    logger.info('Forward-backward sweep solve of {l} over {k} segments'.format(l=scenario.label, k=opts.segments))

    (uP, uV) = _initialControls(scenario, opts)
    history = []
    stop = None
    it = 0
    while True:
        traj = ev.forward(uP, uV)
        (traj, gP, gV) = ev.backward(traj)
        history.append(traj.terminalCost())
        if stop is not None:
            break
        if it >= opts.max_iters:
            stop = STOP_ITERATIONS
            break

        tol = DEFAULT_HOLD_TOLERANCE * (1 + float(numpy.max(numpy.abs(traj.phi))))
        bP = numpy.empty(opts.segments)
        bV = numpy.empty(opts.segments)
        for k in range(opts.segments):
            u = bang_bang_policy(SwitchingValues(gP[k] / segLen, gV[k] / segLen), b,
                                 ControlValue(uP[k], uV[k]), tol)
            (bP[k], bV[k]) = (u.u_P, u.u_V)
        nP = (1 - wt) * uP + wt * bP
        nV = (1 - wt) * uV + wt * bV
        change = float(max(numpy.max(numpy.abs(nP - uP)), numpy.max(numpy.abs(nV - uV))))
        (uP, uV) = (nP, nV)
        it += 1
        logger.debug('Sweep {i}: J = {j:.10g}, control change {c:.3g}'.format(i=it, j=history[-1], c=change))
        if change < opts.tol:
            stop = STOP_CHANGE

    return _finish(FBSM, ev, traj, uP, uV, gP, gV, history, it, stop, scenario)


def solve(scenario: Scenario, opts: SolveOptions = None) -> Tuple[ControlSignal, SolveReport]:
    '''Solve using the method named in the options.

    :param scenario: the scenario
    :param opts: (optional) the solver options
    :returns: the controls and the solve report'''
    if opts is None:
        opts = SolveOptions()
    if opts.method == FBSM:
        return solve_fbsm(scenario, opts)
    else:
        return solve_direct(scenario, opts)
