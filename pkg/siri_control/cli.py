# Command-line interface
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

'''The ``siri-control`` command. Each sub-command works on one
scenario, either a preset case or a scenario file, and writes
machine-readable reports to standard output. Commands that write
run directories also write a manifest from which the run can be
repeated.

Exit codes are 0 for success, 1 for a runtime failure, 2 when
``check-assumptions`` finds an assumption that fails, and 64 for a
command line that can't be understood.
'''

import os
import sys
import json
import logging
from argparse import ArgumentParser, Namespace
from typing import List, Dict, Any, Optional, Final
from siri_control.exceptions import SIRIError, UsageError
from siri_control.model import ControlValue, check_assumptions, equilibria
from siri_control.controlsignal import ControlSignal
from siri_control.ode import Trajectory, integrate_forward, integrate_costate_backward
from siri_control.lie import bracket_errors
from siri_control.pmp import DiagnosticsReport, diagnose, DEFAULT_SINGULAR_LENGTH
from siri_control.scenario import Scenario, preset, load_scenario, PRESET_CASES
from siri_control.solver import SolveOptions, solve, DIRECT_SHOOTING, FBSM, DEFAULT_SEGMENTS
from siri_control.artifacts import (RunArtifacts, jsonable, write_trajectory_csv, write_controls_csv,
                                    write_report_json, write_manifest, read_manifest, read_trajectory_csv,
                                    TRAJECTORY_FILE, CONTROLS_FILE, REPORT_FILE, MANIFEST_FILE)
from siri_control.plot import write_plots_svg


logger = logging.getLogger(__name__)


# Exit codes
EXIT_OK: Final[int] = 0
EXIT_FAILURE: Final[int] = 1
EXIT_ASSUMPTIONS: Final[int] = 2
EXIT_USAGE: Final[int] = 64

# Method names on the command line
_METHODS: Final = {'direct': DIRECT_SHOOTING, 'fbsm': FBSM}


class _Parser(ArgumentParser):
    '''An argument parser that raises exceptions rather than exiting.'''

    def error(self, message: str):
        raise UsageError(message)


def _emit(obj: Any):
    sys.stdout.write(json.dumps(jsonable(obj), indent=2, sort_keys=True) + '\n')


# ---------- Scenarios ----------

def _caseNumber(s: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise UsageError(f'Bad case "{s}" (expected one of {", ".join(map(str, PRESET_CASES))})')


def _scenario(args: Namespace, case: Optional[str] = None) -> Scenario:
    '''Build the scenario named by the arguments, with any grid overrides.
    Changing only the horizon keeps the step size.'''
    if case is None:
        case = getattr(args, 'case', None)
    if case is not None and args.config is not None:
        raise UsageError('Give either --case or --config, not both')
    if case is not None:
        s = preset(_caseNumber(case))
    elif args.config is not None:
        s = load_scenario(args.config)
    else:
        raise UsageError('One of --case or --config is required')

    T = getattr(args, 'T', None)
    steps = getattr(args, 'steps', None)
    if T is not None and steps is None:
        steps = max(1, int(round(T / s.grid().step)))
    if T is not None or steps is not None:
        s = s.withGrid(T, steps)
    return s


def _writeRun(dir: str, scenario: Scenario, opts: Optional[SolveOptions], traj: Trajectory,
              report: Dict[str, Any], diagnostics: Optional[DiagnosticsReport],
              command: List[str], extra: Dict[str, Any] = None) -> RunArtifacts:
    '''Write a complete run directory.'''
    os.makedirs(dir, exist_ok=True)
    t = write_trajectory_csv(traj, os.path.join(dir, TRAJECTORY_FILE))
    c = write_controls_csv(traj.controls, os.path.join(dir, CONTROLS_FILE))
    r = write_report_json(report, os.path.join(dir, REPORT_FILE))
    m = write_manifest(scenario, opts, command, os.path.join(dir, MANIFEST_FILE), extra)
    svgs = write_plots_svg(traj, diagnostics, dir, scenario.bounds, title=scenario.label)
    return RunArtifacts(t.trajectory_csv, c.controls_csv, r.report_json, m.manifest_json, svgs.svgs)


# ---------- Sub-commands ----------

def _simulate(args: Namespace, argv: List[str]) -> int:
    s = _scenario(args)
    u = ControlValue(args.uP, args.uV)
    s.bounds.check(u)
    grid = s.grid()
    traj = integrate_forward(s.z0(), ControlSignal.constant(grid, u), s.params, s.weights, grid)
    z = traj.state(traj.nodeCount() - 1)
    summary = dict(label=s.label, u_P=u.u_P, u_V=u.u_V, T=s.horizon,
                   terminal=dict(x_S=z.x_S, x_I=z.x_I, x_R=z.x_R),
                   J=traj.terminalCost(),
                   peak_x_I=float(traj.infected().max()))
    if args.out is not None:
        traj = integrate_costate_backward(traj, s.params, s.weights)
        a = _writeRun(args.out, s, None, traj, summary, None, argv, extra=dict(u_P=u.u_P, u_V=u.u_V))
        summary['artifacts'] = a.paths()
    _emit(summary)
    return EXIT_OK


def _equilibria(args: Namespace, argv: List[str]) -> int:
    s = _scenario(args)
    _emit(equilibria(s.params, args.uP, args.uV, s.bounds).asDict())
    return EXIT_OK


def _checkAssumptions(args: Namespace, argv: List[str]) -> int:
    s = _scenario(args)
    r = check_assumptions(s.params, s.weights, s.bounds)
    d = r.asDict()
    d['label'] = s.label
    _emit(d)
    return EXIT_OK if r.allHold() else EXIT_ASSUMPTIONS


def _solveOne(s: Scenario, opts: SolveOptions, dir: str, argv: List[str]) -> Dict[str, Any]:
    if s.grid().n_steps % opts.segments != 0:
        raise UsageError(f'--segments {opts.segments} must divide the {s.grid().n_steps} integration steps')
    (u, report) = solve(s, opts)
    r = dict(label=s.label,
             assumptions=check_assumptions(s.params, s.weights, s.bounds).asDict(),
             solve=report.asDict())
    a = _writeRun(dir, s, opts, report.trajectory, r, report.diagnostics, argv)
    return dict(label=s.label, J=report.objective, converged=report.converged,
                iterations=report.iterations, pmp_residual=report.pmp_residual,
                switches=[dict(control=e.control, time=e.time) for e in report.diagnostics.switch_times],
                artifacts=a.paths())


def _solve(args: Namespace, argv: List[str]) -> int:
    if args.method not in _METHODS:
        raise UsageError(f'Unknown method {args.method}')
    opts = SolveOptions(method=_METHODS[args.method], segments=args.segments,
                        max_iters=args.max_iters, sharpen=args.sharpen)
    if args.case == 'all':
        if args.config is not None:
            raise UsageError('Give either --case or --config, not both')
        runs = []
        for n in PRESET_CASES:
            s = _scenario(args, case=str(n))
            runs.append(_solveOne(s, opts, os.path.join(args.out, s.label), argv))
        _emit(runs)
    else:
        _emit(_solveOne(_scenario(args), opts, args.out, argv))
    return EXIT_OK


def _diagnose(args: Namespace, argv: List[str]) -> int:
    m = read_manifest(os.path.join(args.run, MANIFEST_FILE))
    s = m.scenario
    traj = read_trajectory_csv(os.path.join(args.run, TRAJECTORY_FILE))
    d = diagnose(traj, s.params, s.weights, s.bounds, args.eps, args.min_len)
    r = d.asDict()
    r['label'] = s.label
    r['delta1_trace'] = dict(t=traj.times(), delta1=d.delta1_trace)
    _emit(r)
    return EXIT_OK


def _brackets(args: Namespace, argv: List[str]) -> int:
    s = _scenario(args)
    if args.samples < 1:
        raise UsageError('--samples must be at least 1')
    df = bracket_errors(s.params, s.weights, args.samples, args.seed)
    sys.stdout.write(df.to_string(index=False, float_format=lambda v: f'{v:.3e}') + '\n')
    return EXIT_OK


# ---------- Parser ----------

def _addScenario(p: ArgumentParser, case: bool = True, grid: bool = False):
    if case:
        p.add_argument('--case', type=str, help='preset case number')
    p.add_argument('--config', type=str, help='scenario file')
    if grid:
        p.add_argument('--T', type=float, help='horizon, days')
        p.add_argument('--steps', type=int, help='number of integration steps')


def parser() -> ArgumentParser:
    '''Build the command-line parser.

    :returns: the parser'''
    p = _Parser(prog='siri-control', description='Optimal protection and vaccination for SIRI epidemics')
    p.add_argument('-v', '--verbose', action='count', default=0, help='log more (repeat for debugging)')
    sub = p.add_subparsers(dest='command', parser_class=_Parser)

    sp = sub.add_parser('simulate', help='simulate under constant controls')
    _addScenario(sp, grid=True)
    sp.add_argument('--uP', type=float, default=1.0, help='protection relaxation')
    sp.add_argument('--uV', type=float, default=0.0, help='vaccination rate')
    sp.add_argument('--out', type=str, help='run directory')
    sp.set_defaults(func=_simulate)

    sp = sub.add_parser('equilibria', help='equilibria and their stability under constant controls')
    _addScenario(sp)
    sp.add_argument('--uP', type=float, required=True, help='protection relaxation')
    sp.add_argument('--uV', type=float, required=True, help='vaccination rate')
    sp.set_defaults(func=_equilibria)

    sp = sub.add_parser('check-assumptions', help='check the immunity and cost assumptions')
    _addScenario(sp)
    sp.set_defaults(func=_checkAssumptions)

    sp = sub.add_parser('solve', help='solve the optimal control problem')
    _addScenario(sp, grid=True)
    sp.add_argument('--method', type=str, default='direct', help='direct or fbsm')
    sp.add_argument('--segments', type=int, default=DEFAULT_SEGMENTS, help='number of control segments')
    sp.add_argument('--max-iters', dest='max_iters', type=int, default=SolveOptions.max_iters, help='iteration limit')
    sp.add_argument('--sharpen', action='store_true', help='snap near-bound segments onto the bounds')
    sp.add_argument('--out', type=str, required=True, help='run directory (one per case for --case all)')
    sp.set_defaults(func=_solve)

    sp = sub.add_parser('diagnose', help='diagnose a solved run')
    sp.add_argument('--run', type=str, required=True, help='run directory')
    sp.add_argument('--eps', type=float, default=None, help='singular-arc tolerance')
    sp.add_argument('--min-len', dest='min_len', type=float, default=DEFAULT_SINGULAR_LENGTH, help='shortest singular arc, days')
    sp.set_defaults(func=_diagnose)

    sp = sub.add_parser('brackets', help='compare closed-form and numeric Lie brackets')
    _addScenario(sp)
    sp.add_argument('--samples', type=int, default=100, help='number of random states')
    sp.add_argument('--seed', type=int, default=0, help='random seed')
    sp.set_defaults(func=_brackets)

    return p


def main(argv: List[str] = None) -> int:
    '''Run the command line.

    :param argv: (optional) the arguments, defaulting to those of the process
    :returns: the exit code'''
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)
    try:
        args = parser().parse_args(argv)
        if args.command is None:
            raise UsageError('No command given')
    except UsageError as e:
        sys.stderr.write(f'siri-control: {e}\n')
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return e.code if isinstance(e.code, int) else EXIT_OK

    level = logging.WARNING if args.verbose == 0 else (logging.INFO if args.verbose == 1 else logging.DEBUG)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')

    try:
        return args.func(args, argv)
    except UsageError as e:
        sys.stderr.write(f'siri-control: {e}\n')
        return EXIT_USAGE
    except (SIRIError, OSError) as e:
        logger.error('{c} failed: {e}'.format(c=args.command, e=e))
        sys.stderr.write(f'siri-control: {e}\n')
        return EXIT_FAILURE
