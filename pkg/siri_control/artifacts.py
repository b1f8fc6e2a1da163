# Run artifacts
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

'''Writing and reading the files produced by a run: trajectory and
control tables as CSV, reports and manifests as JSON. Every file is
written to a temporary file in its target directory and then renamed
into place, so a reader never sees a partial file.
'''

import os
import json
import math
import logging
import tempfile
from dataclasses import dataclass
from typing import Callable, IO, Any, Dict, List, Optional, Tuple, Final
import numpy
import pandas
from siri_control.exceptions import ArgumentError
from siri_control.timegrid import TimeGrid
from siri_control.controlsignal import ControlSignal
from siri_control.ode import Trajectory
from siri_control.scenario import Scenario
from siri_control.solver import SolveOptions


logger = logging.getLogger(__name__)


TRAJECTORY_COLUMNS: Final = ['t', 'x_S', 'x_I', 'x_R', 'x_C', 'u_P', 'u_V',
                             'phi_P', 'phi_V', 'lambda_S', 'lambda_R']   #: Columns of trajectory files.
CONTROL_COLUMNS: Final = ['t_start', 't_end', 'u_P', 'u_V']              #: Columns of control files.
FLOAT_FORMAT: Final[str] = '%.17g'                                      #: Format for floats, enough to read back exactly.
MANIFEST_VERSION: Final[int] = 1                                        #: Version of the manifest format.

# Standard file names within a run directory
TRAJECTORY_FILE: Final[str] = 'trajectory.csv'
CONTROLS_FILE: Final[str] = 'controls.csv'
REPORT_FILE: Final[str] = 'report.json'
MANIFEST_FILE: Final[str] = 'manifest.json'


def atomic_write(path: str, writer: Callable[[IO[str]], Any]):
    '''Write a text file atomically. The writer function is called with
    a handle on a temporary file in the same directory, which replaces
    the target once it is complete. Any failure leaves the target
    untouched and removes the temporary file.

    :param path: the file name
    :param writer: function writing the contents to a file handle'''
    d = os.path.dirname(os.path.abspath(path))
    try:
        (fd, tmp) = tempfile.mkstemp(dir=d, prefix='.' + os.path.basename(path) + '.', suffix='.tmp')
    except OSError as e:
        raise OSError(e.errno, f'Cannot write {path}: {e.strerror}') from e
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    logger.info('Wrote {p}'.format(p=path))


@dataclass(frozen=True)
class RunArtifacts:
    '''The files written by a run.'''

    trajectory_csv: Optional[str] = None
    controls_csv: Optional[str] = None
    report_json: Optional[str] = None
    manifest_json: Optional[str] = None
    svgs: Tuple[str, ...] = ()

    def paths(self) -> List[str]:
        '''Return all the files written.

        :returns: the paths'''
        ps = [self.trajectory_csv, self.controls_csv, self.report_json, self.manifest_json] + list(self.svgs)
        return [p for p in ps if p is not None]


# ---------- Tables ----------

def write_trajectory_csv(traj: Trajectory, path: str) -> RunArtifacts:
    '''Write a trajectory with its costates as a CSV file with one row
    per node. The controls on each row are those of the step the node
    starts, with the last row repeating the final step's controls.

    :param traj: the trajectory, with costates
    :param path: the file name
    :returns: the artifact record'''
    if traj.controls is None or not traj.hasCostates():
        raise ArgumentError('Only trajectories with controls and costates can be written')
    df = traj.toDataFrame()[TRAJECTORY_COLUMNS]
    atomic_write(path, lambda fh: df.to_csv(fh, index=False, float_format=FLOAT_FORMAT, lineterminator='\n'))
    return RunArtifacts(trajectory_csv=path)


def read_trajectory_csv(path: str) -> Trajectory:
    '''Read a trajectory written by :func:`write_trajectory_csv`. The cost
    costate, which is not stored, is restored as identically 1.

    :param path: the file name
    :returns: the trajectory'''
    df = pandas.read_csv(path, float_precision='round_trip')
    missing = [c for c in TRAJECTORY_COLUMNS if c not in df.columns]
    if len(missing) > 0:
        raise ArgumentError(f'{path}: missing columns {", ".join(missing)}')
    if len(df) < 2:
        raise ArgumentError(f'{path}: empty trajectory')
    grid = TimeGrid(float(df['t'].iloc[-1]), len(df) - 1)
    states = df[['x_C', 'x_S', 'x_R']].to_numpy(dtype=float)
    controls = ControlSignal(grid, df['u_P'].to_numpy()[:-1], df['u_V'].to_numpy()[:-1])
    costates = numpy.column_stack([numpy.ones(len(df)),
                                   df['lambda_S'].to_numpy(dtype=float),
                                   df['lambda_R'].to_numpy(dtype=float)])
    phi = df[['phi_P', 'phi_V']].to_numpy(dtype=float)
    return Trajectory(grid, states, controls, costates, phi)


def write_controls_csv(u: ControlSignal, path: str) -> RunArtifacts:
    '''Write a control signal as a CSV file with one row per step.

    :param u: the controls
    :param path: the file name
    :returns: the artifact record'''
    df = u.toDataFrame()[CONTROL_COLUMNS]
    atomic_write(path, lambda fh: df.to_csv(fh, index=False, float_format=FLOAT_FORMAT, lineterminator='\n'))
    return RunArtifacts(controls_csv=path)


def read_controls_csv(path: str) -> ControlSignal:
    '''Read a control signal written by :func:`write_controls_csv`.

    :param path: the file name
    :returns: the controls'''
    return ControlSignal.fromDataFrame(pandas.read_csv(path, float_precision='round_trip'))


# ---------- JSON ----------

def jsonable(o: Any) -> Any:
    '''Convert numpy values, and non-finite floats, into things JSON can hold.

    :param o: the value
    :returns: a value the json module can write'''
    if isinstance(o, dict):
        return {str(k): jsonable(v) for (k, v) in o.items()}
    if isinstance(o, (list, tuple, numpy.ndarray)):
        return [jsonable(v) for v in o]
    if isinstance(o, (bool, numpy.bool_)):
        return bool(o)
    if isinstance(o, (int, numpy.integer)):
        return int(o)
    if isinstance(o, (float, numpy.floating)):
        f = float(o)
        return f if math.isfinite(f) else None
    if isinstance(o, complex):
        return [o.real, o.imag]
    return o


def write_report_json(obj: Dict[str, Any], path: str) -> RunArtifacts:
    '''Write a report as JSON with sorted keys.

    :param obj: the report, as a dict
    :param path: the file name
    :returns: the artifact record'''
    text = json.dumps(jsonable(obj), indent=2, sort_keys=True) + '\n'
    atomic_write(path, lambda fh: fh.write(text))
    return RunArtifacts(report_json=path)


def read_report_json(path: str) -> Dict[str, Any]:
    '''Read a report written by :func:`write_report_json`.

    :param path: the file name
    :returns: the report'''
    with open(path, 'r', encoding='utf-8') as fh:
        return json.load(fh)


# ---------- Manifests ----------

@dataclass(frozen=True)
class Manifest:
    '''Everything needed to repeat a run.'''

    scenario: Scenario
    options: Optional[SolveOptions]
    command: List[str]
    extra: Dict[str, Any]


def write_manifest(scenario: Scenario, options: Optional[SolveOptions], command: List[str], path: str,
                   extra: Dict[str, Any] = None) -> RunArtifacts:
    '''Write the manifest of a run, recording the full scenario and
    solver options along with the command that produced it.

    :param scenario: the scenario
    :param options: the solver options, or None for runs without a solve
    :param command: the command line
    :param path: the file name
    :param extra: (optional) any other settings of the run
    :returns: the artifact record'''
    m = dict(version=MANIFEST_VERSION,
             command=list(command),
             scenario=scenario.parameters(),
             options=None if options is None else options.parameters(),
             extra={} if extra is None else extra)
    text = json.dumps(jsonable(m), indent=2, sort_keys=True) + '\n'
    atomic_write(path, lambda fh: fh.write(text))
    return RunArtifacts(manifest_json=path)


def read_manifest(path: str) -> Manifest:
    '''Read a manifest written by :func:`write_manifest`.

    :param path: the file name
    :returns: the manifest'''
    with open(path, 'r', encoding='utf-8') as fh:
        m = json.load(fh)
    if m.get('version') != MANIFEST_VERSION:
        raise ArgumentError(f'{path}: unsupported manifest version {m.get("version")}')
    options = m.get('options')
    return Manifest(scenario=Scenario.fromParameters(m['scenario']),
                    options=None if options is None else SolveOptions.fromParameters(options),
                    command=list(m.get('command', [])),
                    extra=dict(m.get('extra', {})))
