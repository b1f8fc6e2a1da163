# Write plots as deterministic SVG
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

import os
from typing import Optional, Final
from matplotlib import rc_context
from matplotlib.figure import Figure
from siri_control.exceptions import ArgumentError
from siri_control.model import ControlBounds
from siri_control.ode import Trajectory
from siri_control.pmp import DiagnosticsReport
from siri_control.artifacts import RunArtifacts, atomic_write
from siri_control.plot.plot_controls import plot_controls
from siri_control.plot.plot_states import plot_states


CONTROLS_SVG: Final[str] = 'controls.svg'    #: File name of the controls plot.
STATES_SVG: Final[str] = 'states.svg'        #: File name of the states plot.

# fixed element ids and glyphs-as-paths make the SVG depend only on the data
_SVG_RC: Final = {'svg.hashsalt': 'siri-control',
                  'svg.fonttype': 'path'}


def _write(fig: Figure, path: str):
    atomic_write(path, lambda fh: fig.savefig(fh, format='svg', metadata={'Date': None}))


def write_plots_svg(traj: Trajectory, report: Optional[DiagnosticsReport], dir: str,
                    bounds: ControlBounds, title: Optional[str] = None) -> RunArtifacts:
    '''Write two SVG plots of a trajectory into a directory, one of the
    controls and one of the states. Identical trajectories give
    byte-identical files.

    :param traj: the trajectory
    :param report: diagnostics to mark on the controls plot, or None
    :param dir: the directory
    :param bounds: the control bounds
    :param title: (optional) prefix for the plot titles
    :returns: the artifact record'''
    if traj is None or traj.controls is None:
        raise ArgumentError('Cannot plot an empty trajectory')
    prefix = '' if title is None else f'{title}: '

    paths = (os.path.join(dir, CONTROLS_SVG), os.path.join(dir, STATES_SVG))
    with rc_context(_SVG_RC):
        fig = Figure(figsize=(6, 3.5))
        plot_controls(traj, bounds, report, ax=fig.add_subplot(1, 1, 1), title=f'{prefix}controls')
        fig.tight_layout()
        _write(fig, paths[0])

        fig = Figure(figsize=(6, 3.5))
        plot_states(traj, ax=fig.add_subplot(1, 1, 1), title=f'{prefix}compartments')
        fig.tight_layout()
        _write(fig, paths[1])
    return RunArtifacts(svgs=paths)
