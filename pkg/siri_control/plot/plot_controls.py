# Plot the controls of a trajectory
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

import numpy
import matplotlib.pyplot as plt
from matplotlib.axes import Axes
from siri_control.exceptions import ArgumentError
from siri_control.model import ControlBounds
from siri_control.ode import Trajectory
from siri_control.pmp import DiagnosticsReport


def plot_controls(traj: Trajectory, bounds: ControlBounds,
                  report: DiagnosticsReport = None,
                  ax: Axes = None,
                  title: str = None,
                  fontsize: int = 8,
                  colours: dict = None,
                  linewidth: float = 1.0):
    '''Draw the piecewise-constant controls of a trajectory as step
    functions, with dashed guide-lines at the bounds of each control.

    :param traj: the trajectory
    :param bounds: the control bounds
    :param report: (optional) diagnostics whose switches and singular arcs are marked
    :param ax: (optional) axes to draw into
    :param title: (optional) title for plot
    :param fontsize: (optional) size of label font
    :param colours: (optional) mapping from control names to colours
    :param linewidth: (optional) width of the control lines'''
    if traj is None or traj.controls is None:
        raise ArgumentError('No controls to plot')

    # fill in defaults
    if ax is None:
        ax = plt.gca()
    if colours is None:
        colours = dict(u_P='tab:blue', u_V='tab:orange')
    if title is None:
        title = 'Controls'

    ts = traj.times()
    uP = numpy.append(traj.controls.uPValues(), traj.controls.uPValues()[-1])
    uV = numpy.append(traj.controls.uVValues(), traj.controls.uVValues()[-1])
    ax.step(ts, uP, where='post', color=colours['u_P'], linewidth=linewidth, label='$u_P$')
    ax.step(ts, uV, where='post', color=colours['u_V'], linewidth=linewidth, label='$u_V$')

    # bound guide-lines
    for (v, c) in [(bounds.u_P_min, colours['u_P']), (1.0, colours['u_P']),
                   (0.0, colours['u_V']), (bounds.u_V_max, colours['u_V'])]:
        ax.axhline(v, color=c, linestyle='--', linewidth=0.5, alpha=0.6)

    # switches and singular arcs
    if report is not None:
        for s in report.switch_times:
            ax.axvline(s.time, color=colours[s.control], linestyle=':', linewidth=0.75)
        for iv in report.singular_intervals:
            ax.axvspan(iv.t_start, iv.t_end, color=colours[iv.control], alpha=0.1, linewidth=0)

    ax.set_title(title, fontsize=fontsize)
    ax.set_xlabel('$t$ (days)', fontsize=fontsize)
    ax.set_xlim(0, traj.grid.horizon)
    ax.set_ylim(-0.05, 1.05)
    ax.tick_params(labelsize=fontsize)
    ax.legend(loc='best', fontsize=fontsize)
