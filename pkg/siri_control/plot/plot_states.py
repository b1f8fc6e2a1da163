# Plot the states of a trajectory
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

import matplotlib.pyplot as plt
from matplotlib.axes import Axes
from siri_control.exceptions import ArgumentError
from siri_control.ode import Trajectory


def plot_states(traj: Trajectory,
                ax: Axes = None,
                title: str = None,
                fontsize: int = 8,
                compartment_colours: dict = None,
                linewidth: float = 1.0):
    '''Draw the fractions of the population in each compartment over
    the course of a trajectory.

    :param traj: the trajectory
    :param ax: (optional) axes to draw into
    :param title: (optional) title for plot
    :param fontsize: (optional) size of label font
    :param compartment_colours: (optional) mapping from compartments to colours
    :param linewidth: (optional) width of the lines'''
    if traj is None:
        raise ArgumentError('No trajectory to plot')

    # fill in defaults
    if ax is None:
        ax = plt.gca()
    if compartment_colours is None:
        compartment_colours = dict(S='tab:green', I='tab:red', R='tab:purple')
    if title is None:
        title = 'Compartments'

    ts = traj.times()
    for (c, xs) in [('S', traj.states[:, 1]), ('I', traj.infected()), ('R', traj.states[:, 2])]:
        ax.plot(ts, xs, color=compartment_colours[c], linewidth=linewidth, label=f'$x_{c}$')

    ax.set_title(title, fontsize=fontsize)
    ax.set_xlabel('$t$ (days)', fontsize=fontsize)
    ax.set_xlim(0, traj.grid.horizon)
    ax.set_ylim(0, 1)
    ax.tick_params(labelsize=fontsize)
    ax.legend(loc='best', fontsize=fontsize)
