# Exceptions raised by siri-control
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

from typing import Optional


class SIRIError(Exception):
    '''Base class for all errors raised by ``siri-control``.'''
    pass


class DomainError(SIRIError, ValueError):
    '''A value lies outside the domain of the model: a state off the
    simplex, a control outside its box, or a non-positive rate.'''
    pass


class UnsupportedRegimeError(DomainError):
    '''The request falls into a regime the analysis does not cover,
    for example equilibria with no vaccination.'''
    pass


class IntegrationDivergedError(SIRIError, ArithmeticError):
    '''Raised when a numerical integration leaves the invariant set
    by more than the divergence tolerance.

    :param msg: the message
    :param node: the index of the first bad grid node
    :param time: the time of that node'''

    def __init__(self, msg: str, node: int, time: float):
        super().__init__(msg)
        self.node = node
        self.time = time


class ArgumentError(SIRIError, ValueError):
    '''An argument is missing information the operation needs, such as
    a trajectory without costates.'''
    pass


class ScenarioError(SIRIError, ValueError):
    '''A scenario file could not be parsed or failed validation.

    :param msg: the message
    :param key: (optional) the offending key
    :param line: (optional) the offending line number'''

    def __init__(self, msg: str, key: Optional[str] = None, line: Optional[int] = None):
        context = []
        if key is not None:
            context.append(f'key {key}')
        if line is not None:
            context.append(f'line {line}')
        if len(context) > 0:
            msg = '{m} ({c})'.format(m=msg, c=', '.join(context))
        super().__init__(msg)
        self.key = key
        self.line = line


class UsageError(SIRIError):
    '''The command line was not understood.'''
    pass
