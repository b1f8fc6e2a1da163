# Scenarios
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
import re
import logging
from configparser import ConfigParser, Error as ConfigError, ParsingError, MissingSectionHeaderError, DuplicateOptionError, DuplicateSectionError
from dataclasses import dataclass
from typing import Dict, Any, Optional, List, ClassVar, Final
from siri_control.exceptions import DomainError, ScenarioError, UsageError
from siri_control.model import (ModelParams, CostWeights, ControlBounds, EpidemicState, ReducedState,
                                SIMPLEX_TOLERANCE)
from siri_control.timegrid import TimeGrid, DEFAULT_HORIZON, DEFAULT_STEPS


logger = logging.getLogger(__name__)


INGEST_TOLERANCE: Final[float] = 1e-6   #: Largest error in an initial state's sum that's silently normalised away.


@dataclass(frozen=True)
class Scenario:
    '''A complete problem: the disease, the costs, the admissible controls,
    the initial state, and the grid.

    Scenarios can be converted to and from experiment parameter dicts
    using the ``P_*`` keys, so that any of their values can be swept
    in a lab.'''

    # Experiment parameters
    P_BETA: ClassVar[str] = 'siri.beta'                  #: Parameter for the infection rate.
    P_BETA_HAT: ClassVar[str] = 'siri.beta_hat'          #: Parameter for the reinfection rate.
    P_GAMMA: ClassVar[str] = 'siri.gamma'                #: Parameter for the recovery rate.
    P_C_P: ClassVar[str] = 'siri.costs.protection'       #: Parameter for the protection cost weight.
    P_C_V: ClassVar[str] = 'siri.costs.vaccination'      #: Parameter for the vaccination cost weight.
    P_C_I: ClassVar[str] = 'siri.costs.infection'        #: Parameter for the infection cost weight.
    P_U_P_MIN: ClassVar[str] = 'siri.bounds.u_P_min'     #: Parameter for the lower protection relaxation bound.
    P_U_V_MAX: ClassVar[str] = 'siri.bounds.u_V_max'     #: Parameter for the upper vaccination bound.
    P_X_S0: ClassVar[str] = 'siri.initial.x_S'           #: Parameter for the initial susceptible fraction.
    P_X_I0: ClassVar[str] = 'siri.initial.x_I'           #: Parameter for the initial infected fraction.
    P_X_R0: ClassVar[str] = 'siri.initial.x_R'           #: Parameter for the initial recovered fraction.
    P_HORIZON: ClassVar[str] = 'siri.grid.T'             #: Parameter for the horizon.
    P_STEPS: ClassVar[str] = 'siri.grid.steps'           #: Parameter for the number of integration steps.
    P_LABEL: ClassVar[str] = 'siri.label'                #: Parameter for the scenario label.

    params: ModelParams
    weights: CostWeights
    bounds: ControlBounds
    x0: EpidemicState
    horizon: float = DEFAULT_HORIZON
    n_steps: int = DEFAULT_STEPS
    label: str = 'custom'

    def __post_init__(self):
        # validates horizon and steps
        self.grid()

    def grid(self) -> TimeGrid:
        '''Return the integration grid.

        :returns: the grid'''
        return TimeGrid(self.horizon, self.n_steps)

    def z0(self) -> ReducedState:
        '''Return the initial Mayer-form state, with no accumulated cost.

        :returns: the state'''
        return self.x0.toReduced()

    @property
    def endemic(self) -> bool:
        '''True if an endemic equilibrium exists even under maximal
        protection, :math:`\\gamma < \\hat{\\beta} u_{Pmin}`.'''
        return self.params.gamma < self.params.beta_hat * self.bounds.u_P_min

    def withGrid(self, horizon: float = None, n_steps: int = None) -> 'Scenario':
        '''Return a copy of the scenario with a different grid.

        :param horizon: (optional) the new horizon
        :param n_steps: (optional) the new number of steps
        :returns: the scenario'''
        return Scenario(self.params, self.weights, self.bounds, self.x0,
                        self.horizon if horizon is None else horizon,
                        self.n_steps if n_steps is None else n_steps,
                        self.label)

    def parameters(self) -> Dict[str, Any]:
        '''Return the scenario as a dict of experiment parameters.

        :returns: the parameters'''
        return {Scenario.P_BETA: self.params.beta,
                Scenario.P_BETA_HAT: self.params.beta_hat,
                Scenario.P_GAMMA: self.params.gamma,
                Scenario.P_C_P: self.weights.c_P,
                Scenario.P_C_V: self.weights.c_V,
                Scenario.P_C_I: self.weights.c_I,
                Scenario.P_U_P_MIN: self.bounds.u_P_min,
                Scenario.P_U_V_MAX: self.bounds.u_V_max,
                Scenario.P_X_S0: self.x0.x_S,
                Scenario.P_X_I0: self.x0.x_I,
                Scenario.P_X_R0: self.x0.x_R,
                Scenario.P_HORIZON: self.horizon,
                Scenario.P_STEPS: self.n_steps,
                Scenario.P_LABEL: self.label}

    @staticmethod
    def fromParameters(params: Dict[str, Any]) -> 'Scenario':
        '''Build a scenario from experiment parameters. The grid and
        label are optional.

        :param params: the parameters
        :returns: the scenario'''
        try:
            return Scenario(ModelParams(float(params[Scenario.P_BETA]),
                                        float(params[Scenario.P_BETA_HAT]),
                                        float(params[Scenario.P_GAMMA])),
                            CostWeights(float(params[Scenario.P_C_P]),
                                        float(params[Scenario.P_C_V]),
                                        float(params[Scenario.P_C_I])),
                            ControlBounds(float(params[Scenario.P_U_P_MIN]),
                                          float(params[Scenario.P_U_V_MAX])),
                            EpidemicState(float(params[Scenario.P_X_S0]),
                                          float(params[Scenario.P_X_I0]),
                                          float(params[Scenario.P_X_R0])),
                            float(params.get(Scenario.P_HORIZON, DEFAULT_HORIZON)),
                            int(params.get(Scenario.P_STEPS, DEFAULT_STEPS)),
                            str(params.get(Scenario.P_LABEL, 'custom')))
        except KeyError as e:
            raise ScenarioError('Missing scenario parameter', key=e.args[0])


# ---------- Presets ----------

PRESET_BOUNDS: Final = ControlBounds(0.2, 0.9)                  #: Control bounds of the presets.
PRESET_INITIAL: Final = EpidemicState(0.8, 0.2, 0.0)            #: Initial state of the presets.

# (c_P, c_V, c_I, beta, beta_hat, gamma)
_PRESETS: Final = {1: (7.1, 2.0, 7.0, 1.0, 2.5, 0.38),
                   2: (0.3, 2.0, 5.0, 1.0, 2.0, 0.1),
                   3: (0.3, 3.0, 5.0, 3.0, 2.0, 0.1)}

PRESET_CASES: Final = tuple(sorted(_PRESETS.keys()))            #: Valid preset case numbers.

# the protection switch of case 1 moves with the horizon, and falls just after day 42 at 50 days
PRESET_HORIZONS: Final = {1: 50.0, 2: DEFAULT_HORIZON, 3: DEFAULT_HORIZON}   #: Horizon of each preset, days.


def preset(case_id: int) -> Scenario:
    '''Return one of the three standard cases. Case 1 has expensive
    protection, and is optimally protected only until late in the horizon
    (a horizon of 50 days rather than the default); case 2 has cheap
    protection, adopted throughout; case 3 has partial rather than
    compromised immunity.

    :param case_id: the case, 1, 2, or 3
    :returns: the scenario'''
    if isinstance(case_id, bool) or case_id not in _PRESETS:
        raise UsageError(f'No preset case {case_id} (expected one of {", ".join(map(str, PRESET_CASES))})')
    (c_P, c_V, c_I, beta, beta_hat, gamma) = _PRESETS[case_id]
    return Scenario(ModelParams(beta, beta_hat, gamma),
                    CostWeights(c_P, c_V, c_I),
                    PRESET_BOUNDS,
                    PRESET_INITIAL,
                    PRESET_HORIZONS[case_id], DEFAULT_STEPS,
                    f'case-{case_id}')


# ---------- Scenario files ----------

_SECTIONS: Final = {'params': ['beta', 'beta_hat', 'gamma'],
                    'weights': ['c_P', 'c_V', 'c_I'],
                    'bounds': ['u_P_min', 'u_V_max'],
                    'initial': ['x_S', 'x_I', 'x_R'],
                    'grid': ['T', 'steps']}


def _lineOf(lines: List[str], section: str, key: Optional[str] = None) -> Optional[int]:
    '''Find the line number of a section header, or of a key within
    a section.'''
    current = None
    for (n, l) in enumerate(lines, start=1):
        s = l.strip()
        m = re.match(r'^\[(.+)\]$', s)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return n
        elif current == section and key is not None:
            m = re.match(r'^([^=:]+)[=:]', s)
            if m and m.group(1).strip() == key:
                return n
    return None


def load_scenario(path: str) -> Scenario:
    '''Load a scenario from an INI-style file with sections ``[params]``,
    ``[weights]``, ``[bounds]``, ``[initial]``, and ``[grid]``, and an
    optional ``[scenario]`` section giving a ``label``. Every value is
    validated, and errors name the offending key and line.

    An initial state summing to within :attr:`INGEST_TOLERANCE` of 1
    is normalised.

    :param path: the file name
    :returns: the scenario'''
    with open(path, 'r', encoding='utf-8') as fh:
        text = fh.read()
    lines = text.splitlines()

    cp = ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text, source=path)
    except MissingSectionHeaderError as e:
        raise ScenarioError(f'{path}: no section header', line=e.lineno)
    except ParsingError as e:
        (lineno, _) = e.errors[0]
        raise ScenarioError(f'{path}: unparseable line', line=lineno)
    except (DuplicateOptionError, DuplicateSectionError) as e:
        raise ScenarioError(f'{path}: {e.message}', line=e.lineno)
    except ConfigError as e:
        raise ScenarioError(f'{path}: {e}')

    values: Dict[str, Dict[str, float]] = {}
    for (section, keys) in _SECTIONS.items():
        if not cp.has_section(section):
            raise ScenarioError(f'{path}: missing section [{section}]', key=section)
        values[section] = {}
        for k in keys:
            if not cp.has_option(section, k):
                raise ScenarioError(f'{path}: missing key', key=f'{section}.{k}', line=_lineOf(lines, section))
            raw = cp.get(section, k)
            try:
                values[section][k] = int(raw) if k == 'steps' else float(raw)
            except ValueError:
                raise ScenarioError(f'{path}: bad value "{raw}"', key=f'{section}.{k}', line=_lineOf(lines, section, k))
        for k in cp.options(section):
            if k not in keys:
                logger.warning('{p}: ignoring unknown key {s}.{k}'.format(p=path, s=section, k=k))
    label = cp.get('scenario', 'label', fallback=os.path.splitext(os.path.basename(path))[0])

    def build(section, cls, ks):
        try:
            return cls(*[values[section][k] for k in ks])
        except DomainError as e:
            m = re.match(r'^(\w+) ', str(e))
            key = m.group(1) if m is not None and m.group(1) in ks else None
            raise ScenarioError(f'{path}: {e}',
                                key=f'{section}.{key}' if key is not None else section,
                                line=_lineOf(lines, section, key) if key is not None else _lineOf(lines, section))

    params = build('params', ModelParams, ['beta', 'beta_hat', 'gamma'])
    weights = build('weights', CostWeights, ['c_P', 'c_V', 'c_I'])
    bounds = build('bounds', ControlBounds, ['u_P_min', 'u_V_max'])
    init = values['initial']
    total = init['x_S'] + init['x_I'] + init['x_R']
    if SIMPLEX_TOLERANCE < abs(total - 1.0) <= INGEST_TOLERANCE:
        x0 = EpidemicState.normalised(init['x_S'], init['x_I'], init['x_R'])
    else:
        x0 = build('initial', EpidemicState, ['x_S', 'x_I', 'x_R'])
    try:
        scenario = Scenario(params, weights, bounds, x0, values['grid']['T'], values['grid']['steps'], label)
    except DomainError as e:
        raise ScenarioError(f'{path}: {e}', key='grid', line=_lineOf(lines, 'grid'))
    logger.info('Loaded scenario {l} from {p}'.format(l=label, p=path))
    return scenario


def save_scenario(scenario: Scenario, path: str):
    '''Write a scenario in the format read by :func:`load_scenario`.
    Values are written with enough digits to read back exactly.

    :param scenario: the scenario
    :param path: the file name'''
    from siri_control.artifacts import atomic_write

    cp = ConfigParser(interpolation=None)
    cp.optionxform = str
    cp['scenario'] = {'label': scenario.label}
    cp['params'] = {k: repr(float(getattr(scenario.params, k))) for k in _SECTIONS['params']}
    cp['weights'] = {k: repr(float(getattr(scenario.weights, k))) for k in _SECTIONS['weights']}
    cp['bounds'] = {k: repr(float(getattr(scenario.bounds, k))) for k in _SECTIONS['bounds']}
    cp['initial'] = {k: repr(float(getattr(scenario.x0, k))) for k in _SECTIONS['initial']}
    cp['grid'] = {'T': repr(float(scenario.horizon)), 'steps': str(int(scenario.n_steps))}
    atomic_write(path, lambda fh: cp.write(fh))
