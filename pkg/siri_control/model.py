# The controlled SIRI epidemic model
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

'''The controlled SIRI (susceptible-infected-recovered-infected) model.

Individuals move from S to I at rate :math:`\\beta`, recover from I to R
at rate :math:`\\gamma`, and are re-infected from R at rate
:math:`\\hat{\\beta}`. Two controls act on the population: the protection
relaxation :math:`u_P` (where :math:`1 - u_P` is the protection adopted by
S and R) scales both infection terms, and the vaccination rate :math:`u_V`
moves susceptibles directly to R.

The module provides the value types shared by the rest of the package,
the full and reduced (Mayer-form) vector fields, equilibria and their
stability, and the parameter assumptions under which bang-bang
vaccination is optimal.
'''

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple, Any, Final
import numpy
from siri_control.exceptions import DomainError, UnsupportedRegimeError


# Tolerances
SIMPLEX_TOLERANCE: Final[float] = 1e-9      #: Tolerance on states lying on the simplex.
ASSUMPTION_TOLERANCE: Final[float] = 1e-9   #: Relative tolerance for the "not equal" assumption.

# Stability tags
STABLE: Final[str] = 'stable'               #: Locally asymptotically stable equilibrium.
UNSTABLE: Final[str] = 'unstable'           #: Unstable equilibrium.
INCONCLUSIVE: Final[str] = 'inconclusive'   #: Zero eigenvalue, linearisation decides nothing.

# Equilibrium names
DFE: Final[str] = 'dfe'                     #: The disease-free equilibrium.
EE: Final[str] = 'ee'                       #: The endemic equilibrium.

# Immunity regimes
COMPROMISED: Final[str] = 'compromised'     #: Reinfection easier than first infection.
PARTIAL: Final[str] = 'partial'             #: Reinfection harder than first infection.
SIS: Final[str] = 'sis'                     #: Reinfection and first infection equally likely.


def _finite(name: str, v: float):
    if not math.isfinite(v):
        raise DomainError(f'{name} must be finite (got {v})')


# ---------- Value types ----------

@dataclass(frozen=True)
class ModelParams:
    '''The disease rates, all per day.

    :param beta: infection rate of susceptibles
    :param beta_hat: reinfection rate of recovereds
    :param gamma: recovery rate'''

    beta: float
    beta_hat: float
    gamma: float

    def __post_init__(self):
        for (n, v) in [('beta', self.beta), ('beta_hat', self.beta_hat), ('gamma', self.gamma)]:
            _finite(n, v)
            if v <= 0:
                raise DomainError(f'{n} must be > 0 (got {v})')


@dataclass(frozen=True)
class CostWeights:
    '''Weights of the running cost, per unit of population per day.

    :param c_P: weight of protection
    :param c_V: weight of vaccination
    :param c_I: weight of infection'''

    c_P: float
    c_V: float
    c_I: float

    def __post_init__(self):
        for (n, v) in [('c_P', self.c_P), ('c_V', self.c_V), ('c_I', self.c_I)]:
            _finite(n, v)
            if v < 0:
                raise DomainError(f'{n} must be >= 0 (got {v})')


@dataclass(frozen=True)
class ControlValue:
    '''A value of the two controls.

    :param u_P: the protection relaxation level (1 means no protection)
    :param u_V: the vaccination rate, per day'''

    u_P: float
    u_V: float

    def __post_init__(self):
        _finite('u_P', self.u_P)
        _finite('u_V', self.u_V)


@dataclass(frozen=True)
class ControlBounds:
    '''The admissible box of the controls,
    :math:`[u_{Pmin}, 1] \\times [0, u_{Vmax}]`.

    :param u_P_min: lower bound on protection relaxation, in (0, 1]
    :param u_V_max: upper bound on vaccination, in [0, 1)'''

    u_P_min: float
    u_V_max: float

    def __post_init__(self):
        _finite('u_P_min', self.u_P_min)
        _finite('u_V_max', self.u_V_max)
        if self.u_P_min <= 0:
            raise DomainError(f'u_P_min must be > 0 (got {self.u_P_min})')
        if self.u_P_min > 1:
            raise DomainError(f'u_P_min must be <= 1 (got {self.u_P_min})')
        if self.u_V_max < 0:
            raise DomainError(f'u_V_max must be >= 0 (got {self.u_V_max})')
        if self.u_V_max >= 1:
            raise DomainError(f'u_V_max must be < 1 (got {self.u_V_max})')

    def contains(self, u: ControlValue, tol: float = 0.0) -> bool:
        '''Test whether a control value lies in the box.

        :param u: the control
        :param tol: (optional) slack allowed on each bound
        :returns: True if the control is admissible'''
        return (self.u_P_min - tol <= u.u_P <= 1.0 + tol) and (-tol <= u.u_V <= self.u_V_max + tol)

    def check(self, u: ControlValue):
        '''Raise an exception if a control value is inadmissible.

        :param u: the control'''
        if not self.contains(u):
            raise DomainError(f'Control ({u.u_P}, {u.u_V}) outside [{self.u_P_min}, 1] x [0, {self.u_V_max}]')


@dataclass(frozen=True)
class EpidemicState:
    '''A point on the simplex of population fractions.

    :param x_S: susceptible fraction
    :param x_I: infected fraction
    :param x_R: recovered fraction'''

    x_S: float
    x_I: float
    x_R: float

    def __post_init__(self):
        for (n, v) in [('x_S', self.x_S), ('x_I', self.x_I), ('x_R', self.x_R)]:
            _finite(n, v)
            if v < -SIMPLEX_TOLERANCE or v > 1 + SIMPLEX_TOLERANCE:
                raise DomainError(f'{n} must lie in [0, 1] (got {v})')
        total = self.x_S + self.x_I + self.x_R
        if abs(total - 1.0) > SIMPLEX_TOLERANCE:
            raise DomainError(f'State ({self.x_S}, {self.x_I}, {self.x_R}) is off the simplex (sums to {total})')

    @staticmethod
    def normalised(x_S: float, x_I: float, x_R: float) -> 'EpidemicState':
        '''Build a state from fractions that don't quite sum to 1, by dividing
        through by their sum. Only intended for ingesting data: integrations
        never renormalise.

        :param x_S: susceptible fraction
        :param x_I: infected fraction
        :param x_R: recovered fraction
        :returns: the state'''
        total = x_S + x_I + x_R
        if not total > 0:
            raise DomainError(f'Fractions ({x_S}, {x_I}, {x_R}) cannot be normalised')
        return EpidemicState(x_S / total, x_I / total, x_R / total)

    def asArray(self) -> numpy.ndarray:
        '''Return the state as an array :math:`(x_S, x_I, x_R)`.

        :returns: the array'''
        return numpy.array([self.x_S, self.x_I, self.x_R])

    def toReduced(self, x_C: float = 0.0) -> 'ReducedState':
        '''Return the Mayer-form state with the given accumulated cost.

        :param x_C: (optional) accumulated cost (defaults to 0)
        :returns: the reduced state'''
        return ReducedState(x_C, self.x_S, self.x_R)


@dataclass(frozen=True)
class ReducedState:
    '''The Mayer-form state :math:`z = (x_C, x_S, x_R)`, with the infected
    fraction implicit as :math:`x_I = 1 - x_S - x_R`.

    :param x_C: accumulated running cost
    :param x_S: susceptible fraction
    :param x_R: recovered fraction'''

    x_C: float
    x_S: float
    x_R: float

    def __post_init__(self):
        for (n, v) in [('x_C', self.x_C), ('x_S', self.x_S), ('x_R', self.x_R)]:
            _finite(n, v)
            if v < -SIMPLEX_TOLERANCE:
                raise DomainError(f'{n} must be >= 0 (got {v})')
        if self.x_S + self.x_R > 1 + SIMPLEX_TOLERANCE:
            raise DomainError(f'x_S + x_R must be <= 1 (got {self.x_S + self.x_R})')

    @property
    def x_I(self) -> float:
        '''The implicit infected fraction.'''
        return 1.0 - self.x_S - self.x_R

    @staticmethod
    def fromArray(z: numpy.ndarray) -> 'ReducedState':
        '''Build a state from an array :math:`(x_C, x_S, x_R)`.

        :param z: the array
        :returns: the state'''
        return ReducedState(float(z[0]), float(z[1]), float(z[2]))

    def asArray(self) -> numpy.ndarray:
        '''Return the state as an array :math:`(x_C, x_S, x_R)`.

        :returns: the array'''
        return numpy.array([self.x_C, self.x_S, self.x_R])

    def toEpidemic(self) -> EpidemicState:
        '''Return the full epidemic state, dropping the cost.

        :returns: the state'''
        return EpidemicState(self.x_S, self.x_I, self.x_R)


@dataclass(frozen=True)
class EquilibriumReport:
    '''The equilibria of the model under constant controls, with their
    stability and the eigenvalues of the reduced Jacobian.'''

    u_P_eq: float
    u_V_eq: float
    dfe: EpidemicState
    dfe_stability: str
    dfe_eigenvalues: Tuple[complex, complex]
    ee_exists: bool
    ee: Optional[EpidemicState] = None
    ee_stability: Optional[str] = None
    ee_eigenvalues: Optional[Tuple[complex, complex]] = None

    def asDict(self) -> Dict[str, Any]:
        '''Return the report as a JSON-friendly dict.

        :returns: the dict'''
        def eigs(es):
            return None if es is None else [[float(numpy.real(e)), float(numpy.imag(e))] for e in es]

        def state(s):
            return None if s is None else [s.x_S, s.x_I, s.x_R]

        return dict(u_P_eq=self.u_P_eq, u_V_eq=self.u_V_eq,
                    dfe=state(self.dfe), dfe_stability=self.dfe_stability,
                    dfe_eigenvalues=eigs(self.dfe_eigenvalues),
                    ee_exists=self.ee_exists,
                    ee=state(self.ee), ee_stability=self.ee_stability,
                    ee_eigenvalues=eigs(self.ee_eigenvalues))


@dataclass(frozen=True)
class AssumptionReport:
    '''The outcome of checking the parameter assumptions, with the
    evaluated left-hand sides so that near-misses are visible.'''

    a1: bool
    a2_i: bool
    a2_ii: bool
    a2_iii: bool
    endemic_condition: bool
    a2_i_lhs: float
    a2_i_rhs: float
    a2_ii_lhs: float
    a2_iii_lhs: float
    endemic_ratio: float
    regime: str

    def allHold(self) -> bool:
        '''Test whether the compromised-immunity assumption and all the
        cost assumptions hold.

        :returns: True if they all hold'''
        return self.a1 and self.a2_i and self.a2_ii and self.a2_iii

    def asDict(self) -> Dict[str, Any]:
        '''Return the report as a JSON-friendly dict.

        :returns: the dict'''
        return dict(a1=self.a1, a2_i=self.a2_i, a2_ii=self.a2_ii, a2_iii=self.a2_iii,
                    endemic_condition=self.endemic_condition,
                    a2_i_lhs=self.a2_i_lhs, a2_i_rhs=self.a2_i_rhs,
                    a2_ii_lhs=self.a2_ii_lhs, a2_iii_lhs=self.a2_iii_lhs,
                    endemic_ratio=self.endemic_ratio,
                    regime=self.regime,
                    all_hold=self.allHold())


# ---------- Dynamics ----------

def rhs_full(state: EpidemicState, u: ControlValue, p: ModelParams) -> numpy.ndarray:
    '''The rates of change of the full SIRI dynamics. The recovered rate
    is assembled as the negative of the other two so that the rates sum
    to exactly zero.

    :param state: the epidemic state
    :param u: the controls
    :param p: the model parameters
    :returns: an array :math:`(\\dot{x}_S, \\dot{x}_I, \\dot{x}_R)`'''
    (x_S, x_I, x_R) = (state.x_S, state.x_I, state.x_R)
    infection = p.beta * x_S * x_I * u.u_P
    reinfection = p.beta_hat * x_R * x_I * u.u_P
    dS = -infection - x_S * u.u_V
    dI = infection + reinfection - p.gamma * x_I
    return numpy.array([dS, dI, -(dS + dI)])


def rhs_reduced2(x_S: float, x_I: float, u: ControlValue, p: ModelParams) -> numpy.ndarray:
    '''The two-state dynamics in :math:`(x_S, x_I)` obtained by
    substituting :math:`x_R = 1 - x_S - x_I`.

    :param x_S: susceptible fraction
    :param x_I: infected fraction
    :param u: the controls
    :param p: the model parameters
    :returns: an array :math:`(\\dot{x}_S, \\dot{x}_I)`'''
    x_R = 1.0 - x_S - x_I
    dS = -p.beta * x_S * x_I * u.u_P - x_S * u.u_V
    dI = p.beta * x_S * x_I * u.u_P + p.beta_hat * x_R * x_I * u.u_P - p.gamma * x_I
    return numpy.array([dS, dI])


def running_cost(state: EpidemicState, u: ControlValue, w: CostWeights) -> float:
    '''The running-cost integrand
    :math:`c_P (1 - u_P)(x_S + x_R) + c_V u_V x_S + c_I x_I`.

    :param state: the epidemic state
    :param u: the controls
    :param w: the cost weights
    :returns: the cost rate'''
    return (w.c_P * (1.0 - u.u_P) * (state.x_S + state.x_R) +
            w.c_V * u.u_V * state.x_S +
            w.c_I * state.x_I)


def mayer_rates(x_S: float, x_R: float, u_P: float, u_V: float,
                p: ModelParams, w: CostWeights) -> Tuple[float, float, float]:
    '''The Mayer-form rates :math:`f + g_P u_P + g_V u_V` on plain floats,
    without any validation. This is the inner loop of the integrators.

    :param x_S: susceptible fraction
    :param x_R: recovered fraction
    :param u_P: protection relaxation
    :param u_V: vaccination rate
    :param p: the model parameters
    :param w: the cost weights
    :returns: the rates of :math:`(x_C, x_S, x_R)`'''
    x_I = 1.0 - x_S - x_R
    dC = w.c_P * (1.0 - u_P) * (x_S + x_R) + w.c_V * u_V * x_S + w.c_I * x_I
    dS = -p.beta * x_S * x_I * u_P - x_S * u_V
    dR = -p.beta_hat * x_R * x_I * u_P + x_S * u_V + p.gamma * x_I
    return (dC, dS, dR)


def fields_arrays(z: numpy.ndarray, p: ModelParams, w: CostWeights) -> Tuple[numpy.ndarray, numpy.ndarray, numpy.ndarray]:
    '''The drift and control fields on raw arrays. The argument may be a
    single point of shape (3,) or a path of shape (3, N), in which case
    each field has the same shape as the argument.

    :param z: the rows :math:`(x_C, x_S, x_R)`
    :param p: the model parameters
    :param w: the cost weights
    :returns: the triple of arrays :math:`(f, g_P, g_V)`'''
    (x_S, x_R) = (z[1], z[2])
    x_I = 1.0 - x_S - x_R
    zero = 0.0 * x_S
    f = numpy.array([w.c_P * (x_S + x_R) + w.c_I * x_I,
                     zero,
                     p.gamma * x_I])
    g_P = numpy.array([-w.c_P * (x_S + x_R),
                       -p.beta * x_S * x_I,
                       -p.beta_hat * x_R * x_I])
    g_V = numpy.array([w.c_V * x_S,
                       -x_S,
                       x_S])
    return (f, g_P, g_V)


def fields_reduced(z: ReducedState, p: ModelParams, w: CostWeights) -> Tuple[numpy.ndarray, numpy.ndarray, numpy.ndarray]:
    '''The drift and control vector fields of the Mayer-form dynamics
    :math:`\\dot{z} = f(z) + g_P(z) u_P + g_V(z) u_V`.

    :param z: the reduced state
    :param p: the model parameters
    :param w: the cost weights
    :returns: the triple of vectors :math:`(f, g_P, g_V)`'''
    return fields_arrays(z.asArray(), p, w)


VectorField = Callable[[numpy.ndarray], numpy.ndarray]   #: Type of vector fields on the reduced state.


def vector_fields(p: ModelParams, w: CostWeights) -> Tuple[VectorField, VectorField, VectorField]:
    '''Return the drift and control vector fields as functions of raw
    arrays :math:`(x_C, x_S, x_R)`. Unlike :func:`fields_reduced` these
    perform no validation, so they can be evaluated at the
    slightly-perturbed points used by finite differences.

    :param p: the model parameters
    :param w: the cost weights
    :returns: the triple of functions :math:`(f, g_P, g_V)`'''
    return (lambda z: fields_arrays(z, p, w)[0],
            lambda z: fields_arrays(z, p, w)[1],
            lambda z: fields_arrays(z, p, w)[2])


# ---------- Equilibria ----------

def jacobian_reduced2(x_S: float, x_I: float, u: ControlValue, p: ModelParams) -> numpy.ndarray:
    '''The Jacobian of the two-state dynamics :func:`rhs_reduced2`.

    :param x_S: susceptible fraction
    :param x_I: infected fraction
    :param u: the controls
    :param p: the model parameters
    :returns: a 2x2 matrix'''
    (b, bh, g) = (p.beta, p.beta_hat, p.gamma)
    (u_P, u_V) = (u.u_P, u.u_V)
    return numpy.array([[-b * x_I * u_P - u_V, -b * x_S * u_P],
                        [(b - bh) * x_I * u_P, b * x_S * u_P + bh * (1.0 - x_S - 2 * x_I) * u_P - g]])


def endemic_threshold_ratio(p: ModelParams, u_P: float) -> float:
    '''The ratio :math:`\\hat{\\beta} u_P / \\gamma`, which exceeds 1
    exactly when the endemic equilibrium exists.

    :param p: the model parameters
    :param u_P: the protection relaxation
    :returns: the ratio'''
    return p.beta_hat * u_P / p.gamma


def _checkEquilibriumControls(u_P_eq: float, u_V_eq: float, b: Optional[ControlBounds]):
    if u_V_eq == 0:
        raise UnsupportedRegimeError('Equilibria with u_V_eq = 0 are those of the uncontrolled SIRI model')
    if not 0 < u_V_eq < 1:
        raise DomainError(f'u_V_eq must lie in (0, 1) (got {u_V_eq})')
    if not 0 < u_P_eq <= 1:
        raise DomainError(f'u_P_eq must lie in (0, 1] (got {u_P_eq})')
    if b is not None:
        if u_V_eq > b.u_V_max:
            raise DomainError(f'u_V_eq must be <= {b.u_V_max} (got {u_V_eq})')
        if u_P_eq < b.u_P_min:
            raise DomainError(f'u_P_eq must be >= {b.u_P_min} (got {u_P_eq})')


def classify_stability(p: ModelParams, u_P_eq: float, u_V_eq: float,
                       b: Optional[ControlBounds] = None) -> Dict[str, Optional[str]]:
    '''Classify the local stability of the equilibria under constant
    controls. The disease-free equilibrium is stable when recovery
    outpaces reinfection (:math:`\\gamma > \\hat{\\beta} u_P`), and the
    endemic equilibrium is stable whenever it exists. At the boundary
    the Jacobian has a zero eigenvalue and the result is inconclusive.

    :param p: the model parameters
    :param u_P_eq: the constant protection relaxation
    :param u_V_eq: the constant vaccination rate (must be positive)
    :param b: (optional) control bounds the constant controls must respect
    :returns: a dict mapping :attr:`DFE` and :attr:`EE` to tags, with None for an absent EE'''
    _checkEquilibriumControls(u_P_eq, u_V_eq, b)
    threshold = p.beta_hat * u_P_eq
    if p.gamma > threshold:
        return {DFE: STABLE, EE: None}
    elif p.gamma < threshold:
        return {DFE: UNSTABLE, EE: STABLE}
    else:
        return {DFE: INCONCLUSIVE, EE: None}


def equilibria(p: ModelParams, u_P_eq: float, u_V_eq: float,
               b: Optional[ControlBounds] = None) -> EquilibriumReport:
    '''Compute the equilibria under constant controls. The disease-free
    equilibrium :math:`(0, 0, 1)` always exists; the endemic equilibrium
    :math:`(0, 1 - \\gamma / \\hat{\\beta} u_P, \\gamma / \\hat{\\beta} u_P)`
    exists when :math:`\\gamma < \\hat{\\beta} u_P`.

    :param p: the model parameters
    :param u_P_eq: the constant protection relaxation
    :param u_V_eq: the constant vaccination rate (must be positive)
    :param b: (optional) control bounds the constant controls must respect
    :returns: the equilibrium report'''
    tags = classify_stability(p, u_P_eq, u_V_eq, b)
    u = ControlValue(u_P_eq, u_V_eq)

    dfe = EpidemicState(0.0, 0.0, 1.0)
    dfe_eigs = numpy.linalg.eigvals(jacobian_reduced2(0.0, 0.0, u, p))

    if p.gamma < p.beta_hat * u_P_eq:
        x_R = p.gamma / (p.beta_hat * u_P_eq)
        ee = EpidemicState(0.0, 1.0 - x_R, x_R)
        ee_eigs = numpy.linalg.eigvals(jacobian_reduced2(ee.x_S, ee.x_I, u, p))
        return EquilibriumReport(u_P_eq, u_V_eq,
                                 dfe, tags[DFE], tuple(dfe_eigs),
                                 True, ee, tags[EE], tuple(ee_eigs))
    else:
        return EquilibriumReport(u_P_eq, u_V_eq,
                                 dfe, tags[DFE], tuple(dfe_eigs),
                                 False)


# ---------- Assumptions ----------

def immunity_regime(p: ModelParams) -> str:
    '''Classify the kind of immunity conferred by infection.

    :param p: the model parameters
    :returns: one of :attr:`COMPROMISED`, :attr:`PARTIAL`, or :attr:`SIS`'''
    if abs(p.beta_hat - p.beta) <= 1e-12 * max(p.beta, p.beta_hat):
        return SIS
    elif p.beta_hat > p.beta:
        return COMPROMISED
    else:
        return PARTIAL


def check_assumptions(p: ModelParams, w: CostWeights, b: ControlBounds) -> AssumptionReport:
    '''Check the compromised-immunity assumption (:math:`\\hat{\\beta} > \\beta`),
    the three cost assumptions under which the vaccination control
    cannot be singular, and the condition for an endemic equilibrium
    under maximal protection.

    :param p: the model parameters
    :param w: the cost weights
    :param b: the control bounds
    :returns: the assumption report'''
    (beta, beta_hat, gamma) = (p.beta, p.beta_hat, p.gamma)
    (c_P, c_V, c_I) = (w.c_P, w.c_V, w.c_I)
    u_P_min = b.u_P_min

    a2_i_lhs = (beta - beta_hat) * (c_I - c_P)
    a2_i_rhs = -beta * c_V * gamma
    a2_i = not (abs(a2_i_lhs - a2_i_rhs) < ASSUMPTION_TOLERANCE * (1 + abs(a2_i_rhs)))
    a2_ii_lhs = (beta - beta_hat) * c_I + beta * beta_hat * c_V - beta * c_V * gamma
    a2_iii_lhs = (beta - beta_hat) * (c_I - c_P * (1 - u_P_min)) + beta * beta_hat * c_V * u_P_min

    return AssumptionReport(a1=(beta_hat > beta),
                            a2_i=a2_i,
                            a2_ii=(a2_ii_lhs < 0),
                            a2_iii=(a2_iii_lhs < 0),
                            endemic_condition=(gamma < beta_hat * u_P_min),
                            a2_i_lhs=a2_i_lhs,
                            a2_i_rhs=a2_i_rhs,
                            a2_ii_lhs=a2_ii_lhs,
                            a2_iii_lhs=a2_iii_lhs,
                            endemic_ratio=endemic_threshold_ratio(p, u_P_min),
                            regime=immunity_regime(p))
