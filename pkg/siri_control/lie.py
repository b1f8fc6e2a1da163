# Lie brackets and singularity analysis
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

'''Lie brackets of the drift and control fields, and the conditions
they give for the controls to be singular.

The bracket of two vector fields is :math:`[F, G] = DG \\cdot F - DF \\cdot G`.
The time derivatives of the switching functions are inner products of
the costates with brackets, so closed forms for the brackets let us
decide when a switching function can vanish on an interval. Each closed
form here can be checked against :func:`lie_bracket_numeric`.
'''

import logging
from dataclasses import dataclass
from typing import Optional, Final, Dict, Any
import numpy
from pandas import DataFrame
from siri_control.model import (ModelParams, CostWeights, ControlBounds, ControlValue, ReducedState,
                                ASSUMPTION_TOLERANCE, VectorField, fields_arrays, vector_fields)
from siri_control.ode import CostateVec


logger = logging.getLogger(__name__)


DEFAULT_BRACKET_STEP: Final[float] = 1e-5    #: Finite-difference step for numeric brackets.
DEFAULT_NESTED_STEP: Final[float] = 1e-4     #: Finite-difference step for brackets of brackets.

BRACKETS: Final = ('fgv', 'gpgv', 'f_gpgv', 'gp_gpgv', 'gv_gpgv', 'fgp')   #: Names of the brackets in a :class:`BracketSet`.


# ---------- Numeric brackets ----------

def jacobian_numeric(F: VectorField, x: numpy.ndarray, h: float = DEFAULT_BRACKET_STEP) -> numpy.ndarray:
    '''The Jacobian of a vector field by central differences.

    :param F: the field
    :param x: the point
    :param h: (optional) the step in each coordinate
    :returns: the matrix :math:`DF(x)`, one column per coordinate'''
    x = numpy.asarray(x, dtype=float)
    n = len(x)
    J = numpy.empty((n, n))
    for j in range(n):
        e = numpy.zeros(n)
        e[j] = h
        J[:, j] = (numpy.asarray(F(x + e)) - numpy.asarray(F(x - e))) / (2 * h)
    return J


def lie_bracket_numeric(F: VectorField, G: VectorField, x: numpy.ndarray,
                        h: float = DEFAULT_BRACKET_STEP, richardson: bool = False) -> numpy.ndarray:
    '''The Lie bracket :math:`[F, G](x) = DG(x) F(x) - DF(x) G(x)` with
    Jacobians taken by central differences.

    With Richardson refinement the bracket is evaluated at steps h and h/2
    and combined to cancel the leading truncation error.

    :param F: the first field
    :param G: the second field
    :param x: the point
    :param h: (optional) the finite-difference step
    :param richardson: (optional) refine by Richardson extrapolation (defaults to False)
    :returns: the bracket'''
    x = numpy.asarray(x, dtype=float)

    def bracket(step):
        return jacobian_numeric(G, x, step) @ numpy.asarray(F(x)) - jacobian_numeric(F, x, step) @ numpy.asarray(G(x))

    if richardson:
        return (4 * bracket(h / 2) - bracket(h)) / 3
    else:
        return bracket(h)


# ---------- Closed forms ----------

@dataclass(frozen=True, eq=False)
class BracketSet:
    '''The brackets of the drift and control fields at a state.'''

    fgv: numpy.ndarray        #: :math:`[f, g_V]`, identically zero.
    gpgv: numpy.ndarray       #: :math:`[g_P, g_V]`.
    f_gpgv: numpy.ndarray     #: :math:`[f, [g_P, g_V]]`.
    gp_gpgv: numpy.ndarray    #: :math:`[g_P, [g_P, g_V]]`.
    gv_gpgv: numpy.ndarray    #: :math:`[g_V, [g_P, g_V]]`, equal to :math:`-[g_P, g_V]`.
    fgp: numpy.ndarray        #: :math:`[f, g_P]`.

    def asDict(self) -> Dict[str, numpy.ndarray]:
        '''Return the brackets keyed by name.

        :returns: a dict'''
        return {n: getattr(self, n) for n in BRACKETS}


def bracket_set_closed(z: ReducedState, p: ModelParams, w: CostWeights) -> BracketSet:
    '''Evaluate the closed forms of the brackets at a state.

    :param z: the state
    :param p: the model parameters
    :param w: the cost weights
    :returns: the brackets'''
    (b, bh, g) = (p.beta, p.beta_hat, p.gamma)
    (c_P, c_V, c_I) = (w.c_P, w.c_V, w.c_I)
    (s, r) = (z.x_S, z.x_R)
    i = 1.0 - s - r
    si = s * i

    gpgv = numpy.array([-b * c_V * si, 0.0, (bh - b) * si])
    f_gpgv = numpy.array([si * ((bh - b) * (c_I - c_P) + b * c_V * g), 0.0, 0.0])
    gp_gpgv = numpy.array([si * ((bh - b) * c_P + b * b * c_V * (1.0 - r - 2 * s) - b * bh * c_V * r),
                           b * (b - bh) * s * si,
                           (bh - b) * si * ((bh - b) * i + b * s)])
    fgp = numpy.array([i * ((c_P - c_I) * (b * s + bh * r) - c_P * g),
                       b * g * si,
                       -g * i * (bh * i + b * s)])
    return BracketSet(fgv=numpy.zeros(3),
                      gpgv=gpgv,
                      f_gpgv=f_gpgv,
                      gp_gpgv=gp_gpgv,
                      gv_gpgv=-gpgv,
                      fgp=fgp)


def bracket_set_numeric(z: ReducedState, p: ModelParams, w: CostWeights,
                        h: float = DEFAULT_BRACKET_STEP, h_nested: float = DEFAULT_NESTED_STEP) -> BracketSet:
    '''Evaluate the brackets by finite differences, nesting numeric
    brackets for the brackets of brackets.

    :param z: the state
    :param p: the model parameters
    :param w: the cost weights
    :param h: (optional) step for single brackets
    :param h_nested: (optional) step for nested brackets
    :returns: the brackets'''
    (f, g_P, g_V) = vector_fields(p, w)
    x = z.asArray()

    def gpgv(y):
        return lie_bracket_numeric(g_P, g_V, y, h)

    return BracketSet(fgv=lie_bracket_numeric(f, g_V, x, h),
                      gpgv=gpgv(x),
                      f_gpgv=lie_bracket_numeric(f, gpgv, x, h_nested),
                      gp_gpgv=lie_bracket_numeric(g_P, gpgv, x, h_nested),
                      gv_gpgv=lie_bracket_numeric(g_V, gpgv, x, h_nested),
                      fgp=lie_bracket_numeric(f, g_P, x, h))


def random_states(rng: numpy.random.Generator, n: int) -> numpy.ndarray:
    '''Draw states uniformly from the simplex, with zero accumulated cost.

    :param rng: the random number generator
    :param n: the number of states
    :returns: array of shape (n, 3) of :math:`(x_C, x_S, x_R)`'''
    xs = rng.dirichlet(numpy.ones(3), size=n)
    return numpy.column_stack([numpy.zeros(n), xs[:, 0], xs[:, 2]])


def bracket_errors(p: ModelParams, w: CostWeights, samples: int = 100, seed: int = 0) -> DataFrame:
    '''Compare the closed-form brackets with numeric ones at random
    states.

    :param p: the model parameters
    :param w: the cost weights
    :param samples: (optional) the number of states (defaults to 100)
    :param seed: (optional) the random seed (defaults to 0)
    :returns: a DataFrame of the maximum and mean max-norm error of each bracket'''
    rng = numpy.random.default_rng(seed)
    errors = {n: [] for n in BRACKETS}
    for x in random_states(rng, samples):
        z = ReducedState.fromArray(x)
        closed = bracket_set_closed(z, p, w).asDict()
        numeric = bracket_set_numeric(z, p, w).asDict()
        for n in BRACKETS:
            errors[n].append(float(numpy.max(numpy.abs(closed[n] - numeric[n]))))
    logger.debug('Compared brackets at {n} states, worst error {e:.3e}'.format(n=samples, e=max(max(es) for es in errors.values())))
    return DataFrame(dict(bracket=list(BRACKETS),
                          max_error=[max(errors[n]) for n in BRACKETS],
                          mean_error=[float(numpy.mean(errors[n])) for n in BRACKETS]))


# ---------- Simultaneous singularity ----------

def _delta1Minor(z: ReducedState, p: ModelParams, w: CostWeights) -> numpy.ndarray:
    (b, bh) = (p.beta, p.beta_hat)
    (s, r) = (z.x_S, z.x_R)
    i = 1.0 - s - r
    return numpy.array([[w.c_V, -w.c_P * (s + r), -b * w.c_V],
                        [-1.0, -b * s * i, 0.0],
                        [1.0, -bh * r * i, bh - b]])


def delta1(z: ReducedState, u_P: float, p: ModelParams, w: CostWeights) -> float:
    '''The determinant of the vectors :math:`g_V`, :math:`g_P`, and
    :math:`[f + g_P u_P, g_V]`, in factorised form as
    :math:`x_S^2 x_I u_P` times a 3x3 minor. If it is non-zero the
    two controls cannot be singular together.

    :param z: the state
    :param u_P: the protection relaxation
    :param p: the model parameters
    :param w: the cost weights
    :returns: the determinant'''
    s = z.x_S
    return float(s * s * z.x_I * u_P * numpy.linalg.det(_delta1Minor(z, p, w)))


def delta1_raw(z: ReducedState, u_P: float, p: ModelParams, w: CostWeights) -> float:
    '''The same determinant as :func:`delta1`, computed directly from
    the three column vectors.

    :param z: the state
    :param u_P: the protection relaxation
    :param p: the model parameters
    :param w: the cost weights
    :returns: the determinant'''
    (_, g_P, g_V) = fields_arrays(z.asArray(), p, w)
    bs = bracket_set_closed(z, p, w)
    return float(numpy.linalg.det(numpy.column_stack([g_V, g_P, bs.fgv + u_P * bs.gpgv])))


@dataclass(frozen=True)
class SimultaneousSingularity:
    '''Whether the two controls might be singular together.

    :param not_excluded: True if the determinant test does not rule it out
    :param required_x_I: the infected fraction at which the minor vanishes (None if it never or always does)'''

    not_excluded: bool
    required_x_I: Optional[float]

    def asDict(self) -> Dict[str, Any]:
        '''Return the result as a dict.

        :returns: the dict'''
        return dict(not_excluded=self.not_excluded, required_x_I=self.required_x_I)


def simultaneous_singularity_possible(p: ModelParams, w: CostWeights, b: ControlBounds) -> SimultaneousSingularity:
    '''Test whether the two controls could be singular on the same
    interval. Away from :math:`x_S = 0` this needs the minor of
    :func:`delta1` to vanish, which happens only at
    :math:`x_I = c_P (\\beta - \\hat{\\beta}) / c_V \\beta \\hat{\\beta}`.
    Under compromised immunity this is negative and so unreachable.

    A result that is not excluded doesn't mean that simultaneous
    singularity happens, only that this test can't rule it out.

    :param p: the model parameters
    :param w: the cost weights
    :param b: the control bounds
    :returns: the result with its witness'''
    (beta, beta_hat) = (p.beta, p.beta_hat)
    if w.c_V == 0:
        # minor is -(x_S + x_R) c_P (beta_hat - beta), independent of x_I
        degenerate = (w.c_P == 0 or beta == beta_hat)
        return SimultaneousSingularity(degenerate, None)
    x_I = w.c_P * (beta - beta_hat) / (w.c_V * beta * beta_hat)
    if beta_hat > beta:
        return SimultaneousSingularity(False, x_I)
    return SimultaneousSingularity(0.0 <= x_I < 1.0, x_I)


# ---------- Singular protection ----------

@dataclass(frozen=True)
class SingularityCoefficients:
    '''The coefficients expanding :math:`[g_P, [g_P, g_V]]` in the basis
    :math:`g_V`, :math:`[g_P, g_V]`, :math:`[f, [g_P, g_V]]`. When the
    denominator of :math:`\\kappa` vanishes it is undefined, and held as None.'''

    epsilon: float
    mu: float
    kappa: Optional[float]

    @property
    def kappa_defined(self) -> bool:
        '''True if :math:`\\kappa` is defined.'''
        return self.kappa is not None


def kappa_denominator(p: ModelParams, w: CostWeights) -> float:
    '''The denominator of :math:`\\kappa`, which is the bracket
    :math:`[f, [g_P, g_V]]` divided by :math:`x_S x_I`.

    :param p: the model parameters
    :param w: the cost weights
    :returns: the denominator'''
    return (p.beta_hat - p.beta) * (w.c_I - w.c_P) + p.beta * w.c_V * p.gamma


def singularity_coefficients(z: ReducedState, p: ModelParams, w: CostWeights) -> SingularityCoefficients:
    '''Decompose :math:`[g_P, [g_P, g_V]]` into
    :math:`\\epsilon g_V + \\mu [g_P, g_V] + \\kappa [f, [g_P, g_V]]`.

    :param z: the state
    :param p: the model parameters
    :param w: the cost weights
    :returns: the coefficients'''
    (b, bh) = (p.beta, p.beta_hat)
    (s, r) = (z.x_S, z.x_R)
    i = 1.0 - s - r
    epsilon = b * s * (bh - b) * i
    mu = (bh - b) * i

    den = kappa_denominator(p, w)
    if abs(den) < ASSUMPTION_TOLERANCE * (1 + abs(b * w.c_V * p.gamma)):
        kappa = None
    else:
        num = (bh - b) * w.c_P + b * bh * w.c_V * (1.0 - 2 * s - 2 * r)
        kappa = num / den
    return SingularityCoefficients(epsilon, mu, kappa)


@dataclass(frozen=True)
class SingularCandidate:
    '''The only value a singular protection control could take while
    vaccination is singular, or the reason there is none.'''

    value: Optional[float]
    reason: Optional[str] = None


def singular_up_candidate(z: ReducedState, p: ModelParams, w: CostWeights) -> SingularCandidate:
    '''The candidate :math:`u_P = -1 / \\kappa` forced on protection
    when vaccination is singular.

    :param z: the state
    :param p: the model parameters
    :param w: the cost weights
    :returns: the candidate'''
    c = singularity_coefficients(z, p, w)
    if not c.kappa_defined:
        return SingularCandidate(None, 'kappa undefined')
    if c.kappa == 0:
        return SingularCandidate(None, 'kappa is zero')
    return SingularCandidate(-1.0 / c.kappa)


@dataclass(frozen=True)
class SingularBoundConditions:
    '''The left-hand sides of the conditions under which the singular
    protection candidate sits at one of its bounds. Where the candidate
    is attained each is a non-negative multiple of :math:`x_I`, so a
    negative value excludes it.'''

    upper_lhs: float
    lower_lhs: float

    @property
    def upper_excluded(self) -> bool:
        '''True if the candidate can't be 1.'''
        return self.upper_lhs < 0

    @property
    def lower_excluded(self) -> bool:
        '''True if the candidate can't be the lower bound.'''
        return self.lower_lhs < 0

    def asDict(self) -> Dict[str, Any]:
        '''Return the conditions as a dict.

        :returns: the dict'''
        return dict(upper_lhs=self.upper_lhs, lower_lhs=self.lower_lhs,
                    upper_excluded=self.upper_excluded, lower_excluded=self.lower_excluded)


def singular_bound_conditions(p: ModelParams, w: CostWeights, b: ControlBounds) -> SingularBoundConditions:
    '''Evaluate the conditions for singular vaccination to coexist
    with protection at either of its bounds.

    :param p: the model parameters
    :param w: the cost weights
    :param b: the control bounds
    :returns: the conditions'''
    (beta, beta_hat, gamma) = (p.beta, p.beta_hat, p.gamma)
    (c_P, c_V, c_I) = (w.c_P, w.c_V, w.c_I)
    u = b.u_P_min
    upper = (beta - beta_hat) * c_I - beta * c_V * gamma + beta * beta_hat * c_V
    lower = (beta - beta_hat) * (c_I - c_P * (1 - u)) + beta * beta_hat * c_V * u
    return SingularBoundConditions(upper, lower)


# ---------- Switching function derivatives ----------

@dataclass(frozen=True)
class SwitchingDerivatives:
    '''Time derivatives of the switching functions under constant controls.'''

    dphi_P: float
    dphi_V: float
    ddphi_V: float


def switching_derivatives(z: ReducedState, u: ControlValue, lam: CostateVec,
                          p: ModelParams, w: CostWeights) -> SwitchingDerivatives:
    '''The first derivatives of both switching functions, and the second
    derivative of the vaccination switching function, expressed through
    brackets. The second derivative assumes the controls are constant.

    :param z: the state
    :param u: the controls
    :param lam: the costates
    :param p: the model parameters
    :param w: the cost weights
    :returns: the derivatives'''
    bs = bracket_set_closed(z, p, w)
    l = lam.asArray()
    gpgv = float(l @ bs.gpgv)
    return SwitchingDerivatives(dphi_P=float(l @ bs.fgp) - gpgv * u.u_V,
                                dphi_V=gpgv * u.u_P,
                                ddphi_V=(float(l @ bs.f_gpgv) * u.u_P +
                                         float(l @ bs.gp_gpgv) * u.u_P ** 2 +
                                         float(l @ bs.gv_gpgv) * u.u_P * u.u_V))
