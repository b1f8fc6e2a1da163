# Initialisation for siri-control
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

# Errors
from .exceptions import (SIRIError, DomainError, UnsupportedRegimeError, IntegrationDivergedError,
                         ArgumentError, ScenarioError, UsageError)

# The model
from .model import (SIMPLEX_TOLERANCE, ASSUMPTION_TOLERANCE,
                    STABLE, UNSTABLE, INCONCLUSIVE, DFE, EE, COMPROMISED, PARTIAL, SIS,
                    ModelParams, CostWeights, ControlValue, ControlBounds, EpidemicState, ReducedState,
                    EquilibriumReport, AssumptionReport, VectorField,
                    rhs_full, rhs_reduced2, running_cost, mayer_rates, fields_arrays, fields_reduced,
                    vector_fields, jacobian_reduced2, endemic_threshold_ratio, classify_stability,
                    equilibria, immunity_regime, check_assumptions)

# Time and controls
from .timegrid import TimeGrid, DEFAULT_HORIZON, DEFAULT_STEPS
from .controlsignal import ControlSignal

# Integration
from .ode import (DIVERGENCE_TOLERANCE, CostateVec, Trajectory, CostBreakdown,
                  integrate_forward, simulate_full, costate_rates, switching_arrays,
                  integrate_costate_backward, step_midpoints, interleave,
                  cost_breakdown, segment_integrals)

# Geometry of the control system
from .lie import (DEFAULT_BRACKET_STEP, DEFAULT_NESTED_STEP, BRACKETS,
                  jacobian_numeric, lie_bracket_numeric, BracketSet, bracket_set_closed, bracket_set_numeric,
                  random_states, bracket_errors, delta1, delta1_raw,
                  SimultaneousSingularity, simultaneous_singularity_possible,
                  SingularityCoefficients, kappa_denominator, singularity_coefficients,
                  SingularCandidate, singular_up_candidate,
                  SingularBoundConditions, singular_bound_conditions,
                  SwitchingDerivatives, switching_derivatives)

# The maximum principle and diagnostics
from .pmp import (PROTECTION, VACCINATION, DEFAULT_HOLD_TOLERANCE, DEFAULT_SINGULAR_FRACTION,
                  DEFAULT_SINGULAR_LENGTH, DELTA1_STATE_FLOOR, SINGULAR_BOUND_DISTANCE,
                  SwitchingValues, hamiltonian, switching_functions, bang_bang_policy,
                  pmp_residuals, pmp_residual, SwitchEvent, SingularInterval,
                  detect_switches, detect_singular_arcs, singular_mask, DiagnosticsReport, diagnose)

# Scenarios
from .scenario import (INGEST_TOLERANCE, Scenario, PRESET_BOUNDS, PRESET_INITIAL, PRESET_CASES, PRESET_HORIZONS,
                       preset, load_scenario, save_scenario)

# Solvers
from .solver import (DIRECT_SHOOTING, FBSM, METHODS, DEFAULT_SEGMENTS, SHARPEN_DISTANCE, SHARPEN_SLACK, BB_RANGE,
                     STALL_WINDOW, STOP_GRADIENT, STOP_COST, STOP_CHANGE, STOP_LINE_SEARCH, STOP_ITERATIONS,
                     SolveOptions, SolveReport, objective, gradient_adjoint, solve_direct, solve_fbsm, solve)

# Run artifacts
from .artifacts import (TRAJECTORY_COLUMNS, CONTROL_COLUMNS, FLOAT_FORMAT, MANIFEST_VERSION,
                        TRAJECTORY_FILE, CONTROLS_FILE, REPORT_FILE, MANIFEST_FILE,
                        atomic_write, jsonable, RunArtifacts, Manifest,
                        write_trajectory_csv, read_trajectory_csv, write_controls_csv, read_controls_csv,
                        write_report_json, read_report_json, write_manifest, read_manifest)

# Experiments
from .experiment import SIRIExperiment
from .simulation import SIRISimulation
from .optimalcontrol import SIRIOptimalControl
