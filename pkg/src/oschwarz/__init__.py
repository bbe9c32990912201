"""Optimized Schwarz methods for the complex diffusion equation on strips.

Layers: symbol (problem data and the interface symbol), spectral (interface
iteration matrix and its spectral radius), optimize (closed-form constants
and numeric min-max transmission parameters), solver (2D finite-difference
RAS/ORAS, stationary and GMRES), reporting/cli (sweeps, slope fits, CSV).
"""

from .symbol import (FrequencyGrid, OuterBC, ProblemParams, Robin1, Robin2,
                     TransmissionParams, Ventcell1, Ventcell2, effective_p,
                     frequency_grid, lambda_symbol, problem_from_json,
                     problem_to_json, transmission_from_json,
                     transmission_to_json)
from .spectral import (IterationMatrix, SpectrumCurve, assemble_iteration_matrix,
                       convergence_curve, interface_coeffs, limiting_bound,
                       rho_highfreq, spectral_radius)
from .optimize import (OptimizationScope, OptimizedChoice, asymptotic_params,
                       constant_K, constant_KJ, constant_Kinf,
                       equioscillation_report, numeric_minmax)
from .solver import (DiscreteProblem, SolveReport, Subdomain, discretize,
                     gmres_solve, ras_iterate, run_case, stationary_solve,
                     strip_partition, sweep_mesh, sweep_subdomains)
from .reporting import SlopeFit, fit_slope

__version__ = "0.1.0"
