"""graphlap: weighted graph Laplacians (V, b, c, m).

Spectra of Dirichlet finite sections, isoperimetric constants with their
two-sided spectral bounds, co-area identities, heat content with killing,
mass-conservation (stochastic completeness) verdicts, and reproducible
Monte Carlo simulation of the associated jump process.
"""

__version__ = "0.1.0"

from .families import ExplicitFamily, GraphFamily, Law, RayFamily, TreeFamily, family_from_file, family_from_json
from .graph import GraphData, GraphError, GraphValidationError, Violation, WeightedGraph, validate
from .heat import heat_content, largest_alpha_harmonic, stochastic_verdict, w_quadrature_crosscheck
from .isoperimetry import alpha_exact, alpha_upper, beta_gamma, boundary_measure, coarea_first, coarea_second
from .sections import DirichletSection, Exhaustion, SolverError, ball_exhaustion, condition_A_diagnostic, section
from .simulate import TrajectoryBatch, estimate_heat_quantities, jump_parameters, simulate, transition_estimate
from .spectral import (
    boundedness_report,
    cheeger_sandwich,
    eigenvalues,
    emptiness_diagnostic,
    essential_spectrum_estimate,
    spectrum_report,
)
from .verify import run_verify

__all__ = [
    "__version__",
    "WeightedGraph",
    "GraphData",
    "GraphError",
    "GraphValidationError",
    "Violation",
    "validate",
    "GraphFamily",
    "ExplicitFamily",
    "RayFamily",
    "TreeFamily",
    "Law",
    "family_from_json",
    "family_from_file",
    "DirichletSection",
    "Exhaustion",
    "SolverError",
    "section",
    "ball_exhaustion",
    "condition_A_diagnostic",
    "eigenvalues",
    "boundedness_report",
    "cheeger_sandwich",
    "spectrum_report",
    "essential_spectrum_estimate",
    "emptiness_diagnostic",
    "boundary_measure",
    "alpha_exact",
    "alpha_upper",
    "beta_gamma",
    "coarea_first",
    "coarea_second",
    "heat_content",
    "largest_alpha_harmonic",
    "stochastic_verdict",
    "w_quadrature_crosscheck",
    "jump_parameters",
    "simulate",
    "TrajectoryBatch",
    "estimate_heat_quantities",
    "transition_estimate",
    "run_verify",
]
