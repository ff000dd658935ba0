"""Kuramoto oscillators with Hebbian adaptive coupling.

Simulation, phase-locked fixed points, and spectral stability on arbitrary
connected graphs, together with the half-angle correspondence that maps the
adaptive model onto the classical fixed-coupling model with K = 1/(2 alpha).
"""

__version__ = "0.1.0"

from .graph import (
    Graph,
    complete_graph,
    graph_from_edges,
    incidence_matrix,
    laplacian_from_weights,
    load_graph,
    parse_edge_list,
    parse_graph_spec,
)
from .model import (
    Generalized,
    HebbState,
    Sine,
    SystemParams,
    classical_vector_field,
    generalized_vector_field,
    hebbian_vector_field,
    lyapunov_energy,
    phase_diameter,
    residual_norm,
    vector_field,
)
from .dynamics import (
    IntegrationDivergedError,
    IntegratorConfig,
    LockReport,
    SynchronyReport,
    Trajectory,
    detect_phase_lock,
    integrate,
    read_trajectory_csv,
    synchrony_report,
    write_trajectory_csv,
)
from .equilibria import (
    FixedPoint,
    NewtonResult,
    PlaneGrid,
    PlanePoint,
    SweepRecord,
    critical_radius,
    feasibility_sweep,
    frequency_from_plane,
    frequency_within_degree_bound,
    gamma_at_fixed_point,
    induced_frequencies,
    lift_to_hebbian,
    phase_orbit_distance,
    plane_from_frequency,
    reduced_residual,
    solve_classical_fixed_point,
    solve_fixed_point,
    write_sweep_csv,
)
from .spectral import (
    BlockJacobian,
    Inertia,
    InternalConsistencyError,
    StabilityReport,
    assemble_jacobian,
    classical_jacobian,
    classify_stability,
    generalized_reduced_jacobian,
    index_equivalence_case,
    inertia_direct,
    inertia_haynsworth,
    schur_reduced,
)

__all__ = [
    "Graph", "complete_graph", "graph_from_edges", "incidence_matrix",
    "laplacian_from_weights", "load_graph", "parse_edge_list",
    "parse_graph_spec",
    "Generalized", "HebbState", "Sine", "SystemParams",
    "classical_vector_field", "generalized_vector_field",
    "hebbian_vector_field", "lyapunov_energy", "phase_diameter",
    "residual_norm", "vector_field",
    "IntegrationDivergedError", "IntegratorConfig", "LockReport",
    "SynchronyReport", "Trajectory", "detect_phase_lock", "integrate",
    "read_trajectory_csv", "synchrony_report", "write_trajectory_csv",
    "FixedPoint", "NewtonResult", "PlaneGrid", "PlanePoint", "SweepRecord",
    "critical_radius", "feasibility_sweep", "frequency_from_plane",
    "frequency_within_degree_bound", "gamma_at_fixed_point",
    "induced_frequencies", "lift_to_hebbian", "phase_orbit_distance",
    "plane_from_frequency", "reduced_residual",
    "solve_classical_fixed_point", "solve_fixed_point", "write_sweep_csv",
    "BlockJacobian", "Inertia", "InternalConsistencyError",
    "StabilityReport", "assemble_jacobian", "classical_jacobian",
    "classify_stability", "generalized_reduced_jacobian",
    "index_equivalence_case", "inertia_direct", "inertia_haynsworth",
    "schur_reduced",
]
