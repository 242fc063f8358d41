"""Alternating projections for two-set feasibility problems.

Exact, inexact, and linearized variants of the alternating-projection
iteration, a small dense nearest-point QP solver with KKT certificates,
a library of exactly projectable sets, and diagnostics that measure
contraction rates and intersection angles from iteration traces.
"""

from .alternating import (
    ApproximateProjector,
    ExactApproximateProjector,
    InexactProjector,
    IterationTrace,
    SolveOptions,
    make_corrupting_projector,
    run_approximate,
    run_exact,
    run_inexact,
)
from .diagnostics import angles_from_trace, compare_predicted, fit_rate
from .inclusion import (
    ChartApproximateProjector,
    InclusionProblem,
    ManifoldChart,
    chart_projection_oracle,
    faithful_projection,
    gauss_newton_step,
    normal_space_basis,
    solve_inclusion,
    verify_faithfulness,
)
from .linconstr import (
    ConstraintSystem,
    check_licq,
    linearized_projection,
    measure_quadratic_decay,
    newton_feasibility_step,
    solve_constraint_system,
)
from .polymap import Monomial, PolyMap
from .qp import KktCertificate, ProjectionQp, min_norm_step, solve_projection_qp
from .sets import (
    AffineSubspace,
    Ball,
    Box,
    FinitePointSet,
    FixedRankMatrices,
    Halfspace,
    Hyperplane,
    NormalConeProbe,
    Polyhedron,
    ProjectableSet,
    Sphere,
    check_transversality,
    normal_vectors,
    set_from_json,
)

__version__ = "0.1.0"
