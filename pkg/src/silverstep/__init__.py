"""Silver step-size Riemannian gradient descent on non-negatively curved
manifolds (Euclidean space, the unit sphere, Bures-Wasserstein Gaussian
space), with a benchmark CLI and a numerical certification suite for the
geometric and convexity inequalities the method's convergence rests on.
"""

from .linalg import EigenDecomposition, SpdMatrix, SymMatrix, log_det, spd_inv_sqrt, spd_sqrt, sym_eigen
from .manifolds import (
    BuresWasserstein,
    Euclidean,
    Manifold,
    ManifoldPoint,
    Sphere,
    TangentVector,
    ot_map_matrix,
    riemannian_grad,
)
from .objectives import (
    ConvexQuadratic,
    GaussianEntropy,
    MeanFieldNet,
    Objective,
    QuadraticPotentialBW,
    RayleighSphere,
    make_meanfield_dataset,
    make_meanfield_net,
    make_rayleigh_matrix,
    make_sigma_star,
)
from .optimizer import BoundReport, Trajectory, check_bound, error_curve, restarted_run, rgd_run
from .schedules import (
    RHO,
    RestartPlan,
    StepSchedule,
    constant_schedule,
    rate_factor,
    restart_plan,
    silver_schedule,
    silver_step,
)

__version__ = "0.1.0"
