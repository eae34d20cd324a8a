"""knotflow: constrained gradient flow and complexity functionals for closed curves."""

from .complexity import (
    CrossingReport,
    acn_bound_check,
    average_crossing_number,
    crossing_integral,
    total_q_curvature,
    weighted_bound_check,
)
from .energy import EnergyBreakdown, bending_energy, interaction_energy, total_energy
from .fields import (
    CurveEmbedding,
    TangentField,
    constant_speed_project,
    distortion,
    geodesic_distance,
    reconstruct_curve,
    sobolev_seminorm,
)
from .flow import (
    FlowState,
    StepControls,
    adapt_and_accept,
    equilibrium_residual,
    gram_matrix,
    multipliers,
    rhs,
    run,
    step,
)
from .forcing import FractionalMultiplier, assemble_force, build_multiplier, regular_force, singular_part
from .generators import (
    gen_circle,
    gen_dc_perturbation,
    gen_double_covered,
    gen_supercoil,
    gen_trefoil_torus,
    parse_generator,
    perturbed_circle,
    planar_double_points,
    random_embedded_curve,
)
from .curvefile import load_curve_file, read_curve_file, write_curve_file
from .kernels import (
    Kernel,
    make_distortion_kernel,
    make_mobius_kernel,
    make_ohara_kernel,
    parse_kernel,
)
from .spectrum import (
    KernelMoments,
    ModeMatrix,
    circle_linearization,
    dc_bending_rates,
    kernel_moments,
    spectrum_report,
)

__version__ = "0.1.0"
