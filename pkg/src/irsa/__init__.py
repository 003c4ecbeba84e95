"""Irregular repetition slotted ALOHA: simulation, density evolution and
finite-length waterfall predictions."""

__version__ = "0.1.0"

from .degree import (  # noqa: E402
    DegreeDistribution,
    EdgeDistribution,
    edge_perspective,
    make_distribution,
    mean_degree,
    named_distribution,
    parse_distribution,
    sample_degree,
)
from .density_evolution import asymptotic_plp, bp_threshold, compute_gamma, de_fixed_point  # noqa: E402
from .floor import FloorEstimate, floor_estimate  # noqa: E402
from .frame import (  # noqa: E402
    DecodeOutcome,
    FrameGraph,
    exact_fer_small,
    generate_frame,
    sic_decode,
)
from .scaling import ScalingParams, builtin_params, fep_predict, plp_predict, q_tail  # noqa: E402
