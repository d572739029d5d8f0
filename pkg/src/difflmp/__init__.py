"""Diffusion least-mean-p-power estimation over sensor networks in alpha-stable noise."""

from difflmp.data_gen import GroundTruth, NodeStream, draw_ground_truth, generate_streams
from difflmp.diffusion_core import (
    LmpConfig,
    NetworkState,
    diffusion_lmp_step,
    global_lmp_step,
    lmp_gain,
    noncooperative_lmp_step,
)
from difflmp.errors import (
    ConfigError,
    GenerationError,
    ParameterError,
    StructuralError,
)
from difflmp.metrics import MsdCurve, average_curves, network_msd
from difflmp.stable_noise import (
    StableParams,
    characteristic_fn,
    dispersion_for_gsnr,
    sample_stable,
)
from difflmp.topology import (
    CombinationWeights,
    Network,
    generate_rgg,
    is_connected,
    make_weights,
    metropolis_weights,
    uniform_weights,
)

__version__ = "0.1.0"

__all__ = [
    "CombinationWeights",
    "ConfigError",
    "GenerationError",
    "GroundTruth",
    "LmpConfig",
    "MsdCurve",
    "Network",
    "NetworkState",
    "NodeStream",
    "ParameterError",
    "StableParams",
    "StructuralError",
    "average_curves",
    "characteristic_fn",
    "diffusion_lmp_step",
    "dispersion_for_gsnr",
    "draw_ground_truth",
    "generate_rgg",
    "generate_streams",
    "global_lmp_step",
    "is_connected",
    "lmp_gain",
    "make_weights",
    "metropolis_weights",
    "network_msd",
    "noncooperative_lmp_step",
    "sample_stable",
    "uniform_weights",
]
