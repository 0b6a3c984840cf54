"""routecast: FPGA place-and-route pipeline with learned congestion forecasts.

The pipeline half generates synthetic netlists, anneals placements,
routes them under negotiated congestion, and rasterizes everything into
aligned images. The model half trains a conditional GAN (on a small
from-scratch autodiff core) to forecast the routed congestion heat map
directly from the post-placement image, plus the metrics and placement
exploration built on those forecasts.
"""

from .arch import Floorplan, RoutingGraph, canonical_json, make_floorplan, routing_graph
from .cgan import (
    DiscriminatorConfig,
    GeneratorConfig,
    ModelCheckpoint,
    Predictor,
    TrainCallbacks,
    TrainConfig,
    default_configs,
    fine_tune,
    gan_step,
    infer,
    train,
)
from .errors import ArtifactIOError, ValidationError
from .metrics import (
    AccuracyReport,
    ExploreObjective,
    RankingReport,
    ablation_compare,
    explore,
    per_pixel_accuracy,
    topk_overlap,
)
from .netlist import Net, Netlist, SyntheticParams, generate_synthetic, load_netlist, parse_netlist
from .placer import AnnealResult, AnnealSchedule, Placement, anneal, hpwl, random_placement, sweep, validate_placement
from .raster import (
    DEFAULT_SCHEME,
    ColorScheme,
    ImagePlane,
    RasterLayout,
    decode_heatmap,
    load_png,
    render_connectivity,
    render_floorplan,
    render_heatmap,
    render_placement,
    save_png,
    stack_input,
    to_grayscale,
)
from .router import ChannelUtilization, NetRoute, RouteConfig, RoutingResult, congestion_score, route

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "AnnealResult",
    "AnnealSchedule",
    "ArtifactIOError",
    "ChannelUtilization",
    "ColorScheme",
    "DEFAULT_SCHEME",
    "DiscriminatorConfig",
    "ExploreObjective",
    "Floorplan",
    "GeneratorConfig",
    "ImagePlane",
    "ModelCheckpoint",
    "Net",
    "NetRoute",
    "Netlist",
    "Placement",
    "Predictor",
    "RankingReport",
    "RasterLayout",
    "RouteConfig",
    "RoutingGraph",
    "RoutingResult",
    "SyntheticParams",
    "TrainCallbacks",
    "TrainConfig",
    "ValidationError",
    "ablation_compare",
    "anneal",
    "canonical_json",
    "congestion_score",
    "decode_heatmap",
    "default_configs",
    "explore",
    "fine_tune",
    "gan_step",
    "generate_synthetic",
    "hpwl",
    "infer",
    "load_netlist",
    "load_png",
    "make_floorplan",
    "parse_netlist",
    "per_pixel_accuracy",
    "random_placement",
    "render_connectivity",
    "render_floorplan",
    "render_heatmap",
    "render_placement",
    "route",
    "routing_graph",
    "save_png",
    "stack_input",
    "sweep",
    "to_grayscale",
    "topk_overlap",
    "train",
    "validate_placement",
]
