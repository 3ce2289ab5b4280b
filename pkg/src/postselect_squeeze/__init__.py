"""Conditional spin squeezing of emitter ensembles heralded by photon detection."""
from .errors import (
    CapacityExceeded,
    ImpossibleDetection,
    InvalidConfig,
    InvalidGeometry,
    InvalidParameter,
    PostselectError,
    UnsupportedOrder,
)
from .model import (
    DetectionPlan,
    EmitterState,
    Geometry,
    ProductState,
    WaveDirection,
    css_state,
    direction,
    make_chain,
    make_random_sphere,
    make_ring,
    population_state,
    steady_state,
    structure_factor,
)

__version__ = "0.1.0"
