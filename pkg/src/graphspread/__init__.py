"""Graph and spectral spreads and uncertainty curves for weighted graphs."""

__version__ = "0.1.0"

from .distances import (
    Diffusion,
    ExplicitLengths,
    InverseSimilarityGeodesic,
    NaiveGeodesic,
    diffusion_distance,
    distances,
    inverse_similarity,
)
from .graph import WeightedGraph, eigendecompose, normalized_laplacian
from .spreads import dirichlet_form, graph_spread, spectral_spread, spread_pair
from .uncertainty import mean_curve, normalize_curve, sandwich_curve
