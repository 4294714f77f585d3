"""Exact distribution, density and moments of Lovasz extensions (discrete
Choquet integrals) of independent uniform inputs."""

from .capacity import (
    Capacity,
    CapacityError,
    CapacityParseError,
    Classification,
    CompletenessError,
    GroundingError,
    MoebiusRepresentation,
    classify,
    knot_profile,
    load_capacity,
    moebius_transform,
    read_capacity,
)
from .distribution import (
    DistributionGrid,
    MomentTable,
    cdf,
    cdf_minus,
    cdf_symmetric,
    distribution_grid,
    expectation_functional,
    moment_table,
    pdf,
    pdf_symmetric,
    quantile,
    raw_moment,
)
from .lovasz import eval_moebius, eval_sorted

__version__ = "0.1.0"


def corpus():
    """Names and paths of the bundled example capacity files."""
    from importlib.resources import files

    root = files(__name__) / "data"
    return {p.name[:-5]: p for p in sorted(root.iterdir(), key=lambda p: p.name) if p.name.endswith(".json")}
