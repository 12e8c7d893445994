"""Colouring protocol for the generalized Russian cards problem."""

__version__ = "0.1.0"

from .colouring import (  # noqa: E402
    Colouring,
    CriticalWitness,
    check_critical,
    density,
    find_critical,
    hue_explore,
    hue_neighbors,
    is_distinguished,
    is_perfect,
    is_rich,
    is_very_distinguished,
    knit_colouring,
    lines_meeting,
)
from .field import Field, field_make, field_of_order  # noqa: E402
from .geometry import AffineSpace, Line, Point, affine_space, sigma  # noqa: E402
from .params import FeasibilityReport, bound_heavy_lines, feasible, search_k, suggest_params  # noqa: E402
from .protocol import Deal, ProtocolParams, Transcript, deal_random, run_protocol  # noqa: E402
from .verification import check_informative, check_weak_safety, verify_execution  # noqa: E402
