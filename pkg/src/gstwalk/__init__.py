"""Continuous-time quantum walks and group state transfer on graphs."""

from .graphs import (
    GeneratorSpec,
    Graph,
    GraphParameterError,
    SrgParams,
    bipartition,
    build,
    cartesian_product,
    complement,
    join,
    recognize_srg,
)
from .gst import (
    GSTReport,
    VertexSet,
    closure,
    equal_card_structure,
    forward_set,
    has_gst,
    inverse_set,
    parallel_check,
)
from .spectral import Spectrum, TransitionMatrix, decompose, srg_h, transition, verify_spectrum

__version__ = "0.1.0"
