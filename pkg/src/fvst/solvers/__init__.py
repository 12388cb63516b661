"""FVS solvers: exact oracle, CDZ, local ratio, layering and the 7/3 pipeline."""

from .cdz import cdz, cdz_value
from .exact import EXACT_MAX_N, exact_fvs, exact_weight
from .layers import LayeringTrace, LayerEntry, check_layering_trace, layers, span_findings
from .local_ratio import local_ratio_3approx
from .pipeline import PipelineResult, RoundingTrace, fvst_7_3, rounding_phase

__all__ = [
    "EXACT_MAX_N",
    "LayerEntry",
    "LayeringTrace",
    "PipelineResult",
    "RoundingTrace",
    "cdz",
    "cdz_value",
    "check_layering_trace",
    "exact_fvs",
    "exact_weight",
    "fvst_7_3",
    "layers",
    "local_ratio_3approx",
    "rounding_phase",
    "span_findings",
]
