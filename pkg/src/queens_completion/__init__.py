"""n-queens completion: exact search, LP certificates, constructions and a rainbow-matching pipeline."""

from .board import BoardError, LineId, PartialConfig, Square, is_valid_partial
from .certificates import LineWeighting, certify_incompletable, max_fractional_completion, min_cover_value
from .rainbow import PipelineParams, complete_via_pipeline
from .solver import Status, complete, count_completions

__all__ = [
    "BoardError",
    "LineId",
    "LineWeighting",
    "PartialConfig",
    "PipelineParams",
    "Square",
    "Status",
    "certify_incompletable",
    "complete",
    "complete_via_pipeline",
    "count_completions",
    "is_valid_partial",
    "max_fractional_completion",
    "min_cover_value",
]

__version__ = "0.1.0"
