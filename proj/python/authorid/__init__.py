"""Fine-grained authorship detection: human, LLM, or human-LLM collaborative.

The heavy lifting lives in the compiled extension; this package re-exports it.
"""

from authorid._core import (  # noqa: F401
    Index,
    Model,
    __version__,
    cosine_similarity,
    evaluate,
    fuzzy_weights,
    hash_embed,
    level_loss,
    run_command,
)

__all__ = [
    "Index",
    "Model",
    "__version__",
    "cosine_similarity",
    "evaluate",
    "fuzzy_weights",
    "hash_embed",
    "level_loss",
    "run_command",
]
