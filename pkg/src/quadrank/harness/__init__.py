"""LLM evaluation harness: prompt building, backends, response parsing, runs."""

from .backends import (
    BackendConfig,
    Completion,
    GenerationParams,
    GoldEchoBackend,
    HttpBackend,
    RecordingBackend,
    ReplayArchive,
    ReplayBackend,
    ReversalBackend,
    build_backend,
    complete,
    request_hash,
)
from .parsing import (
    AdjacencyParse,
    parse_adjacency,
    parse_ranking,
    render_adjacency,
    render_ranking,
)
from .prompts import (
    Exemplar,
    PromptStrategy,
    TemplateSet,
    build_prompt,
    default_exemplar_names,
    exemplar_from_graph,
)
from .runner import (
    EvalRecord,
    ModelResponse,
    RunReport,
    run_evaluation,
    run_toposort_robustness,
    write_report,
)

__all__ = [
    "AdjacencyParse",
    "BackendConfig",
    "Completion",
    "EvalRecord",
    "Exemplar",
    "GenerationParams",
    "GoldEchoBackend",
    "HttpBackend",
    "ModelResponse",
    "PromptStrategy",
    "RecordingBackend",
    "ReplayArchive",
    "ReplayBackend",
    "ReversalBackend",
    "RunReport",
    "TemplateSet",
    "build_backend",
    "build_prompt",
    "complete",
    "default_exemplar_names",
    "exemplar_from_graph",
    "parse_adjacency",
    "parse_ranking",
    "render_adjacency",
    "render_ranking",
    "request_hash",
    "run_evaluation",
    "run_toposort_robustness",
    "write_report",
]
