"""Chat-completion backends: a generic HTTP adapter, an append-only
record/replay archive, and deterministic mock backends for end-to-end tests.

Every backend exposes complete(prompt, params, tag) -> Completion. The tag
distinguishes otherwise identical requests (repetition, retry, order index)
so each one gets its own slot in the replay archive; the archive key is a
hash over prompt, tag, and the response-affecting generation parameters.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Protocol, Sequence

from ..dialogue import render_line
from ..errors import (
    AuthMissing,
    RateLimited,
    TimeoutExceeded,
    TransportError,
)
from ..graph import DebateGraph, Relation, RelationKind
from ..metrics import EdgeSet
from ..semantics import Ranking, acceptability, gold_ranking
from .parsing import render_adjacency, render_ranking


@dataclass(frozen=True)
class GenerationParams:
    """Sampling and transport knobs for one evaluation run."""

    temperature: float = 0.7
    repetitions: int = 3
    max_output_tokens: int = 2048
    request_timeout: float = 120.0
    retry_limit: int = 3

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be >= 1")
        if self.request_timeout <= 0:
            raise ValueError("request_timeout must be positive")
        if self.retry_limit < 0:
            raise ValueError("retry_limit must be >= 0")


@dataclass(frozen=True)
class Completion:
    text: str
    latency: float


class Backend(Protocol):
    def describe(self) -> str: ...

    def complete(self, prompt: str, params: GenerationParams, tag: str = "") -> Completion: ...


def request_hash(prompt: str, params: GenerationParams, tag: str) -> str:
    payload = json.dumps(
        {
            "prompt": prompt,
            "tag": tag,
            "temperature": params.temperature,
            "max_output_tokens": params.max_output_tokens,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def complete(backend: Backend, prompt: str, params: GenerationParams, tag: str = "") -> str:
    """Single-completion surface: send one prompt, get the raw response text."""
    return backend.complete(prompt, params, tag).text


# ---------------------------------------------------------------------------
# record / replay


class ReplayArchive:
    """Append-only JSON-lines archive of completed requests.

    Each line holds request_hash, tag, prompt, params, response_text, latency,
    and a timestamp. Lookups key on request_hash; when a hash occurs several
    times the newest line wins.
    """

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self._lock = threading.Lock()

    def load(self) -> dict[str, Completion]:
        entries: dict[str, Completion] = {}
        if not self.path.exists():
            return entries
        for lineno, line in enumerate(self.path.read_text().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                entries[record["request_hash"]] = Completion(
                    text=record["response_text"],
                    latency=float(record.get("latency", 0.0)),
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise TransportError(
                    f"replay archive {self.path} is corrupt at line {lineno}: {exc}"
                ) from None
        return entries

    def append(
        self,
        prompt: str,
        params: GenerationParams,
        tag: str,
        completion: Completion,
    ) -> None:
        record = {
            "request_hash": request_hash(prompt, params, tag),
            "tag": tag,
            "prompt": prompt,
            "params": asdict(params),
            "response_text": completion.text,
            "latency": completion.latency,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
        line = json.dumps(record, sort_keys=True, ensure_ascii=False)
        with self._lock:
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(line + "\n")


class ReplayBackend:
    """Serves archived responses; never touches the network."""

    def __init__(self, archive: ReplayArchive | str | os.PathLike):
        self.archive = archive if isinstance(archive, ReplayArchive) else ReplayArchive(archive)
        self._entries = self.archive.load()

    def describe(self) -> str:
        return f"replay:{self.archive.path.name}"

    def complete(self, prompt: str, params: GenerationParams, tag: str = "") -> Completion:
        key = request_hash(prompt, params, tag)
        try:
            return self._entries[key]
        except KeyError:
            raise TransportError(
                f"replay archive {self.archive.path} has no entry for request "
                f"{key[:12]}... (tag {tag!r})"
            ) from None


class RecordingBackend:
    """Wraps a live backend and appends every completion to an archive."""

    def __init__(self, inner: Backend, archive: ReplayArchive | str | os.PathLike):
        self.inner = inner
        self.archive = archive if isinstance(archive, ReplayArchive) else ReplayArchive(archive)

    def describe(self) -> str:
        return self.inner.describe()

    def complete(self, prompt: str, params: GenerationParams, tag: str = "") -> Completion:
        completion = self.inner.complete(prompt, params, tag)
        self.archive.append(prompt, params, tag, completion)
        return completion


# ---------------------------------------------------------------------------
# generic HTTP adapter


@dataclass(frozen=True)
class BackendConfig:
    """Everything needed to talk to one chat-completion HTTP API.

    Dotted field paths address into the JSON request/response bodies; numeric
    segments index arrays. kind selects the backend implementation: "http",
    or the network-free mocks "gold_echo" and "reversal".
    """

    kind: str = "http"
    url: str = ""
    model: str = ""
    auth_env: str = ""
    auth_header: str = "Authorization"
    auth_scheme: str = "Bearer"
    request_template: dict = field(default_factory=dict)
    prompt_path: str = "messages.0.content"
    temperature_path: str = "temperature"
    max_tokens_path: str = "max_tokens"
    response_text_path: str = "choices.0.message.content"
    headers: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "BackendConfig":
        data = json.loads(Path(path).read_text())
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValueError(f"backend config has unknown fields: {sorted(unknown)}")
        return cls(**data)


def _walk_path(path: str) -> list[str | int]:
    return [int(seg) if seg.isdigit() else seg for seg in path.split(".") if seg]


def _set_path(body, path: str, value) -> None:
    segments = _walk_path(path)
    node = body
    for segment in segments[:-1]:
        node = node[segment]
    node[segments[-1]] = value


def _get_path(body, path: str):
    node = body
    for segment in _walk_path(path):
        node = node[segment]
    return node


class HttpBackend:
    """POSTs JSON to any chat-completion endpoint described by a BackendConfig.

    Transient failures (connection errors, timeouts, 429, 5xx) are retried
    with exponential backoff up to params.retry_limit, then surface as
    RateLimited / TimeoutExceeded / TransportError.
    """

    def __init__(self, config: BackendConfig):
        if not config.url:
            raise ValueError("backend config for kind 'http' needs a url")
        self.config = config
        self._auth_value = None
        if config.auth_env:
            credential = os.environ.get(config.auth_env)
            if not credential:
                raise AuthMissing(
                    f"environment variable {config.auth_env} is not set"
                )
            scheme = f"{config.auth_scheme} " if config.auth_scheme else ""
            self._auth_value = f"{scheme}{credential}"

    def describe(self) -> str:
        return self.config.model or self.config.url

    def _request_body(self, prompt: str, params: GenerationParams) -> dict:
        if self.config.request_template:
            body = json.loads(json.dumps(self.config.request_template))
        else:
            body = {"model": self.config.model, "messages": [{"role": "user", "content": ""}]}
        _set_path(body, self.config.prompt_path, prompt)
        if self.config.temperature_path:
            _set_path(body, self.config.temperature_path, params.temperature)
        if self.config.max_tokens_path:
            _set_path(body, self.config.max_tokens_path, params.max_output_tokens)
        return body

    def complete(self, prompt: str, params: GenerationParams, tag: str = "") -> Completion:
        import httpx

        headers = {"Content-Type": "application/json", **self.config.headers}
        if self._auth_value:
            headers[self.config.auth_header] = self._auth_value
        body = self._request_body(prompt, params)

        last_error: Exception | None = None
        for attempt in range(params.retry_limit + 1):
            if attempt:
                time.sleep(min(0.5 * 2 ** (attempt - 1), 8.0))
            started = time.perf_counter()
            try:
                response = httpx.post(
                    self.config.url,
                    json=body,
                    headers=headers,
                    timeout=params.request_timeout,
                )
            except httpx.TimeoutException as exc:
                last_error = TimeoutExceeded(f"request timed out: {exc}")
                continue
            except httpx.HTTPError as exc:
                last_error = TransportError(f"request failed: {exc}")
                continue
            if response.status_code == 429:
                last_error = RateLimited("backend returned 429 Too Many Requests")
                continue
            if response.status_code >= 500:
                last_error = TransportError(
                    f"backend returned {response.status_code}"
                )
                continue
            if response.status_code >= 400:
                raise TransportError(
                    f"backend returned {response.status_code}: {response.text[:200]}"
                )
            try:
                text = _get_path(response.json(), self.config.response_text_path)
            except (KeyError, IndexError, TypeError, ValueError) as exc:
                raise TransportError(
                    f"response lacks field {self.config.response_text_path!r}: {exc}"
                ) from None
            if not isinstance(text, str):
                raise TransportError(
                    f"response field {self.config.response_text_path!r} is not text"
                )
            return Completion(text=text, latency=time.perf_counter() - started)
        raise last_error if last_error is not None else TransportError("request failed")


# ---------------------------------------------------------------------------
# deterministic mocks


class _GraphAwareMock:
    """Shared machinery: find which known graph's dialogue a prompt contains.

    Prompts may embed several dialogues (exemplars first, target last), so
    among graphs whose every rendered line occurs in the prompt, the one whose
    block starts last wins. Line matching ignores order, so shuffled
    presentations still match.
    """

    def __init__(self, graphs: Sequence[DebateGraph]):
        if not graphs:
            raise ValueError("mock backend needs at least one graph")
        self._lines = {
            g.name: [render_line(a.id, a.text) for a in g.arguments] for g in graphs
        }
        self._graphs = {g.name: g for g in graphs}

    def _target_graph(self, prompt: str) -> DebateGraph:
        best_name, best_position = None, -1
        for name, lines in self._lines.items():
            positions = [prompt.find(line) for line in lines]
            if any(p < 0 for p in positions):
                continue
            block_start = min(positions)
            if block_start > best_position:
                best_name, best_position = name, block_start
        if best_name is None:
            raise TransportError("mock backend: prompt contains no known dialogue")
        return self._graphs[best_name]


class GoldEchoBackend(_GraphAwareMock):
    """Echoes the gold adjacency list and gold ranking for the target graph."""

    def describe(self) -> str:
        return "mock:gold_echo"

    def complete(self, prompt: str, params: GenerationParams, tag: str = "") -> Completion:
        graph = self._target_graph(prompt)
        adjacency = render_adjacency(EdgeSet.from_graph(graph))
        ranking = render_ranking(gold_ranking(acceptability(graph)))
        return Completion(text=f"{adjacency}\n\n{ranking}\n", latency=0.0)


class ReversalBackend(_GraphAwareMock):
    """Worst-case control: reversed gold ranking, kind-flipped adjacency."""

    def describe(self) -> str:
        return "mock:reversal"

    def complete(self, prompt: str, params: GenerationParams, tag: str = "") -> Completion:
        graph = self._target_graph(prompt)
        flipped = EdgeSet(
            frozenset(
                Relation(
                    r.source,
                    r.target,
                    RelationKind.ATTACK if r.kind is RelationKind.SUPPORT else RelationKind.SUPPORT,
                )
                for r in graph.relations
            )
        )
        gold = gold_ranking(acceptability(graph))
        reversed_ranking = Ranking.from_ordered_ids(tuple(reversed(gold.ordered_ids)))
        text = f"{render_adjacency(flipped)}\n\n{render_ranking(reversed_ranking)}\n"
        return Completion(text=text, latency=0.0)


def build_backend(
    config: BackendConfig,
    graphs: Sequence[DebateGraph] = (),
    replay: str | os.PathLike | None = None,
    record: bool = False,
) -> Backend:
    """Assemble the backend stack a run should use.

    replay without record substitutes the archive for the configured backend;
    replay with record runs the configured backend and appends every
    completion to the archive.
    """
    if replay is not None and not record:
        return ReplayBackend(replay)
    if config.kind == "http":
        backend: Backend = HttpBackend(config)
    elif config.kind == "gold_echo":
        backend = GoldEchoBackend(graphs)
    elif config.kind == "reversal":
        backend = ReversalBackend(graphs)
    else:
        raise ValueError(f"unknown backend kind {config.kind!r}")
    if record:
        if replay is None:
            raise ValueError("--record needs an archive path to append to")
        backend = RecordingBackend(backend, replay)
    return backend
