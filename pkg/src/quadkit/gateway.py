"""Batch client for OpenAI-compatible chat-completions endpoints."""

from __future__ import annotations

import json
import logging
import os
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import httpx

from .model import NULL_TARGET, WRAPPER_KEY, Arity, DomainTaxonomy, Sentiment

log = logging.getLogger(__name__)

RETRY_STATUS = {429, 500, 502, 503, 504}

TARGET_DESCRIPTION = (
    "A specific word or short extract, taken without modification, from the context "
    "sentence which someone is expressing an opinion about. For example in the sentence "
    "'I love my new iPhone, it is so great ', the target is iPhone. Use the specific word "
    f"{NULL_TARGET} if there is no explicit target, for example in the sentence 'Pretty good', "
    "there is no explicit target."
)
CATEGORY_DESCRIPTION = (
    "The best description of the category that the target belongs to. For example, if the "
    "person is talking about the price of a service, the aspect_category is: price"
)
SENTIMENT_DESCRIPTION = (
    "The best description of the sentiment that the opinion towards the target belongs to. "
    "For example, if the person is satisfied with the service, the sentiment is: positive"
)
EXPRESSION_DESCRIPTION = (
    "A short extract, taken without modification, from the context sentence which explains "
    "or justifies the overall classification of the sentiment and aspect_category"
)
LIST_DESCRIPTION = (
    "A structured list of individual topics or subjects in a sentence, which are then used "
    "for targeted sentiment analysis"
)


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str
    model: str
    api_key_env: str = "OPENAI_API_KEY"
    temperature: float = 0.0
    max_output_tokens: int = 1024
    timeout_s: float = 60
    max_retries: int = 3
    max_concurrency: int = 4
    structured_output: bool = False
    backoff_base_s: float = 1.0
    backoff_max_s: float = 30.0

    def __post_init__(self):
        if self.max_concurrency < 1:
            raise ConfigError("max_concurrency must be >= 1")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")

    @classmethod
    def from_dict(cls, d: dict) -> "EndpointConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown endpoint settings: {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as e:
            raise ConfigError(str(e)) from None

    def api_key(self) -> str:
        key = os.environ.get(self.api_key_env)
        if not key:
            raise ConfigError(f"environment variable {self.api_key_env} is not set")
        return key

    @property
    def url(self) -> str:
        if not self.base_url:
            raise ConfigError("endpoint base_url is empty")
        return self.base_url.rstrip("/") + "/chat/completions"


@dataclass(frozen=True)
class RawPrediction:
    sample_id: str
    raw_output: str
    latency_ms: int
    attempt_count: int
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RawPrediction":
        return cls(d["sample_id"], d.get("raw_output", ""), int(d.get("latency_ms", 0)),
                   int(d.get("attempt_count", 0)), d.get("error"))


def emit_json_schema(taxonomy: DomainTaxonomy) -> dict:
    """JSON Schema for structured generation, enums bound to ``taxonomy``."""
    props = {
        "target": {"type": "string", "description": TARGET_DESCRIPTION},
        "aspect_category": {"type": "string", "enum": list(taxonomy.labels),
                            "description": CATEGORY_DESCRIPTION},
        "sentiment": {"type": "string", "enum": [s.value for s in Sentiment],
                      "description": SENTIMENT_DESCRIPTION},
    }
    if taxonomy.arity is Arity.QUAD:
        props["opinion_expression"] = {"type": "string", "description": EXPRESSION_DESCRIPTION}
    term = {
        "type": "object",
        "title": "ComplexSentimentAnalysisTerm",
        "properties": props,
        "required": list(props),
        "additionalProperties": False,
    }
    return {
        "type": "object",
        "title": "AspectBasedSentimentAnalysis",
        "properties": {
            WRAPPER_KEY: {"type": "array", "items": term, "description": LIST_DESCRIPTION},
        },
        "required": [WRAPPER_KEY],
        "additionalProperties": False,
    }


def request_body(system: str, user: str, config: EndpointConfig, schema: Optional[dict] = None) -> dict:
    messages = []
    if system:
        messages.append({"role": "system", "content": system})
    messages.append({"role": "user", "content": user})
    body = {
        "model": config.model,
        "messages": messages,
        "temperature": config.temperature,
        "max_tokens": config.max_output_tokens,
    }
    if config.structured_output and schema is not None:
        body["response_format"] = {
            "type": "json_schema",
            "json_schema": {"name": WRAPPER_KEY, "schema": schema, "strict": True},
        }
    return body


def _backoff(attempt: int, config: EndpointConfig) -> float:
    delay = min(config.backoff_max_s, config.backoff_base_s * 2 ** (attempt - 1))
    return delay * random.uniform(0.5, 1.0)


def _complete(client: httpx.Client, url: str, sample_id: str, body: dict, config: EndpointConfig) -> RawPrediction:
    started = time.perf_counter()
    attempt = 0
    error = None
    while attempt <= config.max_retries:
        attempt += 1
        try:
            resp = client.post(url, json=body)
        except httpx.TransportError as e:
            error = f"transport error: {e.__class__.__name__}: {e}"
        else:
            if resp.status_code == 200:
                try:
                    content = resp.json()["choices"][0]["message"]["content"]
                except (ValueError, KeyError, IndexError, TypeError):
                    error = "malformed response body"
                    break
                elapsed = int((time.perf_counter() - started) * 1000)
                return RawPrediction(sample_id, content if content is not None else "", elapsed, attempt)
            error = f"HTTP {resp.status_code}"
            if resp.status_code not in RETRY_STATUS:
                break
        if attempt <= config.max_retries:
            time.sleep(_backoff(attempt, config))
    elapsed = int((time.perf_counter() - started) * 1000)
    return RawPrediction(sample_id, "", elapsed, attempt, error)


def run_batch(
    prompts: Sequence[tuple[str, str, str]],
    config: EndpointConfig,
    schema: Optional[dict] | Callable[[str], Optional[dict]] = None,
    sink=None,
    transport: Optional[httpx.BaseTransport] = None,
) -> list[RawPrediction]:
    """Send ``(sample_id, system, user)`` prompts and collect one result each.

    ``schema`` may be a single schema or a callable mapping sample id to a
    schema (useful when a batch mixes domains). Results are returned in input
    order; if ``sink`` is given (a path or text file) each result is appended
    as a JSON line as soon as it completes.
    """
    if not prompts:
        return []
    key = config.api_key()
    url = config.url
    schema_for = schema if callable(schema) else (lambda _id: schema)

    lock = threading.Lock()
    own_file = sink is not None and not hasattr(sink, "write")
    out = open(sink, "a", encoding="utf-8") if own_file else sink

    def emit(pred: RawPrediction) -> RawPrediction:
        if out is not None:
            with lock:
                out.write(json.dumps(pred.to_dict(), ensure_ascii=False) + "\n")
                out.flush()
        return pred

    headers = {"Authorization": f"Bearer {key}"}
    try:
        with httpx.Client(headers=headers, timeout=config.timeout_s, transport=transport) as client:
            with ThreadPoolExecutor(max_workers=config.max_concurrency) as pool:
                futures = [
                    pool.submit(
                        lambda sid=sid, body=request_body(system, user, config, schema_for(sid)):
                        emit(_complete(client, url, sid, body, config))
                    )
                    for sid, system, user in prompts
                ]
                return [f.result() for f in futures]
    finally:
        if own_file:
            out.close()


def read_predictions(path) -> dict[str, RawPrediction]:
    """Load a predictions file; when an id repeats, the last record wins."""
    preds = {}
    path = Path(path)
    if not path.exists():
        return preds
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                p = RawPrediction.from_dict(json.loads(line))
                preds[p.sample_id] = p
    return preds


def pending(prompts: Iterable[tuple[str, str, str]], done: dict[str, RawPrediction]) -> list:
    """Prompts whose sample id has no successful prediction yet."""
    return [p for p in prompts if p[0] not in done or done[p[0]].error is not None]
