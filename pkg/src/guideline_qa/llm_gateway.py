"""Chat-completion gateway shared by routing and generation.

One abstraction over any chat-completion-compatible HTTP provider, with
timeouts, bounded retries, and a scriptable in-memory mock for offline tests.
The API key comes from the environment and never appears in logs or errors.
"""

from __future__ import annotations

import hashlib
import logging
import os
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Protocol, Sequence

import requests

logger = logging.getLogger(__name__)

API_KEY_ENV = "GATEWAY_API_KEY"

# HTTP statuses worth retrying; everything else 4xx fails fast.
_RETRIABLE_STATUSES = {429, 500, 502, 503, 504}


class FinishReason(Enum):
    STOP = "stop"
    LENGTH = "length"
    ERROR = "error"


class ErrorKind(Enum):
    TIMEOUT = "timeout"
    TRANSPORT = "transport"
    PROVIDER = "provider"
    AUTH = "auth"


@dataclass(frozen=True)
class ChatRequest:
    model_name: str
    system_text: str
    user_text: str
    temperature: float = 0.1
    max_output_tokens: int = 1024
    request_id: str = ""


@dataclass(frozen=True)
class ChatReply:
    text: str
    finish_reason: FinishReason
    latency_ms: int


@dataclass(frozen=True)
class Backoff:
    initial_ms: int = 250
    multiplier: float = 2.0


@dataclass
class GatewayConfig:
    base_url: str = "https://openrouter.ai/api/v1"
    api_key: str = field(default="", repr=False)
    timeout_ms: int = 30_000
    max_retries: int = 2
    backoff: Backoff = field(default_factory=Backoff)

    @classmethod
    def from_env(cls, **overrides) -> "GatewayConfig":
        cfg = cls(**overrides)
        if not cfg.api_key:
            cfg.api_key = os.environ.get(API_KEY_ENV, "")
        return cfg


class GatewayError(Exception):
    def __init__(self, kind: ErrorKind, message: str, request_id: str = "", status: int | None = None):
        self.kind = kind
        self.request_id = request_id
        self.status = status
        super().__init__(f"[{request_id}] {kind.value}: {message}")


class LlmGateway(Protocol):
    def chat(self, req: ChatRequest) -> ChatReply: ...


class HttpGateway:
    """Provider-agnostic chat-completion client over the common wire shape."""

    def __init__(self, config: GatewayConfig):
        self.config = config
        self._session = requests.Session()

    def chat(self, req: ChatRequest) -> ChatReply:
        cfg = self.config
        url = cfg.base_url.rstrip("/") + "/chat/completions"
        payload = {
            "model": req.model_name,
            "messages": [
                {"role": "system", "content": req.system_text},
                {"role": "user", "content": req.user_text},
            ],
            "temperature": req.temperature,
            "max_tokens": req.max_output_tokens,
        }
        headers = {"Authorization": f"Bearer {cfg.api_key}", "Content-Type": "application/json"}
        timeout_s = cfg.timeout_ms / 1000.0

        started = time.monotonic()
        last_error: GatewayError | None = None
        for attempt in range(cfg.max_retries + 1):
            if attempt:
                delay_s = cfg.backoff.initial_ms * (cfg.backoff.multiplier ** (attempt - 1)) / 1000.0
                time.sleep(delay_s)
            try:
                resp = self._session.post(url, json=payload, headers=headers, timeout=timeout_s)
            except requests.Timeout:
                last_error = GatewayError(ErrorKind.TIMEOUT, "request timed out", req.request_id)
                logger.warning("gateway timeout (attempt %d, request %s)", attempt + 1, req.request_id)
                continue
            except requests.RequestException as exc:
                last_error = GatewayError(ErrorKind.TRANSPORT, type(exc).__name__, req.request_id)
                logger.warning("gateway transport error (attempt %d, request %s)", attempt + 1, req.request_id)
                continue

            if resp.status_code in (401, 403):
                raise GatewayError(ErrorKind.AUTH, "authentication rejected", req.request_id, resp.status_code)
            if resp.status_code in _RETRIABLE_STATUSES:
                last_error = GatewayError(
                    ErrorKind.PROVIDER, f"HTTP {resp.status_code}", req.request_id, resp.status_code
                )
                logger.warning(
                    "gateway HTTP %d (attempt %d, request %s)", resp.status_code, attempt + 1, req.request_id
                )
                continue
            if resp.status_code != 200:
                raise GatewayError(
                    ErrorKind.PROVIDER, f"HTTP {resp.status_code}", req.request_id, resp.status_code
                )

            latency_ms = int((time.monotonic() - started) * 1000)
            try:
                body = resp.json()
                choice = body["choices"][0]
                text = choice["message"]["content"]
                finish = str(choice.get("finish_reason", "stop"))
            except (ValueError, KeyError, IndexError, TypeError):
                raise GatewayError(ErrorKind.PROVIDER, "malformed provider reply", req.request_id, 200)
            reason = {"stop": FinishReason.STOP, "length": FinishReason.LENGTH}.get(finish, FinishReason.ERROR)
            return ChatReply(text=text, finish_reason=reason, latency_ms=latency_ms)

        assert last_error is not None
        raise last_error


class ScriptMiss(Exception):
    def __init__(self, prompt_digest: str):
        self.prompt_digest = prompt_digest
        super().__init__(f"no scripted reply for prompt digest {prompt_digest}")


#: A script entry reply may be literal text, a prebuilt ChatReply, an
#: exception instance to raise, or a callable of the request.
ScriptReply = "str | ChatReply | Exception | Callable[[ChatRequest], str]"


class MockGateway:
    """Deterministic scripted gateway; unmatched prompts fail loudly.

    The script is an ordered sequence of (matcher, reply) pairs; a matcher is
    a substring of the user text or a callable of the request. First match
    wins.
    """

    def __init__(self, script: Sequence[tuple] | dict):
        if isinstance(script, dict):
            script = list(script.items())
        self._script = list(script)
        self.calls: list[ChatRequest] = []

    def chat(self, req: ChatRequest) -> ChatReply:
        self.calls.append(req)
        for matcher, reply in self._script:
            if callable(matcher):
                matched = matcher(req)
            else:
                matched = matcher in req.user_text
            if not matched:
                continue
            if isinstance(reply, Exception):
                raise reply
            if callable(reply):
                reply = reply(req)
            if isinstance(reply, ChatReply):
                return reply
            return ChatReply(text=str(reply), finish_reason=FinishReason.STOP, latency_ms=0)
        digest = hashlib.sha256(req.user_text.encode("utf-8")).hexdigest()[:12]
        raise ScriptMiss(digest)


def mock_gateway(script: Sequence[tuple] | dict) -> MockGateway:
    return MockGateway(script)
