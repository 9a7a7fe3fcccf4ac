"""Dataclass configuration with a JSON config file and env-var overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .llm_gateway import Backoff, GatewayConfig

_DATA_DIR = Path(__file__).parent / "data"


def packaged_kb_path() -> Path:
    """The prebuilt fixture KB shipped with the package."""
    return _DATA_DIR / "ada_2025_fixture.kb.json"


def packaged_markup_path() -> Path:
    return _DATA_DIR / "ada_2025_fixture.md"


@dataclass
class RetrievalConfig:
    max_bundle_size: int = 12
    per_tier_cap: int | None = None
    prefilter: str = "none"  # "none" | "lexical"


@dataclass
class GenerationSettings:
    temperature: float = 0.1
    max_related_questions: int = 3
    prompt_template_id: str = "generation-v1"


@dataclass
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    cors_origins: list[str] = field(default_factory=lambda: ["*"])


@dataclass
class AppConfig:
    kb_path: str = ""
    risk_table_path: str = ""
    answer_backend: str = "extractive"  # "extractive" | "llm"
    router_backend: str = "keyword"  # "keyword" | "llm"
    gateway_base_url: str = "https://openrouter.ai/api/v1"
    gateway_model: str = "gpt-4o"
    gateway_timeout_ms: int = 30_000
    gateway_max_retries: int = 2
    gateway_backoff_initial_ms: int = 250
    gateway_backoff_multiplier: float = 2.0
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    generation: GenerationSettings = field(default_factory=GenerationSettings)
    server: ServerConfig = field(default_factory=ServerConfig)

    def resolved_kb_path(self) -> Path:
        return Path(self.kb_path) if self.kb_path else packaged_kb_path()

    def resolved_risk_table_path(self) -> Path:
        from .risk import default_table_path

        return Path(self.risk_table_path) if self.risk_table_path else default_table_path()

    def gateway_config(self) -> GatewayConfig:
        return GatewayConfig.from_env(
            base_url=self.gateway_base_url,
            timeout_ms=self.gateway_timeout_ms,
            max_retries=self.gateway_max_retries,
            backoff=Backoff(
                initial_ms=self.gateway_backoff_initial_ms,
                multiplier=self.gateway_backoff_multiplier,
            ),
        )


def load_config(path: str | Path | None = None) -> AppConfig:
    """Defaults, overlaid with the JSON config document, then env vars."""
    cfg = AppConfig()
    if path is not None:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        cfg.kb_path = doc.get("kb_path", cfg.kb_path)
        cfg.risk_table_path = doc.get("risk", {}).get("table_path", cfg.risk_table_path)
        cfg.answer_backend = doc.get("answer_backend", cfg.answer_backend)
        cfg.router_backend = doc.get("router_backend", cfg.router_backend)
        gw = doc.get("gateway", {})
        cfg.gateway_base_url = gw.get("base_url", cfg.gateway_base_url)
        cfg.gateway_model = gw.get("model", cfg.gateway_model)
        cfg.gateway_timeout_ms = gw.get("timeout_ms", cfg.gateway_timeout_ms)
        cfg.gateway_max_retries = gw.get("max_retries", cfg.gateway_max_retries)
        cfg.gateway_backoff_initial_ms = gw.get("backoff_initial_ms", cfg.gateway_backoff_initial_ms)
        cfg.gateway_backoff_multiplier = gw.get("backoff_multiplier", cfg.gateway_backoff_multiplier)
        rt = doc.get("retrieval", {})
        cfg.retrieval = RetrievalConfig(
            max_bundle_size=rt.get("max_bundle_size", cfg.retrieval.max_bundle_size),
            per_tier_cap=rt.get("per_tier_cap", cfg.retrieval.per_tier_cap),
            prefilter=rt.get("prefilter", cfg.retrieval.prefilter),
        )
        gen = doc.get("generation", {})
        cfg.generation = GenerationSettings(
            temperature=gen.get("temperature", cfg.generation.temperature),
            max_related_questions=gen.get("max_related_questions", cfg.generation.max_related_questions),
            prompt_template_id=gen.get("prompt_template_id", cfg.generation.prompt_template_id),
        )
        srv = doc.get("server", {})
        cfg.server = ServerConfig(
            host=srv.get("host", cfg.server.host),
            port=srv.get("port", cfg.server.port),
            cors_origins=list(srv.get("cors_origins", cfg.server.cors_origins)),
        )

    cfg.kb_path = os.environ.get("GQA_KB_PATH", cfg.kb_path)
    cfg.risk_table_path = os.environ.get("GQA_RISK_TABLE_PATH", cfg.risk_table_path)
    cfg.gateway_base_url = os.environ.get("GATEWAY_BASE_URL", cfg.gateway_base_url)
    cfg.gateway_model = os.environ.get("GATEWAY_MODEL", cfg.gateway_model)
    if "GQA_PORT" in os.environ:
        cfg.server.port = int(os.environ["GQA_PORT"])
    return cfg
