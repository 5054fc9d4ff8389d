"""Service configuration: JSON key-value file with field-level validation.

Startup fails with every problem listed at once (field path + reason), never
just the first. Credentials are environment-variable names, not values; a
named variable that is unset at startup is a config error naming it.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ideagate.errors import ConfigError
from ideagate.workflow.engine import EngineConfig

PROVIDER_TYPES = ("http", "scripted", "static")
EMBEDDING_TYPES = ("hash", "http")


@dataclass
class ProviderSpec:
    provider_id: str
    type: str = "scripted"
    endpoint: str | None = None
    api_key_env: str | None = None
    timeout_s: float = 60.0
    max_concurrency: int = 1
    response: str = "No"  # static type only
    fixtures_path: str | None = None  # scripted type: preloaded fixtures


@dataclass
class PersonaSpec:
    provider_id: str
    model_name: str
    temperature: float
    max_output_tokens: int = 1024


@dataclass
class EmbeddingSpec:
    type: str = "hash"
    dimension: int = 64
    model_id: str | None = None
    endpoint: str | None = None
    api_key_env: str | None = None
    timeout_s: float = 30.0


@dataclass
class ServiceConfig:
    corpus_path: str | None = None
    store_dir: str = "sessions"
    host: str = "127.0.0.1"
    port: int = 8040
    auth_token_env: str | None = None
    ui_dir: str | None = None
    engine: EngineConfig = field(default_factory=EngineConfig)
    embedding: EmbeddingSpec = field(default_factory=EmbeddingSpec)
    personas: dict[str, PersonaSpec] = field(default_factory=dict)
    providers: dict[str, ProviderSpec] = field(default_factory=dict)

    @classmethod
    def default(cls) -> "ServiceConfig":
        """Scripted-provider defaults: runs offline, fails loudly on any
        call without a fixture."""
        cfg = cls()
        cfg.providers["scripted"] = ProviderSpec(provider_id="scripted", type="scripted")
        cfg.personas["colleague"] = PersonaSpec(
            provider_id="scripted", model_name="colleague-tier", temperature=0.0
        )
        cfg.personas["mentor"] = PersonaSpec(
            provider_id="scripted", model_name="mentor-tier", temperature=0.2
        )
        return cfg

    @classmethod
    def load(cls, path: str | Path | None) -> "ServiceConfig":
        if path is None:
            cfg = cls.default()
            cfg.validate()
            return cfg
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError([f"config file {path} does not exist"]) from None
        except json.JSONDecodeError as exc:
            raise ConfigError([f"config file {path}: invalid JSON ({exc.msg})"]) from None
        cfg = cls.from_dict(data)
        cfg.validate()
        return cfg

    @classmethod
    def from_dict(cls, data: dict) -> "ServiceConfig":
        problems: list[str] = []
        if not isinstance(data, dict):
            raise ConfigError(["config root must be an object"])
        cfg = cls()
        cfg.corpus_path = data.get("corpus_path")
        cfg.store_dir = data.get("store_dir", cfg.store_dir)
        cfg.host = data.get("host", cfg.host)
        cfg.port = int(data.get("port", cfg.port))
        cfg.auth_token_env = data.get("auth_token_env")
        cfg.ui_dir = data.get("ui_dir")

        eng = data.get("engine", data.get("defaults", {}))
        try:
            cfg.engine = EngineConfig(
                k_papers=int(eng.get("k_papers", 50)),
                k_per_problem=int(eng.get("k_per_problem", 10)),
                k_small=int(eng.get("k_small", 5)),
                max_tokens=int(eng.get("max_tokens", 512)),
                loop_cap=int(eng.get("loop_cap", 5)),
                n_methods=int(eng.get("n_methods", 3)),
                call_budget=int(eng.get("call_budget", 3)),
            )
        except (TypeError, ValueError) as exc:
            problems.append(f"engine: {exc}")

        emb = data.get("embedding", {})
        cfg.embedding = EmbeddingSpec(
            type=emb.get("type", "hash"),
            dimension=int(emb.get("dimension", 64)),
            model_id=emb.get("model_id"),
            endpoint=emb.get("endpoint"),
            api_key_env=emb.get("api_key_env"),
            timeout_s=float(emb.get("timeout_s", 30.0)),
        )

        for pid, p in (data.get("providers") or {}).items():
            cfg.providers[pid] = ProviderSpec(
                provider_id=pid,
                type=p.get("type", "scripted"),
                endpoint=p.get("endpoint"),
                api_key_env=p.get("api_key_env"),
                timeout_s=float(p.get("timeout_s", 60.0)),
                max_concurrency=int(p.get("max_concurrency", 1)),
                response=p.get("response", "No"),
                fixtures_path=p.get("fixtures_path"),
            )
        for persona, p in (data.get("personas") or {}).items():
            cfg.personas[persona] = PersonaSpec(
                provider_id=p.get("provider_id", "scripted"),
                model_name=p.get("model_name", f"{persona}-tier"),
                temperature=float(p.get("temperature", 0.0 if persona == "colleague" else 0.2)),
                max_output_tokens=int(p.get("max_output_tokens", 1024)),
            )
        if not cfg.providers and not cfg.personas:
            base = cls.default()
            cfg.providers = base.providers
            cfg.personas = base.personas
        if problems:
            raise ConfigError(problems)
        return cfg

    def validate(self) -> None:
        problems: list[str] = []
        eng = self.engine
        for name in ("k_papers", "k_per_problem", "k_small", "max_tokens", "loop_cap", "n_methods", "call_budget"):
            if getattr(eng, name) < 1:
                problems.append(f"engine.{name}: must be >= 1")
        if self.embedding.type not in EMBEDDING_TYPES:
            problems.append(f"embedding.type: {self.embedding.type!r} not in {EMBEDDING_TYPES}")
        if self.embedding.dimension < 2:
            problems.append("embedding.dimension: must be >= 2")
        if self.embedding.type == "http":
            if not self.embedding.endpoint:
                problems.append("embedding.endpoint: required for http embedding")
            if self.embedding.api_key_env and not os.environ.get(self.embedding.api_key_env):
                problems.append(
                    f"embedding.api_key_env: environment variable "
                    f"{self.embedding.api_key_env!r} is not set"
                )
        for persona in ("colleague", "mentor"):
            spec = self.personas.get(persona)
            if spec is None:
                problems.append(f"personas.{persona}: missing (both personas must be configured)")
                continue
            if spec.provider_id not in self.providers:
                problems.append(
                    f"personas.{persona}.provider_id: unknown provider {spec.provider_id!r}"
                )
            if spec.temperature < 0:
                problems.append(f"personas.{persona}.temperature: must be >= 0")
        for pid, spec in self.providers.items():
            if spec.type not in PROVIDER_TYPES:
                problems.append(f"providers.{pid}.type: {spec.type!r} not in {PROVIDER_TYPES}")
            if spec.type == "http":
                if not spec.endpoint:
                    problems.append(f"providers.{pid}.endpoint: required for http provider")
                if spec.api_key_env and not os.environ.get(spec.api_key_env):
                    problems.append(
                        f"providers.{pid}.api_key_env: environment variable "
                        f"{spec.api_key_env!r} is not set"
                    )
            if spec.max_concurrency < 1:
                problems.append(f"providers.{pid}.max_concurrency: must be >= 1")
            if spec.fixtures_path and not Path(spec.fixtures_path).exists():
                problems.append(f"providers.{pid}.fixtures_path: {spec.fixtures_path} does not exist")
        if self.auth_token_env and not os.environ.get(self.auth_token_env):
            problems.append(
                f"auth_token_env: environment variable {self.auth_token_env!r} is not set"
            )
        if self.corpus_path is not None and not Path(self.corpus_path).exists():
            problems.append(f"corpus_path: {self.corpus_path} does not exist")
        if self.ui_dir is not None and not Path(self.ui_dir).is_dir():
            problems.append(f"ui_dir: {self.ui_dir} is not a directory")
        if problems:
            raise ConfigError(problems)
