"""Run configuration: JSON file merged with command-line overrides.

The only environment variable read anywhere is the auth-token override used
by the remote backend; every other knob lives in the config file or a flag.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .backends import NativeBackend, RemoteBackend, ScriptedBackend
from .backends.baseline import BASELINE_FINGERPRINT, BaselineModel
from .backends.heads import feature_fingerprint, load_head
from .errors import ConfigError
from .miner import (
    BaselineClassifier,
    PromptHeadClassifier,
    SP_FEATURE_NAMES,
)
from .prompts import CLOZE_MAX_SEQUENCE, PAIR_MAX_SEQUENCE, TokenBudget

MODES = ("prompt_head", "baseline")
BACKENDS = ("remote", "scripted", "native")

SP_FINGERPRINT = feature_fingerprint(SP_FEATURE_NAMES)


@dataclass
class RunConfig:
    corpus_dir: str = "corpus"
    output_dir: str = "out"
    mode: str = "prompt_head"
    backend: str = "native"
    backend_url: str | None = None
    auth_token: str | None = None
    script_path: str | None = None
    head_path: str | None = None
    baseline_path: str | None = None
    pair_baseline_path: str | None = None
    annotations_path: str | None = None
    lexicon_path: str | None = None
    cloze_max_sequence: int = CLOZE_MAX_SEQUENCE
    pair_max_sequence: int = PAIR_MAX_SEQUENCE
    token_counter: str = "whitespace"
    seed: int = 0
    workers: int | None = None
    encoding: str = "ascii"
    bot_authors: list[str] = field(default_factory=lambda: ["bot"])

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.backend == "remote" and not self.backend_url:
            raise ConfigError("backend_url is required when backend is 'remote'")
        if self.backend == "scripted" and not self.script_path:
            raise ConfigError("script_path is required when backend is 'scripted'")
        if self.cloze_max_sequence < 1 or self.pair_max_sequence < 1:
            raise ConfigError("max_sequence values must be positive")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if not isinstance(self.bot_authors, list):
            raise ConfigError("bot_authors must be a list of author substrings")
        return self

    def cloze_budget(self) -> TokenBudget:
        return TokenBudget(self.cloze_max_sequence, self.token_counter)

    def pair_budget(self) -> TokenBudget:
        return TokenBudget(self.pair_max_sequence, self.token_counter)


def load_config(path: str | Path | None = None,
                overrides: dict | None = None) -> RunConfig:
    """Build a validated RunConfig from an optional JSON file plus overrides.

    Unknown keys anywhere are configuration errors, not silent no-ops.
    """
    known = {f.name for f in fields(RunConfig)}
    values: dict = {}
    if path is not None:
        file = Path(path)
        if not file.exists():
            raise ConfigError(f"config file not found: {file}")
        try:
            loaded = json.loads(file.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        values.update(loaded)
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return RunConfig(**values).validate()
    except TypeError as exc:
        raise ConfigError(f"bad config value: {exc}") from exc


def build_backend(cfg: RunConfig):
    if cfg.backend == "remote":
        return RemoteBackend(base_url=cfg.backend_url, auth_token=cfg.auth_token)
    if cfg.backend == "scripted":
        return ScriptedBackend.from_file(cfg.script_path)
    return NativeBackend()


def build_classifier(cfg: RunConfig, backend) -> PromptHeadClassifier | BaselineClassifier:
    """The design-sentence classifier implied by the configured mode."""
    if cfg.mode == "prompt_head":
        if not cfg.head_path:
            raise ConfigError("head_path is required in prompt_head mode")
        head = load_head(cfg.head_path, expected_fingerprint=SP_FINGERPRINT)
        return PromptHeadClassifier(backend=backend, head=head,
                                    budget=cfg.cloze_budget(), workers=cfg.workers)
    if not cfg.baseline_path:
        raise ConfigError("baseline_path is required in baseline mode")
    model = BaselineModel.load(cfg.baseline_path,
                               expected_fingerprint=BASELINE_FINGERPRINT)
    return BaselineClassifier(model=model)
