"""Pipeline configuration: TOML file, command-line overrides, content hash."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .corpus import TokenizerConfig
from .errors import ConfigViolation
from .fingerprint import STRATEGIES

try:  # Python < 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

PATH_KEYS = ("corpus", "topics", "embeddings", "labels", "holdout")


@dataclass(frozen=True)
class BenchConfig:
    n_docs: int = 2000
    doc_length: int = 24
    queries: int = 8
    grid: tuple[int, ...] = (250, 500, 1000, 1500)
    etime_pool: int = 1_000_000
    etime_k: int = 1500
    repeats: int = 31


@dataclass(frozen=True)
class PipelineConfig:
    corpus: Path | None = None
    topics: Path | None = None
    embeddings: Path | None = None
    labels: Path | None = None
    holdout: Path | None = None
    workdir: Path | None = None
    f: int = 64
    n_top: int = 50
    theta: float = 0.3
    max_iters: int = 10
    neighbor_cap: int = 20
    strategy: str = "window"
    threads: int = 1
    seed: int = 0
    tokenizer: TokenizerConfig = TokenizerConfig()
    stopwords_file: str | None = None
    bench: BenchConfig = field(default_factory=BenchConfig)

    def __post_init__(self):
        if self.f not in (32, 64, 128):
            raise ConfigViolation(f"f must be 32, 64 or 128, got {self.f}")
        if self.n_top < 1:
            raise ConfigViolation(f"n_top must be >= 1, got {self.n_top}")
        if not 0.0 < self.theta < 1.0:
            raise ConfigViolation(f"theta must lie in (0, 1), got {self.theta}")
        if self.max_iters < 1 or self.neighbor_cap < 1:
            raise ConfigViolation("max_iters and neighbor_cap must be >= 1")
        if self.strategy not in STRATEGIES:
            raise ConfigViolation(f"unknown strategy {self.strategy!r}; one of {sorted(STRATEGIES)}")
        if self.threads < 1:
            raise ConfigViolation("threads must be >= 1")
        if any(n < 1 for n in self.bench.grid):
            raise ConfigViolation("bench grid values must be >= 1")

    def with_overrides(self, **kw) -> "PipelineConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        for k in PATH_KEYS + ("workdir",):
            if k in kw:
                kw[k] = Path(kw[k])
        return replace(self, **kw) if kw else self

    def require(self, *keys: str) -> None:
        """Check that the named input paths are set and exist."""
        for k in keys:
            p = getattr(self, k)
            if p is None:
                raise ConfigViolation(f"config sets no {k!r} path")
            if not Path(p).exists():
                raise ConfigViolation(f"{k} path does not exist: {p}")

    def parameters(self) -> dict:
        """Everything that shapes the outputs; input locations and workdir excluded."""
        return {
            "f": self.f,
            "n_top": self.n_top,
            "theta": self.theta,
            "max_iters": self.max_iters,
            "neighbor_cap": self.neighbor_cap,
            "strategy": self.strategy,
            "seed": self.seed,
            "tokenizer": {"lowercase": self.tokenizer.lowercase,
                          "stopwords": sorted(self.tokenizer.stopwords)},
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.parameters(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]

    def effective(self) -> dict:
        out = self.parameters()
        out["tokenizer"] = {"lowercase": self.tokenizer.lowercase,
                            "stopwords": self.stopwords_file}
        for k in PATH_KEYS + ("workdir",):
            p = getattr(self, k)
            out[k] = None if p is None else str(p)
        out["threads"] = self.threads
        out["bench"] = asdict(self.bench)
        out["bench"]["grid"] = list(self.bench.grid)
        out["config_hash"] = self.config_hash()
        return out


def load_config(path: str | Path | None) -> PipelineConfig:
    """Read a TOML config; relative paths resolve against the file's directory."""
    if path is None:
        return PipelineConfig()
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigViolation(f"config file not found: {path}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigViolation(f"{path}: {e}") from e
    return config_from_mapping(data, base=path.parent)


def config_from_mapping(data: dict, base: Path | None = None) -> PipelineConfig:
    data = dict(data)
    base = base or Path(".")
    paths = dict(data.pop("paths", {}))
    kw: dict = {}
    for k in PATH_KEYS + ("workdir",):
        v = paths.pop(k, None)
        if v is not None:
            p = Path(v)
            kw[k] = p if p.is_absolute() else base / p
    if paths:
        raise ConfigViolation(f"unknown [paths] keys: {sorted(paths)}")

    tok = data.pop("tokenizer", {})
    kw["tokenizer"] = TokenizerConfig.from_mapping(tok, base=base)
    kw["stopwords_file"] = tok.get("stopwords")

    bench = dict(data.pop("bench", {}))
    if "grid" in bench:
        bench["grid"] = tuple(int(n) for n in bench["grid"])
    try:
        kw["bench"] = BenchConfig(**bench)
    except TypeError as e:
        raise ConfigViolation(f"[bench]: {e}") from e

    known = {"f", "n_top", "theta", "max_iters", "neighbor_cap", "strategy", "threads", "seed"}
    extra = set(data) - known
    if extra:
        raise ConfigViolation(f"unknown config keys: {sorted(extra)}")
    kw.update(data)
    return PipelineConfig(**kw)


def dump_toml(cfg: PipelineConfig, relative_to: Path | None = None) -> str:
    """A TOML rendering of ``cfg`` that ``load_config`` reads back."""

    def q(p: Path) -> str:
        if relative_to is not None:
            try:
                p = Path(p).relative_to(relative_to)
            except ValueError:
                pass
        return json.dumps(Path(p).as_posix())

    lines = []
    for k in ("f", "n_top", "theta", "max_iters", "neighbor_cap", "threads", "seed"):
        lines.append(f"{k} = {getattr(cfg, k)!r}")
    lines.append(f"strategy = {json.dumps(cfg.strategy)}")
    lines += ["", "[paths]"]
    for k in PATH_KEYS + ("workdir",):
        p = getattr(cfg, k)
        if p is not None:
            lines.append(f"{k} = {q(p)}")
    lines += ["", "[tokenizer]", f"lowercase = {str(cfg.tokenizer.lowercase).lower()}"]
    if cfg.stopwords_file:
        lines.append(f"stopwords = {json.dumps(cfg.stopwords_file)}")
    b = cfg.bench
    lines += ["", "[bench]"]
    for k, v in asdict(b).items():
        lines.append(f"{k} = {list(v) if k == 'grid' else v!r}")
    return "\n".join(lines) + "\n"
