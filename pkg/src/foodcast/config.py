"""Run configuration: ``key = value`` files overridable by command flags."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .dataset import DEFAULT_ELEMENT_MAP, DEFAULT_ITEMS, TARGET_SERIES
from .membership import MFKind


def sample_data_path() -> Path:
    """Path of the bundled synthetic FAOSTAT-format CSV."""
    return Path(str(resources.files("foodcast") / "data" / "sample_faostat.csv"))


def demo_config_path() -> Path:
    """Path of the bundled example run configuration."""
    return Path(str(resources.files("foodcast") / "data" / "demo.conf"))


def _csv_list(text: str) -> list:
    return [t.strip() for t in text.split(",") if t.strip()]


@dataclass
class RunConfig:
    data: str = ""
    area: Optional[str] = None
    gap_policy: str = "error"
    feature_mode: str = "autoregressive"
    lags: int = 5
    targets: list = field(default_factory=lambda: list(TARGET_SERIES))
    split_ratio: float = 0.7
    seed: int = 0
    model: str = "anfis"
    neurons: int = 10
    mf_kind: str = "gbell"
    mfs_per_input: int = 2
    epochs: Optional[int] = None
    learning_rate: Optional[float] = None
    init_scale: float = 1.0
    horizon: int = 13
    out: str = "out"
    jobs: int = 1
    neuron_grid: list = field(default_factory=lambda: [10, 14, 18])
    mf_grid: list = field(default_factory=lambda: ["triangular", "trapezoidal", "gbell"])
    # element -> series names; series -> allowed items
    element_map: dict = field(default_factory=lambda: {k: list(v) for k, v in DEFAULT_ELEMENT_MAP.items()})
    items: dict = field(default_factory=lambda: {k: list(v) for k, v in DEFAULT_ITEMS.items()})

    @property
    def data_path(self) -> Path:
        return Path(self.data) if self.data else sample_data_path()

    def validate(self) -> "RunConfig":
        problems = []
        if self.feature_mode not in ("exogenous", "autoregressive"):
            problems.append(f"feature_mode must be exogenous or autoregressive, got {self.feature_mode!r}")
        if self.gap_policy not in ("error", "interpolate"):
            problems.append(f"gap_policy must be error or interpolate, got {self.gap_policy!r}")
        if self.model not in ("anfis", "mlp"):
            problems.append(f"model must be anfis or mlp, got {self.model!r}")
        if self.lags < 1:
            problems.append(f"lags must be >= 1, got {self.lags}")
        if not 0 < self.split_ratio < 1:
            problems.append(f"split_ratio must be in (0, 1), got {self.split_ratio}")
        if self.seed < 0:
            problems.append(f"seed must be >= 0, got {self.seed}")
        if self.neurons < 1 or any(n < 1 for n in self.neuron_grid):
            problems.append("neuron counts must be >= 1")
        for kind in [self.mf_kind] + list(self.mf_grid):
            try:
                MFKind.parse(kind)
            except ValueError as exc:
                problems.append(str(exc))
        if self.mfs_per_input < 1:
            problems.append(f"mfs_per_input must be >= 1, got {self.mfs_per_input}")
        if self.epochs is not None and self.epochs < 1:
            problems.append(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate is not None and not self.learning_rate > 0:
            problems.append(f"learning_rate must be > 0, got {self.learning_rate}")
        if not self.init_scale > 0:
            problems.append(f"init_scale must be > 0, got {self.init_scale}")
        if self.horizon < 1:
            problems.append(f"horizon must be >= 1, got {self.horizon}")
        if self.jobs < 1:
            problems.append(f"jobs must be >= 1, got {self.jobs}")
        unknown = [t for t in self.targets if t not in TARGET_SERIES]
        if unknown or not self.targets:
            problems.append(f"targets must be a non-empty subset of {list(TARGET_SERIES)}, got {self.targets}")
        if not self.data_path.is_file():
            problems.append(f"data file not found: {self.data_path}")
        if problems:
            raise ValueError("invalid configuration:\n  " + "\n  ".join(problems))
        return self

    def update(self, key: str, value) -> None:
        """Set one key from a config-file or command-line string value."""
        key = key.strip().replace("-", "_")
        if key.startswith("element."):
            element = key[len("element."):]
            self.element_map[element] = _csv_list(value)
            return
        if key.startswith("items."):
            self.items[key[len("items."):]] = [t.strip() for t in value.split(";") if t.strip()]
            return
        fields = {f.name: f for f in dataclasses.fields(self)}
        if key not in fields or key in ("element_map", "items"):
            raise KeyError(f"unknown configuration key {key!r}")
        setattr(self, key, _coerce(key, value, getattr(RunConfig(), key)))


def _coerce(key, value, default):
    if not isinstance(value, str):
        return value
    text = value.strip()
    if key in ("epochs",):
        return None if text.lower() in ("", "none", "default") else int(text)
    if key in ("learning_rate",):
        return None if text.lower() in ("", "none", "default") else float(text)
    if key == "area":
        return text or None
    if key == "neuron_grid":
        return [int(t) for t in _csv_list(text)]
    if isinstance(default, list):
        return _csv_list(text)
    if isinstance(default, bool):
        return text.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(text)
    if isinstance(default, float):
        return float(text)
    return text


def parse_config_text(text: str, config: Optional[RunConfig] = None, source: str = "<config>") -> RunConfig:
    config = config or RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = line.split("=", 1)
        try:
            config.update(key, value)
        except (KeyError, ValueError) as exc:
            raise ValueError(f"{source}:{lineno}: {exc}") from None
    return config


def load_config(path, config: Optional[RunConfig] = None) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        cfg = parse_config_text(fh.read(), config, str(path))
    # relative data paths resolve against the config file's directory
    if cfg.data and not Path(cfg.data).is_absolute():
        candidate = Path(path).parent / cfg.data
        if candidate.exists():
            cfg.data = str(candidate)
    return cfg
