"""Pipeline configuration: one JSON document, overridable from the command line."""
from dataclasses import asdict, dataclass, field, fields, replace
import json
import math

from .errors import ConfigError
from .features import MfccSettings


@dataclass(frozen=True)
class SmoteConfig:
    k_neighbors: int = 5
    replicates: int = 100
    base_seed: int = 0


@dataclass(frozen=True)
class SweepConfig:
    grid_size: int = 200
    holdout_reference: bool = False


@dataclass(frozen=True)
class C45Config:
    min_leaf: int = 2
    prune_cf: float = 0.25


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    mtry: int = 5


@dataclass(frozen=True)
class MlpConfig:
    hidden: int = 11
    lr: float = 0.3
    momentum: float = 0.2
    epochs: int = 500
    cross_entropy: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    repeats: int = 100
    base_seed: int = 0
    smote_inside_folds: bool = False


@dataclass(frozen=True)
class PipelineConfig:
    mfcc: MfccSettings = field(default_factory=MfccSettings)
    smote: SmoteConfig = field(default_factory=SmoteConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    c45: C45Config = field(default_factory=C45Config)
    rf: ForestConfig = field(default_factory=ForestConfig)
    mlp: MlpConfig = field(default_factory=MlpConfig)
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)

    def __post_init__(self):
        validate(self)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d):
        sections = {}
        for f in fields(cls):
            section_type = f.default_factory
            raw = d.get(f.name, {})
            if not isinstance(raw, dict):
                raise ConfigError(f"section {f.name!r} must be an object")
            known = {g.name for g in fields(section_type)}
            unknown = set(raw) - known
            if unknown:
                raise ConfigError(f"unknown keys in [{f.name}]: {', '.join(sorted(unknown))}")
            sections[f.name] = section_type(**raw)
        extra = set(d) - set(sections)
        if extra:
            raise ConfigError(f"unknown config sections: {', '.join(sorted(extra))}")
        return cls(**sections)

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json())

    def override(self, key, value):
        """Return a copy with ``section.key`` set; ``value`` is parsed as JSON when possible."""
        section, _, name = key.partition(".")
        if not name or not hasattr(self, section):
            raise ConfigError(f"override key must look like section.name, got {key!r}")
        current = getattr(self, section)
        if name not in {f.name for f in fields(current)}:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(value, str):
            try:
                value = json.loads(value)
            except json.JSONDecodeError:
                pass
        return replace(self, **{section: replace(current, **{name: value})})


_POSITIVE_INTS = {
    "mfcc": ("frame_len", "hop", "fft_size", "n_filters", "n_coeffs"),
    "smote": ("k_neighbors", "replicates"),
    "sweep": ("grid_size",),
    "c45": ("min_leaf",),
    "rf": ("n_trees", "mtry"),
    "mlp": ("hidden", "epochs"),
    "experiment": ("repeats",),
}
_SEEDS = (("smote", "base_seed"), ("experiment", "base_seed"))


def validate(cfg):
    for section, names in _POSITIVE_INTS.items():
        sec = getattr(cfg, section)
        for name in names:
            v = getattr(sec, name)
            if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
                raise ConfigError(f"{section}.{name} must be a positive integer, got {v!r}")
    for section, name in _SEEDS:
        v = getattr(getattr(cfg, section), name)
        if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < 2 ** 63:
            raise ConfigError(f"{section}.{name} must be a non-negative 64-bit integer, got {v!r}")
    for section in _POSITIVE_INTS:
        sec = getattr(cfg, section)
        for f in fields(sec):
            v = getattr(sec, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ConfigError(f"{section}.{f.name} must be finite, got {v!r}")
    if cfg.mfcc.hop > cfg.mfcc.frame_len:
        raise ConfigError("mfcc.hop must not exceed mfcc.frame_len")
    if cfg.mfcc.fft_size < cfg.mfcc.frame_len:
        raise ConfigError("mfcc.fft_size must be at least mfcc.frame_len")
    if cfg.mfcc.n_coeffs != 20:
        raise ConfigError("mfcc.n_coeffs must be 20: fingerprints carry C01..C20")
    if not 0.0 < cfg.c45.prune_cf < 1.0:
        raise ConfigError("c45.prune_cf must lie in (0, 1)")
    if cfg.mlp.lr <= 0:
        raise ConfigError("mlp.lr must be positive")


DESCRIPTIONS = {
    "mfcc.frame_len": "Samples per analysis frame (1024 is about 23 ms at 44.1 kHz).",
    "mfcc.hop": "Samples between frame starts.",
    "mfcc.fft_size": "DFT length; frames are zero-padded to it. Power of two.",
    "mfcc.n_filters": "Triangular mel filters.",
    "mfcc.n_coeffs": "Cepstral coefficients kept per frame (fixed at 20).",
    "mfcc.pre_emphasis": "First-order pre-emphasis coefficient.",
    "mfcc.f_min": "Lower filterbank edge in Hz.",
    "mfcc.f_max": "Upper filterbank edge in Hz; null means Nyquist.",
    "mfcc.include_energy": "Keep DCT index 0 (overall energy) instead of dropping it.",
    "smote.k_neighbors": "Nearest minority neighbours SMOTE interpolates towards.",
    "smote.replicates": "Extended datasets generated by the smote command.",
    "smote.base_seed": "Replicate r uses seed base_seed + r.",
    "sweep.grid_size": "Thresholds from 0 to 1.1 x the largest observed distance.",
    "sweep.holdout_reference": "Score each MGB song against a reference built without it.",
    "c45.min_leaf": "Minimum training examples per branch.",
    "c45.prune_cf": "Confidence factor of error-based pruning.",
    "rf.n_trees": "Trees in the forest.",
    "rf.mtry": "Attributes drawn at every node (floor(log2(20) + 1) = 5).",
    "mlp.hidden": "Hidden sigmoid units.",
    "mlp.lr": "Learning rate.",
    "mlp.momentum": "Momentum term.",
    "mlp.epochs": "Passes over the training set.",
    "mlp.cross_entropy": "Use cross-entropy instead of squared error.",
    "experiment.repeats": "LOOCV repetitions (deterministic learners on simple data run once).",
    "experiment.base_seed": "Repeat r uses seed base_seed + r.",
    "experiment.smote_inside_folds": "Rebalance each fold's training split instead of SMOTE-then-LOOCV.",
}


def config_reference():
    """Markdown table of every key, its default and meaning."""
    default = PipelineConfig().to_dict()
    lines = ["# Configuration reference", "",
             "Configuration is a JSON object with one section per stage. Any key can be",
             "overridden on the command line with `--set section.key=value`.", "",
             "| key | default | meaning |", "|---|---|---|"]
    for section, values in default.items():
        for name, value in values.items():
            key = f"{section}.{name}"
            lines.append(f"| `{key}` | `{json.dumps(value)}` | {DESCRIPTIONS.get(key, '')} |")
    return "\n".join(lines) + "\n"
