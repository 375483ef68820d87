"""JSON experiment configuration.

Every field has a default, so ``{"process": {"kind": "shift_superposition"}}``
(or even ``{}``) describes the main experiment: inputs ``|ell| <= 7``, the
``(L+5 + L-5)/sqrt(2)`` process, a 31-order calibration and 5% camera noise.
"""

import json
from dataclasses import asdict, dataclass, field, fields

from .optics import NoiseModel, SorterGeometry
from .process import LRange, ProcessSpec
from .stats import default_beta_grid


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class BetaGrid:
    min: float = 0.05
    max: float = 5.0
    step: float = 0.05

    def __post_init__(self):
        if not self.min > 0:
            raise ValueError(f"min must be positive, got {self.min}")
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if self.max < self.min:
            raise ValueError(f"max {self.max} is below min {self.min}")

    def values(self):
        return default_beta_grid(self.min, self.max, self.step)


@dataclass(frozen=True)
class ExperimentConfig:
    geometry: SorterGeometry = field(default_factory=SorterGeometry)
    process: ProcessSpec = field(default_factory=ProcessSpec)
    noise: NoiseModel = field(default_factory=NoiseModel)
    cutoff: int = 7
    beta_grid: BetaGrid = field(default_factory=BetaGrid)
    trials: int = 1000
    seed: int = 0
    outputs: str = "out"
    work_beta: float = 2.0
    tol: float = 1e-10
    max_iter: int = 10000

    def __post_init__(self):
        if self.cutoff < 0:
            raise ConfigError("cutoff", f"must be nonnegative, got {self.cutoff}")
        if self.trials < 2:
            raise ConfigError("trials", f"need at least 2, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", f"must be an unsigned 64-bit integer, got {self.seed}")
        if not self.work_beta > 0:
            raise ConfigError("work_beta", f"must be positive, got {self.work_beta}")
        if not self.tol > 0:
            raise ConfigError("tol", f"must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ConfigError("max_iter", f"must be positive, got {self.max_iter}")

    @property
    def input_range(self):
        return LRange(-self.cutoff, self.cutoff)

    def to_dict(self):
        d = asdict(self)
        d["geometry"]["ell_range"] = [self.geometry.ell_range.lo, self.geometry.ell_range.hi]
        d["process"]["shifts"] = [list(s) for s in self.process.shifts]
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


_SCALARS = {
    "cutoff": int,
    "trials": int,
    "seed": int,
    "outputs": str,
    "work_beta": float,
    "tol": float,
    "max_iter": int,
}


def _check_keys(section, data, cls):
    if not isinstance(data, dict):
        raise ConfigError(section, "must be a JSON object")
    allowed = {f.name for f in fields(cls)}
    for k in data:
        if k not in allowed:
            raise ConfigError(f"{section}.{k}" if section else k, "unknown field")


def _build(section, cls, data, convert=None):
    _check_keys(section, data, cls)
    kw = dict(data)
    if convert:
        for key, fn in convert.items():
            if key in kw:
                try:
                    kw[key] = fn(kw[key])
                except (TypeError, ValueError) as e:
                    raise ConfigError(f"{section}.{key}", str(e)) from None
    try:
        return cls(**kw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(section, str(e)) from None


def _ell_range(v):
    lo, hi = v
    return LRange(int(lo), int(hi))


def _shifts(v):
    return tuple((int(s), float(w)) for s, w in v)


def config_from_dict(data):
    _check_keys("", data, ExperimentConfig)
    kw = {}
    kw["geometry"] = _build("geometry", SorterGeometry, data.get("geometry", {}), {"ell_range": _ell_range})
    kw["process"] = _build("process", ProcessSpec, data.get("process", {}), {"shifts": _shifts})
    kw["noise"] = _build("noise", NoiseModel, data.get("noise", {}))
    kw["beta_grid"] = _build("beta_grid", BetaGrid, data.get("beta_grid", {}))
    for key, typ in _SCALARS.items():
        if key in data:
            v = data[key]
            if typ is int and (isinstance(v, bool) or not isinstance(v, int)):
                raise ConfigError(key, f"expected an integer, got {v!r}")
            if typ is float and (isinstance(v, bool) or not isinstance(v, (int, float))):
                raise ConfigError(key, f"expected a number, got {v!r}")
            if typ is str and not isinstance(v, str):
                raise ConfigError(key, f"expected a string, got {v!r}")
            kw[key] = typ(v)
    return ExperimentConfig(**kw)


def load_config(path):
    try:
        with open(path) as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError("<file>", f"invalid JSON: {e}") from None
    except OSError as e:
        raise ConfigError("<file>", str(e)) from None
    return config_from_dict(data)
