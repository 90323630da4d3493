# ====================================================
# Experiment Configuration
# ----------------------------------------------------
# - Flat key=value files (read with python-dotenv) with
#   list syntax [a,b,c]
# - Schema check: unknown keys, type mismatches
# - Precedence: default < file < flag, provenance kept
#   per key and echoed next to the outputs
# ====================================================

from dataclasses import dataclass, field, fields
import math
import os

from dotenv import dotenv_values

from signms import config
from signms.errors import ConfigurationError
from signms.mesh import build_mesh

EXPERIMENTS = ("flat_interface", "random_inclusions", "nim_slab", "custom")
WEIGHTS = ("signed", "absolute")

# Wavenumber when the config leaves k unset
DEFAULT_K = {
    "flat_interface": 4.0,
    "random_inclusions": 4.0,
    "nim_slab": 2.0 * math.pi ** 2,
    "custom": 4.0,
}

# =====================================================
# SCHEMA  key -> (kind, default)
# =====================================================
SCHEMA = {
    "experiment": ("choice", "flat_interface"),
    "n_fine": ("int", 400),
    "n_coarse": ("int_list", (20, 40, 80)),
    "m": ("int_list", (1, 2, 3, 4)),
    "l_star": ("int", 3),
    "l_star_list": ("int_list", ()),
    "k": ("float", None),
    "mu_msh": ("float", 24.0),
    "correction_weight": ("choice", "signed"),
    "seed": ("int", 0),
    "output_dir": ("str", None),
    "dump_fields": ("bool", False),
    "dump_basis": ("pair_list", ()),
    "parallel": ("bool", False),
    "q1_baseline": ("bool", True),
    "decay_samples": ("int", 0),
    "decay_m_max": ("int", 4),
    "resolution_threshold": ("float", config.RESOLUTION_THRESHOLD),
    # flat interface
    "sigma_plus": ("float", 1.0),
    "sigma_minus": ("float", None),
    "gamma": ("float", 0.5),
    # random inclusions
    "contrast": ("float_list", (1.0, 1.0e3)),
    "inclusion_count": ("int", 40),
    "inclusion_size": ("int_list", (4, 12)),
    # sources
    "source_center": ("float_list", None),
    "source_spread": ("float", 0.05),
    # custom profiles
    "sigma_path": ("str", None),
    "c_path": ("str", None),
    "f_path": ("str", None),
}

_CHOICES = {"experiment": EXPERIMENTS, "correction_weight": WEIGHTS}
_EXPECTED = {
    "int": "an integer",
    "float": "a number",
    "str": "a string",
    "bool": "true/false",
    "choice": "one of",
    "int_list": "a list of integers like [1,2,3]",
    "float_list": "a list of numbers like [1.0,1e3]",
    "pair_list": "a list of i:j pairs like [0:0,5:1]",
}


# =====================================================
# VALUE PARSING
# =====================================================
def _type_error(key, kind, raw):
    expected = _EXPECTED[kind]
    if kind == "choice":
        expected += " " + ", ".join(_CHOICES[key])
    return ConfigurationError(f"config key '{key}' expects {expected}, got {raw!r}")


def _list_items(key, kind, raw):
    text = raw.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise _type_error(key, kind, raw)
    body = text[1:-1].strip()
    return [item.strip() for item in body.split(",")] if body else []


def parse_value(key, raw):
    if key not in SCHEMA:
        raise ConfigurationError(f"unknown config key '{key}'")
    kind, _ = SCHEMA[key]
    if raw is None:
        raise _type_error(key, kind, raw)
    if not isinstance(raw, str):
        return _coerce(key, kind, raw)

    text = raw.strip()
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "str":
            return text
        if kind == "bool":
            lowered = text.lower()
            if lowered in ("true", "1", "yes", "on"):
                return True
            if lowered in ("false", "0", "no", "off"):
                return False
            raise ValueError(text)
        if kind == "choice":
            if text not in _CHOICES[key]:
                raise ValueError(text)
            return text
        items = _list_items(key, kind, text)
        if kind == "int_list":
            return tuple(int(v) for v in items)
        if kind == "float_list":
            return tuple(float(v) for v in items)
        if kind == "pair_list":
            pairs = []
            for item in items:
                i, j = item.split(":")
                pairs.append((int(i), int(j)))
            return tuple(pairs)
    except ValueError:
        raise _type_error(key, kind, raw)
    raise _type_error(key, kind, raw)


def _coerce(key, kind, value):
    # Values handed over already typed (CLI flags, tests)
    if kind == "bool" and isinstance(value, bool):
        return value
    if kind == "int" and isinstance(value, int) and not isinstance(value, bool):
        return value
    if kind == "float" and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind in ("int_list", "float_list", "pair_list") and isinstance(value, (list, tuple)):
        return parse_value(key, format_value(value))
    if kind in ("str", "choice"):
        return parse_value(key, str(value))
    raise _type_error(key, kind, value)


def format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        parts = [f"{v[0]}:{v[1]}" if isinstance(v, tuple) else format_value(v) for v in value]
        return "[" + ",".join(parts) + "]"
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


# =====================================================
# RESOLVED CONFIG
# =====================================================
@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "flat_interface"
    n_fine: int = 400
    n_coarse: tuple = (20, 40, 80)
    m: tuple = (1, 2, 3, 4)
    l_star: int = 3
    l_star_list: tuple = ()
    k: float = 4.0
    mu_msh: float = 24.0
    correction_weight: str = "signed"
    seed: int = 0
    output_dir: str = config.OUTPUT_DIR
    dump_fields: bool = False
    dump_basis: tuple = ()
    parallel: bool = False
    q1_baseline: bool = True
    decay_samples: int = 0
    decay_m_max: int = 4
    resolution_threshold: float = config.RESOLUTION_THRESHOLD
    sigma_plus: float = 1.0
    sigma_minus: float = 3.0
    gamma: float = 0.5
    contrast: tuple = (1.0, 1.0e3)
    inclusion_count: int = 40
    inclusion_size: tuple = (4, 12)
    source_center: tuple = (0.5, 0.5)
    source_spread: float = 0.05
    sigma_path: str | None = None
    c_path: str | None = None
    f_path: str | None = None
    provenance: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def l_star_values(self):
        return tuple(self.l_star_list) or (self.l_star,)

    def values(self):
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "provenance"}

    def validate(self):
        if self.n_fine < 1:
            raise ConfigurationError(f"n_fine must be >= 1, got {self.n_fine}")
        if not self.n_coarse:
            raise ConfigurationError("n_coarse must list at least one coarse size")
        for n_coarse in self.n_coarse:
            build_mesh(self.n_fine, n_coarse)
        if not self.m or any(m < 0 for m in self.m):
            raise ConfigurationError(f"m must list non-negative layer counts, got {format_value(self.m)}")
        if any(l < 1 for l in self.l_star_values):
            raise ConfigurationError(f"l_star must be >= 1, got {format_value(self.l_star_values)}")
        if not self.k > 0:
            raise ConfigurationError(f"wavenumber k must be positive, got {self.k}")
        if not self.mu_msh > 0:
            raise ConfigurationError(f"mu_msh must be positive, got {self.mu_msh}")
        if len(self.contrast) != 2 or min(self.contrast) <= 0:
            raise ConfigurationError(f"contrast must be two positive magnitudes, got {format_value(self.contrast)}")
        if len(self.inclusion_size) != 2:
            raise ConfigurationError(f"inclusion_size must be [min,max], got {format_value(self.inclusion_size)}")
        if len(self.source_center) != 2:
            raise ConfigurationError(f"source_center must be [x,y], got {format_value(self.source_center)}")
        if self.decay_samples < 0 or self.decay_m_max < 1:
            raise ConfigurationError("decay_samples must be >= 0 and decay_m_max >= 1")
        if self.experiment == "custom" and not self.sigma_path:
            raise ConfigurationError("experiment 'custom' needs sigma_path")
        for name in ("sigma_path", "c_path", "f_path"):
            path = getattr(self, name)
            if path and not os.path.exists(path):
                raise ConfigurationError(f"{name} does not exist: {path}")
        return self


def _experiment_defaults(values):
    experiment = values.get("experiment", "flat_interface")
    filled = {}
    if values.get("k") is None:
        filled["k"] = DEFAULT_K[experiment]
    if values.get("sigma_minus") is None:
        filled["sigma_minus"] = 10.0 if experiment == "nim_slab" else 3.0
    if values.get("source_center") is None:
        filled["source_center"] = (0.0, 0.5) if experiment == "nim_slab" else (0.5, 0.5)
    if values.get("output_dir") is None:
        filled["output_dir"] = os.path.join(config.OUTPUT_DIR, experiment)
    return filled


def resolve(values, provenance=None):
    provenance = dict(provenance or {})
    merged = {key: default for key, (_, default) in SCHEMA.items()}
    merged.update(values)
    merged.update(_experiment_defaults(merged))
    for key in SCHEMA:
        provenance.setdefault(key, "default")
    return ExperimentConfig(**merged, provenance=provenance)


# =====================================================
# PARSE FILE + FLAGS
# =====================================================
def read_config_file(path):
    if not os.path.exists(path):
        raise ConfigurationError(f"config file not found: {path}")
    raw = dotenv_values(path)
    unknown = sorted(key for key in raw if key not in SCHEMA)
    if unknown:
        raise ConfigurationError(
            f"{path}: unknown config key(s): {', '.join(unknown)}; known keys: {', '.join(SCHEMA)}"
        )
    return {key: parse_value(key, value) for key, value in raw.items()}


def parse_config(path=None, overrides=None):
    values, provenance = {}, {}
    if path is not None:
        for key, value in read_config_file(path).items():
            values[key] = value
            provenance[key] = "file"

    overrides = {key: value for key, value in (overrides or {}).items() if value is not None}
    unknown = sorted(key for key in overrides if key not in SCHEMA)
    if unknown:
        raise ConfigurationError(f"unknown config key(s): {', '.join(unknown)}")
    for key, value in overrides.items():
        values[key] = parse_value(key, value)
        provenance[key] = "flag"

    # k and the other experiment-dependent defaults follow the final experiment
    return resolve(values, provenance).validate()


def parse_assignments(assignments):
    # ["k=8", "m=[1,2]"] -> {"k": "8", "m": "[1,2]"}
    parsed = {}
    for item in assignments or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigurationError(f"expected KEY=VALUE, got {item!r}")
        parsed[key.strip()] = value.strip()
    return parsed


def write_resolved(cfg, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "config_resolved.txt")
    lines = []
    for key, value in cfg.values().items():
        source = cfg.provenance.get(key, "default")
        lines.append(f"{key}={format_value(value)}  # {source}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    return path
