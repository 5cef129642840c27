"""JSON run configuration: parsing, unit resolution and validation.

Frequency fields accept a number (rad/s), ``"2pi*<f>"`` (2 pi times an
ordinary frequency), ``"<x>*kappa"`` or ``"<x>*omega_R"``. ``omega_sw_j``
may also be ``"geometry"`` to use the geometric formula, and ``eta`` may be
omitted when ``geometry.laser_power`` and ``geometry.pump_angular_frequency``
are given.
"""

from dataclasses import dataclass, field
import copy
import json
import math
from importlib import resources
from pathlib import Path
import re

from .errors import ConfigError, InvalidParameterError, MissingGeometryError
from .model import Geometry, PhysicalParams, drive_rate_from_power, sw_frequency_from_geometry
from .steadystate import BRANCH_POLICIES

__all__ = ["RunConfig", "load_config", "parse_config", "resolve_frequency", "shipped_configs"]

FREQUENCY_FIELDS = ("kappa", "omega_R", "omega_m", "gamma_m", "gamma_c", "g0", "delta_a",
                    "eta", "xi", "delta_c", "omega_sw_1", "omega_sw_2")
PLAIN_FIELDS = ("n_atoms_1", "n_atoms_2", "temperature", "n_ph")
GEOMETRY_FIELDS = tuple(Geometry.__dataclass_fields__)
TOP_LEVEL = ("base", "params", "sweep", "grid", "oracle", "branch_policy", "tolerances",
             "output", "svg", "measure")
SWEEP_KEYS = ("start", "stop", "steps")
GRID_KEYS = ("omega_sw_1", "omega_sw_2")
ORACLE_KEYS = ("n_trajectories", "seed", "method", "dt", "burn_in", "horizon",
               "synthetic", "corrupt")
TOLERANCE_DEFAULTS = {
    "stability_rel": 1e-9,
    "lyapunov_residual": 1e-10,
    "oracle_n_se": 3.0,
    "oracle_diag_rel": 0.05,
    "integral_rel": 1e-6,
}
ORACLE_DEFAULTS = {
    "n_trajectories": 2000,
    "seed": 0,
    "method": "auto",
    "dt": None,
    "burn_in": None,
    "horizon": None,
    "synthetic": None,
    "corrupt": 0.0,
}
SYNTHETIC_MODES = ("minus_identity",)

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_TWO_PI = re.compile(rf"^\s*2\s*\*?\s*pi\s*\*\s*({_NUMBER})\s*$")
_RATIO = re.compile(rf"^\s*({_NUMBER})\s*\*\s*(kappa|omega_R)\s*$")
_PLAIN = re.compile(rf"^\s*({_NUMBER})\s*$")


@dataclass
class RunConfig:
    params: PhysicalParams
    raw: dict
    sweep: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=lambda: dict(ORACLE_DEFAULTS))
    branch_policy: str = "continuation"
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCE_DEFAULTS))
    output: str | None = None
    svg: str | None = None
    measure: str | None = None
    source: str | None = None


def shipped_configs():
    """Names of the configuration files bundled with the package."""
    root = resources.files("optomech_cov") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def _line_of(text, key):
    if text is None:
        return None
    pattern = re.compile(r'"' + re.escape(key) + r'"\s*:')
    for lineno, line in enumerate(text.splitlines(), start=1):
        if pattern.search(line):
            return lineno
    return None


def resolve_frequency(value, name, kappa=None, omega_R=None):
    """Convert one frequency entry to rad/s."""
    if isinstance(value, bool):
        raise ConfigError(f"{name}: expected a number or frequency string, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{name}: expected a number or frequency string, got {value!r}")
    if m := _PLAIN.match(value):
        return float(m.group(1))
    if m := _TWO_PI.match(value):
        return 2.0 * math.pi * float(m.group(1))
    if m := _RATIO.match(value):
        unit = {"kappa": kappa, "omega_R": omega_R}[m.group(2)]
        if unit is None:
            raise ConfigError(f"{name}: cannot be expressed in units of {m.group(2)}")
        return float(m.group(1)) * unit
    raise ConfigError(f"{name}: malformed frequency {value!r}; expected a number, "
                      "'2pi*<f>', '<x>*kappa' or '<x>*omega_R'")


def _check_keys(section, allowed, where, text):
    if not isinstance(section, dict):
        raise ConfigError(f"{where}: expected a JSON object", _line_of(text, where))
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}", _line_of(text, key))


def _load_raw(source):
    """Return ``(dict, text, label)`` for a path or shipped config name."""
    path = Path(source)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
        label = str(path)
    else:
        name = source[:-5] if source.endswith(".json") else source
        resource = resources.files("optomech_cov") / "configs" / f"{name}.json"
        if not resource.is_file():
            raise ConfigError(f"config file not found: {source}")
        text = resource.read_text(encoding="utf-8")
        label = f"<shipped:{name}>"
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {label}: {exc.msg}", exc.lineno) from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{label}: top level must be a JSON object")
    return data, text, label


def _merge(base, override):
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key == "base":
            continue
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _expand(data, text, depth=0):
    _check_keys(data, TOP_LEVEL, "config", text)
    if "base" not in data:
        return data
    if depth > 8:
        raise ConfigError("config 'base' chain is too deep")
    base, base_text, _ = _load_raw(data["base"])
    return _merge(_expand(base, base_text, depth + 1), data)


def _params(section, text):
    _check_keys(section, FREQUENCY_FIELDS + PLAIN_FIELDS + ("geometry",), "params", text)
    geometry = None
    if "geometry" in section and section["geometry"] is not None:
        g = section["geometry"]
        _check_keys(g, GEOMETRY_FIELDS, "geometry", text)
        values = {}
        for key, value in g.items():
            if key == "pump_angular_frequency":
                values[key] = resolve_frequency(value, key)
            elif value is None or (isinstance(value, (int, float)) and not isinstance(value, bool)):
                values[key] = None if value is None else float(value)
            else:
                raise ConfigError(f"geometry.{key}: expected a number", _line_of(text, key))
        geometry = Geometry(**values)

    resolved = {}
    for key in ("kappa", "omega_R"):
        if key not in section:
            raise ConfigError(f"missing required key {key!r} in params")
    try:
        resolved["kappa"] = resolve_frequency(section["kappa"], "kappa")
        resolved["omega_R"] = resolve_frequency(section["omega_R"], "omega_R",
                                                kappa=resolved["kappa"])
        deferred = []
        for key in FREQUENCY_FIELDS[2:]:
            if key not in section:
                if key == "eta":
                    deferred.append(key)
                    continue
                if key == "xi" or key.startswith("omega_sw"):
                    resolved[key] = 0.0
                    continue
                raise ConfigError(f"missing required key {key!r} in params")
            value = section[key]
            if key.startswith("omega_sw") and value == "geometry":
                deferred.append(key)
                continue
            resolved[key] = resolve_frequency(value, key, resolved["kappa"], resolved["omega_R"])
        for key in PLAIN_FIELDS:
            if key not in section:
                if key == "n_ph":
                    continue
                raise ConfigError(f"missing required key {key!r} in params")
            value = section[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{key}: expected a number", _line_of(text, key))
            resolved[key] = float(value)
    except ConfigError as exc:
        if exc.line is None:
            name = str(exc).split(":")[0]
            raise ConfigError(str(exc), _line_of(text, name)) from None
        raise

    placeholder = {k: 0.0 for k in deferred}
    try:
        params = PhysicalParams(**resolved, **placeholder, geometry=geometry)
        updates = {}
        for key in deferred:
            if key == "eta":
                if geometry is None or geometry.laser_power is None \
                        or geometry.pump_angular_frequency is None:
                    raise ConfigError("missing required key 'eta' in params "
                                      "(or geometry.laser_power and pump_angular_frequency)")
                updates[key] = drive_rate_from_power(geometry.laser_power, params.kappa,
                                                     geometry.pump_angular_frequency)
            else:
                updates[key] = sw_frequency_from_geometry(params, int(key[-1]))
        return params.with_changes(**updates) if updates else params
    except InvalidParameterError as exc:
        key = exc.field.split(".")[-1]
        raise ConfigError(f"invalid parameter {exc}", _line_of(text, key)) from exc
    except MissingGeometryError as exc:
        raise ConfigError(str(exc), _line_of(text, "geometry")) from exc


def _number(value, where, text, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number", _line_of(text, where.split(".")[-1]))
    if integer and int(value) != value:
        raise ConfigError(f"{where}: expected an integer", _line_of(text, where.split(".")[-1]))
    return int(value) if integer else float(value)


def parse_config(data, text=None, source=None):
    """Validate a decoded config dictionary and build a :class:`RunConfig`."""
    data = _expand(data, text)
    if "params" not in data:
        raise ConfigError("missing required section 'params'")
    cfg = RunConfig(params=_params(data["params"], text), raw=data, source=source)

    if "sweep" in data:
        _check_keys(data["sweep"], SWEEP_KEYS, "sweep", text)
        cfg.sweep = {k: _number(v, f"sweep.{k}", text, integer=(k == "steps"))
                     for k, v in data["sweep"].items()}
    if "grid" in data:
        _check_keys(data["grid"], GRID_KEYS, "grid", text)
        for key, value in data["grid"].items():
            if not isinstance(value, list) or len(value) != 3:
                raise ConfigError(f"grid.{key}: expected [start, stop, steps]",
                                  _line_of(text, key))
            cfg.grid[key] = (_number(value[0], f"grid.{key}", text),
                             _number(value[1], f"grid.{key}", text),
                             _number(value[2], f"grid.{key}", text, integer=True))
    if "oracle" in data:
        _check_keys(data["oracle"], ORACLE_KEYS, "oracle", text)
        cfg.oracle.update(data["oracle"])
        if cfg.oracle["synthetic"] not in (None,) + SYNTHETIC_MODES:
            raise ConfigError(f"oracle.synthetic must be one of {SYNTHETIC_MODES} or null",
                              _line_of(text, "synthetic"))
        if cfg.oracle["method"] not in ("auto", "euler", "exact"):
            raise ConfigError("oracle.method must be 'auto', 'euler' or 'exact'",
                              _line_of(text, "method"))
    if "tolerances" in data:
        _check_keys(data["tolerances"], tuple(TOLERANCE_DEFAULTS), "tolerances", text)
        for key, value in data["tolerances"].items():
            cfg.tolerances[key] = _number(value, f"tolerances.{key}", text)
    if "branch_policy" in data:
        if data["branch_policy"] not in BRANCH_POLICIES:
            raise ConfigError(f"branch_policy must be one of {BRANCH_POLICIES}",
                              _line_of(text, "branch_policy"))
        cfg.branch_policy = data["branch_policy"]
    for key in ("output", "svg", "measure"):
        if key in data:
            if data[key] is not None and not isinstance(data[key], str):
                raise ConfigError(f"{key}: expected a string", _line_of(text, key))
            setattr(cfg, key, data[key])
    return cfg


def load_config(source):
    """Load a config from a file path or the name of a shipped config."""
    data, text, label = _load_raw(str(source))
    return parse_config(data, text=text, source=label)
