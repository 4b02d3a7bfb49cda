"""Run configurations for the experiment subcommands.

Configs are plain dataclasses. ``load_config`` reads TOML or JSON, accepts
either a bare table or a previous output file (its ``config`` member), and
rejects unknown keys before anything is computed.
"""

from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .io import InputError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def _int(v, lo=None):
    if isinstance(v, bool) or not isinstance(v, int):
        if isinstance(v, float) and v.is_integer():
            v = int(v)
        else:
            raise InputError(f"expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise InputError(f"expected an integer >= {lo}, got {v}")
    return v


def _pos_int(v):
    return _int(v, 1)


def _seed(v):
    v = _int(v, 0)
    if v >= 1 << 64:
        raise InputError("seed must fit in 64 bits")
    return v


def _float(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputError(f"expected a number, got {v!r}")
    return float(v)


def _k(v):
    if v == "auto":
        return v
    return _pos_int(v)


def _delta(v):
    if isinstance(v, str) and v.lower() in ("log", "logarithmic"):
        return "log"
    v = _float(v)
    if not v > 0:
        raise InputError(f"delta must be 'log' or positive, got {v}")
    return v


def _int_list(v):
    if not isinstance(v, (list, tuple)) or not v:
        raise InputError(f"expected a nonempty list of integers, got {v!r}")
    return [_pos_int(x) for x in v]


def _str(v):
    if not isinstance(v, str):
        raise InputError(f"expected a string, got {v!r}")
    return v


def _opt(parse):
    return lambda v: None if v is None else parse(v)


def _f(default, parse, **kw):
    if isinstance(default, list):
        return field(default_factory=lambda: list(default), metadata={"parse": parse}, **kw)
    return field(default=default, metadata={"parse": parse}, **kw)


@dataclass
class Fig1Config:
    n: int = _f(50, _pos_int)
    k: object = _f(20, _k)
    delta: object = _f("log", _delta)
    alpha: float = _f(1.0, _float)
    grid_lo: float = _f(-0.2, _float)
    grid_hi: float = _f(1.2, _float)
    grid_step: float = _f(1e-3, _float)
    seed: int = _f(0, _seed)
    resolved_k: object = _f(None, _opt(_pos_int))


@dataclass
class Fig2Config:
    n: int = _f(50, _pos_int)
    k: object = _f(20, _k)
    delta: object = _f("log", _delta)
    alpha: float = _f(1.0, _float)
    flip_prob: float = _f(0.1, _float)
    separation: float = _f(2.0, _float)
    grid_size: int = _f(256, _pos_int)
    x1_range: list = _f([-3.0, 5.0], lambda v: [_float(x) for x in v])
    x2_range: list = _f([-4.0, 4.0], lambda v: [_float(x) for x in v])
    far_from_samples: float = _f(0.1, _float)
    far_from_boundary: float = _f(0.5, _float)
    seed: int = _f(0, _seed)
    resolved_k: object = _f(None, _opt(_pos_int))


@dataclass
class RatesConfig:
    target: str = _f("linear", _str)
    dim: int = _f(1, _pos_int)
    alpha: float = _f(1.0, _float)
    noise_sd: float = _f(1.0, _float)
    n_values: list = _f([100, 316, 1000, 3162, 10000], _int_list)
    replicates: int = _f(50, _pos_int)
    n_test: int = _f(2000, _pos_int)
    k: object = _f("auto", _k)
    c: float = _f(1.0, _float)
    delta: object = _f("log", _delta)
    seed: int = _f(0, _seed)
    resolved_k: object = _f(None, _opt(_int_list))


@dataclass
class DescentConfig:
    m: int = _f(20, _pos_int)
    D: int = _f(100, _pos_int)
    p_grid: list = _f([2, 5, 10, 15, 18, 20, 22, 25, 40, 70, 100], _int_list)
    noise_sd: float = _f(0.5, _float)
    signal_norm: float = _f(1.0, _float)
    replicates: int = _f(200, _pos_int)
    seed: int = _f(0, _seed)


@dataclass
class IslandsConfig:
    n_values: list = _f([100, 10000], _int_list)
    flip_prob: float = _f(0.05, _float)
    separation: float = _f(2.0, _float)
    replicates: int = _f(20, _pos_int)
    k: object = _f("auto", _k)
    delta: object = _f(0.5, _delta)
    alpha: float = _f(1.0, _float)
    max_radius: float = _f(1.0, _float)
    max_points: int = _f(50, _pos_int)
    seed: int = _f(0, _seed)
    resolved_k: object = _f(None, _opt(_int_list))


CONFIGS = {
    "fig1": Fig1Config,
    "fig2": Fig2Config,
    "rates": RatesConfig,
    "descent": DescentConfig,
    "islands": IslandsConfig,
}


def from_mapping(command: str, data: dict):
    cls = CONFIGS[command]
    data = dict(data)
    named = data.pop("command", command)
    if named != command:
        raise InputError(f"config is for {named!r}, not {command!r}")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise InputError(f"unknown config keys for {command}: {unknown}")
    kwargs = {}
    for name, value in data.items():
        try:
            kwargs[name] = known[name].metadata["parse"](value)
        except InputError as exc:
            raise InputError(f"config key {name!r}: {exc}") from None
    return cls(**kwargs)


def load_config(command: str, path=None):
    if path is None:
        return CONFIGS[command]()
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None
    try:
        if path.suffix.lower() == ".toml":
            data = tomllib.loads(raw.decode("utf-8"))
        else:
            data = json.loads(raw)
    except (ValueError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: cannot parse config: {exc}") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: config must be a table/object")
    if "config" in data and "results" in data:
        data = data["config"]
    return from_mapping(command, data)


def config_dict(command: str, cfg) -> dict:
    return {"command": command, **asdict(cfg)}
