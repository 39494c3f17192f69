"""Scheme selection and the key-value run configuration file.

Config file grammar (read with :mod:`configparser`)::

    [mesh]
    cells = 200

    [scheme]
    scheme = fvc          ; fvc | rusanov | hll | roe
    cfl = 0.8
    alpha = adaptive      ; adaptive | fixed:<value>
    limiter = minmod      ; minmod | vanalbada
    gamma = 1.4
    entropy_fix = 0.1     ; Harten threshold factor, roe only
    cfl_mode = base       ; base | alpha

    [run]
    test = sod_sonic
    tend = 0.2
    left = 1.0,0.75,1.0   ; custom tests only: rho,u,p
    right = 0.125,0.0,0.1
    split = 0.5

    [output]
    out = results
    jobs = 1
    repetitions = 3

Every key is optional. Unknown sections or keys are rejected so that typos
do not silently fall back to defaults.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from .gas_dynamics import GasModel
from .fvc import ADAPTIVE, AlphaMode, LimiterKind
from .mesh import CflMode

SCHEMES = ("fvc", "rusanov", "hll", "roe")


class ConfigError(ValueError):
    """Invalid configuration value; ``key`` names the offending field."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


@dataclass(frozen=True)
class SchemeConfig:
    scheme: str = "fvc"
    courant: float = 0.8
    alpha_mode: AlphaMode = field(default=ADAPTIVE)
    limiter: LimiterKind = LimiterKind.MINMOD
    gamma: float = 1.4
    entropy_fix: float = 0.1
    cfl_mode: CflMode = CflMode.BASE

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError("scheme", f"unknown scheme {self.scheme!r}; expected one of {', '.join(SCHEMES)}")
        if not self.courant > 0.0:
            raise ConfigError("cfl", f"Courant number must be positive, got {self.courant}")
        if not self.gamma > 1.0:
            raise ConfigError("gamma", f"gamma must exceed 1, got {self.gamma}")
        if self.entropy_fix < 0.0:
            raise ConfigError("entropy_fix", "must be non-negative")

    @property
    def gas(self) -> GasModel:
        return GasModel(self.gamma)

    def label(self) -> str:
        if self.scheme == "fvc" and not self.alpha_mode.adaptive:
            return f"fvc-alpha{self.alpha_mode.fixed:g}"
        if self.scheme == "roe" and self.entropy_fix != 0.1:
            return f"roe-eps{self.entropy_fix:g}"
        return self.scheme

    def describe(self) -> dict:
        return {
            "scheme": self.scheme,
            "cfl": self.courant,
            "alpha": str(self.alpha_mode),
            "limiter": self.limiter.value,
            "gamma": self.gamma,
            "entropy_fix": self.entropy_fix,
            "cfl_mode": self.cfl_mode.value,
        }

    def with_(self, **changes) -> "SchemeConfig":
        return replace(self, **changes)


def parse_limiter(text: str) -> LimiterKind:
    try:
        return LimiterKind(text.strip().lower())
    except ValueError:
        valid = ", ".join(k.value for k in LimiterKind)
        raise ConfigError("limiter", f"unknown limiter {text!r}; expected one of {valid}") from None


def parse_alpha(text: str) -> AlphaMode:
    try:
        return AlphaMode.parse(text)
    except ValueError as exc:
        raise ConfigError("alpha", str(exc)) from None


def parse_cfl_mode(text: str) -> CflMode:
    try:
        return CflMode(text.strip().lower())
    except ValueError:
        raise ConfigError("cfl_mode", f"expected 'base' or 'alpha', got {text!r}") from None


# section -> key -> converter
_SCHEMA = {
    "mesh": {"cells": int},
    "scheme": {
        "scheme": str,
        "cfl": float,
        "alpha": parse_alpha,
        "limiter": parse_limiter,
        "gamma": float,
        "entropy_fix": float,
        "cfl_mode": parse_cfl_mode,
    },
    "run": {"test": str, "tend": float, "left": str, "right": str, "split": float},
    "output": {"out": str, "jobs": int, "repetitions": int},
}


def load_config(path: str | Path) -> dict:
    """Flat ``{key: value}`` dict of the settings present in ``path``."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    path = Path(path)
    try:
        with path.open() as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise ConfigError("config", f"malformed file {path}: {exc}") from None
    values = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(section, f"unknown section; expected one of {', '.join(_SCHEMA)}")
        for key, raw in parser.items(section):
            convert = _SCHEMA[section].get(key)
            if convert is None:
                raise ConfigError(f"{section}.{key}", "unknown key")
            try:
                values[key] = convert(raw)
            except ConfigError:
                raise
            except ValueError:
                raise ConfigError(f"{section}.{key}", f"bad value {raw!r}") from None
    return values


def write_config(values: dict, path: str | Path) -> None:
    """Write settings back in the same grammar (used for run manifests)."""
    parser = configparser.ConfigParser()
    owner = {key: section for section, keys in _SCHEMA.items() for key in keys}
    for key in sorted(values):
        section = owner.get(key, "run")
        if not parser.has_section(section):
            parser.add_section(section)
        value = values[key]  # enums are written by their value
        parser.set(section, key, str(getattr(value, "value", value)))
    with Path(path).open("w") as fh:
        parser.write(fh)
