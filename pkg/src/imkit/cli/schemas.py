"""System file loading and validation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from ..errors import InputError
from ..expr import parse
from ..exo import Exosystem, load_exosystem
from ..linpoly import LinSys
from ..vfield import AffineSystem

SYSTEM_SCHEMA = "imk.system/1"
EXO_SCHEMA = "imk.exosystem/1"


@dataclass(frozen=True)
class LoadedSystem:
    kind: str  # "nonlinear" | "linear"
    label: str
    affine: AffineSystem | None
    linear: LinSys | None
    param_defaults: dict[str, Fraction | float]
    raw: dict

    @property
    def param_floats(self) -> dict[str, float]:
        return {k: float(v) for k, v in self.param_defaults.items()}

    def as_affine(self) -> AffineSystem:
        if self.affine is not None:
            return self.affine
        from ..nform import affine_from_linear

        return affine_from_linear(self.linear.A, self.linear.b, self.linear.c)


def _read_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as err:
        raise InputError(f"cannot read {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise InputError(f"{path} is not valid JSON: {err}") from err
    if not isinstance(data, dict):
        raise InputError(f"{path} must contain a JSON object")
    return data


def _coerce_param_value(name: str, value):
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise InputError(f"parameter {name!r} must be a number")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except ValueError as err:
            raise InputError(f"parameter {name!r}: bad rational literal {value!r}") from err
    return Fraction(value)  # floats are binary rationals; keep them exact


def load_system(path: str) -> LoadedSystem:
    data = _read_json(path)
    schema = data.get("schema")
    if schema != SYSTEM_SCHEMA:
        raise InputError(f"{path}: expected schema {SYSTEM_SCHEMA!r}, got {schema!r}")
    kind = data.get("kind")
    label = data.get("label", "")
    if kind == "nonlinear":
        try:
            n = int(data["state_dim"])
        except (KeyError, TypeError, ValueError) as err:
            raise InputError(f"{path}: nonlinear system needs integer 'state_dim'") from err
        params_map = data.get("params") or {}
        if not isinstance(params_map, dict):
            raise InputError(f"{path}: 'params' must be an object")
        defaults = {name: _coerce_param_value(name, v) for name, v in params_map.items()}
        names = sorted(defaults)
        for key in ("f", "g", "h"):
            if key not in data:
                raise InputError(f"{path}: nonlinear system needs '{key}'")
        if len(data["f"]) != n or len(data["g"]) != n:
            raise InputError(f"{path}: 'f' and 'g' must list {n} expressions")
        f = [parse(text, n, names) for text in data["f"]]
        g = [parse(text, n, names) for text in data["g"]]
        h = parse(data["h"], n, names)
        domain = data.get("domain")
        if domain is not None:
            if len(domain) != n or any(len(iv) != 2 for iv in domain):
                raise InputError(f"{path}: 'domain' must list {n} [lo, hi] intervals")
        affine = AffineSystem.build(f, g, h, n, names, domain)
        return LoadedSystem("nonlinear", label, affine, None, defaults, data)
    if kind == "linear":
        from ..exo import _exact

        for key in ("A", "b", "c"):
            if key not in data:
                raise InputError(f"{path}: linear system needs '{key}'")
        try:
            A = [[_exact(v) for v in row] for row in data["A"]]
            b = [_exact(v) for v in data["b"]]
            c = [_exact(v) for v in data["c"]]
        except (TypeError, InputError) as err:
            raise InputError(f"{path}: bad matrix data ({err})") from err
        linear = LinSys(A, b, c)
        return LoadedSystem("linear", label, None, linear, {}, data)
    raise InputError(f"{path}: unknown system kind {kind!r}")


def load_exosystem_file(path: str) -> Exosystem:
    data = _read_json(path)
    schema = data.get("schema")
    if schema != EXO_SCHEMA:
        raise InputError(f"{path}: expected schema {EXO_SCHEMA!r}, got {schema!r}")
    return load_exosystem(data)
