"""Flat ``key = value`` run configuration with range checks.

Lines are ``key = value``; ``#`` starts a comment; blank lines are ignored.
Unknown keys and out-of-range values raise :class:`ConfigError` naming the
line and key.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Any, Callable, Optional

__all__ = ["ConfigError", "RunConfig", "KEYS", "parse_config", "load_config"]


class ConfigError(ValueError):
    def __init__(self, message: str, key: Optional[str] = None, line: Optional[str] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.key = key
        self.line = line


def _pow2(x) -> bool:
    if isinstance(x, int):
        return x > 0 and x & (x - 1) == 0
    m, _ = math.frexp(x)
    return x > 0 and m == 0.5


def _int(s: str) -> int:
    return int(s, 10)


def _float(s: str) -> float:
    v = float(s)
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


def _opt_float(s: str):
    return None if s.lower() in ("", "none") else _float(s)


@dataclass(frozen=True)
class Key:
    parse: Callable[[str], Any]
    default: Any
    check: Callable[[Any], bool]
    rule: str
    doc: str


KEYS = {
    "grid.nx": Key(_int, 128, lambda v: v >= 8 and v % 2 == 0, "even integer >= 8", "x grid points"),
    "grid.ny": Key(_int, 128, lambda v: v >= 8 and v % 2 == 0, "even integer >= 8", "y grid points"),
    "domain.Lx": Key(_float, 2 * math.pi, lambda v: v > 0, "> 0", "x period"),
    "domain.Ly": Key(_float, 2 * math.pi, lambda v: v > 0, "> 0", "y period"),
    "time.T": Key(_float, 1.0, lambda v: v > 0, "> 0", "horizon"),
    "time.nodes": Key(_int, 64, lambda v: v >= 8 and _pow2(v), "power of two >= 8",
                      "time steps on [0, T]"),
    "solver.tol": Key(_float, 1e-12, lambda v: v > 0, "> 0", "Picard tolerance"),
    "solver.max_iter": Key(_int, 20, lambda v: 1 <= v <= 10000, "1 .. 10000", "Picard iterations"),
    "solver.quadrature": Key(str, "simpson", lambda v: v in ("simpson", "trapezoid"),
                             "simpson or trapezoid", "time quadrature"),
    "data.kind": Key(str, "gaussian", lambda v: v in ("gaussian", "mode", "file"),
                     "gaussian, mode or file", "initial datum"),
    "data.amplitude": Key(_float, 1e-2, lambda v: v >= 0, ">= 0", "H^{-1/2,0} norm of the datum"),
    "data.seed": Key(_int, 0, lambda v: 0 <= v < 2**63, "0 .. 2^63 - 1", "seed for data and trials"),
    "data.file": Key(str, "", lambda v: True, "path", "snapshot for data.kind = file or decompose"),
    "estimate.name": Key(str, "l4_strichartz",
                         lambda v: v in ("l4_strichartz", "local_smoothing", "bilinear_N1N2",
                                         "bilinear_interpolated", "modulation_decay",
                                         "besov_embedding"), "a known estimate", "experiment"),
    "estimate.trials": Key(_int, 100, lambda v: 1 <= v <= 10**7, "1 .. 10^7", "trial count"),
    "estimate.N1": Key(_opt_float, None, lambda v: v is None or _pow2(v), "power of two or none",
                       "first dyadic band"),
    "estimate.N2": Key(_opt_float, None, lambda v: v is None or _pow2(v), "power of two or none",
                       "second dyadic band"),
    "estimate.M": Key(_opt_float, None, lambda v: v is None or _pow2(v), "power of two or none",
                      "dyadic modulation"),
    "pvar.p": Key(_float, 2.0, lambda v: v >= 1, ">= 1", "variation exponent"),
    "pvar.levels": Key(_int, 6, lambda v: 0 <= v <= 64, "0 .. 64", "greedy levels"),
    "output.dir": Key(str, "", lambda v: True, "path", "output directory"),
}


class RunConfig:
    """Validated configuration values; missing keys take their defaults."""

    def __init__(self, values: Optional[dict] = None):
        self._values = {k: spec.default for k, spec in KEYS.items()}
        if not self._values["output.dir"]:
            self._values["output.dir"] = os.environ.get("KP2_OUTPUT_DIR", "kp2_output")
        for k, v in (values or {}).items():
            self._values[k] = v

    def __getitem__(self, key: str):
        return self._values[key]

    def as_dict(self) -> dict:
        return dict(self._values)

    def solver_config(self, **extra):
        from .solver import DataSpec, SolverConfig
        v = self._values
        data = DataSpec(kind=v["data.kind"], amplitude=v["data.amplitude"], seed=v["data.seed"],
                        path=v["data.file"] or None)
        return SolverConfig(nx=v["grid.nx"], ny=v["grid.ny"], Lx=v["domain.Lx"], Ly=v["domain.Ly"],
                            T=v["time.T"], nodes=v["time.nodes"], tol=v["solver.tol"],
                            max_iter=v["solver.max_iter"], quadrature=v["solver.quadrature"],
                            data=data, **extra)

    def estimate_spec(self):
        from .estimates import EstimateSpec
        v = self._values
        return EstimateSpec(name=v["estimate.name"], nx=v["grid.nx"], ny=v["grid.ny"],
                            Lx=v["domain.Lx"], Ly=v["domain.Ly"], N1=v["estimate.N1"],
                            N2=v["estimate.N2"], M=v["estimate.M"], trials=v["estimate.trials"],
                            seed=v["data.seed"], T=v["time.T"])


def _parse_value(key: str, raw: str, line):
    spec = KEYS.get(key)
    if spec is None:
        raise ConfigError("unknown key", key, line)
    try:
        val = spec.parse(raw)
    except (ValueError, TypeError, OverflowError) as exc:
        raise ConfigError(f"cannot parse {raw!r} ({exc})", key, line) from None
    if not spec.check(val):
        raise ConfigError(f"value {raw!r} out of range (expected {spec.rule})", key, line)
    return val


def _split(text: str, line):
    s = text.split("#", 1)[0].strip()
    if not s:
        return None
    if "=" not in s:
        raise ConfigError(f"expected 'key = value', got {s!r}", None, line)
    key, raw = (x.strip() for x in s.split("=", 1))
    if not key:
        raise ConfigError("missing key before '='", None, line)
    return key, raw


def parse_config(text: str, overrides=()) -> RunConfig:
    """Parse config text plus ``key=value`` override strings."""
    values = {}
    # only '\n' ends a line, so stray separators such as '\x1e' stay inside values
    for n, line in enumerate(text.split("\n"), 1):
        line = line.rstrip("\r")
        kv = _split(line, n)
        if kv is None:
            continue
        key, raw = kv
        if key in values:
            raise ConfigError("duplicate key", key, n)
        values[key] = _parse_value(key, raw, n)
    for i, ov in enumerate(overrides, 1):
        kv = _split(ov, f"--set #{i}")
        if kv is None:
            raise ConfigError("empty override", None, f"--set #{i}")
        values[kv[0]] = _parse_value(kv[0], kv[1], f"--set #{i}")
    return RunConfig(values)


def load_config(path: Optional[str], overrides=()) -> RunConfig:
    text = ""
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except (OSError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path!r}: {exc}") from None
    return parse_config(text, overrides)
