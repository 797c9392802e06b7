"""Run configuration and result records.

A result record is one JSON document holding the effective configuration,
the solver settings, the converged spectral data, all coefficients with
their indices and the post-hoc diagnostics. High-precision numbers are
stored as decimal strings so a record reproduces its run exactly.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict, dataclass, fields

from mpmath import mp, mpf

from .errors import ConfigurationError

_MODULE = "cli"
FORMAT = "flaremaass-result"


@dataclass
class RunConfig:
    """Everything a user can set for one run; None means "use the default"."""

    group: str
    parameter: str
    digits: int = 50
    s0: str = "auto"
    spread0: str = "0.01"
    points: int | None = None
    horocycle_y: str | None = None
    ray_angle: str | None = None
    y0: str | None = None
    alpha0: str | None = None
    mc: int | None = None
    mf: int | None = None
    eps: str | None = None
    method: str = "secant"

    def __post_init__(self):
        if self.group not in ("hecke", "schottky"):
            raise ConfigurationError("group must be hecke or schottky", _MODULE, group=self.group)
        if self.method not in ("secant", "grid"):
            raise ConfigurationError("method must be secant or grid", _MODULE, method=self.method)
        if self.digits < 15:
            raise ConfigurationError("need at least 15 digits", _MODULE, digits=self.digits)
        for name in ("points", "mc", "mf"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ConfigurationError(f"{name} must be positive", _MODULE, **{name: v})
        for name in ("spread0", "horocycle_y", "y0", "alpha0", "eps"):
            v = getattr(self, name)
            if v is not None and not mpf(v) > 0:
                raise ConfigurationError(f"{name} must be positive", _MODULE, **{name: v})

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})

    def as_dict(self) -> dict:
        return asdict(self)


def num(x, digits: int) -> str:
    """Decimal string of x with ``digits`` significant digits."""
    return mp.nstr(mpf(x), digits) if x != 0 else "0.0"


def dumps(record: dict) -> str:
    """Canonical serialization: sorted keys, two-space indent, trailing newline."""
    return json.dumps(record, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> dict:
    record = json.loads(text)
    if not isinstance(record, dict) or record.get("format") != FORMAT:
        raise ConfigurationError("not a result record", _MODULE)
    return record


def write_atomic(path: str, text: str, binary: bool = False) -> None:
    """Write via a temporary file in the target directory and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb" if binary else "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_record(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def coeff_block(values, digits: int) -> list:
    return [{"n": n, "value": num(v, digits)} for n, v in enumerate(values)]


def parse_block(block: list) -> list:
    ordered = sorted(block, key=lambda e: e["n"])
    if [e["n"] for e in ordered] != list(range(len(ordered))):
        raise ConfigurationError("coefficient indices must be 0..M", _MODULE)
    return [mpf(e["value"]) for e in ordered]
