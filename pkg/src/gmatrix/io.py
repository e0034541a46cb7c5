"""Document formats: space descriptors (INI), kernels/subspaces/maps/reports (JSON)."""
from __future__ import annotations

import configparser
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import Kernel
from .space import DiscreteSpace, build_space, default_deltas
from .structure import SpaceMap, Subspace

CONFIG_SCHEMA = "gmatrix-config/1"
KERNEL_SCHEMA = "gmatrix-kernel/1"
SUBSPACE_SCHEMA = "gmatrix-subspace/1"
SPACEMAP_SCHEMA = "gmatrix-spacemap/1"
SUITES = ("axioms", "units", "center", "ideals", "representation", "derivation", "all")


class ConfigError(ValueError):
    pass


def _floats(text):
    return [float(t) for t in text.replace(",", " ").split()]


def _table(text):
    rows = [r for r in text.replace("\n", ";").split(";") if r.strip()]
    return [_floats(r) for r in rows]


@dataclass
class SpaceDescriptor:
    kind: str
    resolution: int | None = None
    weights: list | None = None
    metric: list | None = None

    def build(self) -> DiscreteSpace:
        params = {}
        if self.weights is not None:
            params["weights"] = self.weights
        if self.metric is not None:
            params["metric"] = self.metric
        return build_space(self.kind, self.resolution, params)


@dataclass
class ExperimentConfig:
    """Parsed run configuration.

    File layout (INI)::

        [space]
        kind = circle          # finite | interval | circle | torus2
        resolution = 128
        weights = 0.5, 0.5     # finite only
        metric = 0 1; 1 0      # finite only, rows separated by ';'

        [run]
        schema = gmatrix-config/1
        suite = axioms
        seed = 42
        out = report.json

        [units]
        side = right           # right | left | two_sided
        deltas = 0.3 0.185 ... # default 0.3 * phi**-n, n = 0..5

        [tolerances]
        algebra = 1e-12
        slack_constant = 10
    """

    space: SpaceDescriptor
    suite: str = "all"
    seed: int = 42
    out: str | None = None
    side: str = "right"
    deltas: list = field(default_factory=lambda: default_deltas().tolist())
    tolerances: dict = field(default_factory=dict)

    def tolerance(self, name, default):
        return float(self.tolerances.get(name, default))


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    if not cp.has_section("space"):
        raise ConfigError("missing [space] section")
    sp = cp["space"]
    try:
        kind = sp.get("kind")
        if kind is None:
            raise ConfigError("[space] needs a kind")
        desc = SpaceDescriptor(
            kind=kind.strip(),
            resolution=sp.getint("resolution") if "resolution" in sp else None,
            weights=_floats(sp["weights"]) if "weights" in sp else None,
            metric=_table(sp["metric"]) if "metric" in sp else None,
        )
        run = cp["run"] if cp.has_section("run") else {}
        schema = run.get("schema", CONFIG_SCHEMA)
        if schema != CONFIG_SCHEMA:
            raise ConfigError(f"unsupported config schema {schema!r}")
        cfg = ExperimentConfig(space=desc)
        cfg.suite = run.get("suite", cfg.suite).strip()
        cfg.seed = int(run.get("seed", cfg.seed))
        cfg.out = run.get("out", cfg.out)
        if cp.has_section("units"):
            u = cp["units"]
            cfg.side = u.get("side", cfg.side).strip()
            if "deltas" in u:
                cfg.deltas = _floats(u["deltas"])
        if cp.has_section("tolerances"):
            cfg.tolerances = {k: float(v) for k, v in cp["tolerances"].items()}
    except (ValueError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg: ExperimentConfig):
    if cfg.suite not in SUITES:
        raise ConfigError(f"unknown suite {cfg.suite!r}; expected one of {SUITES}")
    if cfg.side not in ("right", "left", "two_sided"):
        raise ConfigError(f"unknown side {cfg.side!r}")


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(str(exc)) from exc
    return parse_config(text)


# -- JSON documents -----------------------------------------------------------

def kernel_to_dict(f: Kernel) -> dict:
    flat = f.values.ravel()
    return {
        "schema": KERNEL_SCHEMA,
        "space": f.space.digest(),
        "n": f.space.size,
        "values": np.stack([flat.real, flat.imag], axis=1).tolist(),
    }


def kernel_from_dict(doc: dict, space: DiscreteSpace) -> Kernel:
    if doc.get("schema") != KERNEL_SCHEMA:
        raise ValueError(f"not a kernel document: {doc.get('schema')!r}")
    if doc["space"] != space.digest() or doc["n"] != space.size:
        raise ValueError("kernel document belongs to a different space")
    pairs = np.asarray(doc["values"], dtype=float)
    return Kernel(space, (pairs[:, 0] + 1j * pairs[:, 1]).reshape(space.size, space.size))


def subspace_to_dict(V) -> dict:
    b = V.basis
    return {"schema": SUBSPACE_SCHEMA, "space": V.space.digest(), "dim": V.dim,
            "basis": np.stack([b.real, b.imag], axis=-1).tolist()}


def subspace_from_dict(doc: dict, space: DiscreteSpace):
    if doc.get("schema") != SUBSPACE_SCHEMA or doc["space"] != space.digest():
        raise ValueError("subspace document does not match this space")
    b = np.asarray(doc["basis"], dtype=float).reshape(doc["dim"], space.size, 2)
    return Subspace(space, b[..., 0] + 1j * b[..., 1])


def spacemap_to_dict(alpha) -> dict:
    return {"schema": SPACEMAP_SCHEMA, "source": alpha.source.digest(), "target": alpha.target.digest(),
            "node_map": alpha.node_map.tolist(), "measure_preserving": alpha.measure_preserving}


def spacemap_from_dict(doc: dict, source: DiscreteSpace, target: DiscreteSpace):
    if doc.get("schema") != SPACEMAP_SCHEMA:
        raise ValueError("not a space-map document")
    if doc["source"] != source.digest() or doc["target"] != target.digest():
        raise ValueError("space-map document does not match these spaces")
    return SpaceMap(source, target, doc["node_map"], doc["measure_preserving"])


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True)
