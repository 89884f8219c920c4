"""Declarative experiment scenarios and their data synthesis.

A scenario file is YAML with the following schema (all keys except ``name``
are optional and fall back to the defaults shown)::

    name: example1
    kind: beamforming          # or: sysid
    elements: 16               # array size M (filter length for sysid)
    iterations: 1000
    trials: 50
    seed: 2017
    pilot_snapshots: 20000     # snapshots for the Wiener reference
    noise: {alpha: 1.2, dispersion: 0.7}          # null = noise off
    contamination: {alpha: 1.2, dispersion: 0.05} # reference noise, or null
    sources:                   # beamforming only
      - {role: desired, angle: 15, signal: qpsk, amplitude: 1.0}
      - {role: interferer, angle: 7, signal: qpsk}
      - {role: desired, angle: 10, signal: sas, alpha: 1.4, dispersion: 1.0}
    algorithms:                # omitted algorithms are not run
      clms: {mu: 0.0003}
      lmp:  {mu: 0.001, p: 1}
      cmpn: {mu: 0.001, p_grid: [1, 1.25, 1.5, 1.75, 2]}
      rls:  {lambda: 0.99, delta: 100}
      crmc: {lambda: 0.99, sigma: 8, delta: 100}

For ``kind: sysid`` the snapshots are i.i.d. unit-power circular Gaussian
vectors and ``d = w_o^H x + noise`` with a planted unit-norm ``w_o``.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .array import Snapshots, SourceSpec, UlaGeometry, synthesize
from .filters import ALGORITHMS
from .metrics import sample_wiener
from .sources import (AlphaStableParams, QpskSource, SasSource, make_rng,
                      sample_isotropic_complex_sas, spawn_rngs)

PLANT_TAG = 0x5EED
PILOT_TAG = 0x9110


class ConfigError(ValueError):
    """Invalid scenario configuration."""


# Parameter names per algorithm, as written in scenario files.
REQUIRED_PARAMS = {
    "clms": ("mu",),
    "lmp": ("mu", "p"),
    "cmpn": ("mu", "p_grid"),
    "rls": ("lambda", "delta"),
    "crmc": ("lambda", "sigma", "delta"),
}

DEFAULT_ALGORITHMS = {
    "clms": {"mu": 0.0003},
    "lmp": {"mu": 0.001, "p": 1.0},
    "cmpn": {"mu": 0.001, "p_grid": [1.0, 1.25, 1.5, 1.75, 2.0]},
    "rls": {"lambda": 0.99, "delta": 100.0},
    "crmc": {"lambda": 0.99, "sigma": 8.0, "delta": 100.0},
}


@dataclass
class SourceConfig:
    angle: float
    role: str = "interferer"
    signal: str = "qpsk"
    amplitude: float = 1.0
    alpha: float = 1.4
    dispersion: float = 1.0

    def stream(self, rng, surrogate: bool = False):
        """Symbol stream; ``surrogate`` swaps SaS for its alpha=2 (Gaussian) member."""
        if self.signal == "qpsk":
            return QpskSource(rng, self.amplitude)
        alpha = 2.0 if surrogate else self.alpha
        return SasSource(rng, AlphaStableParams(alpha, self.dispersion))


@dataclass
class Scenario:
    name: str
    kind: str = "beamforming"
    elements: int = 16
    iterations: int = 1000
    trials: int = 50
    seed: int = 0
    pilot_snapshots: int = 20000
    noise: AlphaStableParams | None = None
    contamination: AlphaStableParams | None = None
    sources: list[SourceConfig] = field(default_factory=list)
    algorithms: dict[str, dict] = field(default_factory=dict)

    def __post_init__(self):
        try:
            self._validate()
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"scenario {self.name!r}: {exc}") from exc

    def _validate(self):
        if self.kind not in ("beamforming", "sysid"):
            raise ConfigError(f"unknown scenario kind {self.kind!r}")
        if self.iterations < 1 or self.trials < 1:
            raise ConfigError("iterations and trials must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.kind == "beamforming":
            UlaGeometry(self.elements)
            roles = [s.role for s in self.sources]
            if roles.count("desired") != 1:
                raise ConfigError("exactly one desired source required")
            for s in self.sources:
                SourceSpec(s.angle, None, s.role)
                if s.signal not in ("qpsk", "sas"):
                    raise ConfigError(f"unknown signal type {s.signal!r}")
                if s.signal == "sas":
                    AlphaStableParams(s.alpha, s.dispersion)
        elif self.elements < 1:
            raise ConfigError("elements must be >= 1")
        if not self.algorithms:
            raise ConfigError("no algorithms configured")
        for name, params in self.algorithms.items():
            if name not in REQUIRED_PARAMS:
                raise ConfigError(f"unknown algorithm {name!r}")
            missing = set(REQUIRED_PARAMS[name]) - set(params)
            extra = set(params) - set(REQUIRED_PARAMS[name])
            if missing or extra:
                raise ConfigError(f"{name}: missing {sorted(missing)}, unknown {sorted(extra)}")
            self.make_filter(name)

    @property
    def geometry(self) -> UlaGeometry:
        return UlaGeometry(self.elements)

    def make_filter(self, name: str, batch_shape=()):
        kwargs = {("lam" if k == "lambda" else k): v
                  for k, v in self.algorithms[name].items()}
        return ALGORITHMS[name](self.elements, batch_shape=batch_shape, **kwargs)

    def with_overrides(self, **changes) -> "Scenario":
        data = copy.deepcopy(self.__dict__)
        data.update(changes)
        return Scenario(**data)

    def select_algorithms(self, names) -> "Scenario":
        names = list(names)
        unknown = [n for n in names if n not in self.algorithms]
        if unknown:
            raise ConfigError(f"algorithms not configured in scenario: {unknown}")
        return self.with_overrides(algorithms={n: self.algorithms[n] for n in names})

    def planted_weights(self) -> np.ndarray:
        rng = make_rng([self.seed, PLANT_TAG])
        w = rng.standard_normal(self.elements) + 1j * rng.standard_normal(self.elements)
        return w / np.linalg.norm(w)

    def trial_data(self, trial: int, n: int | None = None) -> Snapshots:
        """Snapshots for one Monte-Carlo trial, seeded by ``seed + trial``."""
        n = self.iterations if n is None else n
        noise_rng, contam_rng, *source_rngs = spawn_rngs(self.seed + trial,
                                                         3 + len(self.sources))
        if self.kind == "sysid":
            return self._sysid_data(n, source_rngs[0], noise_rng, self.noise)
        sources = [SourceSpec(s.angle, s.stream(r), s.role)
                   for s, r in zip(self.sources, source_rngs)]
        return synthesize(self.geometry, sources, n, noise_rng, self.noise,
                          self.contamination, contam_rng)

    def _sysid_data(self, n, input_rng, noise_rng, noise) -> Snapshots:
        shape = (n, self.elements)
        x = (input_rng.standard_normal(shape)
             + 1j * input_rng.standard_normal(shape)) / np.sqrt(2.0)
        clean = x @ np.conj(self.planted_weights())
        d = clean.copy()
        if noise is not None:
            d += sample_isotropic_complex_sas(noise, noise_rng, size=n)
        return Snapshots(x=x, d=d, desired=clean)

    def to_dict(self) -> dict:
        def params(p):
            return None if p is None else {"alpha": p.alpha, "dispersion": p.dispersion}
        out = {k: getattr(self, k) for k in
               ("name", "kind", "elements", "iterations", "trials", "seed", "pilot_snapshots")}
        out["noise"] = params(self.noise)
        out["contamination"] = params(self.contamination)
        out["sources"] = [dict(s.__dict__) for s in self.sources]
        out["algorithms"] = copy.deepcopy(self.algorithms)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        if not isinstance(data, dict) or "name" not in data:
            raise ConfigError("scenario must be a mapping with a 'name'")
        data = dict(data)
        try:
            for key in ("noise", "contamination"):
                if data.get(key) is not None:
                    data[key] = AlphaStableParams(**data[key])
            data["sources"] = [SourceConfig(**s) for s in data.get("sources", [])]
            return cls(**data)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc


def wiener_reference(scenario: Scenario, num_snapshots: int | None = None) -> np.ndarray:
    """Reference weights for the relative-error metric.

    System identification returns the planted ``w_o``. Beamforming returns
    the sample Wiener solution on a pilot run in which every alpha-stable
    process (array noise and any SaS source) is replaced by its alpha=2
    member with the same dispersion, and the reference is uncontaminated.
    """
    if scenario.kind == "sysid":
        return scenario.planted_weights()
    n = scenario.pilot_snapshots if num_snapshots is None else num_snapshots
    noise_rng, *source_rngs = spawn_rngs([scenario.seed, PILOT_TAG],
                                         1 + len(scenario.sources))
    sources = [SourceSpec(s.angle, s.stream(r, surrogate=True), s.role)
               for s, r in zip(scenario.sources, source_rngs)]
    noise = None
    if scenario.noise is not None:
        noise = AlphaStableParams(2.0, scenario.noise.dispersion)
    pilot = synthesize(scenario.geometry, sources, n, noise_rng, noise)
    return sample_wiener(pilot.x, pilot.d)


def _beamforming(name, desired, interferers, noise, contamination, seed):
    return Scenario(
        name=name, kind="beamforming", elements=16, iterations=1000, trials=50,
        seed=seed, noise=noise, contamination=contamination,
        sources=[desired] + [SourceConfig(angle=a) for a in interferers],
        algorithms=copy.deepcopy(DEFAULT_ALGORITHMS))


def builtin_scenarios() -> dict[str, Scenario]:
    """Two beamforming examples plus system-identification setups."""
    return {
        "example1": _beamforming(
            "example1", SourceConfig(angle=15.0, role="desired"), (7.0, 23.0),
            AlphaStableParams(1.2, 0.7), AlphaStableParams(1.2, 0.05), seed=2017),
        "example2": _beamforming(
            "example2",
            SourceConfig(angle=10.0, role="desired", signal="sas", alpha=1.4, dispersion=1.0),
            (-10.0, 20.0),
            AlphaStableParams(1.2, 0.1), AlphaStableParams(1.2, 0.1), seed=2018),
        "sysid": Scenario(
            name="sysid", kind="sysid", elements=8, iterations=1000, trials=50, seed=16,
            noise=AlphaStableParams(1.2, 0.01),
            algorithms=copy.deepcopy(DEFAULT_ALGORITHMS)),
        "sysid-gauss": Scenario(
            name="sysid-gauss", kind="sysid", elements=8, iterations=5000, trials=200,
            seed=23, noise=AlphaStableParams(2.0, 1e-4),
            algorithms={"rls": {"lambda": 1.0, "delta": 1.0},
                        "crmc": {"lambda": 1.0, "sigma": 8.0, "delta": 1.0}}),
    }


def load_scenario(spec: str) -> Scenario:
    """Load a built-in scenario by name or a YAML scenario file by path."""
    builtins = builtin_scenarios()
    if spec in builtins:
        return builtins[spec]
    path = Path(spec)
    if not path.exists():
        raise ConfigError(f"no built-in scenario or file named {spec!r}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return Scenario.from_dict(data)
