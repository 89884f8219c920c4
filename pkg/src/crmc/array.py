"""Half-wavelength uniform linear array and snapshot synthesis.

Angles are measured from broadside in degrees; element ``i`` sees a phase of
``i * pi * sin(theta)`` relative to the first element.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sources import AlphaStableParams, sample_isotropic_complex_sas


def steering_vector(angle_deg, num_elements: int) -> np.ndarray:
    """ULA response ``[1, e^{j pi sin t}, ..., e^{j (M-1) pi sin t}]``.

    ``angle_deg`` may be an array, in which case the result has shape
    ``angle_deg.shape + (num_elements,)``.
    """
    if num_elements < 1:
        raise ValueError(f"num_elements must be >= 1, got {num_elements}")
    angle = np.asarray(angle_deg, dtype=float)
    if np.any(np.abs(angle) > 90.0):
        raise ValueError("angles must lie in [-90, 90] degrees")
    phase = np.pi * np.sin(np.deg2rad(angle))[..., None] * np.arange(num_elements)
    return np.exp(1j * phase)


@dataclass(frozen=True)
class UlaGeometry:
    num_elements: int

    def __post_init__(self):
        if self.num_elements < 2:
            raise ValueError(f"a ULA needs at least 2 elements, got {self.num_elements}")

    def steering(self, angle_deg) -> np.ndarray:
        return steering_vector(angle_deg, self.num_elements)


@dataclass
class SourceSpec:
    """A plane-wave source: arrival angle, symbol stream, and role."""

    angle_deg: float
    stream: object  # anything with take(n) -> complex ndarray
    role: str = "interferer"

    def __post_init__(self):
        if not -90.0 <= self.angle_deg <= 90.0:
            raise ValueError(f"angle_deg must lie in [-90, 90], got {self.angle_deg}")
        if self.role not in ("desired", "interferer"):
            raise ValueError(f"role must be 'desired' or 'interferer', got {self.role!r}")


@dataclass
class Snapshots:
    """Array measurements ``x`` (n, M) and reference signal ``d`` (n,)."""

    x: np.ndarray
    d: np.ndarray
    desired: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.d)

    def __iter__(self):
        return zip(self.x, self.d)


def synthesize(geometry: UlaGeometry, sources, n: int, noise_rng=None,
               noise: AlphaStableParams | None = None,
               contamination: AlphaStableParams | None = None,
               contamination_rng=None) -> Snapshots:
    """Generate ``n`` snapshots ``x = sum_k a(theta_k) s_k + eps``, ``d = s_0 (+ c)``.

    ``noise=None`` switches array noise off. ``contamination`` adds an
    independent SaS term to the reference; it must come from its own
    generator so that ``d`` never depends on the array noise.
    """
    desired = [s for s in sources if s.role == "desired"]
    if len(desired) != 1:
        raise ValueError(f"exactly one desired source required, got {len(desired)}")
    m = geometry.num_elements
    x = np.zeros((n, m), dtype=complex)
    s0 = None
    for src in sources:
        s = src.stream.take(n)
        x += s[:, None] * geometry.steering(src.angle_deg)
        if src.role == "desired":
            s0 = s
    if noise is not None:
        if noise_rng is None:
            raise ValueError("noise enabled but no noise generator given")
        x += sample_isotropic_complex_sas(noise, noise_rng, size=(n, m))
    d = s0.copy()
    if contamination is not None:
        if contamination_rng is None or contamination_rng is noise_rng:
            raise ValueError("contamination needs its own generator")
        d += sample_isotropic_complex_sas(contamination, contamination_rng, size=n)
    return Snapshots(x=x, d=d, desired=s0)


def synthesize_snapshot(geometry: UlaGeometry, sources, noise_rng=None,
                        noise: AlphaStableParams | None = None,
                        contamination: AlphaStableParams | None = None,
                        contamination_rng=None) -> tuple[np.ndarray, complex]:
    """Single-snapshot form of :func:`synthesize`; returns ``(x, d)``."""
    snaps = synthesize(geometry, sources, 1, noise_rng, noise, contamination,
                       contamination_rng)
    return snaps.x[0], complex(snaps.d[0])
