"""Signal sources: QPSK symbol streams and symmetric alpha-stable noise.

Real SaS variates use the Chambers-Mallows-Stuck transform. Isotropic complex
SaS variates use the sub-Gaussian construction ``sqrt(A) * (G1 + 1j*G2)`` with
``A`` a totally skewed positive (alpha/2)-stable variate, scaled so that

    E{exp(j(t1*Re + t2*Im))} = exp(-dispersion * 2**(-alpha/2) * |t|**alpha)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

QPSK_POINTS = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) / np.sqrt(2.0)


@dataclass(frozen=True)
class AlphaStableParams:
    """Characteristic exponent and dispersion of a symmetric alpha-stable law.

    The real characteristic function is ``exp(-dispersion * |t|**alpha)``.
    """

    alpha: float
    dispersion: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not self.dispersion > 0.0:
            raise ValueError(f"dispersion must be positive, got {self.dispersion}")

    @property
    def scale(self) -> float:
        """Scale parameter ``dispersion**(1/alpha)``."""
        return self.dispersion ** (1.0 / self.alpha)


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator; identical seeds give bit-identical streams."""
    return np.random.Generator(np.random.PCG64(seed))


def spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """Independent child generators derived from one integer seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(s)) for s in children]


def sample_sas_real(params: AlphaStableParams, rng: np.random.Generator, size=None):
    """Draw symmetric alpha-stable samples via Chambers-Mallows-Stuck.

    Parameters
    ----------
    params : AlphaStableParams
    rng : numpy.random.Generator
    size : int or tuple, optional
        Output shape. ``None`` returns a scalar.

    Returns
    -------
    float or ndarray
        Samples with characteristic function ``exp(-dispersion*|t|**alpha)``.
    """
    alpha = params.alpha
    v = rng.uniform(-np.pi / 2, np.pi / 2, size=size)
    w = rng.standard_exponential(size=size)
    if alpha == 2.0:
        x = 2.0 * np.sqrt(w) * np.sin(v)
    elif alpha == 1.0:
        x = np.tan(v)
    else:
        x = (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
             * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha))
    return params.scale * x


def sample_positive_stable(a: float, rng: np.random.Generator, size=None):
    """Positive stable variates with Laplace transform ``exp(-s**a)``, 0 < a < 1.

    Kanter's representation of the totally skewed stable law.
    """
    if not (0.0 < a < 1.0):
        raise ValueError(f"positive stable index must lie in (0, 1), got {a}")
    u = rng.uniform(0.0, np.pi, size=size)
    w = rng.standard_exponential(size=size)
    return (np.sin(a * u) / np.sin(u) ** (1.0 / a)
            * (np.sin((1.0 - a) * u) / w) ** ((1.0 - a) / a))


def sample_isotropic_complex_sas(params: AlphaStableParams, rng: np.random.Generator,
                                 size=None):
    """Draw isotropic complex SaS samples.

    The joint characteristic function of (Re, Im) is
    ``exp(-dispersion * 2**(-alpha/2) * (t1**2 + t2**2)**(alpha/2))``. At
    ``alpha == 2`` this is circular complex Gaussian with per-component
    variance ``dispersion``.
    """
    alpha = params.alpha
    shape = () if size is None else (tuple(size) if np.ndim(size) else (int(size),))
    g = rng.standard_normal((2,) + shape)
    if alpha == 2.0:
        mix = params.dispersion
    else:
        a = alpha / 2.0
        mix = params.dispersion ** (1.0 / a) * sample_positive_stable(a, rng, size=shape)
    z = np.sqrt(mix) * (g[0] + 1j * g[1])
    return complex(z) if size is None else z


def qpsk_symbols(n: int, rng: np.random.Generator, amplitude: float = 1.0) -> np.ndarray:
    """``n`` i.i.d. QPSK symbols from ``{(+-1 +- 1j)/sqrt(2)} * amplitude``."""
    if n < 1:
        raise ValueError(f"symbol count must be >= 1, got {n}")
    return amplitude * QPSK_POINTS[rng.integers(0, 4, size=n)]


class QpskSource:
    """Seeded QPSK stream with fixed symbol modulus."""

    def __init__(self, rng: np.random.Generator, amplitude: float = 1.0):
        if not amplitude > 0:
            raise ValueError("amplitude must be positive")
        self.rng = rng
        self.amplitude = amplitude

    def take(self, n: int) -> np.ndarray:
        return qpsk_symbols(n, self.rng, self.amplitude)


class SasSource:
    """Seeded isotropic complex SaS stream, used as a heavy-tailed desired signal."""

    def __init__(self, rng: np.random.Generator, params: AlphaStableParams):
        self.rng = rng
        self.params = params

    def take(self, n: int) -> np.ndarray:
        if n < 1:
            raise ValueError(f"sample count must be >= 1, got {n}")
        return sample_isotropic_complex_sas(self.params, self.rng, size=n)
