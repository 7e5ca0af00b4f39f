"""Reproducible synthetic spectra for fitting tests and the bundled fixture."""

import numpy as np

from .quadrature import SpectrumSeries, noise_values

_MASK = (1 << 64) - 1
# Knuth's MMIX constants
_MULT = 6364136223846793005
_INC = 1442695040888963407

FIXTURE_SEED = 20070901
FIXTURE_ANGLE_DEG = 9.0
FIXTURE_LOSS = 0.02
FIXTURE_PERTURBATION_DB = 0.1


class Lcg64:
    """64-bit linear congruential generator, state_{n+1} = a * state_n + c mod 2**64.

    Uniform doubles use the top 53 bits of the state, so sequences are
    identical on any platform or language that follows the same recipe.
    """

    def __init__(self, seed):
        self.state = int(seed) & _MASK

    def next_u64(self):
        self.state = (_MULT * self.state + _INC) & _MASK
        return self.state

    def uniform(self, low=0.0, high=1.0):
        return low + (high - low) * ((self.next_u64() >> 11) * 2.0**-53)

    def uniforms(self, n, low=0.0, high=1.0):
        return np.array([self.uniform(low, high) for _ in range(n)])


def perturbed_spectrum(model, frequencies, amplitude_db, seed):
    """Model spectrum plus zero-mean uniform noise in [-amplitude, +amplitude] dB."""
    f = np.asarray(frequencies, dtype=float)
    noise = Lcg64(seed).uniforms(f.size, -amplitude_db, amplitude_db)
    return SpectrumSeries(f, noise_values(model, f) + noise)


def fixture_spectrum(base, frequencies):
    """The ``synthetic_9deg.csv`` data: 9 degree readout, 2% internal loss."""
    truth = base.replace(homodyne_angle=np.radians(FIXTURE_ANGLE_DEG), internal_loss=FIXTURE_LOSS)
    return perturbed_spectrum(truth, frequencies, FIXTURE_PERTURBATION_DB, FIXTURE_SEED)
