"""Two-photon quadrature picture: transfer matrices, covariances and homodyne spectra.

Covariances are normalized so the vacuum is the identity and shot noise is
0 dB. All matrix helpers accept a single 2x2 matrix or a stack of shape
``(N, 2, 2)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import IsotropicError, NonPassiveError
from .optics import tsr_reflection

PASSIVITY_TOL = 1e-9
ISOTROPY_TOL = 1e-12

_I2 = np.eye(2)


@dataclass(frozen=True)
class SpectrumSeries:
    """Noise spectrum relative to shot noise, in dB, on a positive increasing grid."""

    frequencies: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if f.ndim != 1 or f.shape != v.shape or f.size == 0:
            raise ValueError("frequencies and values must be equal-length non-empty 1-D arrays")
        if np.any(f <= 0) or np.any(np.diff(f) <= 0):
            raise ValueError("frequencies must be positive and strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("spectrum values must be finite")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.frequencies.size


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def quad_transfer(r_plus, r_minus):
    """Quadrature transfer matrix from upper/lower sideband coefficients.

    ``r_minus`` is the coefficient acting on the lower sideband ``w0 - W``.
    """
    rp = np.asarray(r_plus, dtype=complex)
    rmc = np.conj(np.asarray(r_minus, dtype=complex))
    s = 0.5 * (rp + rmc)
    d = 0.5j * (rp - rmc)
    out = np.empty(np.broadcast(rp, rmc).shape + (2, 2), dtype=complex)
    out[..., 0, 0] = s
    out[..., 0, 1] = d
    out[..., 1, 0] = -d
    out[..., 1, 1] = s
    return out


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def squeezed_covariance(squeeze_db, theta):
    """Pure squeezed vacuum, squeezed quadrature along angle ``theta``."""
    if squeeze_db < 0:
        raise ValueError("squeeze_db must be >= 0")
    g = 10.0 ** (squeeze_db / 10.0)
    rot = rotation(theta)
    return rot @ np.diag([1.0 / g, g]) @ rot.T


def propagate(transfer, cov):
    """Send ``cov`` through a passive network; loss ports inject vacuum."""
    A = np.asarray(transfer, dtype=complex)
    AA = A @ dagger(A)
    top = np.linalg.eigvalsh(AA)[..., -1]
    if np.any(top > 1.0 + PASSIVITY_TOL):
        raise NonPassiveError(f"transfer matrix is not passive (max eig {np.max(top):.12g})")
    return A @ cov @ dagger(A) + (_I2 - AA)


def apply_efficiency(cov, efficiency):
    return efficiency * np.asarray(cov) + (1.0 - efficiency) * _I2


def homodyne_power(cov, angle):
    """Measured quadrature variance, shot noise = 1."""
    v = np.array([np.cos(angle), np.sin(angle)])
    return np.einsum("i,...ij,j->...", v, np.real(cov), v)


def homodyne_spectrum(cov, angle):
    return 10.0 * np.log10(homodyne_power(cov, angle))


def ellipse_rotation(cov, isotropic=None):
    """Homodyne angle of minimum noise, folded to (-pi/2, pi/2].

    Isotropic covariances have no preferred angle: they raise
    ``IsotropicError`` unless ``isotropic`` gives a fill value.
    """
    re = np.real(np.asarray(cov))
    a, b, c = re[..., 0, 0], re[..., 0, 1], re[..., 1, 1]
    flat = (np.abs(a - c) < ISOTROPY_TOL) & (np.abs(b) < ISOTROPY_TOL)
    if np.any(flat) and isotropic is None:
        raise IsotropicError("covariance is isotropic; rotation undefined")
    angle = 0.5 * np.arctan2(-2.0 * b, c - a)
    angle = np.where(flat, isotropic if isotropic is not None else 0.0, angle)
    return angle if angle.ndim else float(angle)


def input_covariance(model):
    return squeezed_covariance(model.input_squeezing, model.squeeze_angle)


def model_transfer(model, frequencies):
    """Quadrature transfer of the TSR interferometer on a grid of positive offsets."""
    f = np.asarray(frequencies, dtype=float)
    return quad_transfer(tsr_reflection(model, f), tsr_reflection(model, -f))


def output_covariance(model, frequencies):
    """Detected covariance (after homodyne efficiency) at each frequency."""
    A = model_transfer(model, frequencies)
    return apply_efficiency(propagate(A, input_covariance(model)), model.homodyne_efficiency)


def noise_values(model, frequencies):
    """Homodyne noise in dB relative to shot noise; no grid validation."""
    return homodyne_spectrum(output_covariance(model, frequencies), model.homodyne_angle)


def noise_spectrum(model, frequencies):
    f = np.asarray(frequencies, dtype=float)
    return SpectrumSeries(f, noise_values(model, f))


def rotation_spectrum(model, frequencies):
    """Output ellipse rotation versus frequency; 0 where the output is isotropic."""
    return ellipse_rotation(output_covariance(model, frequencies), isotropic=0.0)
