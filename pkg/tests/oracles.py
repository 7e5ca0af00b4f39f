"""Independent reference computations used by the tests.

Nothing here calls the closed-form cavity formulas of the package.
"""

import numpy as np

from tsrsim.optics import C_LIGHT
from tsrsim.quadrature import quad_transfer


def cavity_series(r1, t1, r_back, phase, terms=10**6):
    """Front-mirror reflection as an explicit sum over round trips."""
    k = np.arange(1, terms + 1)
    return -r1 + t1**2 * np.sum(r_back**k * r1 ** (k - 1) * np.exp(1j * k * phase))


def _coeffs(mirror):
    return (
        np.sqrt(mirror.reflectance),
        np.sqrt(mirror.transmittance),
        np.sqrt(mirror.loss),
    )


SOURCES = ("input", "tsrm_front_loss", "tsrm_back_loss", "srm_front_loss",
           "srm_back_loss", "end_transmission", "end_loss")


def chain_scattering(model, f):
    """Transfer from every input port to the homodyne-side output at offset ``f``.

    Fields leaving each mirror into the two spaces are unknowns of a 4x4
    linear system: e1 (TSRM -> SRM), e3 (SRM -> TSRM), e5 (SRM -> end),
    e7 (end -> SRM). Mirrors are unitary with front-face -r, back-face +r;
    the TSRC tuning origin sits a quarter wave from the bare SRM reflection
    so that zero detuning is resonant in both cavities.
    """
    r_t, t_t, l_t = _coeffs(model.tsrm)
    r_s, t_s, l_s = _coeffs(model.srm)
    R_e = model.end_mirror.reflectance * (1.0 - model.internal_loss)
    T_e = model.end_mirror.transmittance
    r_e, t_e, l_e = np.sqrt(R_e), np.sqrt(T_e), np.sqrt(max(0.0, 1.0 - R_e - T_e))

    w = 2.0 * np.pi * f / C_LIGHT
    p_t = np.exp(1j * (model.tsrc_space.detuning + 0.5 * np.pi + w * model.tsrc_space.length))
    p_s = np.exp(1j * (model.src_space.detuning + w * model.src_space.length))

    M = np.array([
        [1.0, -r_t * p_t, 0.0, 0.0],
        [r_s * p_t, 1.0, 0.0, -t_s * p_s],
        [-t_s * p_t, 0.0, 1.0, -r_s * p_s],
        [0.0, 0.0, -r_e * p_s, 1.0],
    ], dtype=complex)
    # right-hand sides, one column per source (unit amplitude)
    B = np.zeros((4, len(SOURCES)), dtype=complex)
    B[0, 0] = t_t
    B[0, 2] = l_t
    B[1, 3] = l_s
    B[2, 4] = l_s
    B[3, 5] = t_e
    B[3, 6] = l_e
    fields = np.linalg.solve(M, B)
    out = t_t * p_t * fields[1]
    out[0] += -r_t
    out[1] += l_t
    return dict(zip(SOURCES, out))


def enumerated_output_covariance(model, f, cov_in):
    """Detected covariance built from explicit port contributions."""
    up = chain_scattering(model, f)
    down = chain_scattering(model, -f)
    A = quad_transfer(up["input"], down["input"])
    V = A @ cov_in @ A.conj().T
    for name in SOURCES[1:]:
        B = quad_transfer(up[name], down[name])
        V = V + B @ B.conj().T
    eta = model.homodyne_efficiency
    # detector inefficiency as one more beam splitter with a vacuum port
    return eta * V + (1.0 - eta) * np.eye(2)


def enumerated_spectrum_db(model, freqs, cov_in):
    v = np.array([np.cos(model.homodyne_angle), np.sin(model.homodyne_angle)])
    out = []
    for f in freqs:
        V = enumerated_output_covariance(model, f, cov_in)
        out.append(10.0 * np.log10(v @ V.real @ v))
    return np.array(out)


def airy_finesse(r1, r_back):
    """Finesse of a two-mirror cavity from the exact Airy half-width."""
    g = r1 * r_back
    half = 2.0 * np.arcsin((1.0 - g) / (2.0 * np.sqrt(g)))
    return np.pi / half


def brute_force_peaks(x, y, count=2):
    """Indices of the ``count`` largest strict interior local maxima."""
    idx = [i for i in range(1, len(y) - 1) if y[i] > y[i - 1] and y[i] >= y[i + 1]]
    return sorted(sorted(idx, key=lambda i: -y[i])[:count])
