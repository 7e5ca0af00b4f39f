"""Resonance doublet location and operating-point solvers."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .errors import NoDoubletError
from .optics import amplitude_coeffs, michelson_effective_mirror, tsr_reflection

DEFAULT_SCAN_BAND = (-15e6, 15e6)
DEFAULT_OP_BAND = (0.5e6, 15e6)

# Fixed simplex settings shared with the fitter (reflection 1, expansion 2,
# contraction 0.5 and shrink 0.5 are scipy's non-adaptive defaults).
SIMPLEX_XATOL = 1e-10
SIMPLEX_FATOL = np.inf  # converge on simplex diameter alone
SIMPLEX_MAXITER = 500
SIMPLEX_STEP = 0.1

_ABSORPTION_FLOOR = 1e-9


@dataclass(frozen=True)
class DoubletReport:
    upper_resonance: float
    lower_resonance: float
    absorption_at_peaks: tuple

    @property
    def splitting(self):
        """Offset of each resonance from the carrier (half the peak separation)."""
        return 0.5 * (self.upper_resonance - self.lower_resonance)

    @property
    def center(self):
        return 0.5 * (self.upper_resonance + self.lower_resonance)


@dataclass(frozen=True)
class OperatingPoint:
    phi_src: float
    phi_tsrc: float
    residual_asymmetry: float
    converged: bool = True

    def apply(self, model):
        return model.with_detunings(self.phi_src, self.phi_tsrc)


def absorption(model, offsets):
    """Power fraction of a sideband that does not come back out: 1 - |r|^2."""
    return 1.0 - np.abs(tsr_reflection(model, offsets)) ** 2


def find_doublet(model, scan_band=DEFAULT_SCAN_BAND, points=2001):
    """Locate the two strongest absorption resonances inside ``scan_band``.

    Args:
        model: TsrModel with some loss, so resonances show up as absorption.
        scan_band: signed (low, high) offsets in Hz.
        points: size of the uniform coarse grid.

    Returns:
        DoubletReport with peaks refined to about 1 Hz.

    Raises:
        NoDoubletError: fewer than two local maxima exceed 3x the scan median.
    """
    f = np.linspace(scan_band[0], scan_band[1], points)
    a = absorption(model, f)
    threshold = max(3.0 * np.median(a), _ABSORPTION_FLOOR)
    interior = (a[1:-1] > a[:-2]) & (a[1:-1] >= a[2:]) & (a[1:-1] > threshold)
    idx = np.flatnonzero(interior) + 1
    if idx.size < 2:
        raise NoDoubletError(
            f"found {idx.size} absorption peak(s) above threshold {threshold:.3g} in "
            f"[{scan_band[0]:.9g}, {scan_band[1]:.9g}] Hz"
        )
    best = idx[np.argsort(a[idx], kind="stable")[::-1][:2]]

    peaks = []
    for k in best:
        res = minimize_scalar(
            lambda x: -absorption(model, x),
            bounds=(f[k - 1], f[k + 1]),
            method="bounded",
            options={"xatol": 1.0},
        )
        peaks.append((float(res.x), float(-res.fun)))
    peaks.sort()
    (lo, a_lo), (hi, a_hi) = peaks
    return DoubletReport(upper_resonance=hi, lower_resonance=lo, absorption_at_peaks=(a_hi, a_lo))


def symmetry_residual(model, grid):
    """Sum over the grid of |r(+f) - conj(r(-f))|^2; zero means no quadrature rotation."""
    rp = tsr_reflection(model, grid)
    rm = tsr_reflection(model, -grid)
    return float(np.sum(np.abs(rp - np.conj(rm)) ** 2))


def _fold(phi):
    # round-trip phase is 2*phi, so detunings are only defined modulo pi
    return float((phi + 0.5 * np.pi) % np.pi - 0.5 * np.pi)


def _half_linewidth(gain):
    """Half-width at half maximum, in one-way detuning, of a cavity with round-trip gain."""
    if gain <= 0.0:
        return 0.25 * np.pi
    return float(np.arcsin(min(1.0, (1.0 - gain) / (2.0 * np.sqrt(gain)))))


def _starting_points(model):
    """Eight (start, step) pairs.

    Conjugate symmetry holds exactly when both carrier round-trip phases are
    0 or pi, i.e. on the lattice {0, pi/2}^2. The doublet well is about one
    cavity linewidth wide, so four starts sit a quarter linewidth off the
    lattice and four more are spread over the cell.
    """
    r_s, _ = amplitude_coeffs(model.srm)
    r_t, _ = amplitude_coeffs(model.tsrm)
    r_e, _ = amplitude_coeffs(michelson_effective_mirror(model.end_mirror, model.internal_loss))
    width = min(_half_linewidth(r_s * r_e), _half_linewidth(r_t * r_s))
    offset = 0.25 * width
    lattice = [
        ((a + offset, b + offset), offset)
        for a in (0.0, -0.5 * np.pi)
        for b in (0.0, -0.5 * np.pi)
    ]
    spread = [
        ((s * 0.25 * np.pi, t * 0.25 * np.pi), SIMPLEX_STEP) for s in (-1, 1) for t in (-1, 1)
    ]
    return lattice + spread


def simplex_minimize(objective, x0, step, bounds=None, maxiter=SIMPLEX_MAXITER, callback=None):
    """Nelder-Mead from a deterministic axis-aligned starting simplex."""
    x0 = np.asarray(x0, dtype=float)
    simplex = np.vstack([x0] + [x0 + step * e for e in np.eye(x0.size)])
    if bounds is not None:
        lo, hi = np.array(bounds, dtype=float).T
        # step inward where the axis step would leave the box
        for i in range(x0.size):
            if simplex[i + 1, i] > hi[i]:
                simplex[i + 1, i] = x0[i] - step
        simplex = np.clip(simplex, lo, hi)
    return minimize(
        objective,
        x0,
        method="Nelder-Mead",
        bounds=bounds,
        callback=callback,
        options={
            "initial_simplex": simplex,
            "xatol": SIMPLEX_XATOL,
            "fatol": SIMPLEX_FATOL,
            "maxiter": maxiter,
            "maxfev": 10 * maxiter,
            "adaptive": False,
        },
    )


def find_optimum_op(model, band=DEFAULT_OP_BAND, grid_points=101):
    """Detunings that make the doublet symmetric about the carrier.

    The conjugate-symmetry residual vanishes at several points of the
    detuning torus; among the converged candidates the one with the smallest
    ``|phi_src| + |phi_tsrc|`` (then smallest ``phi_src``) is returned.
    """
    lo, hi = band
    if not (0 < lo < hi and np.isfinite(hi)):
        raise ValueError(f"band must be positive and finite, got {band!r}")
    grid = np.linspace(lo, hi, grid_points)

    def objective(x):
        return symmetry_residual(model.with_detunings(x[0], x[1]), grid)

    tol = 1e-8 * grid_points
    candidates = []
    for start, step in _starting_points(model):
        res = simplex_minimize(objective, start, step)
        candidates.append((float(res.fun), _fold(res.x[0]), _fold(res.x[1])))

    good = [c for c in candidates if c[0] <= tol]
    if good:
        # J at a converged candidate is at roundoff level, so rank by position only
        J, ps, pt = min(good, key=lambda c: (round(abs(c[1]) + abs(c[2]), 6), round(c[1], 6)))
        return OperatingPoint(ps, pt, J, converged=True)
    J, ps, pt = min(candidates)
    return OperatingPoint(ps, pt, J, converged=False)


def antiresonance_op(model):
    """Both cavities at round-trip phase pi: the flat, undercoupled reference."""
    return OperatingPoint(0.5 * np.pi, 0.5 * np.pi, symmetry_residual(
        model.with_detunings(0.5 * np.pi, 0.5 * np.pi), np.linspace(*DEFAULT_OP_BAND, 101)
    ))
