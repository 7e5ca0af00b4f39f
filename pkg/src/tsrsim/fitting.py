"""Least-squares estimation of model parameters from measured noise spectra."""

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .errors import NoPeaksError, UnidentifiableError
from .operating_point import find_doublet, simplex_minimize
from .optics import C_LIGHT
from .quadrature import SpectrumSeries, noise_values

FIT_MAXITER = 2000
PEAK_PROMINENCE_DB = 0.2
FLATNESS_TOL = 1e-12

PARAMETERS = (
    "homodyne_angle",
    "internal_loss",
    "phi_src",
    "phi_tsrc",
    "input_squeezing",
    "homodyne_efficiency",
)


def get_parameter(model, name):
    if name == "phi_src":
        return model.src_space.detuning
    if name == "phi_tsrc":
        return model.tsrc_space.detuning
    return getattr(model, name)


def set_parameters(model, values):
    values = dict(values)
    phi_src = values.pop("phi_src", model.src_space.detuning)
    phi_tsrc = values.pop("phi_tsrc", model.tsrc_space.detuning)
    return model.replace(**values).with_detunings(phi_src, phi_tsrc)


@dataclass
class FitProblem:
    """What to fit: a base model, box-bounded free parameters and the data.

    ``free`` maps parameter names (see ``PARAMETERS``) to ``(low, high)``.
    Starting values are taken from ``base_model``, clipped into the box.
    """

    base_model: object
    free: dict
    data: SpectrumSeries
    weights: np.ndarray = None

    def __post_init__(self):
        if not self.free:
            raise ValueError("at least one free parameter is required")
        for name, (lo, hi) in self.free.items():
            if name not in PARAMETERS:
                raise ValueError(f"unknown fit parameter {name!r}")
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"bounds for {name!r} must be finite with low < high")
        n = len(self.data)
        if self.weights is None:
            self.weights = np.ones(n)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (n,) or np.any(self.weights <= 0):
            raise ValueError("weights must be positive, one per data point")


@dataclass
class FitResult:
    best_model: object
    estimates: dict
    half_widths: dict
    residual_rms: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list, repr=False)


class _Objective:
    """Weighted dB-space sum of squares over box-normalized coordinates."""

    def __init__(self, problem):
        self.problem = problem
        self.names = list(problem.free)
        self.lo = np.array([problem.free[n][0] for n in self.names], dtype=float)
        self.span = np.array([problem.free[n][1] for n in self.names], dtype=float) - self.lo

    def to_values(self, u):
        return dict(zip(self.names, self.lo + np.asarray(u) * self.span))

    def to_unit(self, values):
        return (np.array([values[n] for n in self.names]) - self.lo) / self.span

    def model(self, u):
        return set_parameters(self.problem.base_model, self.to_values(u))

    def residuals(self, u):
        p = self.problem
        return noise_values(self.model(u), p.data.frequencies) - p.data.values

    def __call__(self, u):
        r = self.residuals(u)
        return float(np.sum(self.problem.weights * r * r))


def _half_widths(obj, u_best, f_best, n_points):
    """Crude 1-D confidence half-widths from the objective's curvature per axis."""
    sigma2 = f_best / max(n_points - len(u_best), 1)
    out = {}
    h = 1e-3
    for i, name in enumerate(obj.names):
        du = np.zeros_like(u_best)
        du[i] = h
        up = np.clip(u_best + du, 0.0, 1.0)
        dn = np.clip(u_best - du, 0.0, 1.0)
        hp, hn = up[i] - u_best[i], u_best[i] - dn[i]
        fp, fn = obj(up), obj(dn)
        if hp > 0 and hn > 0:
            curv = 2.0 * (hp * (fn - f_best) + hn * (fp - f_best)) / (hp * hn * (hp + hn))
        else:
            # pinned at a bound: one-sided difference
            hh, ff = (hp, fp) if hp > 0 else (hn, fn)
            curv = 2.0 * (ff - f_best) / hh**2
        width = np.sqrt(2.0 * sigma2 / curv) if curv > 0 else np.inf
        out[name] = float(width * obj.span[i])
    return out


def fit(problem, step=0.1, maxiter=FIT_MAXITER):
    """Fit the free parameters of ``problem`` with a bounded simplex.

    Returns:
        FitResult; ``converged`` is False when the iteration cap was hit.

    Raises:
        UnidentifiableError: the objective is flat over the initial simplex.
    """
    obj = _Objective(problem)
    start = {n: get_parameter(problem.base_model, n) for n in obj.names}
    u0 = np.clip(obj.to_unit(start), 0.0, 1.0)

    simplex = np.vstack([u0] + [u0 + step * e if u0[i] + step <= 1.0 else u0 - step * e
                                for i, e in enumerate(np.eye(u0.size))])
    fs = np.array([obj(v) for v in simplex])
    scale = max(np.max(np.abs(fs)), np.finfo(float).tiny)
    if (fs.max() - fs.min()) / scale < FLATNESS_TOL:
        raise UnidentifiableError(
            f"objective is flat over the initial simplex for {', '.join(obj.names)}"
        )

    history = []

    def record(intermediate_result):
        history.append(float(intermediate_result.fun))

    res = simplex_minimize(
        obj, u0, step, bounds=[(0.0, 1.0)] * u0.size, maxiter=maxiter, callback=record
    )
    u_best = np.clip(res.x, 0.0, 1.0)
    f_best = obj(u_best)
    w = problem.weights
    r = obj.residuals(u_best)
    return FitResult(
        best_model=obj.model(u_best),
        estimates={k: float(v) for k, v in obj.to_values(u_best).items()},
        half_widths=_half_widths(obj, u_best, f_best, len(problem.data)),
        residual_rms=float(np.sqrt(np.sum(w * r * r) / np.sum(w))),
        iterations=int(res.nit),
        converged=bool(res.success),
        history=history,
    )


# -- detuning seeds from spectral peaks ---------------------------------------


@dataclass(frozen=True)
class DetuningSeed:
    phi_src: float
    phi_tsrc: float
    degenerate: bool
    peaks: tuple


def spectral_peaks(frequencies, values, prominence=PEAK_PROMINENCE_DB):
    """Frequencies of local maxima with the given prominence, strongest first.

    Positions are refined below the grid spacing by a parabola through the
    three samples around each maximum.
    """
    f = np.asarray(frequencies)
    v = np.asarray(values)
    idx, props = find_peaks(v, prominence=prominence)
    order = np.argsort(-props["prominences"], kind="stable")
    out = []
    for k in idx[order]:
        x = f[k]
        if 0 < k < f.size - 1:
            y0, y1, y2 = v[k - 1], v[k], v[k + 1]
            denom = y0 - 2.0 * y1 + y2
            if denom < 0:
                shift = 0.5 * (y0 - y2) / denom
                x = f[k] + shift * 0.5 * (f[k + 1] - f[k - 1])
        out.append(float(x))
    return out


def _ansatz_model(base, common_hz, differential_hz):
    """Shift the two bare cavity resonances by ``common +/- differential`` Hz."""
    nu_src = common_hz + differential_hz
    nu_tsrc = common_hz - differential_hz
    phi_src = -2.0 * np.pi * nu_src * base.src_space.length / C_LIGHT
    phi_tsrc = -2.0 * np.pi * nu_tsrc * base.tsrc_space.length / C_LIGHT
    return base.with_detunings(phi_src, phi_tsrc)


def _bisect(fn, target, lo, hi, iterations=48):
    """Bisection for increasing ``fn``; returns the bracket midpoint."""
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def seed_detunings_from_peaks(data, base):
    """Detunings whose model spectrum puts its maxima where ``data`` has them.

    Works on the ansatz where the two bare cavity resonances move by a common
    shift plus an equal and opposite differential shift, both taken >= 0
    (single-sided spectra cannot tell their signs). The common shift sets
    the separation of the two observed maxima, the differential shift their
    mean; each is found by 1-D bisection, alternating a few times. A single
    observed maximum is a degenerate doublet: a common shift alone moves it
    up, a differential shift alone moves it down.

    Raises:
        NoPeaksError: no maximum with prominence above 0.2 dB.
    """
    f = data.frequencies
    observed = spectral_peaks(f, data.values)
    if not observed:
        raise NoPeaksError("no spectral maximum with prominence above 0.2 dB")
    observed = sorted(observed[:2])
    degenerate = len(observed) == 1

    def model_peaks(common, differential):
        m = _ansatz_model(base, common, differential)
        found = spectral_peaks(f, noise_values(m, f))
        return sorted(found[:2])

    def separation(common, differential):
        p = model_peaks(common, differential)
        return p[1] - p[0] if len(p) == 2 else 0.0

    def mean_position(common, differential):
        p = model_peaks(common, differential)
        return float(np.mean(p)) if p else 0.0

    natural = find_doublet(base.with_detunings(0.0, 0.0)).splitting
    f_span = f[-1] - f[0]
    common = differential = 0.0
    if degenerate:
        target = observed[0]
        if target >= mean_position(0.0, 0.0):
            # a common shift raises the single maximum until it splits in two;
            # past the split counts as overshooting
            def single(c):
                p = model_peaks(c, 0.0)
                return p[0] if len(p) == 1 else np.inf

            hi = 0.25 * natural
            while single(hi) < target and hi < f_span:
                hi = min(2.0 * hi, f_span)
            common = _bisect(single, target, 0.0, hi)
        else:
            # a differential shift lowers it
            def lowered(d):
                return -mean_position(0.0, d)

            hi = 0.25 * natural
            while lowered(hi) < -target and hi < f_span:
                hi = min(2.0 * hi, f_span)
            differential = _bisect(lowered, -target, 0.0, hi)
    else:
        target_sep = observed[1] - observed[0]
        target_mean = 0.5 * (observed[0] + observed[1])
        for _ in range(3):
            hi = min(target_sep, f_span)
            while separation(hi, differential) < target_sep and hi < f_span:
                hi = min(2.0 * hi, f_span)
            common = _bisect(lambda c: separation(c, differential), target_sep, 0.0, hi)
            if mean_position(common, 0.0) < target_mean:
                hi = max(target_mean, natural)
                differential = _bisect(lambda d: mean_position(common, d), target_mean, 0.0, hi)
            else:
                differential = 0.0
    m = _ansatz_model(base, common, differential)
    return DetuningSeed(*m.detunings, degenerate=degenerate, peaks=tuple(observed))
