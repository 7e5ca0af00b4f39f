"""Mirror, space and cavity amplitude coefficients for the TSR interferometer.

Conventions: reflection off a mirror's front face (the face looking toward
the homodyne detector) carries a minus sign, reflection off its back face is
positive, transmission is real. All sideband phase bookkeeping lives in the
spaces. Sideband offsets are signed and given in Hz; positive is the upper
sideband.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateError, InvalidParameterError

C_LIGHT = 299_792_458.0
DEGENERATE_TOL = 1e-15
_SUM_TOL = 1e-12


@dataclass(frozen=True)
class MirrorSpec:
    """Power reflectance, transmittance and loss of one optic.

    ``loss`` may be omitted, in which case it is set to ``1 - R - T``.
    """

    reflectance: float
    transmittance: float
    loss: float = None

    def __post_init__(self):
        R, T = float(self.reflectance), float(self.transmittance)
        loss = 1.0 - R - T if self.loss is None else float(self.loss)
        if -_SUM_TOL < loss < 0.0:
            loss = 0.0
        for name, value in (("reflectance", R), ("transmittance", T), ("loss", loss)):
            if not 0.0 <= value <= 1.0:
                raise InvalidParameterError(f"mirror {name} {value!r} outside [0, 1]")
        if abs(R + T + loss - 1.0) > _SUM_TOL:
            raise InvalidParameterError(
                f"mirror R + T + L = {R + T + loss!r}, expected 1"
            )
        object.__setattr__(self, "reflectance", R)
        object.__setattr__(self, "transmittance", T)
        object.__setattr__(self, "loss", loss)

    @classmethod
    def lossless(cls, reflectance):
        return cls(reflectance, 1.0 - reflectance, 0.0)


@dataclass(frozen=True)
class SpaceSpec:
    """A free-space section with a macroscopic length and a microscopic tuning.

    ``detuning`` is the one-way carrier phase in radians; only the
    round-trip phase ``2 * detuning`` is physical, so it is periodic in pi.
    """

    length: float
    detuning: float = 0.0

    def __post_init__(self):
        if not self.length >= 0.0:
            raise InvalidParameterError(f"space length {self.length!r} must be >= 0")

    def round_trip_phase(self, offset_hz):
        return 2.0 * self.detuning + 4.0 * np.pi * np.asarray(offset_hz) * self.length / C_LIGHT


@dataclass(frozen=True)
class TsrModel:
    """Full description of the TSR Michelson with squeezed injection.

    Angles are radians, squeezing in dB, losses as power fractions.
    ``internal_loss`` is the round-trip power loss inside the Michelson,
    lumped at the effective end mirror.
    """

    end_mirror: MirrorSpec = field(default_factory=lambda: MirrorSpec(0.9992, 0.0008, 0.0))
    srm: MirrorSpec = field(default_factory=lambda: MirrorSpec(0.90, 0.10, 0.0))
    tsrm: MirrorSpec = field(default_factory=lambda: MirrorSpec(0.90, 0.10, 0.0))
    prm: MirrorSpec = field(default_factory=lambda: MirrorSpec(0.90, 0.10, 0.0))
    src_space: SpaceSpec = field(default_factory=lambda: SpaceSpec(1.19))
    tsrc_space: SpaceSpec = field(default_factory=lambda: SpaceSpec(1.26))
    prc_length: float = 1.21
    internal_loss: float = 0.004
    homodyne_angle: float = 0.0
    homodyne_efficiency: float = 0.9025
    input_squeezing: float = 5.0
    squeeze_angle: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.internal_loss < 1.0:
            raise InvalidParameterError(f"internal_loss {self.internal_loss!r} outside [0, 1)")
        if not 0.0 < self.homodyne_efficiency <= 1.0:
            raise InvalidParameterError(
                f"homodyne_efficiency {self.homodyne_efficiency!r} outside (0, 1]"
            )
        if not self.input_squeezing >= 0.0:
            raise InvalidParameterError(f"input_squeezing {self.input_squeezing!r} must be >= 0")
        if not self.prc_length > 0.0:
            raise InvalidParameterError(f"prc_length {self.prc_length!r} must be > 0")

    def with_detunings(self, phi_src, phi_tsrc):
        return replace(
            self,
            src_space=replace(self.src_space, detuning=float(phi_src)),
            tsrc_space=replace(self.tsrc_space, detuning=float(phi_tsrc)),
        )

    @property
    def detunings(self):
        return self.src_space.detuning, self.tsrc_space.detuning

    def replace(self, **changes):
        return replace(self, **changes)


def as_built_model(**overrides):
    """Model with the reported setup values and the default noise parameters."""
    return TsrModel(**overrides)


def amplitude_coeffs(mirror):
    return np.sqrt(mirror.reflectance), np.sqrt(mirror.transmittance)


def cavity_reflection(r1, t1, r_back, phase):
    """Amplitude reflection of a front mirror ``(r1, t1)`` backed by ``r_back``.

    Args:
        r1, t1: amplitude coefficients of the input mirror.
        r_back: (complex) reflection of whatever sits behind the input mirror.
        phase: round-trip phase between the two, scalar or array.

    Returns:
        Complex reflection, front-face sign convention.
    """
    e = np.asarray(r_back) * np.exp(1j * np.asarray(phase))
    denom = 1.0 - r1 * e
    if np.any(np.abs(denom) < DEGENERATE_TOL):
        raise DegenerateError("cavity_reflection: resonance denominator vanished")
    return (-r1 + (r1 * r1 + t1 * t1) * e) / denom


def michelson_effective_mirror(end, internal_loss):
    """The dark-fringe Michelson seen from the signal port, as one mirror."""
    R = end.reflectance * (1.0 - internal_loss)
    T = end.transmittance
    if R + T > 1.0 + _SUM_TOL:
        raise InvalidParameterError(f"effective mirror R + T = {R + T!r} exceeds 1")
    # equals 1 - R - T, without the cancellation error
    return MirrorSpec(R, T, end.loss + end.reflectance * internal_loss)


def _frequency_of_failure(fn, model, offsets):
    # Re-evaluate pointwise to name the first offending frequency.
    for f in np.atleast_1d(offsets):
        try:
            fn(model, f)
        except DegenerateError:
            return float(f)
    return None


def _tsr_reflection(model, offsets):
    r_s, t_s = amplitude_coeffs(model.srm)
    r_t, t_t = amplitude_coeffs(model.tsrm)
    r_e, _ = amplitude_coeffs(michelson_effective_mirror(model.end_mirror, model.internal_loss))
    inner = cavity_reflection(r_s, t_s, r_e, model.src_space.round_trip_phase(offsets))
    # The compound SRM comes back with front-face sign (-r_s off resonance).
    # Used as the outer back mirror it takes the back-face sign, like r_e,
    # which puts the TSRC tuning origin on its bare resonance.
    return cavity_reflection(r_t, t_t, -inner, model.tsrc_space.round_trip_phase(offsets))


def tsr_reflection(model, offset_hz):
    """Reflection of the coupled TSR cavities seen from the homodyne side.

    Args:
        model: TsrModel.
        offset_hz: signed sideband offset(s) from the carrier in Hz.

    Returns:
        Complex amplitude reflection, same shape as ``offset_hz``.
    """
    try:
        return _tsr_reflection(model, offset_hz)
    except DegenerateError:
        f = _frequency_of_failure(_tsr_reflection, model, offset_hz)
        raise DegenerateError("tsr_reflection: resonance denominator vanished", f) from None


def intracavity_buildup(r1, t1, r_back, phase):
    """Circulating power per unit input power behind the input mirror."""
    e = np.asarray(r_back) * np.exp(1j * np.asarray(phase))
    return np.abs(t1 / (1.0 - r1 * e)) ** 2


@dataclass(frozen=True)
class PrcFigures:
    fsr: float
    finesse: float
    fwhm: float


def prc_sanity(model, scan_points=20001):
    """Free spectral range, finesse and linewidth of the power-recycling cavity.

    Finesse and linewidth come from the measured width of the scanned
    buildup resonance, so mirror and internal losses are honored.
    """
    fsr = C_LIGHT / (2.0 * model.prc_length)
    r1, t1 = amplitude_coeffs(model.prm)
    rb, _ = amplitude_coeffs(michelson_effective_mirror(model.end_mirror, model.internal_loss))

    phase = np.linspace(-np.pi, np.pi, scan_points)
    buildup = intracavity_buildup(r1, t1, rb, phase)
    k = int(np.argmax(buildup))
    peak_phase = phase[k]
    half = 0.5 * intracavity_buildup(r1, t1, rb, peak_phase)

    def excess(p):
        return intracavity_buildup(r1, t1, rb, p) - half

    # buildup is even about the peak, so both half-maximum points lie within pi of it
    left = brentq(excess, peak_phase - np.pi, peak_phase, xtol=1e-15)
    right = brentq(excess, peak_phase, peak_phase + np.pi, xtol=1e-15)
    width = right - left
    return PrcFigures(fsr=fsr, finesse=2.0 * np.pi / width, fwhm=fsr * width / (2.0 * np.pi))
