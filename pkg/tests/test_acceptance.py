"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import subprocess
import sys

import numpy as np
import pytest

from tsrsim import (
    MirrorSpec,
    SpaceSpec,
    antiresonance_op,
    ellipse_rotation,
    find_doublet,
    find_optimum_op,
    noise_spectrum,
    as_built_model,
    prc_sanity,
    quad_transfer,
    tsr_reflection,
)
from tsrsim.fitting import FitProblem, fit
from tsrsim.io import bundled_path, config_to_model, read_config, scan_grid
from tsrsim.operating_point import absorption
from tsrsim.quadrature import output_covariance, squeezed_covariance
from tsrsim.synthetic import Lcg64, perturbed_spectrum

from oracles import enumerated_spectrum_db

GRID = np.linspace(0.5e6, 15e6, 1001)


@pytest.fixture
def report(capsys):
    def _report(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return _report


@pytest.fixture(scope="module")
def optimum_model():
    m = as_built_model()
    return find_optimum_op(m).apply(m)


def test_criterion_1_prc(report):
    fig = prc_sanity(as_built_model(internal_loss=0.0))
    ok = (
        abs(fig.fsr - 123.6e6) <= 0.5e6
        and abs(fig.finesse - 59.0) <= 3.0
        and abs(fig.fwhm - 2.1e6) <= 0.3e6
    )
    report(1, ok, f"PRC fsr={fig.fsr / 1e6:.4f} MHz finesse={fig.finesse:.2f} fwhm={fig.fwhm / 1e6:.4f} MHz")


def test_criterion_2_splitting(report, optimum_model):
    d = find_doublet(optimum_model)
    ok = abs(d.splitting - 6.1e6) <= 0.4e6
    report(2, ok, f"doublet splitting={d.splitting / 1e6:.4f} MHz (target 6.1 +- 0.4)")


def test_criterion_3_broadband(report, optimum_model):
    s = noise_spectrum(optimum_model, GRID).values
    k = int(np.argmax(s))
    d = find_doublet(optimum_model)
    wings = np.concatenate([s[GRID < 2e6], s[GRID > 12e6]])
    ok = (
        np.all(s <= -3.0)
        and np.all(np.abs(wings + 4.0) <= 0.5)
        and 0 < k < GRID.size - 1
        and s[k] > s[k - 1]
        and s[k] > s[k + 1]
        and s[k] < 0
        and abs(GRID[k] - d.splitting) <= GRID[1] - GRID[0]
    )
    report(3, ok, f"max={s.max():.3f} dB at {GRID[k] / 1e6:.4f} MHz, wings {wings.min():.3f}..{wings.max():.3f} dB")


def test_criterion_4_rotation(report, optimum_model):
    rot = max(abs(ellipse_rotation(V, isotropic=0.0)) for V in output_covariance(optimum_model, GRID))
    m = as_built_model()
    f = np.linspace(1e6, 15e6, 1001)
    flat = np.ptp(noise_spectrum(antiresonance_op(m).apply(m), f).values)
    ok = rot < 1e-3 and flat < 0.1
    report(4, ok, f"max rotation at optimum={rot:.2e} rad, anti-resonance flatness={flat:.2e} dB")


def _half_width(model, centre):
    f = centre + np.linspace(-3e6, 3e6, 6001)
    a = absorption(model, f)
    above = f[a >= 0.5 * a.max()]
    return 0.5 * (above.max() - above.min())


def test_criterion_5_suboptimal(report):
    base = as_built_model()
    details, ok = [], True
    for offset in (0.02, -0.02):
        m = base.with_detunings(offset, offset)
        s = noise_spectrum(m, GRID).values
        rot = np.array([ellipse_rotation(V, isotropic=0.0) for V in output_covariance(m, GRID)])
        flips = GRID[:-1][np.sign(rot[1:]) != np.sign(rot[:-1])]
        d = find_doublet(m)
        resonances = sorted([(abs(x), x) for x in (d.upper_resonance, d.lower_resonance)])
        matched = len(flips) == 2 and all(
            abs(flip - mag) < _half_width(m, signed)
            for flip, (mag, signed) in zip(sorted(flips), resonances)
        )
        ok = ok and s.max() > 0 and matched
        details.append(
            f"offset {offset:+.2f}: max={s.max():.2f} dB, sign changes at "
            f"{', '.join(f'{x / 1e6:.3f}' for x in flips)} MHz vs resonances "
            f"{', '.join(f'{mag / 1e6:.3f}' for mag, _ in resonances)} MHz"
        )
    report(5, ok, "; ".join(details))


def test_criterion_6_properties(report):
    rng = np.random.default_rng(6)
    f = np.array([0.5e6, 3.1e6, 6.2e6, 9.7e6, 15e6])
    worst = dict(vacuum=0.0, passive=0.0, aad=0.0, unitary=0.0, det=np.inf, oracle=0.0)
    for _ in range(50):
        m = as_built_model(
            srm=MirrorSpec.lossless(rng.uniform(0.5, 0.99)),
            tsrm=MirrorSpec.lossless(rng.uniform(0.0, 0.99)),
            internal_loss=rng.uniform(0.0, 0.05),
            src_space=SpaceSpec(rng.uniform(0.5, 2.0), rng.uniform(-np.pi / 2, np.pi / 2)),
            tsrc_space=SpaceSpec(rng.uniform(0.5, 2.0), rng.uniform(-np.pi / 2, np.pi / 2)),
            homodyne_angle=rng.uniform(-np.pi / 2, np.pi / 2),
            homodyne_efficiency=rng.uniform(0.5, 1.0),
            input_squeezing=rng.uniform(0.0, 12.0),
            squeeze_angle=rng.uniform(-np.pi / 2, np.pi / 2),
        )
        worst["vacuum"] = max(worst["vacuum"], np.abs(noise_spectrum(m.replace(input_squeezing=0.0), f).values).max())
        rp, rm = tsr_reflection(m, f), tsr_reflection(m, -f)
        worst["passive"] = max(worst["passive"], np.abs(np.concatenate([rp, rm])).max())
        A = quad_transfer(rp, rm)
        worst["aad"] = max(worst["aad"], np.linalg.eigvalsh(A @ np.conj(np.swapaxes(A, -1, -2))).max())
        lossless = m.replace(end_mirror=MirrorSpec(1.0, 0.0, 0.0), internal_loss=0.0)
        worst["unitary"] = max(worst["unitary"], np.abs(np.abs(tsr_reflection(lossless, f)) - 1).max())
        worst["det"] = min(worst["det"], np.linalg.det(output_covariance(m, f).real).min())
        oracle = enumerated_spectrum_db(m, f, squeezed_covariance(m.input_squeezing, m.squeeze_angle))
        worst["oracle"] = max(worst["oracle"], np.abs(noise_spectrum(m, f).values - oracle).max())
    ok = (
        worst["vacuum"] < 1e-9
        and worst["passive"] <= 1 + 1e-12
        and worst["aad"] <= 1 + 1e-12
        and worst["unitary"] < 1e-10
        and worst["det"] >= 1 - 1e-9
        and worst["oracle"] < 1e-9
    )
    report(6, ok, "50 random models: " + ", ".join(f"{k}={v:.3g}" for k, v in worst.items()))


def _fit_trials(base, grid):
    rng = Lcg64(2007)
    free = {"homodyne_angle": (np.radians(-30), np.radians(30)), "internal_loss": (0.0, 0.1)}
    passed, misses = 0, []
    for trial in range(20):
        angle = (0.0, 9.0, 12.6)[trial % 3]
        loss = rng.uniform(0.004, 0.039)
        truth = base.replace(homodyne_angle=np.radians(angle), internal_loss=loss)
        data = perturbed_spectrum(truth, grid, 0.1, seed=rng.next_u64())
        res = fit(FitProblem(base, free, data))
        d_angle = np.degrees(res.estimates["homodyne_angle"]) - angle
        d_loss = res.estimates["internal_loss"] - loss
        if abs(d_angle) <= 0.5 and abs(d_loss) <= 0.003:
            passed += 1
        else:
            misses.append(f"{angle:.1f}deg/{100 * loss:.2f}%")
    return passed, misses


def test_criterion_7_fit_round_trip(report):
    doc = read_config(bundled_path("tsr_suboptimal.cfg"))
    grid = scan_grid(doc)
    sub = config_to_model(doc)
    paper = as_built_model()
    opt = find_optimum_op(paper).apply(paper)
    n_sub, miss_sub = _fit_trials(sub, grid)
    n_opt, miss_opt = _fit_trials(opt, grid)
    report(7, n_sub >= 18 and n_opt >= 18,
           f"recovered {n_sub}/20 at 0.02 rad detuning {miss_sub}, {n_opt}/20 at the optimum {miss_opt}")


def _cli(args, tmp_path, tag):
    out_path = tmp_path / f"{tag}.csv"
    argv = [a.replace("{OUT}", str(out_path)) for a in args]
    proc = subprocess.run([sys.executable, "-m", "tsrsim", *argv], capture_output=True, check=False)
    extra = out_path.read_bytes() if out_path.exists() else b""
    return proc.returncode, proc.stdout, proc.stderr, extra


def test_criterion_8_determinism(report, tmp_path):
    paper = str(bundled_path("tsr_paper.cfg"))
    sub = str(bundled_path("tsr_suboptimal.cfg"))
    lossless = str(bundled_path("tsr_lossless.cfg"))
    data = str(bundled_path("synthetic_9deg.csv"))
    commands = []
    for cfg in (paper, sub, lossless):
        for op in ("explicit", "optimum", "antires"):
            commands.append(["simulate", cfg, "--op", op])
        commands.append(["splitting", cfg])
        commands.append(["op-find", cfg])
    commands.append(["simulate", paper, "--out", "{OUT}"])
    commands.append(["fit", sub, data, "--free", "homodyne_angle_deg,internal_loss", "--out", "{OUT}"])
    commands.append(["fit", paper, data, "--free", "phi_src,phi_tsrc", "--seed-detunings", "--out", "{OUT}"])
    mismatched = []
    for i, args in enumerate(commands):
        if _cli(args, tmp_path, f"a{i}") != _cli(args, tmp_path, f"b{i}"):
            mismatched.append(" ".join(args))
    report(8, not mismatched, f"{len(commands)} commands run twice, {len(mismatched)} differ {mismatched}")
