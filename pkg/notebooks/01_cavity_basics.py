"""
Cavity building blocks
======================

Single cavities first: the power-recycling cavity figures, then the
reflection of the coupled signal-recycling pair as a sideband sweeps
through its resonances.
"""

import numpy as np

from tsrsim import cavity_reflection, as_built_model, prc_sanity, tsr_reflection

model = as_built_model()

# Free spectral range, finesse and linewidth of the power-recycling cavity.
# The finesse is measured from the scanned buildup, so losses count.
for loss in (0.0, model.internal_loss):
    fig = prc_sanity(model.replace(internal_loss=loss))
    print(f"internal loss {loss:.3f}: FSR {fig.fsr / 1e6:.2f} MHz, "
          f"finesse {fig.finesse:.1f}, FWHM {fig.fwhm / 1e6:.3f} MHz")

# A two-mirror cavity on and off resonance. Front-face reflection carries
# a minus sign, so an undercoupled cavity reflects with -|r| off resonance.
r1, t1 = np.sqrt(0.9), np.sqrt(0.1)
for phase in (0.0, np.pi):
    print(f"round-trip phase {phase:.3f}: r = {cavity_reflection(r1, t1, 0.9996, phase):.6f}")

# Sweep the coupled cavities with both detunings at zero. The reflected
# power dips twice, once per normal mode of the pair.
f = np.linspace(-12e6, 12e6, 25)
r = tsr_reflection(model, f)
print("\n offset [MHz]   |r|^2")
for fi, ri in zip(f, r):
    print(f"{fi / 1e6:12.1f}   {abs(ri) ** 2:.4f}")
