"""Damped Mathieu oscillator: resolvent gain of a periodically modulated spring.

The spring stiffness is modulated at omega0 = sqrt(2), so a forcing at
omega_f also excites responses at omega_f + k omega0.  The time-spectral
resolvent captures all of those sidebands with just five collocation points,
and a brute-force simulation from rest confirms the prediction.

Run:  python demos/mathieu_gain_curve.py
"""

import numpy as np

from tsresolvent.baseflow import default_base_flow
from tsresolvent.resolvent import assemble_tsr, solve_full_resolvent
from tsresolvent.systems import build_system
from tsresolvent.validation import forcing_envelope, measure_gain

sys_ = build_system("mathieu")
base = default_base_flow(sys_, 5)
w0 = base.omega0
print(f"Mathieu oscillator, omega0 = {w0:.6f}, n_ts = {base.grid.n_ts}")

# The equilibrium w = 0 is the base flow; only the Jacobian is time-periodic.
# A coarse sweep shows the primary peak near omega_n = 1 and the parametric
# sidebands.
print("\n ratio   omega_f   harmonic gain   quasi-periodic gain")
for ratio in np.linspace(0.2, 3.0, 15):
    wf = ratio * w0
    h = solve_full_resolvent(assemble_tsr(base, sys_, wf, "harmonic")).gain
    q = solve_full_resolvent(assemble_tsr(base, sys_, wf, "quasi_periodic")).gain
    print(f" {ratio:5.2f}  {wf:8.4f}   {h:13.6f}   {q:13.6f}")

# Letting the forcing envelope vary in time can only help, so the
# quasi-periodic column never falls below the harmonic one.

# Now the check: drive the linearized system with the optimal harmonic
# forcing, wait for the transient to die out and compare RMS amplitudes.
wf = 1.0
op = assemble_tsr(base, sys_, wf, "harmonic")
sol = solve_full_resolvent(op)
m = measure_gain(sys_, base, forcing_envelope(sol, op), wf, decay_rate=0.1)
print(f"\nat omega_f = {wf}: predicted {sol.gain:.8f}, simulated {m.simulated_gain:.8f} "
      f"(relative difference {abs(m.simulated_gain - sol.gain) / sol.gain:.1e})")
