"""Van der Pol limit cycle: forcing at the orbit's own frequency.

For an autonomous orbit, any phase shift of the orbit is again a solution,
so the linear operator is singular whenever omega_f is a multiple of the base
frequency.  The transverse resolvent removes that neutral direction with an
oblique projector.  Forcing chosen this way leaves the phase alone, while
forcing that reaches the neutral direction makes the phase drift linearly
in time.

Run:  python demos/vdp_resonance.py
"""

from tsresolvent.baseflow import vdp_orbit
from tsresolvent.floquet import floquet_exponent_ladders, floquet_pair
from tsresolvent.resolvent import assemble_tsr, sigma_min_L
from tsresolvent.systems import build_system
from tsresolvent.transverse import (build_projector, reconstruct_response,
                                    resonant_full_forcing, transverse_svd)
from tsresolvent.validation import simulate_linearized, stroboscopic_series

sys_ = build_system("vdp")
base = vdp_orbit(sys_, 31)
pair = floquet_pair(base, sys_)
print(f"period T0 = {base.period:.8f}, collocation residual {base.collocation_residual_norm:.1e}")
print(f"neutral residual {pair.neutral_residual:.1e}, adjoint residual {pair.adjoint_residual:.1e}")
for re, count in floquet_exponent_ladders(base, sys_):
    print(f"  Floquet ladder Re(lambda) = {re:+.5f} ({count} eigenvalues)")

# sigma_min of L_TS collapses at omega_f = k omega0
print("\n ratio   sigma_min(L)   transverse gain   reconstructed gain")
for ratio in (0.5, 0.9, 1.0, 1.5, 2.0):
    op = assemble_tsr(base, sys_, ratio * base.omega0)
    P = build_projector(op, pair)
    st = transverse_svd(op, P)
    rec = reconstruct_response(op, pair, P, st)
    print(f" {ratio:4.1f}   {sigma_min_L(op):12.3e}   {st.gain:15.6f}   {rec.solution.gain:15.6f}")

# Stroboscopic view at resonance: sample c(t_k) once per period.
op = assemble_tsr(base, sys_, base.omega0)
P = build_projector(op, pair)
projected = transverse_svd(op, P).forcing_mode
unprojected = resonant_full_forcing(op, P)
t_end = 40 * base.period
for name, v in (("projected", projected), ("unprojected", unprojected)):
    res = simulate_linearized(sys_, base, op.input_map @ v, op.omega_f, t_end)
    s = stroboscopic_series(res, pair)
    print(f"\n{name} forcing: |dc/dk| = {abs(s.slope()):.3e} per period, "
          f"max |v_k| = {s.v_norm.max():.3f}")
    print("   k     Re c_k")
    for k in (0, 10, 20, 30, 40):
        print(f"  {k:3d}  {s.c[k].real:+.5f}")
