"""Complex Ginzburg-Landau plane wave: transverse resolvent of a PDE orbit.

The 50-node periodic CGL plane wave is a limit cycle in a 100-dimensional
state space.  The transverse solve runs matrix-free: GMRES with a sixth-order
finite-difference preconditioner, wrapped in a randomized SVD.  The last step
drives the full nonlinear PDE with a tiny multiple of the optimal forcing and
checks that the perturbation is the linear prediction.

Run:  python demos/cgl_plane_wave.py   (about half a minute)
"""

import numpy as np

from tsresolvent.cli import Context, RunConfig, _prediction
from tsresolvent.floquet import slowest_decay_rate
from tsresolvent.validation import LinearizedDynamics, simulate_nonlinear

cfg = RunConfig(system="cgl", variant="reconstructed").resolved()
ctx = Context(cfg)
print(f"plane wave: omega0 = {ctx.omega0:.6f}, T0 = {ctx.base.grid.period:.4f}, "
      f"residual {ctx.base.collocation_residual_norm:.1e}")

for ratio in (0.3, 0.7, 1.0, 1.4):
    sol, op, extras = ctx.solve(ratio * ctx.omega0, "reconstructed")
    info = sol.info
    print(f"ratio {ratio:3.1f}: G_transverse {extras['transverse_gain']:9.4f}, "
          f"G_rec {sol.gain:9.4f}, GMRES iterations {info['gmres_iterations']}")

# Nonlinear check at 0.7 omega0
ratio, eps = 0.7, 1e-3
wf = ratio * ctx.omega0
sol, op, extras = ctx.solve(wf, "reconstructed")
settle = 30.0 / slowest_decay_rate(ctx.base, ctx.sys)
t = settle + np.linspace(0, 3 * ctx.base.grid.period, 300)
res = simulate_nonlinear(ctx.sys, ctx.base, op.input_map @ sol.forcing_mode, wf, eps, t[-1] + 1e-9)
pert = (res.dense(t).real - LinearizedDynamics(ctx.sys, ctx.base).state(t)) / eps
pred = _prediction(ctx, sol, extras["reconstruction"], wf, t)
err = np.linalg.norm(pert - pred) / np.linalg.norm(pred)
print(f"\nnonlinear PDE, eps = {eps}: relative field error {err:.2e}")
mid = ctx.sys.params.n_node // 2
print("trace at x = L/2 (simulated / predicted):")
for i in range(0, 300, 50):
    print(f"  t = {t[i]:8.2f}   {pert[i, mid]:+.5f}   {pred[i, mid]:+.5f}")
