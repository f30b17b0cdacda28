"""The inflation signature: deviations that refuse to vanish with t.

For a datum whose map t -> u(t) were continuous into B^s at t = 0, the
deviation ||u(t) - u0||_{B^s} would go to 0 with t.  The constructed
datum breaks this: probing block j at its own time t_j = eps0 * 2^{-j}
finds an O(1) deviation at every scale, because the quadratic
interaction dumps energy into block j at rate 2^j, exactly cancelling
the shrinking time window.

This demo runs a reduced geometry (N = 2^18, packets up to n = 11) so it
finishes in a few seconds.  The top probed blocks sit close to the
packet cutoff and feel the truncation, so the deviation sags there; the
flat profile needs the full geometry quoted at the end.

Run with: python3 demos/05_inflation_signature.py
"""

from hks.construction import make_bump, make_initial_data
from hks.littlewood_paley import BesovParams
from hks.probe import INFLATION_MIN_RATIO, inflation_sweep
from hks.spectral import make_grid

g = make_grid(d=1, M=1, N=2**18)
data = make_initial_data(s=2.0, n_max=11, bump=make_bump(1, g), grid=g)
sweep = inflation_sweep(data, BesovParams(s=2.0, p=2.0), eps0=2.0,
                        j_range=range(5, 8))

print(f"datum norm ||u0||_{{B^2}} = {sweep.u0_norm:.4f}\n")
print("per-block probes (eps0 = 2):")
print("  j    t_j        dev_s      block j part   t*||v0_j|| part")
for r in sweep.records:
    print(f"  {r.j}    {r.t:.6f}   {r.dev_s:8.4f}   {r.block_j:11.4f}"
          f"    {r.tv0_block_j:11.4f}")

t0, t2 = sweep.records[0].t, sweep.records[-1].t
print(f"\n  t shrinks by {t0 / t2:.0f}x across the sweep; the deviation "
      f"only drops {sweep.max_dev / sweep.min_dev:.1f}x.")
print(f"  min/max deviation ratio: {sweep.ratio:.3f} "
      f"(flatness bar: {INFLATION_MIN_RATIO})")
print(f"  floor: min_dev = {sweep.min_dev:.2f} "
      f"vs 1% of ||u0|| = {0.01 * sweep.u0_norm:.2f}")
print(f"  solution norm growth kappa = {sweep.kappa:.4f}: the solution "
      f"itself stays bounded")
print(f"  passed at this reduced geometry: {sweep.passed}")

print("""
The sag toward j = 7 is a truncation artefact: block j draws its
deviation from the packets above it, so what matters is the headroom
n_max - j, and n_max = 11 leaves blocks 6 and 7 short of it.  At the
full geometry (N = 2^20, n_max = 13) the same sweep over j = 5..8 gives
deviations 52.3, 52.4, 52.4, 41.9 with ratio 0.80, comfortably flat.
Reproduce it with (about two minutes):

  hks probe inflation --n 1048576 --nmax 13 --jmin 5 --jmax 8 \\
      --eps0 2.0 --outdir runs/inflation
""")
