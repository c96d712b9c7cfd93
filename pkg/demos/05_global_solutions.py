"""
Small data, supercritical power: solutions decay
================================================

For p = 3 and small eps the run reaches the horizon, and the weighted
norms that the a priori estimate controls stay bounded. A larger eps blows
up instead.
"""
from exterior_dw import EvolutionConfig, detect_blowup, global_decay_report, semilinear_evolve
from exterior_dw.semilinear import default_data

g = default_data(a=3.0, dr=0.05)
cfg = EvolutionConfig(dt=None)

run = semilinear_evolve(g, 0.1, 3.0, 300.0, cfg)
print("eps = 0.1:", run.status.name, "at t =", run.t_end)
rep = global_decay_report(run, t_early=10.0)
for name, (early, late) in rep.early_late.items():
    print(f"  {name:<7s} t=10: {early:.4e}   t={rep.t_late:g}: {late:.4e}")
print("  weighted ratios stay bounded:", rep.passed)

big = semilinear_evolve(g, 100.0, 3.0, 50.0, cfg)
dec = detect_blowup(big)
print(f"\neps = 100: {big.status.name}, crossing at t = {dec.t_cross:.4f}, refined {dec.t_cross_refined:.4f}")
