"""A smooth function whose square root leaves the space.

f(x) = x theta(|x|) is smooth, while |f|^0.5 behaves like |x|^0.5 at the
origin.  Above s = mu + (1 + alpha)/p the pair (finite, divergent) appears.
"""
from besovlab import SpaceParams
from besovlab.diagnostics import run_composition_experiment

if __name__ == "__main__":
    for alpha in (0.0, 0.5):
        for s in (0.9, 1.25, 1.5):
            rep = run_composition_experiment("f_linear_cutoff", SpaceParams(p=2, q=2, alpha=alpha, s=s), 0.5)
            print(f"alpha={alpha:.1f} s={s:.2f}  f finite={rep.f.verdict.finite!s:5}  "
                  f"|f|^0.5 finite={rep.composed.verdict.finite!s:5}  "
                  f"slope vs log2 t={rep.composed.slope_vs_scale:+.3f}  signature={rep.signature}")
