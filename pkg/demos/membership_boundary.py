"""Membership of |x|^mu near the origin across the critical smoothness.

Runs both characterizations of the weighted Besov norm for f_{0.5,0} and
prints verdicts on either side of s = mu + (n + alpha)/p = 1.
"""
from besovlab import SpaceParams
from besovlab.diagnostics import run_membership_experiment

FN = "f_power_log:mu=0.5,delta=0"

if __name__ == "__main__":
    print(f"{'s':>5} {'fourier':>20} {'differences':>20} {'predicted':>10}")
    for s in (0.6, 0.8, 1.0, 1.2, 1.4):
        cmp = run_membership_experiment(FN, SpaceParams(n=1, p=2, q=2, alpha=0, s=s), "both")
        fo, di = cmp.fourier.verdict, cmp.differences.verdict
        print(f"{s:5.2f} {fo.cls:>20} {di.cls:>20} {str(cmp.fourier.predicted):>10}")
