"""Regularity scan of an oscillating function.

For f = |x|^delta g(|x|^-beta) the statistic sup_t t^-sigma ||d^2_t f|| stays
bounded up to sigma* = (delta + (n + alpha)/p)/(beta + 1).
"""
import numpy as np

from besovlab import SpaceParams
from besovlab.diagnostics import critical_sigma, run_regularity_scan

if __name__ == "__main__":
    for delta, beta in ((1.0, 1.0), (0.5, 2.0)):
        fn = f"f_oscillatory:delta={delta},beta={beta},mu=0.5"
        grid = np.round(np.arange(0.05, 1.96, 0.05), 10)
        scan = run_regularity_scan(fn, SpaceParams(p=2, alpha=0), grid, 2)
        star = (delta + 0.5) / (beta + 1)
        print(f"{fn}: crossing at {critical_sigma(scan):.3f}, predicted {star:.3f}")
