"""Exact FDR risk, the rejection-count law, and the risk bounds.

Shows the exact finite-sample risk of the step-up rule (computed through
Steck's order-statistic recursion), the distribution of the number of
rejections it is built from, and how the closed-form excess-risk bounds
frame the truth.
"""

import numpy as np

from fdrthresh import (
    CanonicalParams,
    Kind,
    bfdr_excess_bound,
    bfdr_ratio_floor,
    bfdr_threshold,
    calibrate,
    exact_fdr_risk,
    explicit_excess_bound,
    fdr_excess_bound,
    rejection_count_distribution,
    risk_det,
)


def main() -> None:
    model = calibrate(Kind.SCALE, 1.0, CanonicalParams(power=0.5, tau=2.0))
    bayes = risk_det(model, model.bayes_threshold)
    alpha = 0.2

    print("Laplace scale model (sigma = 4, tau = 2), alpha = 0.2")
    print(f"  Bayes risk                  = {bayes:.10f}")

    # The exact risk of the FDR pipeline for a few sample sizes; the
    # excess shrinks as m grows and the threshold concentrates.
    print("\n  m -> exact FDR risk, relative excess")
    for m in (1, 3, 10, 100, 1000):
        report = exact_fdr_risk(model, m, alpha)
        print(f"  {m:5d} -> {report.risk:.10f}, {report.excess_rel:.6f}")

    # The risk formula averages over the law of the rejection count; the
    # probabilities sum to one, giving a built-in consistency check.
    m = 10
    pmf = rejection_count_distribution(model, m, alpha)
    print(f"\n  rejection-count law at m = {m}: sum = {pmf.sum():.12f}")
    print("  k:", " ".join(f"{k}:{p:.4f}" for k, p in enumerate(pmf) if p > 5e-4))

    # Upper and lower bounds around the BFDR excess, plus the FDR bound
    # and the fully explicit variants where their conditions admit them.
    m = 100
    t_star = bfdr_threshold(model, alpha).value
    excess_bfdr = risk_det(model, t_star) - bayes
    excess_fdr = exact_fdr_risk(model, m, alpha).risk - bayes
    print(f"\nBounds at m = {m}, alpha = {alpha}")
    print(f"  BFDR excess (absolute)      = {excess_bfdr:.3e}")
    print(f"  BFDR upper bound            = {bfdr_excess_bound(model, alpha):.3e}")
    ratio = risk_det(model, t_star) / bayes
    print(f"  BFDR risk ratio             = {ratio:.6f}")
    print(f"  ratio floor                 = {bfdr_ratio_floor(model, alpha):.6f}")
    print(f"  FDR excess (absolute)       = {excess_fdr:.3e}")
    print(f"  FDR upper bound             = {fdr_excess_bound(model, m, alpha):.3e}")
    for which in ("bfdr", "fdr"):
        value = explicit_excess_bound(model, m, alpha, which)
        shown = "not applicable" if value is None else f"{value:.3e}"
        print(f"  explicit {which:4s} bound         = {shown}")

    # Monotonicity of the exact risk in alpha, on a coarse scan.
    alphas = np.linspace(0.05, 0.45, 9)
    risks = [exact_fdr_risk(model, 25, a).risk for a in alphas]
    best = alphas[int(np.argmin(risks))]
    print(f"\n  best fixed level on a coarse scan at m = 25: alpha ~ {best:.2f}")


if __name__ == "__main__":
    main()
