"""Calibrate sparse mixture models and compare their thresholds.

Walks the core objects: a Subbotin shape, a calibrated scale/location
model, the Bayes threshold, the BFDR threshold at a chosen level, and
the optimal level that makes the two coincide.
"""

from fdrthresh import (
    CanonicalParams,
    Family,
    Kind,
    alpha_opt,
    bfdr_of,
    bfdr_threshold,
    calibrate,
    q_opt,
    risk_det,
)


def main() -> None:
    # A Laplace scale mixture tuned so the Bayes rule has power 1/2 when
    # alternatives are half as common as nulls (tau = 2).  The calibrated
    # stretch lands at sigma = 4.
    model = calibrate(Kind.SCALE, 1.0, CanonicalParams(power=0.5, tau=2.0))
    print("Laplace scale model, C = 0.5, tau = 2")
    print(f"  calibrated sigma        = {model.effect:.12f}")
    print(f"  Bayes threshold t^B     = {model.bayes_threshold:.12f}")
    print(f"  power at t^B            = {model.power:.12f}")
    print(f"  Bayes risk              = {risk_det(model, model.bayes_threshold):.12f}")

    # The BFDR of the Bayes threshold defines the optimal level: running
    # the BFDR rule at alpha = 1/(1 + q_opt) reproduces t^B exactly.
    q = q_opt(model)
    alpha_star = 1.0 / (1.0 + q)
    t_star = bfdr_threshold(model, alpha_star).value
    print(f"  q_opt (= sigma here)    = {q:.12f}")
    print(f"  optimal level           = {alpha_star:.12f}")
    print(f"  BFDR threshold there    = {t_star:.12f}")
    print(f"  BFDR at t^B             = {bfdr_of(model, model.bayes_threshold):.12f}")

    # At any other level the BFDR threshold moves off the optimum and the
    # risk goes up; the excess is the price of the wrong level.
    bayes = risk_det(model, model.bayes_threshold)
    print("\n  level ->  threshold,  relative excess risk")
    for alpha in (0.05, 0.1, alpha_star, 0.4):
        t = bfdr_threshold(model, alpha).value
        excess = (risk_det(model, t) - bayes) / bayes
        print(f"  {alpha:.3f} -> {t:.6f},  {excess:.6f}")

    # The same machinery for a Gaussian location family in the sparse
    # regime tau = m**beta; alpha_opt has a closed form per family.
    m = 10**6
    level = alpha_opt(Family.GAUSSIAN_LOCATION, m, 0.5, 0.5)
    gauss = calibrate(Kind.LOCATION, 2.0, CanonicalParams(power=0.5, beta=0.5), m)
    print(f"\nGaussian location model, beta = 0.5, C = 0.5, m = {m}")
    print(f"  calibrated shift mu     = {gauss.effect:.12f}")
    print(f"  optimal level           = {level:.6f}")


if __name__ == "__main__":
    main()
