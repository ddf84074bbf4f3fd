"""Fit the intercept of the point-source attenuation to a target median PGA.

    ln PGA = beta0 + beta1 (Mw - 6) - beta2 ln(R_hyp + c_near)

beta1, beta2 and c_near are held fixed; beta0 is solved so that the median
PGA at the reference magnitude and hypocentral distance equals the target.
The bundled Gilroy-like config uses the defaults below (0.40 g at 12 km for
Mw 6.9). Example:

    python scripts/fit_attenuation.py --target-g 0.40 --mw 6.9 --r-hyp 12
"""
import argparse
import math


def fit_beta0(target_g, mw, r_hyp, beta1, beta2, c_near):
    return math.log(target_g) - beta1 * (mw - 6.0) + beta2 * math.log(r_hyp + c_near)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--target-g", type=float, default=0.40)
    ap.add_argument("--mw", type=float, default=6.9)
    ap.add_argument("--r-hyp", type=float, default=12.0)
    ap.add_argument("--beta1", type=float, default=0.5)
    ap.add_argument("--beta2", type=float, default=1.0)
    ap.add_argument("--c-near", type=float, default=6.0)
    args = ap.parse_args(argv)
    b0 = fit_beta0(args.target_g, args.mw, args.r_hyp, args.beta1, args.beta2, args.c_near)
    print(f"beta0 = {b0:.6f}")
    return b0


if __name__ == "__main__":
    main()
