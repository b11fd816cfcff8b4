"""Run the quick certification steps and print their key enclosures."""
from __future__ import annotations

from fcert.certify import box_enclosures, certify_gamma_bounds, certify_hessian, certify_initial_interval, certify_sweep
from fcert.functional import bundled_manifest


def main() -> None:
    rep = certify_gamma_bounds()
    gc = rep.enclosure("gamma_crit")
    print(f"gamma bracket: {rep.verdict}, gamma_crit in [{gc.lo!r}, {gc.hi!r}]")

    rep = certify_initial_interval()
    print(f"beta in [0, .001]: {rep.verdict}, integral bound {rep.enclosure('integral_of_derivative_bound').hi:.3e}")

    for name, iv in box_enclosures().items():
        print(f"box enclosure {name}: [{iv.lo:.5f}, {iv.hi:.5f}]")

    rep = certify_hessian()
    print(f"Hessian: {rep.verdict}, delta = {rep.details['delta']:.4f}")

    plans = bundled_manifest("b3-smoke")[:5]
    rep = certify_sweep(plans, "0.2484195", claim_id="claim-b3")
    print(f"5 segments near beta = 1/2: {rep.verdict}, worst bound {rep.enclosure('worst_bound').hi:.3e}")


if __name__ == "__main__":
    main()
