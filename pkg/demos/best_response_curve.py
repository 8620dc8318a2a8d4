"""Best-response policy of one device as the edge-server load rho grows."""

import numpy as np

from mecaoi.game import SolverConfig, TypeProfile
from mecaoi.solvers import mf_best_response

DEVICE = TypeProfile("device", 1.0, lam=1.0, V=10.0, eta=0.5, P_max=1.0, f_max=0.8)


def main():
    cfg = SolverConfig()
    print(f"{'rho':>5s} {'p':>7s} {'mu1':>7s} {'mu2':>7s} {'cost':>9s}")
    for rho in np.linspace(0, 1, 11):
        pol, cost = mf_best_response(DEVICE, rho, N=2, mu3=15.0, cfg=cfg)
        print(f"{rho:5.1f} {pol.p:7.4f} {pol.mu1:7.4f} {pol.mu2:7.4f} {cost:9.4f}")


if __name__ == "__main__":
    main()
