"""Mean-field equilibrium against best-response dynamics in the finite game."""

import math

from mecaoi.game import SolverConfig, TypeProfile
from mecaoi.solvers import finite_game_costs, mfe_solve, nash_solve

DEVICE = TypeProfile("device", 1.0, lam=1.0, V=10.0, eta=0.5, P_max=1.0, f_max=0.8)
MU3 = 15.0


def main():
    cfg = SolverConfig(multi_start=4)
    for N in (10, 30):
        mfe = mfe_solve([DEVICE], N, MU3, cfg)
        ne = nash_solve([DEVICE] * N, MU3, cfg)
        ne_cost = math.fsum(c.total for c in ne.costs) / N
        mf_cost = math.fsum(c.total for c in finite_game_costs([DEVICE] * N, list(mfe.policies) * N, MU3)) / N
        print(f"N={N}: MFE policy {mfe.policies[0]}, rho={mfe.rho:.5f}")
        print(f"      NE cost {ne_cost:.6f}, MFE policy in the finite game {mf_cost:.6f}, "
              f"gap {abs(mf_cost - ne_cost) / ne_cost:.2e}")


if __name__ == "__main__":
    main()
