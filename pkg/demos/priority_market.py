"""Priority access: a primary device sells transmitter time to secondaries."""

from mecaoi.game import DevicePolicy, PrimaryProfile, SolverConfig, TypeProfile
from mecaoi.solvers import mm_mfe_solve, solo_primary

PRIMARY = PrimaryProfile(lam_P=2.0, V=10.0, eta=0.5, P_max=2.0, f_max=0.5)
SECONDARY = TypeProfile("s", 1.0, lam=1.0, V=10.0, eta=0.5, P_max=0.0, f_max=0.7)


def main():
    cfg = SolverConfig(multi_start=4)
    solo, cost = solo_primary(PRIMARY, 15.0, cfg)
    print(f"primary alone: {solo}, cost {cost:.4f}")
    for alpha in (0.0, 1.0, 5.0):
        r = mm_mfe_solve(PRIMARY, [SECONDARY], 30, alpha, 15.0, cfg,
                         init_primary=DevicePolicy(.5, .6, .3), init_secondary=[DevicePolicy(.5, None, .2)])
        print(f"alpha={alpha}: primary {r.primary}, secondary {r.policies[0]}, rho={r.rho:.4g}, "
              f"t_TP1={r.extras['t_TP1']:.4f}, t_TP2={r.extras['t_TP2']:.4f}, converged={r.converged}")


if __name__ == "__main__":
    main()
