"""Analytic average AoI against the discrete-event simulator at one point per model."""

from mecaoi.models import EquitableRates, PrimaryRates, SecondaryRates, equitable_aoi, primary_aoi, secondary_aoi
from mecaoi.sim import NetworkSpec, horizon_for, simulate

CASES = [
    ("equitable", "equitable-faithful", EquitableRates(10, .5, 1, .8, 15, 5), equitable_aoi),
    ("primary", "priority-faithful", PrimaryRates(2, .5, 1, .5, 15), primary_aoi),
    ("secondary", "priority-faithful", SecondaryRates(2, .3, 1, 3, 5, 1, 1), lambda r: secondary_aoi(r, "exact")),
]


def main():
    print(f"{'model':10s} {'analytic':>10s} {'simulated':>10s} {'3-sigma':>9s} {'z':>6s}")
    for name, topo, rates, analytic in CASES:
        spec = NetworkSpec(topo, [rates], 1.0, seed=1)
        spec = NetworkSpec(topo, [rates], horizon_for(spec, 200_000), seed=1)
        est = simulate(spec)
        a = analytic(rates)
        z = (est.aoi[0] - a) / (est.ci3sigma[0] / 3)
        print(f"{name:10s} {a:10.5f} {est.aoi[0]:10.5f} {est.ci3sigma[0]:9.5f} {z:6.2f}")


if __name__ == "__main__":
    main()
