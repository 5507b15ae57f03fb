"""Smoke test for the pyvortexpatch extension.

Build and install first:  pip install --no-build-isolation ./crates/python
Then run:                  python python/smoke_test.py
"""

import math
import pathlib
import tempfile

import pyvortexpatch as vp

ROOT = pathlib.Path(__file__).resolve().parent.parent


def check(label, ok):
    print(f"{'pass' if ok else 'FAIL'} {label}")
    if not ok:
        raise SystemExit(1)


def main():
    disk = vp.Contour.circle(1.0, 32)
    check("circle area", abs(disk.area() - math.pi) < 1e-12)

    # Rankine: u = (-y, x) / 2 inside a unit-strength disk
    u = disk.velocity(0.3, 0.4)
    check("rankine velocity", abs(u[0] + 0.2) < 1e-10 and abs(u[1] - 0.15) < 1e-10)

    last, series = disk.evolve(0.5, dt=0.025, monitor_f=True)
    check("stationary circle", last.hausdorff_distance(disk) < 1e-8)
    check("monitor series", {"1/chord_arc", "sobolev_norm", "grad_sup"} <= set(series))

    wavy = vp.Contour.perturbed([(3, 0.1)], 16)
    check("disk map boundary", wavy.hausdorff_distance(vp.Contour.from_points(
        [vp.disk_map(wavy).evaluate(1.0, 2 * math.pi * j / 64) for j in range(64)], 16)) < 1e-8)
    ring = vp.annulus_map(wavy)
    check("annulus map orientation", ring.jacobian_det(1.0, 0.3) > 0.0)

    ratios = vp.gain_ratios(3, 3, 64, 7)
    check("gain ratios finite", len(ratios) == 3 and all(r > 0 for r in ratios))

    study = vp.manufactured_study("kinked", [0.2, 0.1, 0.05], 1)
    check("p1 study rows", len(study["rows"]) == 3 and study["l2_rate"] > 1.5)

    differences, _ = vp.evolve3d(
        'grid = 16\nell = 3.141592653589793\nhorizon = 0.2\nlevels = 2\ntol = 1e-10\n'
        '[preset]\nkind = "ball"\nradius = 1.5\nstrength = 0.0\n')
    check("zero vorticity fixed point", len(differences) <= 1 and all(d == 0.0 for d in differences))

    run = vp.run_scenario(str(ROOT / "scenarios" / "biot-savart-oracle.toml"))
    check("scenario run", run.passed and run.metrics()["velocity_oracle_error"] < 1e-6)
    with tempfile.TemporaryDirectory() as tmp:
        written = run.write(tmp)
        check("outputs written", any(str(p).endswith("report.json") for p in written))


if __name__ == "__main__":
    main()
