#!/usr/bin/env python3
"""Build the ucjt_py extension and exercise its surface end to end.

Run from anywhere:

    python3 python/smoke_test.py

The script compiles the cdylib with cargo, stages it under a temporary
directory as an importable module, and checks the bound functions against
known values of the default operating point.
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

WORKSPACE = Path(__file__).resolve().parents[1]


def build_extension() -> Path:
    subprocess.run(
        ["cargo", "build", "-p", "ucjt-py"],
        cwd=WORKSPACE,
        check=True,
    )
    lib = WORKSPACE / "target" / "debug" / "libucjt_py.so"
    if not lib.exists():  # e.g. macOS artifact name
        lib = WORKSPACE / "target" / "debug" / "libucjt_py.dylib"
    if not lib.exists():
        sys.exit("extension library not found under target/debug/")
    return lib


def stage_module(lib: Path, stage_dir: Path) -> None:
    shutil.copy2(lib, stage_dir / "ucjt_py.so")
    sys.path.insert(0, str(stage_dir))


def approx(actual: float, expected: float, rel: float) -> None:
    assert math.isfinite(actual), f"non-finite value {actual}"
    err = abs(actual - expected) / abs(expected)
    assert err <= rel, f"{actual} vs {expected}: relative error {err:.2e} > {rel:.0e}"


def main() -> None:
    lib = build_extension()
    with tempfile.TemporaryDirectory() as stage:
        stage_module(lib, Path(stage))
        import ucjt_py

        net = ucjt_py.Network()
        print(f"default operating point: {net!r}")
        approx(net.lambda_r_per_m2, 5e-5, 0.0)
        approx(net.cell_radius_m, 200.0, 0.0)
        approx(net.tx_power_w, 10 ** (24 / 10) * 1e-3, 1e-12)

        # Closed forms at the default point.
        approx(net.scheduling_probability(), 0.0994675569477676, 1e-12)
        approx(
            ucjt_py.scheduling_probability(2e-5, 100.0), 0.742476763140869, 1e-12
        )
        assert net.path_gain(5.0) == net.path_gain(10.0), "gain clamps below d0"
        approx(net.path_gain(100.0), 100.0 ** -3.6, 1e-12)
        approx(ucjt_py.mean_signal_power(net), 8.83687159486617e-6, 1e-12)

        # Quadrature building blocks against pinned values.
        approx(ucjt_py.laplace_signal(net, 1e7), 0.17323603164912612, 1e-6)
        approx(ucjt_py.weight_moment(net, 100.0), 0.18503210404981332, 1e-6)

        # Throughput engines: the far-field bound sits a few percent above
        # the full transform result, and seeded Monte Carlo agrees with it.
        tau_far = ucjt_py.tau_farfield(net)
        approx(tau_far, 1.0132958e8, 1e-4)
        tau = ucjt_py.tau_analytic(net, rtol=1e-4)
        approx(tau, 9.98126e7, 5e-3)
        assert tau_far > tau, "far-field form must upper-bound the full model"
        eta = ucjt_py.eta_analytic(net, rtol=1e-4)
        approx(eta, 2e-5 * net.scheduling_probability() * tau, 1e-12)

        assert ucjt_py.scheme_names() == ["mrt", "ncjt", "maxsnr", "nearest"]
        runs = ucjt_py.simulate_throughput(
            net, ["mrt", "nearest"], drops=200, fadings=20, seed=42
        )
        (mrt_name, mrt_mean, mrt_ci), (near_name, near_mean, _) = runs
        assert (mrt_name, near_name) == ("mrt", "nearest")
        assert abs(mrt_mean - tau) < 4 * mrt_ci, (
            f"Monte Carlo {mrt_mean:.4e} +- {mrt_ci:.1e} vs transform {tau:.4e}"
        )
        assert mrt_mean > near_mean, "joint transmission beats nearest-only"
        print(
            f"tau: transform {tau:.4e}, far-field {tau_far:.4e}, "
            f"Monte Carlo {mrt_mean:.4e} +- {mrt_ci:.1e} bit/s"
        )

        # Error mapping.
        for bad in (lambda: ucjt_py.Network(alpha=2.0),
                    lambda: ucjt_py.simulate_throughput(net, ["bogus"])):
            try:
                bad()
            except ValueError:
                pass
            else:
                raise AssertionError("expected ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
