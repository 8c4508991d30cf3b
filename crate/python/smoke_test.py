"""Smoke test for the lls_lab extension module.

Build and install first, e.g. `pip install ./crates/py --no-build-isolation`
(needs maturin), or see README for the cargo-only route.
"""

import json
import math
import pathlib
import sys
import tempfile

import lls_lab


def main() -> int:
    g = lls_lab.Grid(3, 8, 2 * math.pi)
    assert len(g) == 512

    u = lls_lab.ComplexField.band_limited(g, 1, 0.5, 3.0, 0.2)
    assert abs(u.max_abs() - 0.2) < 1e-12

    # chart round trip
    m = u.unproject()
    assert m.max_sphere_deviation() < 1e-14
    back = m.project()
    err = max(abs(a - b) for a, b in zip(back.values(), u.values()))
    assert err < 1e-12, err

    # semigroup law
    a = u.semigroup(0.01, 0.1).semigroup(0.02, 0.1)
    b = u.semigroup(0.03, 0.1)
    assert max(abs(x - y) for x, y in zip(a.values(), b.values())) < 1e-12

    m1 = lls_lab.lls_evolve(m, 0.1, 1e-3, 0.01, v=[0.05, 0.0, 0.0])
    assert m1.max_sphere_deviation() < 1e-9

    slices, report = lls_lab.picard_solve(
        lls_lab.ComplexField.band_limited(g, 2, 0.5, 3.0, 1e-3), 0.1, 0.05, 64
    )
    assert len(slices) == 64 and report["converged"], report

    norms = lls_lab.free_wave_norms(u, 0.1, 0.1, 64, ["F", "Z"])
    assert all(math.isfinite(v) and v > 0 for v in norms.values()), norms

    try:
        lls_lab.Grid(3, 12, 1.0)
    except lls_lab.LabError:
        pass
    else:
        raise AssertionError("non power-of-two grid accepted")

    with tempfile.TemporaryDirectory() as d:
        cfg = pathlib.Path(d) / "picard.toml"
        cfg.write_text('experiment = "picard"\n[grid]\nn = 8\n')
        manifest = lls_lab.run_config(str(cfg), str(pathlib.Path(d) / "out"))
        assert manifest["status"] == "ok" and "picard.json" in manifest["files"]
        print(json.dumps({k: manifest[k] for k in ("experiment", "seed", "status")}))

    print("lls_lab smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
