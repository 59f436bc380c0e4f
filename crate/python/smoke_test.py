"""Smoke test for the awgn_exponent_py extension.

Imports an installed build if one exists (``maturin develop -m crates/python/Cargo.toml``);
otherwise loads the shared library from ``target/{release,debug}`` after ``cargo build -p awgn-exponent-py``.
"""

import importlib.machinery
import importlib.util
import json
import math
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import awgn_exponent_py

        return awgn_exponent_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libawgn_exponent_py.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("awgn_exponent_py", str(lib))
            spec = importlib.util.spec_from_file_location("awgn_exponent_py", lib, loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("awgn_exponent_py not found; run `cargo build -p awgn-exponent-py --release` first")


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b}"


def main():
    m = load()
    ch = m.Channel(1.0)
    pb = m.PowerBudget(1.0)

    close(m.capacity(pb, ch), 0.5 * math.log(2.0), 1e-15)
    close(m.nu_zero(pb, ch), (math.sqrt(5.0) - 1.0) / 2.0, 1e-15)

    rate, g, rho = m.parametric_point(0.3, pb, ch)
    close(rate, 0.663603, 1e-6)
    close(g, 0.097148, 1e-6)
    close(rho, 0.530769, 1e-6)

    s = m.exponent_solution(rate, pb, ch)
    close(s.nu, 0.3, 1e-9)
    assert not s.below_capacity
    assert m.exponent_solution(0.3, pb, ch).below_capacity

    for route in (m.optimize_rho_nu, m.g_dk, m.g_oh_numeric):
        close(route(rate, pb, ch), g, 1e-4)

    try:
        m.PowerBudget(0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("zero power accepted")

    cb = m.Codebook.random(8, 0.6, 1.0, pb, 3)
    assert len(cb) == math.ceil(math.exp(8 * 0.6) - 1e-9)
    assert all(sum(x * x for x in cb.codeword(k)) <= 8.0 + 1e-9 for k in range(len(cb)))
    r1 = m.simulate_correct_probability(cb, ch, 2000, 11)
    r2 = m.simulate_correct_probability(cb, ch, 2000, 11)
    assert r1.to_json() == r2.to_json()
    assert 0 < r1.correct <= 2000
    assert list(json.loads(r1.to_json())) == [
        "n", "rate_nats", "trials", "correct", "p_c_hat", "std_err", "measured_exponent", "seed"
    ]

    report = json.loads(m.run_crosscheck(ratios=[1.0], rates_per_ratio=2, samples=2))
    assert report["passed"], report

    print("smoke test passed")


if __name__ == "__main__":
    main()
