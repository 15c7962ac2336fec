"""Quick end-to-end check of the Python bindings.

Build and install first, e.g. `maturin develop --release -m crates/python/Cargo.toml`.
"""

import math

import deficit_coverage as dc


def main():
    line1 = dc.Line(1.0, 0.5, dc.Claims.deterministic(1.0))
    line2 = dc.Line(1.0, 0.9, dc.Claims.deterministic(1.0))
    model = dc.Model(line1, line2, 1.1, 1.1)
    assert model.net_profit
    assert abs(line1.drift - 0.5) < 1e-12

    sim, se = model.survival(0.0, 0.0, n_paths=4000, seed=7)
    factors = dc.Factors.estimate(model, n_samples=4000, seed=7)
    via_plus, via_minus = dc.phi00(model, factors)
    for v in (sim, via_plus, via_minus):
        assert 0.2 < v < 0.36, v
    f_hat, f_se = dc.transform(model, factors, 2.0, 1.0)
    assert 0.0 < f_hat < 1.0 and f_se is not None

    note = dc.Model(dc.Line(1.0, 0.5, dc.Claims.exponential(1.0)), dc.Line(0.4), 1.5, 2.0)
    exact = dc.Factors.exact(note)
    assert not exact.is_sampled
    f1, none_se = dc.transform(note, exact, 1.0, 1.0)
    assert none_se is None and 0.0 < f1 < 1.0

    backed = dc.Model(dc.Line(0.4), dc.Line(1.0, 0.5, dc.Claims.exponential(1.0)), 2.0, 1.5)
    assert dc.Factors.exact(backed).minus("L", -1.0).real < 1.0

    uncoupled = dc.Model(line1, line2, math.inf, math.inf)
    assert abs(dc.transform(uncoupled, exact, 1.0, 1.0)[0] - (0.5 / line1.psi(1.0).real) * (0.1 / line2.psi(1.0).real)) < 1e-12

    checks = dc.validate(checks=[3, 5])
    assert all(passed for _, _, passed, _ in checks), checks

    try:
        dc.Model(line1, line2, 0.5, 1.1)
    except ValueError:
        pass
    else:
        raise AssertionError("r1 r2 < 1 accepted")

    print(f"phi(0,0): simulated {sim:.4f} +/- {se:.4f}, via_plus {via_plus:.4f}, via_minus {via_minus:.4f}")
    print("smoke test passed")


if __name__ == "__main__":
    main()
