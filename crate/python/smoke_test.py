"""Smoke test for the revivalkit Python bindings.

Build and install first:  pip install --no-build-isolation -e crates/py
"""

import math

import revivalkit as rk


def main():
    # Gauss coefficients: p/q = 1/4 has period 2 and two equal weights
    ell, b, _ = rk.gauss_coefficients(1, 4)
    assert ell == 2 == rk.minimal_period(1, 4)
    law = rk.modulus_law(1, 4)
    assert all(abs(abs(c) ** 2 - w) < 1e-14 for c, w in zip(b, law))
    assert abs(sum(abs(c) ** 2 for c in b) - 1.0) < 1e-14
    try:
        rk.gauss_coefficients(2, 4)
    except ValueError:
        pass
    else:
        raise AssertionError("non-coprime pair accepted")

    # model spectrum: alpha and beta levels interleave around the saddle
    model = rk.SpectralModel(1e-4)
    alphas = model.levels("alpha")
    betas = model.levels("beta")
    assert alphas and betas
    assert model.count() >= 2
    merged = model.merged()
    assert merged == sorted(merged)

    # packet and revival data at h = 1e-4
    spec = rk.PacketSpec(1e-4, energy=0.0)
    run = rk.RevivalRun(spec)
    assert abs(run.norm_squared() - 1.0) < 1e-6
    # |T_hyp| grows like |ln h| / omega plus an O(1) offset
    log_h = -math.log(1e-4)
    assert log_h / math.sqrt(2) < abs(run.t_hyp) < 2 * log_h
    grid = run.hyperbolic_grid(min(3 * abs(run.t_hyp), run.order1_limit))
    c = [abs(z) for z in run.exact_return(grid)]
    a1 = [abs(z) for z in run.order1(grid)]
    assert abs(c[0] - 1.0) < 1e-6 and max(c) <= 1.0 + 1e-9
    closed = run.closed_form(grid)
    assert max(abs(x - y) for x, y in zip(a1, closed)) < 1e-8

    # fractional revival at p/q = 1/2; only approximate here since the
    # revival ratio is not an integer at this h
    short = grid[:64]
    lhs, rhs, sup = run.fractional(short, 1, 2)
    assert len(lhs) == len(rhs) == 64 and 0.0 <= sup <= 2.0

    # far below double precision, through log_h
    deep = rk.RevivalRun(rk.PacketSpec(log_h=400.0))
    assert deep.t_rev != 0.0 and math.isfinite(deep.t_rev)

    print(
        "revivalkit ok: T_hyp = %.4f, T_rev = %.2f, N_h = %d, |c(T_hyp)| = %.3f"
        % (run.t_hyp, run.t_rev, run.n_h, c[64])
    )


if __name__ == "__main__":
    main()
