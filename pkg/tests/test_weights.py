import numpy as np
import pytest

from conftest import random_cloud
from shtlab.errors import InputError
from shtlab.maximal import restricted_maximal
from shtlab.orlicz import Power, PowerLog, young_conjugate
from shtlab.space import ball_mask, ball_table
from shtlab.weights import (
    ainfty_exp,
    ainfty_fujii_wilson,
    ap_constant,
    bump_ap,
    constants_report,
    sawyer_constant,
    two_weight_ap,
    wp_constant,
)

ONES4 = np.ones(4)
ATOM4 = np.array([1.0, 1.0, 1.0, 9.0])


# ------------------------------------------------------------ oracles


def oracle_two_weight(space, w, sigma, p):
    best = 0.0
    for b in ball_table(space).balls:
        m = ball_mask(space, b)
        mu = space.mass[m].sum()
        best = max(
            best,
            (w * space.mass)[m].sum() / mu * ((sigma * space.mass)[m].sum() / mu) ** (p - 1),
        )
    return best


def oracle_fujii_wilson(space, w):
    best = 0.0
    for b in ball_table(space).balls:
        m = ball_mask(space, b)
        wb = (w * space.mass)[m].sum()
        if wb == 0:
            continue
        r = restricted_maximal(space, w, b)
        best = max(best, (r * space.mass)[m].sum() / wb)
    return best


def oracle_sawyer(space, w, sigma, p):
    best = 0.0
    for b in ball_table(space).balls:
        m = ball_mask(space, b)
        sb = (sigma * space.mass)[m].sum()
        if sb == 0:
            continue
        r = restricted_maximal(space, sigma, b)
        best = max(best, ((r**p * w * space.mass)[m].sum() / sb) ** (1.0 / p))
    return best


def oracle_bump_power(space, w, sigma, p, q):
    # closed-form power Luxemburg norms
    pc = p / (p - 1.0)
    best = 0.0
    g = sigma ** (1.0 / pc)
    for b in ball_table(space).balls:
        m = ball_mask(space, b)
        mu = space.mass[m].sum()
        norm = ((g[m] ** q * space.mass[m]).sum() / mu) ** (1.0 / q)
        best = max(best, (w * space.mass)[m].sum() / mu * norm**p)
    return best


# ------------------------------------------------------------ A_p family


def test_ap_ones(line4):
    assert ap_constant(line4, ONES4, 2.0) == 1.0
    assert ap_constant(line4, ONES4, 1.5) == 1.0


def test_ap_requires_positive(line4):
    with pytest.raises(InputError, match="strictly positive"):
        ap_constant(line4, np.array([1.0, 0.0, 1.0, 1.0]), 2.0)


def test_ap_atom_weight_against_two_weight_dual(line4):
    # [w]_Ap equals the two-weight constant against sigma = w**(1-p')
    p = 2.0
    sigma = ATOM4 ** (1.0 - 2.0)
    assert ap_constant(line4, ATOM4, p) == pytest.approx(
        oracle_two_weight(line4, ATOM4, sigma, p), rel=1e-12
    )


def test_two_weight_examples(line4):
    assert two_weight_ap(line4, ONES4, ONES4, 2.0) == 1.0
    assert two_weight_ap(line4, ATOM4, ONES4, 2.0) == 9.0
    sparse = np.array([0.0, 0.0, 0.0, 1.0])
    val = two_weight_ap(line4, ONES4, sparse, 2.0)
    assert np.isfinite(val)


def test_two_weight_matches_oracle_random():
    rng = np.random.default_rng(8)
    for _ in range(6):
        sp = random_cloud(rng, int(rng.integers(3, 9)))
        w = 10.0 ** rng.uniform(-1, 1, sp.n)
        s = 10.0 ** rng.uniform(-1, 1, sp.n)
        p = float(rng.choice([1.2, 1.5, 2.0, 3.0]))
        assert two_weight_ap(sp, w, s, p) == pytest.approx(
            oracle_two_weight(sp, w, s, p), rel=1e-12
        )


# ------------------------------------------------------------ A_infty


def test_fujii_wilson_examples(line4, one_point):
    assert ainfty_fujii_wilson(line4, ONES4) == 1.0
    assert ainfty_fujii_wilson(one_point, np.array([2.0])) == 1.0
    assert ainfty_fujii_wilson(line4, ATOM4) == pytest.approx(
        oracle_fujii_wilson(line4, ATOM4), rel=1e-12
    )


def test_fujii_wilson_at_least_one(line4):
    rng = np.random.default_rng(4)
    for _ in range(5):
        w = 10.0 ** rng.uniform(-1, 1, 4)
        assert ainfty_fujii_wilson(line4, w) >= 1.0 - 1e-12


def test_ainfty_exp(line4, two_point):
    assert ainfty_exp(line4, np.full(4, 3.0)) == pytest.approx(1.0, rel=1e-12)
    w = np.array([np.e, 1.0 / np.e])
    assert ainfty_exp(two_point, w) == pytest.approx(np.cosh(1.0), rel=1e-12)
    with pytest.raises(InputError):
        ainfty_exp(line4, np.array([1.0, 0.0, 1.0, 1.0]))
    assert ainfty_exp(line4, ATOM4) >= 1.0


# ------------------------------------------------------------ bump / Wp


def test_bump_reduces_to_two_weight(line4):
    sigma = np.array([1.0, 1.0, 1.0, 9.0])
    for p in (1.5, 2.0, 3.0):
        got = bump_ap(line4, ATOM4, sigma, p, Power(p / (p - 1.0)))
        assert got == pytest.approx(two_weight_ap(line4, ATOM4, sigma, p), rel=1e-9)


def test_bump_ones(line4):
    assert bump_ap(line4, ONES4, ONES4, 2.0, Power(2)) == pytest.approx(1.0, rel=1e-9)


def test_bump_line4_power4_oracle(line4):
    sigma = np.array([1.0, 1.0, 1.0, 9.0])
    got = bump_ap(line4, ONES4, sigma, 2.0, Power(4))
    assert got == pytest.approx(oracle_bump_power(line4, ONES4, sigma, 2.0, 4.0), rel=1e-9)


def test_bump_monotone_in_exponent(line4):
    sigma = np.array([2.0, 0.5, 1.0, 4.0])
    vals = [bump_ap(line4, ATOM4, sigma, 2.0, Power(q)) for q in (1.5, 2.0, 4.0, 8.0)]
    assert all(a <= b * (1 + 1e-9) for a, b in zip(vals, vals[1:]))


def test_wp_reduces_to_fujii_wilson(line4):
    sigma = np.array([1.0, 1.0, 1.0, 9.0])
    for p in (1.5, 2.0, 3.0):
        assert wp_constant(line4, sigma, p, Power(p)) == pytest.approx(
            ainfty_fujii_wilson(line4, sigma), rel=1e-9
        )


def test_wp_ones(line4):
    assert wp_constant(line4, ONES4, 2.0, Power(2)) == pytest.approx(1.0, rel=1e-9)


def test_wp_skips_sigma_null_balls(line4):
    sparse = np.array([4.0, 0.0, 0.0, 0.0])
    val = wp_constant(line4, sparse, 2.0, Power(2))
    assert np.isfinite(val) and val > 0


# ------------------------------------------------------------ Sawyer


def test_sawyer_examples(line4, one_point):
    assert sawyer_constant(line4, ONES4, ONES4, 2.0) == 1.0
    # one point: closed form sigma**(1/p') * w**(1/p), independent of the mass
    assert sawyer_constant(one_point, np.array([1.0]), np.array([1.0]), 2.0) == 1.0
    assert sawyer_constant(one_point, np.array([2.0]), np.array([3.0]), 2.0) == (
        pytest.approx(3.0**0.5 * 2.0**0.5, rel=1e-12)
    )
    sparse = np.array([4.0, 0.0, 0.0, 0.0])
    assert sawyer_constant(line4, ONES4, sparse, 2.0) == pytest.approx(
        oracle_sawyer(line4, ONES4, sparse, 2.0), rel=1e-12
    )


def test_sawyer_matches_oracle_random():
    rng = np.random.default_rng(12)
    for _ in range(5):
        sp = random_cloud(rng, int(rng.integers(3, 8)))
        w = 10.0 ** rng.uniform(-1, 1, sp.n)
        s = 10.0 ** rng.uniform(-1, 1, sp.n)
        assert sawyer_constant(sp, w, s, 2.0) == pytest.approx(
            oracle_sawyer(sp, w, s, 2.0), rel=1e-12
        )


# ------------------------------------------------------------ invariances


def test_scale_invariance(line4):
    w = np.array([0.5, 2.0, 1.0, 3.0])
    sigma = np.array([1.0, 4.0, 0.25, 1.0])
    c = 4.0
    assert two_weight_ap(line4, c * w, sigma, 2.0) == pytest.approx(
        c * two_weight_ap(line4, w, sigma, 2.0), rel=1e-12
    )
    assert ainfty_fujii_wilson(line4, c * w) == pytest.approx(
        ainfty_fujii_wilson(line4, w), rel=1e-12
    )


def test_constants_report_fields(line4):
    rep = constants_report(line4, ATOM4, ONES4, 2.0, Power(2))
    d = rep.as_dict()
    assert d["two_weight_ap"] == 9.0
    assert d["ap"] is not None and d["ainfty_exp"] is not None
    zero_w = np.array([1.0, 0.0, 1.0, 1.0])
    rep2 = constants_report(line4, zero_w, ONES4, 2.0, Power(2))
    assert rep2.ap is None and rep2.ainfty_exp is None
    assert np.isfinite(rep2.two_weight_ap)


def test_powerlog_bump_is_finite_and_reduction_consistent(line4):
    sigma = np.array([2.0, 1.0, 0.5, 4.0])
    phi = PowerLog(2.0, 1.0)
    v = bump_ap(line4, ATOM4, sigma, 2.0, phi)
    assert np.isfinite(v) and v > 0
    wp = wp_constant(line4, sigma, 2.0, young_conjugate(phi))
    assert np.isfinite(wp) and wp > 0
