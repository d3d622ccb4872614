import json
import math

import mpmath as mp
import numpy as np
import pytest

from smoothprog.characters import character_group
from smoothprog.errors import DomainError, RangeError
from smoothprog.mellin import (Cutoff, contour_psi, l_ratio_profile, make_cutoff, mellin,
                               mellin_decay_bound, mellin_quadrature, psi_smoothed, truncated_L)
from smoothprog.sieve import build_table, psi

CUT = make_cutoff()


def _mellin_mp(s):
    mp.mp.dps = 30
    f = lambda t: mp.betainc(11, 11, 0, (2 - t) / 1.5, regularized=True) * t ** (s - 1)
    return complex(mp.mpf(0.5) ** s / s + mp.quad(f, mp.linspace(0.5, 2, 60)))


def test_plateau_and_support():
    assert CUT(0.25) == 1.0 and CUT(0.5) == 1.0
    assert CUT(2.0) == 0.0 and CUT(3.0) == 0.0
    t = np.linspace(0, 3, 3001)
    v = CUT(t)
    assert np.all((0 <= v) & (v <= 1)) and np.all(np.diff(v) <= 0)


def test_derivative_is_derivative():
    t = np.linspace(0.55, 1.95, 50)
    h = 1e-5
    for j in range(0, 5):
        fd = (CUT.deriv(t + h, j) - CUT.deriv(t - h, j)) / (2 * h)
        scale = np.max(np.abs(CUT.deriv(t, j + 1)))
        assert np.max(np.abs(fd - CUT.deriv(t, j + 1))) < 1e-5 * scale


@pytest.mark.parametrize("s", [0.5, 2, 0.8 + 3j, 0.7 + 39j, 0.7 + 41j, 0.7 + 300j, 1.2 + 800j])
def test_mellin_against_mpmath(s):
    assert abs(mellin(CUT, s) - _mellin_mp(s)) < 1e-12


def test_mellin_indicator_and_sandwich():
    assert abs(mellin_quadrature(lambda t: np.ones_like(t), 2, 0.0, 1.0) - 0.5) < 1e-14
    v = mellin(CUT, 1.0)
    assert 0.5 < v.real < 2 and v.imag == 0
    # Phi^(1) is the integral of Phi: plateau 1/2 plus the ramp's mean 3/4
    assert abs(v - 1.25) < 1e-13


def test_mellin_conjugate_and_domain():
    s = 0.6 + 17j
    assert abs(mellin(CUT, s.conjugate()) - mellin(CUT, s).conjugate()) < 1e-15
    with pytest.raises(DomainError):
        mellin(CUT, -0.1 + 2j)


def test_decay_constant_reported():
    t = np.linspace(1, 1000, 2000)
    s = 0.7 + 1j * t
    scaled = np.abs(mellin(CUT, s)) * np.abs(s) * (np.abs(s) + 1) ** 8
    constant = scaled.max()
    print(f"decay constant over t in [1, 1000]: {constant:.6g}")
    assert np.isfinite(constant)
    # bounded means the scaled profile stops growing well before the end of the scan
    assert scaled[t > 500].max() <= scaled[t <= 500].max()
    assert np.all(np.abs(mellin(CUT, s)) <= mellin_decay_bound(0.7, t) * (1 + 1e-9))


def test_decay_slope():
    t = np.geomspace(100, 1000, 200)
    slope = np.polyfit(np.log(t), np.log(np.abs(mellin(CUT, 0.7 + 1j * t))), 1)[0]
    assert slope <= -8.5


def test_truncated_L_values():
    z = character_group(1).principal()
    assert abs(truncated_L(z, 2.0, 3) - 1.5) < 1e-15
    assert truncated_L(z, 0.5 + 3j, 1.5) == 1
    chi = character_group(9).characters()[1]
    s = 0.7 + 1j * np.linspace(-20, 20, 41)
    assert np.all(np.abs(truncated_L(chi, s, 200)) <= truncated_L(z, 0.7, 200).real * (1 + 1e-12))


def test_truncated_L_is_smooth_dirichlet_series(table_1e6):
    chi = character_group(7).characters()[3]
    n = np.arange(1, 10**6 + 1)
    smooth = table_1e6.smooth_mask(1, 10**6 + 1, 13)
    partial = np.sum(chi.values(n[smooth]) * n[smooth].astype(float) ** -(2 + 1j))
    assert abs(truncated_L(chi, 2 + 1j, 13) - partial) < 1e-4


def test_l_ratio_profile():
    z = character_group(1).principal()
    assert abs(l_ratio_profile(z, 100, 0.8, [0.0])[0] - 1) < 1e-14
    chi = character_group(9).characters()[2]
    r = l_ratio_profile(chi, 1000, 0.8, np.linspace(-30, 30, 121))
    assert np.all(r <= 1 + 1e-12)
    assert l_ratio_profile(chi, 1000, 0.8, [1.0])[0] < 1


def test_psi_smoothed_sandwich_and_oracle(table_1e6):
    chi4 = character_group(4).characters()[1]
    n = np.arange(1, 2000)
    direct = sum(chi4.value(int(k)) * CUT(k / 1000) for k in n if table_1e6.lpf[k] <= 1000)
    assert abs(psi_smoothed(table_1e6, chi4, 1000, 1000) - direct) < 1e-9
    z = character_group(1).principal()
    for x, y in ((1000, 30), (5000, 100)):
        v = psi_smoothed(table_1e6, z, x, y).real
        assert psi(table_1e6, x / 2, y) <= v <= psi(table_1e6, 2 * x, y)
    with pytest.raises(RangeError):
        psi_smoothed(build_table(100), z, 60, 10)


def test_psi_smoothed_orthogonality(table_1e6):
    q, a, x, y = 9, 4, 3000, 50
    chars = character_group(q).characters()
    lhs = sum(chi.value(a).conjugate() * psi_smoothed(table_1e6, chi, x, y) for chi in chars) / len(chars)
    n = np.arange(a, 2 * x, q)
    rhs = float(np.sum(CUT(n[table_1e6.lpf[n] <= y] / x)))
    assert abs(lhs - rhs) < 1e-9


def test_contour_matches_exact_sum(table_1e6):
    z = character_group(1).principal()
    rep = contour_psi(z, 200, 50, T_num=500)
    exact = psi_smoothed(table_1e6, z, 200, 50)
    assert abs(rep.total - exact) <= 1e-3 * abs(exact)
    assert rep.split_height == pytest.approx(50**0.25)
    assert rep.remainder_bound < 1e-6 * rep.scale
    rec = json.loads(rep.to_json())
    assert rec["label"] == "1:" and len(rec["total"]) == 2


def test_contour_conjugation():
    chi = character_group(5).characters()[1]
    a = contour_psi(chi, 800, 60, T_num=300)
    b = contour_psi(chi.conj(), 800, 60, T_num=300)
    assert abs(a.total - b.total.conjugate()) < 1e-8 * max(1.0, abs(a.total))


def test_tail_constant_reported():
    chi = character_group(7).characters()[2]
    rep = contour_psi(chi, 5000, 100)
    bound = rep.tail_constant * rep.scale / (rep.y * rep.q) ** 2
    assert abs(rep.tail_plus) + abs(rep.tail_minus) <= bound * (1 + 1e-12)
    assert math.isfinite(rep.tail_constant)
