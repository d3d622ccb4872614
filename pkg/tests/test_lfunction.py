import json
import math

import mpmath as mp
import numpy as np
import pytest

from oracles import alternating_pi_over_4, critical_line_zeros, dirichlet_series_by_class, zero_on_critical_line
from smoothprog.characters import character_group
from smoothprog.errors import DomainError
from smoothprog.lfunction import (Rect, classify, conjugate_pairs_ok, density_count_check,
                                  deuring_heilbronn_check, dirichlet_partial_sum, eta_condition,
                                  gulp_region_check, has_zero, iwaniec_condition_check, k0_value,
                                  l_value, l_value_regular, problem_range_rectangle, scan_zeros,
                                  theorem1_constants, winding_number, zero_free_region_check,
                                  zeros_csv)
from smoothprog.lfunction.zeros import zero_function

ZETA = character_group(1).principal()
CHI4 = character_group(4).characters()[1]


# -- values ---------------------------------------------------------------------------

def test_basel_and_leibniz():
    assert abs(l_value(ZETA, 2.0) - math.pi**2 / 6) < 1e-13
    assert abs(l_value(CHI4, 1.0) - alternating_pi_over_4()) < 1e-9
    assert abs(l_value(CHI4, 1.0) - math.pi / 4) < 1e-13


def test_pole_handling():
    with pytest.raises(DomainError):
        l_value(ZETA, 1.0)
    assert abs(l_value_regular(ZETA, 1.0) - 1.0) < 1e-13
    # (s - 1) zeta(s) = 1 + gamma (s - 1) + ...
    h = 1e-6
    assert abs((l_value_regular(ZETA, 1 + h) - 1) / h - 0.5772156649015329) < 1e-5


@pytest.mark.parametrize("q,idx,s", [(7, 1, 0.5 + 14j), (7, 3, 0.9 + 500j), (12, 2, 0.3 - 80j),
                                     (25, 7, 1.0 + 999j), (1, 0, 0.5 + 200j)])
def test_against_mpmath(q, idx, s):
    chi = character_group(q).characters()[idx]
    mp.mp.dps = 20
    coeffs = [complex(chi.value(n)) for n in range(q)] if q > 1 else [1]
    ref = complex(mp.dirichlet(mp.mpc(s.real, s.imag), coeffs))
    assert abs(l_value(chi, s) - ref) < 1e-10 * max(1.0, abs(ref))


def test_conjugate_symmetry_and_vectorized():
    chi = character_group(11).characters()[3]
    s = np.array([0.6 + 3j, 1.2 - 40j, 0.1 + 0.1j])
    v = l_value(chi, s)
    assert v.shape == (3,)
    assert np.allclose(l_value(chi.conj(), s.conj()), v.conj(), rtol=0, atol=1e-13)
    assert all(abs(v[i] - l_value(chi, complex(s[i]))) < 1e-13 for i in range(3))


def test_dirichlet_series_by_class_oracle():
    for q in (3, 8, 15):
        cls = dirichlet_series_by_class(q, 2 + 1j, 10**5)
        for chi in character_group(q).characters():
            series = sum(chi.value(r) * cls[r] for r in range(q))
            assert abs(l_value(chi, 2 + 1j) - series) < 1e-4
            assert abs(dirichlet_partial_sum(chi, 2 + 1j, 10**5) - series) < 1e-10


# -- zeros ------------------------------------------------------------------------------

def test_first_zeta_zero():
    res = scan_zeros(ZETA, Rect(0.0, 1.0, 0.0, 20.0))
    assert res.covered and len(res.zeros) == 1
    z = res.zeros[0]
    assert abs(z.gamma - zero_on_critical_line([1], 13.5, 14.5)) < 1e-5
    assert abs(z.beta - 0.5) < 1e-6 and z.box.diameter <= 1e-6 and z.box.contains(z.rho)


def test_first_mod4_zero():
    res = scan_zeros(CHI4, Rect(0.0, 1.0, 0.0, 7.0))
    assert res.covered and len(res.zeros) == 1
    assert abs(res.zeros[0].gamma - zero_on_critical_line([0, 1, 0, -1], 5.5, 6.5)) < 1e-5


def test_right_half_plane_empty():
    for chi in character_group(9).characters():
        res = scan_zeros(chi, Rect(1.01, 2.0, -30, 30))
        assert res.covered and res.zeros == [] and res.total_winding == 0


def test_winding_additivity():
    f = zero_function(ZETA)
    whole = Rect(0.1, 1.3, 10.0, 40.0)
    parts = whole.split(0.5031)
    assert winding_number(f, whole) == sum(winding_number(f, p) for p in parts) == 6
    # ordinates 14.13, 21.02, 25.01, 30.42, 32.94, 37.59


def test_conjugate_pairs_and_csv():
    chars = character_group(13).characters()
    rect = Rect(0.25, 1.5, -25, 25)
    recs = {c.label: scan_zeros(c, rect).zeros for c in chars}
    conj = {c.label: c.conj().label for c in chars}
    assert conjugate_pairs_ok(recs, conj, conj.get)
    assert all(scan_zeros(c, rect).covered for c in chars)
    text = zeros_csv([z for zs in recs.values() for z in zs])
    assert text.splitlines()[0] == "character_label,beta,gamma,box_radius,winding"
    assert len(text.splitlines()) == 1 + sum(len(v) for v in recs.values())


def test_induced_character_has_same_zeros():
    # a character mod 20 of conductor 5 against its primitive mod 5 partner
    chi = next(c for c in character_group(20).characters() if c.conductor().conductor == 5)
    prim = chi.conductor().induced
    rect = Rect(0.25, 1.5, -20, 20)
    a = sorted((z.beta, z.gamma) for z in scan_zeros(chi, rect).zeros)
    b = sorted((z.beta, z.gamma) for z in scan_zeros(prim, rect).zeros)
    assert a == b and len(a) > 0


def test_has_zero():
    assert has_zero(ZETA, 0.4, 20.0) is True
    assert has_zero(ZETA, 0.4, 14.0) is False
    assert has_zero(ZETA, 1.0, 100.0) is False


# -- constants and ranges -----------------------------------------------------------------

def test_k0_and_theorem_constants():
    assert k0_value(4 * math.sqrt(math.e), 10) == 60
    c = theorem1_constants(10, 10)
    assert (c.k0, c.Q_A) == (103, 51_500_000)
    assert theorem1_constants(4 * math.sqrt(math.e), 10).Q_A == 30_000_000
    for A in (2.0, 3.7, 11.0):
        assert k0_value(A, 0) == math.ceil(4 * A * math.log(A))


def test_problem_range_examples():
    g = character_group(3**10)
    chi = next(c for c in g.characters() if c.conductor().conductor == 3)
    assert problem_range_rectangle(chi, 60, 2.0, 100).height == 9
    assert problem_range_rectangle(g.principal(), 60, 2.0, 100).excluded
    prim = next(c for c in character_group(101).characters() if not c.is_principal)
    assert problem_range_rectangle(prim, 60, 2.0, 50).height == 50
    assert problem_range_rectangle(prim, 60, 2.0, 500).height == 101


def test_classify_trivial_and_small():
    assert classify(1).A_set == [] and classify(1).xi_index == {}
    c = classify(5, T_max=50)
    assert c.k0 == 60 and c.partition_ok()
    # the left edge sits at the floor and the height is min(50, 5, cond^2) = 5, so the problem
    # set is exactly the characters with a critical-line zero at |t| <= 5 (mpmath oracle)
    expect = []
    for chi in character_group(5).characters()[1:]:
        coeffs = [complex(chi.value(n)) for n in range(5)]
        if critical_line_zeros(coeffs, -5.0, 5.0):
            expect.append(chi.label)
    assert sorted(c.A_set) == sorted(expect)
    assert sum(c.xi_counts().values()) <= 4
    d = json.loads(json.dumps(c.to_dict()))
    assert d["T_max"] == 50.0


def test_xi_indices_are_monotone():
    c = classify(29, T_max=30)
    logq = math.log(29)
    for chi in character_group(29).characters()[1:]:
        k = c.xi_index[chi.label]
        assert has_zero(chi, 1 - k / logq, 30) is False
        if k < c.cap:
            assert has_zero(chi, max(1 - (k + 1) / logq, 0.25), 30) is True


# -- checkers ---------------------------------------------------------------------------

def test_zero_free_region_checker():
    assert zero_free_region_check(1, c1=0.1, T_max=10).verdict == "PASS"
    ok = zero_free_region_check(11, c1=0.1, T_max=30)
    assert ok.verdict == "PASS" and ok.zeros == []
    bad = zero_free_region_check(5, c1=10, T_max=30)
    assert bad.verdict == "FAIL" and len(bad.zeros) > 10
    rec = json.loads(bad.to_json())
    assert rec["params"] == {"q": 5, "c1": 10, "T_max": 30} and "floating-point" in rec["note"]


def test_deuring_heilbronn_checker():
    ok = deuring_heilbronn_check(7, 1e-3, c2=0.01, T_max=30)
    assert ok.verdict == "PASS"
    assert ok.details["repulsion_margin"] == ok.details["sigma_left"]
    bad = deuring_heilbronn_check(7, 1e-3, c2=50, T_max=30)
    assert bad.verdict == "FAIL" and bad.details["repulsion_margin"] > 0.4
    with pytest.raises(DomainError):
        deuring_heilbronn_check(7, 2.0)


def test_eta_condition_arithmetic():
    q, eta, Theta = 10**3, 0.1, 1e4
    lhs = 8 * math.log(5 * math.log(3 * q)) + 24 / eta * math.log(160 * Theta)
    assert eta_condition(q, eta, Theta) == (lhs <= 8 * Theta / 3)
    assert eta_condition(q, eta, Theta) is True
    assert eta_condition(q, eta, 10.0) is False


def test_iwaniec_checker():
    chi = character_group(7).characters()[1]
    probe = iwaniec_condition_check(character_group(7).principal(), M=1e9, eta=0.3, T=2.0)
    peak = probe.details["max_abs_L"]
    assert probe.details["condition_i"] == "SAMPLED" and peak > 2 * math.e
    low = iwaniec_condition_check(character_group(7).principal(), M=peak / 2, eta=0.3, T=2.0)
    assert low.details["condition_i"] == "FAIL"
    tiny = iwaniec_condition_check(chi, M=1e9, eta=0.005, T=2.0)
    assert tiny.details["theta"] < 1e-6 and tiny.verdict == "UNKNOWN"
    wide = iwaniec_condition_check(chi, M=10.0, eta=0.3, T=5.0)
    assert wide.details["condition_i"] in ("SAMPLED", "FAIL")
    assert wide.details["condition_i"] != "PROVED"
    with pytest.raises(DomainError):
        iwaniec_condition_check(chi, M=10.0, eta=0.5, T=1.0)


def test_gulp_checker():
    assert gulp_region_check(ZETA).details["vacuous"] is True
    for q in (5, 7, 11):
        for chi in character_group(q).characters():
            if chi.is_primitive():
                assert gulp_region_check(chi, scale=1.0, T_max=30).verdict == "PASS"
    with pytest.raises(DomainError):
        gulp_region_check(character_group(10).characters()[1] if not character_group(10).characters()[1].is_primitive()
                          else character_group(10).principal())


def test_density_checker():
    cls = classify(100, T_max=20)
    assert density_count_check(100, classification=cls).verdict == "PASS"
    bad = density_count_check(100, C1=0.01, C2=0.01, classification=cls)
    assert bad.verdict == "FAIL"
    assert bad.details["total"] <= bad.details["phi"] == 40
