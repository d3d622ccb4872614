import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import lpf_trial
from smoothprog.errors import ConfigError
from smoothprog.harness import (DISCREPANCY_COLUMNS, ExperimentConfig, delta_from_counts, discrepancy,
                                family_density, family_generate, fmt, label_ranges, ordered_map,
                                parse_config_text, run, trend, trend_statistic, worker_count, y_label)
from smoothprog.saddle import rho

REFERENCE = Path(__file__).resolve().parents[1] / "configs" / "reference.json"
SQRT_E4 = 4 * math.sqrt(math.e)


# -- labels ---------------------------------------------------------------------------------

def test_y_label_examples():
    assert label_ranges(log_x=100 * math.log(10), y=1e99).y_label == "large"
    # (log log 10^100)^3 = 5.44^3 = 161 > 100
    assert label_ranges(log_x=100 * math.log(10), y=100).y_label == "very small"
    # the cutoffs cross at this x (exp(230^0.1) = 5.6 < 161), so nothing is "small"
    assert label_ranges(log_x=100 * math.log(10), y=200).y_label == "large"
    # past log x = 4.9e9 the middle range opens up
    lx = 1e11
    assert math.log(lx) ** 3 < math.exp(lx**0.1)
    assert y_label(lx, 0.5 * (math.log(lx) ** 3 + math.exp(lx**0.1))) == "small"


@settings(max_examples=200, deadline=None)
@given(lx=st.floats(3.0, 1e13), ly=st.floats(0.1, 1.0))
def test_y_labels_partition(lx, ly):
    # along increasing y the label moves very small -> small -> large and never back
    order = {"very small": 0, "small": 1, "large": 2}
    ys = np.exp(np.linspace(0.05, min(lx * ly, 700.0), 50))
    ranks = [order[y_label(lx, y)] for y in ys]
    assert ranks == sorted(ranks)


def test_k_labels():
    lab = label_ranges(x=1e8, y=100, q=10**9)
    assert lab.k0 == 60 and lab.sqrt_u == pytest.approx(2.0)
    assert set(lab.k_labels.values()) == {"problem"}
    wide = label_ranges(x=1e8, y=100, q=10**9, A=1.0, D=0.0)
    assert wide.k0 == 0 and wide.k_label(1) == "rodosskii" and wide.k_label(5) == "basic"
    assert wide.k_label(11) == "beyond"


# -- families ---------------------------------------------------------------------------------

def test_families():
    assert family_generate("prime_power", p=3, n_max=8) == [3**n for n in range(1, 9)]
    brute = [q for q in range(2, 1001) if lpf_trial(q) ** 3 < q]
    assert family_generate("smooth", Q=3, q_max=1000) == brute and len(brute) == 84
    assert family_generate("explicit", values=[9, 4, 20]) == [9, 4, 20]
    exc = family_generate("exceptional", q_max=60, count=3)
    assert len(exc) == 3 and all(3 <= q <= 60 for q in exc)
    with pytest.raises(ConfigError):
        family_generate("nonsense")


def test_smooth_family_density():
    d = family_density(3, 10**6)
    assert abs(d / rho(3.0) - 1) < 0.15


# -- discrepancy ------------------------------------------------------------------------------

def test_zero_discrepancy_when_everything_is_smooth(table_1e6):
    for q in (4, 9, 12, 30):
        rep = discrepancy(table_1e6, 3600, 10**4, q)
        assert rep.delta == 0.0


def test_discrepancy_q9(table_1e6):
    rep = discrepancy(table_1e6, 10**6, 100, 9)
    n = np.arange(1, 10**6 + 1)
    sm = n[table_1e6.lpf[1:] <= 100]
    counts = {a: int(np.count_nonzero(sm % 9 == a)) for a in (1, 2, 4, 5, 7, 8)}
    total = sum(counts.values())
    expect = max(abs(6 * c / total - 1) for c in counts.values())
    assert abs(rep.delta - expect) < 1e-15
    assert rep.psi_q == total and rep.delta > 0
    assert rep.counts[rep.residues.index(rep.argmax)] in (max(counts.values()), min(counts.values()))


def test_discrepancy_invariants(table_1e6):
    rep = discrepancy(table_1e6, 5 * 10**5, 30, 49)
    assert rep.u == pytest.approx(math.log(5e5) / math.log(30))
    assert rep.v == pytest.approx(math.log(5e5) / math.log(49))
    # relabelling the classes leaves delta unchanged
    perm = np.random.default_rng(1).permutation(rep.counts)
    assert delta_from_counts(perm, rep.psi_q, len(perm))[0] == rep.delta
    # recompute delta from the emitted class_counts column
    cell = rep.row()[DISCREPANCY_COLUMNS.index("class_counts")]
    counts = [int(p.split(":")[1]) for p in cell.split(";")]
    assert fmt(delta_from_counts(counts, sum(counts), len(counts))[0]) == rep.row()[6]


def test_u_over_v_bracket():
    # q <= y^A and q >= y^(4 sqrt e) give A >= u/v >= 4 sqrt e
    for y, q, A in ((3.0, 10**5, 11.0), (2.0, 2**7, 7.0)):
        assert q <= y**A and q >= y**SQRT_E4
        u, v = 1.0 / math.log(y), 1.0 / math.log(q)
        assert A >= u / v >= SQRT_E4


def test_trend(table_1e6):
    assert trend_statistic([1, 2, 3], [0.5, 0.5, 0.5]) == 0.0
    tr = trend(table_1e6, [10**4, 10**5, 10**6], 1000, 4)
    assert tr.tau < 0 and tr.deltas[-1] < tr.deltas[0]


# -- configuration and run ----------------------------------------------------------------------

def test_config_parsing():
    text = "# comment\nexperiments = [\"constants\"]\nfamily.kind = explicit\nfamily.values = [5, 7]\nT_max = 30\n"
    cfg = ExperimentConfig.from_mapping(parse_config_text(text))
    assert cfg.family == {"kind": "explicit", "values": [5, 7]} and cfg.T_max == 30
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping({"bogus": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig(experiments=["nope"])
    with pytest.raises(ConfigError):
        parse_config_text("no equals sign here")
    cfg = ExperimentConfig.load(REFERENCE, ["T_max=7", "family.values=[4]"])
    assert cfg.T_max == 7 and cfg.family["values"] == [4]


def test_empty_run_is_header_only(tmp_path):
    res = run(ExperimentConfig(experiments=[], output_dir=str(tmp_path)))
    assert res.exit_code == 0
    for name, text in res.files.items():
        lines = text.splitlines()
        assert json.loads(lines[0].lstrip("# "))["config"]["experiments"] == []
        assert len(lines) == (2 if name.endswith(".csv") else 1)
        assert (tmp_path / name).read_text(encoding="utf-8") == text


def test_reference_run_is_deterministic_and_echoes_config(monkeypatch):
    cfg = ExperimentConfig.load(REFERENCE)
    a = run(cfg, write=False)
    monkeypatch.setenv("SMOOTHPROG_THREADS", "4")
    b = run(cfg, write=False)
    assert a.exit_code == 0 and a.digest() == b.digest()
    echo = cfg.echo()
    for text in a.files.values():
        assert text.splitlines()[0].lstrip("# ") == echo
    rows = [r for r in a.files["equidist.csv"].splitlines()[2:]]
    assert len(rows) == 9


def test_worker_pool(monkeypatch):
    monkeypatch.setenv("SMOOTHPROG_THREADS", "3")
    assert worker_count() == 3
    assert ordered_map(lambda v: v * v, range(50)) == [v * v for v in range(50)]
    monkeypatch.setenv("SMOOTHPROG_THREADS", "many")
    with pytest.raises(ConfigError):
        worker_count()


def test_fmt():
    assert fmt(0.1) == "0.10000000000000001" and fmt(True) == "1" and fmt(np.int64(7)) == "7"
