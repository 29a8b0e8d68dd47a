"""Acceptance criteria, one test per criterion at its stated tolerance.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import math
import subprocess
import sys
import warnings

import numpy as np
import pytest

from freeword.automata import DIAMOND, compile_text
from freeword.construction import add_diamond, dfa_graph, make_aperiodic, plain, split
from freeword.modelfree import SequenceSet, detect, lz78_entropy
from freeword.oracle import enumerated_log_counts, rate_estimate, weighted_counts
from freeword.sampling import SamplerConfig, Walker, make_rng, sample_word, sample_words
from freeword.spectral import build, dfa_level_chain, parry_chain, uniform_edge_logp, variational_check, walk_energy
from freeword.typicality import evaluate_suite, is_typical, walk_rate
from support import FIXTURES, weighted_example, random_dfa, suite, textbox
from test_typicality import closed_walks

ZERO = {"a": 0.0, "b": 0.0}


def criterion(number, title):
    return pytest.mark.criterion(number, title)


@pytest.fixture(scope="module")
def random_instances():
    rng = np.random.default_rng(2024)
    return [add_diamond(random_dfa(rng, max_states=8, wlo=-3.0, whi=3.0)) for _ in range(20)]


@criterion(1, "Parry probabilities of the weighted running example")
def test_parry_probabilities():
    _, pdfa = build(weighted_example(), "diamond", -1000.0)
    got = [pdfa.prob("q0", "a"), pdfa.prob("q1", "a"), pdfa.prob("q1", "b"), pdfa.prob("q1", DIAMOND)]
    assert got == pytest.approx([1.0, 0.9514, 0.0486, 0.0], abs=5e-4)


@criterion(2, "Information rate 0.4812 (spectral and DP) and uniform chain 0.4621")
def test_information_rate():
    dfa = compile_text("a(aa+b)*", ZERO)
    chain, _ = build(dfa)
    assert chain.rate_per_symbol == pytest.approx(0.4812, abs=1e-3)
    est = rate_estimate(weighted_counts(dfa, 2000))
    assert est.plain == pytest.approx(0.4812, abs=1e-3)
    assert est.smoothed == pytest.approx(0.4812, abs=1e-3)
    graph = dfa_graph(plain(dfa))
    uniform = sum(walk_energy(graph, uniform_edge_logp(graph)))
    assert uniform == pytest.approx(0.4621, abs=1e-3)
    assert uniform < chain.rate_per_symbol


@criterion(3, "Text-box chain probabilities and rate")
def test_textbox_chain():
    chain, pdfa = build(textbox(), "plain")
    got = [pdfa.prob("TBHello", "Hello"), pdfa.prob("TBHello", "Clear"), pdfa.prob("TBHello", "Exit")]
    assert got == pytest.approx([0.7307, 0.2688, 0.0005], abs=5e-4)
    assert 2 * chain.log_perron == pytest.approx(5.314, abs=1e-2)


@criterion(4, "Collapse identity on 20 random automata")
def test_collapse_identity(random_instances):
    for aug in random_instances:
        split_perron = parry_chain(split(aug)).perron
        assert dfa_level_chain(aug).perron == pytest.approx(split_perron**2, rel=1e-8)


@criterion(5, "Variational identity on 20 random automata")
def test_variational_identity(random_instances):
    for aug in random_instances:
        chain = parry_chain(split(aug))
        mean, entropy, _ = variational_check(chain)
        assert abs(mean + entropy - chain.rate_per_edge) <= 1e-8


@criterion(6, "Diamond rates decrease to the information rate")
def test_diamond_convergence():
    rates = []
    for w in (-5.0, -10.0, -20.0, -50.0):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rates.append(parry_chain(split(add_diamond(weighted_example(ZERO), w))).rate_per_symbol)
    assert all(a >= b for a, b in zip(rates, rates[1:]))
    assert rates[-1] == pytest.approx(0.4812, abs=1e-3)


@criterion(7, "Telescoping on closed walks and AEP mass of initial walks")
def test_telescoping_and_aep():
    chain, _ = build(weighted_example(), "diamond")
    for walk in closed_walks(chain, 100, seed=7):
        assert walk_rate(walk) == pytest.approx(chain.log_perron, abs=1e-9)
    zero = parry_chain(split(make_aperiodic(weighted_example(ZERO))))
    walker = Walker(zero)
    start = zero.graph.initial_node
    typical = [is_typical(walker.walk(start, 10_000, make_rng(seed)), zero, 0.05).typical for seed in range(200)]
    assert np.mean(typical) >= 0.95


@criterion(8, "Replay of the worked sampler trace")
def test_sampler_replay():
    _, pdfa = build(weighted_example(), "diamond", -1000.0)
    assert sample_word(pdfa, SamplerConfig(min_length=3), [0.8, 0.3, 0.8, 0.97]) == ("a", "a", "a", "b")


@criterion(9, "Suite coverage and telescoped suite rates")
def test_suite_coverage():
    _, pdfa = build(textbox(), "auto")
    for name in ("t1", "t2"):
        report = evaluate_suite(pdfa, suite(name), 0.1)
        assert report.branch_coverage == 1.0
        for verdict in report.verdicts:
            assert verdict.lambda_alpha == pytest.approx(pdfa.rate_per_symbol, abs=1e-9)


@criterion(10, "DP counts equal enumeration sums on 20 random automata")
def test_oracle_equivalence():
    rng = np.random.default_rng(10)
    for _ in range(20):
        dfa = random_dfa(rng)
        for dp, brute in zip(weighted_counts(dfa, 8).log_counts, enumerated_log_counts(dfa, 8)):
            if brute == -math.inf:
                assert dp == -math.inf
            else:
                assert abs(math.expm1(dp - brute)) <= 1e-12


@criterion(11, "LZ78 estimator and constant-set detection")
def test_lz_estimator():
    rng = np.random.default_rng(11)
    assert lz78_entropy(rng.integers(0, 4, 100_000).tolist(), 4) == pytest.approx(math.log(4), rel=0.05)
    assert lz78_entropy("a" * 100_000) <= 0.01
    _, pdfa = build(weighted_example(ZERO))
    sets = [SequenceSet(f"g{k}", sample_words(pdfa, SamplerConfig(seed=k, min_length=50), 400)) for k in range(5)]
    constant = sample_word(pdfa, SamplerConfig(seed=500, min_length=50))
    sets.append(SequenceSet("constant", [constant] * 400))
    assert detect(sets, ZERO, 0.1, seed=0).verdicts()["constant"] is False


def _cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "freeword.cli", *argv], capture_output=True, check=True)
    return proc.stdout, proc.stderr


@criterion(12, "Randomized commands are byte-identical for equal seeds")
def test_determinism(tmp_path):
    example = str(FIXTURES / "weighted_example.json")
    for k in range(3):
        (tmp_path / f"s{k}.txt").write_text("a b b a\na a b\n" * (k + 1) + "b a\n")
    commands = [
        ["generate", "--dfa", example, "--seed", "1", "-n", "3", "--min-length", "5"],
        ["generate", "--dfa", example, "--seed", "8", "-n", "4", "--min-length", "20", "--raw", "--format", "json"],
        ["typical", "--dfa", example, "--seed", "5", "--length", "2000"],
        ["typical", "--regex", "(a+b)*", "--weights", '{"a":1,"b":0}', "--seed", "5", "--length", "400", "--prefix-closed"],
        ["detect", "--symbols", '{"a":0.5,"b":-1}', "--sets", str(tmp_path), "--seed", "3"],
    ]
    for argv in commands:
        assert _cli(*argv) == _cli(*argv)
