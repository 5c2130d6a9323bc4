import numpy as np
import pytest

from dpcp import (AdversaryStrategy, BitVec, Graph, Instance, Language,
                  adversarial_proof, hadamard_encode, honest_proof,
                  honest_proof_leader, honest_proof_nonbipartite,
                  honest_proof_span, parse_strategy)
from dpcp.errors import StrategyError, WitnessError
from dpcp.graphs import ROOT_MARKER, complete_graph, cycle_graph, path_graph
from dpcp.prover import proof_shape, span_witness_vectors
from helpers import all_labeled_trees


def test_honest_nonbipartite_examples():
    k3 = Instance.bare(complete_graph(3))
    proof = honest_proof_nonbipartite(k3)
    assert proof.total_bits == 8
    assert proof.part(0) == hadamard_encode(BitVec([1, 1, 1]))

    c5 = Instance.bare(cycle_graph(5))
    proof5 = honest_proof_nonbipartite(c5)
    assert proof5.total_bits == 32
    assert proof5.part(0) == hadamard_encode(BitVec.ones(5))

    chord = Instance.bare(Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2)]))
    assert honest_proof_nonbipartite(chord).part(0) == hadamard_encode(
        BitVec([1, 1, 1, 0, 0]))


def test_honest_nonbipartite_witness_error():
    with pytest.raises(WitnessError):
        honest_proof_nonbipartite(Instance.bare(cycle_graph(4)))


def test_honest_leader_examples():
    p3 = Instance(path_graph(3), ("0", "1", "0"))
    assert list(honest_proof_leader(p3).part(0).bits) == [0, 0, 1, 1, 0, 0, 1, 1]
    single = Instance(path_graph(1), ("1",))
    assert list(honest_proof_leader(single).part(0).bits) == [0, 1]
    k4 = Instance(complete_graph(4), ("0", "0", "0", "1"))
    assert honest_proof_leader(k4).part(0) == hadamard_encode(BitVec([0, 0, 0, 1]))
    with pytest.raises(WitnessError):
        honest_proof_leader(Instance(path_graph(3), ("1", "0", "1")))


def test_honest_span_path_parts():
    p3 = Instance(path_graph(3), (ROOT_MARKER, "0", "1"))
    proof = honest_proof_span(p3)
    assert proof.part_count == 4
    expected = [BitVec([1, 0, 0]), BitVec([1, 0, 0]),
                BitVec([1, 1, 0]), BitVec([1, 1, 1])]
    for part, alpha in zip(proof.parts, expected):
        assert part == hadamard_encode(alpha)


def test_honest_span_star_center_root():
    star = Graph(4, [(0, 1), (0, 2), (0, 3)])
    inst = Instance(star, (ROOT_MARKER, "0", "0", "0"))
    _, alphas = span_witness_vectors(inst)
    for j in (1, 2, 3):
        assert alphas[j] == BitVec.unit(4, 0) ^ BitVec.unit(4, j)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_span_telescoping_identity_all_trees(n):
    count = 0
    for tree in all_labeled_trees(n):
        for root in range(n):
            xs = [None] * n
            xs[root] = ROOT_MARKER
            stack = [root]
            seen = {root}
            while stack:
                u = stack.pop()
                for v in tree.neighbors(u):
                    if v not in seen:
                        seen.add(v)
                        xs[v] = str(u)
                        stack.append(v)
            inst = Instance(tree, tuple(xs))
            alpha_r, alphas = span_witness_vectors(inst)
            assert alpha_r == BitVec.unit(n, root)
            for i in range(n):
                if i == root:
                    continue
                parent = int(inst.x(i))
                assert alphas[i] ^ alphas[parent] == BitVec.unit(n, i)
            count += 1
    assert count == n ** (n - 2) * n if n > 2 else count > 0


def test_honest_span_witness_error():
    with pytest.raises(WitnessError):
        honest_proof_span(Instance(path_graph(3), ("1", "0", "1")))


# ---------------------------------------------------------------------------
# Adversaries
# ---------------------------------------------------------------------------

def test_wrong_witness_even_cycle_is_all_ones_encoding():
    c4 = Instance.bare(cycle_graph(4))
    proof = adversarial_proof(c4, Language.NONBIPARTITE,
                              AdversaryStrategy("wrong_witness",
                                                witness=("0", "1", "2", "3")))
    assert proof.part(0) == hadamard_encode(BitVec.ones(4))
    # defaults to the full vertex set
    assert adversarial_proof(c4, Language.NONBIPARTITE,
                             AdversaryStrategy("wrong_witness")) == proof


def test_constant_and_uniform_strategies():
    p3 = Instance(path_graph(3), ("0", "0", "0"))
    zero = adversarial_proof(p3, Language.LEADER, AdversaryStrategy("constant", bit=0))
    assert not zero.part(0).bits.any()
    one = adversarial_proof(p3, Language.LEADER, AdversaryStrategy("constant", bit=1))
    assert one.part(0).bits.all()
    u1 = adversarial_proof(p3, Language.LEADER,
                           AdversaryStrategy("uniform_random_table", seed=5))
    u2 = adversarial_proof(p3, Language.LEADER,
                           AdversaryStrategy("uniform_random_table", seed=5))
    u3 = adversarial_proof(p3, Language.LEADER,
                           AdversaryStrategy("uniform_random_table", seed=6))
    assert u1 == u2 and u1 != u3


def test_exhaustive_strategy_enumerates_every_proof_once():
    p3 = Instance(path_graph(3), ("0", "1", "0"))
    seen = set()
    for k in range(256):
        proof = adversarial_proof(p3, Language.LEADER,
                                  AdversaryStrategy("exhaustive", index=k))
        seen.add(proof.part(0).bits.tobytes())
    assert len(seen) == 256
    with pytest.raises(StrategyError):
        adversarial_proof(p3, Language.LEADER,
                          AdversaryStrategy("exhaustive", index=256))


def test_exhaustive_rejects_oversized_proofs():
    c7 = Instance.bare(cycle_graph(7))
    with pytest.raises(StrategyError):
        adversarial_proof(c7, Language.NONBIPARTITE,
                          AdversaryStrategy("exhaustive", index=0))


def test_corrupt_honest_flip_count():
    c5 = Instance.bare(cycle_graph(5))
    honest = honest_proof(c5, Language.NONBIPARTITE).flat_bits()
    for flips in (0, 1, 7):
        proof = adversarial_proof(
            c5, Language.NONBIPARTITE,
            AdversaryStrategy("corrupt_honest", flip_count=flips, seed=3))
        assert int((proof.flat_bits() != honest).sum()) == flips


def test_corrupt_honest_fraction_and_validation():
    c5 = Instance.bare(cycle_graph(5))
    proof = adversarial_proof(
        c5, Language.NONBIPARTITE,
        AdversaryStrategy("corrupt_honest", flip_fraction=0.25, seed=1))
    honest = honest_proof(c5, Language.NONBIPARTITE).flat_bits()
    assert int((proof.flat_bits() != honest).sum()) == 8
    with pytest.raises(StrategyError):
        adversarial_proof(c5, Language.NONBIPARTITE,
                          AdversaryStrategy("corrupt_honest", flip_fraction=1.5))
    with pytest.raises(StrategyError):
        adversarial_proof(c5, Language.NONBIPARTITE,
                          AdversaryStrategy("corrupt_honest"))


def test_nonlinear_planted_flips_exactly_the_set():
    p3 = Instance(path_graph(3), ("0", "1", "0"))
    strat = AdversaryStrategy("nonlinear_planted", alpha=0b010, perturb=(0, 5))
    proof = adversarial_proof(p3, Language.LEADER, strat)
    base = hadamard_encode(BitVec.from_int(0b010, 3)).bits
    diff = np.flatnonzero(proof.part(0).bits != base)
    assert list(diff) == [0, 5]


def test_span_wrong_witness_defaults_to_instance_map():
    g = cycle_graph(4)
    inst = Instance(g, ("1", "0", ROOT_MARKER, "2"))  # 0 and 1 form a 2-cycle
    proof = adversarial_proof(inst, Language.SPAN, AdversaryStrategy("wrong_witness"))
    assert proof.part_count == 5
    alpha_r, alphas = span_witness_vectors(inst)
    assert proof.part(0) == hadamard_encode(alpha_r)
    assert alphas[0] == BitVec([1, 1, 0, 0])  # walk 0 -> 1 -> stops at repeat
    assert proof.part(1) == hadamard_encode(alphas[0])


def test_parse_strategy_grammar():
    assert parse_strategy("honest").kind == "honest"
    assert parse_strategy("constant1").bit == 1
    assert parse_strategy("uniform_random_table").kind == "uniform_random_table"
    s = parse_strategy("corrupt_honest flips=3", seed=9)
    assert s.flip_count == 3 and s.seed == 9
    assert parse_strategy("corrupt_honest fraction=0.5").flip_fraction == 0.5
    assert parse_strategy("wrong_witness set=0,1").witness == ("0", "1")
    assert parse_strategy("wrong_witness parents=root,0").witness == ("root", "0")
    s = parse_strategy("nonlinear_planted alpha=5 flips=0,3")
    assert s.alpha == 5 and s.perturb == (0, 3)
    assert parse_strategy("exhaustive k=17").index == 17
    for bad in ("", "mystery", "corrupt_honest", "exhaustive",
                "nonlinear_planted flips=1", "constant bit=x"):
        with pytest.raises(StrategyError):
            parse_strategy(bad)


def test_proof_shape():
    c5 = Instance.bare(cycle_graph(5))
    assert proof_shape(c5, Language.NONBIPARTITE) == (5, 1)
    assert proof_shape(c5, Language.LEADER) == (5, 1)
    assert proof_shape(c5, Language.SPAN) == (5, 6)
