import pytest

from dpcp import (AdversaryStrategy, BitVec, Instance, Language, MultiProof,
                  OracleSession, ProtocolConfig, adversarial_proof,
                  hadamard_encode, honest_proof, run_protocol,
                  run_leader_verifier, run_nonbipartite_verifier,
                  run_span_verifier, generate)
from dpcp.errors import ConfigError, ProtocolError
from dpcp.graphs import ROOT_MARKER, complete_graph, path_graph
from dpcp.protocols import (NeighborExchange, query_budget, random_bit_budget)
from dpcp.rng import fold


def _cfg(lang, blr=1, reps=1):
    return ProtocolConfig(lang, blr_repetitions=blr, verifier_repetitions=reps)


# ---------------------------------------------------------------------------
# Nonbipartite
# ---------------------------------------------------------------------------

def test_c5_honest_accepts_with_constant_budget():
    inst = generate("cycle 5", 0)
    proof = honest_proof(inst, Language.NONBIPARTITE)
    for seed in range(25):
        report = run_protocol(inst, proof, _cfg(Language.NONBIPARTITE), seed)
        assert report.global_verdict
        for nr in report.nodes:
            assert nr.query_count == 7
            assert nr.random_bits_used == 4 * 5


def test_c4_all_ones_fails_parity_deterministically():
    inst = generate("cycle 4", 0)
    proof = MultiProof([hadamard_encode(BitVec.ones(4))])
    for seed in range(25):
        report = run_protocol(inst, proof, _cfg(Language.NONBIPARTITE), seed)
        assert not report.global_verdict
        for nr in report.nodes:
            assert not nr.accepted
            assert nr.first_failed == "parity"


@pytest.mark.parametrize("n", [3, 5, 7, 9])
def test_honest_odd_cycles_every_node_sees_two_marks(n):
    inst = generate(f"cycle {n}", 0)
    proof = honest_proof(inst, Language.NONBIPARTITE)
    # the witness marks the whole cycle; each node has exactly 2 marked
    # neighbors besides itself, so the exchange rule passes everywhere
    for seed in (1, 2, 3):
        report = run_protocol(inst, proof, _cfg(Language.NONBIPARTITE), seed)
        assert report.global_verdict


def test_nonbipartite_verifier_needs_published_neighbors():
    inst = generate("cycle 5", 0)
    proof = honest_proof(inst, Language.NONBIPARTITE)
    session = OracleSession(proof, fold(3, 0))
    empty = NeighborExchange(5)
    with pytest.raises(ProtocolError):
        run_nonbipartite_verifier(0, inst, session, empty, _cfg(Language.NONBIPARTITE))


def test_exchange_rejects_conflicting_republication():
    ex = NeighborExchange(3)
    ex.publish(0, 1, 1)
    ex.publish(0, 1, 1)  # idempotent replay is fine
    with pytest.raises(ProtocolError):
        ex.publish(0, 1, 0)


def test_nonbipartite_per_node_op_matches_run_protocol():
    inst = generate("cycle 5", 0)
    proof = honest_proof(inst, Language.NONBIPARTITE)
    cfg = _cfg(Language.NONBIPARTITE, blr=2, reps=2)
    seed = 11
    report = run_protocol(inst, proof, cfg, seed)
    exchange = NeighborExchange(5)
    # replay publications, then drive the per-node op directly
    from dpcp.protocols import _nonbip_pre_pass
    for i in range(5):
        scratch = OracleSession(proof, fold(seed, i))
        for p in range(cfg.verifier_repetitions):
            a, _, _ = _nonbip_pre_pass(i, scratch, cfg, p)
            exchange.publish(p, i, a)
    for i in range(5):
        session = OracleSession(proof, fold(seed, i))
        nr = run_nonbipartite_verifier(i, inst, session, exchange, cfg)
        assert nr == report.nodes[i]


# ---------------------------------------------------------------------------
# Leader
# ---------------------------------------------------------------------------

def test_leader_honest_accepts_and_budgets():
    inst = generate("path 3 leader=1", 0)
    proof = honest_proof(inst, Language.LEADER)
    for seed in range(25):
        report = run_protocol(inst, proof, _cfg(Language.LEADER), seed)
        assert report.global_verdict
        # leader node reads the random point directly: one query fewer
        assert [nr.query_count for nr in report.nodes] == [7, 6, 7]
        assert [nr.random_bits_used for nr in report.nodes] == [12, 11, 12]


def test_leader_zero_leaders_rejects_every_linear_proof():
    inst = Instance(path_graph(3), ("0", "0", "0"))
    for alpha in range(8):
        proof = MultiProof([hadamard_encode(BitVec.from_int(alpha, 3))])
        for seed in range(8):
            report = run_protocol(inst, proof, _cfg(Language.LEADER), seed)
            assert not report.global_verdict


def test_leader_two_leaders_honest_style_proof():
    inst = Instance(path_graph(3), ("1", "0", "1"))
    proof = MultiProof([hadamard_encode(BitVec([1, 0, 1]))])
    rejected = 0
    for seed in range(40):
        report = run_protocol(inst, proof, _cfg(Language.LEADER), seed)
        # node 1 expects parity 1 but the table encodes even weight
        assert not report.nodes[1].accepted
        assert report.nodes[1].first_failed == "parity"
        rejected += not report.global_verdict
    assert rejected == 40


def test_leader_input_validation():
    inst = Instance(path_graph(2), ("1", "x"))
    proof = MultiProof([hadamard_encode(BitVec([1, 0]))])
    with pytest.raises(ConfigError):
        run_protocol(inst, proof, _cfg(Language.LEADER), 0)


# ---------------------------------------------------------------------------
# Span
# ---------------------------------------------------------------------------

def test_span_honest_accepts_with_documented_budget():
    inst = Instance(complete_graph(3), (ROOT_MARKER, "0", "0"))
    proof = honest_proof(inst, Language.SPAN)
    for seed in range(25):
        report = run_protocol(inst, proof, _cfg(Language.SPAN), seed)
        assert report.global_verdict
        assert report.nodes[0].query_count == 6       # root: subprotocol only
        assert report.nodes[1].query_count == 19      # 9k + 10 at k=1
        assert report.nodes[2].query_count == 19
        assert report.max_queries == query_budget(_cfg(Language.SPAN))
        assert report.max_random_bits == random_bit_budget(_cfg(Language.SPAN), 3)


def test_span_duplicate_part_fails_edge_point_check():
    inst = Instance(path_graph(3), (ROOT_MARKER, "0", "1"))
    honest = honest_proof(inst, Language.SPAN)
    parts = list(honest.parts)
    parts[2] = parts[1]  # node 1's own part now equals its parent's part
    proof = MultiProof(parts)
    for seed in range(25):
        report = run_protocol(inst, proof, _cfg(Language.SPAN), seed)
        assert not report.nodes[1].accepted
        assert report.nodes[1].first_failed == "edge_point"


def test_span_parent_cycle_rejected_via_subprotocol():
    inst = Instance(complete_graph(3), ("1", "2", "0"))
    proof = adversarial_proof(inst, Language.SPAN, AdversaryStrategy("wrong_witness"))
    for seed in range(25):
        report = run_protocol(inst, proof, _cfg(Language.SPAN), seed)
        assert not report.global_verdict
        assert all(nr.first_failed == "sub_parity" for nr in report.nodes)


def test_span_non_neighbor_parent_fails_syntax():
    inst = Instance(path_graph(3), (ROOT_MARKER, "0", "0"))
    proof = adversarial_proof(inst, Language.SPAN, AdversaryStrategy("wrong_witness"))
    report = run_protocol(inst, proof, _cfg(Language.SPAN), 3)
    assert not report.nodes[2].accepted
    assert report.nodes[2].first_failed == "syntax"


def test_span_verifier_op_matches_run_protocol():
    inst = generate("tree 5 span=yes", 8)
    proof = honest_proof(inst, Language.SPAN)
    cfg = _cfg(Language.SPAN, blr=2)
    report = run_protocol(inst, proof, cfg, 21)
    for i in range(5):
        nr = run_span_verifier(i, inst, OracleSession(proof, fold(21, i)), cfg)
        assert nr == report.nodes[i]


def test_leader_verifier_op_matches_run_protocol():
    inst = generate("cycle 4 leader=2", 0)
    proof = honest_proof(inst, Language.LEADER)
    cfg = _cfg(Language.LEADER, reps=2)
    report = run_protocol(inst, proof, cfg, 5)
    for i in range(4):
        nr = run_leader_verifier(i, inst, OracleSession(proof, fold(5, i)), cfg)
        assert nr == report.nodes[i]


# ---------------------------------------------------------------------------
# Run semantics
# ---------------------------------------------------------------------------

def test_run_protocol_deterministic():
    inst = generate("cycle 6", 0)
    proof = adversarial_proof(inst, Language.NONBIPARTITE,
                              AdversaryStrategy("uniform_random_table", seed=2))
    cfg = _cfg(Language.NONBIPARTITE, blr=2, reps=2)
    assert run_protocol(inst, proof, cfg, 9) == run_protocol(inst, proof, cfg, 9)


def test_run_protocol_shape_mismatch():
    inst = generate("cycle 5", 0)
    proof = honest_proof(inst, Language.NONBIPARTITE)
    with pytest.raises(ConfigError):
        run_protocol(inst, proof, _cfg(Language.SPAN), 0)


def test_repetition_verdicts_couple_exactly():
    # matched seeds: a run with more passes or more linearity repetitions
    # accepts only if the smaller run did
    inst = generate("cycle 5", 0)
    proof = adversarial_proof(inst, Language.NONBIPARTITE,
                              AdversaryStrategy("corrupt_honest", flip_count=3, seed=4))
    for seed in range(60):
        verdicts = {}
        for blr in (1, 2):
            for reps in (1, 2):
                cfg = _cfg(Language.NONBIPARTITE, blr=blr, reps=reps)
                verdicts[(blr, reps)] = run_protocol(inst, proof, cfg, seed).global_verdict
        assert verdicts[(1, 2)] <= verdicts[(1, 1)]
        assert verdicts[(2, 1)] <= verdicts[(1, 1)]
        assert verdicts[(2, 2)] <= verdicts[(2, 1)] <= verdicts[(1, 1)]


def test_budget_functions_are_cfg_constants():
    for lang in Language:
        for blr in (1, 3):
            for reps in (1, 2):
                cfg = ProtocolConfig(lang, blr_repetitions=blr,
                                     verifier_repetitions=reps)
                q = query_budget(cfg)
                for desc, seed in {
                    Language.NONBIPARTITE: [("cycle 5", 0), ("cycle 9", 1)],
                    Language.LEADER: [("path 4 leader=1", 0), ("cycle 8 leader=3", 1)],
                    Language.SPAN: [("tree 4 span=yes", 0), ("tree 8 span=yes", 1)],
                }[lang]:
                    inst = generate(desc, seed)
                    proof = honest_proof(inst, lang)
                    report = run_protocol(inst, proof, cfg, 17)
                    assert report.max_queries <= q
                    assert report.max_random_bits <= random_bit_budget(cfg, inst.graph.n)


def test_config_validation():
    with pytest.raises(ConfigError):
        ProtocolConfig(Language.LEADER, blr_repetitions=0)
    with pytest.raises(ConfigError):
        ProtocolConfig(Language.LEADER, verifier_repetitions=0)
