import itertools

import pytest

from dpcp import (Graph, Instance, Language, glue_attack, lcp_prove_leader,
                  lcp_prove_span, lcp_verify_leader, lcp_verify_span)
from dpcp.errors import CapacityError, FormatError, GenerationError, WitnessError
from dpcp.graphs import ROOT_MARKER, cycle_graph, leader_count, membership, path_graph
from dpcp.lcp import (Labeling, format_labeling, id_bits, parse_labeling,
                      _field_widths, _leader_checks)
from helpers import all_labeled_trees


def bfs_inputs(tree: Graph, root: int):
    xs = [None] * tree.n
    xs[root] = ROOT_MARKER
    stack, seen = [root], {root}
    while stack:
        u = stack.pop()
        for v in tree.neighbors(u):
            if v not in seen:
                seen.add(v)
                xs[v] = str(u)
                stack.append(v)
    return tuple(xs)


# ---------------------------------------------------------------------------
# Spanning tree scheme
# ---------------------------------------------------------------------------

def test_prove_span_path_labels():
    inst = Instance(path_graph(3), (ROOT_MARKER, "0", "1"))
    labeling = lcp_prove_span(inst)
    # (root id, distance) pairs (0,0), (0,1), (0,2) in two 2-bit fields
    assert labeling.labels == ("0000", "0001", "0010")
    assert lcp_verify_span(inst, labeling).global_verdict


def test_prove_span_star_all_leaves_distance_one():
    star = Graph(4, [(0, 1), (0, 2), (0, 3)])
    inst = Instance(star, (ROOT_MARKER, "0", "0", "0"))
    labeling = lcp_prove_span(inst)
    assert labeling.labels[1:] == ("0001",) * 3
    assert lcp_verify_span(inst, labeling).global_verdict


def test_prove_span_rejects_invalid_tree():
    with pytest.raises(WitnessError):
        lcp_prove_span(Instance(path_graph(3), ("1", "0", "1")))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_span_scheme_complete_on_all_trees(n):
    for tree in all_labeled_trees(n):
        for root in range(n):
            inst = Instance(tree, bfs_inputs(tree, root))
            labeling = lcp_prove_span(inst)
            assert labeling.max_label_bits <= 2 * id_bits(n)
            assert lcp_verify_span(inst, labeling).global_verdict


def test_span_verifier_rejects_parent_cycle_under_any_labels():
    # no root: following x cycles; any distance labeling must break somewhere
    g = cycle_graph(3)
    inst = Instance(g, ("1", "2", "0"))
    b = id_bits(3)
    for labs in itertools.product(range(1 << (2 * b)), repeat=3):
        labeling = Labeling(tuple(format(v, f"0{2 * b}b") for v in labs))
        assert not lcp_verify_span(inst, labeling).global_verdict


@pytest.mark.parametrize("n", [3, 4])
def test_span_soundness_exhaustive_labelings(n):
    """No labeling within the budget makes an invalid map accepted."""
    g = cycle_graph(n)
    b = id_bits(n)
    invalid = []
    options = [[ROOT_MARKER] + [str(j) for j in g.neighbors(i)] for i in range(n)]
    for xs in itertools.product(*options):
        inst = Instance(g, tuple(xs))
        if not membership(inst, Language.SPAN):
            invalid.append(inst)
    assert invalid
    # exhaustive over all label tuples is 2^(2b*n); keep n small
    all_labels = [format(v, f"0{2 * b}b") for v in range(1 << (2 * b))]
    for inst in invalid[:6]:
        for labs in itertools.product(all_labels, repeat=n):
            assert not lcp_verify_span(inst, Labeling(labs)).global_verdict


@pytest.mark.parametrize("n", [3, 5, 6])
def test_span_single_field_corruption_detected(n):
    for tree in itertools.islice(all_labeled_trees(n), 12):
        inst = Instance(tree, bfs_inputs(tree, 0))
        labeling = lcp_prove_span(inst)
        b = id_bits(n)
        for i in range(n):
            for field in (0, 1):
                original = labeling.labels[i]
                value = int(original[field * b:(field + 1) * b], 2)
                corrupted_val = (value + 1) % (1 << b)
                lab = (original[:field * b] + format(corrupted_val, f"0{b}b")
                       + original[(field + 1) * b:])
                labs = list(labeling.labels)
                labs[i] = lab
                assert not lcp_verify_span(inst, Labeling(tuple(labs))).global_verdict


def test_span_verifier_rejects_malformed_label():
    inst = Instance(path_graph(3), (ROOT_MARKER, "0", "1"))
    labeling = lcp_prove_span(inst)
    labs = list(labeling.labels)
    labs[1] = "010"  # wrong width
    report = lcp_verify_span(inst, Labeling(tuple(labs)))
    assert not report.node_verdicts[1]


# ---------------------------------------------------------------------------
# Leader scheme
# ---------------------------------------------------------------------------

def test_leader_scheme_accepts_path():
    inst = Instance(path_graph(3), ("0", "1", "0"))
    labeling = lcp_prove_leader(inst)
    assert lcp_verify_leader(inst, labeling).global_verdict
    assert labeling.max_label_bits <= 2 * id_bits(3)


def test_leader_scheme_two_leaders_rejected():
    inst = Instance(path_graph(3), ("0", "1", "0"))
    labeling = lcp_prove_leader(inst)
    cheat = Instance(path_graph(3), ("1", "1", "0"))
    report = lcp_verify_leader(cheat, labeling)
    assert not report.node_verdicts[0]  # claims leader but is not the root


def test_leader_scheme_forged_root_rejected():
    # zero leaders: label vertex 1 as a distance-0 root without x(1)=1
    inst = Instance(path_graph(3), ("0", "0", "0"))
    b = id_bits(3)
    labeling = Labeling((format(1, f"0{b}b") + format(1, f"0{b}b"),
                         format(1, f"0{b}b") + format(0, f"0{b}b"),
                         format(1, f"0{b}b") + format(1, f"0{b}b")))
    report = lcp_verify_leader(inst, labeling)
    assert not report.node_verdicts[1]
    assert not report.global_verdict


@pytest.mark.parametrize("n", [2, 4, 6])
def test_leader_scheme_complete_on_trees(n):
    for tree in itertools.islice(all_labeled_trees(n), 10):
        for leader in range(n):
            xs = tuple("1" if i == leader else "0" for i in range(n))
            inst = Instance(tree, xs)
            assert lcp_verify_leader(inst, lcp_prove_leader(inst)).global_verdict


# ---------------------------------------------------------------------------
# Gluing attack
# ---------------------------------------------------------------------------

def test_glue_attack_finds_certified_fooling_instance():
    result = glue_attack("leader_cycle", label_bits=2, cycle_size=4)
    assert result is not None
    inst = result.instance
    assert inst.graph.n == 8
    assert leader_count(inst) != 1  # ground-truth no-instance
    widths = _field_widths(2, 4)
    verdict = _leader_checks(inst.graph, list(inst.inputs), result.labeling,
                             widths[0], widths[1])
    assert verdict.global_verdict


def test_glue_attack_fails_at_full_length_labels():
    assert glue_attack("leader_cycle", label_bits=4, cycle_size=4) is None


def test_glue_attack_argument_errors():
    with pytest.raises(GenerationError):
        glue_attack("leader_cycle", 2, 2)
    with pytest.raises(CapacityError):
        glue_attack("leader_cycle", 8, 4)
    with pytest.raises(FormatError):
        glue_attack("span_cycle", 2, 4)


def test_field_widths_policy():
    assert _field_widths(2, 4) == (0, 2)   # squeezed: all bits to distance
    assert _field_widths(4, 4) == (2, 2)   # full length
    assert _field_widths(6, 8) == (3, 3)


# ---------------------------------------------------------------------------
# Label files
# ---------------------------------------------------------------------------

def test_labeling_file_roundtrip():
    labeling = Labeling(("0000", "0001", "0010", "", "1"))
    text = format_labeling(labeling)
    assert parse_labeling(text) == labeling


def test_labeling_file_rejects_malformed():
    with pytest.raises(FormatError):
        parse_labeling("label 0 zz 4\n")
    with pytest.raises(FormatError):
        parse_labeling("label 0 00 4\nlabel 2 00 4\n")
    with pytest.raises(FormatError):
        parse_labeling("nonsense\n")
    with pytest.raises(FormatError):
        parse_labeling("label 0 00 99\n")
