"""Deterministic proof-labeling baseline and the cycle-gluing attack.

Labels are per-vertex bit strings checked by radius-1 deterministic
verifiers.  The provided schemes certify spanning trees and unique leaders
with (root id, distance) labels of at most 2*ceil(log2 n) bits.  The glue
attack demonstrates why label budgets below that are hopeless on cycles:
it splices two accepting labeled yes-cycles into a longer no-cycle whose
every local view already occurred in an accepting run, so the verifier
accepts a non-member.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log2
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import CapacityError, FormatError, GenerationError, WitnessError
from .graphs import (Graph, Instance, ROOT_MARKER, cycle_graph,
                     is_valid_spanning_tree, leader_count, parse_parent)


def id_bits(n: int) -> int:
    """Bits needed to address n vertices: ceil(log2 n), zero for n=1."""
    return 0 if n <= 1 else ceil(log2(n))


@dataclass(frozen=True)
class Labeling:
    """One bit-string label per vertex."""

    labels: Tuple[str, ...]

    def __post_init__(self):
        for lab in self.labels:
            if any(c not in "01" for c in lab):
                raise FormatError(f"labels must be bit strings, got {lab!r}")

    @property
    def max_label_bits(self) -> int:
        return max((len(lab) for lab in self.labels), default=0)

    def label(self, i: int) -> str:
        return self.labels[i]


def _pack(value: int, width: int) -> str:
    if value >> width and width >= 0:
        raise FormatError(f"value {value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


def _unpack(bits: str) -> int:
    return int(bits, 2) if bits else 0


def _split_label(label: str, widths: Sequence[int]) -> Optional[List[int]]:
    if len(label) != sum(widths):
        return None
    out, pos = [], 0
    for w in widths:
        out.append(_unpack(label[pos:pos + w]))
        pos += w
    return out


@dataclass(frozen=True)
class LcpReport:
    node_verdicts: Tuple[bool, ...]

    @property
    def global_verdict(self) -> bool:
        return all(self.node_verdicts)


# ---------------------------------------------------------------------------
# Spanning tree scheme
# ---------------------------------------------------------------------------

def lcp_prove_span(inst: Instance) -> Labeling:
    """Label every vertex with (root id, distance to root along parents)."""
    if not is_valid_spanning_tree(inst):
        raise WitnessError("inputs do not define a valid spanning tree")
    g = inst.graph
    b = id_bits(g.n)
    root = next(i for i in range(g.n) if inst.x(i) == ROOT_MARKER)
    labels = []
    for i in range(g.n):
        dist, cur = 0, i
        while cur != root:
            cur = parse_parent(inst, cur)
            dist += 1
        labels.append(_pack(root, b) + _pack(dist, b))
    return Labeling(tuple(labels))


def lcp_verify_span(inst: Instance, labeling: Labeling) -> LcpReport:
    """Deterministic radius-1 verification of the (root, distance) labels.

    Node i accepts iff its label parses, all neighbors agree on the root
    id, a root-marked vertex is the named root at distance 0, and any
    other vertex names a neighbor whose distance is exactly one less.
    """
    g = inst.graph
    b = id_bits(g.n)
    fields = [_split_label(labeling.label(i), (b, b)) for i in range(g.n)]
    verdicts = []
    for i in range(g.n):
        own = fields[i]
        if own is None:
            verdicts.append(False)
            continue
        root_id, dist = own
        ok = True
        for j in g.neighbors(i):
            if fields[j] is None or fields[j][0] != root_id:
                ok = False
        p = parse_parent(inst, i)
        if p == ROOT_MARKER:
            ok &= (i == root_id and dist == 0)
        elif p is None or p == i or not g.has_edge(i, p):
            ok = False
        else:
            ok &= fields[p] is not None and dist == fields[p][1] + 1
        verdicts.append(bool(ok))
    return LcpReport(tuple(verdicts))


# ---------------------------------------------------------------------------
# Leader scheme
# ---------------------------------------------------------------------------

def lcp_prove_leader(inst: Instance) -> Labeling:
    """BFS-tree certificate rooted at the leader: (leader id, BFS depth)."""
    if leader_count(inst) != 1:
        raise WitnessError("instance does not have exactly one leader")
    g = inst.graph
    leader = next(i for i in range(g.n) if inst.x(i) == "1")
    b = id_bits(g.n)
    dist = [-1] * g.n
    dist[leader] = 0
    frontier = [leader]
    while frontier:
        nxt = []
        for u in frontier:
            for v in g.neighbors(u):
                if dist[v] == -1:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return Labeling(tuple(_pack(leader, b) + _pack(dist[i], b) for i in range(g.n)))


def lcp_verify_leader(inst: Instance, labeling: Labeling) -> LcpReport:
    """Distance-certificate checks plus x(i)=1 iff i is the labeled root."""
    g = inst.graph
    b = id_bits(g.n)
    return _leader_checks(g, [inst.x(i) for i in range(g.n)], labeling,
                          root_bits=b, dist_bits=b)


def _leader_checks(g: Graph, xs: Sequence[str], labeling: Labeling,
                   root_bits: int, dist_bits: int) -> LcpReport:
    """Width-parameterized leader verification, shared with the glue demo.

    With full-width fields this is sound; with a squeezed budget the root
    field (uniqueness) is sacrificed first, which is exactly the weakness
    the gluing attack exploits.  Root ids are compared as plain integers,
    so a vertex whose id cannot be expressed in the field can never claim
    to be the root.
    """
    fields = [_split_label(labeling.label(i), (root_bits, dist_bits))
              for i in range(g.n)]
    verdicts = []
    for i in range(g.n):
        own = fields[i]
        if own is None or xs[i] not in ("0", "1"):
            verdicts.append(False)
            continue
        root_id, dist = own
        leader = xs[i] == "1"
        ok = True
        if root_bits:
            for j in g.neighbors(i):
                if fields[j] is None or fields[j][0] != root_id:
                    ok = False
        ok &= (dist == 0) == leader
        if leader and root_bits:
            ok &= root_id == i
        if dist != 0:
            ok &= any(fields[j] is not None and fields[j][1] == dist - 1
                      for j in g.neighbors(i))
        verdicts.append(bool(ok))
    return LcpReport(tuple(verdicts))


# ---------------------------------------------------------------------------
# Gluing attack
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GlueAttackResult:
    instance: Instance
    labeling: Labeling
    window_width: int
    leader_positions: Tuple[int, ...]


def _field_widths(label_bits: int, cycle_size: int) -> Tuple[int, int]:
    """Split a label budget into (root, distance) fields.

    The distance chain is the completeness-critical part, so it is funded
    first; whatever remains goes to the root id.
    """
    dist = min(label_bits, id_bits(cycle_size))
    return label_bits - dist, dist


def _accepting_yes_cycles(m: int, label_bits: int,
                          widths: Tuple[int, int]) -> List[Tuple[Tuple[str, str], ...]]:
    """All accepting (input, label) sequences of single-leader m-cycles.

    Enumerates every labeling of every leader position with vectorized
    checks; rotations of one accepting cycle are themselves accepting, so
    sequences are deduplicated up to nothing (each rotation kept, letting
    the splice search match windows without re-rotating).
    """
    g = cycle_graph(m)
    rb, db = widths
    total = label_bits * m
    count = 1 << total
    mask = (1 << label_bits) - 1
    sequences = set()
    block = min(count, 1 << 20)
    for start in range(0, count, block):
        lab_blk = np.arange(start, min(start + block, count), dtype=np.int64)
        per_vertex = []
        for i in range(m):
            v = (lab_blk >> (i * label_bits)) & mask
            per_vertex.append((v >> db, v & ((1 << db) - 1)))
        for p in range(m):
            ok = np.ones(lab_blk.size, dtype=bool)
            for i in range(m):
                root_i, dist_i = per_vertex[i]
                leader = i == p
                if rb:
                    for j in g.neighbors(i):
                        ok &= per_vertex[j][0] == root_i
                    if leader:
                        ok &= root_i == i
                ok &= (dist_i == 0) == leader
                has_pred = np.zeros(lab_blk.size, dtype=bool)
                for j in g.neighbors(i):
                    has_pred |= per_vertex[j][1] == dist_i - 1
                ok &= (dist_i == 0) | has_pred
            for lab in lab_blk[ok]:
                seq = tuple(
                    ("1" if i == p else "0",
                     _pack(int((lab >> (i * label_bits)) & mask), label_bits))
                    for i in range(m))
                sequences.add(seq)
    return sorted(sequences)


def _splice(seq_a, seq_b, m: int):
    """Glue two labeled cycles cut inside a shared leading window.

    Layout: a_1..a_{m-1} a_0 b_1..b_{m-1} b_0 around a 2m-cycle; with the
    first two entries equal between the sequences every vertex keeps a
    neighborhood view it already had in its source cycle.
    """
    order = list(range(1, m)) + [0]
    entries = [seq_a[i] for i in order] + [seq_b[i] for i in order]
    xs = tuple(e[0] for e in entries)
    labels = tuple(e[1] for e in entries)
    return xs, labels


def glue_attack(verifier: str, label_bits: int, cycle_size: int,
                budget: int = 1 << 24) -> Optional[GlueAttackResult]:
    """Search for a fooling no-instance for the leader-on-cycles verifier.

    Enumerates accepting labeled yes-cycles of the given size, then tries
    window widths 1..3: two accepting cycles sharing a leading window are
    spliced into a double-length cycle, which is certified as a
    ground-truth no-instance and re-verified.  Returns the first certified
    fooling instance, or None when the search exhausts.
    """
    if verifier != "leader_cycle":
        raise FormatError(f"unknown verifier descriptor {verifier!r}")
    if cycle_size < 3:
        raise GenerationError("cycle size must be at least 3")
    if label_bits < 1:
        raise GenerationError("label budget must be at least 1 bit")
    if (1 << (label_bits * cycle_size)) > budget:
        raise CapacityError(
            f"labeling space 2^{label_bits * cycle_size} exceeds budget {budget}")
    m = cycle_size
    widths = _field_widths(label_bits, m)
    accepting = _accepting_yes_cycles(m, label_bits, widths)
    big = cycle_graph(2 * m)
    by_window: Dict[Tuple, List[int]] = {}
    for w in (1, 2, 3):
        if w > m:
            break
        by_window.clear()
        for idx, seq in enumerate(accepting):
            by_window.setdefault(seq[:w], []).append(idx)
        for group in by_window.values():
            for ia in group:
                for ib in group:
                    xs, labels = _splice(accepting[ia], accepting[ib], m)
                    inst = Instance(big, xs)
                    if leader_count(inst) == 1:
                        continue
                    labeling = Labeling(labels)
                    verdict = _leader_checks(big, list(xs), labeling,
                                             widths[0], widths[1])
                    if verdict.global_verdict:
                        leaders = tuple(i for i, x in enumerate(xs) if x == "1")
                        return GlueAttackResult(inst, labeling, w, leaders)
    return None


# ---------------------------------------------------------------------------
# Label file format
# ---------------------------------------------------------------------------

def format_labeling(labeling: Labeling) -> str:
    """Lines ``label i <hex bit-string> <bit-length>``; bits are packed
    little-endian, lowest label bit first."""
    lines = []
    for i, lab in enumerate(labeling.labels):
        bits = np.array([int(c) for c in lab], dtype=np.uint8)
        packed = np.packbits(bits, bitorder="little") if lab else np.array([], dtype=np.uint8)
        lines.append(f"label {i} {packed.tobytes().hex() or '00'} {len(lab)}")
    return "\n".join(lines) + "\n"


def parse_labeling(text: str) -> Labeling:
    entries: Dict[int, str] = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        if len(parts) != 4 or parts[0] != "label":
            raise FormatError(f"bad label line {ln!r}")
        try:
            i = int(parts[1])
            raw = bytes.fromhex(parts[2])
            nbits = int(parts[3])
        except ValueError:
            raise FormatError(f"bad label line {ln!r}") from None
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        if nbits > bits.size:
            raise FormatError(f"label {i} claims more bits than provided")
        entries[i] = "".join(str(int(b)) for b in bits[:nbits])
    if sorted(entries) != list(range(len(entries))):
        raise FormatError("labels must cover vertices 0..n-1")
    return Labeling(tuple(entries[i] for i in range(len(entries))))
