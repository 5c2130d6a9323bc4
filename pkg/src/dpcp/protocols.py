"""Per-node verifier programs and the global accept semantics.

One protocol run instantiates a query-counted oracle session per node
(seeded by folding the run seed with the node id) and executes
``verifier_repetitions`` passes; a node accepts iff every pass passes and
the run accepts iff every node accepts.

Check schedule per pass:

* nonbipartite: linearity test, robust read of the own coordinate
  (published to the neighbor exchange), the exactly-two-marked-neighbors
  rule for marked nodes, then the robust all-ones parity check.
* leader: linearity test, robust read of the own coordinate against the
  input bit, then either a direct read at a random point punctured at the
  own coordinate (leaders) or the robust parity check (everyone else).
* spanning tree: the leader subprotocol on part 0 with the derived
  am-I-root input, a local syntactic check that the input names a real
  neighbor, then linearity tests on the own and parent parts plus the two
  telescoping edge checks.

Robust (self-corrected) reads are used at the fixed query points, where a
single table lookup could be adversarially planted; reads at freshly
sampled random points are direct lookups, which keeps the per-pass coin
budget at the documented linear-in-n schedule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from . import kernels
from .errors import ConfigError, ProtocolError
from .gf2 import MultiProof, OracleSession, blr_linearity_test, self_corrected_query_int
from .graphs import Instance, Language, span_parent_array
from .prover import proof_shape
from .rng import fold

CHECK_BLR = "blr"
CHECK_NEIGHBORS = "neighbors"
CHECK_PARITY = "parity"
CHECK_POINT = "point"
CHECK_PUNCTURE = "puncture"
CHECK_SUB_BLR = "sub_blr"
CHECK_SUB_POINT = "sub_point"
CHECK_SUB_PARITY = "sub_parity"
CHECK_SUB_PUNCTURE = "sub_puncture"
CHECK_SYNTAX = "syntax"
CHECK_BLR_SELF = "blr_self"
CHECK_BLR_PARENT = "blr_parent"
CHECK_EDGE_POINT = "edge_point"
CHECK_EDGE_PUNCTURE = "edge_puncture"


@dataclass(frozen=True)
class ProtocolConfig:
    """Tunable verifier parameters; acceptance is AND across repetitions."""

    language: Language
    blr_repetitions: int = 1
    verifier_repetitions: int = 1

    def __post_init__(self):
        if self.blr_repetitions < 1 or self.verifier_repetitions < 1:
            raise ConfigError("repetition counts must be at least 1")


@dataclass(frozen=True)
class NodeReport:
    node: int
    accepted: bool
    first_failed: Optional[str]
    query_count: int
    random_bits_used: int


@dataclass(frozen=True)
class RunReport:
    language: Language
    n: int
    config: ProtocolConfig
    proof_bits: int
    nodes: Tuple[NodeReport, ...]

    @property
    def global_verdict(self) -> bool:
        return all(nr.accepted for nr in self.nodes)

    @property
    def max_queries(self) -> int:
        return max(nr.query_count for nr in self.nodes)

    @property
    def max_random_bits(self) -> int:
        return max(nr.random_bits_used for nr in self.nodes)


def query_budget(cfg: ProtocolConfig) -> int:
    """Documented per-node query ceiling: a function of cfg only, never n."""
    k, reps = cfg.blr_repetitions, cfg.verifier_repetitions
    if cfg.language is Language.SPAN:
        return (9 * k + 10) * reps
    return (3 * k + 4) * reps


def random_bit_budget(cfg: ProtocolConfig, n: int) -> int:
    """Documented per-node coin ceiling, linear in n."""
    k, reps = cfg.blr_repetitions, cfg.verifier_repetitions
    if cfg.language is Language.SPAN:
        return (6 * n * k + 5 * n - 1) * reps
    return (2 * n * k + 2 * n) * reps


class NeighborExchange:
    """Write-once-per-(pass, node) publication board for the one
    communication round.  Reading an unpublished slot is a wiring bug and
    raises ProtocolError rather than rejecting."""

    def __init__(self, n: int):
        self._n = n
        self._slots: Dict[Tuple[int, int], int] = {}

    def publish(self, pass_idx: int, node: int, value: int) -> None:
        key = (pass_idx, node)
        if key in self._slots and self._slots[key] != value:
            raise ProtocolError(f"conflicting publication for node {node} pass {pass_idx}")
        self._slots[key] = value

    def read(self, pass_idx: int, node: int) -> int:
        try:
            return self._slots[(pass_idx, node)]
        except KeyError:
            raise ProtocolError(
                f"node {node} has not published for pass {pass_idx}") from None


class _Failures:
    """Collects failed check ids in schedule order."""

    def __init__(self):
        self.ids: List[str] = []

    def check(self, ok: bool, check_id: str) -> None:
        if not ok:
            self.ids.append(check_id)

    @property
    def accepted(self) -> bool:
        return not self.ids

    @property
    def first(self) -> Optional[str]:
        return self.ids[0] if self.ids else None


def _nonbip_pre_pass(node: int, session: OracleSession, cfg: ProtocolConfig,
                     pass_idx: int) -> Tuple[int, bool, bool]:
    """Pass stage before the exchange: (published a, blr ok, parity ok)."""
    session.begin_pass(pass_idx)
    n = session.proof.dim
    blr_ok = blr_linearity_test(session, 0, cfg.blr_repetitions)
    a_bit = self_corrected_query_int(session, 0, 1 << node, kernels.KIND_POINT)
    parity = self_corrected_query_int(session, 0, (1 << n) - 1, kernels.KIND_PARITY)
    return a_bit, blr_ok, parity == 1


def run_nonbipartite_verifier(node: int, inst: Instance, session: OracleSession,
                              shared: NeighborExchange,
                              cfg: ProtocolConfig) -> NodeReport:
    """Full per-node program; neighbors must have published their marks."""
    fails = _Failures()
    for p in range(cfg.verifier_repetitions):
        a_bit, blr_ok, parity_ok = _nonbip_pre_pass(node, session, cfg, p)
        shared.publish(p, node, a_bit)
        fails.check(blr_ok, CHECK_BLR)
        if a_bit == 1:
            marked = sum(1 for j in inst.graph.neighbors(node)
                         if shared.read(p, j) == 1)
            fails.check(marked == 2, CHECK_NEIGHBORS)
        fails.check(parity_ok, CHECK_PARITY)
    return NodeReport(node, fails.accepted, fails.first,
                      session.query_count, session.random_bits_used)


def run_leader_verifier(node: int, inst: Instance, session: OracleSession,
                        cfg: ProtocolConfig) -> NodeReport:
    x = inst.x(node)
    if x not in ("0", "1"):
        raise ConfigError(f"leader input at vertex {node} must be 0 or 1")
    xbit = int(x)
    n = session.proof.dim
    fails = _Failures()
    for p in range(cfg.verifier_repetitions):
        session.begin_pass(p)
        fails.check(blr_linearity_test(session, 0, cfg.blr_repetitions), CHECK_BLR)
        own = self_corrected_query_int(session, 0, 1 << node, kernels.KIND_POINT)
        fails.check(own == xbit, CHECK_POINT)
        if xbit == 1:
            point = session.draw_punctured(kernels.KIND_PUNCTURE, 0, n, node)
            fails.check(session.query(0, point) == 0, CHECK_PUNCTURE)
        else:
            parity = self_corrected_query_int(session, 0, (1 << n) - 1,
                                              kernels.KIND_PARITY)
            fails.check(parity == 1, CHECK_PARITY)
    return NodeReport(node, fails.accepted, fails.first,
                      session.query_count, session.random_bits_used)


def run_span_verifier(node: int, inst: Instance, session: OracleSession,
                      cfg: ProtocolConfig) -> NodeReport:
    parent_arr, syntax_arr = span_parent_array(inst)
    return _span_verifier(node, parent_arr, syntax_arr, session, cfg)


def _span_verifier(node: int, parent_arr, syntax_arr, session: OracleSession,
                   cfg: ProtocolConfig) -> NodeReport:
    n = session.proof.dim
    parent = int(parent_arr[node])
    is_root = parent == -1
    fails = _Failures()
    for p in range(cfg.verifier_repetitions):
        session.begin_pass(p)
        # Leader subprotocol on part 0 with derived input [x(i) == root].
        fails.check(blr_linearity_test(session, 0, cfg.blr_repetitions),
                    CHECK_SUB_BLR)
        own = self_corrected_query_int(session, 0, 1 << node, kernels.KIND_POINT)
        fails.check(own == (1 if is_root else 0), CHECK_SUB_POINT)
        if is_root:
            point = session.draw_punctured(kernels.KIND_PUNCTURE, 0, n, node)
            fails.check(session.query(0, point) == 0, CHECK_SUB_PUNCTURE)
        else:
            parity = self_corrected_query_int(session, 0, (1 << n) - 1,
                                              kernels.KIND_PARITY)
            fails.check(parity == 1, CHECK_SUB_PARITY)
        fails.check(bool(syntax_arr[node]), CHECK_SYNTAX)
        if parent >= 0:
            own_part, par_part = 1 + node, 1 + parent
            fails.check(_blr_edge(session, own_part, cfg.blr_repetitions,
                                  kernels.KIND_EBLR_SELF_X, kernels.KIND_EBLR_SELF_Y),
                        CHECK_BLR_SELF)
            fails.check(_blr_edge(session, par_part, cfg.blr_repetitions,
                                  kernels.KIND_EBLR_PAR_X, kernels.KIND_EBLR_PAR_Y),
                        CHECK_BLR_PARENT)
            c1 = self_corrected_query_int(session, own_part, 1 << node,
                                          kernels.KIND_EPOINT_SELF)
            c2 = self_corrected_query_int(session, par_part, 1 << node,
                                          kernels.KIND_EPOINT_PAR)
            fails.check(c1 ^ c2 == 1, CHECK_EDGE_POINT)
            point = session.draw_punctured(kernels.KIND_EPUNCTURE, 0, n, node)
            fails.check(session.query(own_part, point)
                        ^ session.query(par_part, point) == 0, CHECK_EDGE_PUNCTURE)
    return NodeReport(node, fails.accepted, fails.first,
                      session.query_count, session.random_bits_used)


def _blr_edge(session: OracleSession, part: int, reps: int,
              kind_x: int, kind_y: int) -> bool:
    n = session.proof.dim
    ok = True
    for j in range(reps):
        x = session.draw_bits(kind_x, j, n)
        y = session.draw_bits(kind_y, j, n)
        if session.query(part, x) ^ session.query(part, y) != session.query(part, x ^ y):
            ok = False
    return ok


def run_protocol(inst: Instance, proof: MultiProof, cfg: ProtocolConfig,
                 seed: int) -> RunReport:
    """One full protocol run; deterministic given (inst, proof, cfg, seed)."""
    n = inst.graph.n
    dim, parts = proof_shape(inst, cfg.language)
    if proof.dim != dim or proof.part_count != parts:
        raise ConfigError(
            f"proof shape (dim={proof.dim}, parts={proof.part_count}) does not "
            f"match {cfg.language.value} on n={n}")
    node_seeds = [fold(seed, i) for i in range(n)]
    reports: List[NodeReport] = []
    if cfg.language is Language.NONBIPARTITE:
        exchange = NeighborExchange(n)
        for i in range(n):
            scratch = OracleSession(proof, node_seeds[i])
            for p in range(cfg.verifier_repetitions):
                a_bit, _, _ = _nonbip_pre_pass(i, scratch, cfg, p)
                exchange.publish(p, i, a_bit)
        for i in range(n):
            session = OracleSession(proof, node_seeds[i])
            reports.append(run_nonbipartite_verifier(i, inst, session, exchange, cfg))
    elif cfg.language is Language.LEADER:
        for i in range(n):
            session = OracleSession(proof, node_seeds[i])
            reports.append(run_leader_verifier(i, inst, session, cfg))
    else:
        parent_arr, syntax_arr = span_parent_array(inst)
        for i in range(n):
            session = OracleSession(proof, node_seeds[i])
            reports.append(_span_verifier(i, parent_arr, syntax_arr, session, cfg))
    return RunReport(cfg.language, n, cfg, proof.total_bits, tuple(reports))
