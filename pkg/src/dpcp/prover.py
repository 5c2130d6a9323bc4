"""Honest proof construction and adversarial proof strategies.

Honest proofs encode a witness for the claimed language; adversaries
instantiate the soundness quantifier by producing arbitrary committed
proofs of the right shape.  Generic strategies (constant, uniform,
corruption, exhaustive) operate on the serialized proof bits and are
language-agnostic; witness-level strategies re-use the honest encoders on
non-witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import StrategyError, WitnessError
from .gf2 import BitVec, MultiProof, hadamard_encode
from .graphs import (Instance, Language, ROOT_MARKER, find_odd_cycle,
                     leader_count, is_valid_spanning_tree, parse_parent)
from .rng import SplitMix, chain


def proof_shape(inst: Instance, language: Language) -> Tuple[int, int]:
    """(dimension, part count) of a well-formed proof for the language."""
    n = inst.graph.n
    if language is Language.SPAN:
        return n, n + 1
    return n, 1


def honest_proof_nonbipartite(inst: Instance) -> MultiProof:
    """Encode the indicator vector of a shortest odd cycle."""
    cycle = find_odd_cycle(inst.graph)
    if cycle is None:
        raise WitnessError("graph is bipartite, no odd-cycle witness exists")
    alpha = BitVec([1 if i in cycle else 0 for i in range(inst.graph.n)])
    return MultiProof([hadamard_encode(alpha)])


def honest_proof_leader(inst: Instance) -> MultiProof:
    """Encode the input vector itself."""
    if leader_count(inst) != 1:
        raise WitnessError("instance does not have exactly one leader")
    alpha = BitVec([int(inst.x(i)) for i in range(inst.graph.n)])
    return MultiProof([hadamard_encode(alpha)])


def _reachable_or_self(inst: Instance, i: int) -> BitVec:
    """Ancestors-or-self of i along parent pointers, as an indicator.

    Follows pointers until the root, a repeat, or a dangling pointer; the
    walk always includes i itself, which is what makes the telescoping
    identity alpha_i ^ alpha_parent(i) = e_i hold on valid trees.
    """
    n = inst.graph.n
    bits = [0] * n
    cur: Optional[object] = i
    while isinstance(cur, int) and not bits[cur]:
        bits[cur] = 1
        nxt = parse_parent(inst, cur)
        cur = None if nxt == ROOT_MARKER else nxt
    return BitVec(bits)


def span_witness_vectors(inst: Instance) -> Tuple[BitVec, Tuple[BitVec, ...]]:
    """Root indicator and per-vertex reachability vectors for T(x)."""
    n = inst.graph.n
    root_bits = [1 if inst.x(i) == ROOT_MARKER else 0 for i in range(n)]
    alphas = tuple(_reachable_or_self(inst, i) for i in range(n))
    return BitVec(root_bits), alphas


def honest_proof_span(inst: Instance) -> MultiProof:
    """Part 0 encodes the root indicator, part 1+i the ancestry of i."""
    if not is_valid_spanning_tree(inst):
        raise WitnessError("inputs do not define a valid spanning tree")
    alpha_r, alphas = span_witness_vectors(inst)
    parts = [hadamard_encode(alpha_r)] + [hadamard_encode(a) for a in alphas]
    return MultiProof(parts)


def honest_proof(inst: Instance, language: Language) -> MultiProof:
    if language is Language.NONBIPARTITE:
        return honest_proof_nonbipartite(inst)
    if language is Language.LEADER:
        return honest_proof_leader(inst)
    return honest_proof_span(inst)


@dataclass(frozen=True)
class AdversaryStrategy:
    """One committed-proof strategy.

    kind is one of: honest, constant, uniform_random_table, corrupt_honest,
    wrong_witness, nonlinear_planted, exhaustive.  All randomized
    strategies are deterministic per (instance, strategy, seed).
    """

    kind: str
    bit: int = 0
    flip_count: Optional[int] = None
    flip_fraction: Optional[float] = None
    witness: Optional[Tuple[str, ...]] = None
    alpha: Optional[int] = None
    perturb: Tuple[int, ...] = ()
    index: int = 0
    seed: int = 0

    def describe(self) -> str:
        if self.kind == "constant":
            return f"constant{self.bit}"
        if self.kind == "corrupt_honest":
            if self.flip_count is not None:
                return f"corrupt_honest(flips={self.flip_count})"
            return f"corrupt_honest(fraction={self.flip_fraction})"
        if self.kind == "wrong_witness" and self.witness is not None:
            return f"wrong_witness({','.join(self.witness)})"
        if self.kind == "nonlinear_planted":
            flips = ",".join(str(k) for k in self.perturb)
            return f"nonlinear_planted(alpha={self.alpha},flips={flips})"
        if self.kind == "exhaustive":
            return f"exhaustive({self.index})"
        return self.kind


def _flat_to_proof(flat: np.ndarray, dim: int, parts: int) -> MultiProof:
    return MultiProof.from_flat(dim, parts, flat.astype(np.uint8))


def _wrong_witness_proof(inst: Instance, language: Language,
                         strategy: AdversaryStrategy) -> MultiProof:
    n = inst.graph.n
    if language is Language.NONBIPARTITE:
        if strategy.witness is None:
            members = tuple(str(i) for i in range(n))
        else:
            members = strategy.witness
        try:
            ids = sorted({int(w) for w in members})
        except ValueError:
            raise StrategyError(f"bad vertex set {members!r}") from None
        if any(not 0 <= i < n for i in ids):
            raise StrategyError(f"vertex set {ids} out of range")
        alpha = BitVec([1 if i in ids else 0 for i in range(n)])
        return MultiProof([hadamard_encode(alpha)])
    if language is Language.LEADER:
        if strategy.witness is None:
            xs = [inst.x(i) for i in range(n)]
            if any(x not in ("0", "1") for x in xs):
                raise StrategyError("instance inputs are not leader bits")
            alpha = BitVec([int(x) for x in xs])
        else:
            try:
                ids = {int(w) for w in strategy.witness if w != ""}
            except ValueError:
                raise StrategyError(f"bad leader set {strategy.witness!r}") from None
            if any(not 0 <= i < n for i in ids):
                raise StrategyError(f"leader set {sorted(ids)} out of range")
            alpha = BitVec([1 if i in ids else 0 for i in range(n)])
        return MultiProof([hadamard_encode(alpha)])
    # Span: honest-style encoding of an arbitrary (usually broken) map.
    if strategy.witness is None:
        claimed = inst
    else:
        if len(strategy.witness) != n:
            raise StrategyError(f"span witness needs {n} entries")
        claimed = Instance(inst.graph, tuple(strategy.witness))
    alpha_r, alphas = span_witness_vectors(claimed)
    return MultiProof([hadamard_encode(alpha_r)] + [hadamard_encode(a) for a in alphas])


def adversarial_proof(inst: Instance, language: Language,
                      strategy: AdversaryStrategy) -> MultiProof:
    """Materialize the committed proof a strategy plays on this instance."""
    dim, parts = proof_shape(inst, language)
    total = parts << dim
    if strategy.kind == "honest":
        return honest_proof(inst, language)
    if strategy.kind == "constant":
        if strategy.bit not in (0, 1):
            raise StrategyError("constant strategy needs bit 0 or 1")
        return _flat_to_proof(np.full(total, strategy.bit, dtype=np.uint8), dim, parts)
    if strategy.kind == "uniform_random_table":
        stream = SplitMix(chain(strategy.seed, 0xAD5E2))
        flat = np.fromiter((stream.bit() for _ in range(total)),
                           dtype=np.uint8, count=total)
        return _flat_to_proof(flat, dim, parts)
    if strategy.kind == "corrupt_honest":
        flat = honest_proof(inst, language).flat_bits().copy()
        if (strategy.flip_count is None) == (strategy.flip_fraction is None):
            raise StrategyError("corrupt_honest needs exactly one of flip_count/flip_fraction")
        if strategy.flip_fraction is not None:
            if not 0.0 <= strategy.flip_fraction <= 1.0:
                raise StrategyError("flip_fraction must lie in [0,1]")
            count = int(round(strategy.flip_fraction * total))
        else:
            count = strategy.flip_count
        if not 0 <= count <= total:
            raise StrategyError(f"cannot flip {count} of {total} bits")
        stream = SplitMix(chain(strategy.seed, 0xF11B5))
        chosen = set()
        while len(chosen) < count:
            chosen.add(stream.randint(total))
        for k in chosen:
            flat[k] ^= 1
        return _flat_to_proof(flat, dim, parts)
    if strategy.kind == "wrong_witness":
        return _wrong_witness_proof(inst, language, strategy)
    if strategy.kind == "nonlinear_planted":
        if strategy.alpha is None or not 0 <= strategy.alpha < (1 << dim):
            raise StrategyError("nonlinear_planted needs a base vector in range")
        base = hadamard_encode(BitVec.from_int(strategy.alpha, dim)).bits
        flat = np.tile(base, parts).copy()
        for k in strategy.perturb:
            if not 0 <= k < total:
                raise StrategyError(f"perturbation index {k} out of range")
            flat[k] ^= 1
        return _flat_to_proof(flat, dim, parts)
    if strategy.kind == "exhaustive":
        if total > 32:
            raise StrategyError("exhaustive strategies need proofs of at most 32 bits")
        if not 0 <= strategy.index < (1 << total):
            raise StrategyError(f"exhaustive index {strategy.index} out of range")
        flat = np.array([(strategy.index >> k) & 1 for k in range(total)],
                        dtype=np.uint8)
        return _flat_to_proof(flat, dim, parts)
    raise StrategyError(f"unknown strategy kind {strategy.kind!r}")


def parse_strategy(text: str, seed: int = 0) -> AdversaryStrategy:
    """Parse the CLI/config strategy grammar.

    Examples: ``honest``, ``constant0``, ``uniform_random_table``,
    ``corrupt_honest flips=3``, ``corrupt_honest fraction=0.1``,
    ``wrong_witness``, ``wrong_witness set=0,1,2,3``,
    ``wrong_witness parents=root,0,1``, ``nonlinear_planted alpha=5 flips=0,3``,
    ``exhaustive k=7``.
    """
    tokens = text.split()
    if not tokens:
        raise StrategyError("empty strategy descriptor")
    head, args = tokens[0], tokens[1:]
    kv = {}
    for tok in args:
        if "=" not in tok:
            raise StrategyError(f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        kv[k] = v
    try:
        if head == "honest":
            return AdversaryStrategy("honest", seed=seed)
        if head in ("constant0", "constant1"):
            return AdversaryStrategy("constant", bit=int(head[-1]), seed=seed)
        if head == "constant":
            return AdversaryStrategy("constant", bit=int(kv.get("bit", "0")), seed=seed)
        if head in ("uniform", "uniform_random_table"):
            return AdversaryStrategy("uniform_random_table", seed=seed)
        if head == "corrupt_honest":
            if "flips" in kv:
                return AdversaryStrategy("corrupt_honest", flip_count=int(kv["flips"]), seed=seed)
            if "fraction" in kv:
                return AdversaryStrategy("corrupt_honest",
                                         flip_fraction=float(kv["fraction"]), seed=seed)
            raise StrategyError("corrupt_honest needs flips= or fraction=")
        if head == "wrong_witness":
            witness = None
            for key in ("set", "leaders", "parents"):
                if key in kv:
                    witness = tuple(kv[key].split(","))
            return AdversaryStrategy("wrong_witness", witness=witness, seed=seed)
        if head == "nonlinear_planted":
            perturb = tuple(int(s) for s in kv.get("flips", "").split(",") if s)
            return AdversaryStrategy("nonlinear_planted", alpha=int(kv["alpha"]),
                                     perturb=perturb, seed=seed)
        if head == "exhaustive":
            return AdversaryStrategy("exhaustive", index=int(kv["k"]), seed=seed)
    except (KeyError, ValueError) as exc:
        raise StrategyError(f"bad strategy descriptor {text!r}: {exc}") from None
    raise StrategyError(f"unknown strategy {head!r}")
