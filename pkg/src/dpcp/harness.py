"""Acceptance-probability measurement and soundness certification.

Two backends compute the probability that every node accepts:

* exact: enumerates each check's coin space and multiplies per-node factors
  as exact rationals.  Node decisions are independent given the published
  mark vector, so the only coupled piece (the nonbipartite neighbor rule)
  is handled by summing over mark vectors with per-node marginals.
* monte carlo: replays full protocol runs through the compiled kernels and
  reports the acceptance frequency with a 95% Wilson score interval.

Both flow from one experiment seed through the documented split
(seed, trial, node, pass, check, rep), so estimates are reproducible and
matched-seed sweeps couple exactly across repetition counts.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import sqrt
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from . import kernels
from .errors import CapacityError, ConfigError
from .gf2 import DEFAULT_ENUM_BUDGET, MultiProof, ProofTable
from .graphs import Instance, Language, generate, membership, span_parent_array
from .prover import AdversaryStrategy, adversarial_proof, parse_strategy, proof_shape
from .protocols import ProtocolConfig, RunReport, run_protocol
from .rng import chain, fold

Z95 = 1.959963984540054


@dataclass(frozen=True)
class DPCPParams:
    """Budget tuple: completeness c, soundness s, proof bits l, coins r,
    queries q."""

    c: Fraction
    s: Fraction
    l: int
    r: int
    q: int

    def __post_init__(self):
        if not 0 <= self.s < self.c <= 1:
            raise ConfigError("need 0 <= s < c <= 1")


@dataclass(frozen=True)
class Estimate:
    acceptance: float
    ci_low: float
    ci_high: float
    accept_count: int
    trials: int


@dataclass(frozen=True)
class SoundnessReport:
    mode: str
    max_acceptance: Union[Fraction, float]
    argmax: str
    space: int


def wilson_interval(successes: int, trials: int, z: float = Z95) -> Tuple[float, float]:
    """Two-sided score interval; correct coverage near 0 and 1."""
    if trials <= 0:
        return 0.0, 1.0
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == trials else min(1.0, center + half)
    return low, high


# ---------------------------------------------------------------------------
# Exact backend
# ---------------------------------------------------------------------------

def _blr_pass_prob(table: ProofTable, reps: int) -> Fraction:
    fails = int(kernels.blr_fail_count(table.bits))
    return (1 - Fraction(fails, table.size * table.size)) ** reps


def _corrected_prob_one(table: ProofTable, v: int) -> Fraction:
    return Fraction(int(kernels.corrected_one_count(table.bits, v)), table.size)


def _punctured_zero_prob(table: ProofTable, n: int, hole: int) -> Fraction:
    pts = kernels.punctured_points(n, hole)
    zeros = int((table.bits[pts] == 0).sum())
    return Fraction(zeros, pts.size)


def _exact_work(inst: Instance, language: Language) -> int:
    n = inst.graph.n
    parts = proof_shape(inst, language)[1]
    return parts * (1 << (2 * n)) + (n + 2) * (1 << n)


def exact_acceptance_probability(inst: Instance, proof: MultiProof,
                                 cfg: ProtocolConfig,
                                 budget: int = DEFAULT_ENUM_BUDGET) -> Fraction:
    """Exact probability that all nodes accept, by coin enumeration."""
    n = inst.graph.n
    dim, parts = proof_shape(inst, cfg.language)
    if proof.dim != dim or proof.part_count != parts:
        raise ConfigError("proof shape does not match the instance/language")
    if _exact_work(inst, cfg.language) > budget:
        raise CapacityError(
            f"exact enumeration work exceeds budget {budget}; use monte carlo")
    if cfg.language is Language.NONBIPARTITE:
        p_pass = _exact_pass_nonbipartite(inst, proof, cfg)
    elif cfg.language is Language.LEADER:
        p_pass = _exact_pass_leader(inst, proof, cfg)
    else:
        p_pass = _exact_pass_span(inst, proof, cfg)
    return p_pass ** cfg.verifier_repetitions


def _exact_pass_nonbipartite(inst: Instance, proof: MultiProof,
                             cfg: ProtocolConfig) -> Fraction:
    n = inst.graph.n
    table = proof.part(0)
    p_blr = _blr_pass_prob(table, cfg.blr_repetitions)
    p_parity = _corrected_prob_one(table, (1 << n) - 1)
    if p_blr == 0 or p_parity == 0:
        return Fraction(0)
    q_one = [_corrected_prob_one(table, 1 << i) for i in range(n)]
    total = Fraction(0)
    for marks in range(1 << n):
        prob = Fraction(1)
        for i in range(n):
            prob *= q_one[i] if (marks >> i) & 1 else 1 - q_one[i]
            if prob == 0:
                break
        if prob == 0:
            continue
        ok = True
        for i in range(n):
            if (marks >> i) & 1:
                cnt = sum(1 for j in inst.graph.neighbors(i) if (marks >> j) & 1)
                if cnt != 2:
                    ok = False
                    break
        if ok:
            total += prob
    return (p_blr ** n) * (p_parity ** n) * total


def _exact_pass_leader(inst: Instance, proof: MultiProof,
                       cfg: ProtocolConfig) -> Fraction:
    n = inst.graph.n
    table = proof.part(0)
    p_blr = _blr_pass_prob(table, cfg.blr_repetitions)
    p_parity = _corrected_prob_one(table, (1 << n) - 1)
    result = Fraction(1)
    for i in range(n):
        x = inst.x(i)
        if x not in ("0", "1"):
            raise ConfigError(f"leader input at vertex {i} must be 0 or 1")
        p_own_one = _corrected_prob_one(table, 1 << i)
        p_point = p_own_one if x == "1" else 1 - p_own_one
        p_branch = _punctured_zero_prob(table, n, i) if x == "1" else p_parity
        result *= p_blr * p_point * p_branch
        if result == 0:
            return result
    return result


def _exact_pass_span(inst: Instance, proof: MultiProof,
                     cfg: ProtocolConfig) -> Fraction:
    n = inst.graph.n
    parent_arr, syntax_arr = span_parent_array(inst)
    part0 = proof.part(0)
    p_blr0 = _blr_pass_prob(part0, cfg.blr_repetitions)
    p_parity0 = _corrected_prob_one(part0, (1 << n) - 1)
    blr_cache: Dict[int, Fraction] = {}

    def blr_of(part_idx: int) -> Fraction:
        if part_idx not in blr_cache:
            blr_cache[part_idx] = _blr_pass_prob(proof.part(part_idx),
                                                 cfg.blr_repetitions)
        return blr_cache[part_idx]

    result = Fraction(1)
    for i in range(n):
        if not syntax_arr[i]:
            return Fraction(0)
        parent = int(parent_arr[i])
        is_root = parent == -1
        p_own_one = _corrected_prob_one(part0, 1 << i)
        node = p_blr0 * (p_own_one if is_root else 1 - p_own_one)
        if is_root:
            node *= _punctured_zero_prob(part0, n, i)
        else:
            node *= p_parity0
        if parent >= 0:
            t_own, t_par = proof.part(1 + i), proof.part(1 + parent)
            node *= blr_of(1 + i) * blr_of(1 + parent)
            p1 = _corrected_prob_one(t_own, 1 << i)
            p2 = _corrected_prob_one(t_par, 1 << i)
            node *= p1 * (1 - p2) + p2 * (1 - p1)
            pts = kernels.punctured_points(n, i)
            agree = int((t_own.bits[pts] == t_par.bits[pts]).sum())
            node *= Fraction(agree, pts.size)
        result *= node
        if result == 0:
            return result
    return result


# ---------------------------------------------------------------------------
# Monte Carlo backend
# ---------------------------------------------------------------------------

def run_verdicts(inst: Instance, proof: MultiProof, cfg: ProtocolConfig,
                 trials: int, seed: int) -> np.ndarray:
    """Per-trial global verdicts from the compiled kernels.

    Trial t replays run_protocol(inst, proof, cfg, fold(seed, t)) exactly.
    """
    n = inst.graph.n
    dim, parts = proof_shape(inst, cfg.language)
    if proof.dim != dim or proof.part_count != parts:
        raise ConfigError("proof shape does not match the instance/language")
    k, passes = cfg.blr_repetitions, cfg.verifier_repetitions
    useed = np.uint64(seed & ((1 << 64) - 1))
    if cfg.language is Language.NONBIPARTITE:
        indptr, indices = inst.graph.csr()
        return kernels.mc_nonbipartite(proof.part(0).bits, n, indptr, indices,
                                       k, passes, trials, useed)
    if cfg.language is Language.LEADER:
        xbits = np.array([int(inst.x(i)) for i in range(n)], dtype=np.uint8)
        return kernels.mc_leader(proof.part(0).bits, n, xbits, k, passes,
                                 trials, useed)
    parent_arr, syntax_arr = span_parent_array(inst)
    return kernels.mc_span(proof.stacked(), n, parent_arr, syntax_arr,
                           k, passes, trials, useed)


def estimate_acceptance_probability(inst: Instance, proof: MultiProof,
                                    cfg: ProtocolConfig, trials: int,
                                    seed: int) -> Estimate:
    """Acceptance frequency over independent runs, with a score interval."""
    if trials < 100:
        raise ConfigError("monte carlo estimates need at least 100 trials")
    verdicts = run_verdicts(inst, proof, cfg, trials, seed)
    successes = int(verdicts.sum())
    low, high = wilson_interval(successes, trials)
    return Estimate(successes / trials, low, high, successes, trials)


# ---------------------------------------------------------------------------
# Exhaustive certification
# ---------------------------------------------------------------------------

def certify_soundness_exhaustive(inst: Instance, language: Language,
                                 cfg: ProtocolConfig,
                                 max_proofs: int = 1 << 20,
                                 budget: int = DEFAULT_ENUM_BUDGET) -> SoundnessReport:
    """Maximum exact acceptance probability over every possible proof."""
    dim, parts = proof_shape(inst, language)
    total_bits = parts << dim
    if total_bits > 32 or (1 << total_bits) > max_proofs:
        raise CapacityError(
            f"proof space 2^{total_bits} exceeds the exhaustive budget")
    if _exact_work(inst, language) > budget:
        raise CapacityError("per-proof exact enumeration over budget")
    best = Fraction(-1)
    best_index = 0
    size = 1 << dim
    flat = np.zeros(total_bits, dtype=np.uint8)
    for index in range(1 << total_bits):
        for b in range(total_bits):
            flat[b] = (index >> b) & 1
        proof = MultiProof.from_flat(dim, parts, flat)
        p = exact_acceptance_probability(inst, proof, cfg, budget)
        if p > best:
            best = p
            best_index = index
    return SoundnessReport("exact", best, f"exhaustive({best_index})",
                           1 << total_bits)


# ---------------------------------------------------------------------------
# Budgets
# ---------------------------------------------------------------------------

def verify_budgets(report: RunReport, params: DPCPParams) -> bool:
    """Check one run against a claimed (l, r, q) parameter tuple."""
    if report.proof_bits > params.l:
        return False
    return all(nr.query_count <= params.q and nr.random_bits_used <= params.r
               for nr in report.nodes)


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

CSV_COLUMNS = ["language", "instance_id", "n", "adversary", "blr_reps",
               "verifier_reps", "mode", "acceptance", "ci_low", "ci_high",
               "max_queries", "max_random_bits", "proof_bits", "trials", "seed"]


@dataclass(frozen=True)
class SweepRow:
    language: str
    instance_id: str
    n: int
    adversary: str
    blr_reps: int
    verifier_reps: int
    mode: str
    acceptance: Union[Fraction, float]
    ci_low: Union[Fraction, float]
    ci_high: Union[Fraction, float]
    max_queries: int
    max_random_bits: int
    proof_bits: int
    trials: int
    seed: int

    def render(self) -> List[str]:
        def num(v):
            if isinstance(v, Fraction):
                return f"{v.numerator}/{v.denominator}"
            return repr(float(v))

        return [self.language, self.instance_id, str(self.n), self.adversary,
                str(self.blr_reps), str(self.verifier_reps), self.mode,
                num(self.acceptance), num(self.ci_low), num(self.ci_high),
                str(self.max_queries), str(self.max_random_bits),
                str(self.proof_bits), str(self.trials), str(self.seed)]


def _run_cell(args) -> SweepRow:
    (language, inst_id, inst, adversary, cfg, trials, cell_seed, mode) = args
    if adversary == "exhaustive_max":
        report = certify_soundness_exhaustive(inst, language, cfg)
        strategy = parse_strategy(report.argmax.replace("exhaustive(", "exhaustive k=")
                                  .rstrip(")"), seed=cell_seed)
        proof = adversarial_proof(inst, language, strategy)
        run = run_protocol(inst, proof, cfg, fold(cell_seed, 0xC0DE))
        p = report.max_acceptance
        return SweepRow(language.value, inst_id, inst.graph.n, report.argmax,
                        cfg.blr_repetitions, cfg.verifier_repetitions, "exact",
                        p, p, p, run.max_queries, run.max_random_bits,
                        proof.total_bits, 0, cell_seed)
    strategy = (adversary if isinstance(adversary, AdversaryStrategy)
                else parse_strategy(adversary, seed=cell_seed))
    if strategy.seed != cell_seed:
        strategy = dataclasses.replace(strategy, seed=cell_seed)
    proof = adversarial_proof(inst, language, strategy)
    report = run_protocol(inst, proof, cfg, fold(cell_seed, 0xC0DE))
    use_mode = mode
    if mode == "auto":
        use_mode = "exact" if _exact_work(inst, language) <= DEFAULT_ENUM_BUDGET else "mc"
    if use_mode == "exact":
        try:
            p = exact_acceptance_probability(inst, proof, cfg)
            return SweepRow(language.value, inst_id, inst.graph.n,
                            strategy.describe(), cfg.blr_repetitions,
                            cfg.verifier_repetitions, "exact", p, p, p,
                            report.max_queries, report.max_random_bits,
                            proof.total_bits, 0, cell_seed)
        except CapacityError:
            if mode == "exact":
                raise
    est = estimate_acceptance_probability(inst, proof, cfg, trials, cell_seed)
    return SweepRow(language.value, inst_id, inst.graph.n, strategy.describe(),
                    cfg.blr_repetitions, cfg.verifier_repetitions,
                    "monte_carlo", est.acceptance, est.ci_low, est.ci_high,
                    report.max_queries, report.max_random_bits,
                    proof.total_bits, est.trials, cell_seed)


def soundness_sweep(language: Language,
                    instances: Sequence[Tuple[str, Instance]],
                    adversaries: Sequence,
                    cfg_grid: Sequence[ProtocolConfig],
                    trials: int, seed: int, mode: str = "auto",
                    jobs: int = 1) -> List[SweepRow]:
    """Acceptance per (instance, adversary, config) cell.

    The cell seed depends on the instance and adversary only, so cells that
    differ in repetitions alone are matched-seed and couple exactly.
    """
    if not instances or not adversaries or not cfg_grid:
        raise ConfigError("sweep suites must be non-empty")
    if mode not in ("auto", "exact", "mc"):
        raise ConfigError(f"unknown mode {mode!r}")
    cells = []
    for ii, (inst_id, inst) in enumerate(instances):
        for ai, adversary in enumerate(adversaries):
            cell_seed = chain(seed, ii, ai)
            for cfg in cfg_grid:
                if cfg.language is not language:
                    raise ConfigError("config grid language mismatch")
                cells.append((language, inst_id, inst, adversary, cfg,
                              trials, cell_seed, mode))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_cell, cells))
    return [_run_cell(cell) for cell in cells]


def render_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.render())
    return buf.getvalue()


def write_csv_atomic(rows: Sequence[SweepRow], path: str) -> None:
    data = render_csv(rows)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# Instance suites
# ---------------------------------------------------------------------------

def yes_instance_suite(language: Language, count: int, seed: int,
                       max_n: int) -> List[Tuple[str, Instance]]:
    """Deterministic suite of ground-truth members of the language."""
    suite: List[Tuple[str, Instance]] = []
    attempt = 0
    while len(suite) < count:
        tag = chain(seed, len(suite), attempt)
        attempt += 1
        if attempt > 100 * count + 1000:
            raise CapacityError("suite generation is not converging")
        kind = tag % 3
        n = 3 + (tag >> 8) % (max_n - 2)
        try:
            if language is Language.NONBIPARTITE:
                if kind == 0:
                    m = n if n % 2 == 1 else n + 1
                    if m > max_n:
                        m -= 2
                    desc = f"cycle {max(3, m)}"
                else:
                    desc = f"random-connected {n} 0.5"
                inst = generate(desc, tag)
            elif language is Language.LEADER:
                base = ("cycle" if kind == 0 and n >= 3 else
                        "path" if kind == 1 else "tree")
                desc = f"{base} {n} leader={(tag >> 16) % n}"
                inst = generate(desc, tag)
            else:
                base = "tree" if kind == 0 else "random-connected"
                desc = f"{base} {n} span=yes"
                inst = generate(desc, tag)
        except Exception:
            continue
        if membership(inst, language):
            suite.append((desc, inst))
    return suite


def corrupted_span_suite(count: int, seed: int,
                         max_n: int) -> List[Tuple[str, Instance]]:
    """Deterministic suite of spanning-tree no-instances, mixed variants."""
    variants = ("planted_cycle", "two_roots", "zero_roots", "non_neighbor")
    suite: List[Tuple[str, Instance]] = []
    attempt = 0
    while len(suite) < count:
        tag = chain(seed, 0x5BAD, len(suite), attempt)
        attempt += 1
        if attempt > 100 * count + 1000:
            raise CapacityError("suite generation is not converging")
        n = 4 + (tag >> 8) % (max_n - 3)
        variant = variants[len(suite) % len(variants)]
        base = "tree" if tag % 2 == 0 else "random-connected"
        desc = f"{base} {n} span={variant}"
        try:
            inst = generate(desc, tag)
        except Exception:
            continue
        assert not membership(inst, Language.SPAN)
        suite.append((desc, inst))
    return suite
