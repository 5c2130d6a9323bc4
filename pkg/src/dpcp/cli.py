"""Command-line front end.

Subcommands: ``generate`` (instances), ``prove`` (honest proofs),
``verify`` (one protocol run), ``experiment`` (sweeps to CSV), and
``lcp-demo`` (the label-gluing attack).  Every command is deterministic
given its flags and seed.  Exit codes: 0 accept/success, 1 reject,
2 input format error, 3 capacity/budget error, 4 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .errors import (CapacityError, ConfigError, DPCPError, FormatError,
                     GenerationError, StrategyError, WitnessError)
from .gf2 import (PROTO_LEADER, PROTO_NONBIPARTITE, PROTO_SPAN,
                  deserialize_proof, serialize_proof)
from .graphs import (Instance, Language, format_graph_text, generate,
                     is_nonbipartite, is_valid_spanning_tree, leader_count,
                     parse_graph_text)
from .harness import soundness_sweep, write_csv_atomic
from .lcp import format_labeling, glue_attack
from .prover import honest_proof
from .protocols import ProtocolConfig, RunReport, run_protocol
from .rng import chain

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_FORMAT = 2
EXIT_CAPACITY = 3
EXIT_USAGE = 4

_PROTO_BY_LANGUAGE = {
    Language.NONBIPARTITE: PROTO_NONBIPARTITE,
    Language.LEADER: PROTO_LEADER,
    Language.SPAN: PROTO_SPAN,
}
_LANGUAGE_BY_PROTO = {v: k for k, v in _PROTO_BY_LANGUAGE.items()}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _write_atomic(path: str, data) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _membership_lines(inst: Instance) -> List[str]:
    lines = [f"Nonbipartite: {'yes' if is_nonbipartite(inst.graph) else 'no'}"]
    try:
        lines.append(f"Leader: {'yes' if leader_count(inst) == 1 else 'no'}")
    except FormatError:
        lines.append("Leader: n/a")
    lines.append(f"Span: {'yes' if is_valid_spanning_tree(inst) else 'no'}")
    return lines


def cmd_generate(args) -> int:
    tokens = list(args.descriptor)
    if args.leader is not None:
        tokens.append(f"leader={args.leader}")
    if args.span is not None:
        tokens.append(f"span={args.span}")
    descriptor = " ".join(tokens)
    inst = generate(descriptor, args.seed)
    text = format_graph_text(inst)
    if args.out:
        _write_atomic(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    for line in _membership_lines(inst):
        print(line)
    return EXIT_OK


def cmd_prove(args) -> int:
    language = Language.from_string(args.language)
    with open(args.graph, "r") as fh:
        inst = parse_graph_text(fh.read())
    proof = honest_proof(inst, language)
    data = serialize_proof(proof, _PROTO_BY_LANGUAGE[language])
    out = args.out or (os.path.splitext(args.graph)[0] + ".proof")
    _write_atomic(out, data)
    print(f"wrote {out}")
    print(f"proof bits: {proof.total_bits}")
    return EXIT_OK


def _render_report(report: RunReport) -> str:
    lines = [f"language: {report.language.value}  n={report.n}  "
             f"blr_reps={report.config.blr_repetitions}  "
             f"verifier_reps={report.config.verifier_repetitions}"]
    lines.append("node  verdict  first_failed  queries  random_bits")
    for nr in report.nodes:
        verdict = "accept" if nr.accepted else "reject"
        failed = nr.first_failed or "-"
        lines.append(f"{nr.node:>4}  {verdict:>7}  {failed:>12}  "
                     f"{nr.query_count:>7}  {nr.random_bits_used:>11}")
    lines.append(f"global: {'accept' if report.global_verdict else 'reject'}")
    return "\n".join(lines)


def cmd_verify(args) -> int:
    with open(args.graph, "r") as fh:
        inst = parse_graph_text(fh.read())
    with open(args.proof, "rb") as fh:
        proof, proto = deserialize_proof(fh.read())
    if proto not in _LANGUAGE_BY_PROTO:
        raise FormatError(f"proof file carries unknown protocol id {proto}")
    cfg = ProtocolConfig(_LANGUAGE_BY_PROTO[proto],
                         blr_repetitions=args.blr_reps,
                         verifier_repetitions=args.verifier_reps)
    report = run_protocol(inst, proof, cfg, args.seed)
    print(_render_report(report))
    return EXIT_OK if report.global_verdict else EXIT_REJECT


@dataclass
class ExperimentConfig:
    language: Language
    instances: List[str] = field(default_factory=list)
    adversaries: List[str] = field(default_factory=list)
    blr_reps: List[int] = field(default_factory=lambda: [1])
    verifier_reps: List[int] = field(default_factory=lambda: [1])
    trials: int = 10000
    seed: int = 0
    mode: str = "auto"
    output: Optional[str] = None
    jobs: Optional[int] = None


def parse_experiment_config(text: str, path: str = "<config>") -> ExperimentConfig:
    """Flat key=value grammar; ``instance`` and ``adversary`` accumulate."""
    language: Optional[Language] = None
    seen = {}
    cfg = ExperimentConfig(language=Language.NONBIPARTITE)
    have_seed = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FormatError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key == "language":
                language = Language.from_string(value)
            elif key == "instance":
                cfg.instances.append(value)
            elif key == "adversary":
                cfg.adversaries.append(value)
            elif key in ("blr_reps", "verifier_reps"):
                reps = [int(tok) for tok in value.replace(",", " ").split()]
                if not reps or any(r < 1 for r in reps):
                    raise FormatError("repetition lists need positive integers")
                setattr(cfg, key, reps)
            elif key == "trials":
                cfg.trials = int(value)
            elif key == "seed":
                cfg.seed = int(value)
                have_seed = True
            elif key == "mode":
                if value not in ("auto", "exact", "mc"):
                    raise FormatError(f"unknown mode {value!r}")
                cfg.mode = value
            elif key == "output":
                cfg.output = value
            elif key == "jobs":
                cfg.jobs = int(value)
            else:
                raise FormatError(f"unknown key {key!r}")
        except ValueError:
            raise FormatError(f"{path}:{lineno}: bad value for {key!r}") from None
        except FormatError as exc:
            msg = str(exc)
            raise FormatError(msg if msg.startswith(path) else f"{path}:{lineno}: {msg}") from None
        if key not in ("instance", "adversary") and key in seen:
            raise FormatError(f"{path}:{lineno}: duplicate key {key!r} "
                              f"(first on line {seen[key]})")
        seen[key] = lineno
    if language is None:
        raise FormatError(f"{path}: missing required key 'language'")
    if not have_seed:
        raise FormatError(f"{path}: missing required key 'seed' "
                          "(wall-clock seeding is not supported)")
    if not cfg.instances:
        raise FormatError(f"{path}: at least one 'instance' line is required")
    if not cfg.adversaries:
        raise FormatError(f"{path}: at least one 'adversary' line is required")
    cfg.language = language
    return cfg


def cmd_experiment(args) -> int:
    with open(args.config, "r") as fh:
        text = fh.read()
    cfg = parse_experiment_config(text, path=args.config)
    if args.output:
        cfg.output = args.output
    if cfg.output is None:
        raise FormatError("no output path: set 'output =' in the config or pass --output")
    jobs = args.jobs or cfg.jobs or int(os.environ.get("DPCP_JOBS", "1"))
    instances: List[Tuple[str, Instance]] = []
    for idx, desc in enumerate(cfg.instances):
        inst = generate(desc, chain(cfg.seed, 0x1257, idx))
        instances.append((desc, inst))
    grid = [ProtocolConfig(cfg.language, blr_repetitions=b, verifier_repetitions=v)
            for b in cfg.blr_reps for v in cfg.verifier_reps]
    rows = soundness_sweep(cfg.language, instances, cfg.adversaries, grid,
                           cfg.trials, cfg.seed, mode=cfg.mode, jobs=jobs)
    write_csv_atomic(rows, cfg.output)
    print(f"wrote {cfg.output} ({len(rows)} rows)")
    return EXIT_OK


def cmd_lcp_demo(args) -> int:
    if args.cycle < 3:
        raise _UsageError("--cycle must be at least 3")
    if args.bits < 1:
        raise _UsageError("--bits must be at least 1")
    result = glue_attack("leader_cycle", args.bits, args.cycle)
    if result is None:
        print("no splice found")
        return EXIT_OK
    inst = result.instance
    print(f"fooling instance: cycle of {inst.graph.n} vertices, "
          f"leaders at {list(result.leader_positions)} (window width {result.window_width})")
    print("inputs: " + " ".join(inst.inputs))
    print(format_labeling(result.labeling), end="")
    print("all nodes accept; ground truth leader count = "
          f"{sum(1 for x in inst.inputs if x == '1')}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="dpcp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate an instance file")
    p.add_argument("descriptor", nargs="+",
                   help="e.g. 'cycle 5', 'path 3 leader=1', "
                        "'random-connected 8 0.3 span=yes'")
    p.add_argument("--leader", default=None,
                   help="leader position or variant (zero, two)")
    p.add_argument("--span", default=None,
                   help="spanning-tree variant (yes, planted_cycle, "
                        "two_roots, zero_roots, non_neighbor)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("prove", help="write the honest proof for an instance")
    p.add_argument("graph")
    p.add_argument("--language", required=True,
                   choices=[l.value for l in Language])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("verify", help="run the verifier network once")
    p.add_argument("graph")
    p.add_argument("proof")
    p.add_argument("--blr-reps", type=int, default=1)
    p.add_argument("--verifier-reps", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="run a sweep config, write CSV")
    p.add_argument("config")
    p.add_argument("--output", default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("lcp-demo", help="cycle-gluing attack on short labels")
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--cycle", type=int, required=True)
    p.set_defaults(func=cmd_lcp_demo)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, StrategyError) as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (WitnessError, GenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REJECT
    except FileNotFoundError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except DPCPError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REJECT


if __name__ == "__main__":
    sys.exit(main())
