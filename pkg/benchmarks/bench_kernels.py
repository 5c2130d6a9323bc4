#!/usr/bin/env python3
"""Benchmark the hot kernels under the compiled and fallback paths.

Run directly to time the kernels under the current mode (set
``DPCP_DISABLE_NUMBA=1`` for the pure-numpy fallback), or with
``--compare`` to spawn both modes as subprocesses and print a side-by-side
table.  Verdict sums are printed so the two modes can be eyeballed for
agreement; the test suite asserts bit-exact equality separately.
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _workloads():
    from dpcp import (AdversaryStrategy, BitVec, Language, ProtocolConfig,
                      adversarial_proof, generate, hadamard_encode)
    from dpcp import kernels
    from dpcp.harness import run_verdicts

    alpha = BitVec.from_int(0x2A5AD, 18)

    def w_hadamard():
        t = kernels.hadamard_table(alpha.bits)
        return int(t.sum())

    table12 = adversarial_proof(generate("cycle 12", 0), Language.NONBIPARTITE,
                                AdversaryStrategy("uniform_random_table", seed=3)).part(0)

    def w_blr_count():
        return int(kernels.blr_fail_count(table12.bits))

    table16 = hadamard_encode(BitVec.from_int(0x9111, 16))

    def w_fwht():
        d, a = kernels.fwht_min_distance(table16.bits)
        return int(d) + int(a)

    inst8 = generate("cycle 8", 0)
    bad8 = adversarial_proof(inst8, Language.NONBIPARTITE,
                             AdversaryStrategy("uniform_random_table", seed=11))
    cfg = ProtocolConfig(Language.NONBIPARTITE, blr_repetitions=2,
                         verifier_repetitions=2)

    def w_mc_nonbip():
        return int(run_verdicts(inst8, bad8, cfg, 20000, seed=4).sum())

    span_inst = generate("tree 8 span=yes", 21)
    from dpcp import honest_proof
    span_proof = honest_proof(span_inst, Language.SPAN)
    span_cfg = ProtocolConfig(Language.SPAN)

    def w_mc_span():
        return int(run_verdicts(span_inst, span_proof, span_cfg, 5000, seed=6).sum())

    return [
        ("hadamard_table n=18", w_hadamard),
        ("blr_fail_count n=12", w_blr_count),
        ("fwht_min_distance n=16", w_fwht),
        ("mc_nonbipartite C8 20k trials", w_mc_nonbip),
        ("mc_span tree8 5k trials", w_mc_span),
    ]


def run_current(as_json: bool) -> int:
    from dpcp import kernels
    results = []
    for name, fn in _workloads():
        fn()  # warm-up: triggers jit compilation outside the timed region
        best = float("inf")
        value = None
        for _ in range(3):
            t0 = time.perf_counter()
            value = fn()
            best = min(best, time.perf_counter() - t0)
        results.append({"name": name, "seconds": best, "value": value})
    mode = "numba" if kernels.NUMBA_ENABLED else "numpy-fallback"
    if as_json:
        print(json.dumps({"mode": mode, "results": results}))
    else:
        print(f"mode: {mode}")
        for r in results:
            print(f"  {r['name']:<32} {r['seconds']*1e3:10.2f} ms   (check={r['value']})")
    return 0


def run_compare() -> int:
    rows = {}
    for disable in ("0", "1"):
        env = dict(os.environ, DPCP_DISABLE_NUMBA=disable)
        out = subprocess.run([sys.executable, os.path.abspath(__file__), "--json"],
                             env=env, capture_output=True, text=True, check=True)
        data = json.loads(out.stdout.strip().splitlines()[-1])
        rows[data["mode"]] = data["results"]
    numba_rows = rows.get("numba")
    fallback_rows = rows["numpy-fallback"]
    if numba_rows is None:
        print("numba unavailable; fallback timings only")
        for r in fallback_rows:
            print(f"  {r['name']:<32} {r['seconds']*1e3:10.2f} ms")
        return 0
    print(f"{'kernel':<32} {'numba':>12} {'numpy':>12} {'speedup':>9}  agree")
    for jr, fr in zip(numba_rows, fallback_rows):
        speedup = fr["seconds"] / jr["seconds"] if jr["seconds"] else float("inf")
        agree = "yes" if jr["value"] == fr["value"] else "NO"
        print(f"{jr['name']:<32} {jr['seconds']*1e3:10.2f}ms {fr['seconds']*1e3:10.2f}ms "
              f"{speedup:8.1f}x  {agree}")
    return 0


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--compare", action="store_true",
                        help="run both modes in subprocesses and compare")
    parser.add_argument("--json", action="store_true",
                        help="machine-readable output for --compare")
    args = parser.parse_args()
    if args.compare:
        return run_compare()
    return run_current(args.json)


if __name__ == "__main__":
    sys.exit(main())
