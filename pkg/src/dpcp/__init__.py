"""Distributed-verifier proof system simulator.

A network of constant-query randomized verifiers checks one committed,
Hadamard-encoded proof string; the package provides the verifier
protocols, honest and adversarial provers, exact and Monte Carlo soundness
measurement, and a deterministic proof-labeling baseline for comparison.
"""

from .errors import (CapacityError, ConfigError, DimensionError, DPCPError,
                     FormatError, GenerationError, ProtocolError,
                     StrategyError, WitnessError)
from .gf2 import (BitVec, BlrTest, MultiProof, OracleSession, ProofTable,
                  blr_linearity_test, deserialize_proof,
                  distance_to_nearest_linear, exact_rejection_probability,
                  hadamard_encode, inner_product, self_corrected_query,
                  serialize_proof)
from .graphs import (Graph, Instance, Language, find_odd_cycle, generate,
                     is_nonbipartite, is_valid_spanning_tree, leader_count,
                     membership, parse_graph_text, format_graph_text)
from .harness import (DPCPParams, Estimate, SoundnessReport, SweepRow,
                      certify_soundness_exhaustive,
                      estimate_acceptance_probability,
                      exact_acceptance_probability, soundness_sweep,
                      verify_budgets, wilson_interval)
from .lcp import (Labeling, GlueAttackResult, glue_attack, lcp_prove_leader,
                  lcp_prove_span, lcp_verify_leader, lcp_verify_span)
from .prover import (AdversaryStrategy, adversarial_proof, honest_proof,
                     honest_proof_leader, honest_proof_nonbipartite,
                     honest_proof_span, parse_strategy)
from .protocols import (NeighborExchange, NodeReport, ProtocolConfig,
                        RunReport, query_budget, random_bit_budget,
                        run_leader_verifier, run_nonbipartite_verifier,
                        run_protocol, run_span_verifier)

__version__ = "0.1.0"
