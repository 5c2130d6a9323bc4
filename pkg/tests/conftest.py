import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci", deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile every Monte Carlo kernel once so timed tests measure the
    protocol work, not jit compilation."""
    from dpcp import (AdversaryStrategy, Language, ProtocolConfig,
                      adversarial_proof, generate, honest_proof)
    from dpcp.harness import run_verdicts

    inst = generate("cycle 4", 0)
    proof = adversarial_proof(inst, Language.NONBIPARTITE,
                              AdversaryStrategy("constant", bit=0))
    run_verdicts(inst, proof, ProtocolConfig(Language.NONBIPARTITE), 4, 0)
    linst = generate("path 3 leader=1", 0)
    run_verdicts(linst, honest_proof(linst, Language.LEADER),
                 ProtocolConfig(Language.LEADER), 4, 0)
    sinst = generate("tree 4 span=yes", 0)
    run_verdicts(sinst, honest_proof(sinst, Language.SPAN),
                 ProtocolConfig(Language.SPAN), 4, 0)
    return True
