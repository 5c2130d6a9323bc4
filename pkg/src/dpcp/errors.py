"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes, so new failure modes should reuse one
of the existing classes where the meaning fits.
"""


class DPCPError(Exception):
    """Base class for all package errors."""


class DimensionError(DPCPError):
    """Operands whose GF(2) dimensions do not match."""


class CapacityError(DPCPError):
    """An enumeration or table would exceed the configured budget."""


class FormatError(DPCPError):
    """Malformed serialized input (graph file, proof file, labels, config)."""


class WitnessError(DPCPError):
    """Honest proof requested for an instance with no witness."""


class StrategyError(DPCPError):
    """Malformed or inapplicable adversary strategy descriptor."""


class GenerationError(DPCPError):
    """Unsatisfiable instance-generator descriptor."""


class ProtocolError(DPCPError):
    """Verifier wiring bug, e.g. reading an unpublished neighbor value."""


class ConfigError(DPCPError):
    """Invalid protocol or experiment configuration."""
