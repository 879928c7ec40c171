"""Verification workbench for operational probabilistic theories.

Three interchangeable backends — complex quantum, real quantum, and
classical probability — share one circuit language, so structural claims
(causality, purification, steering, dilation, tomography) can be checked
numerically on each theory and contrasted where they come apart.
"""

from .backends import ClassicalBackend, QuantumBackend, RealQuantumBackend, get_backend
from .backends.base import (
    Channel,
    EffectVector,
    Payload,
    PhysicalityCertificate,
    StateVector,
    TheoryBackend,
    Tolerances,
    TransferMatrix,
)
from .diagram import (
    Diagram,
    Identity,
    OutcomeSpace,
    Par,
    PrimitiveBox,
    Seq,
    Swap,
    SystemType,
    Test,
    UNIT,
    par,
    seq,
    singleton_test,
    test_par,
    test_seq,
)
from .dsl import Document, Workbench, bind, load, parse, print_document
from .errors import (
    CausalityViolationError,
    DslParseError,
    NotPhysicalError,
    OptlabError,
    TypeMismatchError,
)
from .evaluator import OutcomeDistribution, evaluate, run_test_circuit, trace_box
from .sampling import Sampler

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "CausalityViolationError",
    "ClassicalBackend",
    "Diagram",
    "Document",
    "DslParseError",
    "EffectVector",
    "Identity",
    "NotPhysicalError",
    "OptlabError",
    "OutcomeDistribution",
    "OutcomeSpace",
    "Par",
    "Payload",
    "PhysicalityCertificate",
    "PrimitiveBox",
    "QuantumBackend",
    "RealQuantumBackend",
    "Sampler",
    "Seq",
    "StateVector",
    "Swap",
    "SystemType",
    "Test",
    "TheoryBackend",
    "Tolerances",
    "TransferMatrix",
    "TypeMismatchError",
    "UNIT",
    "Workbench",
    "bind",
    "evaluate",
    "get_backend",
    "load",
    "par",
    "parse",
    "print_document",
    "run_test_circuit",
    "seq",
    "singleton_test",
    "test_par",
    "test_seq",
    "trace_box",
    "__version__",
]
