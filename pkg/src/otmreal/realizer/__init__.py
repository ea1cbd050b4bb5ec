"""Realizers, the checker, proof extraction and the axiom library."""

from .core import (
    Conj, Native, NotAProgram, NotSerializable, OtmCode, ProgPair, ProgramFailure,
    RealizerError, Tagged, TrivialAtomic, TRIVIAL, apply, deserialize, from_sexpr,
    inst_forall, open_exists, prog, serialize, to_sexpr,
)
from .check import Inconclusive, Refuted, Verified, check, enumerate_realizers
from .hilbert import IllTypedProof, conclusion, extract, parse_corpus, parse_proof, realize
from .axioms import (
    LIBRARY, NonDelta0Instance, NotRealizable, axiom_status, format_status, realize_axiom,
)
