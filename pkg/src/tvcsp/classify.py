"""The meta-problem: is the optimization problem of a given temporal valued
structure solvable in polynomial time, or NP-complete?

The decision runs a fixed sequence of exhaustive finite tests:

1. constant case: the all-equal assignment is always optimal;
2. essentially crisp case: each relation has one finite value, and one of
   the eight catalog operations preserves the feasibility structure;
3. lex case: lex improves every relation and one of the eight catalog
   operations preserves the derived crisp structure of feasibility
   relations and minor optima;
4. otherwise NP-complete.

Each tractable case names the operation that witnesses it, and the
exclusivity of the hard case against the tractable ones is conditional on
P ≠ NP, so the verdict records the case actually established.

The essentially crisp test runs before the lex test: both can hold at once
(for a crisp structure lex may well improve everything), and when the
structure is essentially crisp the two tests succeed or fail together, so
the earlier, cheaper attribution is used.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .canonops import (
    CLASSIFIER_OPS,
    CanonicalOp,
    OPS,
    improves_structure,
    preserves_structure,
)
from .relations import ValuedStructure, build_hat, feas_structure, is_equality_invariant

P = "P"
NP_COMPLETE = "NP-complete"

CONST_CASE = "constCase"
LEX_CASE = "lexCase"
ESS_CRISP_CASE = "essentiallyCrispCase"
HARD_CASE = "hardCase"
EQ_CONST_CASE = "eqConstCase"
EQ_INJ_CASE = "eqInjCase"
EQ_HARD_CASE = "eqHardCase"

_HARD_NOTE = ("NP-complete by the hardness side of the dichotomy; "
              "exclusive with the tractable cases unless P = NP")


@dataclass(frozen=True)
class Verdict:
    complexity: str
    case: str
    witness: Optional[CanonicalOp] = None
    note: str = ""

    def __str__(self) -> str:
        w = f" witness={self.witness}" if self.witness else ""
        return f"{self.complexity} [{self.case}]{w}"


def _first_preserver(crisp: ValuedStructure) -> Optional[CanonicalOp]:
    """First of the eight catalog operations preserving every relation."""
    for op in CLASSIFIER_OPS:
        if preserves_structure(op, crisp):
            return op
    return None


def classify_temporal(structure: ValuedStructure) -> Verdict:
    """P or NP-complete for the optimization problem of the structure."""
    if improves_structure(OPS["const0"], structure):
        return Verdict(P, CONST_CASE)

    if structure.essentially_crisp:
        op = _first_preserver(feas_structure(structure))
        if op is not None:
            return Verdict(P, ESS_CRISP_CASE, witness=op)
        return Verdict(NP_COMPLETE, HARD_CASE, note=_HARD_NOTE)

    if improves_structure(OPS["lex"], structure):
        op = _first_preserver(build_hat(structure))
        if op is not None:
            return Verdict(P, LEX_CASE, witness=op)

    return Verdict(NP_COMPLETE, HARD_CASE, note=_HARD_NOTE)


def classify_equality(structure: ValuedStructure) -> Verdict:
    """Dichotomy for structures invariant under all permutations of Q."""
    for rel in structure:
        if not is_equality_invariant(rel):
            raise ValueError(
                f"relation {rel.name!r} is not equality-invariant")
    if improves_structure(OPS["const0"], structure):
        return Verdict(P, EQ_CONST_CASE)
    if improves_structure(OPS["inj"], structure):
        return Verdict(P, EQ_INJ_CASE)
    return Verdict(NP_COMPLETE, EQ_HARD_CASE, note=_HARD_NOTE)
