"""symsum: a symbolic calculus and proof checker for sums of symplectic
4-manifolds.

Manifolds are expression trees over a small atom catalog, with marked
surfaces carrying exact eps-linear areas.  The rewrite module checks
claimed equivalence chains rule by rule, tracking whether each step is
a symplectomorphism ("=") or a weak deformation ("~"), and cross-checks
the Euler characteristic and signature at every step.
"""

__version__ = "0.1.0"

from .areas import AreaValue, area, area_add, area_less
from .core import (
    AdmissibilityError,
    Atom,
    AtomNode,
    BlowUp,
    Desing,
    EllipticSurface,
    EquivLevel,
    FourSum,
    GluingChoice,
    ManifoldExpr,
    MarkError,
    PairSum,
    ProjectivePlane,
    ProjectivePlaneReversed,
    RationalSurface,
    RuledSurface,
    SurfaceMark,
    SymsumError,
    Thicken,
    Thin,
    Violation,
    validate_ruled,
)
from .invariants import (
    InvariantVector,
    atom_invariants,
    en_inductive_invariants,
    expr_invariants,
)
from .rewrite import (
    InvariantDriftError,
    ProofStep,
    RuleError,
    Verdict,
    apply_rule,
    check_equiv,
)
from .script import RunResult, ScriptError, parse, print_script, run, serialize_expr
from .sums import (
    blow_down,
    blow_up,
    check_fourfold_admissible,
    check_pairwise_admissible,
    desingularize,
    fourfold_sum,
    pairwise_sum,
    rescale,
    shift_section_area,
    split_ruled,
    thicken,
    thin,
)
