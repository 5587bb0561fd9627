"""Exact fixed-point invariants of self-maps of finite 1-complexes.

Free groupoids presented by graphs; Lefschetz numbers, transfers, and
Reidemeister traces computed by independent routes that must agree;
integer chain complexes with Koszul-signed tensor products and duals;
matrix/groupoid/group-ring bicategories with shadows and their trace
comparison theorems as executable checks.
"""

from .errors import ConsistencyError, InputError, TraceKitError
from .formal import FormalSum
from .freegpd import (
    Distinct,
    Equivalent,
    Graph,
    GroupoidEnd,
    Letter,
    Pi0Partition,
    Unknown,
    Word,
    apply_endo,
    collapse_edge,
    compose,
    invert,
    loop_canonical,
    pi0,
    reduce_word,
    twisted_equiv,
    twisted_invariant,
)
from .intlinalg import (
    CokernelElement,
    IntMatrix,
    SnfResult,
    cokernel_class,
    det,
    kron,
    smith_normal_form,
    trace,
)
from .chain import (
    ChainComplex,
    ChainMap,
    Duality,
    H0Class,
    dual,
    dual_map,
    h0_class,
    lefschetz_trace,
    tensor,
    tensor_map,
    twisted_trace,
    unit_complex,
    validate,
)
from .fixpt import (
    Bounded,
    Exact,
    ReidemeisterTrace,
    diagonal_map,
    lefschetz,
    reidemeister_trace,
    rt_augment,
    rt_project_pi0,
    sigma_complex,
    sigma_map,
    transfer,
)
from .gpdrep import GpdRep, RepEndo, hocolim_complex, hocolim_endo, rep_total_trace
from .matbicat import (
    Family,
    FinGroupoid,
    FinGpdRep,
    FinSet,
    FinSetFunctor,
    Group,
    MatCell,
    Mat2,
    cyclic_group,
    fam_fib_trace,
    fam_tot_trace,
    fingpd_conj_classes,
    fingpd_fib_trace,
    fingpd_fib_transfer,
    hattori_stallings,
    mat_compose,
    mat_compose2,
    mat_shadow,
    set_transfer,
    shadow_theta,
    symmetric_group,
    verify_fibtrace4,
    verify_totaltr,
)

__version__ = "0.1.0"
