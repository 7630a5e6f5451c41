"""Exact invariants of F-crystals over truncated Witt vectors of finite
fields: Hodge and Newton slopes, homomorphism groups of truncations, the
level module and level torsion, and the isomorphism number, with
brute-force and closed-form cross-checks."""

from .crystal import (
    FCrystal,
    LatticedIsocrystal,
    PermutationCrystal,
    base_extend,
    direct_sum,
    dual,
    f_basis,
    hodge_slopes,
    hom_crystal,
    is_isoclinic,
    is_ordinary,
    newton_slopes,
    permutation_crystal,
    twist,
)
from .errors import (
    ArgumentError,
    BudgetError,
    DocumentError,
    ExtendBaseField,
    FCrystalError,
    NonconvergenceError,
    PrecisionError,
    ResourceError,
    SplitFailed,
)
from .invariants import (
    Gamma1Data,
    InvariantReport,
    gamma1_permutation,
    isom_number,
    rank2_closed_form,
    report,
)
from .lattice import (
    Lattice,
    containment_exponent,
    lattice_contains,
    lattice_image,
    lattice_intersect,
    lattice_preimage,
    lattice_sum,
)
from .level import LevelModule, level_module, level_torsion, phi_minus_id, solve_phi_minus_id
from .linalg import PMatrix, char_poly, smith_normal_form
from .oracle import SearchBudget, brute_hom_s, brute_isom_classes
from .padic import Zq, ZqElem, frobenius, make_ring, teichmuller, valuation
from .rpoly import newton_polygon, root_valuations
from .slopes import SlopeSplit, slope_split
from .truncation import (
    HomGroup,
    block_ldu,
    endo_number_hat,
    exact_sequence_check,
    hom_s,
    image_of_reduction,
    is_automorphism_mod,
    is_isomorphic_truncation,
    reduce_hom,
)
from .witt import (
    WittPolyTable,
    WittVec,
    frobenius_w,
    ghost,
    verschiebung_w,
    witt_add,
    witt_from_coords,
    witt_mul,
    witt_poly_table,
    witt_product_coord,
    witt_to_zq,
    zq_to_witt,
)

__all__ = [name for name in dir() if not name.startswith("_")]
