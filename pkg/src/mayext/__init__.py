"""Second-term cohomology of the odd-primary Steenrod algebra.

The library computes the first two terms of the standard filtration
spectral sequence for Ext over the mod-p Steenrod algebra, certifies
vanishing and dimension claims, propagates dimensions through the long
exact sequences of small cell complexes, and does the degree
bookkeeping for the periodic families that those Ext groups detect.
"""

from .adams_certify import (
    Certificate,
    InvalidRange,
    MissingRepresentative,
    NamedClass,
    ParamsOutOfRange,
    UnknownName,
    WindowReport,
    adams_dr_window,
    certify_ext_dim,
    certify_ext_vanishing,
    product_nonzero_at_e2,
    resolve_named,
)
from .cli_runner import (
    DiskCache,
    Session,
    eval_expr,
    load_claims,
    run_claims,
    session_dim,
    session_vanish,
    session_window,
)
from .greek_bp import (
    AlphaIndex,
    BetaIndex,
    BPGen,
    GammaIndex,
    NoDictionaryEntry,
    UnknownFamily,
    alpha_generators,
    beta_admissible,
    enumerate_beta,
    enumerate_ext0_KR,
    enumerate_ext1_BPK,
    parse_index,
    stem_of,
    thom_image,
)
from .les_dims import (
    DimInterval,
    InsufficientWindow,
    SphereTable,
    WindowTooLarge,
    ext_dims,
    ext_dims_K,
    ext_dims_K2,
    ext_dims_L,
    ext_dims_M,
    ext_dims_M2,
    sphere_table,
    table_rows,
    window_for,
)
from .may_core import (
    Element,
    Generator,
    InvalidParams,
    MayextError,
    Monomial,
    ParseError,
    PrimeContext,
    TriDegree,
    a,
    b,
    enumerate_basis,
    h,
    multiply,
    parse_element,
    parse_monomial,
    product,
    tridegree,
)
from .may_diff import (
    E2Report,
    cell_homology,
    d1,
    e2_at,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaIndex",
    "BPGen",
    "BetaIndex",
    "Certificate",
    "DimInterval",
    "DiskCache",
    "E2Report",
    "Element",
    "GammaIndex",
    "Generator",
    "InsufficientWindow",
    "InvalidParams",
    "InvalidRange",
    "MayextError",
    "MissingRepresentative",
    "Monomial",
    "NamedClass",
    "NoDictionaryEntry",
    "ParamsOutOfRange",
    "ParseError",
    "PrimeContext",
    "Session",
    "SphereTable",
    "TriDegree",
    "UnknownFamily",
    "UnknownName",
    "WindowReport",
    "WindowTooLarge",
    "a",
    "adams_dr_window",
    "alpha_generators",
    "b",
    "beta_admissible",
    "cell_homology",
    "certify_ext_dim",
    "certify_ext_vanishing",
    "d1",
    "e2_at",
    "enumerate_basis",
    "enumerate_beta",
    "enumerate_ext0_KR",
    "enumerate_ext1_BPK",
    "eval_expr",
    "ext_dims",
    "ext_dims_K",
    "ext_dims_K2",
    "ext_dims_L",
    "ext_dims_M",
    "ext_dims_M2",
    "h",
    "load_claims",
    "multiply",
    "parse_element",
    "parse_index",
    "parse_monomial",
    "product",
    "product_nonzero_at_e2",
    "resolve_named",
    "run_claims",
    "session_dim",
    "session_vanish",
    "session_window",
    "sphere_table",
    "stem_of",
    "table_rows",
    "thom_image",
    "tridegree",
    "window_for",
]
