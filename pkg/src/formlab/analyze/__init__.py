"""Rank, k-nullity with certificates, rational bounds, and low-rank classification."""
from .classify import (
    ClassificationError,
    RankSixClass,
    classify_low_rank,
    hitchin_endomorphism,
    quartic_invariant,
    restrict_to_complement_of_radical,
)
from .core import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    NullityCertificate,
    NullityProof,
    RationalBoundCertificate,
    Specialization,
    certify_rational,
    contraction_matrix,
    decide_nullity_geq,
    nullity_exact,
    projective_count,
    radical,
    rank,
    rational_witness,
    verify_certificate,
    verify_witness,
)
from .oracle import ORACLE_CAP, OracleCapExceeded, oracle_nullity

__all__ = [
    "BudgetExceeded",
    "ClassificationError",
    "DEFAULT_BUDGET",
    "NullityCertificate",
    "NullityProof",
    "ORACLE_CAP",
    "OracleCapExceeded",
    "RankSixClass",
    "RationalBoundCertificate",
    "Specialization",
    "certify_rational",
    "classify_low_rank",
    "contraction_matrix",
    "decide_nullity_geq",
    "hitchin_endomorphism",
    "nullity_exact",
    "oracle_nullity",
    "projective_count",
    "quartic_invariant",
    "radical",
    "rank",
    "rational_witness",
    "restrict_to_complement_of_radical",
    "verify_certificate",
    "verify_witness",
]
