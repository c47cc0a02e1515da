"""Trace polynomials of words in Gamma(2) and exact checks of their sign coherence."""

__version__ = "0.1.0"

from .matrices import (
    CONSTANTS,
    GenWord,
    Generator,
    IntMatrix2,
    PolyMatrix2,
    compute_F,
    compute_F_sigma,
    is_decreasing,
    m_table,
    p_k,
    trace_comb,
    word_to_matrix,
)
from .polynomial import MultilinearError, MultilinearPoly, Pattern, SignPattern, SignSequence
from .verify import (
    GoodnessReport,
    extend_sigma,
    goodness,
    numeric_oracle,
    predicted_sign,
    verify_comb_good,
    verify_theorem,
)
from .certificate import CertificateReport, full_certificate

__all__ = [
    "CONSTANTS",
    "CertificateReport",
    "GenWord",
    "Generator",
    "GoodnessReport",
    "IntMatrix2",
    "MultilinearError",
    "MultilinearPoly",
    "Pattern",
    "PolyMatrix2",
    "SignPattern",
    "SignSequence",
    "compute_F",
    "compute_F_sigma",
    "extend_sigma",
    "full_certificate",
    "goodness",
    "is_decreasing",
    "m_table",
    "numeric_oracle",
    "p_k",
    "predicted_sign",
    "trace_comb",
    "verify_comb_good",
    "verify_theorem",
    "word_to_matrix",
]
