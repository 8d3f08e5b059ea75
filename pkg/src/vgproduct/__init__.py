"""Exact distribution theory for products of independent variance-gamma variables.

The density, CDF, characteristic function, sign probability and asymptotics
of ``Z = X_1 ... X_N`` with ``X_i ~ VG(m_i, α_i, β_i)``, evaluated through
Meijer G-functions, with brute-force oracles for cross-checking.
"""
from .meijer import ContourError, EvalResult, MeijerGSpec, evaluate
from .product import (
    ProductSpec,
    pdf_origin_asymptotic,
    prob_nonpositive,
    product_cdf_numeric,
    product_cdf_symmetric,
    product_cf_halfint,
    product_cf_symmetric,
    product_pdf,
    product_sf_numeric,
    quantile_asymptotic,
    quantile_numeric,
    tail_asymptotic_cdf,
    tail_asymptotic_pdf,
)
from .special_cases import CorrelatedNormalSpec, LaplaceProductSpec, MixedNormalLaplaceSpec
from .vg import SampleBatch, SingularityError, VgParams, vg_cdf, vg_cf, vg_pdf, vg_sample

__version__ = "0.1.0"

__all__ = [
    "ContourError",
    "EvalResult",
    "MeijerGSpec",
    "evaluate",
    "ProductSpec",
    "pdf_origin_asymptotic",
    "prob_nonpositive",
    "product_cdf_numeric",
    "product_cdf_symmetric",
    "product_cf_halfint",
    "product_cf_symmetric",
    "product_pdf",
    "product_sf_numeric",
    "quantile_asymptotic",
    "quantile_numeric",
    "tail_asymptotic_cdf",
    "tail_asymptotic_pdf",
    "CorrelatedNormalSpec",
    "LaplaceProductSpec",
    "MixedNormalLaplaceSpec",
    "SampleBatch",
    "SingularityError",
    "VgParams",
    "vg_cdf",
    "vg_cf",
    "vg_pdf",
    "vg_sample",
]
