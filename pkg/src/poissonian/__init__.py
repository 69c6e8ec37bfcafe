"""Pair correlations of dilated integer sets modulo one, additive energy and gcd-restricted arc systems."""

__version__ = "0.1.0"

from .errors import PreconditionError, ResourceGuardError
from .setcore import IntegerSet, DiffRep, gallery, make_set, diff_rep, energy
from .paircorr import AlphaValue, pair_corr, pair_corr_direct, pair_corr_via_r, corr_scan
from .schmidt import SchmidtConfig, f_star, l1_distance_exact, variance_mc
from .randmodel import RandomModelParams, psi, sample_set
from .diophantine import cf_expand, khintchine_witnesses, divergence_demo

__all__ = [
    "PreconditionError",
    "ResourceGuardError",
    "IntegerSet",
    "DiffRep",
    "gallery",
    "make_set",
    "diff_rep",
    "energy",
    "AlphaValue",
    "pair_corr",
    "pair_corr_direct",
    "pair_corr_via_r",
    "corr_scan",
    "SchmidtConfig",
    "f_star",
    "l1_distance_exact",
    "variance_mc",
    "RandomModelParams",
    "psi",
    "sample_set",
    "cf_expand",
    "khintchine_witnesses",
    "divergence_demo",
]
