"""Dirichlet characters over the primes: residue statistics, block-sum
random walks and L-function cross-checks."""

__version__ = "0.1.0"

from .characters import Character, CharacterTable, Modulus, UnitValue, build_table, classic_mod7
from .kernels import BACKEND
from .primes import PrimeSieve, angle_stream, li, nth_prime, pi, primes_in
from .walk import walk, scaling_exponent, abel_identity_residual
from .ensemble import EnsembleSpec, FixedSpacing, RandomSpacing, build, build_many, normalized, theory_variance
from .residue_stats import frequencies, pair_counts, los_predicted, bias_report
from .lfunc import ComplexPoint, LFuncEvaluator, hurwitz_zeta, l_eval, euler_split, residue_at_one

__all__ = [
    "BACKEND", "Character", "CharacterTable", "ComplexPoint", "EnsembleSpec", "FixedSpacing",
    "LFuncEvaluator", "Modulus", "PrimeSieve", "RandomSpacing", "UnitValue", "abel_identity_residual",
    "angle_stream", "bias_report", "build", "build_many", "build_table", "classic_mod7", "euler_split",
    "frequencies", "hurwitz_zeta", "l_eval", "li", "los_predicted", "normalized", "nth_prime",
    "pair_counts", "pi", "primes_in", "residue_at_one", "scaling_exponent", "theory_variance", "walk",
]
