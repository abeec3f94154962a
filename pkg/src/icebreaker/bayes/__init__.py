"""Bayesian change points, hierarchical ANOVA and convergence checks."""

from .anova import AnovaPosterior, hierarchical_anova, icc_summary
from .bcp import BcpResult, barry_hartigan
from .diagnostics import gelman_rubin

__all__ = [
    "AnovaPosterior",
    "BcpResult",
    "barry_hartigan",
    "gelman_rubin",
    "hierarchical_anova",
    "icc_summary",
]
