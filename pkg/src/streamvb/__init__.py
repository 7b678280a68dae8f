"""Streaming mean field variational Bayes for semiparametric regression.

Batch and online coordinate-ascent solvers for Gaussian linear regression,
Gaussian linear mixed models (random intercepts and penalized-spline additive
models), Laplace-Zero sparse shrinkage regression and Bernoulli-logit mixed
models, together with a warm-up acceptance diagnostic, seeded simulation data
generators and a CSV-streaming command line interface.
"""

from ._linalg import NumericalError
from .builder import ModelPlan, UnitScaler, build_plan
from .config import ConfigError, RunConfig, SmoothColumn, emit_config, parse_config
from .diagnostics import (
    DiagnosticTrace,
    LinRegAdapter,
    LMMAdapter,
    LogisticAdapter,
    Recommendation,
    SparseAdapter,
    divergence_score,
    recommend,
    run_warmup_protocol,
)
from .ingest import CsvStream, IngestError
from .linreg import FitResult, LinRegHyper, LinRegState, elbo, fit_batch, step_online
from .lmm import (
    BlockSpec,
    LMMFitResult,
    LMMState,
    build_row_additive,
    build_row_random_intercept,
    fit_batch_lmm,
    step_online_lmm,
)
from .logistic import (
    LogisticFitResult,
    LogisticState,
    fit_batch_logistic,
    step_online_logistic,
    xi_for_row,
)
from .sparse import SparseFitResult, SparseHyper, SparseState, fit_batch_sparse, step_online_sparse
from .special import digamma, lambda_jj
from .splines import SplineBasis, default_knot_count, make_knots
from .suffstats import LogisticMoments, SparseMoments, StreamingMoments
from .summaries import ParameterSummary, invgamma_summary, normal_summary

__version__ = "1.0.0"

__all__ = [
    "__version__",
    "NumericalError",
    "ModelPlan",
    "UnitScaler",
    "build_plan",
    "ConfigError",
    "RunConfig",
    "SmoothColumn",
    "emit_config",
    "parse_config",
    "DiagnosticTrace",
    "Recommendation",
    "LinRegAdapter",
    "LMMAdapter",
    "LogisticAdapter",
    "SparseAdapter",
    "divergence_score",
    "recommend",
    "run_warmup_protocol",
    "CsvStream",
    "IngestError",
    "FitResult",
    "LinRegHyper",
    "LinRegState",
    "elbo",
    "fit_batch",
    "step_online",
    "BlockSpec",
    "LMMFitResult",
    "LMMState",
    "build_row_additive",
    "build_row_random_intercept",
    "fit_batch_lmm",
    "step_online_lmm",
    "LogisticFitResult",
    "LogisticState",
    "fit_batch_logistic",
    "step_online_logistic",
    "xi_for_row",
    "SparseFitResult",
    "SparseHyper",
    "SparseState",
    "fit_batch_sparse",
    "step_online_sparse",
    "digamma",
    "lambda_jj",
    "SplineBasis",
    "default_knot_count",
    "make_knots",
    "LogisticMoments",
    "SparseMoments",
    "StreamingMoments",
    "ParameterSummary",
    "invgamma_summary",
    "normal_summary",
]
