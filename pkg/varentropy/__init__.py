"""Sharp concentration bounds for the information content of convex measures.
"""
from varentropy.bounds import (
    DeviationProfile, LogConcaveProfile, SmallBallResult, entropy_upper_bound,
    fisher_varentropy_bound, log_mgf_normalized, psi_c, small_ball,
    small_ball_probability_bound, varentropy_bound)
from varentropy.config import RunConfig
from varentropy.errors import (
    ConfigError, DomainError, QuadratureError, SolverError, SupportError,
    UnsupportedFamilyError, VarentropyError)
from varentropy.legendre import (
    TailExponent, dual_by_grid, dual_lower, dual_upper, tail_bound, tail_exponent)
from varentropy.measures import (
    ConvexParams, DensityFamily, GaussianFamily, HomogeneousFamily, ParetoFamily,
    RadialStudentFamily, ScalarSConcaveFn, family_from_config, integrate_density)
from varentropy.moments import (
    LogConcavityCertificate, MomentCurve, certify_log_concavity,
    density_moment_curve, scalar_moment_curve)
from varentropy.montecarlo import (
    SampleReport, Verdict, information_stats, sample_gaussian, sample_pareto,
    sample_student, verify_bounds)
from varentropy.report_data import ReportData


__version__ = "0.3.0"
