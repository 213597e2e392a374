"""
The omitted-value argument as executable numerics.

For a self-map f of the disc with f(0) = 0 omitting alpha_1..alpha_k:
  h = prod_j (alpha_j - f)/(1 - alpha_j f) is zero-free on the disc,
  g is a branch of log h with g(0) = sum_j ln(alpha_j),
  rho = g / g(0) has positive real part and rho(0) = 1, so |rho'(0)| <= 2.
The bound on |f'(0)| follows from g'(0) = f'(0) * sum_j (alpha_j^2 - 1)/alpha_j.

Maps come from a closed catalog. Modules owning a construction register its class in
`catalog`; evaluate() refuses anything else.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

import ovbound.core as core
import ovbound.bounds as bounds
import ovbound.continuation as continuation
import ovbound.util as util
import ovbound.exception as exception

logger = logging.getLogger(__name__)

# Map kinds, populated by the modules that own each construction
catalog = {}

DEFAULT_RADIUS = 0.5
DEFAULT_NODES = 256

# Slack below this with passing hypotheses contradicts the bound
SLACK_TOLERANCE = 1e-7

# Exceptions that mark a sample as failed rather than aborting a verification
SAMPLE_FAILURES = (
    exception.BranchContinuationException,
    exception.PoleException,
    exception.OVBInternalException
)

class AnalyticMap:
    """
    Catalog member. evaluate() accepts scalars or arrays of points in the open disc and
    every member returns exactly 0 at the origin.
    """
    kind = None

    def __init__(self, omits=()):
        omits = sorted(float(x) for x in omits)
        for alpha in omits:
            core.check_open_interval(alpha)

        self.omits = tuple(omits)

        # Radius of the largest disc about 0 on which the construction is analytic
        self.analytic_radius = 1.0

    def evaluate(self, z):
        raise exception.OVBUnimplementedException(f"evaluate undefined for {type(self).__name__}")

    def params(self):
        raise exception.OVBUnimplementedException(f"params undefined for {type(self).__name__}")

    def describe(self):
        descriptor = {"kind": self.kind}
        descriptor.update(self.params())
        descriptor["omits"] = list(self.omits)

        return descriptor

    def declared_set(self):
        util.validate(len(self.omits) > 0, f"{self.kind} declares no omitted values",
            exception.PreconditionException)

        return bounds.ExceptionalSet(self.omits)

    def __repr__(self):
        return f"{type(self).__name__}({self.params()})"

class ScaledIdentity(AnalyticMap):
    kind = "scaled_identity"

    def __init__(self, d, omits=()):
        super().__init__(omits)

        d = complex(d)
        util.validate(abs(d) <= 1.0, f"scaled_identity requires |d| <= 1: {d}", exception.DomainException)

        # |d z| < |d|, so any alpha > |d| is provably omitted
        for alpha in self.omits:
            util.validate(alpha > abs(d), f"scaled_identity({d}) cannot be shown to omit {alpha}")

        self.d = d

    def evaluate(self, z):
        return util.as_scalar(self.d * np.asarray(z, dtype=complex))

    def params(self):
        return {"d": self.d}

class SchwarzFamily(AnalyticMap):
    """
    psi_alpha(alpha ** cayley(inner(z))). With inner(z) = c z this is the single-value
    extremal map; any other inner self-map fixing 0 gives a map omitting alpha with
    f'(0) = inner'(0) times the extremal derivative.
    """
    kind = "schwarz_family"

    def __init__(self, alpha, inner):
        super().__init__((alpha,))
        check_map(inner)

        self.alpha = float(alpha)
        self.inner = inner
        self.analytic_radius = inner.analytic_radius

    def evaluate(self, z):
        return core.blaschke(self.alpha, core.cayley_power(self.alpha, self.inner.evaluate(z)))

    def params(self):
        return {"alpha": self.alpha, "inner": self.inner.describe()}

@dataclass(frozen=True, eq=False)
class ContinuationTrace:
    path: np.ndarray
    log_values: np.ndarray
    final: complex

@dataclass(frozen=True)
class DerivativeEstimate:
    value: complex
    radius: float
    nodes: int
    error_indicator: float

    @property
    def accepted(self):
        return self.error_indicator < 1e-9 * max(1.0, abs(self.value))

    def to_dict(self):
        return {
            "value": self.value,
            "modulus": abs(self.value),
            "argument_degrees": util.argument_degrees(self.value),
            "radius": self.radius,
            "nodes": self.nodes,
            "error_indicator": self.error_indicator,
            "accepted": self.accepted
        }

@dataclass(frozen=True)
class SampleSummary:
    self_map_margin: float
    omitted_min_distance: float
    unresolved_samples: int
    evaluation_failures: int

@dataclass(frozen=True)
class VerificationReport:
    map_descriptor: dict
    self_map_margin: float
    origin_value: complex
    omitted_min_distance: float
    derivative: DerivativeEstimate
    bound: bounds.BoundReport
    slack: float
    rho_prime: float
    log_derivative: DerivativeEstimate
    identity_gap: float
    analytic_radius: float
    unresolved_samples: int
    evaluation_failures: int
    hypotheses_hold: bool
    sharp: bool

    def to_dict(self):
        return {
            "map": self.map_descriptor,
            "self_map_margin": self.self_map_margin,
            "origin_value": self.origin_value,
            "omitted_min_distance": self.omitted_min_distance,
            "derivative": None if self.derivative is None else self.derivative.to_dict(),
            "bound": self.bound.to_dict(),
            "slack": self.slack,
            "rho_prime": self.rho_prime,
            "log_derivative": None if self.log_derivative is None else self.log_derivative.to_dict(),
            "identity_gap": self.identity_gap,
            "analytic_radius": self.analytic_radius,
            "unresolved_samples": self.unresolved_samples,
            "evaluation_failures": self.evaluation_failures,
            "hypotheses_hold": self.hypotheses_hold,
            "sharp": self.sharp
        }

def check_map(analytic_map):
    util.validate(isinstance(analytic_map, AnalyticMap), f"Not an analytic map: {analytic_map!r}")
    util.validate(catalog.get(analytic_map.kind) is type(analytic_map),
        f"Map kind is not part of the catalog: {type(analytic_map).__name__}")

def evaluate(analytic_map, z):
    check_map(analytic_map)
    core.disc_point(z)

    return analytic_map.evaluate(z)

def h_product(exceptional_set, fval):
    """
    prod_j psi_{alpha_j}(fval)
    """
    util.validate(isinstance(exceptional_set, bounds.ExceptionalSet), "Invalid exceptional set passed to h_product")
    core.disc_point(fval)

    fval = np.asarray(fval, dtype=complex)

    product = np.ones_like(fval)
    for alpha in exceptional_set.alphas:
        product = product * core.blaschke(alpha, fval)

    return util.as_scalar(product)

def unresolved_mask(exceptional_set, fval):
    """
    True where fval lies within a few ulp of an omitted value, so that h carries no
    correct digits. Depends on f only, so the base point f(0) = 0 is always resolved.
    """
    fval = np.asarray(fval, dtype=complex)
    alphas = np.asarray(exceptional_set.alphas)

    gaps = np.abs(fval[..., None] - alphas)
    limits = core.TOLERANCES.resolution_ulps * np.spacing(alphas)

    return np.any(gaps <= limits, axis=-1)

def _h_sampler(analytic_map, exceptional_set):
    def sample(points):
        fval = np.asarray(analytic_map.evaluate(points), dtype=complex)
        h = np.asarray(h_product(exceptional_set, fval), dtype=complex)

        # Unresolvable samples read as zeros of h
        return np.where(unresolved_mask(exceptional_set, fval), 0j, h)

    return sample

def analytic_log(analytic_map, exceptional_set, z):
    """
    Branch g of log h at z, continued along [0, z] from g(0) = sum_j ln(alpha_j)
    """
    check_map(analytic_map)
    util.validate(isinstance(exceptional_set, bounds.ExceptionalSet), "Invalid exceptional set passed to analytic_log")

    z = complex(z)
    core.disc_point(z)

    ts, values = continuation.radial_refine(
        _h_sampler(analytic_map, exceptional_set), z,
        vanish_exception=exception.PrecisionLimitException
    )

    log_values = continuation.continue_log(values, exceptional_set.log_sum())
    final = complex(log_values[-1])

    # |h| < 1 on the disc
    if not final.real < 0.0:
        raise exception.OVBInternalException(f"Non-negative real part of log h at {z}: {final}")

    return ContinuationTrace(path=ts * z, log_values=log_values, final=final)

def log_values(analytic_map, exceptional_set, points):
    """
    analytic_log(...).final for many points. Returns the values and a mask of resolved
    points; points whose path passes within rounding of an omitted value are NaN.
    """
    check_map(analytic_map)

    points = np.asarray(points, dtype=complex)
    flat = points.ravel()
    core.disc_point(flat)

    finals = np.full(flat.shape, np.nan + 0j)
    sample = _h_sampler(analytic_map, exceptional_set)

    try:
        ts, matrix, ok = continuation.radial_batch(sample, flat)
        if np.any(ok):
            finals[ok] = continuation.continue_log(matrix[ok], exceptional_set.log_sum())[:, -1]
        pending = np.flatnonzero(~ok)
    except SAMPLE_FAILURES as e:
        logger.debug(f"Batch continuation failed ({e}), tracing points one at a time")
        pending = np.arange(flat.size)

    unresolved = 0
    for index in pending:
        try:
            finals[index] = analytic_log(analytic_map, exceptional_set, flat[index]).final
        except exception.PrecisionLimitException:
            unresolved = unresolved + 1

    logger.debug(f"log_values: {flat.size} points, {len(pending)} refined, {unresolved} unresolved")

    resolved = ~np.isnan(finals)
    if np.any(finals[resolved].real >= 0.0):
        raise exception.OVBInternalException("Non-negative real part of log h in batch continuation")

    return finals.reshape(points.shape), resolved.reshape(points.shape)

def contour_coefficient(func, radius, nodes):
    """
    First Taylor coefficient by the trapezoidal rule on |z| = radius
    """
    unit = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    values = np.asarray(func(radius * unit), dtype=complex)

    return complex(np.sum(values * np.conj(unit)) / (nodes * radius))

def _contour_estimate(func, radius, nodes):
    util.validate(isinstance(radius, (int, float)) and 0.0 < radius <= 0.75,
        f"Contour radius must lie in (0, 0.75]: {radius}")
    util.validate(util.is_power_of_two(nodes) and nodes >= 64,
        f"Node count must be a power of two >= 64: {nodes}")

    value = contour_coefficient(func, radius, nodes)
    check = contour_coefficient(func, radius / 2.0, nodes)

    return DerivativeEstimate(value=value, radius=float(radius), nodes=int(nodes), error_indicator=abs(value - check))

def derivative_at_zero(analytic_map, radius=DEFAULT_RADIUS, nodes=DEFAULT_NODES):
    check_map(analytic_map)

    return _contour_estimate(analytic_map.evaluate, radius, nodes)

def log_derivative_at_zero(analytic_map, exceptional_set, radius=DEFAULT_RADIUS, nodes=DEFAULT_NODES):
    """
    g'(0) by contour integration of the traced logarithm
    """
    def traced(points):
        finals, resolved = log_values(analytic_map, exceptional_set, points)
        if not np.all(resolved):
            raise exception.PrecisionLimitException(f"Contour of radius {radius} crosses unresolvable samples")

        return finals

    return _contour_estimate(traced, radius, nodes)

def rho_prime_zero(analytic_map, exceptional_set, radius=DEFAULT_RADIUS, nodes=DEFAULT_NODES):
    """
    |rho'(0)| = |g'(0)| / |sum_j ln(alpha_j)|, at most 2 for maps omitting the set
    """
    check_map(analytic_map)
    util.validate(evaluate(analytic_map, 0j) == 0, "rho_prime_zero requires f(0) = 0", exception.PreconditionException)

    estimate = log_derivative_at_zero(analytic_map, exceptional_set, radius, nodes)
    rho = abs(estimate.value) / abs(exceptional_set.log_sum())

    if rho > 2.0 + 1e-8:
        logger.error(f"|rho'(0)| = {rho} exceeds 2 for {analytic_map!r}")

    return rho

def exponential_consistency(analytic_map, exceptional_set, plan=core.DEFAULT_PLAN):
    """
    Largest relative residual |exp(g) - h| / |h| over the resolved grid points, and
    the number of unresolved points
    """
    points = core.disc_grid(plan)

    finals, resolved = log_values(analytic_map, exceptional_set, points)
    h = np.asarray(h_product(exceptional_set, evaluate(analytic_map, points[resolved])), dtype=complex)

    residual = np.abs(np.exp(finals[resolved]) - h) / np.abs(h)
    worst = float(residual.max()) if residual.size > 0 else 0.0

    return worst, int(np.count_nonzero(~resolved))

def _evaluate_samples(analytic_map, points):
    try:
        return np.asarray(analytic_map.evaluate(points), dtype=complex), 0
    except SAMPLE_FAILURES as e:
        logger.debug(f"Vectorized evaluation failed ({e}), evaluating samples one at a time")

    values = np.full(points.shape, np.nan + 0j)
    failures = 0

    for index, z in enumerate(points):
        try:
            values[index] = analytic_map.evaluate(z)
        except SAMPLE_FAILURES as e:
            logger.debug(f"Sample {z} failed: {e}")
            failures = failures + 1

    return values, failures

def sample_hypotheses(analytic_map, exceptional_set, plan=core.DEFAULT_PLAN):
    """
    Self-map margin and distance to the omitted values over the sampling plan
    """
    check_map(analytic_map)
    util.validate(isinstance(exceptional_set, bounds.ExceptionalSet), "Invalid exceptional set passed to sample_hypotheses")

    values, failures = _evaluate_samples(analytic_map, core.disc_grid(plan))

    sampled = values[np.isfinite(values)]
    self_map_margin = 1.0 - float(np.max(np.abs(sampled))) if sampled.size > 0 else math.nan

    # Samples within rounding of an omitted value cannot be told apart from a hit
    inside = sampled[np.abs(sampled) < 1.0]
    resolved = ~unresolved_mask(exceptional_set, inside)

    distances = np.abs(inside[resolved][:, None] - np.asarray(exceptional_set.alphas)[None, :])

    return SampleSummary(
        self_map_margin=self_map_margin,
        omitted_min_distance=float(distances.min()) if distances.size > 0 else math.nan,
        unresolved_samples=int(np.count_nonzero(~resolved)),
        evaluation_failures=failures
    )

def verify_bound(analytic_map, exceptional_set, plan=core.DEFAULT_PLAN, *, radius=DEFAULT_RADIUS, nodes=DEFAULT_NODES):
    """
    Checks the hypotheses (f(0) = 0, |f| < 1, omission) on the sampling plan and the
    conclusion |f'(0)| <= bound. Failed checks are recorded in the report, not raised.
    """
    check_map(analytic_map)
    util.validate(isinstance(exceptional_set, bounds.ExceptionalSet), "Invalid exceptional set passed to verify_bound")
    util.validate(isinstance(plan, core.DiscSamplingPlan), "Invalid plan passed to verify_bound")

    samples = sample_hypotheses(analytic_map, exceptional_set, plan)
    failures = samples.evaluation_failures

    self_map_margin = samples.self_map_margin
    omitted_min_distance = samples.omitted_min_distance
    unresolved = samples.unresolved_samples

    origin_value = complex(evaluate(analytic_map, 0j))

    # Stay well inside the disc where the construction is analytic
    effective_radius = min(radius, 0.5 * analytic_map.analytic_radius)
    bound = bounds.bound_k(exceptional_set)

    derivative = None
    slack = math.nan
    try:
        derivative = derivative_at_zero(analytic_map, effective_radius, nodes)
        slack = bound.bound - abs(derivative.value)
    except SAMPLE_FAILURES as e:
        logger.warning(f"Derivative estimate failed for {analytic_map!r}: {e}")
        failures = failures + 1

    log_derivative = None
    rho_prime = math.nan
    identity_gap = math.nan
    try:
        log_derivative = log_derivative_at_zero(analytic_map, exceptional_set, effective_radius, nodes)
        rho_prime = abs(log_derivative.value) / abs(exceptional_set.log_sum())
        if derivative is not None:
            identity_gap = abs(abs(log_derivative.value) - abs(derivative.value) * bound.denominator)
    except SAMPLE_FAILURES as e:
        logger.warning(f"Log derivative estimate failed for {analytic_map!r}: {e}")
        failures = failures + 1

    hypotheses_hold = bool(
        origin_value == 0
        and self_map_margin > 0.0
        and omitted_min_distance > 0.0
        and failures == 0
        and analytic_map.analytic_radius >= 1.0
    )

    if slack < -SLACK_TOLERANCE:
        if hypotheses_hold:
            logger.error(f"Negative slack {slack} with all hypotheses satisfied for {analytic_map!r}")
        else:
            logger.warning(f"Negative slack {slack} for {analytic_map!r}; hypothesis checks failed")

    logger.debug(f"verify_bound {analytic_map!r}: slack {slack}, margin {self_map_margin}, unresolved {unresolved}")

    return VerificationReport(
        map_descriptor=analytic_map.describe(),
        self_map_margin=self_map_margin,
        origin_value=origin_value,
        omitted_min_distance=omitted_min_distance,
        derivative=derivative,
        bound=bound,
        slack=slack,
        rho_prime=rho_prime,
        log_derivative=log_derivative,
        identity_gap=identity_gap,
        analytic_radius=float(analytic_map.analytic_radius),
        unresolved_samples=unresolved,
        evaluation_failures=failures,
        hypotheses_hold=hypotheses_hold,
        sharp=bool(abs(slack) < core.TOLERANCES.sharpness)
    )

catalog[ScaledIdentity.kind] = ScaledIdentity
catalog[SchwarzFamily.kind] = SchwarzFamily
