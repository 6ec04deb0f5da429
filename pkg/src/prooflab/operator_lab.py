"""Numerical laboratory for set-valued operators on R^d.

Operators are given intensionally: a value map returning a set description
(finite points or an interval box, possibly with infinite faces), optional
closed-form resolvents, and a graph sampler.  Checks are sampled
falsification, reported with worst slacks; slacks are signed so that
negative means violation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class NonPositiveGamma(ValueError):
    """Resolvent and Yosida parameters must be strictly positive."""


class OutsideDomain(ValueError):
    """Point not in the relevant domain."""


class NoConvergence(RuntimeError):
    """Iterative resolvent fallback failed to verify its defining inclusion."""


class NotAvailable(RuntimeError):
    """No closed form or certified iteration applies."""


class PreconditionViolated(ValueError):
    """A quantitative hypothesis of a modulus statement fails."""


class ComonotoneStepError(ValueError):
    """The step size is incompatible with the declared comonotonicity degree."""


def l2(v: np.ndarray) -> float:
    return float(np.linalg.norm(v))


def lp_norm(v: np.ndarray, p: float) -> float:
    return float(np.linalg.norm(v, ord=p))


def as_vector(x, dim: int) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.shape != (dim,):
        raise ValueError(f"expected a vector of dimension {dim}, got shape {v.shape}")
    return v


class SetValue:
    """Description of one operator value; queries are exact per subclass."""

    def contains(self, u: np.ndarray, tol: float) -> bool:
        raise NotImplementedError

    def min_norm_point(self) -> np.ndarray:
        raise NotImplementedError

    def some_point(self) -> np.ndarray:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, count: int, span: float = 10.0) -> list[np.ndarray]:
        raise NotImplementedError


@dataclass
class FinitePoints(SetValue):
    points: np.ndarray  # shape (k, d)

    def __post_init__(self) -> None:
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))

    def contains(self, u: np.ndarray, tol: float) -> bool:
        return bool(np.min(np.linalg.norm(self.points - u, axis=1)) <= tol)

    def min_norm_point(self) -> np.ndarray:
        norms = np.linalg.norm(self.points, axis=1)
        return self.points[int(np.argmin(norms))].copy()

    def some_point(self) -> np.ndarray:
        return self.points[0].copy()

    def sample(self, rng, count, span=10.0):
        idx = rng.integers(0, len(self.points), size=count)
        return [self.points[i].copy() for i in idx]

    def distance_to(self, u: np.ndarray) -> float:
        return float(np.min(np.linalg.norm(self.points - u, axis=1)))


@dataclass
class IntervalBox(SetValue):
    """Componentwise interval, faces at ``-inf``/``inf`` allowed."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        self.lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        self.upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if np.any(self.lower > self.upper):
            raise ValueError("empty box")

    def contains(self, u: np.ndarray, tol: float) -> bool:
        return bool(np.all(u >= self.lower - tol) and np.all(u <= self.upper + tol))

    def clamp(self, u: np.ndarray) -> np.ndarray:
        return np.minimum(np.maximum(u, self.lower), self.upper)

    def min_norm_point(self) -> np.ndarray:
        return self.clamp(np.zeros_like(self.lower))

    def some_point(self) -> np.ndarray:
        finite_low = np.where(np.isfinite(self.lower), self.lower, self.upper)
        out = np.where(np.isfinite(finite_low), finite_low, 0.0)
        return self.clamp(out)

    def sample(self, rng, count, span=10.0):
        lo = np.where(np.isfinite(self.lower), self.lower, -span)
        hi = np.where(np.isfinite(self.upper), self.upper, span)
        lo = np.minimum(lo, hi)
        return [lo + (hi - lo) * rng.random(len(lo)) for _ in range(count)]

    def distance_to(self, u: np.ndarray) -> float:
        return l2(u - self.clamp(u))


def one_sided_excess(source: SetValue, target: SetValue) -> float:
    """Supremum over the source of the distance to the target set."""
    if isinstance(source, FinitePoints):
        if isinstance(target, (FinitePoints, IntervalBox)):
            return max(target.distance_to(p) for p in source.points)
        raise NotAvailable(f"unsupported target {type(target).__name__}")
    if isinstance(source, IntervalBox):
        if isinstance(target, IntervalBox):
            total = 0.0
            for a, b, c, d in zip(source.lower, source.upper, target.lower, target.upper):
                worst = 0.0
                if b > d:
                    worst = math.inf if math.isinf(b) else b - d
                if a < c:
                    gap = math.inf if math.isinf(a) else c - a
                    worst = max(worst, gap)
                total += worst**2
                if math.isinf(total):
                    return math.inf
            return math.sqrt(total)
        if isinstance(target, FinitePoints) and source.lower.shape == (1,):
            # one-dimensional interval against points: extrema lie at the
            # interval ends or between consecutive points
            if math.isinf(source.lower[0]) or math.isinf(source.upper[0]):
                return math.inf
            pts = np.sort(target.points[:, 0])
            candidates = [source.lower[0], source.upper[0]]
            mids = (pts[:-1] + pts[1:]) / 2
            candidates.extend(m for m in mids if source.lower[0] <= m <= source.upper[0])
            return max(target.distance_to(np.array([c])) for c in candidates)
        raise NotAvailable(f"unsupported pair {type(source).__name__}/{type(target).__name__}")
    raise NotAvailable(f"unsupported source {type(source).__name__}")


def hstar_check(source: SetValue, target: SetValue, eps: float, tol: float = 1e-9) -> bool:
    """Every source point has a target point within ``eps`` (one-sided)."""
    return one_sided_excess(source, target) <= eps + tol


@dataclass
class SetValuedOperator:
    """An operator ``x -> subset of R^d`` with optional numerics attached."""

    name: str
    dim: int
    value_fn: Callable[[np.ndarray], SetValue | None]
    resolvent_fn: Callable[[float, np.ndarray], np.ndarray] | None = None
    resolvent_domain_fn: Callable[[float, np.ndarray], bool] | None = None
    rho: float | None = None
    declared_classes: tuple[str, ...] = ()
    lipschitz: float | None = None
    norm_bound_on_ball: Callable[[float], float] | None = None
    graph_sampler: Callable[[np.random.Generator, int, float], list] | None = None
    zero_point: np.ndarray | None = None

    def in_domain(self, x) -> bool:
        return self.value_fn(as_vector(x, self.dim)) is not None

    def values(self, x) -> SetValue:
        v = self.value_fn(as_vector(x, self.dim))
        if v is None:
            raise OutsideDomain(f"{self.name}: {x} outside the domain")
        return v

    def membership(self, x, u, tol: float = 1e-8) -> bool:
        return self.values(x).contains(as_vector(u, self.dim), tol)

    def selection(self, x) -> np.ndarray:
        return self.values(x).some_point()

    def minimal_norm(self, x) -> np.ndarray:
        return self.values(x).min_norm_point()

    def graph_samples(self, rng: np.random.Generator, count: int, radius: float = 5.0) -> list:
        if self.graph_sampler is None:
            raise NotAvailable(f"{self.name} has no graph sampler")
        return self.graph_sampler(rng, count, radius)


def minimal_norm_selection(op: SetValuedOperator, x) -> np.ndarray:
    """The value of minimal norm: metric projection of the origin onto the set."""
    return op.minimal_norm(x)


def clamp_tilde(x, bound: float) -> np.ndarray:
    """Radial clamp onto the closed ball of the given radius (identity inside)."""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if bound <= 0:
        raise ValueError("clamp radius must be positive")
    return bound * v / max(l2(v), bound)


def resolvent(
    op: SetValuedOperator,
    gamma: float,
    x,
    tol: float = 1e-8,
    max_iter: int = 100_000,
    verify: bool = True,
) -> np.ndarray:
    """Solve ``p + gamma*u = x`` with ``u`` a value at ``p``.

    Closed forms are preferred; a contraction iteration covers single-valued
    instances with ``gamma * lipschitz < 1``.  On instances declaring a
    negative comonotonicity degree ``rho`` the call refuses step sizes with
    ``rho <= -gamma/2``, where single-valuedness is no longer guaranteed.
    """
    if gamma <= 0:
        raise NonPositiveGamma(f"gamma = {gamma}")
    if op.rho is not None and op.rho < 0 and op.rho <= -gamma / 2:
        raise ComonotoneStepError(
            f"{op.name}: rho = {op.rho} incompatible with gamma = {gamma}"
        )
    x = as_vector(x, op.dim)
    if op.resolvent_domain_fn is not None and not op.resolvent_domain_fn(gamma, x):
        raise OutsideDomain(f"{op.name}: {x} outside the resolvent domain at gamma = {gamma}")
    if op.resolvent_fn is not None:
        p = np.asarray(op.resolvent_fn(gamma, x), dtype=float)
    else:
        # damped fixed point, certified contractive only when gamma*L < 1
        single = _single_value_fn(op)
        if single is None or op.lipschitz is None or gamma * op.lipschitz >= 1:
            raise NotAvailable(f"no resolvent method for {op.name} at gamma = {gamma}")
        p = x.copy()
        for _ in range(max_iter):
            nxt = (p + x - gamma * single(p)) / 2
            if l2(nxt - p) <= 1e-10:
                p = nxt
                break
            p = nxt
        else:
            raise NoConvergence(f"{op.name}: resolvent iteration stalled")
    if verify:
        u = (x - p) / gamma
        if not op.membership(p, u, tol * max(1.0, l2(u))):
            raise NoConvergence(
                f"{op.name}: defining inclusion fails at gamma = {gamma}, x = {x}"
            )
    return p


def _single_value_fn(op: SetValuedOperator):
    def single(p: np.ndarray) -> np.ndarray:
        v = op.values(p)
        if isinstance(v, FinitePoints) and len(v.points) == 1:
            return v.points[0]
        raise NotAvailable(f"{op.name} is not single-valued at {p}")

    try:
        single(np.zeros(op.dim))
    except (NotAvailable, OutsideDomain):
        return None
    return single


def yosida(op: SetValuedOperator, gamma: float, x, tol: float = 1e-8) -> np.ndarray:
    """Single-valued approximant ``(x - resolvent(x)) / gamma``."""
    x = as_vector(x, op.dim)
    return (x - resolvent(op, gamma, x, tol=tol)) / gamma


# ---------------------------------------------------------------- catalog

def identity_operator(dim: int = 1) -> SetValuedOperator:
    eye = np.eye(dim)
    return matrix_operator(eye, name=f"identity_{dim}d" if dim > 1 else "identity")


def matrix_operator(mat: np.ndarray, name: str = "matrix") -> SetValuedOperator:
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    dim = mat.shape[0]
    op_norm = float(np.linalg.norm(mat, 2))

    def value_fn(x: np.ndarray) -> SetValue:
        return FinitePoints(np.array([mat @ x]))

    def resolvent_fn(gamma: float, x: np.ndarray) -> np.ndarray:
        return np.linalg.solve(np.eye(dim) + gamma * mat, x)

    def sampler(rng, count, radius):
        out = []
        for _ in range(count):
            x = rng.uniform(-radius, radius, size=dim)
            out.append((x, mat @ x))
        return out

    sym = (mat + mat.T) / 2
    monotone = bool(np.all(np.linalg.eigvalsh(sym) >= -1e-12))
    classes = ("monotone", "accretive") if monotone else ()
    return SetValuedOperator(
        name=name,
        dim=dim,
        value_fn=value_fn,
        resolvent_fn=resolvent_fn,
        rho=None,
        declared_classes=classes,
        lipschitz=op_norm,
        norm_bound_on_ball=lambda r: op_norm * r,
        graph_sampler=sampler,
        zero_point=np.zeros(dim),
    )


def random_monotone_matrix(rng: np.random.Generator, dim: int) -> SetValuedOperator:
    """Positive-semidefinite symmetric part plus a skew part: monotone but
    not symmetric."""
    if dim > 8:
        raise ValueError("catalog matrices stay small")
    c = rng.normal(size=(dim, dim))
    psd = c @ c.T / dim
    s = rng.normal(size=(dim, dim))
    skew = (s - s.T) / 2
    return matrix_operator(psd + skew, name=f"psd_skew_{dim}d")


def abs_subdifferential() -> SetValuedOperator:
    """Sign at nonzero points, the full interval [-1, 1] at zero."""

    def value_fn(x: np.ndarray) -> SetValue:
        if x[0] > 0:
            return FinitePoints(np.array([[1.0]]))
        if x[0] < 0:
            return FinitePoints(np.array([[-1.0]]))
        return IntervalBox(np.array([-1.0]), np.array([1.0]))

    def resolvent_fn(gamma: float, x: np.ndarray) -> np.ndarray:
        return np.sign(x) * np.maximum(np.abs(x) - gamma, 0.0)

    def sampler(rng, count, radius):
        out = []
        for _ in range(count):
            roll = rng.random()
            if roll < 0.25:
                x = np.zeros(1)
                u = rng.uniform(-1.0, 1.0, size=1)
            else:
                x = rng.uniform(-radius, radius, size=1)
                while x[0] == 0.0:
                    x = rng.uniform(-radius, radius, size=1)
                u = np.sign(x)
            out.append((x, u))
        return out

    return SetValuedOperator(
        name="abs_subdiff",
        dim=1,
        value_fn=value_fn,
        resolvent_fn=resolvent_fn,
        rho=None,
        declared_classes=("monotone", "accretive"),
        norm_bound_on_ball=lambda r: 1.0,
        graph_sampler=sampler,
        zero_point=np.zeros(1),
    )


def box_indicator(lower, upper, face_tol: float = 1e-9) -> SetValuedOperator:
    """Normal cone of a coordinate box: zero inside, outward rays on faces."""
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    dim = len(lower)

    def value_fn(x: np.ndarray) -> SetValue | None:
        if np.any(x < lower - face_tol) or np.any(x > upper + face_tol):
            return None
        lo = np.where(np.abs(x - lower) <= face_tol, -np.inf, 0.0)
        hi = np.where(np.abs(x - upper) <= face_tol, np.inf, 0.0)
        return IntervalBox(lo, hi)

    def resolvent_fn(gamma: float, x: np.ndarray) -> np.ndarray:
        return np.minimum(np.maximum(x, lower), upper)

    def sampler(rng, count, radius):
        out = []
        for _ in range(count):
            x = lower + (upper - lower) * rng.random(dim)
            u = np.zeros(dim)
            for i in range(dim):
                roll = rng.random()
                if roll < 0.2:
                    x[i] = upper[i]
                    u[i] = rng.exponential(1.0)
                elif roll < 0.4:
                    x[i] = lower[i]
                    u[i] = -rng.exponential(1.0)
            out.append((x, u))
        return out

    center = (lower + upper) / 2
    return SetValuedOperator(
        name="box_normal_cone",
        dim=dim,
        value_fn=value_fn,
        resolvent_fn=resolvent_fn,
        rho=None,
        declared_classes=("monotone", "accretive"),
        norm_bound_on_ball=lambda r: math.inf,
        graph_sampler=sampler,
        zero_point=center,
    )


def scaled_identity(c: float, dim: int = 2) -> SetValuedOperator:
    """Multiplication by ``c``; for negative ``c`` comonotone of degree ``1/c``."""

    def value_fn(x: np.ndarray) -> SetValue:
        return FinitePoints(np.array([c * x]))

    def resolvent_fn(gamma: float, x: np.ndarray) -> np.ndarray:
        return x / (1 + gamma * c)

    def sampler(rng, count, radius):
        out = []
        for _ in range(count):
            x = rng.uniform(-radius, radius, size=dim)
            out.append((x, c * x))
        return out

    rho = 1.0 / c if c != 0 else None
    classes = ("monotone", "accretive", "comonotone") if c >= 0 else ("comonotone",)
    return SetValuedOperator(
        name=f"scaled_identity_{c}",
        dim=dim,
        value_fn=value_fn,
        resolvent_fn=resolvent_fn,
        rho=rho,
        declared_classes=classes,
        lipschitz=abs(c),
        norm_bound_on_ball=lambda r: abs(c) * r,
        graph_sampler=sampler,
        zero_point=np.zeros(dim),
    )


def tan_subgradient() -> SetValuedOperator:
    """Derivative of the tangent on (0, pi/2): monotone, single-valued,
    unbounded near the right endpoint, with a genuinely partial resolvent."""
    lo, hi = 0.0, math.pi / 2

    def deriv(x: float) -> float:
        return 1.0 / math.cos(x) ** 2

    def value_fn(x: np.ndarray) -> SetValue | None:
        if not lo < x[0] < hi:
            return None
        return FinitePoints(np.array([[deriv(x[0])]]))

    def resolvent_domain_fn(gamma: float, x: np.ndarray) -> bool:
        return x[0] > gamma

    def resolvent_fn(gamma: float, x: np.ndarray) -> np.ndarray:
        target = x[0]
        a, b = 1e-15, hi - 1e-15
        for _ in range(200):
            mid = (a + b) / 2
            if mid + gamma * deriv(mid) <= target:
                a = mid
            else:
                b = mid
        return np.array([(a + b) / 2])

    def sampler(rng, count, radius):
        out = []
        for _ in range(count):
            x = rng.uniform(lo + 1e-3, hi - 1e-3)
            out.append((np.array([x]), np.array([deriv(x)])))
        return out

    return SetValuedOperator(
        name="tan_subgradient",
        dim=1,
        value_fn=value_fn,
        resolvent_fn=resolvent_fn,
        resolvent_domain_fn=resolvent_domain_fn,
        rho=None,
        declared_classes=("monotone",),
        norm_bound_on_ball=lambda r: math.inf,
        graph_sampler=sampler,
    )


@dataclass(frozen=True)
class OperatorCatalogEntry:
    name: str
    description: str
    build: Callable[[np.random.Generator], SetValuedOperator]
    gamma_grid: tuple[float, ...]


STANDARD_GAMMAS = (0.25, 0.5, 1.0, 2.0, 4.0)
COMONOTONE_GAMMAS = (8.0, 16.0)

CATALOG: dict[str, OperatorCatalogEntry] = {
    "identity": OperatorCatalogEntry(
        "identity", "identity matrix on R^2", lambda rng: identity_operator(2), STANDARD_GAMMAS
    ),
    "psd_skew": OperatorCatalogEntry(
        "psd_skew",
        "random monotone matrix (PSD symmetric part plus skew part) on R^6",
        lambda rng: random_monotone_matrix(rng, 6),
        STANDARD_GAMMAS,
    ),
    "abs_subdiff": OperatorCatalogEntry(
        "abs_subdiff", "subdifferential of the absolute value", lambda rng: abs_subdifferential(),
        STANDARD_GAMMAS,
    ),
    "box_normal_cone": OperatorCatalogEntry(
        "box_normal_cone",
        "normal cone of the box [-1, 1]^3",
        lambda rng: box_indicator([-1.0, -1.0, -1.0], [1.0, 1.0, 1.0]),
        STANDARD_GAMMAS,
    ),
    "neg_half_identity": OperatorCatalogEntry(
        "neg_half_identity",
        "scaling by -1/2: comonotone of degree -2",
        lambda rng: scaled_identity(-0.5, 2),
        COMONOTONE_GAMMAS,
    ),
    "tan_subgradient": OperatorCatalogEntry(
        "tan_subgradient",
        "derivative of tan on (0, pi/2): unbounded on bounded sets",
        lambda rng: tan_subgradient(),
        STANDARD_GAMMAS,
    ),
}


def build_catalog(seed: int = 0) -> dict[str, SetValuedOperator]:
    rng = np.random.default_rng(seed)
    return {name: entry.build(rng) for name, entry in CATALOG.items()}


# ---------------------------------------------------------------- checks

@dataclass
class CheckReport:
    name: str
    checks: int = 0
    violations: int = 0
    worst_slack: float = math.inf
    witness: str = ""

    def record(self, slack: float, context: str, tol: float) -> None:
        self.checks += 1
        if slack < self.worst_slack:
            self.worst_slack = slack
            self.witness = context if slack < -tol else self.witness
        if slack < -tol:
            self.violations += 1

    @property
    def passed(self) -> bool:
        return self.checks > 0 and self.violations == 0

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "checks": self.checks,
            "violations": self.violations,
            "worst_slack": None if math.isinf(self.worst_slack) else self.worst_slack,
            "passed": self.passed,
            "witness": self.witness,
        }


def check_operator_class(
    op: SetValuedOperator,
    kind: str,
    rng: np.random.Generator,
    samples: int = 300,
    radius: float = 5.0,
    rho: float | None = None,
    norm_p: float = 2.0,
    lam_grid: Sequence[float] = (0.25, 0.5, 1.0, 2.0, 4.0),
    tol: float = 1e-8,
) -> CheckReport:
    """Sampled falsification of a monotonicity-style class inequality.

    ``kind`` is ``monotone`` (inner product of differences nonnegative),
    ``accretive`` (norm of difference nondecreasing along the graph
    direction, any p-norm) or ``comonotone`` (inner product dominates
    ``rho`` times the squared value gap).
    """
    report = CheckReport(f"{kind}" + (f"(rho={rho})" if rho is not None else ""))
    pairs = op.graph_samples(rng, samples, radius)
    for i in range(len(pairs) - 1):
        (x, u), (y, v) = pairs[i], pairs[i + 1]
        dx, du = x - y, u - v
        ctx = f"x={x}, y={y}"
        if kind == "monotone":
            report.record(float(dx @ du), ctx, tol)
        elif kind == "comonotone":
            if rho is None:
                raise ValueError("comonotone checks need a degree rho")
            report.record(float(dx @ du) - rho * l2(du) ** 2, ctx, tol)
        elif kind == "accretive":
            base = lp_norm(dx, norm_p)
            slack = min(lp_norm(dx + lam * du, norm_p) - base for lam in lam_grid)
            report.record(slack, ctx, tol)
        else:
            raise ValueError(f"unknown class {kind!r}")
    return report


def inner_vs_norm_check(
    rng: np.random.Generator, samples: int = 500, dim: int = 4, tol: float = 1e-9
) -> CheckReport:
    """Duality bridge: a nonpositive inner product against one vector is the
    same as the vector's norm never shrinking when subtracting any scaled
    copy of the other; checked both ways on a scale grid."""
    report = CheckReport("inner_product_vs_norm_bridge")
    for _ in range(samples):
        x = rng.normal(size=dim)
        y = rng.normal(size=dim)
        inner = float(x @ y)
        grid = [0.0, 0.25, 1.0, 4.0]
        if l2(y) > 1e-12:
            grid.append(max(0.0, inner) / l2(y) ** 2)
        holds_norm = all(l2(x) <= l2(x - abs(a) * y) + tol for a in grid)
        if inner <= 0:
            report.record(1.0 if holds_norm else -1.0, f"x={x}, y={y}", tol)
        else:
            report.record(-1.0 if holds_norm else 1.0, f"x={x}, y={y}", tol)
    return report


def _alpha_for(op: SetValuedOperator, gamma: float) -> float:
    rho = op.rho if op.rho is not None else 0.0
    return 1.0 / (2.0 * (rho / gamma + 1.0))


def _sample_domain_points(
    op: SetValuedOperator, rng: np.random.Generator, count: int, gamma: float, radius: float
) -> list[np.ndarray]:
    out = []
    tries = 0
    while len(out) < count and tries < 50 * count:
        tries += 1
        x = rng.uniform(-radius, radius, size=op.dim)
        if op.name == "tan_subgradient":
            x = np.abs(x) + gamma + 1e-3
        if op.resolvent_domain_fn is None or op.resolvent_domain_fn(gamma, x):
            out.append(x)
    return out


def check_resolvent_properties(
    op: SetValuedOperator,
    rng: np.random.Generator,
    gammas: Sequence[float] = STANDARD_GAMMAS,
    samples: int = 200,
    radius: float = 5.0,
    tol: float = 1e-8,
) -> dict[str, CheckReport]:
    """Sampled verification of the resolvent property suite.

    Nonexpansiveness-style checks run on monotone/accretive instances with
    the halved averaging constant; instances declaring a negative
    comonotonicity degree run the conical and averaged forms with their own
    constant instead.  Parameter-change identities pair every two step sizes.
    """
    comonotone_only = op.rho is not None and op.rho < 0
    reports = {
        name: CheckReport(name)
        for name in (
            "defining_inclusion_unique",
            "firmly_nonexpansive_norm_form",
            "firmly_nonexpansive_inner_form",
            "nonexpansive",
            "averaged_form",
            "conical_form",
            "resolvent_identity",
            "displacement_bound",
            "yosida_membership",
            "yosida_lipschitz",
            "yosida_norm_minimality",
        )
    }
    r_grid = (0.25, 0.5, 1.0, 2.0, 4.0)
    for gamma in gammas:
        alpha = _alpha_for(op, gamma)
        points = _sample_domain_points(op, rng, samples, gamma, radius)
        graph = op.graph_samples(rng, max(10, samples // 4), radius)
        for z, w in graph:
            x = z + gamma * w
            try:
                p = resolvent(op, gamma, x, tol=tol)
            except OutsideDomain:
                continue
            reports["defining_inclusion_unique"].record(
                tol - l2(p - z), f"gamma={gamma}, z={z}", tol
            )
        for i in range(0, len(points) - 1, 2):
            x, y = points[i], points[i + 1]
            jx = resolvent(op, gamma, x, tol=tol)
            jy = resolvent(op, gamma, y, tol=tol)
            dj = jx - jy
            dxy = x - y
            dres = (x - jx) - (y - jy)
            ctx = f"gamma={gamma}, x={x}, y={y}"
            if not comonotone_only:
                norm_slack = min(l2(r * dxy + (1 - r) * dj) - l2(dj) for r in r_grid)
                reports["firmly_nonexpansive_norm_form"].record(norm_slack, ctx, tol)
                reports["firmly_nonexpansive_inner_form"].record(
                    float(dxy @ dj) - l2(dj) ** 2, ctx, tol
                )
                reports["nonexpansive"].record(l2(dxy) - l2(dj), ctx, tol)
            reports["averaged_form"].record(
                alpha * (l2(dxy) ** 2 - l2(dj) ** 2) - (1 - alpha) * l2(dres) ** 2,
                ctx,
                tol * max(1.0, l2(dxy) ** 2),
            )
            reports["conical_form"].record(
                2 * alpha * float(dj @ dres) - (1 - 2 * alpha) * l2(dres) ** 2,
                ctx,
                tol * max(1.0, l2(dxy) ** 2),
            )
            u = (x - jx) / gamma
            member = op.membership(jx, u, tol * max(1.0, l2(u)))
            reports["yosida_membership"].record(1.0 if member else -1.0, ctx, tol)
            if not comonotone_only:
                ygap = l2(u - (y - jy) / gamma)
                reports["yosida_lipschitz"].record(
                    (2 / gamma) * l2(dxy) - ygap, ctx, tol * max(1.0, l2(dxy))
                )
                if op.in_domain(x):
                    sel = op.minimal_norm(x)
                    reports["yosida_norm_minimality"].record(
                        l2(sel) - l2(u), f"gamma={gamma}, x={x}", tol * max(1.0, l2(sel))
                    )
    for gamma in gammas:
        for lam in gammas:
            points = _sample_domain_points(
                op, rng, max(10, samples // 5), max(gamma, lam), radius
            )
            for x in points:
                jl = resolvent(op, lam, x, tol=tol)
                inner = (gamma / lam) * x + (1 - gamma / lam) * jl
                try:
                    jg = resolvent(op, gamma, inner, tol=tol)
                except OutsideDomain:
                    continue
                ctx = f"gamma={gamma}, lambda={lam}, x={x}"
                scale = max(1.0, l2(x))
                reports["resolvent_identity"].record(
                    tol * scale - l2(jl - jg), ctx, tol * scale
                )
                if not comonotone_only:
                    jgx = resolvent(op, gamma, x, tol=tol)
                    reports["displacement_bound"].record(
                        (2 + gamma / lam) * l2(x - jl) - l2(x - jgx), ctx, tol * scale
                    )
    if comonotone_only:
        for name in (
            "firmly_nonexpansive_norm_form",
            "firmly_nonexpansive_inner_form",
            "nonexpansive",
            "displacement_bound",
            "yosida_lipschitz",
            "yosida_norm_minimality",
        ):
            reports.pop(name)
    return reports


def resolvent_param_modulus(b: float, l_prime: int, k: int) -> int:
    """Resolution exponent making the resolvent parameter-continuous.

    Keeping the parameter within ``2**-j`` of a reference parameter that is
    at least ``2**-l_prime``, with displacement bound ``b``, moves the
    resolvent by at most ``2**-k``.  Bounds below one clamp to one.
    """
    if l_prime < 0 or k < 0:
        raise ValueError("exponents are naturals")
    b = max(float(b), 1.0)
    return math.floor(k + l_prime + math.log2(b))


@dataclass(frozen=True)
class ModulusCheck:
    j: int
    premise_holds: bool
    bound_holds: bool
    lhs: float
    rhs: float


def verify_resolvent_param_modulus(
    op: SetValuedOperator,
    x,
    gamma: float,
    gamma_prime: float,
    b: float,
    l_prime: int,
    k: int,
    tol: float = 1e-9,
) -> ModulusCheck:
    """Instantiate the parameter-continuity statement at one sample."""
    x = as_vector(x, op.dim)
    if gamma_prime < 2.0**-l_prime:
        raise PreconditionViolated(f"gamma' = {gamma_prime} below 2^-{l_prime}")
    jp = resolvent(op, gamma_prime, x)
    displacement = l2(x - jp)
    if displacement > b + tol:
        raise PreconditionViolated(f"displacement {displacement} exceeds b = {b}")
    j = resolvent_param_modulus(b, l_prime, k)
    premise = abs(gamma - gamma_prime) <= 2.0**-j + tol
    lhs = l2(resolvent(op, gamma, x) - jp)
    rhs = 2.0**-k
    return ModulusCheck(j, premise, (not premise) or lhs <= rhs + tol, lhs, rhs)


def check_minimal_norm_selection(
    op: SetValuedOperator,
    rng: np.random.Generator,
    samples: int = 100,
    per_point: int = 20,
    radius: float = 3.0,
    tol: float = 1e-8,
) -> dict[str, CheckReport]:
    """The minimal-norm value is a value, variationally characterised and
    unique: any value of (nearly) minimal norm is (nearly) the selection."""
    member = CheckReport("min_selection_membership")
    variational = CheckReport("min_selection_variational")
    unique = CheckReport("min_selection_uniqueness")
    found = 0
    tries = 0
    while found < samples and tries < 50 * samples:
        tries += 1
        x = rng.uniform(-radius, radius, size=op.dim)
        if not op.in_domain(x):
            continue
        found += 1
        sel = op.minimal_norm(x)
        vals = op.values(x)
        ctx = f"x={x}"
        member.record(1.0 if vals.contains(sel, tol) else -1.0, ctx, tol)
        for y in vals.sample(rng, per_point):
            variational.record(-float((y - sel) @ (-sel)), f"{ctx}, y={y}", tol)
            if l2(y) <= l2(sel) + tol:
                gap = math.sqrt(max(0.0, 2 * l2(sel) * tol + tol**2))
                unique.record(gap + tol - l2(y - sel), f"{ctx}, y={y}", tol)
    return {r.name: r for r in (member, variational, unique)}


def uc_modulus_check(
    op: SetValuedOperator,
    modulus: Callable[[int], int],
    rng: np.random.Generator,
    k_grid: Sequence[int] = (0, 1, 2, 3),
    samples: int = 100,
    radius: float = 5.0,
    tol: float = 1e-9,
) -> CheckReport:
    """Uniform graph-continuity: arguments closer than the modulus threshold
    have one-sidedly close value sets at the requested resolution."""
    report = CheckReport("uniform_continuity_modulus")
    for k in k_grid:
        eps = 1.0 / (k + 1)
        delta = 1.0 / (modulus(k) + 1)
        for _ in range(samples):
            x = rng.uniform(-radius, radius, size=op.dim)
            step = rng.normal(size=op.dim)
            step = step / max(l2(step), 1e-12) * rng.random() * delta * 0.999
            y = x + step
            if not (op.in_domain(x) and op.in_domain(y)):
                continue
            excess = one_sided_excess(op.values(x), op.values(y))
            report.record(eps - excess, f"k={k}, x={x}, y={y}", tol)
    return report


def range_condition_check(
    op: SetValuedOperator,
    gamma_fn: Callable[[int], float],
    alpha_fn: Callable[[int], int],
    bound: float,
    center,
    rng: np.random.Generator,
    n_grid: Sequence[int] = (0, 1, 2, 3, 5, 8),
    samples: int = 50,
    tol: float = 1e-8,
) -> dict[str, CheckReport]:
    """Bounded range condition along a parameter sequence.

    Every sampled domain point in the ball splits as ``x = z + gamma_n * w``
    with ``w`` a value at ``z`` and ``z`` still in the ball; when the ball
    is centred at the origin, ``w`` obeys the inverse-parameter norm bound
    ``bound * 2**(alpha_n + 1)``.
    """
    center = as_vector(center, op.dim)
    split = CheckReport("range_split_membership")
    ball = CheckReport("range_split_in_ball")
    wbound = CheckReport("range_split_w_bound")
    at_origin = l2(center) == 0.0
    for n in n_grid:
        gamma = gamma_fn(n)
        if gamma <= 0:
            raise NonPositiveGamma(f"gamma_{n} = {gamma}")
        if 2.0 ** -alpha_fn(n) >= gamma:
            raise PreconditionViolated(f"alpha_{n} fails to witness gamma_{n} > 0")
        for _ in range(samples):
            x = center + rng.uniform(-1, 1, size=op.dim) * bound / math.sqrt(op.dim)
            if not op.in_domain(x):
                continue
            try:
                z = resolvent(op, gamma, x, tol=tol)
            except (OutsideDomain, NotAvailable):
                split.record(-1.0, f"n={n}, x={x}: no split", tol)
                continue
            w = (x - z) / gamma
            ctx = f"n={n}, x={x}"
            ok = op.membership(z, w, tol * max(1.0, l2(w)))
            split.record(1.0 if ok else -1.0, ctx, tol)
            ball.record(bound + tol - l2(z - center), ctx, tol)
            if at_origin:
                wbound.record(bound * 2.0 ** (alpha_fn(n) + 1) - l2(w), ctx, tol)
    out = {r.name: r for r in (split, ball, wbound)}
    if not at_origin:
        out.pop("range_split_w_bound")
    return out


def graph_closedness_check(
    op: SetValuedOperator,
    rng: np.random.Generator,
    sequences: int = 25,
    length: int = 40,
    tol: float = 1e-6,
) -> CheckReport:
    """Limits of convergent graph sequences stay in the graph (sampled)."""
    report = CheckReport("graph_closedness")
    pairs = op.graph_samples(rng, sequences, 3.0)
    for x_limit, _ in pairs:
        x_start = x_limit + rng.normal(size=op.dim)
        u_last = None
        for i in range(1, length + 1):
            x_i = x_limit + (x_start - x_limit) / 2.0**i
            if not op.in_domain(x_i):
                u_last = None
                break
            u_last = op.selection(x_i)
        if u_last is None or not op.in_domain(x_limit):
            continue
        ok = op.membership(x_limit, u_last, max(tol, 1e-4) * max(1.0, l2(u_last)))
        report.record(1.0 if ok else -1.0, f"x={x_limit}", tol)
    return report
