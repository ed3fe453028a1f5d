"""Dirichlet series: evaluation in the critical strip and numeric axiom checks.

Continuation into the strip uses Euler--Maclaurin summation of Hurwitz
zeta functions, ``L(s, chi) = q^-s sum_a chi(a) zeta(s, a/q)``; the Riemann
zeta function is the case ``q = 1``.  Every value comes with a truncation
bound taken from the standard Euler--Maclaurin remainder estimate

    |R_M| <= |T_{M+1}| * |s + 2M + 1| / (sigma + 2M + 1),

where ``T_{M+1}`` is the first omitted correction term, multiplied by
:data:`SAFETY`.  Rounding is covered by a worst-case sum of per-term phase
errors ``eps (1 + |s| log n) n^-sigma``.  When a requested target lies below
that floating-point floor the returned bound exceeds the target rather than
pretending otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import bernoulli, gammaln, loggamma

from .errors import CapabilityError, DomainError, HeightRangeError, PoleError, PreconditionError

HEIGHT_LIMIT = 1e5
POLE_MARGIN = 1e-3
SAFETY = 10.0
ROUNDING_FACTOR = 2.0
EPS = float(np.finfo(float).eps)
MAX_CORRECTIONS = 60
_CHUNK = 1 << 20
N_AT_ONE = 32  # circle nodes used at s = 1

_B = bernoulli(2 * MAX_CORRECTIONS + 2)
# log|B_2k / (2k)!| for k = 0 .. MAX_CORRECTIONS + 1
_LOG_BCOEF = np.array(
    [math.log(abs(_B[2 * k])) - gammaln(2 * k + 1) if k else 0.0 for k in range(MAX_CORRECTIONS + 2)]
)
_BCOEF = np.array([_B[2 * k] / math.factorial(2 * k) for k in range(MAX_CORRECTIONS + 2)])


@dataclass(frozen=True)
class EvalResult:
    value: complex
    error_bound: float
    terms_used: int


@dataclass(frozen=True)
class FunctionalData:
    """``Lambda(s) = L(s) Q^s prod Gamma(lambda_j s + mu_j)``, ``Lambda(s) = omega conj(Lambda(1 - conj s))``."""

    Q: float
    gamma_factors: tuple[tuple[float, complex], ...]
    omega: complex = 1.0

    def __post_init__(self):
        if not self.Q > 0:
            raise PreconditionError("Q must be positive")
        if abs(abs(self.omega) - 1.0) > 1e-12:
            raise PreconditionError("omega must be unimodular")
        for lam, mu in self.gamma_factors:
            if not lam > 0 or complex(mu).real < 0:
                raise PreconditionError("need lambda_j > 0 and Re mu_j >= 0")


@dataclass(frozen=True)
class DirichletSeriesSpec:
    """One L-function: coefficients, Euler factors and continuation data.

    ``continuation`` selects the strip evaluator: ``"hurwitz"`` (zeta and
    Dirichlet L-functions; ``character`` holds chi(0..q-1)), ``"synthetic"``
    (a polynomial in ``s`` with the given ``roots``, used to plant zeros), or
    ``None`` for series known only in ``sigma > 1``.
    """

    name: str
    coefficient_rule: Callable[[np.ndarray], np.ndarray]
    euler_degree: int
    alpha_rule: Callable[[np.ndarray], np.ndarray]
    sigma_L: float
    mu_L: float
    pole_order_at_1: int = 0
    functional_data: FunctionalData | None = None
    continuation: str | None = None
    character: tuple[complex, ...] | None = None
    roots: tuple[complex, ...] = ()
    sigma_m: float | None = None
    coefficient_bound: float = 1.0
    rule: str = ""

    def __post_init__(self):
        if not self.sigma_L < 1:
            raise PreconditionError("sigma_L must be < 1")
        if self.mu_L < 0:
            raise PreconditionError("mu_L must be >= 0")
        if self.continuation not in (None, "hurwitz", "synthetic"):
            raise PreconditionError(f"unknown continuation {self.continuation!r}")

    def a(self, n) -> np.ndarray:
        return np.asarray(self.coefficient_rule(np.asarray(n, dtype=np.int64)), dtype=complex)

    def alphas(self, p) -> np.ndarray:
        """Array of shape (len(p), m) with alpha_j(p)."""
        return np.asarray(self.alpha_rule(np.asarray(p, dtype=np.int64)), dtype=complex).reshape(-1, self.euler_degree)


# --------------------------------------------------------------------------
# built-in specs


def zeta_spec() -> DirichletSeriesSpec:
    return DirichletSeriesSpec(
        name="zeta",
        coefficient_rule=lambda n: np.ones(np.shape(n)),
        euler_degree=1,
        alpha_rule=lambda p: np.ones((np.size(p), 1)),
        sigma_L=0.0,
        mu_L=0.5,
        pole_order_at_1=1,
        functional_data=FunctionalData(math.pi ** -0.5, ((0.5, 0.0),), 1.0),
        continuation="hurwitz",
        character=(1.0,),
        sigma_m=0.5,
        rule="zeta",
    )


def dirichlet_spec(values: Sequence[complex], name: str, functional_data: FunctionalData | None = None,
                   sigma_m: float | None = None) -> DirichletSeriesSpec:
    """L-function of the Dirichlet character with table ``values[a] = chi(a mod q)``."""
    chi = np.asarray(values, dtype=complex)
    q = chi.size
    principal = bool(np.all((np.abs(chi) > 0) == (np.gcd(np.arange(q), q) == 1)) and np.allclose(chi[np.abs(chi) > 0], 1))
    return DirichletSeriesSpec(
        name=name,
        coefficient_rule=lambda n: chi[np.asarray(n) % q],
        euler_degree=1,
        alpha_rule=lambda p: chi[np.asarray(p) % q].reshape(-1, 1),
        sigma_L=0.0,
        mu_L=0.5,
        pole_order_at_1=1 if principal else 0,
        functional_data=functional_data,
        continuation="hurwitz",
        character=tuple(complex(v) for v in chi),
        sigma_m=sigma_m,
        rule=name,
    )


def chi4_spec() -> DirichletSeriesSpec:
    """L(s, chi_4), the non-principal character mod 4 (odd, conductor 4)."""
    fe = FunctionalData(math.sqrt(4 / math.pi), ((0.5, 0.5),), 1.0)
    return dirichlet_spec([0, 1, 0, -1], "dirichlet-chi4", fe)


def synthetic_spec(roots: Sequence[complex], name: str | None = None) -> DirichletSeriesSpec:
    """Polynomial ``prod (s - r)`` posing as an L-function, for planted-zero tests.

    Its 'series' is the constant 1; only strip evaluation is meaningful.
    """
    roots = tuple(complex(r) for r in roots)
    return DirichletSeriesSpec(
        name=name or "synthetic",
        coefficient_rule=lambda n: (np.asarray(n) == 1).astype(float),
        euler_degree=1,
        alpha_rule=lambda p: np.zeros((np.size(p), 1)),
        sigma_L=0.0,
        mu_L=0.0,
        continuation="synthetic",
        roots=roots,
        rule="synthetic:" + ",".join(repr(r) for r in roots),
    )


def spec_from_rule(rule: str) -> DirichletSeriesSpec:
    rule = rule.strip()
    if rule == "zeta":
        return zeta_spec()
    if rule == "dirichlet-chi4":
        return chi4_spec()
    if rule.startswith("synthetic:"):
        body = rule.split(":", 1)[1]
        roots = [complex(r.replace(" ", "")) for r in body.split(",") if r.strip()]
        return synthetic_spec(roots)
    raise CapabilityError(f"unknown coefficient rule {rule!r}")


# --------------------------------------------------------------------------
# Euler--Maclaurin core


def _check_points(s: np.ndarray, pole: bool):
    if np.any(~np.isfinite(s)):
        raise DomainError("non-finite evaluation point")
    if np.any(np.abs(s.imag) > HEIGHT_LIMIT):
        raise HeightRangeError(f"|Im s| exceeds height limit {HEIGHT_LIMIT:g}")
    if pole and np.any(np.abs(s - 1) < POLE_MARGIN):
        raise PoleError("evaluation point within pole margin of s = 1")


def _log_remainder(s: np.ndarray, N: float, M: int) -> np.ndarray:
    """log of the remainder bound after M correction terms at x = N."""
    sig = s.real
    lp = np.zeros(s.shape)
    with np.errstate(divide="ignore"):
        for i in range(2 * M + 1):
            lp += np.log(np.abs(s + i))
    first_omitted = _LOG_BCOEF[M + 1] + lp - (sig + 2 * M + 1) * math.log(N)
    return first_omitted + np.log(np.abs(s + 2 * M + 1)) - np.log(sig + 2 * M + 1)


def em_plan(s: np.ndarray, target: float) -> tuple[int, int]:
    """Smallest (N, M) whose remainder bound meets ``target`` at every point."""
    s = np.unique(np.atleast_1d(np.asarray(s, dtype=complex)).ravel())
    smax = float(np.max(np.abs(s)))
    N = max(6, int(math.ceil(smax / (2 * math.pi))) + 2)
    log_target = math.log(target)
    sig = s.real
    with np.errstate(divide="ignore"):
        # cumulative log|(s)_{2M+1}| for every M, shared by all N
        steps = np.log(np.abs(s[:, None] + np.arange(2 * MAX_CORRECTIONS + 1)))
    lp = np.cumsum(steps, axis=1)[:, 0::2]
    M = np.arange(MAX_CORRECTIONS)
    extra = np.log(np.abs(s[:, None] + 2 * M + 1)) - np.log(np.abs(sig[:, None] + 2 * M + 1))
    valid = np.all(sig[:, None] + 2 * M + 1 > 0, axis=0)
    while True:
        lr = _LOG_BCOEF[M + 1] + lp[:, :MAX_CORRECTIONS] - (sig[:, None] + 2 * M + 1) * math.log(N) + extra
        ok = valid & (lr.max(axis=0) < log_target)
        if ok.any():
            return N, int(np.argmax(ok))
        N = int(N * 1.25) + 1


def _power_sum(s: np.ndarray, alpha: float, N: int) -> tuple[np.ndarray, np.ndarray]:
    """sum_{n<N} (n+alpha)^-s and a rounding weight, chunked over n."""
    logs = np.log(np.arange(N, dtype=float) + alpha)
    flat = s.ravel()
    step = max(1, _CHUNK // max(flat.size, 1))
    acc = np.zeros(flat.size, dtype=complex)
    mag = np.zeros(flat.size)
    for j in range(0, N, step):
        lg = logs[j:j + step]
        acc += np.exp(-np.outer(flat, lg)).sum(axis=1)
        # phase rounding grows like |s| log n per term
        mag += (np.exp(-np.outer(flat.real, lg)) * (1 + np.outer(np.abs(flat), lg))).sum(axis=1)
    return acc.reshape(s.shape), mag.reshape(s.shape)


def _em_tail(s: np.ndarray, x: float, M: int) -> np.ndarray:
    """x^{1-s}/(s-1) + x^{-s}/2 + sum_k B_2k/(2k)! (s)_{2k-1} x^{-s-2k+1}."""
    xs = np.exp(-s * math.log(x))
    out = xs * x / (s - 1) + 0.5 * xs
    # ratio (s)_{2k-1} / x^{2k-1}, built incrementally so nothing overflows
    c = s / x
    corr = np.zeros(s.shape, dtype=complex)
    for k in range(1, M + 1):
        corr += _BCOEF[k] * c
        c = c * (s + 2 * k - 1) * (s + 2 * k) / (x * x)
    return out + xs * corr


def hurwitz_sum(s: np.ndarray, alphas: Sequence[float], weights: Sequence[complex], target: float,
                plan: tuple[int, int] | None = None):
    """``sum_i w_i zeta(s, alpha_i)`` with one shared (N, M) plan.

    Returns (values, error_bounds, N).
    """
    s = np.asarray(s, dtype=complex)
    N, M = plan if plan is not None else em_plan(s, target / (2 * SAFETY * max(1.0, float(np.sum(np.abs(weights))))))
    vals = np.zeros(s.shape, dtype=complex)
    mag = np.zeros(s.shape)
    wsum = 0.0
    for a, w in zip(alphas, weights):
        if w == 0:
            continue
        ps, pm = _power_sum(s, a, N)
        vals += w * (ps + _em_tail(s, N + a, M))
        mag += abs(w) * pm
        wsum += abs(w)
    trunc = wsum * np.exp(_log_remainder(s, N, M))
    # the rounding sum is already a worst-case linear bound; only truncation gets the safety factor
    bound = SAFETY * trunc + ROUNDING_FACTOR * EPS * (mag + np.abs(vals) + 1.0)
    return vals, bound, N


def _zeta_like(spec: DirichletSeriesSpec, s: np.ndarray, target: float, plan=None):
    chi = np.asarray(spec.character, dtype=complex)
    q = chi.size
    alphas = [a / q for a in range(1, q + 1)]
    weights = [chi[a % q] for a in range(1, q + 1)]
    if s.size == 0:
        return np.zeros(s.shape, dtype=complex), np.zeros(s.shape), 0
    qs = np.exp(-s * math.log(q)) if q > 1 else np.ones(s.shape)
    # target applies after the q^-s factor, which is at most q^-sigma_min
    scale = float(np.max(np.abs(qs)))
    vals, bound, N = hurwitz_sum(s, alphas, weights, target / max(scale, 1e-300), plan)
    return qs * vals, np.abs(qs) * bound, N


def _series_direct(spec: DirichletSeriesSpec, s: np.ndarray, target: float):
    sig = float(np.min(s.real))
    A = spec.coefficient_bound
    # tail sum_{n>N} n^-sigma <= N^{1-sigma}/(sigma-1)
    N = max(10, int(math.ceil((A / ((sig - 1) * target / (2 * SAFETY))) ** (1 / (sig - 1)))))
    N = min(N, 10 ** 7)
    n = np.arange(1, N + 1)
    a = spec.a(n)
    vals = np.zeros(s.shape, dtype=complex)
    flat = s.ravel()
    step = max(1, _CHUNK // max(flat.size, 1))
    acc = np.zeros(flat.size, dtype=complex)
    logs = np.log(n.astype(float))
    for j in range(0, N, step):
        acc += (np.exp(-np.outer(flat, logs[j:j + step])) * a[j:j + step]).sum(axis=1)
    vals.ravel()[:] = acc
    tail = A * N ** (1 - s.real) / (s.real - 1)
    return vals, SAFETY * (tail + EPS * N), N


def _synthetic(spec: DirichletSeriesSpec, s: np.ndarray):
    vals = np.ones(s.shape, dtype=complex)
    for r in spec.roots:
        vals = vals * (s - r)
    bound = SAFETY * EPS * (len(spec.roots) + 1) * np.abs(vals) + 1e-300
    return vals, bound


def _circle_average(fn, s: np.ndarray, radius: float = 0.01, nodes: int = 32):
    """Value at ``s`` of an entire function from its trapezoid circle mean."""
    w = radius * np.exp(2j * math.pi * np.arange(nodes) / nodes)
    pts = s[..., None] + w
    v, b = fn(pts)
    return v.mean(axis=-1), b.max(axis=-1)


def lfun_values(spec: DirichletSeriesSpec, s, target_error: float = 1e-10, plan=None):
    """Vectorised evaluation; returns (values, error_bounds, terms_used)."""
    s = np.asarray(s, dtype=complex)
    if spec.continuation == "synthetic":
        _check_points(s, pole=False)
        v, b = _synthetic(spec, s)
        return v, b, len(spec.roots) + 1
    _check_points(s, pole=spec.pole_order_at_1 > 0)
    if spec.continuation is None:
        if np.any(s.real <= 1):
            raise CapabilityError(f"{spec.name}: no continuation available for Re s <= 1")
        return _series_direct(spec, s, target_error)
    near = np.abs(s - 1) < POLE_MARGIN
    if np.any(near):
        # entire L-function evaluated at s = 1 through its circle mean
        vals = np.empty(s.shape, dtype=complex)
        bnds = np.empty(s.shape)
        v, b, n1 = _zeta_like(spec, s[~near], target_error, plan)
        n1 = max(n1, N_AT_ONE)
        vals[~near], bnds[~near] = v, b
        cv, cb = _circle_average(lambda p: _zeta_like(spec, p, target_error)[:2], s[near])
        vals[near], bnds[near] = cv, cb
        return vals, bnds, n1
    return _zeta_like(spec, s, target_error, plan)


def shift_grid(spec: DirichletSeriesSpec, z, ts, target_error: float = 1e-8):
    """``L(z_k + i t_j)`` for all pairs, shape ``(len(ts), len(z))``.

    For the Hurwitz continuation the power sums factor as
    ``(n+a)^-z (n+a)^-it``, so one matrix product replaces most of the
    exponentials.  One (N, M) plan is shared by the whole block.
    """
    z = np.asarray(z, dtype=complex).ravel()
    ts = np.asarray(ts, dtype=float).ravel()
    s = z[None, :] + 1j * ts[:, None]
    if spec.continuation != "hurwitz" or s.size == 0:
        v, b, _ = lfun_values(spec, s, target_error)
        return v, b
    _check_points(s, pole=spec.pole_order_at_1 > 0)
    chi = np.asarray(spec.character, dtype=complex)
    q = chi.size
    qs = np.exp(-s * math.log(q)) if q > 1 else np.ones(s.shape)
    scale = float(np.max(np.abs(qs)))
    N, M = em_plan(s, target_error / max(scale, 1e-300) / (2 * SAFETY * float(np.sum(np.abs(chi)))))
    vals = np.zeros(s.shape, dtype=complex)
    mag = np.zeros(s.shape)
    wsum = 0.0
    sabs = np.abs(s)
    for a in range(1, q + 1):
        w = chi[a % q]
        if w == 0:
            continue
        alpha = a / q
        logs = np.log(np.arange(N, dtype=float) + alpha)
        left = np.exp(-np.outer(z, logs))
        right = np.exp(-1j * np.outer(logs, ts))
        ps = (left @ right).T
        s0 = np.exp(-np.outer(z.real, logs))
        pm = s0.sum(axis=1)[None, :] + sabs * (s0 @ logs)[None, :]
        vals += w * (ps + _em_tail(s, N + alpha, M))
        mag += abs(w) * pm
        wsum += abs(w)
    trunc = wsum * np.exp(_log_remainder(s, N, M))
    # the rounding sum is already a worst-case linear bound; only truncation gets the safety factor
    bound = SAFETY * trunc + ROUNDING_FACTOR * EPS * (mag + np.abs(vals) + 1.0)
    return qs * vals, np.abs(qs) * bound


def lfun_eval(spec: DirichletSeriesSpec, s: complex, target_error: float = 1e-10) -> EvalResult:
    if not target_error > 0:
        raise PreconditionError("target_error must be positive")
    v, b, n = lfun_values(spec, np.array([complex(s)]), target_error)
    return EvalResult(complex(v[0]), float(b[0]), int(n))


def zeta_eval(s: complex, target_error: float = 1e-12) -> EvalResult:
    """Riemann zeta by Euler--Maclaurin; ``error_bound <= target_error`` unless
    the request falls below the rounding floor, in which case the honest
    (larger) bound is returned."""
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    return lfun_eval(zeta_spec(), s, target_error)


def completed_values(spec: DirichletSeriesSpec, s, target_error: float = 1e-10):
    """``(s - 1)^k L(s)``, entire for a spec whose only pole is at 1 of order k."""
    s = np.asarray(s, dtype=complex)
    k = spec.pole_order_at_1
    if k == 0:
        return lfun_values(spec, s, target_error)[:2]
    near = np.abs(s - 1) < POLE_MARGIN
    vals = np.empty(s.shape, dtype=complex)
    bnds = np.empty(s.shape)
    if np.any(~near):
        v, b, _ = lfun_values(spec, s[~near], target_error)
        f = (s[~near] - 1) ** k
        vals[~near], bnds[~near] = f * v, np.abs(f) * b
    if np.any(near):
        def fn(p):
            v, b, _ = lfun_values(spec, p, target_error)
            f = (p - 1) ** k
            return f * v, np.abs(f) * b
        vals[near], bnds[near] = _circle_average(fn, s[near])
    return vals, bnds


# --------------------------------------------------------------------------
# strip and axiom checks


@dataclass(frozen=True)
class StripSpec:
    sigma_m: float
    right_edge: float = 1.0

    def __post_init__(self):
        if not self.sigma_m < 1:
            raise PreconditionError("sigma_m must be < 1")

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z)
        return (z.real > self.sigma_m) & (z.real < self.right_edge)


def sigma_m_upper(sigma_L: float, mu_L: float) -> float:
    """Upper bound ``max(1/2, 1 - (1 - sigma_L) / (1 + 2 mu_L))`` for the
    mean-square abscissa."""
    if not sigma_L < 1:
        raise DomainError("sigma_L must be < 1")
    if mu_L < 0:
        raise DomainError("mu_L must be >= 0")
    return max(0.5, 1.0 - (1.0 - sigma_L) / (1.0 + 2.0 * mu_L))


def strip_of(spec: DirichletSeriesSpec) -> StripSpec:
    sm = spec.sigma_m if spec.sigma_m is not None else sigma_m_upper(spec.sigma_L, spec.mu_L)
    return StripSpec(sm)


def primes_upto(x: float) -> np.ndarray:
    n = int(math.floor(x))
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


SIEVE_LIMIT = 10 ** 8


def prime_mean_square(spec: DirichletSeriesSpec, x: float) -> float:
    """``(1/pi(x)) sum_{p <= x} |a(p)|^2``."""
    if x < 2:
        raise PreconditionError("x must be >= 2")
    if x > SIEVE_LIMIT:
        raise PreconditionError("x beyond sieve limit")
    p = primes_upto(x)
    a = spec.a(p)
    return float(np.sum(np.abs(a) ** 2) / p.size)


def euler_product(spec: DirichletSeriesSpec, s: complex, P: float) -> complex:
    """Truncated product over p <= P of prod_j (1 - alpha_j(p) p^-s)^-1."""
    p = primes_upto(P)
    al = spec.alphas(p)
    ps = np.exp(-complex(s) * np.log(p.astype(float)))
    terms = -np.log(1 - al * ps[:, None])
    return complex(np.exp(terms.sum()))


def euler_product_gap(spec: DirichletSeriesSpec, s: complex = 2.0, P: float = 1e5) -> float:
    """Relative gap between the truncated Euler product and the series value."""
    val = lfun_eval(spec, s, 1e-14).value
    return abs(euler_product(spec, s, P) - val) / abs(val)


def finite_order_ratios(spec: DirichletSeriesSpec, sigma: float, ts: Sequence[float],
                        target_error: float = 1e-8) -> np.ndarray:
    """``log|L(sigma+it)| / log|t|`` along ``ts``.

    Finite samples cannot confirm a growth exponent; this is a report only.
    """
    ts = np.asarray(ts, dtype=float)
    v, _, _ = lfun_values(spec, sigma + 1j * ts, target_error)
    return np.log(np.abs(v)) / np.log(np.abs(ts))


def euler_coefficient_report(spec: DirichletSeriesSpec, P: float, kmax: int, theta: float) -> float:
    """max over p <= P, k <= kmax of |b(p^k)| / p^{k theta} with
    ``b(p^k) = sum_j alpha_j(p)^k / k``.  Reported, not a proof."""
    p = primes_upto(P)
    al = spec.alphas(p)
    worst = 0.0
    for k in range(1, kmax + 1):
        b = (al ** k).sum(axis=1) / k
        worst = max(worst, float(np.max(np.abs(b) / p.astype(float) ** (k * theta))))
    return worst


# --------------------------------------------------------------------------
# functional equation

def _gamma_margin(fd: FunctionalData, s: complex, margin: float):
    for lam, mu in fd.gamma_factors:
        for w in (lam * s + mu, lam * (1 - s.conjugate()) + mu):
            if w.real <= 0.5 and abs(w - round(w.real)) < margin:
                raise DomainError(f"point {s} is within {margin} of a Gamma pole")


def completed_lambda(spec: DirichletSeriesSpec, s, target_error: float = 1e-13):
    fd = spec.functional_data
    s = np.asarray(s, dtype=complex)
    v, _, _ = lfun_values(spec, s, target_error)
    lg = s * math.log(fd.Q)
    for lam, mu in fd.gamma_factors:
        lg = lg + loggamma(lam * s + mu)
    return v * np.exp(lg)


def functional_equation_residual(spec: DirichletSeriesSpec, s: complex, margin: float = POLE_MARGIN) -> float:
    """``|Lambda(s) - omega conj(Lambda(1 - conj s))|``."""
    fd = spec.functional_data
    if fd is None:
        raise CapabilityError(f"{spec.name} carries no functional-equation data")
    s = complex(s)
    if spec.pole_order_at_1 and (abs(s - 1) < margin or abs(s) < margin):
        raise PoleError("point too close to s = 1 or its reflection s = 0")
    _gamma_margin(fd, s, margin)
    pts = np.array([s, 1 - s.conjugate()])
    lam = completed_lambda(spec, pts)
    return float(abs(lam[0] - fd.omega * np.conj(lam[1])))
