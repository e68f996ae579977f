"""Scalar and multivariable fractional integral operators of Kober type.

All operators are evaluated by Gauss-Jacobi quadrature after a substitution
that maps the integration range onto (0, 1) and absorbs the kernel's endpoint
singularities into the quadrature weight:

  first kind   g(u) = (1/Gamma(a)) int_0^1 (1-t)^(a-1) t^z f(u t) dt
  second kind  g(u) = (1/Gamma(a)) int_0^1 (1-t)^(a-1) t^(z-1) f(u/t) dt

with a the fractional order and z the index parameter.  Known power behaviour
of the integrand family at the singular endpoint is absorbed into the weight
as well, so the remaining integrand is smooth.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import rgamma as _rgamma
from scipy.special import roots_laguerre

from .errors import (
    DomainError,
    HypergeometricNonConvergent,
    NonDifferentiable,
    TailDivergence,
)
from .quadrature import QuadConfig, converge_doubling, jacobi_rule_01, legendre_rule_01

MAX_VARS = 3


# ---------------------------------------------------------------------------
# test function families


@dataclass(frozen=True)
class TestFunction1D:
    """A function on (0, infinity) with declared endpoint behaviour.

    family is one of power, exp_decay, power_times_exp, exp_growth, callback.
    zero_order declares f(v) ~ C v^zero_order as v -> 0+; tail declares the
    behaviour at infinity as ("exp", rate), ("power", m) for ~ C v^(-m), or
    ("compact", lo, hi) for support contained in [lo, hi].
    """

    family: str
    lam: float = 0.0
    rate: float = 0.0
    coeff: float = 1.0
    fn: Callable | None = None
    zero_order: float = 0.0
    tail: tuple | None = None
    left_tail: tuple | None = None
    smooth_order: int | None = None

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        if self.family == "power":
            return self.coeff * v**self.lam
        if self.family == "exp_decay":
            return self.coeff * np.exp(-self.rate * v)
        if self.family == "power_times_exp":
            return self.coeff * v**self.lam * np.exp(-self.rate * v)
        if self.family == "exp_growth":
            return self.coeff * np.exp(self.rate * v)
        return self.fn(v)

    def split_power(self):
        """Return (order, residual) with f(v) = v^order residual(v) and the
        residual smooth and finite at zero."""
        if self.family == "power":
            return self.lam, lambda v: np.full(np.shape(v), self.coeff)
        if self.family == "power_times_exp":
            return self.lam, lambda v: self.coeff * np.exp(-self.rate * np.asarray(v))
        if self.family == "callback" and self.zero_order != 0.0:
            return self.zero_order, lambda v: self.fn(v) / np.asarray(v) ** self.zero_order
        return 0.0, self

    def mellin(self, s):
        """Known Mellin transform int_0^infty v^(s-1) f(v) dv, or None."""
        if self.family == "exp_decay" and s > 0:
            return self.coeff * _gamma(s) * self.rate ** (-s)
        if self.family == "power_times_exp" and s + self.lam > 0:
            return self.coeff * _gamma(s + self.lam) * self.rate ** (-(s + self.lam))
        return None


def power(lam, coeff=1.0):
    return TestFunction1D("power", lam=lam, coeff=coeff, zero_order=lam, tail=("power", -lam))


def exp_decay(rate=1.0, coeff=1.0):
    if rate <= 0:
        raise DomainError("exp_decay requires a positive rate")
    return TestFunction1D("exp_decay", rate=rate, coeff=coeff, tail=("exp", rate))


def power_times_exp(lam, rate=1.0, coeff=1.0):
    if rate <= 0:
        raise DomainError("power_times_exp requires a positive rate")
    return TestFunction1D(
        "power_times_exp", lam=lam, rate=rate, coeff=coeff, zero_order=lam, tail=("exp", rate)
    )


def exp_growth(rate=1.0, coeff=1.0):
    if rate <= 0:
        raise DomainError("exp_growth requires a positive rate")
    return TestFunction1D("exp_growth", rate=rate, coeff=coeff, left_tail=("exp", rate))


def callback(fn, zero_order=0.0, tail=None, left_tail=None, smooth_order=None):
    return TestFunction1D(
        "callback",
        fn=fn,
        zero_order=zero_order,
        tail=tail,
        left_tail=left_tail,
        smooth_order=smooth_order,
    )


def as_test_function(f):
    if isinstance(f, TestFunction1D):
        return f
    if callable(f):
        return callback(f)
    raise DomainError(f"expected a TestFunction1D or callable, got {type(f)!r}")


@dataclass(frozen=True)
class ScalarOpSpec:
    """Parameter bundle for the scalar operators.

    kind: kober1, kober2, riemann_liouville, weyl_left, weyl_right or saigo1.
    alpha is the fractional order, zeta the index parameter, a the lower
    terminal of riemann_liouville, (beta, gamma) the extra Saigo parameters.
    """

    kind: str
    alpha: float
    zeta: float = 0.0
    a: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0


# ---------------------------------------------------------------------------
# Gauss hypergeometric function on [0, 1)


def _series_2f1(a, b, c, z, max_terms=100000):
    z = np.asarray(z, dtype=float)
    term = np.ones_like(z)
    total = np.ones_like(z)
    quiet = 0
    for n in range(max_terms):
        term = term * ((a + n) * (b + n) / ((c + n) * (n + 1.0))) * z
        total = total + term
        if np.all(np.abs(term) <= 1e-16 * np.maximum(np.abs(total), 1e-300)):
            quiet += 1
            if quiet >= 2:
                return total
        else:
            quiet = 0
    raise HypergeometricNonConvergent(
        f"2F1 series did not converge within {max_terms} terms"
    )


def _is_nonpositive_int(x):
    return abs(x - round(x)) < 1e-12 and round(x) <= 0


def gauss_2f1(a, b, c, z):
    """Gauss hypergeometric 2F1(a, b; c; z), real parameters, 0 <= z < 1.

    Power series for z <= 1/2; for larger z the series is resummed through
    the linear transformation in terms of 1 - z.  Terminating cases (a or b
    a nonpositive integer) are summed exactly for any z.
    """
    scalar = np.isscalar(z) or np.asarray(z).ndim == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z < 0.0) or np.any(z >= 1.0):
        raise DomainError("gauss_2f1 is evaluated on 0 <= z < 1 only")
    if _is_nonpositive_int(c):
        raise DomainError(f"2F1 lower parameter c={c} is a nonpositive integer")

    if _is_nonpositive_int(a) or _is_nonpositive_int(b):
        out = _series_2f1(a, b, c, z)
        return float(out[0]) if scalar else out

    out = np.empty_like(z)
    s = c - a - b
    near = z > 0.5
    if np.any(~near):
        out[~near] = _series_2f1(a, b, c, z[~near])
    if np.any(near):
        zn = z[near]
        if s <= 0.0 and np.any(zn > 1.0 - 1e-8):
            raise HypergeometricNonConvergent(
                f"2F1 diverges as z -> 1 when c - a - b = {s:.6g} <= 0"
            )
        if abs(s - round(s)) < 1e-10:
            # integer exponent difference: fall back to the budgeted series
            out[near] = _series_2f1(a, b, c, zn, max_terms=2000000)
        else:
            w = 1.0 - zn
            c1 = _gamma(c) * _gamma(s) * _rgamma(c - a) * _rgamma(c - b)
            c2 = _gamma(c) * _gamma(-s) * _rgamma(a) * _rgamma(b)
            out[near] = c1 * _series_2f1(a, b, a + b - c + 1.0, w) + c2 * w**s * _series_2f1(
                c - a, c - b, s + 1.0, w
            )
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# one dimensional operators


def _check_order(alpha):
    if not alpha > 0:
        raise DomainError(f"fractional order must be positive, got {alpha}")


def _check_point(u, name="u"):
    u = float(u)
    if not u > 0:
        raise DomainError(f"evaluation point {name} must be positive, got {u}")
    return u


def _ratio_weight_exponent(zeta, order):
    b = zeta + order
    if b <= -1.0:
        raise TailDivergence(
            f"v^zeta f(v) with zeta={zeta} and f ~ v^{order} is not integrable at 0"
        )
    return b


def kober_first(f, u, *, zeta, alpha, q=None, full_output=False):
    """Kober fractional integral of the first kind,

    g(u) = u^(-zeta-alpha)/Gamma(alpha) * int_0^u (u-v)^(alpha-1) v^zeta f(v) dv.
    """
    f = as_test_function(f)
    q = q or QuadConfig()
    _check_order(alpha)
    u = _check_point(u)
    if f.tail is not None and f.tail[0] == "compact":
        val, info = _compact_first(f, u, zeta, alpha, q)
    else:
        order, res = f.split_power()
        b = _ratio_weight_exponent(zeta, order)
        scale = u**order / _gamma(alpha)

        def estimate(n):
            t, w = jacobi_rule_01(n, alpha - 1.0, b)
            return scale * float(w @ np.asarray(res(u * t), dtype=float))

        val, info = converge_doubling(estimate, q)
    return (val, info) if full_output else val


def _compact_first(f, u, zeta, alpha, q):
    _, lo, hi = f.tail
    if u <= lo:
        return 0.0, None
    pref = u ** (-zeta - alpha) / _gamma(alpha)
    if u <= hi:
        # the kernel singularity at v = u sits inside the support
        width = u - lo

        def estimate(n):
            t, w = jacobi_rule_01(n, 0.0, alpha - 1.0)
            v = u - width * t
            vals = np.asarray(f(v), dtype=float) * v**zeta
            return pref * width**alpha * float(w @ vals)

    else:

        def estimate(n):
            t, w = legendre_rule_01(n)
            v = lo + (hi - lo) * t
            vals = np.asarray(f(v), dtype=float) * (u - v) ** (alpha - 1.0) * v**zeta
            return pref * (hi - lo) * float(w @ vals)

    return converge_doubling(estimate, q)


def kober_second(f, u, *, zeta, alpha, q=None, full_output=False):
    """Kober fractional integral of the second kind,

    g(u) = u^zeta/Gamma(alpha) * int_u^inf v^(-zeta-alpha) (v-u)^(alpha-1) f(v) dv,
    computed through v = u/t on (0, 1).
    """
    f = as_test_function(f)
    q = q or QuadConfig()
    _check_order(alpha)
    u = _check_point(u)
    if f.tail is None:
        raise TailDivergence("kober_second needs a declared tail to integrate to infinity")
    kind = f.tail[0]
    if kind == "compact":
        val, info = _compact_second(f, u, zeta, alpha, q)
    elif kind == "power":
        m = f.tail[1]
        if zeta + m <= 0:
            raise TailDivergence(
                f"second kind integral diverges: zeta + m = {zeta + m} <= 0 "
                f"for declared tail v^({-m})"
            )
        b = zeta - 1.0 + m

        def estimate(n):
            t, w = jacobi_rule_01(n, alpha - 1.0, b)
            v = u / t
            vals = np.asarray(f(v), dtype=float) * (v / u) ** m
            return float(w @ vals) / _gamma(alpha)

        val, info = converge_doubling(estimate, q)
    elif kind == "exp":
        # keep any integrable power of t in the weight; the decay of f(u/t)
        # makes the residual integrand vanish to all orders at t = 0
        b = max(zeta - 1.0, 0.0)
        shift = zeta - 1.0 - b

        def estimate(n):
            t, w = jacobi_rule_01(n, alpha - 1.0, b)
            vals = np.asarray(f(u / t), dtype=float) * t**shift
            return float(w @ vals) / _gamma(alpha)

        val, info = converge_doubling(estimate, q)
    else:
        raise TailDivergence(f"unsupported tail declaration {f.tail!r}")
    return (val, info) if full_output else val


def _compact_second(f, u, zeta, alpha, q):
    _, lo, hi = f.tail
    if u >= hi:
        return 0.0, None
    pref = u**zeta / _gamma(alpha)
    if u >= lo:
        width = hi - u

        def estimate(n):
            t, w = jacobi_rule_01(n, 0.0, alpha - 1.0)
            v = u + width * t
            vals = np.asarray(f(v), dtype=float) * v ** (-zeta - alpha)
            return pref * width**alpha * float(w @ vals)

    else:

        def estimate(n):
            t, w = legendre_rule_01(n)
            v = lo + (hi - lo) * t
            vals = (
                np.asarray(f(v), dtype=float)
                * v ** (-zeta - alpha)
                * (v - u) ** (alpha - 1.0)
            )
            return pref * (hi - lo) * float(w @ vals)

    return converge_doubling(estimate, q)


def riemann_liouville(f, x, *, alpha, a=0.0, q=None, full_output=False):
    """Left-sided Riemann-Liouville integral of order alpha from terminal a,

    (1/Gamma(alpha)) int_a^x (x-v)^(alpha-1) f(v) dv.
    """
    f = as_test_function(f)
    q = q or QuadConfig()
    _check_order(alpha)
    x = float(x)
    if x < a:
        raise DomainError(f"riemann_liouville needs x >= a, got x={x}, a={a}")
    if x == a:
        return (0.0, None) if full_output else 0.0
    span = x - a
    if a == 0.0:
        order, res = f.split_power()
        if order <= -1.0:
            raise TailDivergence(f"f ~ v^{order} is not integrable at the terminal 0")
    else:
        order, res = 0.0, f
    scale = span ** (alpha + order) / _gamma(alpha)

    def estimate(n):
        t, w = jacobi_rule_01(n, alpha - 1.0, order)
        return scale * float(w @ np.asarray(res(a + span * t), dtype=float))

    val, info = converge_doubling(estimate, q)
    return (val, info) if full_output else val


def _weyl_tail_exp(f, x, alpha, w0, rate, n):
    """int_{w0}^inf w^(alpha-1) f(x+w) dw for exponentially decaying families,
    with the decay paired against the Gauss-Laguerre weight analytically."""
    n = min(n, 128)
    y, wl = roots_laguerre(n)
    w = w0 + y / rate
    if f.family == "exp_decay":
        res = f.coeff * np.ones_like(w)
    elif f.family == "power_times_exp":
        res = f.coeff * (x + w) ** f.lam
    else:
        raise TailDivergence("analytic exponential tail needs a declared family")
    vals = w ** (alpha - 1.0) * res
    return math.exp(-rate * (x + w0)) / rate * float(wl @ vals)


def _weyl_tail_exp_segments(f, x, alpha, w0, rate, n):
    """Geometric Gauss-Legendre segments for callbacks with exponential decay."""
    total = 0.0
    lo = w0
    t, w = legendre_rule_01(min(n, 64))
    for _ in range(40):
        hi = 2.0 * lo
        v = lo + (hi - lo) * t
        seg = (hi - lo) * float(w @ (v ** (alpha - 1.0) * np.asarray(f(x + v), dtype=float)))
        total += seg
        if abs(seg) <= 1e-16 * max(abs(total), 1e-300) or rate * lo > 745.0:
            return total
        lo = hi
    return total


def weyl_right(f, x, *, alpha, q=None, full_output=False):
    """Right-sided Weyl fractional integral,
    (1/Gamma(alpha)) int_x^inf (v-x)^(alpha-1) f(v) dv."""
    f = as_test_function(f)
    q = q or QuadConfig()
    _check_order(alpha)
    x = float(x)
    if x < 0:
        raise DomainError(f"weyl_right is evaluated at x >= 0, got {x}")
    tail = f.tail
    if tail is None:
        raise TailDivergence("weyl_right needs a declared tail to integrate to infinity")

    kind = tail[0]
    if kind == "compact":
        _, lo, hi = tail
        if x >= hi:
            return (0.0, None) if full_output else 0.0
        val, info = _compact_weyl(f, x, alpha, q)
        return (val, info) if full_output else val

    if kind == "power":
        m = tail[1]
        if m <= alpha:
            raise TailDivergence(
                f"weyl_right diverges: declared tail v^({-m}) is too slow for order {alpha}"
            )
    elif kind != "exp":
        raise TailDivergence(f"unsupported tail declaration {tail!r}")

    # head behaviour: for x = 0 the integrand may carry f's power at zero
    head_order = 0.0
    head_res = f
    if x == 0.0:
        head_order, head_res = f.split_power()
        if alpha + head_order <= 0.0:
            raise TailDivergence(
                f"integrand w^(alpha-1) f(w) with f ~ w^{head_order} diverges at 0"
            )

    rate = tail[1] if kind == "exp" else None
    w0 = q.tail_cutoff if q.tail_cutoff is not None else max(1.0, x)

    def estimate(n):
        t, w = jacobi_rule_01(n, 0.0, alpha - 1.0 + head_order)
        head = w0 ** (alpha + head_order) * float(
            w @ np.asarray(head_res(x + w0 * t), dtype=float)
        )
        if kind == "exp":
            if f.family in ("exp_decay", "power_times_exp"):
                tail_val = _weyl_tail_exp(f, x, alpha, w0, rate, n)
            else:
                tail_val = _weyl_tail_exp_segments(f, x, alpha, w0, rate, n)
        else:
            m = tail[1]
            t2, w2 = jacobi_rule_01(n, 0.0, m - alpha - 1.0)
            v = x + w0 / t2
            tail_val = w0**alpha * float(
                w2 @ (np.asarray(f(v), dtype=float) * t2 ** (-m))
            )
        return (head + tail_val) / _gamma(alpha)

    val, info = converge_doubling(estimate, q)
    return (val, info) if full_output else val


def _compact_weyl(f, x, alpha, q):
    _, lo, hi = f.tail
    if x >= lo:
        width = hi - x

        def estimate(n):
            t, w = jacobi_rule_01(n, 0.0, alpha - 1.0)
            v = x + width * t
            return width**alpha * float(w @ np.asarray(f(v), dtype=float)) / _gamma(alpha)

    else:

        def estimate(n):
            t, w = legendre_rule_01(n)
            v = lo + (hi - lo) * t
            vals = np.asarray(f(v), dtype=float) * (v - x) ** (alpha - 1.0)
            return (hi - lo) * float(w @ vals) / _gamma(alpha)

    return converge_doubling(estimate, q)


def weyl_left(f, x, *, alpha, q=None, full_output=False):
    """Left-sided Weyl integral, (1/Gamma(alpha)) int_{-inf}^x (x-v)^(alpha-1) f(v) dv.

    Requires decay of f towards minus infinity, declared through left_tail.
    """
    f = as_test_function(f)
    _check_order(alpha)
    x = float(x)
    if f.family == "exp_growth":
        # f(x - w) = coeff e^(rate x) e^(-rate w): an exponential decay profile in w
        mirrored = exp_decay(rate=f.rate, coeff=f.coeff * math.exp(2.0 * f.rate * x))
        return weyl_right(mirrored, x, alpha=alpha, q=q, full_output=full_output)
    if f.left_tail is None:
        raise TailDivergence("weyl_left needs a declared left tail")
    mirrored = callback(lambda v: f(2.0 * x - v), tail=f.left_tail)
    return weyl_right(mirrored, x, alpha=alpha, q=q, full_output=full_output)


def saigo_first(f, u, *, zeta, alpha, beta, gamma, q=None, full_output=False):
    """Saigo-type operator of the first kind: the first-kind ratio convolution
    with weight t^(zeta-1) 2F1(alpha+beta, -gamma; alpha; 1-t) inside the kernel.

    Reduces to kober_first when the hypergeometric factor is constant
    (beta = -alpha or gamma = 0).
    """
    f = as_test_function(f)
    q = q or QuadConfig()
    _check_order(alpha)
    u = _check_point(u)
    s = gamma - beta  # controls the 2F1 factor as its argument approaches 1
    if s <= 0.0 and not (
        _is_nonpositive_int(alpha + beta) or _is_nonpositive_int(-gamma)
    ):
        raise HypergeometricNonConvergent(
            f"Saigo kernel diverges near the lower endpoint: gamma - beta = {s:.6g} <= 0"
        )
    order, res = f.split_power()
    b = _ratio_weight_exponent(zeta, order)
    scale = u**order / _gamma(alpha)

    def estimate(n):
        t, w = jacobi_rule_01(n, alpha - 1.0, b)
        hyp = gauss_2f1(alpha + beta, -gamma, alpha, 1.0 - t)
        return scale * float(w @ (hyp * np.asarray(res(u * t), dtype=float)))

    val, info = converge_doubling(estimate, q)
    return (val, info) if full_output else val


# ---------------------------------------------------------------------------
# fractional derivatives


def _central_derivative(g, x, m, h):
    """m-th derivative by central differences with one Richardson step."""

    def plain(step):
        vals = 0.0
        for j in range(m + 1):
            vals += (-1.0) ** j * math.comb(m, j) * g(x + (m / 2.0 - j) * step)
        return vals / step**m

    d1 = plain(h)
    d2 = plain(h / 2.0)
    return (4.0 * d2 - d1) / 3.0


def frac_derivative(f, x, *, alpha, q=None):
    """Fractional derivative of order alpha > 0 at x > 0: the m-th ordinary
    derivative of the (m - alpha)-order Riemann-Liouville integral, with
    m = floor(alpha) + 1."""
    f = as_test_function(f)
    q = q or QuadConfig()
    _check_order(alpha)
    x = _check_point(x, "x")
    m = int(math.floor(alpha)) + 1

    if f.family == "power":
        if f.lam <= -1.0:
            raise DomainError("power exponent must exceed -1 for the derivative")
        return f.coeff * _gamma(f.lam + 1.0) * _rgamma(f.lam + 1.0 - alpha) * x ** (f.lam - alpha)

    if f.family == "exp_decay":
        # split off the initial values so the remaining integral is smooth:
        # the m-th derivative of the (m-alpha)-order integral of f equals
        # I^(m-alpha) f^(m) + sum_i f^(i)(0) x^(i-alpha) / Gamma(i+1-alpha)
        deriv_m = exp_decay(rate=f.rate, coeff=f.coeff * (-f.rate) ** m)
        out = riemann_liouville(deriv_m, x, alpha=m - alpha, q=q)
        for i in range(m):
            out += f.coeff * (-f.rate) ** i * x ** (i - alpha) * _rgamma(i + 1.0 - alpha)
        return out

    if f.family == "callback" and (f.smooth_order is None or f.smooth_order < m):
        raise NonDifferentiable(
            f"callback must declare smooth_order >= {m} for a derivative of order {alpha}"
        )

    h = (1.0 + abs(x)) * q.rel_tol ** (1.0 / (m + 4))
    h = min(h, x / (m + 2.0))

    def g(t):
        return riemann_liouville(f, t, alpha=m - alpha, q=q)

    return _central_derivative(g, x, m, h)


# ---------------------------------------------------------------------------
# multivariable operators with product kernels


def _check_multivar(u, zeta, alpha):
    u = [float(x) for x in np.atleast_1d(u)]
    zeta = [float(z) for z in np.atleast_1d(zeta)]
    alpha = [float(a) for a in np.atleast_1d(alpha)]
    k = len(u)
    if not 1 <= k <= MAX_VARS:
        raise DomainError(f"number of variables must be 1..{MAX_VARS}, got {k}")
    if len(zeta) != k or len(alpha) != k:
        raise DomainError("zeta and alpha must match the number of evaluation points")
    for a in alpha:
        _check_order(a)
    for x in u:
        _check_point(x)
    return u, zeta, alpha, k


def multivar_op(kind, f, u, *, zeta, alpha, q=None, full_output=False):
    """Multivariable Kober-type operator with a product kernel.

    kind is "first" or "second".  f is either a sequence of TestFunction1D
    (separable integrand) or a joint callable of k broadcastable arrays.
    """
    q = q or QuadConfig()
    u, zeta, alpha, k = _check_multivar(u, zeta, alpha)
    if kind not in ("first", "second"):
        raise DomainError(f"kind must be 'first' or 'second', got {kind!r}")

    if isinstance(f, (list, tuple)):
        fs = [as_test_function(g) for g in f]
        if len(fs) != k:
            raise DomainError("separable integrand must supply one factor per variable")
        # the tensor-product quadrature of a separable integrand factors
        # exactly into the per-variable quadratures
        op = kober_first if kind == "first" else kober_second
        parts = [
            op(fs[j], u[j], zeta=zeta[j], alpha=alpha[j], q=q, full_output=True)
            for j in range(k)
        ]
        val = float(np.prod([p[0] for p in parts]))
        info = [p[1] for p in parts]
        return (val, info) if full_output else val

    if not callable(f):
        raise DomainError("joint integrand must be callable")

    def estimate(n):
        axes = []
        for j in range(k):
            if kind == "first":
                b = zeta[j]
                if b <= -1.0:
                    raise TailDivergence(f"zeta[{j}] must exceed -1 for a joint integrand")
                t, w = jacobi_rule_01(n, alpha[j] - 1.0, b)
                v = u[j] * t
            else:
                b = zeta[j] - 1.0
                if b <= -1.0:
                    raise TailDivergence(
                        f"zeta[{j}] must be positive for a joint second-kind integrand"
                    )
                t, w = jacobi_rule_01(n, alpha[j] - 1.0, b)
                v = u[j] / t
            axes.append((v, w / _gamma(alpha[j])))
        grids = np.meshgrid(*[v for v, _ in axes], indexing="ij", sparse=True)
        vals = np.asarray(f(*grids), dtype=float)
        if vals.shape != (len(axes[0][0]),) * k:
            vals = np.broadcast_to(vals, (len(axes[0][0]),) * k)
        for j in range(k - 1, -1, -1):
            vals = np.tensordot(vals, axes[j][1], axes=([j], [0]))
        return float(vals)

    val, info = converge_doubling(estimate, q)
    return (val, info) if full_output else val


def multivar_frac_derivative(f, x, *, alpha, q=None):
    """Mixed fractional derivative with per-variable orders (k <= 2):
    the mixed partial of order (m_1, ..., m_k) of the multivariable
    Riemann-Liouville integral of orders (m_j - alpha_j)."""
    q = q or QuadConfig()
    alpha = [float(a) for a in np.atleast_1d(alpha)]
    x = [float(v) for v in np.atleast_1d(x)]
    k = len(alpha)
    if len(x) != k:
        raise DomainError("x and alpha must have the same length")
    if k == 1:
        return frac_derivative(f, x[0], alpha=alpha[0], q=q)
    if k != 2:
        raise DomainError("mixed fractional derivatives support at most two variables")

    if isinstance(f, (list, tuple)):
        fs = [as_test_function(g) for g in f]
        out = 1.0
        for j in range(k):
            out *= frac_derivative(fs[j], x[j], alpha=alpha[j], q=q)
        return out

    m = [int(math.floor(a)) + 1 for a in alpha]
    beta = [m[j] - alpha[j] for j in range(k)]

    # the first-kind product operator with zeta = 0 equals the plain
    # Riemann-Liouville product integral divided by x_j^beta_j
    def rl2(t1, t2):
        val = multivar_op("first", f, (t1, t2), zeta=(0.0, 0.0), alpha=beta, q=q)
        return val * t1 ** beta[0] * t2 ** beta[1]

    h = [
        min((1.0 + abs(x[j])) * q.rel_tol ** (1.0 / (m[j] + 4)), x[j] / (m[j] + 2.0))
        for j in range(k)
    ]

    def mixed(step1, step2):
        total = 0.0
        for j1 in range(m[0] + 1):
            c1 = (-1.0) ** j1 * math.comb(m[0], j1)
            t1 = x[0] + (m[0] / 2.0 - j1) * step1
            for j2 in range(m[1] + 1):
                c2 = (-1.0) ** j2 * math.comb(m[1], j2)
                t2 = x[1] + (m[1] / 2.0 - j2) * step2
                total += c1 * c2 * rl2(t1, t2)
        return total / (step1 ** m[0] * step2 ** m[1])

    e11 = mixed(h[0], h[1])
    e21 = mixed(h[0] / 2.0, h[1])
    e12 = mixed(h[0], h[1] / 2.0)
    e22 = mixed(h[0] / 2.0, h[1] / 2.0)
    first = (4.0 * e21 - e11) / 3.0
    second = (4.0 * e22 - e12) / 3.0
    return (4.0 * second - first) / 3.0
