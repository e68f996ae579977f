"""Kober-type fractional operators in one or several SPD matrix arguments.

Both operator kinds are evaluated by exact importance sampling: the change of
variables W = U^(1/2) V^(-1) U^(1/2) (second kind) or W = U^(-1/2) V U^(-1/2)
(first kind) maps each matrix integral onto the region O < W < I, where the
kernel becomes a type-1 matrix-beta density up to a gamma-ratio constant.
The estimator is therefore unbiased with the proposal normalization supplying
the constant, and errors come only from Monte Carlo noise.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ChainDomainError, DomainError, MomentDivergence, ProposalDomainError
from .matgamma import ln_gamma_p
from .randmat import (
    DEFAULT_SEED,
    BetaMatParams,
    RngStream,
    sample_matrix_beta,
    sample_wishart,
)
from .spd import require_spd, sym_sqrt

MAX_CHUNK = 200000


@dataclass(frozen=True)
class MatrixOpParams:
    """Operator parameters: kind ("first" or "second"), dimension p, number of
    matrix arguments k, and per-argument (zeta_j, alpha_j) pairs."""

    kind: str
    p: int
    k: int
    pairs: tuple

    def __post_init__(self):
        if self.kind not in ("first", "second"):
            raise DomainError(f"kind must be 'first' or 'second', got {self.kind!r}")
        if not 1 <= self.p <= 3:
            raise DomainError(f"matrix dimension p={self.p} outside 1..3")
        if not 1 <= self.k <= 3:
            raise DomainError(f"number of matrix arguments k={self.k} outside 1..3")
        if len(self.pairs) != self.k:
            raise DomainError(f"need {self.k} (zeta, alpha) pairs, got {len(self.pairs)}")
        bound = (self.p - 1) / 2.0
        for zeta, alpha in self.pairs:
            if not alpha > bound:
                raise DomainError(f"alpha={alpha} must exceed (p-1)/2 = {bound}")
            if self.kind == "first" and not zeta > bound:
                raise DomainError(f"first kind needs zeta > (p-1)/2, got {zeta}")
            if self.kind == "second" and not zeta > bound - (self.p + 1) / 2.0:
                raise ProposalDomainError(
                    f"second kind proposal needs zeta > {bound - (self.p + 1) / 2.0}, "
                    f"got {zeta}"
                )


@dataclass(frozen=True)
class MCConfig:
    n_samples: int = 100000
    seed: int = DEFAULT_SEED
    n_streams: int = 16
    antithetic: bool = False

    def __post_init__(self):
        if self.n_samples < 1000:
            raise DomainError(f"n_samples={self.n_samples} below the minimum of 1000")
        if self.n_streams < 2:
            raise DomainError("batch-means standard errors need at least 2 streams")


@dataclass(frozen=True)
class Estimate:
    value: float
    se: float
    n: int


@dataclass(frozen=True)
class ChainSpec:
    """Chain-parameter rule and its inputs.

    beta_2_9:   b_j = zeta_{j+1} + ... + zeta_k + (k - j)         (zeta: k values)
    gamma_3_5:  g_j = zeta_{j+1} + ... + zeta_{k+1}               (zeta: k+1 values)
    delta_2_12: d_j = zeta_{j+1} + ... + zeta_k + b_j + ... + b_k (zeta, beta: k values)
    """

    rule: str
    zeta: tuple
    beta: tuple | None = None


def param_chain(spec):
    """Second-shape parameters for the chain decomposition, one per slot."""
    zeta = [float(z) for z in spec.zeta]
    if spec.rule == "beta_2_9":
        k = len(zeta)
        return [sum(zeta[j + 1 :]) + (k - 1 - j) for j in range(k)]
    if spec.rule == "gamma_3_5":
        if len(zeta) < 2:
            raise ChainDomainError("gamma_3_5 needs zeta_1..zeta_{k+1}, at least two values")
        k = len(zeta) - 1
        return [sum(zeta[j + 1 :]) for j in range(k)]
    if spec.rule == "delta_2_12":
        if spec.beta is None or len(spec.beta) != len(zeta):
            raise ChainDomainError("delta_2_12 needs beta values matching zeta")
        beta = [float(b) for b in spec.beta]
        k = len(zeta)
        return [sum(zeta[j + 1 :]) + sum(beta[j:]) for j in range(k)]
    raise ChainDomainError(f"unknown chain rule {spec.rule!r}")


# ---------------------------------------------------------------------------
# test function families on tuples of SPD matrices


@dataclass(frozen=True)
class MatrixTestFunction:
    """A function of k SPD matrix arguments with declared structure.

    Families: det_power (prod |V_j|^lam_j), exp_neg_trace (e^(-sum tr V_j)),
    det_power_times_exp (prod |V_j|^(gamma_j-(p+1)/2) e^(-tr V_j)),
    wishart_density (identity-scale Wishart density, normalized), callback.
    """

    family: str
    p: int
    k: int = 1
    lam: tuple = ()
    gamma: tuple = ()
    df: float = 0.0
    fn: Callable | None = None

    def value(self, vs):
        """Batched evaluation: vs is a list of k arrays (n, p, p) -> (n,)."""
        if self.family == "callback":
            return np.asarray(self.fn(*vs), dtype=float)

        def logdet(v):
            if v.shape[-1] == 1:
                return np.log(v[..., 0, 0])
            return np.linalg.slogdet(v)[1]

        def tr(v):
            if v.shape[-1] == 1:
                return v[..., 0, 0]
            return np.trace(v, axis1=-2, axis2=-1)

        logs = 0.0
        for j, v in enumerate(vs):
            if self.family == "det_power":
                logs = logs + self.lam[j] * logdet(v)
            elif self.family == "exp_neg_trace":
                logs = logs - tr(v)
            elif self.family == "det_power_times_exp":
                logs = logs + (self.gamma[j] - (self.p + 1) / 2.0) * logdet(v)
                logs = logs - tr(v)
            elif self.family == "wishart_density":
                half = self.df / 2.0
                norm = self.p * half * math.log(2.0) + ln_gamma_p(self.p, half)
                logs = logs + (half - (self.p + 1) / 2.0) * logdet(v)
                logs = logs - 0.5 * tr(v) - norm
            else:
                raise DomainError(f"unknown family {self.family!r}")
        return np.exp(logs)

    def mellin(self, s):
        """Closed-form M-transform, the integral of prod |V_j|^(s_j-(p+1)/2) f
        over the SPD cone, or None if the family has no closed form."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if len(s) != self.k:
            raise DomainError(f"need {self.k} transform variables, got {len(s)}")
        half = (self.p + 1) / 2.0
        total = 0.0
        for j, sj in enumerate(s):
            if self.family == "exp_neg_trace":
                total += ln_gamma_p(self.p, sj)
            elif self.family == "det_power_times_exp":
                total += ln_gamma_p(self.p, self.gamma[j] + sj - half)
            elif self.family == "wishart_density":
                total += (
                    self.p * (sj - half) * math.log(2.0)
                    + ln_gamma_p(self.p, self.df / 2.0 + sj - half)
                    - ln_gamma_p(self.p, self.df / 2.0)
                )
            else:
                return None
        return math.exp(total)

    def normalizer(self):
        """Integral of f over the cone (None when it diverges)."""
        return self.mellin(((self.p + 1) / 2.0,) * self.k)

    def sampler(self):
        """Returns draw(stream_or_rng, size) -> list of (n, p, p) following the
        normalized density f / normalizer, or None for unnormalizable families."""
        if self.family == "exp_neg_trace":
            dfs = [float(self.p + 1)] * self.k
        elif self.family == "det_power_times_exp":
            dfs = [2.0 * g for g in self.gamma]
        elif self.family == "wishart_density":
            dfs = [self.df] * self.k

            def draw(stream, size):
                return [sample_wishart(self.p, d, stream, size) for d in dfs]

            return draw
        else:
            return None

        def draw(stream, size):
            return [0.5 * sample_wishart(self.p, d, stream, size) for d in dfs]

        return draw

    def as_scalar(self):
        """The p=1, k=1 scalar counterpart in scalar_ops terms."""
        from . import scalar_ops

        if self.p != 1 or self.k != 1:
            raise DomainError("scalar reduction needs p = 1 and k = 1")
        if self.family == "det_power":
            return scalar_ops.power(self.lam[0])
        if self.family == "exp_neg_trace":
            return scalar_ops.exp_decay(1.0)
        if self.family == "det_power_times_exp":
            return scalar_ops.power_times_exp(self.gamma[0] - 1.0, 1.0)
        if self.family == "wishart_density":
            half = self.df / 2.0
            return scalar_ops.power_times_exp(
                half - 1.0, 0.5, coeff=math.exp(-half * math.log(2.0) - math.lgamma(half))
            )
        raise DomainError(f"no scalar counterpart for family {self.family!r}")


def det_power(p, lam, k=None):
    lam = tuple(float(x) for x in np.atleast_1d(lam))
    k = k or len(lam)
    if len(lam) == 1 and k > 1:
        lam = lam * k
    return MatrixTestFunction("det_power", p=p, k=k, lam=lam)


def exp_neg_trace(p, k=1):
    return MatrixTestFunction("exp_neg_trace", p=p, k=k)


def det_power_times_exp(p, gamma, k=None):
    gamma = tuple(float(x) for x in np.atleast_1d(gamma))
    k = k or len(gamma)
    if len(gamma) == 1 and k > 1:
        gamma = gamma * k
    for g in gamma:
        if not g > (p - 1) / 2.0:
            raise DomainError(f"det_power_times_exp needs gamma > (p-1)/2, got {g}")
    return MatrixTestFunction("det_power_times_exp", p=p, k=k, gamma=gamma)


def wishart_density(p, df, k=1):
    if not df > p - 1:
        raise DomainError(f"wishart_density needs df > p - 1, got {df}")
    return MatrixTestFunction("wishart_density", p=p, k=k, df=float(df))


def matrix_callback(p, fn, k=1):
    return MatrixTestFunction("callback", p=p, k=k, fn=fn)


# ---------------------------------------------------------------------------
# Monte Carlo aggregation


def _aggregate(batch_means, scale, n_total, max_abs, sum_abs):
    batch_means = np.asarray(batch_means, dtype=float)
    value = float(batch_means.mean()) * scale
    spread = float(batch_means.std(ddof=1))
    se = spread / math.sqrt(len(batch_means)) * abs(scale)
    est = Estimate(value=value, se=se, n=n_total)
    if spread > 0.0:
        worst = float(np.abs(batch_means - batch_means.mean()).max())
        if worst > 5.0 * spread:
            raise MomentDivergence(
                f"stream batch means disagree by {worst / spread:.1f} spreads; "
                "the integrand may have no finite second moment",
                partial=est,
            )
    if n_total >= 1000 and sum_abs > 0.0 and max_abs > 0.2 * sum_abs:
        raise MomentDivergence(
            "a single draw dominates the Monte Carlo sum; moment likely divergent",
            partial=est,
        )
    return est


def _mc_expectation(vals_fn, mc, scale=1.0):
    """Mean of vals_fn draws across mc.n_streams substreams, scaled.

    vals_fn(rng, m) -> array of m values.  Standard error by batch means.
    """
    n_each = -(-mc.n_samples // mc.n_streams)
    if mc.antithetic and n_each % 2:
        n_each += 1
    batch_means = []
    max_abs = 0.0
    sum_abs = 0.0
    n_total = 0
    for i in range(mc.n_streams):
        rng = RngStream(mc.seed, i).generator()
        total = 0.0
        done = 0
        while done < n_each:
            m = min(MAX_CHUNK, n_each - done)
            if mc.antithetic and m % 2:
                m += 1
            vals = np.asarray(vals_fn(rng, m), dtype=float)
            if not np.all(np.isfinite(vals)):
                raise MomentDivergence(
                    "non-finite Monte Carlo values encountered", partial=None
                )
            total += float(vals.sum())
            max_abs = max(max_abs, float(np.abs(vals).max()))
            sum_abs += float(np.abs(vals).sum())
            done += m
        batch_means.append(total / done)
        n_total += done
    return _aggregate(batch_means, scale, n_total, max_abs, sum_abs)


# ---------------------------------------------------------------------------
# the operators


def _proposal_for_second(p, zeta, alpha):
    """Beta proposal and reweighting power for one second-kind slot."""
    bound = (p - 1) / 2.0
    if zeta > bound:
        return BetaMatParams(p, zeta, alpha), 0.0
    shift = (p + 1) / 2.0
    if zeta + shift <= bound:
        raise ProposalDomainError(
            f"zeta={zeta} is below the reweighted proposal domain at p={p}"
        )
    # reweight from beta(zeta+shift, alpha) with |W|^(-shift) weights
    return BetaMatParams(p, zeta + shift, alpha), shift


def kober_matrix_second(params, f, U, mc=None):
    """Second-kind operator value at (U_1..U_k), Monte Carlo estimate.

    Each slot reduces exactly to an expectation over W_j ~ matrix-beta:
    value = prod_j Gamma_p(z_j)/Gamma_p(z_j+a_j) * E[ f(U^(1/2) W^(-1) U^(1/2)) ].
    """
    mc = mc or MCConfig()
    if params.kind != "second":
        raise DomainError("params.kind must be 'second'")
    U = [require_spd(u, "operator argument") for u in U]
    if len(U) != params.k:
        raise DomainError(f"need {params.k} matrix arguments, got {len(U)}")
    roots = [sym_sqrt(u) for u in U]
    props = []
    ln_scale = 0.0
    for zeta, alpha in params.pairs:
        prm, shift = _proposal_for_second(params.p, zeta, alpha)
        props.append((prm, shift))
        ln_scale += ln_gamma_p(params.p, prm.a) - ln_gamma_p(params.p, prm.a + alpha)

    def vals_fn(rng, m):
        vs = []
        logw = 0.0
        for (prm, shift), root in zip(props, roots):
            w = sample_matrix_beta(prm, rng, m, mc.antithetic)
            vs.append(root @ np.linalg.inv(w) @ root)
            if shift:
                logw = logw - shift * np.linalg.slogdet(w)[1]
        out = f.value(vs)
        if isinstance(logw, np.ndarray):
            out = out * np.exp(logw)
        return out

    return _mc_expectation(vals_fn, mc, scale=math.exp(ln_scale))


def kober_matrix_first(params, f, U, mc=None):
    """First-kind operator value at (U_1..U_k), Monte Carlo estimate.

    value = prod_j Gamma_p(z_j+(p+1)/2)/Gamma_p(z_j+(p+1)/2+a_j)
            * E[ f(U^(1/2) W U^(1/2)) ], W_j ~ matrix-beta(z_j+(p+1)/2, a_j).
    """
    mc = mc or MCConfig()
    if params.kind != "first":
        raise DomainError("params.kind must be 'first'")
    U = [require_spd(u, "operator argument") for u in U]
    if len(U) != params.k:
        raise DomainError(f"need {params.k} matrix arguments, got {len(U)}")
    roots = [sym_sqrt(u) for u in U]
    shift = (params.p + 1) / 2.0
    props = [BetaMatParams(params.p, zeta + shift, alpha) for zeta, alpha in params.pairs]
    ln_scale = sum(
        ln_gamma_p(params.p, prm.a) - ln_gamma_p(params.p, prm.a + prm.b) for prm in props
    )

    def vals_fn(rng, m):
        vs = [
            root @ sample_matrix_beta(prm, rng, m, mc.antithetic) @ root
            for prm, root in zip(props, roots)
        ]
        return f.value(vs)

    return _mc_expectation(vals_fn, mc, scale=math.exp(ln_scale))


# ---------------------------------------------------------------------------
# density interpretation


def density_constant(params, chain=None):
    """The constant c with operator output = c * (a probability density).

    Second kind: prod_j Gamma_p(z_j+(p+1)/2)/Gamma_p(b_j+z_j+(p+1)/2);
    first kind: prod_j Gamma_p(z_j)/Gamma_p(z_j+a_j).  With a ChainSpec, the
    chain-derived second shapes replace alpha_j slot by slot.
    """
    second_shapes = [alpha for _, alpha in params.pairs]
    if chain is not None:
        second_shapes = param_chain(chain)
        if len(second_shapes) != params.k:
            raise ChainDomainError("chain rule output length does not match k")
    half = (params.p + 1) / 2.0
    total = 0.0
    for (zeta, _), b in zip(params.pairs, second_shapes):
        a = zeta + half if params.kind == "second" else zeta
        total += ln_gamma_p(params.p, a) - ln_gamma_p(params.p, a + b)
    return math.exp(total)


def density_mode_sample(params, f_sampler, stream, size, chain=None, antithetic=False):
    """Draws (U_1..U_k) from the density proportional to the operator output.

    f_sampler(stream, size) -> list of V_j draws from the normalized f.
    Second kind: U_j = V_j^(1/2) Y_j V_j^(1/2), Y_j ~ beta(z_j+(p+1)/2, b_j);
    first kind:  U_j = V_j^(1/2) Y_j^(-1) V_j^(1/2), Y_j ~ beta(z_j, a_j).
    """
    second_shapes = [alpha for _, alpha in params.pairs]
    if chain is not None:
        second_shapes = param_chain(chain)
    half = (params.p + 1) / 2.0
    rng = stream.generator() if isinstance(stream, RngStream) else stream
    vs = f_sampler(rng, size)
    if len(vs) != params.k:
        raise DomainError(f"f_sampler returned {len(vs)} blocks, need {params.k}")
    out = []
    for (zeta, _), b, v in zip(params.pairs, second_shapes, vs):
        if params.kind == "second":
            prm = BetaMatParams(params.p, zeta + half, b)
            y = sample_matrix_beta(prm, rng, size, antithetic)
        else:
            prm = BetaMatParams(params.p, zeta, b)
            y = np.linalg.inv(sample_matrix_beta(prm, rng, size, antithetic))
        root = sym_sqrt(v, check=False)
        out.append(root @ y @ root)
    return out
