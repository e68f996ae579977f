"""Seeded sampling of Wishart, matrix-beta and Dirichlet-chain random matrices.

All samplers are pure functions of an RngStream value: identical (seed,
stream_id) pairs reproduce identical draws.  Batches are stacked along the
leading axis with shape (n, p, p).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ChainDomainError, DomainError
from .spd import dirichlet_chain_inverse, sym_sqrt

DEFAULT_SEED = 0xE4DE17


@dataclass(frozen=True)
class RngStream:
    """A reproducible substream: (seed, stream_id) -> independent generator."""

    seed: int = DEFAULT_SEED
    stream_id: int = 0

    def generator(self):
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.default_rng(ss)

    def substreams(self, n):
        # stream ids are spread so nested use does not collide with plain ids
        return [RngStream(self.seed, self.stream_id * 100003 + i + 1) for i in range(n)]


@dataclass(frozen=True)
class BetaMatParams:
    """Shape parameters of the type-1 matrix-variate beta on O < X < I."""

    p: int
    a: float
    b: float

    def __post_init__(self):
        if not 1 <= self.p <= 3:
            raise DomainError(f"matrix dimension p={self.p} outside 1..3")
        bound = (self.p - 1) / 2.0
        if not (self.a > bound and self.b > bound):
            raise DomainError(
                f"beta shapes ({self.a}, {self.b}) must both exceed (p-1)/2 = {bound}"
            )


@dataclass(frozen=True)
class DirichletChainParams:
    """Inputs of the chain decomposition: per-variable zeta plus either a
    generalized beta list or the single trailing zeta of the plain family."""

    p: int
    k: int
    zeta: tuple
    beta: tuple | None = None
    zeta_tail: float | None = None

    def __post_init__(self):
        if len(self.zeta) != self.k:
            raise ChainDomainError(f"need {self.k} zeta values, got {len(self.zeta)}")
        if self.beta is not None and len(self.beta) != self.k:
            raise ChainDomainError(f"need {self.k} beta values, got {len(self.beta)}")
        if self.beta is not None and self.zeta_tail is not None:
            raise ChainDomainError("give either beta (generalized) or zeta_tail, not both")


def _resolve_rng(stream):
    if isinstance(stream, RngStream):
        return stream.generator()
    if isinstance(stream, np.random.Generator):
        return stream
    raise DomainError(f"expected RngStream or Generator, got {type(stream)!r}")


def sample_wishart(p, df, stream, size=1, antithetic=False):
    """Draws from the standard Wishart W_p(df, I), df > p-1 real.

    Lower-triangular construction: diagonal entries are square roots of
    chi-square draws with df - i + 1 degrees of freedom (i = 1..p),
    subdiagonal entries standard normal; returns T T'.
    """
    if not 1 <= p <= 3:
        raise DomainError(f"matrix dimension p={p} outside 1..3")
    if not df > p - 1:
        raise DomainError(f"Wishart needs df > p - 1, got df={df} at p={p}")
    rng = _resolve_rng(stream)
    if antithetic:
        if size % 2:
            raise DomainError("antithetic sampling needs an even batch size")
        half = size // 2
        t = np.zeros((half, p, p))
        for i in range(p):
            t[:, i, i] = np.sqrt(rng.chisquare(df - i, size=half))
        lower = np.tril_indices(p, k=-1)
        normals = rng.standard_normal((half, len(lower[0]))) if p > 1 else None
        out = np.empty((size, p, p))
        for sign, sl in ((1.0, slice(0, half)), (-1.0, slice(half, size))):
            tt = t.copy()
            if normals is not None:
                tt[:, lower[0], lower[1]] = sign * normals
            out[sl] = tt @ np.swapaxes(tt, -1, -2)
        return out
    t = np.zeros((size, p, p))
    for i in range(p):
        t[:, i, i] = np.sqrt(rng.chisquare(df - i, size=size))
    if p > 1:
        lower = np.tril_indices(p, k=-1)
        t[:, lower[0], lower[1]] = rng.standard_normal((size, len(lower[0])))
    return t @ np.swapaxes(t, -1, -2)


def sample_matrix_beta(params, stream, size=1, antithetic=False):
    """Type-1 matrix beta: X = (S1+S2)^(-1/2) S1 (S1+S2)^(-1/2) with
    S1 ~ W_p(2a, I) and S2 ~ W_p(2b, I) independent."""
    rng = _resolve_rng(stream)
    s1 = sample_wishart(params.p, 2.0 * params.a, rng, size, antithetic)
    s2 = sample_wishart(params.p, 2.0 * params.b, rng, size, antithetic)
    w, q = np.linalg.eigh(s1 + s2)
    inv_root = (q / np.sqrt(w)[..., None, :]) @ np.swapaxes(q, -1, -2)
    return inv_root @ s1 @ inv_root


def sample_dirichlet_chain(pairs, stream, size=1, antithetic=False):
    """Chain-distributed (X_1..X_k) from independent Y_j ~ matrix-beta(pairs[j]).

    pairs is the list of derived BetaMatParams, one per chain slot (the
    parameter arithmetic lives in matrix_ops.param_chain; this sampler is
    distribution rule agnostic).  Applies the congruence chain
    X_j = S_{j-1}^{1/2} Y_j S_{j-1}^{1/2}, S_j = S_{j-1} - X_j, S_0 = I.
    """
    if not pairs:
        raise ChainDomainError("chain needs at least one beta parameter pair")
    p = pairs[0].p
    if any(prm.p != p for prm in pairs):
        raise ChainDomainError("all chain slots must share the dimension p")
    rng = _resolve_rng(stream)
    eye = np.broadcast_to(np.eye(p), (size, p, p))
    s = eye.copy()
    xs = []
    for prm in pairs:
        y = sample_matrix_beta(prm, rng, size, antithetic)
        root = sym_sqrt(s, check=False)
        x = root @ y @ root
        xs.append(x)
        s = root @ (eye - y) @ root
    return xs


def inverse_dirichlet_chain(xs):
    """Recover the independent coordinates Y_j from chain coordinates X_j."""
    return dirichlet_chain_inverse(xs)


# closed-form determinant moments used as oracles for the samplers


def wishart_det_moment(p, df, h):
    """E|X|^h = 2^(p h) Gamma_p(df/2 + h) / Gamma_p(df/2) for X ~ W_p(df, I)."""
    from .matgamma import ln_gamma_p

    return float(
        np.exp(p * h * np.log(2.0) + ln_gamma_p(p, df / 2.0 + h) - ln_gamma_p(p, df / 2.0))
    )


def matrix_beta_det_moment(params, h):
    """E|X|^h for the type-1 matrix beta."""
    from .matgamma import ln_gamma_p

    p, a, b = params.p, params.a, params.b
    return float(
        np.exp(
            ln_gamma_p(p, a + h) + ln_gamma_p(p, a + b) - ln_gamma_p(p, a) - ln_gamma_p(p, a + b + h)
        )
    )
