"""Exact-distribution oracle for lattice laws: n-fold convolutions, Poisson
mixtures, and Kolmogorov distances to the normal and related limit laws.

Everything here is exact enumeration (no sampling): a lattice support makes
the n-fold convolution finite, and against a continuous limit CDF the
distance sup is always attained at an atom, scanned from both sides.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from becert.quadrature import integrate, normal_cdf_arr

__all__ = [
    "LatticeDistribution", "MomentProfile",
    "rademacher", "two_point", "from_json",
    "moments", "standardize", "convolve_power",
    "kolmogorov_to_normal", "compound_poisson", "verify_inequality",
    "limit_cdf",
]

SUPPORT_CAP = 10 ** 6


@dataclass(frozen=True)
class MomentProfile:
    mu: float
    sigma2: float
    beta3: float  # raw absolute third moment E|X|^3

    def __post_init__(self):
        if self.sigma2 <= 0.0:
            raise ValueError("variance must be positive")
        # Lyapunov: E|X|^3 >= (E X^2)^(3/2)
        if self.beta3 < (self.mu ** 2 + self.sigma2) ** 1.5 * (1.0 - 1e-9):
            raise ValueError("beta3 below the Lyapunov floor (mu^2+sigma2)^(3/2)")


class LatticeDistribution:
    """Finite discrete distribution: strictly increasing locations with
    nonnegative masses. ``total`` below 1 marks a deliberate sub-probability
    (truncated mixture); plain constructions must sum to 1 within 1e-12."""

    def __init__(self, xs, ps, *, total: float = 1.0):
        xs = np.asarray(xs, dtype=np.float64)
        ps = np.asarray(ps, dtype=np.float64)
        if xs.ndim != 1 or xs.shape != ps.shape or xs.size == 0:
            raise ValueError("need matching non-empty 1-D locations and masses")
        if not np.all(np.diff(xs) > 0.0):
            raise ValueError("locations must be strictly increasing")
        if np.any(ps < -1e-15):
            raise ValueError("masses must be nonnegative")
        s = float(np.sum(ps))
        if abs(s - total) > 1e-12:
            raise ValueError(f"masses sum to {s!r}, expected {total!r}")
        self.xs = xs
        self.ps = np.maximum(ps, 0.0)
        self.total = total

    def __len__(self):
        return self.xs.size

    def atoms(self):
        return list(zip(self.xs.tolist(), self.ps.tolist()))

    def __repr__(self):
        return f"LatticeDistribution({len(self)} atoms, total={self.total:g})"


def rademacher() -> LatticeDistribution:
    return LatticeDistribution([-1.0, 1.0], [0.5, 0.5])


def two_point(p: float) -> LatticeDistribution:
    """Standardized Bernoulli(p): (B - p)/sqrt(p q)."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    q = 1.0 - p
    s = math.sqrt(p * q)
    return LatticeDistribution([-p / s, q / s], [q, p])


def from_json(text: str) -> LatticeDistribution:
    data = json.loads(text)
    atoms = sorted((float(a["x"]), float(a["p"])) for a in data["atoms"])
    return LatticeDistribution([a[0] for a in atoms], [a[1] for a in atoms])


def dist_from_spec(spec: str) -> LatticeDistribution:
    """Named shortcuts: "rademacher", "two_point:0.9", else a JSON file path."""
    if spec == "rademacher":
        return rademacher()
    if spec.startswith("two_point:"):
        return two_point(float(spec.split(":", 1)[1]))
    with open(spec, "r", encoding="utf-8") as fh:
        return from_json(fh.read())


# ---------------------------------------------------------------------------
# moments and standardization
# ---------------------------------------------------------------------------

def moments(dist: LatticeDistribution) -> MomentProfile:
    mu = float(np.dot(dist.ps, dist.xs))
    sigma2 = float(np.dot(dist.ps, (dist.xs - mu) ** 2))
    if sigma2 <= 0.0:
        raise ValueError("zero variance")
    beta3 = float(np.dot(dist.ps, np.abs(dist.xs) ** 3))
    return MomentProfile(mu, sigma2, beta3)


def standardize(dist: LatticeDistribution) -> LatticeDistribution:
    mu = float(np.dot(dist.ps, dist.xs))
    sigma2 = float(np.dot(dist.ps, (dist.xs - mu) ** 2))
    if sigma2 <= 0.0:
        raise ValueError("zero variance")
    return LatticeDistribution((dist.xs - mu) / math.sqrt(sigma2), dist.ps)


def is_standardized(dist: LatticeDistribution, tol: float = 1e-9) -> bool:
    mu = float(np.dot(dist.ps, dist.xs))
    sigma2 = float(np.dot(dist.ps, (dist.xs - mu) ** 2))
    return abs(mu) <= tol and abs(sigma2 - 1.0) <= tol


# ---------------------------------------------------------------------------
# lattice detection and convolution
# ---------------------------------------------------------------------------

def _lattice_step(xs) -> float:
    """Common step of the locations (offset + integer * step), via a float
    gcd sweep over the pairwise offsets."""
    offs = np.diff(xs)
    scale = max(1.0, float(np.max(np.abs(xs))))
    tol = 1e-9 * scale
    step = float(np.min(offs))
    for _ in range(64):
        if step < 1e-8 * scale:
            # irrational ratios drive the gcd sweep toward zero
            raise ValueError("locations do not share a rational lattice")
        residues = offs - np.round(offs / step) * step
        bad = np.abs(residues) > tol
        if not np.any(bad):
            break
        step = float(np.min(np.abs(residues[bad])))
    else:
        raise ValueError("locations do not share a rational lattice")
    idx = np.round(offs / step)
    if np.any(np.abs(offs - idx * step) > tol):
        raise ValueError("locations do not share a rational lattice")
    return step


def _index_masses(dist: LatticeDistribution):
    step = _lattice_step(dist.xs) if len(dist) > 1 else 1.0
    idx = np.round((dist.xs - dist.xs[0]) / step).astype(np.int64)
    m = np.zeros(int(idx[-1]) + 1)
    m[idx] = dist.ps
    return float(dist.xs[0]), step, m


def convolve_power(dist: LatticeDistribution, n: int) -> LatticeDistribution:
    """Exact law of (X_1 + ... + X_n)/sqrt(n) for i.i.d. lattice X."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x0, step, m = _index_masses(dist)
    if n * (m.size - 1) + 1 > SUPPORT_CAP:
        raise ValueError("convolution support would exceed the configured cap")
    acc = m
    for _ in range(n - 1):
        acc = np.convolve(acc, m)
    rt = math.sqrt(n)
    xs = (n * x0 + step * np.arange(acc.size)) / rt
    keep = acc > 0.0
    total = float(np.sum(acc[keep]))
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"mass drifted to {total!r} during convolution")
    return LatticeDistribution(xs[keep], acc[keep], total=total)


# ---------------------------------------------------------------------------
# Kolmogorov distance
# ---------------------------------------------------------------------------

def kolmogorov_distance(dist: LatticeDistribution, cdf) -> float:
    """sup_x |F(x) - G(x)| for the pure-jump F(x) = P(X < x) against a
    continuous CDF G: scanned at both one-sided limits of every atom."""
    cum = np.concatenate(([0.0], np.cumsum(dist.ps)))
    g = np.asarray(cdf(dist.xs), dtype=np.float64)
    return float(np.max(np.maximum(np.abs(cum[:-1] - g), np.abs(cum[1:] - g))))


def kolmogorov_to_normal(dist: LatticeDistribution) -> float:
    return kolmogorov_distance(dist, normal_cdf_arr)


# ---------------------------------------------------------------------------
# Poisson mixtures
# ---------------------------------------------------------------------------

def _poisson_pmf(k: int, lam: float) -> float:
    return math.exp(-lam + k * math.log(lam) - math.lgamma(k + 1))


def poisson_truncation_point(lam: float, tail_tol: float) -> int:
    """Smallest M > lam with the Chernoff tail bound exp(-lam)(e lam / M)^M
    below tail_tol."""
    M = int(math.ceil(lam)) + 1
    while -lam + M * (1.0 + math.log(lam) - math.log(M)) > math.log(tail_tol):
        M += 1
    return M


def compound_poisson(dist: LatticeDistribution, lam: float,
                     tail_tol: float = 1e-10):
    """Law of (S - lam*mu)/sqrt(lam*(mu^2+sigma^2)) where S sums a
    Poisson(lam) number of i.i.d. copies (S=0 on zero count), truncated at
    count M with P(count > M) <= tail_tol. Returns (sub-probability lattice
    law, truncation mass); distances computed from it carry +-truncation
    mass error bars."""
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    prof = moments(dist)
    M = poisson_truncation_point(lam, tail_tol)
    x0, step, m = _index_masses(dist)
    if M * (m.size - 1) + 1 > SUPPORT_CAP:
        raise ValueError("mixture support would exceed the configured cap")

    locs_all = []
    mass_all = []
    conv = np.array([1.0])
    kept = 0.0
    for cnt in range(0, M + 1):
        w = _poisson_pmf(cnt, lam)
        kept += w
        locs_all.append(cnt * x0 + step * np.arange(conv.size))
        mass_all.append(w * conv)
        if cnt < M:
            conv = np.convolve(conv, m)
    truncation_mass = max(0.0, 1.0 - kept)

    locs = np.concatenate(locs_all)
    mass = np.concatenate(mass_all)
    order = np.argsort(locs, kind="stable")
    locs = locs[order]
    mass = mass[order]
    # merge duplicated lattice points (tolerance at float-roundoff scale)
    scale = max(1.0, float(np.max(np.abs(locs))))
    new_group = np.concatenate(([True], np.diff(locs) > 1e-12 * scale))
    group = np.cumsum(new_group) - 1
    xs = locs[new_group]
    ps = np.bincount(group, weights=mass)

    denom = math.sqrt(lam * (prof.mu ** 2 + prof.sigma2))
    xs_std = (xs - lam * prof.mu) / denom
    out = LatticeDistribution(xs_std, ps, total=float(np.sum(ps)))
    return out, truncation_mass


# ---------------------------------------------------------------------------
# inequality verification
# ---------------------------------------------------------------------------

def bound_value(bound, beta3: float, n: int) -> float:
    if bound == "theorem1":
        return 0.335789 * (beta3 + 0.425) / math.sqrt(n)
    if bound == "theorem2":
        return 0.3051 * (beta3 + 1.0) / math.sqrt(n)
    if isinstance(bound, tuple) and bound[0] == "classical":
        return bound[1] * beta3 / math.sqrt(n)
    raise ValueError(f"unknown bound {bound!r}")


def _inequality_row(payload):
    xs, ps, n, bound, beta3 = payload
    d = LatticeDistribution(np.array(xs), np.array(ps))
    rho = kolmogorov_to_normal(convolve_power(d, n))
    b = bound_value(bound, beta3, n)
    return {"n": n, "distance": rho, "bound": b, "margin": b - rho,
            "passed": rho <= b}


def verify_inequality(dist: LatticeDistribution, n_range, bound, *,
                      parallelism: int = 1) -> list:
    """Exact rho(F_n, Phi) against the requested bound for each n; returns
    one row per n in order, flagging (never expected) violations. Rows are
    independent work items; the parallel map preserves ordering."""
    if not is_standardized(dist):
        raise ValueError("distribution must be standardized (mean 0, variance 1)")
    beta3 = moments(dist).beta3
    payloads = [(dist.xs.tolist(), dist.ps.tolist(), n, bound, beta3)
                for n in n_range]
    if parallelism > 1 and len(payloads) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            return list(pool.map(_inequality_row, payloads))
    return [_inequality_row(p) for p in payloads]


# ---------------------------------------------------------------------------
# limit CDFs for the mixed-intensity laws
# ---------------------------------------------------------------------------

_SQRT2 = math.sqrt(2.0)


def _laplace_cdf(x: float) -> float:
    if x < 0.0:
        return 0.5 * math.exp(_SQRT2 * x)
    return 1.0 - 0.5 * math.exp(-_SQRT2 * x)


def _gamma_mixture_cdf(x: float, r: float, tol: float = 1e-9) -> float:
    """Variance mixture of the normal CDF under a Gamma(r, rate r) weight:
    integral of Phi(x/sqrt(y)) over the gamma density."""
    if r <= 0.0:
        raise ValueError("r must be positive")
    # Chernoff truncation: with s = r/2 the mgf gives P(U > Y) <= 2^r e^{-rY/2}
    Y = 2.0 * (r * math.log(2.0) + 30.0 * math.log(10.0)) / r
    log_norm = r * math.log(r) - math.lgamma(r)
    anchors = [p for p in (0.1, 0.5, 1.0, 2.0, 5.0, 20.0) if p < Y]

    if r >= 1.0:
        def integrand(y):
            y = np.asarray(y, dtype=np.float64)
            dens = np.exp(log_norm + (r - 1.0) * np.log(y) - r * y)
            return dens * normal_cdf_arr(x / np.sqrt(y))
        v = integrate(integrand, 1e-300, Y, tol, points=anchors)
    else:
        # substitute z = y^r so the density stays bounded near zero
        def integrand(z):
            z = np.asarray(z, dtype=np.float64)
            y = z ** (1.0 / r)
            dens = np.exp(log_norm - r * y) / r
            return dens * normal_cdf_arr(x / np.sqrt(y))
        v = integrate(integrand, 1e-300, Y ** r, tol,
                      points=[a ** r for a in anchors])
    return min(1.0, max(0.0, v.estimate))


def limit_cdf(kind: str, x: float, r: float = 1.0) -> float:
    if kind == "laplace":
        return _laplace_cdf(x)
    if kind == "gamma_scale_mixture":
        return _gamma_mixture_cdf(x, r)
    raise ValueError(f"unknown limit kind {kind!r}")
