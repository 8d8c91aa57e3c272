"""Two-sample Kolmogorov-Smirnov checks on the degree and local clustering
distributions, and the sweep for the largest unnoticeable perturbation rate."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, degree_sequence, local_clustering_coefficients

ALPHA = 0.05
RATE_GRID = (0.001, 0.002, 0.003, 0.004, 0.005, 0.0075, 0.01, 0.025, 0.05, 0.075, 0.10, 0.15, 0.20)
_SERIES_EPS = 1e-12
_SERIES_MAX_TERMS = 100_000


def ks_statistic(a, b) -> float:
    """``sup |F_a - F_b|`` evaluated at every value of the merged sample."""
    a = np.sort(np.asarray(a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(b, dtype=np.float64).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("KS test needs two non-empty samples")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(fa - fb).max())


def kolmogorov_sf(x: float) -> float:
    """``P(K > x)`` for the Kolmogorov distribution, clamped to [0, 1].

    For ``x >= 1`` the alternating series ``2 sum (-1)^(j-1) exp(-2 j^2 x^2)``
    is summed until a term drops below 1e-12. Below 1 that series converges
    slowly and its truncation noise breaks monotonicity, so the equivalent
    theta-function form ``1 - sqrt(2 pi) / x sum exp(-(2j-1)^2 pi^2 / (8 x^2))``
    is used instead; it converges fast exactly where the other does not.
    """
    if x <= 0:
        return 1.0
    total = 0.0
    if x < 1.0:
        for j in range(1, _SERIES_MAX_TERMS + 1):
            term = np.exp(-((2 * j - 1) ** 2) * np.pi ** 2 / (8.0 * x * x))
            total += term
            if term < _SERIES_EPS * 1e-6:
                break
        return float(min(1.0, max(0.0, 1.0 - np.sqrt(2 * np.pi) / x * total)))
    for j in range(1, _SERIES_MAX_TERMS + 1):
        term = np.exp(-2.0 * j * j * x * x)
        total += term if j % 2 else -term
        if term < _SERIES_EPS:
            break
    return float(min(1.0, max(0.0, 2.0 * total)))


def ks_two_sample(a, b) -> tuple[float, float]:
    """KS statistic and asymptotic p-value with effective size
    ``n_a n_b / (n_a + n_b)``."""
    d = ks_statistic(a, b)
    na, nb = np.size(a), np.size(b)
    n_eff = na * nb / (na + nb)
    return d, kolmogorov_sf(np.sqrt(n_eff) * d)


@dataclass(frozen=True)
class KSResult:
    statistic: float
    p_value: float


@dataclass(frozen=True)
class NoticeabilityVerdict:
    ks_degree: KSResult
    ks_clustering: KSResult
    alpha: float

    @property
    def unnoticeable(self) -> bool:
        return self.ks_degree.p_value >= self.alpha and self.ks_clustering.p_value >= self.alpha

    def as_row(self) -> dict:
        return {"D_deg": self.ks_degree.statistic, "p_deg": self.ks_degree.p_value,
                "D_cc": self.ks_clustering.statistic, "p_cc": self.ks_clustering.p_value,
                "unnoticeable": self.unnoticeable}


def is_unnoticeable(clean: Graph, perturbed: Graph, alpha: float = ALPHA) -> NoticeabilityVerdict:
    """Both the degree and the clustering-coefficient distributions (over all
    nodes) are compared; the attack passes if neither test rejects."""
    if clean.n != perturbed.n:
        raise ValueError(f"node counts differ: {clean.n} vs {perturbed.n}")
    deg = KSResult(*ks_two_sample(degree_sequence(clean), degree_sequence(perturbed)))
    cc = KSResult(*ks_two_sample(local_clustering_coefficients(clean), local_clustering_coefficients(perturbed)))
    return NoticeabilityVerdict(deg, cc, alpha)


@dataclass
class CriticalRateResult:
    rates_tested: list
    verdicts: list = field(default_factory=list)

    @property
    def r_critical(self) -> float:
        ok = [r for r, v in zip(self.rates_tested, self.verdicts) if v.unnoticeable]
        return max(ok) if ok else 0.0

    def rows(self) -> list[dict]:
        return [{"rate": r, **v.as_row()} for r, v in zip(self.rates_tested, self.verdicts)]


class RateFailure(RuntimeError):
    def __init__(self, rate, cause):
        super().__init__(f"attack failed at rate {rate}: {cause}")
        self.rate = rate


def critical_rate(clean: Graph, attack_factory, rates=RATE_GRID, alpha: float = ALPHA,
                  seed=None) -> CriticalRateResult:
    """Evaluate every rate (no early stop) and report the largest one whose
    perturbed graph is unnoticeable.

    ``attack_factory(graph, rate, seed)`` must return an object with an
    ``apply(graph)`` method, such as an attack plan.
    """
    rates = list(rates)
    if rates != sorted(rates):
        raise ValueError("rates must be sorted ascending")
    result = CriticalRateResult(rates)
    for rate in rates:
        try:
            perturbed = attack_factory(clean, rate, seed).apply(clean)
        except Exception as exc:
            raise RateFailure(rate, exc) from exc
        result.verdicts.append(is_unnoticeable(clean, perturbed, alpha))
    return result
