"""Single-chain summaries: moments, quantiles, autocorrelation, ESS."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hmc import ChainResult

__all__ = ["ChainSummary", "autocorrelation", "effective_sample_size", "summarize", "QUANTILE_LEVELS"]

QUANTILE_LEVELS = (0.025, 0.25, 0.5, 0.75, 0.975)


def autocorrelation(series, max_lag: int) -> np.ndarray:
    """Sample autocorrelations ``r(0..max_lag)`` with the biased normalisation
    ``r(k) = sum_t (z_t - m)(z_{t+k} - m) / sum_t (z_t - m)^2``.

    Computed by zero-padded FFT.
    """
    z = np.asarray(series, dtype=float)
    n = z.size
    if not 1 <= max_lag < n:
        raise ValueError(f"need 1 <= max_lag < len(series), got max_lag={max_lag}, n={n}")
    z = z - z.mean()
    denom = float(z @ z)
    if denom == 0.0:
        raise ValueError("autocorrelation is undefined for a constant series")
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(z, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1]
    r = acov / denom
    r[0] = 1.0
    return np.clip(r, -1.0, 1.0)


def effective_sample_size(series, max_lag: int | None = None) -> float:
    """ESS ``n / (1 + 2 sum_k r(k))`` with Geyer's initial positive sequence
    truncation: autocorrelations are summed in adjacent pairs
    ``r(2m) + r(2m+1)`` up to the first pair that is not positive.

    The result is capped at ``n``.
    """
    z = np.asarray(series, dtype=float)
    n = z.size
    if max_lag is None:
        max_lag = n - 1
    r = autocorrelation(z, max_lag)
    tau = -1.0
    for m in range(0, (max_lag + 1) // 2):
        pair = r[2 * m] + r[2 * m + 1]
        if pair <= 0 and m > 0:
            break
        tau += 2.0 * pair
    if tau <= 1.0:
        return float(n)
    return float(n / tau)


@dataclass(frozen=True)
class ChainSummary:
    mean: np.ndarray
    sd: np.ndarray
    quantiles: dict
    acceptance_rate: float
    acf: np.ndarray
    ess: np.ndarray
    burn_in: int
    n_retained: int

    def as_dict(self) -> dict:
        return {
            "burn_in": self.burn_in,
            "n_retained": self.n_retained,
            "acceptance_rate": self.acceptance_rate,
            "mean": self.mean.tolist(),
            "sd": self.sd.tolist(),
            "quantiles": {k: v.tolist() for k, v in self.quantiles.items()},
            "ess": [None if np.isnan(e) else e for e in self.ess.tolist()],
        }


def summarize(chain: ChainResult, burn_in: int = 0, max_lag: int = 50) -> ChainSummary:
    """Summarise the rows of ``chain.samples`` after the first ``burn_in``.

    Quantiles use linear interpolation between order statistics.  For a
    coordinate that never moves the ACF (beyond lag 0) and ESS are NaN.
    """
    samples = np.asarray(chain.samples, dtype=float)
    if not 0 <= burn_in < samples.shape[0]:
        raise ValueError(f"burn_in must lie in [0, {samples.shape[0]}), got {burn_in}")
    kept = samples[burn_in:]
    m, d = kept.shape
    lag = min(max_lag, m - 1)
    acf = np.full((d, lag + 1), np.nan)
    ess = np.full(d, np.nan)
    for j in range(d):
        col = kept[:, j]
        if lag >= 1 and np.ptp(col) > 0:
            acf[j] = autocorrelation(col, lag)
            ess[j] = effective_sample_size(col)
        elif lag >= 0:
            acf[j, 0] = 1.0
    qs = np.quantile(kept, QUANTILE_LEVELS, axis=0, method="linear")
    return ChainSummary(
        mean=kept.mean(axis=0),
        sd=kept.std(axis=0, ddof=1) if m > 1 else np.zeros(d),
        quantiles={f"{100 * lv:g}%": qs[i] for i, lv in enumerate(QUANTILE_LEVELS)},
        acceptance_rate=chain.acceptance_rate,
        acf=acf,
        ess=ess,
        burn_in=burn_in,
        n_retained=m,
    )
