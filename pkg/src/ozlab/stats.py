"""Shared statistics: pooled chi-square, autocorrelation time, weighted line fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps


def chi2_pooled(counts, probs, min_expected=5.0):
    """Chi-square GOF with low-expectation cells pooled into one bucket.

    Returns (statistic, dof, p_value). Pooling merges cells with expected count
    below `min_expected`, smallest first, which keeps the asymptotic chi-square
    reference valid for full configuration histograms.
    """
    counts = np.asarray(counts, dtype=np.float64)
    n = counts.sum()
    expected = np.asarray(probs, dtype=np.float64) * n
    order = np.argsort(expected)
    pooled_counts = []
    pooled_exp = []
    acc_c = 0.0
    acc_e = 0.0
    for i in order:
        acc_c += counts[i]
        acc_e += expected[i]
        if acc_e >= min_expected:
            pooled_counts.append(acc_c)
            pooled_exp.append(acc_e)
            acc_c = 0.0
            acc_e = 0.0
    if acc_e > 0 and pooled_exp:
        pooled_counts[-1] += acc_c
        pooled_exp[-1] += acc_e
    k = len(pooled_exp)
    if k < 2:
        raise ValueError("not enough cells after pooling")
    pc = np.array(pooled_counts)
    pe = np.array(pooled_exp)
    # renormalize the tiny probability mass lost to pooling arithmetic
    pe *= n / pe.sum()
    stat = float(np.sum((pc - pe) ** 2 / pe))
    dof = k - 1
    return stat, dof, float(sps.chi2.sf(stat, dof))


def integrated_autocorrelation(series, c_window=6.0):
    """Sokal windowed IAT estimate: 0.5 + sum of autocorrelations up to W ~ c*tau."""
    x = np.asarray(series, dtype=np.float64)
    n = x.size
    if n < 8:
        return 0.5
    x = x - x.mean()
    var = float(x @ x) / n
    if var == 0.0:
        return 0.5
    # FFT autocovariance
    m = 1
    while m < 2 * n:
        m *= 2
    f = np.fft.rfft(x, m)
    acov = np.fft.irfft(f * np.conj(f), m)[:n].real / n
    rho = acov / var
    tau = 0.5
    for k in range(1, n // 2):
        tau += rho[k]
        if k >= c_window * tau:
            break
    return max(0.5, float(tau))


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    slope_err: float
    intercept_err: float
    residuals: np.ndarray
    chi2: float


def weighted_line_fit(x, y, sigma) -> LineFit:
    """WLS fit y = intercept + slope*x with per-point standard deviations."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = 1.0 / np.asarray(sigma, dtype=np.float64) ** 2
    sw = w.sum()
    sx = (w * x).sum()
    sy = (w * y).sum()
    sxx = (w * x * x).sum()
    sxy = (w * x * y).sum()
    det = sw * sxx - sx * sx
    if det <= 0:
        raise ValueError("degenerate fit")
    slope = (sw * sxy - sx * sy) / det
    intercept = (sxx * sy - sx * sxy) / det
    resid = y - intercept - slope * x
    return LineFit(
        slope=float(slope),
        intercept=float(intercept),
        slope_err=math.sqrt(sw / det),
        intercept_err=math.sqrt(sxx / det),
        residuals=resid,
        chi2=float((w * resid**2).sum()),
    )


def binomial_stderr(k, n):
    """Wald standard error with a half-count floor so zero counts stay usable."""
    k = max(float(k), 0.5)
    phat = k / n
    return math.sqrt(max(phat * (1.0 - phat), phat * 0.5) / n) if n > 0 else float("nan")


def exponential_tail_fit(values, counts):
    """WLS fit of log counts vs value for tail-regression; returns (rate, rate_err, p_value).

    The p-value is for the linear-fit chi-square (lack-of-fit test); a positive
    rate with p > threshold accepts the exponential-tail hypothesis.
    """
    values = np.asarray(values, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.float64)
    keep = counts >= 5
    values, counts = values[keep], counts[keep]
    if values.size < 3:
        raise ValueError("too few tail points")
    y = np.log(counts)
    sigma = 1.0 / np.sqrt(counts)
    fit = weighted_line_fit(values, y, sigma)
    dof = values.size - 2
    pval = float(sps.chi2.sf(fit.chi2, dof)) if dof > 0 else 1.0
    return -fit.slope, fit.slope_err, pval
