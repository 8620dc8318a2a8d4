"""Closed-form busy fractions of the bufferless preemptive servers.

A preemptive server without a buffer fed at rate ``a`` with service rate
``mu`` alternates idle periods of mean ``1/a`` with busy periods of mean
``1/mu``, so it is busy a fraction ``a / (a + mu)`` of the time.
"""

from __future__ import annotations


def _frac(a: float, mu: float) -> float:
    return a / (a + mu) if a > 0 else 0.0


def t_local(lam: float, p: float, mu2: float) -> float:
    """Local processor busy fraction, ``lam p / (lam p + mu2)``."""
    return _frac(lam * p, mu2)


def t_transmit(lam: float, p: float, mu1: float) -> float:
    """Own transmitter busy fraction, ``lam q / (lam q + mu1)`` with ``q = 1 - p``."""
    return _frac(lam * (1.0 - p), mu1)


def t_primary_tx(lam_P: float, p_P: float, mu1P: float) -> float:
    """Fraction of time the primary's transmitter serves class-P packets."""
    return _frac(lam_P * (1.0 - p_P), mu1P)


def t_secondary_tx(lam_P: float, p_P: float, mu1P: float, lambda_s: float) -> float:
    """Fraction of time the primary's transmitter serves secondary packets.

    Secondary traffic ``lambda_s`` occupies the transmitter a fraction
    ``lambda_s / (lambda_s + mu1P + a)`` of the time it is not serving
    class P, which is itself a fraction ``mu1P / (mu1P + a)``.
    """
    a = lam_P * (1.0 - p_P)
    if lambda_s <= 0 or mu1P <= 0:
        return 0.0
    return lambda_s / (lambda_s + mu1P + a) * mu1P / (mu1P + a)
