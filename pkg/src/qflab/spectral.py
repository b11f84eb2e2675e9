"""Numerical Fourier analysis of model signals and the algebraic-hardness bound table.

Coefficient extraction samples a periodic signal at exactly 2*D + 1 equispaced
points and inverts the discrete Fourier system, which is simultaneously the
cheapest exact method and a demonstration of the Nyquist sampling cost that
an attacker would pay.  Symbolic expansion of the circuit is out of scope:
its memory footprint grows with the full Hilbert-space dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import encoding
from .engine import FixedThetaEvaluator, encoding_states
from .errors import AliasingError, ConfigurationError
from .qmodel import ModelSpec, Sample

NONZERO_COEFFICIENT = 1e-7  # well above DFT noise, well below generic magnitudes


@dataclass
class FourierSpectrum:
    """Integer-frequency complex coefficients of a real periodic signal."""

    frequencies: np.ndarray
    coefficients: np.ndarray
    max_abs_residual: float
    gamma: float

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Resample the series at arbitrary points (real part of the sum)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        phases = np.exp(1j * self.gamma * np.outer(x, self.frequencies))
        return (phases @ self.coefficients).real

    def max_frequency_above(self, threshold: float = NONZERO_COEFFICIENT) -> int:
        """Largest |frequency| whose coefficient magnitude exceeds the threshold."""
        mask = np.abs(self.coefficients) > threshold
        if not np.any(mask):
            return 0
        return int(np.max(np.abs(self.frequencies[mask])))


def extract_spectrum(signal, d_f: int, gamma: float) -> FourierSpectrum:
    """Fourier coefficients of a signal with period 2*pi/gamma and max frequency d_f.

    Samples at the 2*d_f + 1 Nyquist points and inverts by DFT.  The DFT fit
    is exact on its own grid even when the signal has frequencies beyond d_f,
    so the residual is measured at the grid midpoints, where aliased content
    shows up as reconstruction error.
    """
    if d_f < 1:
        raise ConfigurationError(f"d_f must be >= 1, got {d_f}")
    count = 2 * d_f + 1
    period = 2.0 * np.pi / gamma
    step = period / count
    xs = np.arange(count) * step
    samples = np.asarray([float(signal(x)) for x in xs])
    dft = np.fft.fft(samples) / count
    freqs = np.arange(count)
    freqs[freqs > d_f] -= count  # map k > N/2 to negative frequencies
    order = np.argsort(freqs)
    spectrum = FourierSpectrum(
        frequencies=freqs[order],
        coefficients=dft[order],
        max_abs_residual=0.0,
        gamma=gamma,
    )
    mids = xs + step / 2.0
    mid_samples = np.asarray([float(signal(x)) for x in mids])
    residual = float(np.max(np.abs(spectrum.evaluate(mids) - mid_samples)))
    spectrum.max_abs_residual = residual
    if residual > 1e-6:
        raise AliasingError(
            f"midpoint reconstruction residual {residual:.3e} exceeds 1e-6; "
            f"stated maximum frequency {d_f} is understated"
        )
    return spectrum


def extract_spectrum_2d(signal, d_f: int, gamma: float) -> dict:
    """Tensor-grid DFT for two-coordinate signals; frequencies each in [-d_f, d_f].

    Returns {'frequencies': [2D+1] ints, 'coefficients': [2D+1, 2D+1] complex}.
    Grid cost is (2*d_f + 1)^2 samples, the two-dimensional Nyquist price.
    """
    count = 2 * d_f + 1
    period = 2.0 * np.pi / gamma
    xs = np.arange(count) * (period / count)
    grid = np.asarray([[float(signal(x1, x2)) for x2 in xs] for x1 in xs])
    dft = np.fft.fft2(grid) / count**2
    freqs = np.arange(count)
    freqs[freqs > d_f] -= count
    order = np.argsort(freqs)
    return {"frequencies": freqs[order], "coefficients": dft[np.ix_(order, order)]}


@dataclass
class SupportReport:
    m: int
    j: int
    predicted_max_frequency: int
    observed_max_frequency: int
    headroom_leak: float  # largest |coefficient| beyond the predicted band
    passed: bool


def gradient_signal(spec: ModelSpec, theta: np.ndarray, sample: Sample, j: int):
    """x -> d Cost / d theta_j as a callable, evaluated on the fast backend."""
    evaluator = FixedThetaEvaluator(spec, theta, param_indices=[j])

    def signal(x: float) -> float:
        states = encoding_states(spec.encoding, np.array([[x]]))
        return float(evaluator.cost_gradient_entries(states, sample.y)[0, 0])

    return signal


def verify_gradient_support(spec: ModelSpec, theta: np.ndarray, sample: Sample,
                            j: int) -> SupportReport:
    """Check that the cost-gradient spectrum stays inside the predicted band.

    Extracts at twice the predicted maximum frequency so genuine leakage
    beyond the band would be visible rather than aliased.
    """
    if spec.encoding.n != 1:
        raise ConfigurationError("support verification is univariate (n = 1)")
    if spec.encoding.m > 3:
        raise ConfigurationError("support verification is guarded to m <= 3")
    predicted = encoding.max_gradient_frequency(spec.encoding.m, spec.encoding.prefactor_base)
    signal = gradient_signal(spec, theta, sample, j)
    headroom = extract_spectrum(signal, 2 * predicted, spec.encoding.gamma)
    beyond = np.abs(headroom.frequencies) > predicted
    leak = float(np.max(np.abs(headroom.coefficients[beyond])))
    observed = headroom.max_frequency_above()
    return SupportReport(
        m=spec.encoding.m,
        j=j,
        predicted_max_frequency=predicted,
        observed_max_frequency=observed,
        headroom_leak=leak,
        passed=leak <= NONZERO_COEFFICIENT,
    )


# ---------------------------------------------------------------------------
# hardness bound calculators (exact integer arithmetic)

def chebyshev_max_degree(n: int, m: int, base: int = 5) -> int:
    """Maximum total degree of the gradient system in Chebyshev form: d_F^n."""
    return encoding.max_gradient_frequency(m, base) ** n


def bezout_minima_bound(n: int, m: int, base: int = 5) -> int:
    """Product-of-degrees root bound for the attack stationarity system: 4^n d_F^(n^2)."""
    return 4**n * encoding.max_gradient_frequency(m, base) ** (n * n)


def buchberger_bound(n: int, m: int, base: int = 5) -> int:
    """Worst-case Groebner-basis cost 2*(D^2/2 + D)^(2^(N-2)) with N = 2n unknowns.

    D is the Chebyshev degree of the system.  Returned exactly as a Python
    integer; use `buchberger_bound_log2` when only the magnitude matters.
    """
    degree = chebyshev_max_degree(n, m, base)
    exponent = 2 ** (2 * n - 2)
    return 2 * (degree * degree // 2 + degree) ** exponent


def buchberger_bound_log2(n: int, m: int, base: int = 5) -> float:
    import math

    return math.log2(buchberger_bound(n, m, base))


def nyquist_sample_count(n: int, m: int, base: int = 5) -> int:
    """Samples needed to reconstruct gradient coefficients without aliasing: (2 d_F)^n."""
    return (2 * encoding.max_gradient_frequency(m, base)) ** n


def bounds_table(n_values, m_values, base: int = 5) -> list:
    """One row of every hardness quantity per (n, m) pair."""
    rows = []
    for n in n_values:
        for m in m_values:
            d_f = encoding.max_gradient_frequency(m, base)
            rows.append({
                "n": n,
                "m": m,
                "d_F": d_f,
                "K_g": encoding.gradient_spectrum_size(n, m, base),
                "omega_g_count": encoding.gradient_frequency_count(n, m, base),
                "chebyshev_degree": chebyshev_max_degree(n, m, base),
                "bezout_bound": bezout_minima_bound(n, m, base),
                "buchberger_bound": buchberger_bound(n, m, base),
                "buchberger_log2": buchberger_bound_log2(n, m, base),
                "nyquist_samples": nyquist_sample_count(n, m, base),
            })
    return rows
