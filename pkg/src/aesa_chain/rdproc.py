"""Range compression and Doppler processing.

Normalization is chosen so white noise keeps its per-sample power through
both stages: the matched filter has unit energy (peak amplitude gain
``sqrt(replica_length)`` on a full echo) and the slow-time transform is a
unitary DFT with the window rescaled to unit mean-square.  A bin-centred
return therefore integrates to a power gain of ``replica_length * n_pulses``
with the rectangular window, while the noise floor stays at the raw
per-channel noise power for every supported window.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import get_window

from .errors import ConfigError
from .scene import RadarParams, RawDatacube, transmit_pulse

#: canonical window names accepted by doppler_process
WINDOWS = {
    "rectangular": "boxcar",
    "hann": "hann",
    "hamming": "hamming",
}


@dataclass
class CompressedDwell:
    """Range-compressed dwell, shape (n_channels, n_range_bins, n_pulses)."""

    values: np.ndarray
    range_axis: np.ndarray
    params: RadarParams
    seed: int


@dataclass
class RDDatacube:
    """Range-Doppler cube, shape (n_channels, n_range_bins, n_doppler_bins).

    ``velocity_axis`` is the closing speed of each Doppler bin in m/s,
    spanning +/- lambda * prf / 4 after fftshift.
    """

    values: np.ndarray
    range_axis: np.ndarray
    velocity_axis: np.ndarray
    window: str
    params: RadarParams
    seed: int

    @property
    def n_channels(self) -> int:
        return self.values.shape[0]

    def power(self) -> np.ndarray:
        """(n_range, n_doppler) per-cell power summed over channels."""
        return np.sum(np.abs(self.values) ** 2, axis=0)


def range_compress(raw: RawDatacube) -> CompressedDwell:
    """Matched-filter each pulse against the transmit replica.

    Only full-overlap correlation lags are kept, so output bin ``m``
    corresponds to range ``r_min + m * c / (2 fs)``.
    """
    params = raw.params
    x = raw.values
    if x.shape[1] != params.n_fast:
        raise ValueError(
            f"fast-time length {x.shape[1]} does not match params.n_fast={params.n_fast}"
        )
    replica = transmit_pulse(params)
    m = replica.size
    n_fast = x.shape[1]
    # Circular cross-correlation via FFT; lags 0..n_fast-m are wrap-free.
    spec = np.fft.fft(x, axis=1) * np.conj(np.fft.fft(replica, n=n_fast))[None, :, None]
    corr = np.fft.ifft(spec, axis=1)[:, : n_fast - m + 1, :]
    corr /= np.sqrt(m)
    return CompressedDwell(
        values=corr,
        range_axis=params.range_axis(),
        params=params,
        seed=raw.seed,
    )


def _window_samples(window: str, n: int) -> np.ndarray:
    try:
        name = WINDOWS[window.lower()]
    except KeyError:
        raise ConfigError(
            f"unknown window {window!r}; choose one of {sorted(WINDOWS)}"
        ) from None
    w = get_window(name, n, fftbins=True).astype(float)
    # Unit mean-square so the post-transform noise floor equals the input power.
    return w * np.sqrt(n / np.sum(w**2))


def doppler_process(compressed: CompressedDwell, window: str = "hann",
                    oversample: int = 1) -> RDDatacube:
    """Windowed unitary DFT across slow time, fftshifted in Doppler.

    Parameters
    ----------
    window : str
        One of ``rectangular``, ``hann``, ``hamming``.
    oversample : int
        Zero-padding factor for the Doppler transform (default 1).  The noise
        floor scales as 1/oversample because the transform stays unitary over
        the padded length.
    """
    if oversample < 1:
        raise ConfigError("oversample must be a positive integer")
    params = compressed.params
    x = compressed.values
    n = x.shape[2]
    if n != params.n_pulses:
        raise ValueError("slow-time length does not match params.n_pulses")
    w = _window_samples(window, n)
    nfft = n * oversample
    spec = np.fft.fft(x * w[None, None, :], n=nfft, axis=2) / np.sqrt(nfft)
    spec = np.fft.fftshift(spec, axes=2)
    freqs = np.fft.fftshift(np.fft.fftfreq(nfft, d=1.0 / params.prf))
    velocity = freqs * params.wavelength / 2.0
    return RDDatacube(
        values=spec,
        range_axis=compressed.range_axis,
        velocity_axis=velocity,
        window=window.lower(),
        params=params,
        seed=compressed.seed,
    )


def rd_map(raw: RawDatacube, window: str = "hann", oversample: int = 1) -> RDDatacube:
    """Convenience wrapper: range compression followed by Doppler processing."""
    return doppler_process(range_compress(raw), window=window, oversample=oversample)
