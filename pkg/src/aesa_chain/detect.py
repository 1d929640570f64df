"""Cell-averaging CFAR detection, subspace direction finding and truth checks.

CFAR runs along the range dimension per Doppler bin with the exact
cell-averaging threshold factor ``alpha = N (pfa^(-1/N) - 1)`` for ``N``
training cells, which holds the false-alarm rate for exponentially
distributed cell power regardless of the absolute level.  Direction finding
uses the subspace pseudo-spectrum ``P(az) = 1 / ||E_n^H v(az)||^2`` on a
fine azimuth grid with three-point parabolic peak refinement.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .beamform import CovarianceEstimate
from .errors import ConfigError, EstimationError
from .geometry import ArrayGeometry, subarray_steering_matrix
from .rdproc import RDDatacube

#: default azimuth grid step for the pseudo-spectrum, degrees
DOA_GRID_STEP_DEG = 0.05


@dataclass
class Detection:
    """One CFAR exceedance that is also a local maximum."""

    range_bin: int
    doppler_bin: int
    range_m: float
    radial_velocity: float
    peak_power_db: float
    threshold_db: float


def ca_cfar_threshold_factor(pfa: float, n_cells: int) -> float:
    """Exact cell-averaging threshold multiplier for a given false-alarm rate."""
    if not 0.0 < pfa < 1.0:
        raise ValueError("pfa must lie in (0, 1)")
    if n_cells < 1:
        raise ValueError("n_cells must be >= 1")
    return n_cells * (pfa ** (-1.0 / n_cells) - 1.0)


def cfar_detect(power_map: np.ndarray, pfa: float, n_train: int = 16,
                n_guard: int = 2, range_axis: np.ndarray | None = None,
                velocity_axis: np.ndarray | None = None) -> list:
    """Cell-averaging CFAR along range, one pass per Doppler bin.

    Parameters
    ----------
    power_map : ndarray
        Real non-negative (n_range, n_doppler) power map.
    pfa : float
        Design false-alarm probability per evaluated cell.
    n_train, n_guard : int
        Training and guard cells per side along range.
    range_axis, velocity_axis : ndarray, optional
        Physical axes used to annotate detections (NaN when omitted).

    Returns
    -------
    list of Detection
        Cells exceeding the adaptive threshold that are also strict local
        maxima of their 3x3 neighbourhood.  Cells whose training window does
        not fit inside the map are not evaluated.
    """
    p = np.asarray(power_map, dtype=float)
    if p.ndim != 2:
        raise ValueError("power map must be 2-D")
    if np.any(p < 0.0) or not np.all(np.isfinite(p)):
        raise ValueError("power map must be finite and non-negative")
    if n_train < 1 or n_guard < 0:
        raise ConfigError("need n_train >= 1 and n_guard >= 0")
    n_r, n_d = p.shape
    half = n_train + n_guard
    if 2 * half + 1 > n_r:
        raise ConfigError(
            f"CFAR window of {2 * half + 1} range cells exceeds the map ({n_r})"
        )
    n_cells = 2 * n_train
    alpha = ca_cfar_threshold_factor(pfa, n_cells)

    s = np.concatenate([np.zeros((1, n_d)), np.cumsum(p, axis=0)], axis=0)
    i = np.arange(half, n_r - half)
    lead = s[i - n_guard] - s[i - half]
    lag = s[i + half + 1] - s[i + n_guard + 1]
    noise = (lead + lag) / n_cells
    threshold = alpha * noise
    exceeds = p[i, :] > threshold

    padded = np.pad(p, 1, mode="constant", constant_values=-np.inf)
    center = padded[1:-1, 1:-1]
    is_peak = np.ones_like(p, dtype=bool)
    for dr in (-1, 0, 1):
        for dd in (-1, 0, 1):
            if dr == 0 and dd == 0:
                continue
            is_peak &= center > padded[1 + dr:padded.shape[0] - 1 + dr,
                                       1 + dd:padded.shape[1] - 1 + dd]

    hits = np.argwhere(exceeds & is_peak[i, :])
    detections = []
    for row, col in hits:
        r = int(i[row])
        d = int(col)
        detections.append(Detection(
            range_bin=r,
            doppler_bin=d,
            range_m=float(range_axis[r]) if range_axis is not None else float("nan"),
            radial_velocity=float(velocity_axis[d]) if velocity_axis is not None else float("nan"),
            peak_power_db=float(10.0 * np.log10(p[r, d])),
            threshold_db=float(10.0 * np.log10(threshold[row, col])),
        ))
    detections.sort(key=lambda det: det.peak_power_db, reverse=True)
    return detections


def select_training_subset(rd: RDDatacube, detection: Detection,
                           window: tuple = (10, 10),
                           guard: tuple | None = None,
                           clutter_mask: np.ndarray | None = None,
                           min_snapshots: int | None = None) -> np.ndarray:
    """Channel snapshots from a window around a detection.

    ``window`` and ``guard`` are (range, doppler) half-widths; the guard block
    (when given) and clutter-masked cells are removed.  The window is clipped
    at the map edges.  Returns a (n_channels, K) array; raises
    ``EstimationError`` when fewer than ``min_snapshots`` cells remain
    (default twice the channel count).
    """
    n_ch, n_r, n_d = rd.values.shape
    wr, wd = int(window[0]), int(window[1])
    if wr < 0 or wd < 0:
        raise ValueError("window half-widths must be non-negative")
    r0, r1 = max(detection.range_bin - wr, 0), min(detection.range_bin + wr + 1, n_r)
    d0, d1 = max(detection.doppler_bin - wd, 0), min(detection.doppler_bin + wd + 1, n_d)
    mask = np.zeros((n_r, n_d), dtype=bool)
    mask[r0:r1, d0:d1] = True
    if guard is not None:
        gr, gd = int(guard[0]), int(guard[1])
        gr0, gr1 = max(detection.range_bin - gr, 0), min(detection.range_bin + gr + 1, n_r)
        gd0, gd1 = max(detection.doppler_bin - gd, 0), min(detection.doppler_bin + gd + 1, n_d)
        mask[gr0:gr1, gd0:gd1] = False
    if clutter_mask is not None:
        if clutter_mask.shape != mask.shape:
            raise ValueError("clutter mask shape does not match the RD map")
        mask &= ~clutter_mask
    snaps = rd.values[:, mask]
    floor = 2 * n_ch if min_snapshots is None else int(min_snapshots)
    if snaps.shape[1] < floor:
        raise EstimationError(
            f"training subset has {snaps.shape[1]} snapshots, need >= {floor}"
        )
    return snaps


@dataclass
class MusicSpectrum:
    """Subspace pseudo-spectrum over an azimuth grid."""

    azimuth_deg: np.ndarray
    values: np.ndarray
    n_sources: int

    def db(self) -> np.ndarray:
        return 10.0 * np.log10(self.values / self.values.max())


def music_spectrum(cov: CovarianceEstimate, geom: ArrayGeometry,
                   azimuth_grid_deg, n_sources: int) -> MusicSpectrum:
    """Noise-subspace pseudo-spectrum ``1 / ||E_n^H v(az)||^2``.

    ``n_sources`` must leave at least one noise dimension.  Steering vectors
    are normalized to unit norm so the spectrum shape is free of the element
    subpattern envelope.
    """
    r = cov.matrix
    n_ch = r.shape[0]
    if not 1 <= n_sources <= n_ch - 1:
        raise ValueError(f"n_sources must lie in [1, {n_ch - 1}]")
    _vals, vecs = np.linalg.eigh(r)
    noise_sub = vecs[:, : n_ch - n_sources]
    v = subarray_steering_matrix(geom, azimuth_grid_deg)
    v = v / np.linalg.norm(v, axis=0, keepdims=True)
    q = np.sum(np.abs(noise_sub.conj().T @ v) ** 2, axis=0)
    spectrum = 1.0 / np.maximum(q, np.finfo(float).tiny)
    return MusicSpectrum(
        azimuth_deg=np.asarray(azimuth_grid_deg, dtype=float),
        values=spectrum,
        n_sources=int(n_sources),
    )


@dataclass
class PeakEstimate:
    azimuth_deg: float
    power: float


@dataclass
class PeakSet:
    """Refined spectrum peaks, strongest first; ``complete`` is False when
    fewer local maxima exist than were requested."""

    peaks: list
    requested: int

    @property
    def complete(self) -> bool:
        return len(self.peaks) >= self.requested

    @property
    def azimuths(self) -> list:
        return [p.azimuth_deg for p in self.peaks]


def _parabolic_offset(y_left: float, y_mid: float, y_right: float) -> float:
    denom = y_left - 2.0 * y_mid + y_right
    if denom == 0.0:
        return 0.0
    return 0.5 * (y_left - y_right) / denom


def pick_peaks(spectrum: MusicSpectrum, k: int) -> PeakSet:
    """The k largest local maxima with parabolic sub-grid refinement.

    Value ties between candidate peaks are broken toward smaller absolute
    azimuth.  Grid endpoints are not eligible.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    az = spectrum.azimuth_deg
    p = spectrum.values
    if az.size < 3:
        raise ValueError("spectrum grid too short for peak picking")
    idx = np.arange(1, az.size - 1)
    is_max = (p[idx] > p[idx - 1]) & (p[idx] >= p[idx + 1])
    candidates = idx[is_max]
    # Strongest first; ties toward smaller |azimuth|.
    order = sorted(candidates, key=lambda i: (-p[i], abs(az[i])))
    peaks = []
    for i in order[:k]:
        step = az[min(i + 1, az.size - 1)] - az[i]
        offset = _parabolic_offset(p[i - 1], p[i], p[i + 1])
        offset = float(np.clip(offset, -0.5, 0.5))
        peaks.append(PeakEstimate(azimuth_deg=float(az[i] + offset * step),
                                  power=float(p[i])))
    return PeakSet(peaks=peaks, requested=int(k))


@dataclass(frozen=True)
class GroundTruthTrack:
    """One reference track sample from the local truth file."""

    timestamp: str
    name: str
    range_m: float
    azimuth_deg: float
    heading_deg: float
    length_m: float
    beam_m: float

    def __post_init__(self):
        if not self.length_m >= self.beam_m > 0.0:
            raise ValueError("track requires length_m >= beam_m > 0")


TRACK_COLUMNS = ("timestamp", "name", "range_m", "azimuth_deg",
                 "heading_deg", "length_m", "beam_m")


def load_tracks(path) -> list:
    """Read ground-truth tracks from CSV with the canonical column set."""
    path = Path(path)
    tracks = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(TRACK_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ConfigError(f"track file {path} is missing columns: {sorted(missing)}")
        for row in reader:
            tracks.append(GroundTruthTrack(
                timestamp=row["timestamp"],
                name=row["name"],
                range_m=float(row["range_m"]),
                azimuth_deg=float(row["azimuth_deg"]),
                heading_deg=float(row["heading_deg"]),
                length_m=float(row["length_m"]),
                beam_m=float(row["beam_m"]),
            ))
    return tracks


def angular_error(estimate_deg: float, truth) -> float:
    """Absolute azimuth difference wrapped to [0, 180] degrees.

    ``truth`` may be a GroundTruthTrack or a plain azimuth in degrees.
    """
    truth_az = getattr(truth, "azimuth_deg", truth)
    diff = abs(float(estimate_deg) - float(truth_az)) % 360.0
    return float(min(diff, 360.0 - diff))


@dataclass(frozen=True)
class AngularSpan:
    """Angular extent of a track target as seen from the radar."""

    projected_m: float
    span_deg: float
    within_target: bool | None


#: slack added to the span test, matching the 0.1 deg print granularity of
#: reported angular errors
SPAN_TOLERANCE_DEG = 0.05


def target_angular_span(track: GroundTruthTrack, radar_los_azimuth_deg: float,
                        angular_error_deg: float | None = None) -> AngularSpan:
    """Projected size and subtended angle of a track target.

    The hull projection across the line of sight is
    ``max(length * |sin(heading - los)|, beam)`` (the beam floors the
    projection for near-parallel headings); the subtended span is
    ``2 * atan(projected / (2 * range))``.  When an angular error is supplied,
    ``within_target`` reports whether it falls inside the span (with a small
    print-granularity slack).
    """
    rel = np.deg2rad(track.heading_deg - radar_los_azimuth_deg)
    projected = max(track.length_m * abs(np.sin(rel)), track.beam_m)
    span = np.rad2deg(2.0 * np.arctan(projected / (2.0 * track.range_m)))
    within = None
    if angular_error_deg is not None:
        within = bool(angular_error_deg <= span + SPAN_TOLERANCE_DEG)
    return AngularSpan(projected_m=float(projected), span_deg=float(span),
                       within_target=within)
