"""Conventional and minimum-variance adaptive beamforming on the RD cube.

A snapshot is the 6-channel vector of one range-Doppler cell.  The sample
covariance over a training region is diagonally loaded at a level referenced
to the estimated thermal floor.  Adaptive weights solve the minimum-variance
distortionless problem ``w0 = R^-1 v / (v^H R^-1 v)`` and are then rescaled
to unit norm so the white-noise floor at the beamformer output equals the
per-channel floor, which keeps conventional and adaptive maps directly
comparable.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import EstimationError, NumericalError
from .geometry import ArrayGeometry, subarray_steering, subarray_steering_matrix
from .rdproc import RDDatacube

#: diagonal loading above the estimated noise floor, dB
DEFAULT_LOADING_DB = 10.0

#: covariance condition number beyond which the solve is refused
MAX_CONDITION = 1.0e12


@dataclass(frozen=True)
class TrainingRegion:
    """Index block of RD cells used for covariance estimation.

    Spans are half-open bin ranges.  ``exclusion`` is an optional guard block
    (same format) removed from the region, typically centred on a detection.
    """

    range_span: tuple
    doppler_span: tuple
    exclusion: tuple | None = None  # ((r_lo, r_hi), (d_lo, d_hi))

    def __post_init__(self):
        r0, r1 = self.range_span
        d0, d1 = self.doppler_span
        if r0 >= r1 or d0 >= d1:
            raise ValueError("training region spans must be non-empty")

    def mask(self, shape) -> np.ndarray:
        """Boolean (n_range, n_doppler) mask of included cells."""
        n_r, n_d = shape
        m = np.zeros((n_r, n_d), dtype=bool)
        r0, r1 = np.clip(self.range_span, 0, n_r)
        d0, d1 = np.clip(self.doppler_span, 0, n_d)
        m[r0:r1, d0:d1] = True
        if self.exclusion is not None:
            (er0, er1), (ed0, ed1) = self.exclusion
            er0, er1 = np.clip((er0, er1), 0, n_r)
            ed0, ed1 = np.clip((ed0, ed1), 0, n_d)
            m[er0:er1, ed0:ed1] = False
        return m


@dataclass
class CovarianceEstimate:
    """Loaded sample covariance of the channel snapshots."""

    matrix: np.ndarray
    snapshot_count: int
    diagonal_loading: float  # linear power added to the diagonal

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("covariance must be a square matrix")
        herm = np.max(np.abs(m - m.conj().T))
        scale = max(np.max(np.abs(m)), 1.0)
        if herm > 1e-9 * scale:
            raise ValueError("covariance matrix is not Hermitian")
        self.matrix = m


@dataclass
class BeamformerWeights:
    """Unit-norm channel weights with their steering direction and mode."""

    values: np.ndarray
    mode: str
    steer_azimuth_deg: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ValueError("weight vector must be nonzero")
        self.values = v / norm


def covariance_from_snapshots(snapshots: np.ndarray, loading_db: float = DEFAULT_LOADING_DB,
                              noise_floor: float | None = None,
                              min_snapshots: int | None = None) -> CovarianceEstimate:
    """Loaded sample covariance from a (n_channels, K) snapshot block.

    The loading level is ``noise_floor * 10^(loading_db/10)``.  When
    ``noise_floor`` is None it is estimated as the smallest eigenvalue of the
    unloaded sample covariance (the thermal floor when interference is low
    rank).  ``min_snapshots`` defaults to twice the channel count.
    """
    x = np.asarray(snapshots, dtype=complex)
    if x.ndim != 2:
        raise ValueError("snapshots must be a 2-D (channels, K) array")
    n_ch, k = x.shape
    floor = 2 * n_ch if min_snapshots is None else int(min_snapshots)
    if k < floor:
        raise EstimationError(
            f"{k} snapshots are too few for covariance estimation (need >= {floor})"
        )
    r = x @ x.conj().T / k
    r = 0.5 * (r + r.conj().T)
    if noise_floor is None:
        noise_floor = float(np.linalg.eigvalsh(r)[0])
        noise_floor = max(noise_floor, 0.0)
    delta = noise_floor * 10.0 ** (loading_db / 10.0)
    r = r + delta * np.eye(n_ch)
    return CovarianceEstimate(matrix=r, snapshot_count=k, diagonal_loading=delta)


def estimate_covariance(rd: RDDatacube, region: TrainingRegion,
                        loading_db: float = DEFAULT_LOADING_DB,
                        clutter_mask: np.ndarray | None = None,
                        noise_floor: float | None = None,
                        min_snapshots: int | None = None) -> CovarianceEstimate:
    """Sample covariance over a training region of the RD cube.

    ``clutter_mask`` marks cells to exclude (True = clutter) in addition to
    the region's own exclusion block.
    """
    shape = rd.values.shape[1:]
    m = region.mask(shape)
    if clutter_mask is not None:
        if clutter_mask.shape != m.shape:
            raise ValueError("clutter mask shape does not match the RD map")
        m &= ~clutter_mask
    snaps = rd.values[:, m]
    if snaps.size == 0:
        raise EstimationError("training region is empty after exclusions")
    return covariance_from_snapshots(snaps, loading_db=loading_db,
                                     noise_floor=noise_floor,
                                     min_snapshots=min_snapshots)


def conventional_weights(geom: ArrayGeometry, azimuth_deg: float) -> BeamformerWeights:
    """Phase-conjugate (matched) weights, unit norm."""
    v = subarray_steering(geom, azimuth_deg)
    return BeamformerWeights(values=v, mode="conventional", steer_azimuth_deg=float(azimuth_deg))


def mvdr_distortionless_weights(cov: CovarianceEstimate, geom: ArrayGeometry,
                                azimuth_deg: float) -> np.ndarray:
    """Unnormalized minimum-variance weights with w0^H v = 1."""
    r = cov.matrix
    v = subarray_steering(geom, azimuth_deg)
    if r.shape[0] != v.size:
        raise ValueError("covariance size does not match the channel count")
    cond = np.linalg.cond(r)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise NumericalError(
            f"covariance condition number {cond:.3e} exceeds {MAX_CONDITION:.1e}; "
            "increase diagonal loading or the training region"
        )
    g = np.linalg.solve(r, v)
    denom = v.conj() @ g
    if denom.real <= 0.0:
        raise NumericalError("covariance is not positive definite at the steering vector")
    return g / denom


def mvdr_weights(cov: CovarianceEstimate, geom: ArrayGeometry,
                 azimuth_deg: float) -> BeamformerWeights:
    """Unit-norm minimum-variance distortionless weights."""
    w0 = mvdr_distortionless_weights(cov, geom, azimuth_deg)
    return BeamformerWeights(values=w0, mode="mvdr", steer_azimuth_deg=float(azimuth_deg))


def apply_beamformer(rd, weights) -> np.ndarray:
    """Collapse the channel axis with ``w^H x`` per cell.

    Accepts an RDDatacube, a CompressedDwell, or any (n_channels, A, B)
    ndarray; returns the complex (A, B) beamformed map.
    """
    cube = np.asarray(getattr(rd, "values", rd))
    w = np.asarray(getattr(weights, "values", weights), dtype=complex)
    if cube.ndim != 3 or cube.shape[0] != w.size:
        raise ValueError(
            f"expected a ({w.size}, A, B) cube, got shape {cube.shape}"
        )
    return np.einsum("c,crd->rd", w.conj(), cube)


@dataclass
class BeamscanCurve:
    """Output energy versus steering azimuth for one beamformer mode."""

    azimuth_deg: np.ndarray
    energy: np.ndarray          # linear total output energy per angle
    mode: str

    @property
    def db(self) -> np.ndarray:
        """Energy normalized to the curve maximum, in dB."""
        return 10.0 * np.log10(self.energy / self.energy.max())


def beamscan(rd: RDDatacube, geom: ArrayGeometry, azimuth_grid_deg,
             mode: str = "conventional",
             cov: CovarianceEstimate | None = None) -> BeamscanCurve:
    """Total beamformed map energy as a function of steering azimuth.

    The energy at angle a equals ``sum_cells |w_a^H x|^2``, evaluated through
    the cell scatter matrix so the scan cost is independent of the map size.
    """
    grid = np.asarray(azimuth_grid_deg, dtype=float)
    if mode not in ("conventional", "mvdr"):
        raise ValueError("mode must be 'conventional' or 'mvdr'")
    if mode == "mvdr" and cov is None:
        raise ValueError("mvdr beamscan requires a covariance estimate")
    x = rd.values.reshape(rd.values.shape[0], -1)
    scatter = x @ x.conj().T
    energy = np.empty(grid.size)
    for i, az in enumerate(grid):
        if mode == "conventional":
            w = conventional_weights(geom, az).values
        else:
            w = mvdr_weights(cov, geom, az).values
        energy[i] = float(np.real(w.conj() @ scatter @ w))
    return BeamscanCurve(azimuth_deg=grid, energy=energy, mode=mode)


def rejection_db(conventional_map: np.ndarray, adaptive_map: np.ndarray,
                 region_mask: np.ndarray | None = None) -> float:
    """Interference rejection: mean-power ratio of the two maps in dB.

    ``region_mask`` selects the measurement cells (True = include); default is
    the full map.  Both maps must share a shape and the region must be
    non-empty.
    """
    a = np.asarray(conventional_map)
    b = np.asarray(adaptive_map)
    if a.shape != b.shape:
        raise ValueError("maps must share a shape")
    if region_mask is None:
        region_mask = np.ones(a.shape, dtype=bool)
    if region_mask.shape != a.shape:
        raise ValueError("region mask shape does not match the maps")
    if not region_mask.any():
        raise ValueError("rejection measurement region is empty")
    p_conv = np.mean(np.abs(a[region_mask]) ** 2)
    p_mvdr = np.mean(np.abs(b[region_mask]) ** 2)
    if p_conv <= 0.0 or p_mvdr <= 0.0:
        raise ValueError("rejection is undefined for an identically zero map")
    return float(10.0 * np.log10(p_conv / p_mvdr))


def exclusion_mask(shape, detections=(), guard: int = 3,
                   clutter_mask: np.ndarray | None = None) -> np.ndarray:
    """Measurement-region mask: full map minus detection guards and clutter.

    ``detections`` is an iterable of objects with ``range_bin`` and
    ``doppler_bin`` attributes; a (2*guard+1)^2 block around each is removed.
    """
    n_r, n_d = shape
    m = np.ones((n_r, n_d), dtype=bool)
    for det in detections:
        r0 = max(det.range_bin - guard, 0)
        r1 = min(det.range_bin + guard + 1, n_r)
        d0 = max(det.doppler_bin - guard, 0)
        d1 = min(det.doppler_bin + guard + 1, n_d)
        m[r0:r1, d0:d1] = False
    if clutter_mask is not None:
        m &= ~clutter_mask
    return m
