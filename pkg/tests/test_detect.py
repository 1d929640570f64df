import numpy as np
import pytest

from aesa_chain import (ArrayGeometry, ConfigError, CovarianceEstimate,
                        EstimationError, GroundTruthTrack, MusicSpectrum,
                        RadarParams, angular_error, ca_cfar_threshold_factor,
                        cfar_detect, load_tracks, music_spectrum, pick_peaks,
                        rd_map, select_training_subset, simulate_dwell,
                        subarray_steering, target_angular_span)

from helpers import cfar_oracle, music_spectrum_oracle

GEOM = ArrayGeometry.demonstrator()
SMALL = RadarParams(r_min=1500.0, r_max=2100.0, n_pulses=64)


def test_threshold_factor_closed_form():
    n = 32
    assert ca_cfar_threshold_factor(1e-4, n) == pytest.approx(n * (1e-4 ** (-1 / n) - 1))
    # more training cells means a tighter threshold at fixed pfa
    assert ca_cfar_threshold_factor(1e-4, 64) < ca_cfar_threshold_factor(1e-4, 16)
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            ca_cfar_threshold_factor(bad, 32)
    with pytest.raises(ValueError):
        ca_cfar_threshold_factor(1e-4, 0)


def test_cfar_matches_loop_oracle():
    for seed in (0, 1, 2):
        rng = np.random.default_rng(seed)
        p = rng.exponential(size=(40, 12))
        dets = cfar_detect(p, pfa=0.05, n_train=4, n_guard=1)
        got = {(d.range_bin, d.doppler_bin) for d in dets}
        assert got == cfar_oracle(p, 0.05, 4, 1)
        powers = [d.peak_power_db for d in dets]
        assert powers == sorted(powers, reverse=True)


def test_cfar_scale_invariance():
    rng = np.random.default_rng(3)
    p = rng.exponential(size=(60, 8))
    a = cfar_detect(p, pfa=0.01, n_train=6, n_guard=1)
    b = cfar_detect(1000.0 * p, pfa=0.01, n_train=6, n_guard=1)
    assert [(d.range_bin, d.doppler_bin) for d in a] == \
           [(d.range_bin, d.doppler_bin) for d in b]
    assert b[0].peak_power_db - a[0].peak_power_db == pytest.approx(30.0)


def test_cfar_edge_rows_not_evaluated():
    p = np.ones((100, 4))
    p[2, 1] = 1e6
    assert cfar_detect(p, pfa=1e-4) == []  # inside the half-window margin
    p = np.ones((100, 4))
    p[50, 1] = 1e6
    dets = cfar_detect(p, pfa=1e-4)
    assert [(d.range_bin, d.doppler_bin) for d in dets] == [(50, 1)]


def test_cfar_requires_strict_local_maximum():
    p = np.ones((100, 4))
    p[50, 1] = p[50, 2] = 1e6  # tied neighbours mask each other
    assert cfar_detect(p, pfa=1e-4) == []


def test_cfar_annotation_and_validation():
    p = np.ones((100, 4))
    p[50, 1] = 1e6
    det = cfar_detect(p, pfa=1e-4, range_axis=np.arange(100.0) * 10,
                      velocity_axis=np.arange(4.0))[0]
    assert det.range_m == 500.0 and det.radial_velocity == 1.0
    assert det.peak_power_db == pytest.approx(60.0)
    assert np.isnan(cfar_detect(p, pfa=1e-4)[0].range_m)
    with pytest.raises(ValueError):
        cfar_detect(np.ones((4, 4, 4)), pfa=1e-4)
    with pytest.raises(ValueError):
        cfar_detect(np.full((100, 4), np.nan), pfa=1e-4)
    with pytest.raises(ValueError):
        cfar_detect(-p, pfa=1e-4)
    with pytest.raises(ConfigError):
        cfar_detect(p, pfa=1e-4, n_train=0)
    with pytest.raises(ConfigError, match="exceeds"):
        cfar_detect(np.ones((20, 4)), pfa=1e-4, n_train=16, n_guard=2)


def test_cfar_false_alarm_rate_smoke():
    rng = np.random.default_rng(7)
    p = rng.exponential(size=(5000, 32))
    dets = cfar_detect(p, pfa=1e-3, n_train=16, n_guard=2)
    evaluated = (5000 - 2 * 18) * 32
    rate = len(dets) / evaluated
    assert 0.7e-3 < rate < 1.4e-3


def _detection(rbin, dbin):
    from aesa_chain import Detection

    return Detection(range_bin=rbin, doppler_bin=dbin, range_m=0.0,
                     radial_velocity=0.0, peak_power_db=0.0, threshold_db=0.0)


def test_select_training_subset_counts():
    rd = rd_map(simulate_dwell(SMALL, [], noise_power=1.0, seed=0))
    det = _detection(100, 30)
    assert select_training_subset(rd, det, window=(10, 10)).shape == (6, 441)
    assert select_training_subset(rd, det, window=(10, 10), guard=(3, 3)).shape[1] == 392
    clutter = np.zeros((SMALL.n_range_bins, 64), dtype=bool)
    clutter[95:106, :] = True
    snaps = select_training_subset(rd, det, window=(10, 10), guard=(3, 3),
                                   clutter_mask=clutter)
    assert snaps.shape[1] == 392 - (11 * 21 - 7 * 7)
    edge = select_training_subset(rd, _detection(5, 2), window=(10, 10))
    assert edge.shape[1] == 16 * 13
    with pytest.raises(EstimationError):
        select_training_subset(rd, det, window=(1, 1))
    assert select_training_subset(rd, det, window=(1, 1), min_snapshots=5).shape[1] == 9
    with pytest.raises(ValueError):
        select_training_subset(rd, det, window=(-1, 2))


def two_source_covariance(az1=-5.0, az2=8.0, p=100.0, noise=1.0):
    v1 = subarray_steering(GEOM, az1)
    v2 = subarray_steering(GEOM, az2)
    r = p * np.outer(v1, v1.conj()) + p * np.outer(v2, v2.conj()) + noise * np.eye(6)
    return CovarianceEstimate(matrix=r, snapshot_count=10**6, diagonal_loading=0.0)


def test_music_matches_subspace_oracle():
    cov = two_source_covariance()
    grid = np.arange(-20.0, 20.0, 0.25)
    spec = music_spectrum(cov, GEOM, grid, n_sources=2)
    ref = music_spectrum_oracle(cov.matrix, GEOM.wavelength, grid, 2)
    np.testing.assert_allclose(spec.values, ref, rtol=1e-6)


def test_music_recovers_two_sources():
    cov = two_source_covariance(az1=-5.0, az2=8.0)
    grid = np.arange(-22.5, 22.5001, 0.05)
    spec = music_spectrum(cov, GEOM, grid, n_sources=2)
    found = sorted(pick_peaks(spec, 2).azimuths)
    assert found[0] == pytest.approx(-5.0, abs=0.02)
    assert found[1] == pytest.approx(8.0, abs=0.02)


def test_music_source_count_validation():
    cov = two_source_covariance()
    for bad in (0, 6):
        with pytest.raises(ValueError):
            music_spectrum(cov, GEOM, np.arange(-5.0, 5.0), n_sources=bad)


def test_pick_peaks_parabolic_refinement_is_exact():
    grid = np.arange(-2.0, 2.01, 0.5)
    true_az = 0.37
    spec = MusicSpectrum(azimuth_deg=grid, values=5.0 - (grid - true_az) ** 2,
                         n_sources=1)
    peak = pick_peaks(spec, 1).peaks[0]
    assert peak.azimuth_deg == pytest.approx(true_az, abs=1e-12)


def test_pick_peaks_tie_break_and_completeness():
    grid = np.arange(-3.0, 3.5, 0.5)
    values = np.ones(grid.size)
    values[np.searchsorted(grid, -1.0)] = 5.0
    values[np.searchsorted(grid, 1.5)] = 5.0
    spec = MusicSpectrum(azimuth_deg=grid, values=values, n_sources=2)
    peaks = pick_peaks(spec, 2)
    assert peaks.azimuths[0] == pytest.approx(-1.0)  # tie goes to smaller |az|
    assert peaks.complete
    ramp = MusicSpectrum(azimuth_deg=grid, values=np.arange(grid.size, dtype=float),
                         n_sources=1)
    empty = pick_peaks(ramp, 1)
    assert empty.peaks == [] and not empty.complete
    with pytest.raises(ValueError):
        pick_peaks(spec, 0)
    with pytest.raises(ValueError):
        pick_peaks(MusicSpectrum(np.array([0.0, 1.0]), np.array([1.0, 2.0]), 1), 1)


def test_angular_error_wrapping():
    assert angular_error(5.3, 5.0) == pytest.approx(0.3)
    assert angular_error(-179.0, 179.0) == pytest.approx(2.0)
    assert angular_error(350.0, -10.0) == 0.0
    track = GroundTruthTrack("t0", "ship", 5000.0, 5.0, 90.0, 100.0, 10.0)
    assert angular_error(5.4, track) == pytest.approx(0.4)


def test_target_angular_span_hand_cases():
    track = GroundTruthTrack("t0", "ship", 5000.0, 0.0, 90.0, 100.0, 10.0)
    span = target_angular_span(track, radar_los_azimuth_deg=0.0)
    assert span.projected_m == pytest.approx(100.0)
    assert span.span_deg == pytest.approx(np.degrees(2 * np.arctan(0.01)), abs=1e-9)
    assert span.within_target is None
    # heading parallel to the line of sight: beam floors the projection
    parallel = GroundTruthTrack("t0", "ship", 5000.0, 0.0, 40.0, 100.0, 10.0)
    floored = target_angular_span(parallel, radar_los_azimuth_deg=40.0)
    assert floored.projected_m == pytest.approx(10.0)
    wide = target_angular_span(track, 0.0, angular_error_deg=1.19)
    assert wide.within_target is True
    assert target_angular_span(track, 0.0, angular_error_deg=1.21).within_target is False


def test_load_tracks_roundtrip(tmp_path):
    path = tmp_path / "tracks.csv"
    path.write_text(
        "timestamp,name,range_m,azimuth_deg,heading_deg,length_m,beam_m\n"
        "2025-07-08T09:12:00Z,Alpha,5000.0,5.0,36.0,93.0,16.0\n"
        "2025-07-08T09:15:00Z,Beta,8000.0,-3.0,120.0,171.0,28.0\n")
    tracks = load_tracks(path)
    assert [t.name for t in tracks] == ["Alpha", "Beta"]
    assert tracks[0].timestamp == "2025-07-08T09:12:00Z"
    assert tracks[1].range_m == 8000.0


def test_load_tracks_missing_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("timestamp,name,range_m,azimuth_deg,heading_deg,length_m\n"
                    "t0,Alpha,1.0,0.0,0.0,10.0\n")
    with pytest.raises(ConfigError, match="beam_m"):
        load_tracks(path)


def test_track_geometry_validation():
    with pytest.raises(ValueError):
        GroundTruthTrack("t0", "ship", 5000.0, 0.0, 90.0, 10.0, 20.0)
