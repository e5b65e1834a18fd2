import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from audiolog import synth
from audiolog.audio_io import AudioClip
from audiolog.dsp import BIN_HZ, N_BINS, frame_signal, stft
from audiolog.errors import AllFramesSilent, InsufficientVoicing, KeepTooLarge, TooFewFrames, ZeroAmplitudeFrame
from audiolog.features import lld, spectral, voice
from audiolog.features.pitch import PitchConfig, lag_range, track_pitch
from audiolog.features.vector import (
    CuratedFeatures,
    FeatureConfig,
    ZScaler,
    assemble_feature_vector,
    clip_features,
    compute_curated,
)

import oracles
from conftest import SR

N_RANDOM = 100


def point_mass(k, n=N_BINS):
    p = np.zeros(n)
    p[k] = 1.0
    return p


class TestPitch:
    def test_sawtooth_200hz(self):
        track = track_pitch(AudioClip(synth.sawtooth(200.0, 1.0, 0.5), SR))
        assert 198.0 <= np.median(track.voiced_f0) <= 202.0
        assert track.M == track.voiced.sum()
        np.testing.assert_allclose(track.voiced_periods, 1.0 / track.voiced_f0, rtol=1e-9)
        assert np.all((track.voiced_f0 >= 50) & (track.voiced_f0 <= 500))

    def test_white_noise_mostly_unvoiced(self):
        fractions = []
        for seed in range(20):
            x = np.random.default_rng(seed).standard_normal(SR // 2) * 0.3
            fractions.append(1.0 - track_pitch(AudioClip(x, SR)).voiced.mean())
        assert np.mean(fractions) >= 0.9

    def test_silence(self):
        track = track_pitch(AudioClip(np.zeros(SR), SR))
        assert track.M == 0
        assert not track.voiced.any()
        np.testing.assert_array_equal(track.f0_hz, 0.0)

    @pytest.mark.parametrize("f0", [80.0, 150.0, 310.0, 450.0])
    def test_tracks_across_range(self, f0):
        track = track_pitch(AudioClip(synth.sawtooth(f0, 0.5, 0.5), SR))
        assert np.median(track.voiced_f0) == pytest.approx(f0, rel=0.02)

    def test_lag_range(self):
        assert lag_range(SR, PitchConfig()) == (22, 221)


class TestVoiceQuality:
    def test_jitter_examples(self):
        assert voice.jitter_abs([0.005, 0.005, 0.005]) == 0.0
        assert voice.jitter_abs([0.005, 0.006]) == pytest.approx(0.0005, rel=1e-12)
        assert voice.jitter_abs([0.005, 0.006], divisor="M-1") == pytest.approx(0.001, rel=1e-12)
        assert voice.jitter_rel([0.005, 0.005]) == 0.0
        assert voice.jitter_rel([0.005, 0.006]) == pytest.approx(20.0, rel=1e-12)

    def test_shimmer_examples(self):
        assert voice.shimmer_from_amplitudes([0.3, 0.3, 0.3]) == 0.0
        assert voice.shimmer_from_amplitudes([1.0, 0.1]) == pytest.approx(10.0, rel=1e-12)

    def test_freq_modulation_examples(self):
        assert voice.freq_modulation([200.0, 200.0]) == 0.0
        assert voice.freq_modulation([100.0, 300.0]) == pytest.approx(0.5, rel=1e-12)

    def test_freq_range_examples(self):
        assert voice.freq_range([200.0] * 10) == 0.0
        assert voice.freq_range(np.arange(100, 200, dtype=float)) == pytest.approx(89.1, rel=1e-12)

    def test_hnr_examples(self):
        assert voice.hnr_db(0.5) == pytest.approx(0.0, abs=1e-12)
        assert voice.hnr_db(0.9) == pytest.approx(10 * math.log10(9), rel=1e-12)
        assert voice.hnr_db(0.9) == pytest.approx(9.542, abs=5e-4)
        assert voice.hnr_db(1.0) == pytest.approx(10 * math.log10((1 - 1e-6) / 1e-6), rel=1e-9)

    def test_sine_hnr_is_high(self):
        clip = AudioClip(synth.tone(200.0, 1.0, 0.5), SR)
        track = track_pitch(clip)
        assert np.all(voice.frame_hnr(clip, track) >= 30.0)
        mean, std = voice.hnr_segmental(clip, track)
        assert mean >= 30.0 and std >= 0.0

    def test_oracles_on_random_tracks(self):
        r = np.random.default_rng(1)
        for _ in range(N_RANDOM):
            m = int(r.integers(2, 120))
            periods = r.uniform(1 / 500, 1 / 50, m)
            amps = r.uniform(0.01, 1.0, m)
            f0 = 1.0 / periods
            for div in ("M", "M-1"):
                want_j = oracles.jitter_abs(list(periods), div)
                want_s = oracles.shimmer(list(amps), div)
                assert voice.jitter_abs(periods, div) == pytest.approx(want_j, rel=1e-12)
                assert voice.shimmer_from_amplitudes(amps, div) == pytest.approx(want_s, rel=1e-12)
            assert voice.jitter_rel(periods) == pytest.approx(oracles.jitter_rel(list(periods)), rel=1e-12)
            assert voice.freq_modulation(f0) == pytest.approx(oracles.freq_modulation(list(f0)), rel=1e-12)
            assert voice.freq_range(f0) == pytest.approx(oracles.freq_range(list(f0)), rel=1e-9, abs=1e-9)
            rr = float(r.uniform(-0.5, 1.5))
            assert voice.hnr_db(rr) == pytest.approx(oracles.hnr(rr), rel=1e-12, abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(1e-3, 2e-2), min_size=2, max_size=40), st.floats(0.1, 10.0))
    def test_scale_invariance(self, periods, k):
        p = np.array(periods)
        assert voice.jitter_rel(k * p) == pytest.approx(voice.jitter_rel(p), rel=1e-9, abs=1e-12)
        assert voice.freq_modulation(k / p) == pytest.approx(voice.freq_modulation(1 / p), rel=1e-9, abs=1e-12)
        want = voice.shimmer_from_amplitudes(p)
        assert voice.shimmer_from_amplitudes(k * p) == pytest.approx(want, rel=1e-9, abs=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(50.0, 500.0), min_size=1, max_size=40))
    def test_freq_modulation_in_unit_interval(self, f0):
        assert 0.0 <= voice.freq_modulation(f0) < 1.0

    def test_errors(self):
        with pytest.raises(InsufficientVoicing):
            voice.jitter_abs([0.005])
        with pytest.raises(InsufficientVoicing):
            voice.freq_modulation([])
        with pytest.raises(ZeroAmplitudeFrame):
            voice.shimmer_from_amplitudes([0.5, 0.0])
        with pytest.raises(ValueError):
            voice.jitter_abs([0.005, 0.006], divisor="N")


class TestSpectral:
    def test_centroid_examples(self):
        assert spectral.spectral_centroid(point_mass(5)) == 5.0
        mag = np.zeros(N_BINS)
        mag[[2, 4]] = 1.0
        assert spectral.spectral_centroid(mag) == 3.0

    def test_flux_examples(self):
        same = np.tile(np.linspace(0, 1, N_BINS), (6, 1))
        assert spectral.spectral_flux(same) == 0.0
        alt = np.array([point_mass(3 + 4 * (t % 2)) for t in range(6)])
        assert spectral.spectral_flux(alt) == pytest.approx(math.sqrt(2), rel=1e-12)
        with pytest.raises(TooFewFrames):
            spectral.spectral_flux(point_mass(1))

    def test_entropy_examples(self):
        assert spectral.spectral_entropy(point_mass(40)) == 0.0
        assert spectral.spectral_entropy(np.ones(N_BINS)) == pytest.approx(1.0, rel=1e-12)
        two = np.zeros(N_BINS)
        two[[10, 20]] = 3.0
        assert spectral.spectral_entropy(two) == pytest.approx(math.log(2) / math.log(257), rel=1e-12)
        assert spectral.spectral_entropy(two) == pytest.approx(0.1249, abs=5e-5)

    def test_flatness_examples(self):
        assert spectral.spectral_flatness(np.full(N_BINS, 0.7)) == pytest.approx(1.0, rel=1e-12)
        assert spectral.spectral_flatness(point_mass(9)) < 1e-9

    def test_flatness_noise_vs_tone(self, rng):
        noise = stft(frame_signal(AudioClip(0.3 * rng.standard_normal(SR), SR), "hann"))
        tone = stft(frame_signal(AudioClip(synth.tone(1000.0, 1.0, 0.5), SR), "hann"))
        assert spectral.spectral_flatness(noise) >= 0.5
        assert spectral.spectral_flatness(tone) <= 0.1

    def test_sharpness_point_masses(self):
        for z, want in ((10, 1.1), (2, 0.22)):
            loud = np.zeros(24)
            loud[z - 1] = 1.0
            assert spectral.sharpness_from_loudness(loud)[0] == pytest.approx(want, rel=1e-12)
        # a single FFT bin inside Bark band [9, 10) yields the same value through the full path
        k = int(np.flatnonzero(np.floor(spectral.bark(np.arange(N_BINS) * BIN_HZ)) == 9)[0])
        assert spectral.sharpness_acum(point_mass(k)) == pytest.approx(1.1, rel=1e-12)

    def test_sharpness_flat_loudness(self):
        got = spectral.sharpness_from_loudness(np.ones(24))[0]
        assert got == pytest.approx(oracles.sharpness_from_loudness([1.0] * 24), rel=1e-12)

    def test_all_silent(self):
        s = spectral
        for fn in (s.spectral_centroid, s.spectral_entropy, s.spectral_flatness, s.sharpness_acum):
            with pytest.raises(AllFramesSilent):
                fn(np.zeros((3, N_BINS)))

    def test_silent_frames_skipped(self):
        power = np.vstack([np.zeros(N_BINS), point_mass(5), np.zeros(N_BINS)])
        assert spectral.spectral_centroid(power) == 5.0
        assert spectral.spectral_entropy(power) == 0.0

    def test_oracles_on_random_spectra(self):
        r = np.random.default_rng(2)
        for _ in range(N_RANDOM):
            power = r.exponential(1.0, N_BINS) * (r.random(N_BINS) < 0.8)
            prev = r.exponential(1.0, N_BINS)
            mag = np.sqrt(power)
            assert spectral.centroid_per_frame(mag)[0] == pytest.approx(oracles.centroid(list(mag)), rel=1e-9)
            assert spectral.entropy_per_frame(power)[0] == pytest.approx(oracles.entropy(list(power)), rel=1e-9)
            assert spectral.flatness_per_frame(power)[0] == pytest.approx(oracles.flatness(list(power)), rel=1e-9)
            assert spectral.flux_per_frame(np.vstack([prev, power]))[1] == pytest.approx(
                oracles.flux(list(prev), list(power)), rel=1e-9
            )
            assert spectral.sharpness_per_frame(power)[0] == pytest.approx(oracles.sharpness(list(power)), rel=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**16))
    def test_unit_interval(self, seed):
        power = np.random.default_rng(seed).exponential(1.0, (4, N_BINS))
        for fn in (spectral.entropy_per_frame, spectral.flatness_per_frame):
            v = fn(power)
            assert np.all((v >= 0) & (v <= 1))


class TestLld:
    def test_columns_and_functionals(self, rng):
        m = lld.extract_lld(AudioClip(0.2 * rng.standard_normal(SR), SR))
        assert m.frames.shape == (97, len(lld.LLD_COLUMNS)) == (97, 21)
        assert m.functionals.size == 21 * 5
        assert np.all(np.isfinite(m.functionals))
        for c in lld.LLD_COLUMNS:
            assert m.functional(c, "range") == pytest.approx(m.functional(c, "max") - m.functional(c, "min"), abs=1e-12)
            np.testing.assert_allclose(m.functional(c, "mean"), m.column(c).mean(), rtol=1e-12, atol=1e-15)

    def test_silence(self):
        m = lld.extract_lld(AudioClip(np.zeros(SR), SR))
        np.testing.assert_array_equal(m.column("energy"), 0.0)
        floor_c0 = math.sqrt(26) * math.log(lld.LOG_FLOOR)
        np.testing.assert_allclose(m.column("mfcc_0"), floor_c0, rtol=1e-12)
        np.testing.assert_array_equal(m.column("f0"), 0.0)

    def test_mel_bank_matches_direct_triangles(self, rng):
        for _ in range(20):
            power = rng.exponential(1.0, N_BINS)
            np.testing.assert_allclose(
                power @ lld.mel_filterbank().T, oracles.mel_filter_response(list(power)), rtol=1e-9
            )

    def test_mel_peak_for_1khz_tone(self):
        clip = AudioClip(synth.tone(1000.0, 0.5, 0.5), SR)
        frames = frame_signal(clip, "hann").frames
        power = np.abs(np.fft.rfft(frames[2], 512)) ** 2
        response = np.array(oracles.mel_filter_response(list(power)))
        bank = lld.mel_filterbank()
        k = int(round(1000.0 / BIN_HZ))
        assert int(np.argmax(response)) == int(np.argmax(bank[:, k]))
        np.testing.assert_allclose(power @ bank.T, response, rtol=1e-9)

    def test_zcr(self):
        frames = np.array([[1.0, -1.0, 1.0, -1.0, 1.0], [1.0, 1.0, 1.0, 1.0, 1.0]])
        np.testing.assert_array_equal(lld.zero_crossing_rate(frames), [1.0, 0.0])


class TestFeatureVector:
    def test_dimension_and_keep(self, rng):
        clip = AudioClip(synth.sawtooth(150.0, 1.0, 0.4) + 0.01 * rng.standard_normal(SR), SR)
        fv, curated, m = clip_features(clip)
        assert len(fv) == 105 + 12
        assert fv.names[-12:] == tuple(CuratedFeatures.names())
        fv10, _, _ = clip_features(clip, FeatureConfig(keep=10))
        assert len(fv10) == 22
        np.testing.assert_array_equal(fv10.values[:10], fv.values[:10])
        with pytest.raises(KeepTooLarge):
            assemble_feature_vector(curated, m, keep=106)

    def test_full_keep_is_invertible(self, rng):
        clip = AudioClip(synth.sawtooth(150.0, 1.0, 0.4), SR)
        fv, curated, m = clip_features(clip)
        from audiolog.dsp import idct_2

        np.testing.assert_allclose(idct_2(fv.values[:105]), m.functionals, atol=1e-9 * np.abs(m.functionals).max())
        np.testing.assert_array_equal(fv.values[105:], curated.as_vector())

    def test_identical_clips_identical_vectors(self):
        a = clip_features(synth.mood_clip("sing", "indoor", seed=4))[0]
        b = clip_features(synth.mood_clip("sing", "indoor", seed=4))[0]
        np.testing.assert_array_equal(a.values, b.values)

    def test_curated_ranges(self):
        c = compute_curated(synth.mood_clip("cry", "outdoor", seed=5))
        assert 0 <= c.freq_modulation <= 1
        assert 0 <= c.spectral_entropy <= 1
        assert 0 <= c.spectral_flatness <= 1
        assert np.all(np.isfinite(c.as_vector()))
        assert c.spectral_centroid_hz == pytest.approx(c.spectral_centroid * BIN_HZ)

    def test_silence_flags_instead_of_failing(self):
        c = compute_curated(AudioClip(np.zeros(SR), SR))
        np.testing.assert_array_equal(c.as_vector(), 0.0)
        assert any("jitter_abs_s" in f for f in c.flags)
        assert any("spectral_centroid" in f for f in c.flags)

    def test_shift_stability(self):
        x = synth.sawtooth(180.0, 2.0, 0.5)
        x = x + 0.02 * np.random.default_rng(0).standard_normal(x.size)
        a = compute_curated(AudioClip(x[:-110], SR)).as_vector()
        b = compute_curated(AudioClip(x[110:], SR)).as_vector()
        names = CuratedFeatures.names()
        for n, u, v in zip(names, a, b):
            scale = max(abs(u), abs(v))
            if scale > 1e-6:
                assert abs(u - v) / scale < 0.05, n


class TestZScaler:
    def test_normalised_columns(self, rng):
        x = rng.normal(5.0, 3.0, (40, 7))
        x[:, 3] = 2.0  # constant column keeps unit scale
        z = ZScaler().fit_transform(x)
        np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=1e-9)
        sd = z.std(axis=0)
        np.testing.assert_allclose(np.delete(sd, 3), 1.0, atol=1e-9)
        np.testing.assert_array_equal(z[:, 3], 0.0)
