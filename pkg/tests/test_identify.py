"""Unit tests for FRF estimation and Bode metrics."""

import numpy as np
import pytest
from scipy import signal as sig

from seakit import (
    FrfEstimate,
    RationalTF,
    bandwidth_3db,
    estimate_frf,
    frf_to_csv,
    loop_margins,
    phase_at,
)
from seakit.identify import _segment_length


def _lowpass(fc_hz: float, gain: float = 1.0) -> RationalTF:
    w0 = 2 * np.pi * fc_hz
    return RationalTF([gain * w0], [1.0, w0])


def _simulated_pair(tf: RationalTF, dt: float, n: int, seed: int):
    """White-noise input driven through tf via lsim."""
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(n)
    t = np.arange(n) * dt
    lti = sig.lti(tf.num.coeffs, tf.den.coeffs)
    _, y, _ = sig.lsim(lti, u, t)
    return u, y


def test_segment_length_rule():
    # largest power of two not exceeding 2n/9 keeps >= 8 half-overlap segments
    assert _segment_length(36) == 8
    assert _segment_length(4608) == 1024
    assert _segment_length(4607) == 512
    with pytest.raises(ValueError):
        _segment_length(35)


def test_frf_estimate_validation():
    f = np.array([1.0, 2.0])
    good = dict(
        freqs_hz=f,
        magnitude_db=np.zeros(2),
        phase_deg=np.zeros(2),
        coherence=np.ones(2),
    )
    FrfEstimate(**good)
    with pytest.raises(ValueError):
        FrfEstimate(**{**good, "magnitude_db": np.zeros(3)})
    with pytest.raises(ValueError):
        FrfEstimate(**{**good, "coherence": np.array([0.5, 1.5])})


def test_estimate_frf_recovers_known_response():
    tf = _lowpass(10.0)
    dt = 1e-3
    u, y = _simulated_pair(tf, dt, 60000, seed=5)
    freqs = np.logspace(np.log10(0.5), np.log10(40.0), 25)
    est = estimate_frf(u, y, dt, freqs)
    for f_hz, mag, ph, coh in zip(
        est.freqs_hz, est.magnitude_db, est.phase_deg, est.coherence
    ):
        val = tf(2j * np.pi * f_hz)
        assert coh > 0.95
        assert abs(mag - 20 * np.log10(abs(val))) < 0.3
        assert abs(ph - np.degrees(np.angle(val))) < 3.0


def test_estimate_frf_coherence_drops_with_output_noise():
    tf = _lowpass(10.0)
    dt = 1e-3
    u, y = _simulated_pair(tf, dt, 60000, seed=6)
    rng = np.random.default_rng(99)
    y_noisy = y + 0.5 * rng.standard_normal(len(y))
    freqs = np.array([1.0, 5.0, 20.0])
    clean = estimate_frf(u, y, dt, freqs)
    noisy = estimate_frf(u, y_noisy, dt, freqs)
    assert np.all(noisy.coherence < clean.coherence)
    assert np.all(noisy.coherence > 0.2)  # averaging keeps it usable


def test_estimate_frf_validation():
    dt = 1e-3
    rng = np.random.default_rng(0)
    u = rng.standard_normal(60000)
    y = u.copy()
    with pytest.raises(ValueError):
        estimate_frf(u, y[:-1], dt, np.array([1.0]))
    with pytest.raises(ValueError):
        estimate_frf(u, y, dt, np.array([2.0, 1.0]))  # not ascending
    with pytest.raises(ValueError):
        estimate_frf(u, y, dt, np.array([600.0]))  # beyond Nyquist
    with pytest.raises(ValueError, match="too short"):
        estimate_frf(u[:2000], y[:2000], dt, np.array([0.5]))
    # two periods fit but the frequency falls below the first Welch bin
    with pytest.raises(ValueError, match="resolvable"):
        estimate_frf(u, y, dt, np.array([0.05]))


def test_estimate_frf_rejects_unexcited_frequency():
    dt = 1e-3
    t = np.arange(60000) * dt
    u = np.sin(2 * np.pi * 5.0 * t)
    y = u.copy()
    with pytest.raises(ValueError, match="input power"):
        estimate_frf(u, y, dt, np.array([30.0]))


def test_bandwidth_on_first_order_lowpass():
    assert np.isclose(bandwidth_3db(_lowpass(1.0)), 1.0, rtol=1e-3)
    assert np.isclose(bandwidth_3db(_lowpass(12.0)), 12.0, rtol=1e-3)


def test_bandwidth_unity_reference():
    # DC gain 2: the unity-referenced -3 dB point sits at sqrt(7) f0
    tf = _lowpass(1.0, gain=2.0)
    assert np.isclose(bandwidth_3db(tf, dc_reference="unity"),
                      np.sqrt(7.0), rtol=1e-3)
    # already below the threshold at the low end of the sweep
    low = RationalTF([0.1], [1.0])
    assert bandwidth_3db(low, dc_reference="unity") == pytest.approx(1e-3)
    with pytest.raises(ValueError):
        bandwidth_3db(tf, dc_reference="nominal")


def test_bandwidth_requires_a_crossing():
    with pytest.raises(ValueError, match="never crosses"):
        bandwidth_3db(RationalTF([0.5], [1.0]))


def test_bandwidth_from_estimate_arrays():
    freqs = np.logspace(-1, 2, 400)
    mag = -20 * np.log10(np.sqrt(1 + (freqs / 10.0) ** 2))
    est = FrfEstimate(
        freqs_hz=freqs,
        magnitude_db=mag,
        phase_deg=np.zeros_like(freqs),
        coherence=np.ones_like(freqs),
    )
    assert np.isclose(bandwidth_3db(est), 10.0, rtol=1e-3)


def test_phase_at():
    integrator = RationalTF([1.0], [1.0, 0.0])
    assert np.isclose(phase_at(integrator, 1.0), -90.0, atol=1e-6)
    lag = phase_at(_lowpass(1.0), 1.0)
    assert np.isclose(lag, -45.0, atol=0.1)
    with pytest.raises(ValueError):
        phase_at(integrator, 1e6)


def test_loop_margins_classic_example():
    # L = 1 / (s (s+1)^2): gm = 6.02 dB at 1 rad/s, pm = 21.4 deg
    loop = RationalTF([1.0], [1.0, 2.0, 1.0, 0.0])
    gm, pm = loop_margins(loop)
    assert np.isclose(gm, 20 * np.log10(2.0), atol=0.05)
    assert np.isclose(pm, 21.39, atol=0.2)


def test_loop_margins_without_crossings():
    gm, pm = loop_margins(RationalTF([0.5], [1.0, 1.0]))
    assert gm == np.inf and pm == np.inf


def test_frf_to_csv_round_trip(tmp_path):
    freqs = np.logspace(0, 1, 7)
    est = FrfEstimate(
        freqs_hz=freqs,
        magnitude_db=-3.0 * np.arange(7.0),
        phase_deg=-15.0 * np.arange(7.0),
        coherence=np.linspace(1.0, 0.4, 7),
    )
    path = tmp_path / "frf.csv"
    frf_to_csv(est, str(path))
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "freq_hz,mag_db,phase_deg,coherence"
    data = np.genfromtxt(str(path), delimiter=",", skip_header=1)
    np.testing.assert_allclose(data[:, 0], est.freqs_hz, rtol=1e-8)
    np.testing.assert_allclose(data[:, 1], est.magnitude_db, rtol=1e-8)
    np.testing.assert_allclose(data[:, 2], est.phase_deg, rtol=1e-8)
    np.testing.assert_allclose(data[:, 3], est.coherence, rtol=1e-8)
