"""Unit tests for signal generation, the loop integrator, and trace analysis."""

import numpy as np
import pytest

from seakit import (
    ImpedanceScenario,
    LoadModel,
    NumericsError,
    PiController,
    SignalSpec,
    SimTrace,
    SynthesisWeights,
    TRACE_CHANNELS,
    TorqueLoopScenario,
    build_plant,
    default_params,
    fit_sine,
    generate,
    h2_synthesize,
    peak_envelope,
    rms_error,
    simulate_free_response,
    simulate_impedance,
    simulate_torque_loop,
    steady_state_error,
    torque_loop_maps,
    trace_to_csv,
)


@pytest.fixture(scope="module")
def model():
    return build_plant(default_params())


@pytest.fixture(scope="module")
def ctrl(model):
    return h2_synthesize(model.P, SynthesisWeights(rho=5e-4, lam=1.0, k=1.0))


# ---------------------------------------------------------------- signals


def test_signal_validation():
    with pytest.raises(ValueError):
        SignalSpec(kind="triangle")
    with pytest.raises(ValueError):
        SignalSpec.sine(1.0, 0.0)
    with pytest.raises(ValueError):
        SignalSpec.chirp(1.0, 5.0, 1.0, 10.0)  # f1 < f0
    with pytest.raises(ValueError):
        SignalSpec.chirp(1.0, 1.0, 5.0, 0.0)  # no sweep time
    with pytest.raises(ValueError):
        SignalSpec(kind="white_noise", variance=0.01)  # seed missing
    with pytest.raises(ValueError):
        SignalSpec.white_noise(-1.0, seed=3)
    with pytest.raises(ValueError):
        SignalSpec.piecewise_linear([(0.0, 1.0)])
    with pytest.raises(ValueError):
        SignalSpec.piecewise_linear([(0.0, 1.0), (0.0, 2.0)])


def test_generate_grid_and_formulas():
    dt = 1e-3
    x = generate(SignalSpec.sine(2.0, 5.0, offset=0.5), dt, 0.2)
    assert len(x) == 201
    t = np.arange(201) * dt
    np.testing.assert_allclose(x, 0.5 + 2.0 * np.sin(2 * np.pi * 5.0 * t))

    s = generate(SignalSpec.step(3.0, start_s=0.05), dt, 0.1)
    assert s[0] == 0.0 and s[49] == 0.0 and s[50] == 3.0 and s[-1] == 3.0

    pw = generate(SignalSpec.piecewise_linear([(0.0, 0.0), (0.1, 1.0)]), dt, 0.2)
    assert np.isclose(pw[50], 0.5)
    assert pw[-1] == 1.0  # held at the last breakpoint value

    with pytest.raises(ValueError):
        generate(SignalSpec.zero(), 0.0, 1.0)
    with pytest.raises(ValueError):
        generate(SignalSpec.zero(), 1e-3, -1.0)


def test_chirp_phase_continuity_and_hold():
    dt = 1e-4
    spec = SignalSpec.chirp(1.0, 1.0, 5.0, 2.0)
    x = generate(spec, dt, 3.0)
    # no sample-to-sample jump can exceed the f1 slew rate
    assert np.max(np.abs(np.diff(x))) <= 2 * np.pi * 5.0 * dt * 1.01
    # past the sweep the frequency holds at f1 with continuous phase
    t = np.arange(len(x)) * dt
    end_phase = 2 * np.pi * (1.0 * 2.0 + 0.5 * 2.0 * 2.0**2)
    late = t > 2.0
    np.testing.assert_allclose(
        x[late], np.sin(end_phase + 2 * np.pi * 5.0 * (t[late] - 2.0)), atol=1e-12
    )


def test_white_noise_seeding():
    spec = SignalSpec.white_noise(0.01, seed=42)
    a = generate(spec, 1e-3, 1.0)
    b = generate(spec, 1e-3, 1.0)
    np.testing.assert_array_equal(a, b)  # same seed, same draw
    c = generate(SignalSpec.white_noise(0.01, seed=43), 1e-3, 1.0)
    assert not np.array_equal(a, c)
    assert abs(np.var(a) - 0.01) < 0.003


def test_pi_controller_validation_and_pair():
    with pytest.raises(ValueError):
        PiController(-1.0, 2.0)
    c1, c2 = PiController(204.0, 111.0).as_pair()
    assert c1 is c2
    assert np.isclose(c1(1j), 204.0 + 111.0 / 1j)


def test_load_model_validation():
    with pytest.raises(ValueError):
        LoadModel(j_l=0.0, b_l=0.1)
    LoadModel(j_l=0.0, b_l=-1.0, enabled=False)  # ignored when disabled


def test_scenario_validation(model, ctrl):
    with pytest.raises(ValueError):
        TorqueLoopScenario(model=model, controller=ctrl, dt_s=0.0)
    with pytest.raises(ValueError):
        TorqueLoopScenario(model=model, controller=ctrl, dt_s=1e-2, duration_s=0.05)
    with pytest.raises(ValueError):
        TorqueLoopScenario(model=model, controller=ctrl, saturation_rad_s=0.0)
    inner = TorqueLoopScenario(model=model, controller=ctrl,
                               reference=SignalSpec.constant(1.0))
    with pytest.raises(ValueError):
        ImpedanceScenario(torque_scenario=inner, i_d=10.0)
    with pytest.raises(ValueError):
        ImpedanceScenario(
            torque_scenario=TorqueLoopScenario(model=model, controller=ctrl),
            i_d=-1.0,
        )


# ---------------------------------------------------------------- integrator


def test_zero_inputs_give_zero_trace(model, ctrl):
    sc = TorqueLoopScenario(model=model, controller=ctrl, duration_s=0.1)
    trace = simulate_torque_loop(sc)
    for name in TRACE_CHANNELS:
        if name == "t":
            continue
        assert np.max(np.abs(trace.channel(name))) == 0.0


def test_trace_channel_identities(model, ctrl):
    sc = TorqueLoopScenario(
        model=model,
        controller=ctrl,
        reference=SignalSpec.sine(0.02, 2.0),
        noise=SignalSpec.white_noise(1e-6, seed=7),
        duration_s=0.5,
    )
    trace = simulate_torque_loop(sc)
    tau = trace.channel("tau_L")
    n = trace.channel("n")
    np.testing.assert_array_equal(trace.channel("y_meas"), tau + n)
    np.testing.assert_array_equal(trace.channel("e"), trace.channel("r") - tau)
    # noise is held per step, so the recorded channel is the seeded draw
    np.testing.assert_array_equal(n, generate(sc.noise, sc.dt_s, sc.duration_s))
    assert trace.n_samples == 5001
    with pytest.raises(KeyError):
        trace.channel("bogus")


def test_constant_reference_tracks_exactly(model, ctrl):
    sc = TorqueLoopScenario(
        model=model,
        controller=ctrl,
        reference=SignalSpec.constant(0.02),
        duration_s=2.0,
    )
    trace = simulate_torque_loop(sc)
    # unity DC reference gain: the error decays to integration noise
    assert abs(steady_state_error(trace)) < 1e-9
    assert abs(trace.channel("tau_L")[-1] - 0.02) < 1e-9


def test_sine_tracking_matches_reference_map(model, ctrl):
    g1, _ = torque_loop_maps(model, ctrl, with_compensator=False)
    sc = TorqueLoopScenario(
        model=model,
        controller=ctrl,
        reference=SignalSpec.sine(0.033, 2.0),
        duration_s=3.0,
    )
    trace = simulate_torque_loop(sc)
    amp, phase_deg, _ = fit_sine(trace.t, trace.channel("tau_L"), 2.0, from_t=1.5)
    val = g1(2j * np.pi * 2.0)
    assert np.isclose(amp, 0.033 * abs(val), rtol=1e-2)
    assert abs(phase_deg - np.degrees(np.angle(val))) < 1.0


def test_saturation_clamps_velocity_command(model, ctrl):
    sc = TorqueLoopScenario(
        model=model,
        controller=ctrl,
        reference=SignalSpec.step(1.0),
        duration_s=0.2,
    )
    trace = simulate_torque_loop(sc)
    w = trace.channel("omega_d")
    u = trace.channel("u_presat")
    assert np.max(u) > 50.0  # the raw command does exceed the limit
    assert np.max(w) == 50.0  # clamp hits the bound exactly
    assert np.all(np.abs(w) <= 50.0)
    clipped = np.abs(u) <= 50.0
    np.testing.assert_array_equal(w[clipped], u[clipped])


@pytest.mark.filterwarnings("ignore:overflow:RuntimeWarning")
@pytest.mark.filterwarnings("ignore:invalid value:RuntimeWarning")
def test_divergence_raises_with_sample_index(model):
    from seakit import RationalTF

    # a feedback block with a pole at -1e9 sits far outside the RK4
    # stability region at this step size; any nonzero torque makes its
    # state blow up within a handful of steps
    fast = RationalTF([1e9], [1.0, 1e9])
    sc = TorqueLoopScenario(
        model=model,
        controller=(RationalTF([1.0], [1.0, 1.0]), fast),
        reference=SignalSpec.step(1.0),
        duration_s=0.05,
    )
    with pytest.raises(NumericsError, match="sample"):
        simulate_torque_loop(sc)


def test_feedforward_does_not_touch_disturbance_response(model, ctrl):
    """Replacing C1 must leave every d- and n-driven channel bit-identical."""
    from seakit import RationalTF

    def run(c1):
        sc = TorqueLoopScenario(
            model=model,
            controller=(c1, ctrl.c2),
            disturbance=SignalSpec.white_noise(0.5, seed=11),
            noise=SignalSpec.white_noise(1e-6, seed=12),
            duration_s=0.5,
        )
        return simulate_torque_loop(sc)

    a = run(ctrl.c1)
    b = run(RationalTF([5.0, 1.0], [1.0, 2.0, 7.0]))
    for name in ("tau_L", "y_meas", "omega_d", "u_presat", "e"):
        np.testing.assert_array_equal(a.channel(name), b.channel(name))


def test_impedance_reference_channel(model, ctrl):
    inner = TorqueLoopScenario(
        model=model,
        controller=ctrl,
        handle_motion=SignalSpec.sine(0.5, 2.0),
        duration_s=1.0,
    )
    sc = ImpedanceScenario(
        torque_scenario=inner, i_d=0.5, phi_ref=SignalSpec.constant(0.1)
    )
    trace = simulate_impedance(sc)
    phi = generate(inner.handle_motion, inner.dt_s, inner.duration_s)
    np.testing.assert_allclose(
        trace.channel("r"), 0.5 * (0.1 - phi), rtol=0, atol=1e-12
    )
    with pytest.raises(ValueError):
        simulate_impedance(ImpedanceScenario(torque_scenario=inner, i_d=0.0))


def test_free_response_detached_actuator(model, ctrl):
    inner = TorqueLoopScenario(model=model, controller=ctrl, duration_s=0.5)
    sc = ImpedanceScenario(torque_scenario=inner, i_d=0.0)
    trace = simulate_free_response(sc, LoadModel(), phi0=0.3)
    np.testing.assert_array_equal(trace.channel("phi_L"), np.full(5001, 0.3))
    assert np.max(np.abs(trace.channel("tau_L"))) == 0.0


def test_free_response_virtual_spring_pulls_load_back(model, ctrl):
    inner = TorqueLoopScenario(
        model=model, controller=ctrl, dt_s=2e-4, duration_s=4.0
    )
    sc = ImpedanceScenario(torque_scenario=inner, i_d=0.5)
    trace = simulate_free_response(sc, LoadModel(), phi0=0.3)
    phi = trace.channel("phi_L")
    assert phi[0] == 0.3
    assert abs(phi[-1]) < 0.15  # decayed toward phi_ref = 0
    # restoring torque starts negative: the spring pulls the load down
    assert trace.channel("r")[0] == -0.5 * 0.3


def test_free_response_validation(model, ctrl):
    inner = TorqueLoopScenario(model=model, controller=ctrl, duration_s=0.5)
    sc = ImpedanceScenario(torque_scenario=inner, i_d=0.5)
    with pytest.raises(ValueError):
        simulate_free_response(sc, LoadModel(enabled=False), phi0=0.1)
    moving = TorqueLoopScenario(
        model=model,
        controller=ctrl,
        handle_motion=SignalSpec.sine(0.1, 1.0),
        duration_s=0.5,
    )
    with pytest.raises(ValueError):
        simulate_free_response(
            ImpedanceScenario(torque_scenario=moving, i_d=0.5),
            LoadModel(),
            phi0=0.1,
        )


# ---------------------------------------------------------------- analysis


def _trace_with_error(e: np.ndarray, dt: float = 0.01) -> SimTrace:
    t = np.arange(len(e)) * dt
    z = np.zeros_like(e)
    ch = {name: z.copy() for name in TRACE_CHANNELS}
    ch["t"] = t
    ch["e"] = np.asarray(e, float)
    return SimTrace(dt_s=dt, channels=ch)


def test_rms_and_steady_state_error():
    e = np.concatenate([np.full(50, 3.0), np.full(50, 1.0)])
    trace = _trace_with_error(e)
    np.testing.assert_allclose(rms_error(trace), np.sqrt(5.0))
    np.testing.assert_allclose(rms_error(trace, from_t=0.5), 1.0)
    np.testing.assert_allclose(steady_state_error(trace), 1.0)
    with pytest.raises(ValueError):
        rms_error(trace, from_t=10.0)


def test_peak_envelope():
    t = np.arange(0, 3.0, 1e-3)
    trace = _trace_with_error(np.sin(2 * np.pi * t), dt=1e-3)
    times, vals = peak_envelope(trace, "e")
    assert len(times) == 3
    np.testing.assert_allclose(times, [0.25, 1.25, 2.25], atol=2e-3)
    np.testing.assert_allclose(vals, 1.0, rtol=1e-5)


def test_fit_sine_recovers_parameters():
    t = np.arange(0, 2.0, 1e-3)
    x = 0.7 * np.sin(2 * np.pi * 3.0 * t + np.radians(30.0)) + 0.2
    amp, phase_deg, offset = fit_sine(t, x, 3.0)
    assert np.isclose(amp, 0.7, rtol=1e-9)
    assert np.isclose(phase_deg, 30.0, atol=1e-7)
    assert np.isclose(offset, 0.2, atol=1e-9)
    with pytest.raises(ValueError):
        fit_sine(t, x, 3.0, from_t=5.0)


def test_trace_to_csv_format(tmp_path, model, ctrl):
    sc = TorqueLoopScenario(
        model=model,
        controller=ctrl,
        reference=SignalSpec.sine(0.01, 2.0),
        dt_s=1e-3,
        duration_s=0.05,
    )
    trace = simulate_torque_loop(sc)
    path = tmp_path / "trace.csv"
    trace_to_csv(trace, str(path))
    raw = path.read_bytes()
    assert b"\r" not in raw  # LF endings only
    lines = raw.decode().splitlines()
    assert lines[0] == ",".join(TRACE_CHANNELS)
    assert len(lines) == trace.n_samples + 1
    data = np.genfromtxt(str(path), delimiter=",", skip_header=1)
    for j, name in enumerate(TRACE_CHANNELS):
        np.testing.assert_allclose(data[:, j], trace.channel(name), rtol=1e-8,
                                   atol=1e-12)
