"""Deterministic fixed-step simulation of the closed torque and impedance loops.

The interconnection integrated here is the one the controller is designed
for: u = C1 r - C2 (tau_L + n), the motor velocity command is saturated,
omega_d = clamp(u + d, +-sat), the plant responds with tau_L through P
(from omega_d) plus G (from load motion phi_L), and in impedance mode the
torque reference is tau_d = I_d (phi_ref - phi_L), optionally corrected by
the load-motion compensator C_L.

All linear blocks are realized individually (controllable canonical form
of their minimal forms) and advanced together by a fixed-step classical
Runge-Kutta integrator.  The saturation is the only nonlinearity and is
applied to the scalar velocity command at every stage.  Deterministic
inputs are sampled on the half-step grid the integrator needs; seeded
noise is held constant across each step (zero-order hold).

Everything is deterministic: same scenario, same trace, bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericsError
from .plant import SeaModel
from .synthesis import TwoDofController, build_compensator, _controller_pair
from .transfer import RationalTF, to_state_space, minimal_form

__all__ = [
    "SignalSpec",
    "generate",
    "PiController",
    "TorqueLoopScenario",
    "ImpedanceScenario",
    "LoadModel",
    "SimTrace",
    "TRACE_CHANNELS",
    "simulate_torque_loop",
    "simulate_impedance",
    "simulate_free_response",
    "rms_error",
    "steady_state_error",
    "peak_envelope",
    "fit_sine",
    "trace_to_csv",
]

_KINDS = (
    "constant",
    "sine",
    "chirp",
    "step",
    "white_noise",
    "piecewise_linear",
    "zero",
)


@dataclass(frozen=True)
class SignalSpec:
    """Declarative description of one scalar excitation.

    kind selects the generator; the remaining fields are read only where
    they make sense for that kind (amplitude and offset nearly always,
    frequency_hz for sine, the f0/f1/sweep triple for chirp, start_s for
    step, variance and seed for white_noise, breakpoints for
    piecewise_linear).  Instances are immutable and hashable so scenarios
    can be compared and reused.
    """

    kind: str
    amplitude: float = 0.0
    frequency_hz: float = 0.0
    f0_hz: float = 0.0
    f1_hz: float = 0.0
    sweep_s: float = 0.0
    offset: float = 0.0
    start_s: float = 0.0
    variance: float = 0.0
    seed: int | None = None
    breakpoints: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown signal kind {self.kind!r}")
        if self.kind == "sine" and not self.frequency_hz > 0.0:
            raise ValueError("sine requires frequency_hz > 0")
        if self.kind == "chirp":
            if not (self.f1_hz >= self.f0_hz >= 0.0):
                raise ValueError("chirp requires f1_hz >= f0_hz >= 0")
            if not self.sweep_s > 0.0:
                raise ValueError("chirp requires sweep_s > 0")
        if self.kind == "white_noise":
            if self.variance < 0.0:
                raise ValueError("white_noise requires variance >= 0")
            if self.seed is None:
                raise ValueError("white_noise requires a seed")
        if self.kind == "step" and self.start_s < 0.0:
            raise ValueError("step requires start_s >= 0")
        if self.kind == "piecewise_linear":
            ts = [bp[0] for bp in self.breakpoints]
            if len(ts) < 2 or any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError(
                    "piecewise_linear requires >= 2 breakpoints with "
                    "strictly increasing times"
                )

    # Convenience constructors; keyword soup above is rarely typed by hand.
    @classmethod
    def zero(cls) -> "SignalSpec":
        return cls(kind="zero")

    @classmethod
    def constant(cls, value: float) -> "SignalSpec":
        return cls(kind="constant", amplitude=float(value))

    @classmethod
    def sine(
        cls, amplitude: float, frequency_hz: float, offset: float = 0.0
    ) -> "SignalSpec":
        return cls(
            kind="sine",
            amplitude=float(amplitude),
            frequency_hz=float(frequency_hz),
            offset=float(offset),
        )

    @classmethod
    def chirp(
        cls, amplitude: float, f0_hz: float, f1_hz: float, sweep_s: float
    ) -> "SignalSpec":
        return cls(
            kind="chirp",
            amplitude=float(amplitude),
            f0_hz=float(f0_hz),
            f1_hz=float(f1_hz),
            sweep_s=float(sweep_s),
        )

    @classmethod
    def step(cls, amplitude: float, start_s: float = 0.0) -> "SignalSpec":
        return cls(kind="step", amplitude=float(amplitude), start_s=float(start_s))

    @classmethod
    def white_noise(cls, variance: float, seed: int) -> "SignalSpec":
        return cls(kind="white_noise", variance=float(variance), seed=int(seed))

    @classmethod
    def piecewise_linear(
        cls, breakpoints: list[tuple[float, float]]
    ) -> "SignalSpec":
        return cls(
            kind="piecewise_linear",
            breakpoints=tuple((float(t), float(v)) for t, v in breakpoints),
        )


def _generate_n(spec: SignalSpec, dt_s: float, n: int) -> np.ndarray:
    """Sample a spec at n points spaced dt_s, starting at t = 0."""
    t = np.arange(n) * dt_s
    if spec.kind == "zero":
        return np.zeros(n)
    if spec.kind == "constant":
        return np.full(n, spec.amplitude + spec.offset)
    if spec.kind == "sine":
        return spec.offset + spec.amplitude * np.sin(
            2.0 * np.pi * spec.frequency_hz * t
        )
    if spec.kind == "chirp":
        # Linear instantaneous frequency f0 -> f1 over sweep_s, then held
        # at f1 with continuous phase.
        rate = (spec.f1_hz - spec.f0_hz) / spec.sweep_s
        phase = 2.0 * np.pi * (spec.f0_hz * t + 0.5 * rate * t * t)
        past = t > spec.sweep_s
        if np.any(past):
            end_phase = 2.0 * np.pi * (
                spec.f0_hz * spec.sweep_s + 0.5 * rate * spec.sweep_s**2
            )
            phase[past] = end_phase + 2.0 * np.pi * spec.f1_hz * (
                t[past] - spec.sweep_s
            )
        return spec.offset + spec.amplitude * np.sin(phase)
    if spec.kind == "step":
        return spec.offset + np.where(t >= spec.start_s, spec.amplitude, 0.0)
    if spec.kind == "white_noise":
        rng = np.random.default_rng(spec.seed)
        return spec.offset + math.sqrt(spec.variance) * rng.standard_normal(n)
    if spec.kind == "piecewise_linear":
        xs = np.array([bp[0] for bp in spec.breakpoints])
        ys = np.array([bp[1] for bp in spec.breakpoints])
        return spec.offset + np.interp(t, xs, ys)
    raise ValueError(f"unknown signal kind {spec.kind!r}")


def generate(spec: SignalSpec, dt_s: float, duration_s: float) -> np.ndarray:
    """Sample a signal spec on the uniform grid 0, dt_s, ..., duration_s.

    Returns round(duration_s / dt_s) + 1 samples.  White noise draws a
    fresh seeded generator on every call, so repeated calls agree.
    """
    if not dt_s > 0.0:
        raise ValueError("dt_s must be positive")
    if duration_s < 0.0:
        raise ValueError("duration_s must be nonnegative")
    return _generate_n(spec, dt_s, int(round(duration_s / dt_s)) + 1)


@dataclass(frozen=True)
class PiController:
    """Proportional-integral torque controller C = kp + ki/s.

    Runs in the same loop topology as the 2-DOF pair with C1 = C2 = C,
    so u = C (r - tau_L - n); comparisons against the 2-DOF design then
    differ in controller structure only.
    """

    kp: float
    ki: float

    def __post_init__(self):
        if self.kp < 0.0 or self.ki < 0.0:
            raise ValueError("PI gains must be nonnegative")

    def as_pair(self) -> tuple[RationalTF, RationalTF]:
        c = RationalTF([self.kp, self.ki], [1.0, 0.0])
        return c, c


@dataclass(frozen=True)
class LoadModel:
    """Inertia-damper load driven by the delivered torque.

    J_L phidd + b_L phid = tau_L.  Desk-scale defaults; the free-response
    acceptance on this model is qualitative (decay), never numeric.
    """

    j_l: float = 0.01
    b_l: float = 0.005
    enabled: bool = True

    def __post_init__(self):
        if self.enabled and (not self.j_l > 0.0 or self.b_l < 0.0):
            raise ValueError("enabled load requires j_l > 0 and b_l >= 0")


@dataclass(frozen=True)
class TorqueLoopScenario:
    """Everything one torque-loop run needs.

    reference is the torque command r in Nm; disturbance d enters the
    motor velocity command in rad/s; noise n corrupts the torque
    measurement in Nm; handle_motion is the exogenous load angle phi_L in
    rad.  The velocity command is clamped to +-saturation_rad_s.
    """

    model: SeaModel
    controller: object  # TwoDofController or PiController
    reference: SignalSpec = field(default_factory=SignalSpec.zero)
    disturbance: SignalSpec = field(default_factory=SignalSpec.zero)
    noise: SignalSpec = field(default_factory=SignalSpec.zero)
    handle_motion: SignalSpec = field(default_factory=SignalSpec.zero)
    compensator_on: bool = False
    saturation_rad_s: float = 50.0
    dt_s: float = 1e-4
    duration_s: float = 10.0

    def __post_init__(self):
        if not self.dt_s > 0.0:
            raise ValueError("dt_s must be positive")
        if self.duration_s < 10.0 * self.dt_s:
            raise ValueError("duration_s must cover at least 10 steps")
        if not self.saturation_rad_s > 0.0:
            raise ValueError("saturation_rad_s must be positive")


@dataclass(frozen=True)
class ImpedanceScenario:
    """Virtual spring closed around the torque loop.

    The torque reference becomes tau_d = i_d (phi_ref - phi_L); the inner
    torque scenario supplies everything else and must leave its own
    reference at zero.  i_d = 0 is allowed only for the free-response
    study, where it means the actuator is detached.
    """

    torque_scenario: TorqueLoopScenario
    i_d: float
    phi_ref: SignalSpec = field(default_factory=SignalSpec.zero)

    def __post_init__(self):
        if self.i_d < 0.0:
            raise ValueError("virtual stiffness i_d must be nonnegative")
        if self.torque_scenario.reference.kind != "zero":
            raise ValueError(
                "impedance mode derives the torque reference from "
                "i_d (phi_ref - phi_L); set the inner reference to zero"
            )


TRACE_CHANNELS = (
    "t",
    "r",
    "u_presat",
    "omega_d",
    "d",
    "n",
    "tau_L",
    "y_meas",
    "phi_L",
    "e",
)


@dataclass(frozen=True)
class SimTrace:
    """Uniformly sampled simulation record.

    channels holds equal-length arrays for: t, the torque reference r
    (tau_d in impedance mode), the pre-saturation velocity command
    u_presat = u + d, the saturated command omega_d, the injected d and
    n, the delivered torque tau_L, the measured torque y_meas = tau_L +
    n, the load angle phi_L, and the tracking error e = r - tau_L.
    """

    dt_s: float
    channels: dict[str, np.ndarray]

    def __post_init__(self):
        lengths = {len(v) for v in self.channels.values()}
        if len(lengths) != 1:
            raise ValueError("all trace channels must have equal length")

    def channel(self, name: str) -> np.ndarray:
        if name not in self.channels:
            raise KeyError(f"no channel {name!r}; have {sorted(self.channels)}")
        return self.channels[name]

    @property
    def t(self) -> np.ndarray:
        return self.channels["t"]

    @property
    def n_samples(self) -> int:
        return len(self.channels["t"])


class _Block:
    """One realized transfer function inside the loop.

    src names the scalar that drives the block at each stage.  Slices
    index into the combined state vector.
    """

    __slots__ = ("A", "B", "C", "D", "sl", "src")

    def __init__(self, tf: RationalTF, src: str, start: int):
        ss = to_state_space(minimal_form(tf))
        self.A = np.ascontiguousarray(ss.A)
        self.B = np.ascontiguousarray(ss.B)
        self.C = np.ascontiguousarray(ss.C)
        self.D = float(ss.D)
        self.sl = slice(start, start + ss.order)
        self.src = src

    @property
    def order(self) -> int:
        return self.B.shape[0]

    def out(self, x: np.ndarray) -> float:
        xv = x[self.sl]
        if xv.shape[0] == 0:
            return 0.0
        return float(self.C @ xv)


def _controller_blocks(controller) -> tuple[RationalTF, RationalTF]:
    if isinstance(controller, PiController):
        return controller.as_pair()
    return _controller_pair(controller)


def _sample_inputs(spec: SignalSpec, dt_s: float, nsteps: int):
    """Half-grid samples for smooth signals, per-step hold for noise.

    Returns (values, zoh) where zoh says how the integrator should index:
    held signals use the step index, smooth ones the half-step index.
    """
    if spec.kind == "white_noise":
        return _generate_n(spec, dt_s, nsteps + 1), True
    return _generate_n(spec, 0.5 * dt_s, 2 * nsteps + 1), False


def _simulate(
    sc: TorqueLoopScenario,
    r_series: np.ndarray | None = None,
    i_d_feedback: float = 0.0,
    load: LoadModel | None = None,
    phi0: float = 0.0,
) -> SimTrace:
    """Shared integrator behind the three simulate_* entry points.

    r_series, when given, replaces the scenario reference (impedance
    mode, sampled on the half grid).  i_d_feedback subtracts i_d * phi_L
    from that reference per stage when phi_L is a simulated state.  With
    a load model, handle motion is produced by the load dynamics instead
    of the handle_motion spec.
    """
    dt = sc.dt_s
    nsteps = int(round(sc.duration_s / dt))
    c1_tf, c2_tf = _controller_blocks(sc.controller)

    start = 0
    # Block order fixes the state layout; the feedforward block comes
    # last so its (identically zero) states cannot perturb anything when
    # the reference path is silent.
    plant = _Block(sc.model.P, "w", start)
    start += plant.order
    gblk = _Block(sc.model.G, "phi", start)
    start += gblk.order
    c2 = _Block(c2_tf, "y", start)
    start += c2.order
    comp = None
    if sc.compensator_on:
        comp = _Block(build_compensator(sc.model, (c1_tf, c2_tf)), "phi", start)
        start += comp.order
    sl_load = None
    if load is not None:
        sl_load = slice(start, start + 2)  # [phi_L, phi_L_dot]
        start += 2
    c1 = _Block(c1_tf, "re", start)
    start += c1.order
    nx = start

    if r_series is None:
        r_series, r_zoh = _sample_inputs(sc.reference, dt, nsteps)
    else:
        r_zoh = False
    d_series, d_zoh = _sample_inputs(sc.disturbance, dt, nsteps)
    n_series, n_zoh = _sample_inputs(sc.noise, dt, nsteps)
    if load is None:
        phi_series, phi_zoh = _sample_inputs(sc.handle_motion, dt, nsteps)
    else:
        phi_series, phi_zoh = None, False

    sat = sc.saturation_rad_s
    inv_jl = 1.0 / load.j_l if load is not None else 0.0
    bl = load.b_l if load is not None else 0.0

    rec = {name: np.empty(nsteps + 1) for name in TRACE_CHANNELS}
    rec["t"] = np.arange(nsteps + 1) * dt

    x = np.zeros(nx)
    if load is not None:
        x[sl_load.start] = phi0
    dx = np.empty(nx)

    blocks = [plant, gblk, c2, c1] + ([comp] if comp is not None else [])

    def stage(xs: np.ndarray, r_in: float, d_in: float, n_in: float,
              phi_in: float, out: np.ndarray, record_at: int | None) -> None:
        if load is not None:
            phi = xs[sl_load.start]
            phid = xs[sl_load.start + 1]
        else:
            phi = phi_in
        tau = plant.out(xs) + gblk.out(xs) + gblk.D * phi
        y = tau + n_in
        r_cmd = r_in - i_d_feedback * phi
        re = r_cmd
        if comp is not None:
            re = re - (comp.out(xs) + comp.D * phi)
        u = c1.out(xs) + c1.D * re - (c2.out(xs) + c2.D * y)
        u_presat = u + d_in
        w = u_presat
        if w > sat:
            w = sat
        elif w < -sat:
            w = -sat
        for blk, drive in (
            (plant, w),
            (gblk, phi),
            (c2, y),
            (c1, re),
        ):
            if blk.order:
                np.matmul(blk.A, xs[blk.sl], out=out[blk.sl])
                out[blk.sl] += blk.B * drive
        if comp is not None and comp.order:
            np.matmul(comp.A, xs[comp.sl], out=out[comp.sl])
            out[comp.sl] += comp.B * phi
        if load is not None:
            out[sl_load.start] = phid
            out[sl_load.start + 1] = (tau - bl * phid) * inv_jl
        if record_at is not None:
            k = record_at
            rec["r"][k] = r_cmd
            rec["u_presat"][k] = u_presat
            rec["omega_d"][k] = w
            rec["d"][k] = d_in
            rec["n"][k] = n_in
            rec["tau_L"][k] = tau
            rec["y_meas"][k] = y
            rec["phi_L"][k] = phi
            rec["e"][k] = r_cmd - tau
            if not (math.isfinite(tau) and math.isfinite(u) and math.isfinite(phi)):
                t_bad = k * dt
                raise NumericsError(
                    f"simulation diverged: non-finite state at sample {k} "
                    f"(t = {t_bad:.6g} s)"
                )

    def fetch(series, zoh: bool, k: int, half: int) -> float:
        if series is None:
            return 0.0
        return float(series[k]) if zoh else float(series[half])

    h = dt
    k1 = np.empty(nx)
    k2 = np.empty(nx)
    k3 = np.empty(nx)
    k4 = np.empty(nx)
    for k in range(nsteps):
        i0, ih, i1 = 2 * k, 2 * k + 1, 2 * k + 2
        r0 = fetch(r_series, r_zoh, k, i0)
        rh = fetch(r_series, r_zoh, k, ih)
        r1 = fetch(r_series, r_zoh, k, i1)
        d0 = fetch(d_series, d_zoh, k, i0)
        dh = fetch(d_series, d_zoh, k, ih)
        d1 = fetch(d_series, d_zoh, k, i1)
        n0 = fetch(n_series, n_zoh, k, i0)
        nh = fetch(n_series, n_zoh, k, ih)
        n1 = fetch(n_series, n_zoh, k, i1)
        p0 = fetch(phi_series, phi_zoh, k, i0)
        ph = fetch(phi_series, phi_zoh, k, ih)
        p1 = fetch(phi_series, phi_zoh, k, i1)

        stage(x, r0, d0, n0, p0, k1, k)
        stage(x + (0.5 * h) * k1, rh, dh, nh, ph, k2, None)
        stage(x + (0.5 * h) * k2, rh, dh, nh, ph, k3, None)
        stage(x + h * k3, r1, d1, n1, p1, k4, None)
        x += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)

    i_last = 2 * nsteps
    stage(
        x,
        fetch(r_series, r_zoh, nsteps, i_last),
        fetch(d_series, d_zoh, nsteps, i_last),
        fetch(n_series, n_zoh, nsteps, i_last),
        fetch(phi_series, phi_zoh, nsteps, i_last),
        dx,
        nsteps,
    )
    return SimTrace(dt_s=dt, channels=rec)


def simulate_torque_loop(sc: TorqueLoopScenario) -> SimTrace:
    """Integrate the closed torque loop for one scenario.

    The loop is u = C1 r - C2 (tau_L + n) for a 2-DOF controller, or
    u = C (r - tau_L - n) for a PI controller run as C1 = C2 = C; the
    motor command omega_d = clamp(u + d) drives P while handle motion
    drives G.  With compensator_on, C_L phi_L is subtracted from the
    reference before C1.  The recorded r channel is the external
    reference; e = r - tau_L.

    Raises
    ------
    NumericsError
        On divergence, with the first non-finite sample index.
    ValueError
        If any block is improper (not realizable).
    """
    return _simulate(sc)


def simulate_impedance(sc: ImpedanceScenario) -> SimTrace:
    """Torque loop with the reference generated by a virtual spring.

    tau_d(t) = i_d (phi_ref(t) - phi_L(t)) per sample, phi_L exogenous
    from the inner scenario's handle_motion.  The trace r channel
    records tau_d.
    """
    if not sc.i_d > 0.0:
        raise ValueError("simulate_impedance requires i_d > 0")
    ts = sc.torque_scenario
    nsteps = int(round(ts.duration_s / ts.dt_s))
    phi_ref = _generate_n(sc.phi_ref, 0.5 * ts.dt_s, 2 * nsteps + 1)
    phi = _generate_n(ts.handle_motion, 0.5 * ts.dt_s, 2 * nsteps + 1)
    tau_d = sc.i_d * (phi_ref - phi)
    return _simulate(ts, r_series=tau_d)


def simulate_free_response(
    sc: ImpedanceScenario, load: LoadModel, phi0: float
) -> SimTrace:
    """Impedance loop with phi_L produced by a simulated load.

    The load obeys J_L phidd + b_L phid = tau_L from initial angle phi0
    at rest, and the virtual spring pulls it back toward phi_ref.  With
    i_d = 0 the actuator is detached entirely (no torque at all), so the
    load simply stays wherever damping leaves it.

    Raises
    ------
    ValueError
        If the load is disabled, or the inner scenario supplies exogenous
        handle motion (phi_L is a state here).
    """
    if not load.enabled:
        raise ValueError("free response requires an enabled load model")
    ts = sc.torque_scenario
    if ts.handle_motion.kind != "zero":
        raise ValueError("free response simulates phi_L; handle_motion must be zero")
    nsteps = int(round(ts.duration_s / ts.dt_s))
    if sc.i_d == 0.0:
        # Detached actuator: no torque ever reaches the load, and it
        # starts at rest, so every channel is trivial.
        n_series = _generate_n(ts.noise, ts.dt_s, nsteps + 1)
        zeros = np.zeros(nsteps + 1)
        rec = {name: zeros.copy() for name in TRACE_CHANNELS}
        rec["t"] = np.arange(nsteps + 1) * ts.dt_s
        rec["n"] = n_series
        rec["y_meas"] = n_series.copy()
        rec["phi_L"] = np.full(nsteps + 1, phi0)
        return SimTrace(dt_s=ts.dt_s, channels=rec)
    phi_ref = _generate_n(sc.phi_ref, 0.5 * ts.dt_s, 2 * nsteps + 1)
    return _simulate(
        ts,
        r_series=sc.i_d * phi_ref,
        i_d_feedback=sc.i_d,
        load=load,
        phi0=phi0,
    )


def rms_error(trace: SimTrace, from_t: float = 0.0) -> float:
    """RMS of the tracking error r - tau_L over [from_t, end]."""
    t = trace.t
    if len(t) == 0 or from_t > t[-1]:
        raise ValueError("empty evaluation window")
    mask = t >= from_t
    e = trace.channel("e")[mask]
    return float(np.sqrt(np.mean(e * e)))


def steady_state_error(trace: SimTrace) -> float:
    """Mean tracking error over the last 10% of the trace."""
    n = trace.n_samples
    tail = max(1, n // 10)
    return float(np.mean(trace.channel("e")[n - tail:]))


def peak_envelope(
    trace: SimTrace, channel: str
) -> tuple[np.ndarray, np.ndarray]:
    """Times and values of strict local maxima of one channel."""
    v = trace.channel(channel)
    t = trace.t
    if len(v) < 3:
        return np.zeros(0), np.zeros(0)
    core = (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])
    idx = np.nonzero(core)[0] + 1
    return t[idx], v[idx]


def fit_sine(
    t: np.ndarray, x: np.ndarray, frequency_hz: float, from_t: float = 0.0
) -> tuple[float, float, float]:
    """Least-squares fit x ~ A sin(2 pi f t + phase) + offset over [from_t, end].

    Returns (A, phase_deg, offset).  The DC basis column keeps slowly
    varying residuals (settling exponentials) out of the amplitude
    estimate.
    """
    mask = t >= from_t
    if not np.any(mask):
        raise ValueError("empty fit window")
    tw = t[mask]
    xw = x[mask]
    w = 2.0 * np.pi * frequency_hz
    basis = np.column_stack([np.sin(w * tw), np.cos(w * tw), np.ones_like(tw)])
    coef, *_ = np.linalg.lstsq(basis, xw, rcond=None)
    a, b, c = coef
    return float(math.hypot(a, b)), float(math.degrees(math.atan2(b, a))), float(c)


def trace_to_csv(trace: SimTrace, path: str) -> None:
    """Write the trace as CSV, one row per sample, 9 significant digits.

    Column order matches TRACE_CHANNELS; LF line endings.
    """
    cols = [trace.channel(name) for name in TRACE_CHANNELS]
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(TRACE_CHANNELS) + "\n")
        for row in zip(*cols):
            fh.write(",".join("%.9g" % v for v in row) + "\n")
