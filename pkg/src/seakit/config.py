"""Strict JSON configuration and controller-bundle files.

Configs describe the plant parameters, synthesis weights, and named
scenarios; they never contain computed results.  Parsing is strict:
unknown keys anywhere are an error, because a typo in a physics
parameter that silently falls back to a default is the worst possible
failure mode for a reproduction toolkit.

Controller bundles store synthesized coefficient arrays plus a
fingerprint of the plant they were designed for, so stale bundles are
detectable.  Both formats carry an explicit format_version.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields as dc_fields

from .plant import SeaParams, default_params
from .simulation import (
    ImpedanceScenario,
    PiController,
    SignalSpec,
    TorqueLoopScenario,
)
from .synthesis import SynthesisWeights, TwoDofController
from .transfer import RationalTF

__all__ = [
    "ConfigError",
    "ScenarioDef",
    "ProjectConfig",
    "parse_config",
    "dump_config",
    "load_config",
    "save_config",
    "ControllerBundle",
    "bundle_from_synthesis",
    "write_bundle",
    "read_bundle",
    "params_fingerprint",
    "write_csv",
]

FORMAT_VERSION = 1


class ConfigError(ValueError):
    """Malformed configuration or bundle content."""


def _check_keys(d: dict, allowed: set[str], ctx: str) -> None:
    extra = sorted(set(d) - allowed)
    if extra:
        raise ConfigError(f"unknown key(s) {extra} in {ctx}")


def _get_num(d: dict, key: str, ctx: str, default=None):
    if key not in d:
        if default is None:
            raise ConfigError(f"missing key {key!r} in {ctx}")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{ctx}.{key} must be a number")
    return float(v)


_SIGNAL_FIELDS = {
    "zero": (),
    "constant": ("amplitude", "offset"),
    "sine": ("amplitude", "frequency_hz", "offset"),
    "chirp": ("amplitude", "f0_hz", "f1_hz", "sweep_s", "offset"),
    "step": ("amplitude", "start_s", "offset"),
    "white_noise": ("variance", "seed", "offset"),
    "piecewise_linear": ("breakpoints", "offset"),
}


def _parse_signal(d, ctx: str) -> SignalSpec:
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigError(f"{ctx} must be an object with a 'kind' key")
    kind = d["kind"]
    if kind not in _SIGNAL_FIELDS:
        raise ConfigError(f"{ctx}.kind {kind!r} unknown")
    _check_keys(d, {"kind", *_SIGNAL_FIELDS[kind]}, ctx)
    kw = {}
    for name in _SIGNAL_FIELDS[kind]:
        if name not in d:
            continue
        if name == "seed":
            if not isinstance(d[name], int) or isinstance(d[name], bool):
                raise ConfigError(f"{ctx}.seed must be an integer")
            kw[name] = d[name]
        elif name == "breakpoints":
            try:
                kw[name] = tuple((float(t), float(v)) for t, v in d[name])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{ctx}.breakpoints must be [t, value] pairs") from exc
        else:
            kw[name] = _get_num(d, name, ctx)
    try:
        return SignalSpec(kind=kind, **kw)
    except ValueError as exc:
        raise ConfigError(f"{ctx}: {exc}") from exc


def _dump_signal(s: SignalSpec) -> dict:
    out = {"kind": s.kind}
    for name in _SIGNAL_FIELDS[s.kind]:
        v = getattr(s, name)
        out[name] = [list(bp) for bp in v] if name == "breakpoints" else v
    return out


@dataclass(frozen=True)
class ScenarioDef:
    """Declarative scenario: everything but the plant and the controller
    instance, which are materialized from the config at run time.

    controller is the string "two_dof" (use the synthesized pair) or a
    PiController.  kind "impedance" additionally uses i_d and phi_ref.
    """

    kind: str = "torque_loop"
    controller: object = "two_dof"
    reference: SignalSpec = field(default_factory=SignalSpec.zero)
    disturbance: SignalSpec = field(default_factory=SignalSpec.zero)
    noise: SignalSpec = field(default_factory=SignalSpec.zero)
    handle_motion: SignalSpec = field(default_factory=SignalSpec.zero)
    compensator_on: bool = False
    saturation_rad_s: float = 50.0
    dt_s: float = 1e-4
    duration_s: float = 10.0
    i_d: float = 0.0
    phi_ref: SignalSpec = field(default_factory=SignalSpec.zero)

    def materialize(self, model, two_dof: TwoDofController):
        """Bind to a plant and controller, yielding a runnable scenario."""
        ctrl = two_dof if self.controller == "two_dof" else self.controller
        ts = TorqueLoopScenario(
            model=model,
            controller=ctrl,
            reference=self.reference,
            disturbance=self.disturbance,
            noise=self.noise,
            handle_motion=self.handle_motion,
            compensator_on=self.compensator_on,
            saturation_rad_s=self.saturation_rad_s,
            dt_s=self.dt_s,
            duration_s=self.duration_s,
        )
        if self.kind == "impedance":
            return ImpedanceScenario(
                torque_scenario=ts, i_d=self.i_d, phi_ref=self.phi_ref
            )
        return ts


_SCENARIO_KEYS = {
    "type",
    "controller",
    "reference",
    "disturbance",
    "noise",
    "handle_motion",
    "compensator_on",
    "saturation_rad_s",
    "dt_s",
    "duration_s",
    "i_d",
    "phi_ref",
}
_SIGNAL_SLOTS = ("reference", "disturbance", "noise", "handle_motion", "phi_ref")


def _parse_scenario(d, ctx: str) -> ScenarioDef:
    if not isinstance(d, dict):
        raise ConfigError(f"{ctx} must be an object")
    _check_keys(d, _SCENARIO_KEYS, ctx)
    kind = d.get("type", "torque_loop")
    if kind not in ("torque_loop", "impedance"):
        raise ConfigError(f"{ctx}.type must be 'torque_loop' or 'impedance'")
    if kind == "torque_loop" and ("i_d" in d or "phi_ref" in d):
        raise ConfigError(f"{ctx}: i_d/phi_ref only apply to impedance scenarios")
    ctrl_raw = d.get("controller", "two_dof")
    if ctrl_raw == "two_dof":
        ctrl: object = "two_dof"
    elif isinstance(ctrl_raw, dict):
        _check_keys(ctrl_raw, {"type", "kp", "ki"}, f"{ctx}.controller")
        if ctrl_raw.get("type") != "pi":
            raise ConfigError(f"{ctx}.controller.type must be 'pi'")
        try:
            ctrl = PiController(
                kp=_get_num(ctrl_raw, "kp", f"{ctx}.controller"),
                ki=_get_num(ctrl_raw, "ki", f"{ctx}.controller"),
            )
        except ValueError as exc:
            raise ConfigError(f"{ctx}.controller: {exc}") from exc
    else:
        raise ConfigError(f"{ctx}.controller must be 'two_dof' or a pi object")
    kw = {"kind": kind, "controller": ctrl}
    for slot in _SIGNAL_SLOTS:
        if slot in d:
            kw[slot] = _parse_signal(d[slot], f"{ctx}.{slot}")
    if "compensator_on" in d:
        if not isinstance(d["compensator_on"], bool):
            raise ConfigError(f"{ctx}.compensator_on must be a boolean")
        kw["compensator_on"] = d["compensator_on"]
    for name in ("saturation_rad_s", "dt_s", "duration_s", "i_d"):
        if name in d:
            kw[name] = _get_num(d, name, ctx)
    try:
        return ScenarioDef(**kw)
    except ValueError as exc:
        raise ConfigError(f"{ctx}: {exc}") from exc


def _dump_scenario(s: ScenarioDef) -> dict:
    out: dict = {"type": s.kind}
    if isinstance(s.controller, PiController):
        out["controller"] = {
            "type": "pi",
            "kp": s.controller.kp,
            "ki": s.controller.ki,
        }
    else:
        out["controller"] = "two_dof"
    for slot in _SIGNAL_SLOTS:
        if slot == "phi_ref" and s.kind != "impedance":
            continue
        out[slot] = _dump_signal(getattr(s, slot))
    out["compensator_on"] = s.compensator_on
    out["saturation_rad_s"] = s.saturation_rad_s
    out["dt_s"] = s.dt_s
    out["duration_s"] = s.duration_s
    if s.kind == "impedance":
        out["i_d"] = s.i_d
    return out


@dataclass(frozen=True)
class ProjectConfig:
    """Parsed project file: plant, weights, named scenarios, output dir."""

    plant: SeaParams = field(default_factory=default_params)
    weights: SynthesisWeights = field(
        default_factory=lambda: SynthesisWeights(rho=5e-4, lam=1.0, k=1.0)
    )
    scenarios: dict = field(default_factory=dict)
    output_dir: str = "out"
    format_version: int = FORMAT_VERSION


_PLANT_KEYS = {f.name for f in dc_fields(SeaParams)}


def parse_config(raw: dict) -> ProjectConfig:
    """Validate and convert a decoded JSON object.

    Raises ConfigError on any unknown key, missing required key, wrong
    type, unsupported format_version, or physical-invariant violation.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    _check_keys(
        raw,
        {"format_version", "output_dir", "plant", "weights", "scenarios"},
        "config",
    )
    version = raw.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ConfigError(f"unsupported format_version {version!r}")

    base = default_params()
    pd = raw.get("plant", {})
    if not isinstance(pd, dict):
        raise ConfigError("config.plant must be an object")
    _check_keys(pd, _PLANT_KEYS, "config.plant")
    overrides = {k: _get_num(pd, k, "config.plant") for k in pd}
    try:
        params = SeaParams(
            **{k: overrides.get(k, getattr(base, k)) for k in _PLANT_KEYS}
        )
    except ValueError as exc:
        raise ConfigError(f"config.plant: {exc}") from exc

    wd = raw.get("weights", {})
    if not isinstance(wd, dict):
        raise ConfigError("config.weights must be an object")
    _check_keys(wd, {"rho", "lambda", "k"}, "config.weights")
    try:
        weights = SynthesisWeights(
            rho=_get_num(wd, "rho", "config.weights", 5e-4),
            lam=_get_num(wd, "lambda", "config.weights", 1.0),
            k=_get_num(wd, "k", "config.weights", 1.0),
        )
    except ValueError as exc:
        raise ConfigError(f"config.weights: {exc}") from exc

    sd = raw.get("scenarios", {})
    if not isinstance(sd, dict):
        raise ConfigError("config.scenarios must be an object")
    scenarios = {
        name: _parse_scenario(body, f"config.scenarios.{name}")
        for name, body in sd.items()
    }

    output_dir = raw.get("output_dir", "out")
    if not isinstance(output_dir, str):
        raise ConfigError("config.output_dir must be a string")
    return ProjectConfig(
        plant=params,
        weights=weights,
        scenarios=scenarios,
        output_dir=output_dir,
        format_version=version,
    )


def dump_config(cfg: ProjectConfig) -> dict:
    """Canonical JSON object for a config; parse(dump(cfg)) == cfg."""
    return {
        "format_version": cfg.format_version,
        "output_dir": cfg.output_dir,
        "plant": {k: getattr(cfg.plant, k) for k in sorted(_PLANT_KEYS)},
        "weights": {
            "rho": cfg.weights.rho,
            "lambda": cfg.weights.lam,
            "k": cfg.weights.k,
        },
        "scenarios": {
            name: _dump_scenario(s) for name, s in cfg.scenarios.items()
        },
    }


def load_config(path: str) -> ProjectConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return parse_config(raw)


def save_config(cfg: ProjectConfig, path: str) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(dump_config(cfg), fh, indent=2)
        fh.write("\n")


def params_fingerprint(params: SeaParams) -> str:
    """Short stable hash of the plant parameters a bundle was built for."""
    blob = json.dumps(
        {k: repr(getattr(params, k)) for k in sorted(_PLANT_KEYS)},
        sort_keys=True,
    ).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class ControllerBundle:
    """Synthesized controller coefficients, highest degree first.

    Raw arrays round-trip exactly through JSON; the tf accessors wrap
    them without renormalizing (the denominators are stored monic).
    """

    weights: SynthesisWeights
    c1_num: tuple[float, ...]
    c1_den: tuple[float, ...]
    c2_num: tuple[float, ...]
    c2_den: tuple[float, ...]
    cl_num: tuple[float, ...]
    cl_den: tuple[float, ...]
    plant_fingerprint: str
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        for name in ("c1_den", "c2_den", "cl_den"):
            arr = getattr(self, name)
            if not arr or arr[0] == 0.0:
                raise ConfigError(f"bundle {name} has a zero leading coefficient")
        if self.c1_den != self.c2_den:
            raise ConfigError("bundle c1 and c2 must share one denominator")

    def c1(self) -> RationalTF:
        return RationalTF(list(self.c1_num), list(self.c1_den))

    def c2(self) -> RationalTF:
        return RationalTF(list(self.c2_num), list(self.c2_den))

    def cl(self) -> RationalTF:
        return RationalTF(list(self.cl_num), list(self.cl_den))


def bundle_from_synthesis(
    ctrl: TwoDofController, cl: RationalTF, params: SeaParams
) -> ControllerBundle:
    return ControllerBundle(
        weights=ctrl.weights,
        c1_num=tuple(ctrl.c1.num.coeffs),
        c1_den=tuple(ctrl.c1.den.coeffs),
        c2_num=tuple(ctrl.c2.num.coeffs),
        c2_den=tuple(ctrl.c2.den.coeffs),
        cl_num=tuple(cl.num.coeffs),
        cl_den=tuple(cl.den.coeffs),
        plant_fingerprint=params_fingerprint(params),
    )


def write_bundle(bundle: ControllerBundle, path: str) -> None:
    obj = {
        "format_version": bundle.format_version,
        "weights": {
            "rho": bundle.weights.rho,
            "lambda": bundle.weights.lam,
            "k": bundle.weights.k,
        },
        "c1_num": list(bundle.c1_num),
        "c1_den": list(bundle.c1_den),
        "c2_num": list(bundle.c2_num),
        "c2_den": list(bundle.c2_den),
        "cl_num": list(bundle.cl_num),
        "cl_den": list(bundle.cl_den),
        "plant_fingerprint": bundle.plant_fingerprint,
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def read_bundle(path: str) -> ControllerBundle:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read bundle {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("bundle root must be an object")
    keys = {
        "format_version",
        "weights",
        "c1_num",
        "c1_den",
        "c2_num",
        "c2_den",
        "cl_num",
        "cl_den",
        "plant_fingerprint",
    }
    _check_keys(raw, keys, "bundle")
    missing = sorted(keys - set(raw))
    if missing:
        raise ConfigError(f"bundle missing key(s) {missing}")
    if raw["format_version"] != FORMAT_VERSION:
        raise ConfigError(f"unsupported format_version {raw['format_version']!r}")
    wd = raw["weights"]
    _check_keys(wd, {"rho", "lambda", "k"}, "bundle.weights")
    try:
        weights = SynthesisWeights(
            rho=_get_num(wd, "rho", "bundle.weights"),
            lam=_get_num(wd, "lambda", "bundle.weights"),
            k=_get_num(wd, "k", "bundle.weights"),
        )
    except ValueError as exc:
        raise ConfigError(f"bundle.weights: {exc}") from exc

    def arr(name: str) -> tuple[float, ...]:
        v = raw[name]
        if not isinstance(v, list) or not v:
            raise ConfigError(f"bundle.{name} must be a nonempty array")
        try:
            return tuple(float(x) for x in v)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bundle.{name} must be numeric") from exc

    if not isinstance(raw["plant_fingerprint"], str):
        raise ConfigError("bundle.plant_fingerprint must be a string")
    return ControllerBundle(
        weights=weights,
        c1_num=arr("c1_num"),
        c1_den=arr("c1_den"),
        c2_num=arr("c2_num"),
        c2_den=arr("c2_den"),
        cl_num=arr("cl_num"),
        cl_den=arr("cl_den"),
        plant_fingerprint=raw["plant_fingerprint"],
        format_version=raw["format_version"],
    )


def write_csv(path: str, header: list[str], columns: list) -> None:
    """Comma-separated columns, LF endings, 9 significant digits."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join("%.9g" % v for v in row) + "\n")
