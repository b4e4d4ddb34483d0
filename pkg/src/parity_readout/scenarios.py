"""Figure scenarios: JSON config in, CSV table with a metadata header out.

Frequencies in configs are ordinary frequencies f (Hz), converted with
omega = 2 pi f; ``gamma_*`` rates are plain 1/s values and are not scaled.
"""
from __future__ import annotations

import copy
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable

import jsonschema
import numpy as np

from . import __version__, decay, fock, jc, jpm, mismatch, protocol

SCHEMA_VERSION = 1
TWO_PI = 2 * math.pi


class ConfigError(ValueError):
    """The scenario configuration failed validation."""


@dataclass
class ScenarioResult:
    name: str
    columns: list[str]
    data: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)
    extras: dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    def to_csv(self) -> str:
        if not np.all(np.isfinite(self.data)):
            raise ValueError(f"scenario {self.name!r} produced non-finite values")
        buf = io.StringIO()
        for key in sorted(self.metadata):
            buf.write(f"# {key}: {json.dumps(self.metadata[key], sort_keys=True)}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.data:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()


def _fmt(value: float) -> str:
    text = "%.17g" % value
    return "0" if text == "-0" else text


# --------------------------------------------------------------------------- catalog

_JPM_DEFAULTS = {"g_j_hz": 50e6, "gamma_j": 200e6, "gamma_r": 200e6, "gamma_d": 1e6}

CATALOG: dict[str, dict[str, Any]] = {
    "fig2-drive-occupation": {
        "description": "Four-qubit band occupations versus drive length (closed form)",
        "plot": "occupation bands vs drive time",
        "defaults": {"n_qubits": 4, "chi_hz": 5e6, "occupation": 9.0, "t_max_s": 200e-9, "n_times": 401},
    },
    "fig3-contrast": {
        "description": "Bright/dark click probabilities and parity contrast versus measurement time",
        "plot": "click probabilities and contrast vs time",
        "defaults": {"chi_hz": 5e6, "occupation": 9.0, "cavity_dim": 30, "t_max_s": 100e-9, "n_times": 201,
                     "window_s": 40e-9, **_JPM_DEFAULTS},
    },
    "fig4-mismatch": {
        "description": "Even-state detection and same-parity coherences versus chi mismatch (two qubits)",
        "plot": "mismatch detection and coherences",
        "defaults": {"chi_hz": 5e6, "occupation": 9.0, "eps_over_chi_min": 0.01, "eps_over_chi_max": 0.2,
                     "n_points": 39, **_JPM_DEFAULTS},
    },
    "decay-envelope": {
        "description": "Worst-case 1 - |F01| after detection, imperfect reset and cavity decay",
        "plot": "reset and decay infidelity envelope",
        "defaults": {"occupation_min": 0.25, "occupation_max": 9.0, "n_points": 36,
                     "photons_removed": [1, 2, 3], "reset_policy": "shared-pulse"},
    },
    "steady-state-coherence": {
        "description": "Steady-state coherence of the odd pair under cavity loss, closed form and master equation",
        "plot": "steady-state odd-pair coherence",
        "defaults": {"occupation": 9.0, "eps_over_chi_min": 0.0, "eps_over_chi_max": 1.0, "n_points": 21,
                     "kappa": 1e6, "nbar": 0.0, "lindblad_points": [0.1, 0.5]},
    },
    "basis-overlap": {
        "description": "Four-qubit measurement-basis overlap versus relative amplitude mismatch",
        "plot": "basis overlap vs amplitude mismatch",
        "defaults": {"alpha": 3.0, "delta_min": 1e-4, "delta_max": 1e-1, "n_points": 31, **_JPM_DEFAULTS},
    },
    "jc-occupation": {
        "description": "Four-qubit cavity occupation under full Jaynes-Cummings coupling",
        "plot": "JC occupation vs drive time",
        "defaults": {"n_qubits": 4, "chi_hz": 5e6, "qubit_detuning_hz": 2e9, "occupation": 9.0,
                     "cavity_dim": 40, "step_s": 0.25e-9, "t_max_s": 200e-9},
    },
    "jc-contrast": {
        "description": "Worst-case parity contrast with a JC drive stage",
        "plot": "JC worst-case contrast vs time",
        "defaults": {"n_qubits": 4, "chi_hz": 5e6, "qubit_detuning_hz": 2e9, "occupation": 9.0,
                     "cavity_dim": 40, "step_s": 0.25e-9, "t_max_s": 40e-9, "n_times": 81,
                     "window_s": 40e-9, **_JPM_DEFAULTS},
    },
}

_NUMBER = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_COUNT = {"type": "integer", "minimum": 2}
_PARAM_SCHEMAS: dict[str, dict] = {
    "n_qubits": {"enum": [1, 2, 4]},
    "chi_hz": _POS, "occupation": _POS, "t_max_s": _POS, "n_times": _COUNT, "cavity_dim": {"type": "integer", "minimum": 2},
    "window_s": _POS, "g_j_hz": _NONNEG, "gamma_j": _NONNEG, "gamma_r": _NONNEG, "gamma_d": _NONNEG,
    "eps_over_chi_min": _NONNEG, "eps_over_chi_max": _NONNEG, "n_points": _COUNT,
    "occupation_min": _POS, "occupation_max": _POS,
    "photons_removed": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
    "reset_policy": {"enum": list(decay.RESET_POLICIES)},
    "kappa": _POS, "nbar": _NONNEG, "lindblad_points": {"type": "array", "items": _NONNEG},
    "alpha": _POS, "delta_min": _POS, "delta_max": _POS,
    "qubit_detuning_hz": {"type": "number", "not": {"const": 0}}, "step_s": _POS,
}


def config_schema(name: str | None = None) -> dict:
    """JSON schema for scenario configs (all scenarios, or one by name)."""
    names = [name] if name else list(CATALOG)
    variants = []
    for n in names:
        keys = CATALOG[n]["defaults"]
        variants.append({
            "type": "object",
            "properties": {
                "scenario": {"const": n},
                "parameters": {
                    "type": "object",
                    "properties": {k: _PARAM_SCHEMAS[k] for k in keys},
                    "additionalProperties": False,
                },
            },
        })
    return _assemble_schema(variants)


def _assemble_schema(variants: list[dict]) -> dict:
    schema = {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "parity-readout scenario config",
        "type": "object",
        "required": ["schema_version", "scenario", "convention"],
        "properties": {
            "schema_version": {"const": SCHEMA_VERSION},
            "scenario": {"enum": list(CATALOG)},
            "convention": {"const": "f", "description": "frequencies are f in Hz; omega = 2 pi f"},
            "parameters": {"type": "object"},
            "output": {"type": "string"},
        },
        "additionalProperties": False,
        "oneOf": variants,
    }
    return schema


def list_scenarios() -> list[dict[str, str]]:
    return [{"name": n, "description": c["description"], "plot": c["plot"]} for n, c in CATALOG.items()]


def default_config(name: str) -> dict:
    if name not in CATALOG:
        raise ConfigError(f"unknown scenario {name!r}; valid names: {', '.join(CATALOG)}")
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario": name,
        "convention": "f",
        "parameters": copy.deepcopy(CATALOG[name]["defaults"]),
    }


def validate_config(config: dict) -> dict:
    """Validate ``config`` and return its parameters merged over the defaults."""
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    name = config.get("scenario")
    if name not in CATALOG:
        raise ConfigError(f"unknown scenario {name!r}; valid names: {', '.join(CATALOG)}")
    try:
        jsonschema.validate(config, config_schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from None
    params = copy.deepcopy(CATALOG[name]["defaults"])
    params.update(config.get("parameters", {}))
    return params


# --------------------------------------------------------------------------- runners

def _conventions(**extra) -> dict:
    meta = {
        "unit_convention": "config frequencies are f in Hz (omega = 2 pi f); gamma_* are plain 1/s; CSV times in s",
        "sign_convention": "protocol bit 1 = excited qubit, cavity pull +chi per excited qubit",
        "drive_phases": "all tone phases 0",
        "reset_policy": "shared-pulse: one reset pulse sized from the branch-0 post-click mean field",
        "eps_pattern_4q": "(eps, eps/2, -eps/2) for qubits 2-4",
        "detector_back_action": "bare photon subtraction S|n> = |n-1>",
    }
    meta.update(extra)
    return meta


def _jpm_params(p: dict) -> jpm.JpmParams:
    return jpm.JpmParams(g_j=TWO_PI * p["g_j_hz"], gamma_j=p["gamma_j"], gamma_r=p["gamma_r"], gamma_d=p["gamma_d"])


def _register(p: dict, n_qubits: int | None = None) -> protocol.QubitRegister:
    return protocol.QubitRegister(n_qubits or p["n_qubits"], TWO_PI * p["chi_hz"])


def _drive(reg: protocol.QubitRegister, occupation: float) -> protocol.DrivePulse:
    t_d = protocol.optimal_drive_time(reg)
    return protocol.DrivePulse(protocol.amplitude_for_occupation(occupation, t_d), protocol.parity_tones(reg), t_d)


def _shift_name(shift: float, chi: float) -> str:
    k = int(round(shift / chi))
    return "n_band_0chi" if k == 0 else f"n_band_{'p' if k > 0 else 'm'}{abs(k)}chi"


def run_fig2(p: dict) -> ScenarioResult:
    reg = _register(p)
    pulse = _drive(reg, p["occupation"])
    times = np.linspace(0.0, p["t_max_s"], p["n_times"])
    curves = protocol.occupation_curves(reg, pulse, times)
    names = [_shift_name(s, reg.chi) for s in curves]
    data = np.column_stack([times] + list(curves.values()))
    meta = _conventions(t_drive_optimal_s=pulse.t_d, a0_rad_per_s=pulse.a0,
                        tones_rad_per_s=[w for w, _ in pulse.tones])
    return ScenarioResult("fig2-drive-occupation", ["t_s"] + names, data, meta)


def run_fig3(p: dict) -> ScenarioResult:
    chi = TWO_PI * p["chi_hz"]
    params = _jpm_params(p)
    times = np.linspace(0.0, p["t_max_s"], p["n_times"])
    alpha = math.sqrt(p["occupation"])
    dim = p["cavity_dim"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", fock.TruncationWarning)
        plus = jpm.detection_probability(alpha, 2 * chi, params, times, cavity_dim=dim)
        minus = jpm.detection_probability(alpha, -2 * chi, params, times, cavity_dim=dim)
    dark = jpm.detection_probability(0.0, 0.0, params, times, cavity_dim=dim, label="dark")
    contrast = jpm.contrast_curve(plus, dark)
    window = times <= p["window_s"] * (1 + 1e-12)
    idx = int(np.argmax(np.where(window, contrast.p_click, -np.inf)))
    data = np.column_stack([times, plus.p_click, minus.p_click, dark.p_click, contrast.p_click])
    meta = _conventions(
        assumed_odd_occupation=p["occupation"],
        detunings="bright curves at +2chi and -2chi from the counter; dark curve from the empty cavity",
        cavity_dim=dim,
        max_contrast_in_window=float(contrast.p_click[idx]),
        t_max_contrast_s=float(times[idx]),
    )
    extras = {"curves": {"plus": plus, "minus": minus, "dark": dark}}
    return ScenarioResult("fig3-contrast", ["t_s", "p_bright_plus2chi", "p_bright_minus2chi", "p_dark", "contrast"],
                          data, meta, extras)


def run_fig4(p: dict) -> ScenarioResult:
    chi = TWO_PI * p["chi_hz"]
    params = _jpm_params(p)
    ratios = np.linspace(p["eps_over_chi_min"], p["eps_over_chi_max"], p["n_points"])
    rows = []
    for r in ratios:
        sc = mismatch.mismatch_amplitudes(mismatch.mismatch_register(2, chi, r * chi), occupation=p["occupation"])
        n_even = abs(sc.amplitudes["00"]) ** 2
        n_odd = abs(sc.amplitudes["01"]) ** 2
        probs = jpm.analytic_detection_probability(sc.amplitudes["00"], params)
        odd = mismatch.intra_subspace_decoherence(sc, "odd")
        even = mismatch.intra_subspace_decoherence(sc, "even")
        rows.append([r, n_even, n_odd, probs["ideal"], probs["relaxation"], odd.magnitude, even.magnitude])
    cols = ["eps_over_chi", "n_even", "n_odd", "p_even_ideal", "p_even_relaxation", "odd_coherence", "even_coherence"]
    meta = _conventions(a0_calibration=f"a0 fixed so the mismatch-free odd occupation is {p['occupation']}",
                        pairs="even {00,11}, odd {01,10}")
    return ScenarioResult("fig4-mismatch", cols, np.array(rows), meta)


def run_decay_envelope(p: dict) -> ScenarioResult:
    occ = np.linspace(p["occupation_min"], p["occupation_max"], p["n_points"])
    ks = list(p["photons_removed"])
    surface = decay.post_reset_decay_envelope(occ, ks, policy=p["reset_policy"])
    cols = ["occupation"] + [f"one_minus_F01_k{k}" for k in ks]
    meta = _conventions(reset_policy=p["reset_policy"], pair="alpha_0 = -alpha_1 = sqrt(occupation), real",
                        max_one_minus_F01=float(surface.max()))
    return ScenarioResult("decay-envelope", cols, np.column_stack([occ, surface]), meta)


def run_steady_state(p: dict) -> ScenarioResult:
    ratios = np.linspace(p["eps_over_chi_min"], p["eps_over_chi_max"], p["n_points"])
    n_c = p["occupation"]
    closed = np.array([decay.steady_state_coherence(n_c, r) for r in ratios])
    pair = [decay.odd_pair_amplitudes(n_c, r) for r in ratios]
    overlap = np.array([abs(decay.damping_factor(a0, a1)) for a0, a1 in pair])
    checks = {}
    params = decay.DecayParams(kappa=p["kappa"], nbar=p["nbar"])
    results = []
    for r in p["lindblad_points"]:
        a0, a1 = decay.odd_pair_amplitudes(n_c, r)
        value, res = decay.lindblad_steady_coherence(a0, a1, params, tol=1e-10)
        checks[str(r)] = {"lindblad": value, "closed_form": decay.steady_state_coherence(n_c, r)}
        results.append(res)
    meta = _conventions(occupation=n_c, kappa_per_s=p["kappa"], nbar=p["nbar"], lindblad_checks=checks)
    return ScenarioResult("steady-state-coherence", ["eps_over_chi", "coherence_closed_form", "coherence_overlap"],
                          np.column_stack([ratios, closed, overlap]), meta, {"evolutions": results})


def run_basis_overlap(p: dict) -> ScenarioResult:
    deltas = np.geomspace(p["delta_min"], p["delta_max"], p["n_points"])
    alpha = p["alpha"]
    params = _jpm_params(p)
    rows = []
    for d in deltas:
        ideal = mismatch.measurement_basis_overlap(alpha, alpha * (1 + d))
        relax = mismatch.measurement_basis_overlap(alpha, alpha * (1 + d), params)
        rows.append([d, ideal.infidelity, ideal.infidelity_approx, relax.infidelity, relax.infidelity_approx])
    cols = ["delta", "one_minus_O_ideal", "one_minus_O_ideal_approx", "one_minus_O_relaxation",
            "one_minus_O_relaxation_approx"]
    meta = _conventions(alpha=alpha, damping_ideal=mismatch.overlap_damping(alpha),
                        damping_relaxation=mismatch.overlap_damping(alpha, params))
    return ScenarioResult("basis-overlap", cols, np.array(rows), meta)


def _jc_setup(p: dict):
    reg = _register(p)
    pulse = _drive(reg, p["occupation"])
    model = jc.build_jc_model(reg, TWO_PI * p["qubit_detuning_hz"], cavity_dim=p["cavity_dim"])
    meta = _conventions(
        qubit_detuning_hz=p["qubit_detuning_hz"],
        g_hz=[g / TWO_PI for g in model.g],
        g_delta_split="omega_C - omega_Q shared by all qubits; g_k = sqrt(chi_k * detuning)",
        jc_label_convention="JC label bit 1 = excited qubit = cavity pull -chi",
        t_drive_s=pulse.t_d,
    )
    return reg, pulse, model, meta


def run_jc_occupation(p: dict) -> ScenarioResult:
    _, pulse, model, meta = _jc_setup(p)
    drive = jc.jc_drive_evolution(model, pulse, step=p["step_s"], t_end=p["t_max_s"])
    labels = list(drive.occupations)
    data = np.column_stack([drive.times] + [drive.occupations[lab] for lab in labels])
    max_norm_err = max(float(np.max(np.abs(v - 1))) for v in drive.norms.values())
    meta.update(max_norm_error=max_norm_err)
    return ScenarioResult("jc-occupation", ["t_s"] + [f"n_{lab}" for lab in labels], data, meta, {"drive": drive})


def run_jc_contrast(p: dict) -> ScenarioResult:
    _, pulse, model, meta = _jc_setup(p)
    drive = jc.jc_drive_evolution(model, pulse, step=p["step_s"])
    times = np.linspace(0.0, p["t_max_s"], p["n_times"])
    out = jc.jc_contrast(model, pulse, _jpm_params(p), times, t_window=p["window_s"], drive=drive)
    data = np.column_stack([times, out["bright"].p_click, out["dark"].p_click, out["contrast"].p_click])
    meta.update(
        bright_label=out["bright_label"], dark_label=out["dark_label"],
        bright_occupation=out["occupations"][out["bright_label"]],
        dark_occupation=out["occupations"][out["dark_label"]],
        max_contrast_in_window=out["max_contrast"],
    )
    return ScenarioResult("jc-contrast", ["t_s", "p_bright", "p_dark", "contrast"], data, meta, {**out, "drive": drive})


RUNNERS: dict[str, Callable[[dict], ScenarioResult]] = {
    "fig2-drive-occupation": run_fig2,
    "fig3-contrast": run_fig3,
    "fig4-mismatch": run_fig4,
    "decay-envelope": run_decay_envelope,
    "steady-state-coherence": run_steady_state,
    "basis-overlap": run_basis_overlap,
    "jc-occupation": run_jc_occupation,
    "jc-contrast": run_jc_contrast,
}


def run_scenario(config: dict) -> ScenarioResult:
    params = validate_config(config)
    name = config["scenario"]
    result = RUNNERS[name](params)
    result.metadata.update(
        scenario=name,
        schema_version=SCHEMA_VERSION,
        code_version=__version__,
        parameters=params,
    )
    return result
