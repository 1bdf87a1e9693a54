"""Scenario files: JSON descriptions of complete runs.

A scenario selects a mode (`simulate` for the slotted model with its
retransmission baseline, `emurun` for the emulated-network transport),
the traffic and impairment shapes, planner parameters, and a seed.
Files are schema-validated before any run; unknown keys are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from .planner import PlanParams
from .sim.slotted import SimConfig
from .sim.trace import LossTrace
from .transport.profiles import FeedbackPolicy, ImpairmentProfile, StreamProfile

_TRACE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["breakpoints"],
    "properties": {
        "breakpoints": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "array",
                "minItems": 2,
                "maxItems": 2,
                "items": {"type": "number"},
            },
        },
        "interpolation": {"enum": ["linear", "step"]},
    },
}

_PARAMS_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "z_var": {"type": "number", "minimum": 0},
        "z_bin": {"type": "number", "minimum": 0},
        "c_extra": {"type": ["integer", "null"], "minimum": 0},
        "p_cap": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "alpha": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "subtract_window_noise": {"type": "boolean"},
    },
}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["mode"],
    "properties": {
        "description": {"type": "string"},
        "mode": {"enum": ["simulate", "emurun"]},
        "seed": {"type": "integer", "minimum": 0},
        "params": _PARAMS_SCHEMA,
        "sim": {
            "type": "object",
            "additionalProperties": False,
            "required": ["frames", "packets_per_frame", "slots_per_frame",
                         "one_way_delay_slots", "frame_interval_ms", "trace"],
            "properties": {
                "frames": {"type": "integer", "minimum": 1},
                "packets_per_frame": {"type": "integer", "minimum": 1},
                "slots_per_frame": {"type": "integer", "minimum": 1},
                "one_way_delay_slots": {"type": "integer", "minimum": 0},
                "frame_interval_ms": {"type": "number", "exclusiveMinimum": 0},
                "symbol_size": {"type": "integer", "minimum": 1, "maximum": 65535},
                "feedback_sample_window": {"type": "integer", "minimum": 1},
                "trace": _TRACE_SCHEMA,
            },
        },
        "emu": {
            "type": "object",
            "additionalProperties": False,
            "required": ["stream", "impairment"],
            "properties": {
                "codec": {"enum": ["rlc", "ideal"]},
                "stream": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["fps", "frame_sizes", "duration_s"],
                    "properties": {
                        "fps": {"type": "number", "exclusiveMinimum": 0},
                        "frame_sizes": {
                            "type": "array", "minItems": 1,
                            "items": {"type": "integer", "minimum": 1},
                        },
                        "duration_s": {"type": "number", "exclusiveMinimum": 0},
                        "symbol_size": {"type": "integer", "minimum": 1,
                                        "maximum": 65535},
                    },
                },
                "impairment": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "forward_delay_ms": {"type": "number", "minimum": 0},
                        "reverse_delay_ms": {"type": "number", "minimum": 0},
                        "loss": _TRACE_SCHEMA,
                        "rate_cap_mbps": {"type": ["number", "null"],
                                          "exclusiveMinimum": 0},
                    },
                },
                "feedback": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "interval_ms": {"type": "number", "exclusiveMinimum": 0},
                        "packet_interval": {"type": "integer", "minimum": 1},
                    },
                },
            },
        },
    },
    "allOf": [
        {
            "if": {"properties": {"mode": {"const": "simulate"}}},
            "then": {"required": ["sim"]},
        },
        {
            "if": {"properties": {"mode": {"const": "emurun"}}},
            "then": {"required": ["emu"]},
        },
    ],
}


class ScenarioError(ValueError):
    """Scenario file rejected by schema or semantic validation."""


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    mode: str
    seed: int
    params: PlanParams
    sim: SimConfig | None
    emu_stream: StreamProfile | None
    emu_impairment: ImpairmentProfile | None
    emu_feedback: FeedbackPolicy
    emu_codec: str


def _trace_from(doc: dict) -> LossTrace:
    return LossTrace(
        breakpoints=tuple((float(t), float(r)) for t, r in doc["breakpoints"]),
        interpolation=doc.get("interpolation", "linear"),
    )


def parse_scenario(doc: dict, name: str = "<inline>",
                   seed_override: int | None = None,
                   duration_override_s: float | None = None) -> Scenario:
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        msgs = "; ".join(
            f"{'/'.join(str(p) for p in e.path) or '<root>'}: {e.message}"
            for e in errors[:5]
        )
        raise ScenarioError(f"{name}: {msgs}")
    seed = seed_override if seed_override is not None else doc.get("seed", 1)
    params = PlanParams(**doc.get("params", {}))
    mode = doc["mode"]
    sim_cfg = None
    stream = impairment = None
    feedback = FeedbackPolicy()
    codec = "rlc"
    try:
        if mode == "simulate":
            s = doc["sim"]
            sim_cfg = SimConfig(
                frames=s["frames"],
                packets_per_frame=s["packets_per_frame"],
                slots_per_frame=s["slots_per_frame"],
                one_way_delay_slots=s["one_way_delay_slots"],
                frame_interval_ms=s["frame_interval_ms"],
                loss_rate_fn=_trace_from(s["trace"]),
                seed=seed,
                symbol_size=s.get("symbol_size", 1250),
                feedback_sample_window=s.get("feedback_sample_window", 16),
            )
        else:
            e = doc["emu"]
            st = e["stream"]
            stream = StreamProfile(
                fps=st["fps"],
                frame_sizes=tuple(st["frame_sizes"]),
                duration_s=(duration_override_s if duration_override_s
                            is not None else st["duration_s"]),
                symbol_size=st.get("symbol_size", 1250),
            )
            imp = e["impairment"]
            impairment = ImpairmentProfile(
                forward_delay_ms=imp.get("forward_delay_ms", 20.0),
                reverse_delay_ms=imp.get("reverse_delay_ms", 20.0),
                loss=_trace_from(imp["loss"]) if "loss" in imp
                else LossTrace(((0.0, 0.0),)),
                rate_cap_mbps=imp.get("rate_cap_mbps"),
                seed=seed,
            )
            if "feedback" in e:
                feedback = FeedbackPolicy(**e["feedback"])
            codec = e.get("codec", "rlc")
    except (ValueError, KeyError) as exc:
        raise ScenarioError(f"{name}: {exc}") from exc
    return Scenario(
        name=name,
        description=doc.get("description", ""),
        mode=mode,
        seed=seed,
        params=params,
        sim=sim_cfg,
        emu_stream=stream,
        emu_impairment=impairment,
        emu_feedback=feedback,
        emu_codec=codec,
    )


def load_scenario(path: str | Path, seed_override: int | None = None,
                  duration_override_s: float | None = None) -> Scenario:
    p = Path(path)
    if not p.exists():
        shipped = shipped_scenario_path(p.stem)
        if shipped is not None:
            p = shipped
        else:
            raise ScenarioError(f"no such scenario file: {path}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{p}: invalid JSON: {exc}") from exc
    return parse_scenario(doc, name=p.stem, seed_override=seed_override,
                          duration_override_s=duration_override_s)


def shipped_scenarios() -> list[str]:
    root = resources.files("fountainflow") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def shipped_scenario_path(name: str) -> Path | None:
    root = resources.files("fountainflow") / "scenarios"
    p = root / f"{name}.json"
    return Path(str(p)) if p.is_file() else None
