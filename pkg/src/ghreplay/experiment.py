"""Experiment specs: one JSON document describing a full reproducible run.

A spec names the greenhouses (generator presets, explicit parameters, or
existing CSV paths), the model, memory and scenario settings, and the
output directory. It is validated against a JSON schema before any work
starts; unknown keys are rejected. Two built-in presets supply defaults:
``desk`` (minutes on a laptop) and ``paper`` (protocol-scale constants:
window 250, 10-minute window separation, batches of 100, 10k-sample
memory, substitution probability 0.1, evaluation every 3 updates,
10k-sample test sets). Resolution order: preset defaults, then the spec
file, then command-line flags.
"""

from __future__ import annotations

import copy
import dataclasses
import json
from pathlib import Path

import jsonschema

from .climate import PRESETS, GreenhouseParams, generate_series
from .csvio import read_records, write_records
from .dataset import Normalizer, build_samples, default_normalizer
from .memory import MemoryConfig, SubstitutionStrategy
from .model import ModelConfig
from .rng import SeededRng
from .trainer import Phase, ScenarioConfig


class SpecError(ValueError):
    """Invalid spec, flags or input files (CLI exit code 2)."""


_GREENHOUSE_PARAMS_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "i_max": {"type": "number", "exclusiveMinimum": 0},
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "p_max": {"type": "number", "exclusiveMinimum": 0},
        "k_c": {"type": "number", "exclusiveMinimum": 0},
        "a_rad": {"type": "number", "exclusiveMinimum": 0},
        "b_vpd": {"type": "number", "exclusiveMinimum": 0},
        "t_base": {"type": "number", "exclusiveMinimum": 0},
        "t_amp": {"type": "number", "exclusiveMinimum": 0},
        "co2_day": {"type": "number", "exclusiveMinimum": 0},
        "co2_night": {"type": "number", "exclusiveMinimum": 0},
        "noise_sd": {"type": "number", "minimum": 0},
        "day_length_h": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 24},
    },
}

EXPERIMENT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["greenhouses"],
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "out_dir": {"type": "string", "minLength": 1},
        "days_per_phase": {"type": "integer", "minimum": 1},
        "greenhouses": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "params": _GREENHOUSE_PARAMS_SCHEMA,
                    "csv": {"type": "string", "minLength": 1},
                },
            },
        },
        "data": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "window_len": {"type": "integer", "minimum": 1},
                "stride": {"type": "integer", "minimum": 1},
                "start_timestamp": {"type": "integer", "minimum": 0},
            },
        },
        "model": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "hidden_dim": {"type": "integer", "minimum": 1},
                "dense_dim": {"type": "integer", "minimum": 1},
                "learning_rate": {"type": "number", "exclusiveMinimum": 0},
                "adam_beta1": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "adam_beta2": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "adam_epsilon": {"type": "number", "exclusiveMinimum": 0},
                "grad_clip": {"type": ["number", "null"], "exclusiveMinimum": 0},
            },
        },
        "memory": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "capacity": {"type": "integer", "minimum": 1},
                "substitution_probability": {"type": "number", "minimum": 0, "maximum": 1},
                "strategy": {
                    "type": "string",
                    "enum": ["per-element", "per-sample", "per-batch"],
                },
            },
        },
        "scenario": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "batch_size": {"type": "integer", "minimum": 1},
                "replay_size": {"type": "integer", "minimum": 0},
                "eval_every": {"type": "integer", "minimum": 1},
                "test_size": {"type": "integer", "minimum": 1},
            },
        },
    },
}


def desk_spec() -> dict:
    """Desk-scale defaults: the full pipeline runs in minutes."""
    return {
        "seed": 42,
        "out_dir": "out-desk",
        "days_per_phase": 30,
        "greenhouses": [{"name": "GH-A"}, {"name": "GH-B"}, {"name": "GH-C"}],
        "data": {"window_len": 50, "stride": 2, "start_timestamp": 0},
        "model": {"hidden_dim": 16, "dense_dim": 16, "learning_rate": 0.01},
        "memory": {"capacity": 2000, "substitution_probability": 0.1, "strategy": "per-batch"},
        "scenario": {"batch_size": 100, "replay_size": 100, "eval_every": 3, "test_size": 1000},
    }


def paper_spec() -> dict:
    """Protocol-scale constants; expect a long run."""
    return {
        "seed": 42,
        "out_dir": "out-paper",
        "days_per_phase": 365,
        "greenhouses": [{"name": "GH-A"}, {"name": "GH-B"}, {"name": "GH-C"}],
        "data": {"window_len": 250, "stride": 2, "start_timestamp": 0},
        "model": {"hidden_dim": 32, "dense_dim": 32, "learning_rate": 0.001},
        "memory": {"capacity": 10000, "substitution_probability": 0.1, "strategy": "per-batch"},
        "scenario": {"batch_size": 100, "replay_size": 100, "eval_every": 3, "test_size": 10000},
    }


PRESET_SPECS = {"desk": desk_spec, "paper": paper_spec}


def validate_spec(doc: dict) -> None:
    validator = jsonschema.Draft202012Validator(EXPERIMENT_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = ".".join(str(p) for p in err.absolute_path) or "spec"
        raise SpecError(f"{where}: {err.message}")


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_spec_file(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise SpecError(f"spec file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise SpecError(f"{path}: spec must be a JSON object")
    return doc


def resolve_spec(
    spec_path: str | Path | None,
    preset: str | None = None,
    overrides: dict | None = None,
) -> dict:
    """Merge preset defaults, the spec file, and flag overrides (flags win)."""
    if preset is None:
        preset = "desk"
    if preset not in PRESET_SPECS:
        raise SpecError(f"unknown preset {preset!r}, expected one of {sorted(PRESET_SPECS)}")
    doc = PRESET_SPECS[preset]()
    if spec_path is not None:
        doc = _deep_merge(doc, load_spec_file(spec_path))
    if overrides:
        doc = _deep_merge(doc, overrides)
    validate_spec(doc)
    return doc


# ---------------------------------------------------------------------------
# building runtime objects from a validated spec

def greenhouse_params(entry: dict) -> GreenhouseParams:
    name = entry["name"]
    if "params" in entry:
        params = GreenhouseParams(name=name, **entry["params"])
    elif name in PRESETS:
        params = dataclasses.replace(PRESETS[name], name=name)
    else:
        raise SpecError(
            f"greenhouse {name!r} has no 'params' and is not a built-in preset "
            f"({', '.join(sorted(PRESETS))})"
        )
    try:
        params.validate()
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    return params


def build_model_config(spec: dict) -> ModelConfig:
    model = spec.get("model", {})
    cfg = ModelConfig(
        hidden_dim=model.get("hidden_dim", 32),
        dense_dim=model.get("dense_dim", 32),
        window_len=spec.get("data", {}).get("window_len", 250),
        learning_rate=model.get("learning_rate", 1e-3),
        adam_beta1=model.get("adam_beta1", 0.9),
        adam_beta2=model.get("adam_beta2", 0.999),
        adam_epsilon=model.get("adam_epsilon", 1e-8),
        grad_clip=model.get("grad_clip"),
    )
    cfg.validate()
    return cfg


def build_memory_config(spec: dict) -> MemoryConfig:
    memory = spec.get("memory", {})
    cfg = MemoryConfig(
        capacity=memory.get("capacity", 10000),
        substitution_probability=memory.get("substitution_probability", 0.1),
        strategy=SubstitutionStrategy(memory.get("strategy", "per-batch")),
    )
    cfg.validate()
    return cfg


def dataset_path(spec: dict, entry: dict, out_dir: Path) -> Path:
    if "csv" in entry:
        return Path(entry["csv"])
    return out_dir / f"{entry['name']}.csv"


def generate_datasets(spec: dict, out_dir: Path) -> list[Path]:
    """Write one CSV per generated greenhouse plus a manifest of the inputs."""
    seed = spec.get("seed", 0)
    days = spec.get("days_per_phase", 30)
    start_ts = spec.get("data", {}).get("start_timestamp", 0)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    manifest_entries = []
    for entry in spec["greenhouses"]:
        if "csv" in entry:
            continue  # externally supplied data is never regenerated
        params = greenhouse_params(entry)
        rng = SeededRng(seed).split(f"generator/{params.name}")
        records = generate_series(params, days, rng, start_timestamp=start_ts)
        path = dataset_path(spec, entry, out_dir)
        write_records(path, records)
        written.append(path)
        manifest_entries.append({"name": params.name, "params": dataclasses.asdict(params)})
    manifest = {
        "seed": seed,
        "days_per_phase": days,
        "start_timestamp": start_ts,
        "greenhouses": manifest_entries,
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(manifest_path)
    return written


def build_phases(spec: dict, out_dir: Path) -> tuple[list[Phase], Normalizer]:
    """Load every greenhouse CSV and split windows into stream/test sets."""
    seed = spec.get("seed", 0)
    data = spec.get("data", {})
    window_len = data.get("window_len", 250)
    stride = data.get("stride", 2)
    test_size = spec.get("scenario", {}).get("test_size", 10000)
    normalizer = default_normalizer()

    phases = []
    for entry in spec["greenhouses"]:
        path = dataset_path(spec, entry, out_dir)
        if not path.exists():
            raise SpecError(f"dataset file not found: {path} (run `generate` first?)")
        records = read_records(path)
        samples = build_samples(records, entry["name"], window_len, stride, normalizer)
        if len(samples) <= test_size:
            raise SpecError(
                f"greenhouse {entry['name']!r}: {len(samples)} windows is not "
                f"enough for a test set of {test_size}"
            )
        rng = SeededRng(seed).split(f"test-sampling/{entry['name']}")
        test_idx = set(rng.sample_indices(len(samples), test_size))
        test_set = [samples[i] for i in sorted(test_idx)]
        stream = [s for i, s in enumerate(samples) if i not in test_idx]
        phases.append(Phase(label=entry["name"], stream=stream, test_set=test_set))
    return phases, normalizer


def build_scenario(spec: dict, phases: list[Phase]) -> ScenarioConfig:
    scenario = spec.get("scenario", {})
    cfg = ScenarioConfig(
        phases=phases,
        batch_size=scenario.get("batch_size", 100),
        replay_size=scenario.get("replay_size", 100),
        eval_every=scenario.get("eval_every", 3),
        test_size=scenario.get("test_size", 10000),
        seed=spec.get("seed", 0),
    )
    cfg.validate()
    return cfg
