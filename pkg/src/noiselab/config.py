"""Run configuration: one JSON file carrying the code and noise blocks.

Configurations are validated against the schema shipped with the package;
reports embed the SHA-256 of the canonicalized configuration so results can
be traced back to their inputs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources

import jsonschema

from .codes import (
    CodeGroups,
    DataSyndromeSpec,
    build_data_syndrome_code,
    build_stabilizer_code,
    build_subsystem_code,
    builtin_code,
)
from .errors import ConfigError
from .noise import LocalChannel, NoiseModel, local_channel
from .pauli import parse_element


def _schema() -> dict:
    text = resources.files("noiselab.schema").joinpath("config.schema.json").read_text()
    return json.loads(text)


@dataclass(frozen=True)
class RunConfig:
    code: CodeGroups
    model: NoiseModel
    raw: dict
    sha256: str


def config_hash(raw: dict) -> str:
    canon = json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(canon).hexdigest()


def build_code(block: dict) -> CodeGroups:
    if "builtin" in block:
        params = {k: v for k, v in block.items() if k != "builtin"}
        try:
            return builtin_code(block["builtin"], **params)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    kind = block["kind"]
    n = block["n"]
    try:
        gens = [parse_element(s, ambient=(n, 0)) for s in block["generators"]]
    except ValueError as exc:
        raise ConfigError(f"bad generator: {exc}") from exc
    try:
        if kind == "stabilizer":
            return build_stabilizer_code(gens, name="custom")
        if kind == "subsystem":
            return build_subsystem_code(gens, name="custom")
        if kind == "data-syndrome":
            selection = block.get("redundancy")
            if selection is None:
                raise ConfigError("data-syndrome code needs a 'redundancy' block")
            for picks in selection:
                for j in picks:
                    if j >= len(gens):
                        raise ConfigError(
                            f"redundancy index {j} out of range for "
                            f"{len(gens)} generators"
                        )
            spec = DataSyndromeSpec(
                base_generators=tuple(gens),
                selection=tuple(tuple(p) for p in selection),
            )
            return build_data_syndrome_code(spec, name="custom-ds")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown code kind {kind!r}")


def build_noise(block: dict, code: CodeGroups, measurement_noise: dict | None) -> NoiseModel:
    ambient = code.ambient
    channels: list[LocalChannel] = []
    for i, ch in enumerate(block.get("channels", [])):
        try:
            channels.append(local_channel(ch["support"], ch["probs"], ambient))
        except ValueError as exc:
            raise ConfigError(f"channel {i}: {exc}") from exc
    if measurement_noise is not None:
        if code.kind != "data-syndrome":
            raise ConfigError(
                "measurement_noise requires a data-syndrome code"
            )
        m = code.n_bits
        rates = measurement_noise.get("rates")
        if rates is None:
            q = measurement_noise.get("q")
            if q is None:
                raise ConfigError("measurement_noise needs 'q' or 'rates'")
            rates = [q] * m
        if len(rates) != m:
            raise ConfigError(
                f"measurement_noise has {len(rates)} rates for {m} measurements"
            )
        for j, q in enumerate(rates):
            channels.append(
                local_channel([code.n_pauli + j], {"0": 1 - q, "1": q}, ambient)
            )
    return NoiseModel(channels=tuple(channels), n_pauli=ambient[0], n_bits=ambient[1])


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return parse_config(raw)


def parse_config(raw: dict) -> RunConfig:
    try:
        jsonschema.validate(raw, _schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {path}: {exc.message}") from exc
    code = build_code(raw["code"])
    model = build_noise(raw["noise"], code, raw.get("measurement_noise"))
    return RunConfig(code=code, model=model, raw=raw, sha256=config_hash(raw))
