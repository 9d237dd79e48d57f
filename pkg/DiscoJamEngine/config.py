import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from .dirs import DirsProfile, JammerMode
from .exceptions import ConfigError
from .harness import ExperimentSpec
from .scenario import ScenarioConfig
from .utils import dbm_to_watts

__all__ = ("load_config", "spec_from_dict", "apply_overrides")

log = logging.getLogger(__name__)

_SCENARIO_KEYS = {
    "num_users",
    "num_antennas",
    "num_elements",
    "ap_dirs_distance",
    "wavelength",
    "spacing",
    "bandwidth",
    "frame_ratio",
    "rician_factors",
    "lu_center",
    "lu_radius",
    "seed",
}
_POWER_KEYS = {"tx_power_dbm", "tx_power_per_lu_dbm", "noise_power_dbm"}
_PROFILE_KEYS = {"case", "bits", "phases", "gains", "probs", "ideal"}
_EXPERIMENT_KEYS = {
    "benchmarks",
    "mode",
    "sweep",
    "drops",
    "realizations",
    "seed",
    "realized",
    "feedback_model",
    "feedback_count",
    "feedback_noise",
    "jammer_position",
}


def _check_keys(section: str, data: Dict[str, Any], allowed) -> None:
    if not isinstance(data, dict):
        raise ConfigError(section, "must be a JSON object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(section, f"unknown keys {', '.join(unknown)}")


def _scenario(data: Dict[str, Any]) -> ScenarioConfig:
    _check_keys("scenario", data, _SCENARIO_KEYS | _POWER_KEYS)
    if "tx_power_dbm" in data and "tx_power_per_lu_dbm" in data:
        raise ConfigError("scenario", "give tx_power_dbm or tx_power_per_lu_dbm, not both")
    fields = {k: v for k, v in data.items() if k in _SCENARIO_KEYS}
    for key in ("lu_center", "rician_factors"):
        if isinstance(fields.get(key), list):
            fields[key] = tuple(fields[key])
    if "noise_power_dbm" in data:
        fields["noise_power"] = float(dbm_to_watts(data["noise_power_dbm"]))
    if "tx_power_dbm" in data:
        fields["tx_power"] = float(dbm_to_watts(data["tx_power_dbm"]))
    if "tx_power_per_lu_dbm" in data:
        return ScenarioConfig.with_power_per_lu(data["tx_power_per_lu_dbm"], **fields)
    return ScenarioConfig(**fields)


def _profile(data: Dict[str, Any], mode: JammerMode) -> Optional[DirsProfile]:
    _check_keys("profile", data, _PROFILE_KEYS)
    if "case" in data:
        if set(data) - {"case"}:
            raise ConfigError("profile", "a named case takes no other keys")
        return None
    if not data:
        return None
    if "bits" not in data:
        raise ConfigError("profile", "a custom profile needs bits")
    bits = int(data["bits"])
    if "phases" in data:
        size = 2**bits
        return DirsProfile(
            bits,
            data["phases"],
            data.get("gains", [1.0] * size),
            data.get("probs", [1.0 / size] * size),
            mode,
        )
    return DirsProfile.uniform(bits, gains=data.get("gains"), probs=data.get("probs"), mode=mode)


def spec_from_dict(document: Dict[str, Any]) -> ExperimentSpec:
    """
    Build an experiment from a parsed JSON document.

    The document may hold three sections, each optional:

    - ``scenario``: `ScenarioConfig` fields, with powers given in dBm as
      ``tx_power_dbm``, ``tx_power_per_lu_dbm`` or ``noise_power_dbm``.
    - ``profile``: ``{"case": "c1"}``, or a custom alphabet with ``bits`` and
      optionally ``phases`` (radians), ``gains`` and ``probs``.
    - ``experiment``: `ExperimentSpec` fields such as ``benchmarks``, ``mode``,
      ``sweep``, ``drops`` and ``realizations``.

    Raises
    ------
    ConfigError
        A section is malformed, has unknown keys, or a value is out of range.
    """
    _check_keys("config", document, {"scenario", "profile", "experiment"})
    experiment = dict(document.get("experiment", {}))
    _check_keys("experiment", experiment, _EXPERIMENT_KEYS)
    profile_data = dict(document.get("profile", {}))

    scenario = _scenario(dict(document.get("scenario", {})))
    mode = JammerMode.parse(experiment.pop("mode", JammerMode.PERSISTENT))
    profile = _profile(profile_data, mode)
    if "jammer_position" in experiment:
        experiment["jammer_position"] = tuple(experiment["jammer_position"])
    if profile is not None:
        case = f"custom-{profile.bits}bit"
    else:
        case = profile_data.get("case", "c2")
    try:
        return ExperimentSpec(
            scenario=scenario, mode=mode, case=case, profile=profile, **experiment
        )
    except TypeError as error:
        raise ConfigError("experiment", str(error)) from error


def load_config(path: Union[str, Path]) -> ExperimentSpec:
    """
    Read an experiment from a JSON file; see `spec_from_dict` for the layout.

    Raises
    ------
    ConfigError
        The file is missing, is not valid JSON, or describes an invalid experiment.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        raise ConfigError("config", f"cannot read {path}: {error.strerror}") from error
    try:
        document = json.loads(text)
    except json.JSONDecodeError as error:
        raise ConfigError("config", f"{path} is not valid JSON: {error.msg}") from error
    log.debug("loaded experiment from %s", path)
    return spec_from_dict(document)


def apply_overrides(spec: ExperimentSpec, **overrides) -> ExperimentSpec:
    """
    Replace fields of ``spec`` with the overrides that are not ``None``.

    ``seed`` sets the experiment seed; ``case`` drops a custom profile in favour of
    the named preset.
    """
    changes = {k: v for k, v in overrides.items() if v is not None}
    if "case" in changes:
        changes["profile"] = None
    unknown = set(changes) - set(spec.__dataclass_fields__)
    if unknown:
        raise ConfigError("overrides", f"unknown fields {', '.join(sorted(unknown))}")
    if changes:
        log.debug("overriding %s", ", ".join(sorted(changes)))
    return spec.replace(**changes)
