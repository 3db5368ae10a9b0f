"""Scenario config files: a flat INI grammar mapped onto `ScenarioConfig`.

A config file holds a ``[scenario]`` section (identity, model sizes,
trials, seed, methods), a ``[grid]`` section (swept parameter and values)
and an optional ``[params]`` section overriding scenario-specific knobs.
See the README for the full grammar and the bundled files under
``sdcount/configs`` for working references.
"""

import configparser
from importlib import resources

from .simkit import ScenarioConfig

__all__ = ["load_config", "dump_config", "bundled_config_path"]

_SCENARIO_KEYS = {
    "id": int,
    "sensors": int,
    "trials": int,
    "seed": int,
}

_PARAM_KEYS = {
    "samples": int,
    "samples_per_k": int,
    "sigma2_db_per_k": float,
    "sigma2_db": float,
    "sigma0_db": float,
    "delta_db": float,
    "dominant_variance_db": float,
    "rho": float,
    "smallest_singular_value": float,
    "rmt_alpha": float,
}


def _split_list(text):
    return tuple(item.strip() for item in text.split(",") if item.strip())


def _parse(parser, path):
    if "scenario" not in parser or "grid" not in parser:
        raise ValueError(f"{path}: config needs [scenario] and [grid] sections")
    scen = parser["scenario"]
    grid = parser["grid"]
    try:
        kwargs = {
            "scenario_id": scen.getint("id"),
            "sensors": scen.getint("sensors"),
            "source_counts": tuple(int(v) for v in _split_list(scen["sources"])),
            "source_laws": _split_list(scen["source_laws"]),
            "mixing": scen.get("mixing", "gaussian"),
            "trials": scen.getint("trials"),
            "base_seed": scen.getint("seed"),
            "grid_param": grid["parameter"],
            "grid_values": tuple(float(v) for v in _split_list(grid["values"])),
        }
        if "methods" in scen:
            kwargs["methods"] = _split_list(scen["methods"])
        if "params" in parser:
            for key, value in parser["params"].items():
                if key not in _PARAM_KEYS:
                    raise ValueError(f"unknown [params] key {key!r}")
                kwargs[key] = _PARAM_KEYS[key](value)
        return ScenarioConfig(**kwargs)
    except (KeyError, configparser.NoOptionError) as exc:
        raise ValueError(f"{path}: missing config key: {exc}") from exc
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def load_config(path):
    """Parse a scenario config file into a validated `ScenarioConfig`.

    ``path`` may be a filesystem path or the name of a bundled config
    (``scenario1`` or ``scenario1.cfg``).
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    text = _read_config_text(path)
    parser.read_string(text)
    return _parse(parser, path)


def _read_config_text(path):
    import os

    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    name = str(path)
    if not name.endswith(".cfg"):
        name += ".cfg"
    base = os.path.basename(name)
    bundle = resources.files("sdcount") / "configs" / base
    if bundle.is_file():
        return bundle.read_text(encoding="utf-8")
    raise ValueError(f"config file not found: {path}")


def bundled_config_path(name):
    """Filesystem path of a bundled scenario config (for display/copying)."""
    if not name.endswith(".cfg"):
        name += ".cfg"
    return str(resources.files("sdcount") / "configs" / name)


def dump_config(config):
    """Serialize a `ScenarioConfig` back to the INI grammar."""
    lines = [
        "[scenario]",
        f"id = {config.scenario_id}",
        f"sensors = {config.sensors}",
        "sources = " + ", ".join(str(m) for m in config.source_counts),
        "source_laws = " + ", ".join(config.source_laws),
        f"mixing = {config.mixing}",
        f"trials = {config.trials}",
        f"seed = {config.base_seed}",
        "methods = " + ", ".join(config.methods),
        "",
        "[grid]",
        f"parameter = {config.grid_param}",
        "values = " + ", ".join(repr(v) for v in config.grid_values),
        "",
        "[params]",
        f"samples = {config.samples}",
        f"samples_per_k = {config.samples_per_k}",
        f"sigma2_db_per_k = {config.sigma2_db_per_k!r}",
        f"sigma2_db = {config.sigma2_db!r}",
        f"sigma0_db = {config.sigma0_db!r}",
        f"delta_db = {config.delta_db!r}",
        f"dominant_variance_db = {config.dominant_variance_db!r}",
        f"rho = {config.rho!r}",
        f"smallest_singular_value = {config.smallest_singular_value!r}",
        f"rmt_alpha = {config.rmt_alpha!r}",
    ]
    return "\n".join(lines) + "\n"
