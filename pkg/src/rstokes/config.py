"""Problem configuration: JSON schema, validation, builders and the
deterministic output helpers shared by the CLI.

A problem file describes the operator, the initial data, the viscoelastic
constant and either a forward run (alpha given) or a recovery run (t0 and d0
given) -- exactly one of the two.  All outputs embed the resolved config and
its hash so a result file identifies the run that produced it.
"""

from __future__ import annotations

import hashlib
import json
import os
from importlib import resources
from typing import Any

import numpy as np

from .errors import DomainError
from .operators import (
    InitialData,
    ObservationWeights,
    SpectralOperator,
    dirichlet_interval,
    dirichlet_rectangle,
    expand,
    matrix_operator,
    observation_weights,
)
from .quadrature import QuadratureConfig

__all__ = [
    "ConfigError",
    "load_problem",
    "validate_problem",
    "build_operator",
    "build_initial_data",
    "build_weights",
    "build_quadrature_config",
    "config_hash",
    "format_float",
    "write_csv",
    "write_json",
    "output_dir",
    "TOOLKIT_VERSION",
]

TOOLKIT_VERSION = "0.1.0"
OUTPUT_DIR_ENV = "RSTOKES_OUTPUT_DIR"


class ConfigError(DomainError):
    """Problem file failed validation."""


PROBLEM_SCHEMA: dict[str, Any] = json.loads(
    resources.files("rstokes").joinpath("problem.schema.json").read_text(encoding="utf-8")
)


def validate_problem(cfg: dict) -> dict:
    """Validate against the schema plus the cross-field rules the schema
    cannot express (forward xor inverse, operator parameter completeness)."""
    import jsonschema

    try:
        jsonschema.validate(cfg, PROBLEM_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"problem file invalid: {exc.message}") from exc

    has_alpha = "alpha" in cfg
    has_obs = "observation" in cfg
    if has_alpha == has_obs:
        raise ConfigError("exactly one of 'alpha' (forward) or 'observation' (inverse) is required")

    op = cfg["operator"]
    kind = op["kind"]
    if kind == "interval" and not ({"L", "K"} <= op.keys()):
        raise ConfigError("interval operator needs L and K")
    if kind == "rectangle" and not ({"Lx", "Ly", "K"} <= op.keys()):
        raise ConfigError("rectangle operator needs Lx, Ly and K")
    if kind == "matrix" and "matrix" not in op:
        raise ConfigError("matrix operator needs the matrix entries")
    if "observation" in cfg and "alpha_bracket" in cfg["observation"]:
        lo, hi = cfg["observation"]["alpha_bracket"]
        if not (0.0 < lo < hi < 1.0):
            raise ConfigError("alpha_bracket must satisfy 0 < lo < hi < 1")
    return cfg


def load_problem(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read problem file {path}: {exc}") from exc
    return validate_problem(cfg)


def build_operator(cfg: dict) -> SpectralOperator:
    op = cfg["operator"]
    kind = op["kind"]
    if kind == "interval":
        return dirichlet_interval(op["L"], op["K"])
    if kind == "rectangle":
        return dirichlet_rectangle(op["Lx"], op["Ly"], op["K"])
    return matrix_operator(np.array(op["matrix"], dtype=float))


def build_initial_data(op: SpectralOperator, cfg: dict) -> InitialData:
    spec = cfg["initial_data"]
    if "coefficients" in spec:
        coeffs = np.asarray(spec["coefficients"], dtype=float)
        if op.kind == "matrix":
            out = np.zeros(op.truncation)
            out[: coeffs.size] = coeffs
            return InitialData(out)
        return expand(op, coeffs)
    profile = spec["profile"]
    if profile == "first-mode":
        out = np.zeros(op.truncation)
        out[0] = 1.0
        return InitialData(out)
    # parabola: x (L - x) on the interval, separable product on the rectangle
    if op.kind == "interval":
        (L,) = op.domain
        return expand(op, lambda x: x * (L - x))
    if op.kind == "rectangle":
        Lx, Ly = op.domain
        return expand(op, lambda x, y: x * (Lx - x) * y * (Ly - y))
    raise ConfigError("profile initial data is not defined for the matrix operator")


def build_weights(op: SpectralOperator, cfg: dict) -> ObservationWeights:
    if "observation" in cfg:
        label = cfg["observation"].get("weights", "one")
    else:
        label = cfg.get("weights", "one")
    return observation_weights(label, op)


def build_quadrature_config(cfg: dict) -> QuadratureConfig:
    q = cfg.get("quadrature", {})
    return QuadratureConfig(
        rel_tol=q.get("rel_tol", 1e-10),
        abs_tol=q.get("abs_tol", 1e-14),
        max_panels=q.get("max_panels", 200),
        panel_order=q.get("panel_order", 15),
    )


def t_grid_from(cfg: dict) -> np.ndarray:
    spec = cfg.get("t_grid")
    if spec is None:
        raise ConfigError("forward run needs a t_grid")
    if isinstance(spec, dict):
        return np.linspace(spec["min"], spec["max"], spec["n"])
    return np.asarray(spec, dtype=float)


def config_hash(obj: Any) -> str:
    canonical = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def format_float(x: float) -> str:
    return f"{x:.17g}"


def output_dir(cfg: dict | None = None, override: str | None = None) -> str:
    """Output directory resolution: CLI override, then the environment
    variable, then the problem file, then the working directory."""
    if override:
        return override
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return env
    if cfg and "output" in cfg and "dir" in cfg["output"]:
        return cfg["output"]["dir"]
    return "."


def write_csv(path: str, header: list[str], rows, meta: dict) -> None:
    """CSV with LF endings, 17-significant-digit floats, and leading comment
    lines carrying the toolkit version, config hash and resolved config."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    lines = [
        f"# toolkit_version={TOOLKIT_VERSION}",
        f"# config_hash={config_hash(meta)}",
        f"# config={json.dumps(meta, sort_keys=True, separators=(',', ':'))}",
        ",".join(header),
    ]
    for row in rows:
        lines.append(",".join(format_float(v) if isinstance(v, float) else str(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(path: str, payload: dict, meta: dict) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    body = {
        "toolkit_version": TOOLKIT_VERSION,
        "config_hash": config_hash(meta),
        "config": meta,
        **payload,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")


def schema_json() -> str:
    return json.dumps(PROBLEM_SCHEMA, indent=2, sort_keys=True)
