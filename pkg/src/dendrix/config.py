"""Config files: a small sectioned key=value format with line tracking.

The format is deliberately tiny::

    # comment
    [grid]
    n = 128
    dim = 2

Sections group keys; ``#`` starts a comment anywhere on a line; values
are whitespace-separated tokens for list-valued keys. A ``[desk]``
section holds dotted overrides (``time.n_steps = 500``) that apply only
when the desk preset is selected, shrinking a full experiment to
something that finishes on a laptop. Every parse error carries the key
and line number so the CLI can point at the exact spot.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .manufactured import ManufacturedCase, anisotropic_case, isotropic_case
from .model import ModelParams
from .simulation import InitialCondition, SimConfig
from .spectral import Grid

__all__ = [
    "KEYS",
    "KeySpec",
    "RawConfig",
    "read_config",
    "parse_text",
    "load_config",
    "build_sim_config",
    "build_study",
    "list_presets",
    "resolve_config",
]

PRESETS = ("full", "desk")


@dataclass(frozen=True)
class KeySpec:
    """Type and default for one config key ('section.name')."""

    kind: str  # int | float | bool | str | floats
    default: object = None
    choices: tuple = ()
    required: bool = False


KEYS = {
    "grid.n": KeySpec("int", required=True),
    "grid.dim": KeySpec("int", default=2, choices=(2, 3)),
    "model.tau": KeySpec("float", required=True),
    "model.eps": KeySpec("float", required=True),
    "model.lam": KeySpec("float", required=True),
    "model.latent_heat": KeySpec("float", required=True),
    "model.diffusivity": KeySpec("float", required=True),
    "model.sigma": KeySpec("float", default=0.0),
    "model.folds": KeySpec("int", default=4),
    "model.form": KeySpec("str", default="quartic", choices=("quartic", "trig")),
    "model.s1": KeySpec("float", default=0.0),
    "model.s2": KeySpec("float", default=0.0),
    "model.grad_reg": KeySpec("float", default=1e-12),
    "time.dt": KeySpec("float", required=True),
    "time.n_steps": KeySpec("int", required=True),
    "scheme.order": KeySpec("int", default=1, choices=(1, 2, 3)),
    "scheme.dealias": KeySpec("bool", default=False),
    "initial.kind": KeySpec(
        "str",
        required=True,
        choices=("single_nucleus", "three_nuclei", "nucleus_3d", "manufactured"),
    ),
    "initial.center": KeySpec("floats", default=()),
    "initial.centers": KeySpec("floats", default=()),
    "initial.radius": KeySpec("float", default=0.0),
    "initial.width": KeySpec("float", default=0.0),
    "initial.u_cold": KeySpec("float", default=-0.55),
    "initial.u_fill": KeySpec("str", default="sign", choices=("sign", "uniform")),
    "output.dir": KeySpec("str", default="out"),
    "output.snapshot_every": KeySpec("int", default=100),
    "output.diagnostics_every": KeySpec("int", default=1),
    "output.seed": KeySpec("int", default=0),
    "stability.dts": KeySpec("floats", default=(0.05, 0.1, 0.5, 1.0)),
    "case.name": KeySpec("str", choices=("isotropic", "anisotropic")),
    "case.dts": KeySpec("floats", default=()),
    "case.t_end": KeySpec("float", default=1.0),
    "case.n": KeySpec("int", default=128),
}

_SECTIONS = {key.split(".")[0] for key in KEYS} | {"desk"}


def _coerce(key: str, raw: str, line):
    spec = KEYS[key]
    try:
        if spec.kind == "int":
            value = int(raw)
        elif spec.kind == "float":
            value = float(raw)
        elif spec.kind == "bool":
            token = raw.strip().lower()
            if token in ("true", "yes", "on", "1"):
                value = True
            elif token in ("false", "no", "off", "0"):
                value = False
            else:
                raise ValueError(f"not a boolean: {raw!r}")
        elif spec.kind == "floats":
            value = tuple(float(tok) for tok in raw.split())
        else:
            value = raw.strip()
    except ValueError as exc:
        raise ConfigError(f"cannot parse value for {key}: {exc}",
                          key=key, line=line)
    if spec.choices and value not in spec.choices:
        raise ConfigError(
            f"{key} must be one of {spec.choices}, got {value!r}",
            key=key, line=line,
        )
    return value


@dataclass
class RawConfig:
    """Parsed key/value pairs plus where each one came from."""

    origin: str
    values: dict  # key -> coerced value
    lines: dict   # key -> line number
    desk: dict    # dotted key -> (coerced value, line number)

    def get(self, key: str):
        if key not in KEYS:
            raise KeyError(key)
        if key in self.values:
            return self.values[key]
        return KEYS[key].default

    def has(self, key: str) -> bool:
        return key in self.values

    def require(self, key: str):
        if key not in self.values and KEYS[key].required:
            raise ConfigError(f"missing required key {key}", key=key)
        return self.get(key)

    def set(self, key: str, value, line=None):
        self.values[key] = value
        self.lines[key] = line


def parse_text(text: str, origin: str = "<config>") -> RawConfig:
    """Parse config text; raises ConfigError with line numbers on problems."""
    values, lines, desk = {}, {}, {}
    section = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(
                    f"unknown section [{section}]", key=section, line=lineno
                )
            continue
        if "=" not in line:
            raise ConfigError(
                f"expected 'key = value', got {line!r}", line=lineno
            )
        if section is None:
            raise ConfigError(
                "key outside any [section]", line=lineno
            )
        name, raw_value = (part.strip() for part in line.split("=", 1))
        if section == "desk":
            if name not in KEYS:
                raise ConfigError(f"unknown key {name} in [desk]",
                                  key=name, line=lineno)
            if name in desk:
                raise ConfigError(f"duplicate key {name} in [desk]",
                                  key=name, line=lineno)
            desk[name] = (_coerce(name, raw_value, lineno), lineno)
            continue
        key = f"{section}.{name}"
        if key not in KEYS:
            raise ConfigError(f"unknown key {key}", key=key, line=lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key}", key=key, line=lineno)
        values[key] = _coerce(key, raw_value, lineno)
        lines[key] = lineno
    return RawConfig(origin=origin, values=values, lines=lines, desk=desk)


def read_config(path) -> RawConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    return parse_text(text, origin=str(path))


def list_presets():
    """Names of the configs shipped inside the package."""
    root = resources.files("dendrix.presets")
    return sorted(
        entry.name[: -len(".cfg")]
        for entry in root.iterdir()
        if entry.name.endswith(".cfg")
    )


def resolve_config(name_or_path) -> RawConfig:
    """Load a config from a file path or a packaged preset name."""
    path = Path(name_or_path)
    if path.exists():
        return read_config(path)
    root = resources.files("dendrix.presets")
    candidate = root.joinpath(f"{name_or_path}.cfg")
    if candidate.is_file():
        return parse_text(candidate.read_text(), origin=f"preset:{name_or_path}")
    raise ConfigError(
        f"config {name_or_path!r} is neither a file nor a preset "
        f"(presets: {', '.join(list_presets())})"
    )


def apply_preset(cfg: RawConfig, preset: str) -> None:
    if preset not in PRESETS:
        raise ConfigError(f"preset must be one of {PRESETS}, got {preset!r}")
    if preset == "desk":
        for key, (value, line) in cfg.desk.items():
            cfg.set(key, value, line)


def apply_overrides(cfg: RawConfig, overrides) -> None:
    """Apply --set style 'section.key=value' pairs, last writer wins."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(
                f"override {item!r} must look like section.key=value"
            )
        key, raw = (part.strip() for part in item.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown key {key} in override", key=key)
        cfg.set(key, _coerce(key, raw, None), None)


def load_config(name_or_path, *, preset="full", overrides=()) -> RawConfig:
    """One-stop loader: resolve, apply desk overlay, apply overrides."""
    cfg = resolve_config(name_or_path)
    apply_preset(cfg, preset)
    apply_overrides(cfg, overrides)
    return cfg


def _default_center(dim: int):
    import math

    return (math.pi,) * dim


def _grouped_centers(flat, dim: int, key: str, line):
    if len(flat) % dim != 0:
        raise ConfigError(
            f"{key} needs coordinates in groups of {dim}, got {len(flat)} values",
            key=key, line=line,
        )
    return tuple(tuple(flat[i : i + dim]) for i in range(0, len(flat), dim))


def build_sim_config(cfg: RawConfig, out_dir=None) -> SimConfig:
    """Assemble a validated SimConfig from parsed values.

    ``out_dir`` (for example from ``--out``) replaces ``output.dir``.
    """
    for key, spec in KEYS.items():
        if spec.required and not cfg.has(key):
            raise ConfigError(f"missing required key {key}", key=key)

    dim = cfg.get("grid.dim")
    # Constructor validation (grid sizes, parameter signs, ...) raises
    # ValueError; surface it as a configuration problem, not a crash.
    try:
        return _assemble(cfg, dim, out_dir)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _assemble(cfg: RawConfig, dim: int, out_dir) -> SimConfig:
    grid = Grid((cfg.get("grid.n"),) * dim)
    params = ModelParams(
        tau=cfg.get("model.tau"),
        eps=cfg.get("model.eps"),
        lam=cfg.get("model.lam"),
        latent_heat=cfg.get("model.latent_heat"),
        diffusivity=cfg.get("model.diffusivity"),
        sigma=cfg.get("model.sigma"),
        folds=cfg.get("model.folds"),
        aniso_form=cfg.get("model.form"),
        s1=cfg.get("model.s1"),
        s2=cfg.get("model.s2"),
        grad_reg=cfg.get("model.grad_reg"),
    )

    kind = cfg.get("initial.kind")
    if kind == "three_nuclei":
        flat = cfg.get("initial.centers")
        if not flat:
            raise ConfigError("three_nuclei needs initial.centers",
                              key="initial.centers")
        centers = _grouped_centers(flat, dim, "initial.centers",
                                   cfg.lines.get("initial.centers"))
    elif kind == "manufactured":
        centers = ()
    else:
        flat = cfg.get("initial.center") or _default_center(dim)
        centers = _grouped_centers(flat, dim, "initial.center",
                                   cfg.lines.get("initial.center"))
        if len(centers) != 1:
            raise ConfigError(
                f"initial.center must name one point, got {len(centers)}",
                key="initial.center", line=cfg.lines.get("initial.center"),
            )
    initial = InitialCondition(
        kind=kind,
        centers=centers,
        radius=cfg.get("initial.radius"),
        width=cfg.get("initial.width"),
        u_cold=cfg.get("initial.u_cold"),
        u_fill=cfg.get("initial.u_fill"),
    )

    return SimConfig(
        grid=grid,
        params=params,
        dt=cfg.get("time.dt"),
        n_steps=cfg.get("time.n_steps"),
        initial=initial,
        out_dir=Path(out_dir) if out_dir is not None else Path(cfg.get("output.dir")),
        order=cfg.get("scheme.order"),
        dealias=cfg.get("scheme.dealias"),
        snapshot_every=cfg.get("output.snapshot_every"),
        diagnostics_every=cfg.get("output.diagnostics_every"),
        seed=cfg.get("output.seed"),
    )


def build_study(cfg: RawConfig):
    """Pull the convergence-study case out of a config's [case] section.

    Returns ``(case, dts)`` ready for
    :func:`dendrix.manufactured.convergence_study`.
    """
    if not cfg.has("case.name"):
        raise ConfigError("missing required key case.name", key="case.name")
    name = cfg.get("case.name")
    n = cfg.get("case.n")
    t_end = cfg.get("case.t_end")
    dts = cfg.get("case.dts")
    if len(dts) < 2:
        raise ConfigError("case.dts needs at least two step sizes",
                          key="case.dts", line=cfg.lines.get("case.dts"))
    builder = isotropic_case if name == "isotropic" else anisotropic_case
    try:
        case = builder(n=n, final_time=t_end)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return case, dts
