"""Run configuration: a line-oriented ``key = value`` grammar with
``[section]`` headers and ``#`` comments."""

from __future__ import annotations

from dataclasses import dataclass, replace

__all__ = ["ConfigError", "RunConfig", "SmoothColumn", "parse_config", "emit_config"]

MODELS = ("linreg", "lmm", "sparse", "logistic")

DEFAULT_SIGSQ_BETA = 1e10
DEFAULT_A = 1e5


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SmoothColumn:
    name: str
    knots: int | None = None  # None means use the run-level default


@dataclass(frozen=True)
class RunConfig:
    model: str = "linreg"
    response: str = ""
    linear: tuple = ()
    smooth: tuple = ()  # of SmoothColumn
    group: tuple = ()
    sigsq_beta: float = DEFAULT_SIGSQ_BETA
    A_eps: float = DEFAULT_A
    A_u: float = DEFAULT_A
    A_rho: float = 1.0
    B_rho: float = 1.0
    n_warm: int = 100
    n_valid: int = 100
    scaling: bool = False
    out_dir: str = "out"
    threshold: float = 0.5
    cadence: int = 100
    densities: bool = False
    knots: int | None = None
    seed: int | None = None

    def validate(self) -> "RunConfig":
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}")
        if not self.response:
            raise ConfigError("a response column must be configured")
        seen = {}
        for role, names in (
            ("response", (self.response,)),
            ("linear", self.linear),
            ("smooth", tuple(s.name for s in self.smooth)),
            ("group", self.group),
        ):
            for name in names:
                if name in seen:
                    raise ConfigError(
                        f"column {name!r} assigned to both {seen[name]} and {role}"
                    )
                seen[name] = role
        for val, name in (
            (self.sigsq_beta, "sigsq_beta"),
            (self.A_eps, "A_eps"),
            (self.A_u, "A_u"),
            (self.A_rho, "A_rho"),
            (self.B_rho, "B_rho"),
            (self.threshold, "threshold"),
        ):
            if val <= 0:
                raise ConfigError(f"{name} must be positive")
        for val, name in (
            (self.n_warm, "n_warm"),
            (self.n_valid, "n_valid"),
            (self.cadence, "cadence"),
        ):
            if val < 1:
                raise ConfigError(f"{name} must be a positive count")
        if self.model in ("lmm", "logistic") and not (self.smooth or self.group):
            raise ConfigError(f"model {self.model!r} needs smooth or group columns")
        if self.model == "sparse" and not self.linear:
            raise ConfigError("sparse model needs linear (signal) columns")
        return self

    def all_columns(self) -> tuple:
        return (
            (self.response,)
            + self.linear
            + tuple(s.name for s in self.smooth)
            + self.group
        )


def _parse_bool(value, line_no):
    low = value.lower()
    if low in ("on", "true", "yes", "1"):
        return True
    if low in ("off", "false", "no", "0"):
        return False
    raise ConfigError(f"line {line_no}: expected on/off, got {value!r}")


def _parse_smooth(value, line_no):
    out = []
    for part in _split_list(value):
        if ":" in part:
            name, _, k = part.partition(":")
            try:
                k = int(k)
            except ValueError:
                raise ConfigError(f"line {line_no}: bad knot count in {part!r}") from None
            out.append(SmoothColumn(name.strip(), k))
        else:
            out.append(SmoothColumn(part, None))
    return tuple(out)


def _split_list(value):
    return tuple(p.strip() for p in value.split(",") if p.strip())


_SCALAR_KEYS = {
    ("hyper", "sigsq_beta"): ("sigsq_beta", float),
    ("hyper", "a"): ("A_eps", float),
    ("hyper", "a_eps"): ("A_eps", float),
    ("hyper", "a_u"): ("A_u", float),
    ("hyper", "a_rho"): ("A_rho", float),
    ("hyper", "b_rho"): ("B_rho", float),
    ("run", "n_warm"): ("n_warm", int),
    ("run", "n_valid"): ("n_valid", int),
    ("run", "out_dir"): ("out_dir", str),
    ("run", "threshold"): ("threshold", float),
    ("run", "cadence"): ("cadence", int),
    ("run", "knots"): ("knots", int),
    ("run", "seed"): ("seed", int),
}


def parse_config(text: str) -> RunConfig:
    """Parse config text, filling defaults; errors carry the line number."""
    cfg = RunConfig()
    section = None
    role_lines = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("model", "columns", "hyper", "run"):
                raise ConfigError(f"line {line_no}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected key = value, got {raw!r}")
        if section is None:
            raise ConfigError(f"line {line_no}: key outside any [section]")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()

        if section == "model" and key == "type":
            if value not in MODELS:
                raise ConfigError(f"line {line_no}: unknown model {value!r}")
            cfg = replace(cfg, model=value)
        elif section == "columns" and key in ("response", "linear", "smooth", "group"):
            for name in (
                (value,) if key == "response" else
                tuple(s.name for s in _parse_smooth(value, line_no)) if key == "smooth"
                else _split_list(value)
            ):
                if name in role_lines:
                    prev_role, prev_line = role_lines[name]
                    raise ConfigError(
                        f"line {line_no}: column {name!r} already assigned to "
                        f"{prev_role} on line {prev_line}"
                    )
                role_lines[name] = (key, line_no)
            if key == "response":
                cfg = replace(cfg, response=value)
            elif key == "linear":
                cfg = replace(cfg, linear=_split_list(value))
            elif key == "smooth":
                cfg = replace(cfg, smooth=_parse_smooth(value, line_no))
            else:
                cfg = replace(cfg, group=_split_list(value))
        elif section == "run" and key == "scaling":
            cfg = replace(cfg, scaling=_parse_bool(value, line_no))
        elif section == "run" and key == "densities":
            cfg = replace(cfg, densities=_parse_bool(value, line_no))
        elif (section, key) in _SCALAR_KEYS:
            attr, conv = _SCALAR_KEYS[(section, key)]
            try:
                cfg = replace(cfg, **{attr: conv(value)})
            except ValueError:
                raise ConfigError(f"line {line_no}: bad value {value!r} for {key}") from None
        else:
            raise ConfigError(f"line {line_no}: unknown key {key!r} in [{section}]")
    return cfg.validate()


def emit_config(cfg: RunConfig) -> str:
    """Render a config back to text; parse(emit(cfg)) equals cfg."""
    lines = ["[model]", f"type = {cfg.model}", "", "[columns]",
             f"response = {cfg.response}"]
    if cfg.linear:
        lines.append("linear = " + ", ".join(cfg.linear))
    if cfg.smooth:
        lines.append(
            "smooth = "
            + ", ".join(
                s.name if s.knots is None else f"{s.name}:{s.knots}" for s in cfg.smooth
            )
        )
    if cfg.group:
        lines.append("group = " + ", ".join(cfg.group))
    lines += [
        "",
        "[hyper]",
        f"sigsq_beta = {cfg.sigsq_beta!r}",
        f"a_eps = {cfg.A_eps!r}",
        f"a_u = {cfg.A_u!r}",
        f"a_rho = {cfg.A_rho!r}",
        f"b_rho = {cfg.B_rho!r}",
        "",
        "[run]",
        f"n_warm = {cfg.n_warm}",
        f"n_valid = {cfg.n_valid}",
        f"scaling = {'on' if cfg.scaling else 'off'}",
        f"out_dir = {cfg.out_dir}",
        f"threshold = {cfg.threshold!r}",
        f"cadence = {cfg.cadence}",
        f"densities = {'on' if cfg.densities else 'off'}",
    ]
    if cfg.knots is not None:
        lines.append(f"knots = {cfg.knots}")
    if cfg.seed is not None:
        lines.append(f"seed = {cfg.seed}")
    return "\n".join(lines) + "\n"
