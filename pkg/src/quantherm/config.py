"""Run and sweep configuration: flat key=value files, presets, validation.

Config files are plain text, one `key = value` per line, `#` comments allowed.
A `schema_version` field is mandatory and unknown keys are errors, so typos
fail loudly instead of being absorbed.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Complete description of a single simulation run."""

    system: str  # "cavity" or "tls"
    kT0: float
    t_max: float
    h: float
    stride: int = 10
    # cavity parameters
    eta: float | None = None
    omega_c: float | None = None
    n0: int | None = None
    # two-level-system parameters
    gamma0: float | None = None
    lam: float | None = None
    omega0: float = 1.0
    excited: bool = True
    verify_step: bool = False

    def __post_init__(self):
        if self.system not in ("cavity", "tls"):
            raise ConfigError(f"system must be 'cavity' or 'tls', got {self.system!r}")
        if self.kT0 < 0:
            raise ConfigError(f"kT0 must be >= 0, got {self.kT0}")
        if self.h <= 0 or self.t_max <= 0:
            raise ConfigError("h and t_max must be positive")
        n = self.n_steps
        if abs(n * self.h - self.t_max) > 1e-9 * max(1.0, self.t_max):
            raise ConfigError(
                f"t_max = {self.t_max} is not an integer number of steps h = {self.h}"
            )
        if n < 2:
            raise ConfigError("grid must have at least 2 steps")
        if self.stride < 1 or n % self.stride != 0:
            raise ConfigError(
                f"output stride {self.stride} must divide n_steps {n}"
            )
        if self.system == "cavity":
            if self.eta is None or self.omega_c is None or self.n0 is None:
                raise ConfigError("cavity runs require eta, omega_c and n0")
            if self.eta <= 0 or self.omega_c <= 0:
                raise ConfigError("eta and omega_c must be positive")
            if self.n0 < 0:
                raise ConfigError(f"n0 must be >= 0, got {self.n0}")
        else:
            if self.gamma0 is None or self.lam is None:
                raise ConfigError("tls runs require gamma0 and lam")
            if self.gamma0 <= 0 or self.lam <= 0:
                raise ConfigError("gamma0 and lam must be positive")
            if not self.excited:
                raise ConfigError("only the initially-excited tls preparation is supported")
            if self.kT0 != 0.0:
                raise ConfigError("the tls model is defined for a vacuum reservoir (kT0 = 0)")

    @property
    def n_steps(self) -> int:
        return round(self.t_max / self.h)

    def to_dict(self) -> dict:
        """Flat, ordered mapping of only the keys relevant to this run."""
        out = {"schema_version": SCHEMA_VERSION, "system": self.system}
        if self.system == "cavity":
            out.update(eta=self.eta, omega_c=self.omega_c, n0=self.n0)
        else:
            out.update(gamma0=self.gamma0, lam=self.lam, omega0=self.omega0)
        out.update(
            kT0=self.kT0, t_max=self.t_max, h=self.h, stride=self.stride,
            verify_step=self.verify_step,
        )
        return out

    def to_text(self) -> str:
        lines = []
        for key, value in self.to_dict().items():
            if isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SweepConfig:
    """A base run plus one swept parameter."""

    base: RunConfig
    sweep_key: str  # "kT0" | "eta" | "n0"
    values: tuple
    workers: int | None = None

    def __post_init__(self):
        if self.sweep_key not in ("kT0", "eta", "n0"):
            raise ConfigError(f"sweep_key must be kT0, eta or n0, got {self.sweep_key!r}")
        if len(self.values) == 0:
            raise ConfigError("sweep value list must be nonempty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigError("sweep values must be strictly increasing")

    def member(self, value) -> RunConfig:
        if self.sweep_key == "n0":
            value = int(value)
        return replace(self.base, **{self.sweep_key: value})


_RUN_FIELDS = {
    "schema_version": int,
    "system": str,
    "kT0": float,
    "t_max": float,
    "h": float,
    "stride": int,
    "eta": float,
    "omega_c": float,
    "n0": int,
    "gamma0": float,
    "lam": float,
    "omega0": float,
    "excited": bool,
    "verify_step": bool,
}
_SWEEP_FIELDS = {"sweep_key": str, "sweep_values": str, "workers": int}


def _parse_bool(raw: str) -> bool:
    if raw.lower() in ("true", "1", "yes"):
        return True
    if raw.lower() in ("false", "0", "no"):
        return False
    raise ConfigError(f"cannot parse boolean from {raw!r}")


def _parse_items(text: str, allowed: dict) -> dict:
    items = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in allowed:
            raise ConfigError(
                f"line {lineno}: unknown key {key!r}; valid keys: {', '.join(sorted(allowed))}"
            )
        if key in items:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        typ = allowed[key]
        try:
            items[key] = _parse_bool(raw) if typ is bool else typ(raw)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {raw!r}") from exc
    return items


def _build_run(items: dict) -> RunConfig:
    version = items.pop("schema_version", None)
    if version is None:
        raise ConfigError("missing mandatory schema_version field")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version}")
    try:
        return RunConfig(**items)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def parse_run_config(text: str) -> RunConfig:
    return _build_run(_parse_items(text, _RUN_FIELDS))


def parse_sweep_config(text: str) -> SweepConfig:
    allowed = dict(_RUN_FIELDS, **_SWEEP_FIELDS)
    items = _parse_items(text, allowed)
    sweep_key = items.pop("sweep_key", None)
    raw_values = items.pop("sweep_values", None)
    workers = items.pop("workers", None)
    if sweep_key is None or raw_values is None:
        raise ConfigError("sweep configs require sweep_key and sweep_values")
    try:
        values = tuple(float(tok) for tok in raw_values.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse sweep_values {raw_values!r}") from exc
    base = _build_run(items)
    return SweepConfig(base=base, sweep_key=sweep_key, values=values, workers=workers)


# Named presets for the canonical regimes (eta_c = omega_s/omega_c = 0.2 for
# omega_c = 5).  Horizons are chosen long enough for the phenomenology of each
# regime to develop; the weak-coupling relaxation time is ~100/omega_s.
PRESETS: dict[str, str] = {
    "cavity-weak": (
        "schema_version = 1\nsystem = cavity\neta = 0.002\nomega_c = 5.0\n"
        "kT0 = 15.0\nn0 = 5\nt_max = 500.0\nh = 0.01\nstride = 25\n"
    ),
    "cavity-strong": (
        "schema_version = 1\nsystem = cavity\neta = 0.3\nomega_c = 5.0\n"
        "kT0 = 20.0\nn0 = 5\nt_max = 100.0\nh = 0.01\nstride = 10\n"
    ),
    "cavity-vacuum": (
        "schema_version = 1\nsystem = cavity\neta = 0.002\nomega_c = 5.0\n"
        "kT0 = 0.0\nn0 = 5\nt_max = 1000.0\nh = 0.02\nstride = 25\n"
    ),
    "tls-weak": (
        "schema_version = 1\nsystem = tls\ngamma0 = 0.2\nlam = 1.0\n"
        "kT0 = 0.0\nt_max = 50.0\nh = 0.01\nstride = 5\n"
    ),
    "tls-strong": (
        "schema_version = 1\nsystem = tls\ngamma0 = 1.0\nlam = 0.2\n"
        "kT0 = 0.0\nt_max = 10.0\nh = 0.002\nstride = 5\n"
    ),
}

SWEEP_PRESETS: dict[str, str] = {
    "temperature-sweep": (
        "schema_version = 1\nsystem = cavity\neta = 0.002\nomega_c = 5.0\n"
        "kT0 = 0.0\nn0 = 5\nt_max = 50.0\nh = 0.01\nstride = 10\n"
        "sweep_key = kT0\n"
        "sweep_values = 0, 0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5, 5.5, 6, 6.5, 7, 7.5, 8, 8.5, 9, 9.5, 10\n"
    ),
}
