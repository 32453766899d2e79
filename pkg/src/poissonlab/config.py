"""Plain-text key-value experiment configs.

Grammar (one entry per line, ``#`` starts a comment)::

    key = value

Keys are dotted lowercase words.  Values are scalars, whitespace-separated
lists, or interval sets written ``[a,b) [c,d)``.  Recognized keys:

    system            translation | boole | rankone
    translation.step  nonzero integer
    rankone.cuts      list of integers >= 2, one per stage
    rankone.spacers.K list of integers >= 0, one per subcolumn of stage K
    rankone.base_width  positive real
    set               interval set (the set A under study)
    set.<name>        additional named interval sets
    joining.a         independent X scale
    joining.a_prime   independent Y scale
    joining.c.<k>     coupled weight at lag k (k may be negative)
    joining.x_retention / joining.y_retention
    experiment        zero_type | rigidity | ergodic_average |
                      dissipative | covariance | marginal |
                      id_superposition | exponential_type
    lags              list of integers, or "0..8"
    trials, seed, horizon, grid, order, epsilon, parts ...

Unknown keys are rejected so typos fail loudly.  All diagnostics carry the
line number and key.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError
from .intervals import IntervalSet
from .joinings import CoupledPart, JoiningSpec
from .systems import BooleMap, IntegerTranslation, RankOneSpec, RankOneTower

_KNOWN_PREFIXES = (
    "system", "translation.step", "rankone.cuts", "rankone.spacers.",
    "rankone.base_width", "set", "set.", "joining.a", "joining.a_prime",
    "joining.c.", "joining.x_retention", "joining.y_retention",
    "experiment", "lags", "trials", "seed", "horizon", "grid", "order",
    "epsilon", "parts", "n_max", "times", "out",
)


@dataclass
class KeyValueConfig:
    """Parsed entries with source line numbers."""

    entries: dict[str, tuple[str, int]] = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str) -> "KeyValueConfig":
        cfg = cls()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError("expected 'key = value'", line=lineno)
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ConfigError("empty key", line=lineno)
            if not any(key == p or (p.endswith(".") and key.startswith(p))
                       for p in _KNOWN_PREFIXES):
                raise ConfigError("unknown key", key=key, line=lineno)
            if key in cfg.entries:
                raise ConfigError("duplicate key", key=key, line=lineno)
            cfg.entries[key] = (value, lineno)
        return cfg

    # -- typed getters ------------------------------------------------------

    def has(self, key: str) -> bool:
        return key in self.entries

    def raw(self, key: str, default=None):
        if key not in self.entries:
            return default
        return self.entries[key][0]

    def _fetch(self, key: str, default):
        if key not in self.entries:
            if default is _REQUIRED:
                raise ConfigError("missing required key", key=key)
            return None, None
        return self.entries[key]

    def get_int(self, key: str, default=None) -> int | None:
        value, line = self._fetch(key, default)
        if value is None:
            return default
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"not an integer: {value!r}", key=key,
                              line=line) from None

    def get_float(self, key: str, default=None) -> float | None:
        value, line = self._fetch(key, default)
        if value is None:
            return default
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"not a number: {value!r}", key=key,
                              line=line) from None

    def get_str(self, key: str, default=None) -> str | None:
        value, _ = self._fetch(key, default)
        return default if value is None else value

    def get_int_list(self, key: str, default=None) -> list[int] | None:
        value, line = self._fetch(key, default)
        if value is None:
            return default
        try:
            if ".." in value:
                lo, hi = value.split("..")
                return list(range(int(lo), int(hi) + 1))
            return [int(tok) for tok in value.split()]
        except ValueError:
            raise ConfigError(f"not an integer list: {value!r}", key=key,
                              line=line) from None

    def get_set(self, key: str = "set", default=None) -> IntervalSet | None:
        value, line = self._fetch(key, default)
        if value is None:
            return default
        try:
            return IntervalSet.from_string(value)
        except ValueError as exc:
            raise ConfigError(str(exc), key=key, line=line) from None


class _Required:
    pass


_REQUIRED = _Required()


def build_system(cfg: KeyValueConfig):
    """Instantiate the base system described by the config."""
    name = cfg.get_str("system", _REQUIRED)
    if name == "translation":
        return IntegerTranslation(cfg.get_int("translation.step", 1))
    if name == "boole":
        return BooleMap()
    if name == "rankone":
        cuts = cfg.get_int_list("rankone.cuts", _REQUIRED)
        spacers = []
        for k in range(len(cuts)):
            row = cfg.get_int_list(f"rankone.spacers.{k}")
            if row is None:
                row = [0] * cuts[k]
            spacers.append(tuple(row))
        width = cfg.get_float("rankone.base_width", 1.0)
        try:
            spec = RankOneSpec(tuple(cuts), tuple(spacers), width)
        except ValueError as exc:
            raise ConfigError(str(exc), key="rankone.cuts") from None
        return RankOneTower(spec)
    _, line = cfg.entries["system"]
    raise ConfigError(f"unknown system {name!r}", key="system", line=line)


def build_joining_spec(cfg: KeyValueConfig) -> JoiningSpec:
    weights = {}
    for key, (value, line) in cfg.entries.items():
        if key.startswith("joining.c."):
            try:
                lag = int(key.removeprefix("joining.c."))
                weights[lag] = float(value)
            except ValueError:
                raise ConfigError("bad coupling entry", key=key,
                                  line=line) from None
    coupled = CoupledPart(
        weights,
        x_retention=cfg.get_float("joining.x_retention", 1.0),
        y_retention=cfg.get_float("joining.y_retention", 1.0))
    spec = JoiningSpec(cfg.get_float("joining.a", 0.0),
                       cfg.get_float("joining.a_prime", 0.0), coupled)
    return spec


def named_sets(cfg: KeyValueConfig) -> dict[str, IntervalSet]:
    out = {}
    for key in list(cfg.entries):
        if key == "set":
            out["set"] = cfg.get_set("set")
        elif key.startswith("set."):
            out[key.removeprefix("set.")] = cfg.get_set(key)
    return out
