"""Compact game-spec strings for reproducible invocations.

Grammar: ``name[:params]`` where params are comma-separated positional
numbers and/or ``key=value`` entries separated by ``;``.

    additive:1,2,3              coefficients (offset via ;offset=0.5)
    voting:1,1,1;quota=2        weights plus quota
    glove                       three-player market fixture
    interaction:seed=0          random interaction game (needs n)
    gamma:target=1;seed=0       prescribed residual-to-signal ratio (needs n)
    external:python3 server.py  external process oracle (needs n)

Built-in specs rebuild identical oracles on every call, which lets
benchmark cells construct private instances instead of sharing counters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact import make_gamma_game
from .games import (
    ValueOracle,
    additive_game,
    external_oracle,
    glove_game,
    interaction_game,
    voting_game,
)

__all__ = ["GameSpec", "parse_game_spec"]

_KNOWN = ("additive", "voting", "glove", "interaction", "gamma", "external")


@dataclass(frozen=True)
class GameSpec:
    """Parsed game description; `build()` constructs a fresh oracle."""

    name: str
    values: tuple[float, ...]
    options: dict
    command: str | None
    n: int | None

    @property
    def label(self) -> str:
        return self.display

    @property
    def display(self) -> str:
        if self.name == "external":
            return f"external({self.command})"
        if self.name == "glove":
            return "glove"
        opts = ";".join(f"{k}={v:g}" for k, v in sorted(self.options.items()))
        vals = ",".join(f"{v:g}" for v in self.values)
        inner = ";".join(x for x in (vals, opts) if x)
        return f"{self.name}({inner})" if inner else f"{self.name}(n={self.n})"

    def player_count(self) -> int:
        if self.name in ("additive", "voting"):
            return len(self.values)
        if self.name == "glove":
            return 3
        if self.n is None:
            raise ValueError(f"game {self.name!r} needs an explicit player count (--n)")
        return self.n

    def build(self) -> ValueOracle:
        """Construct a fresh oracle (identical across calls for built-ins)."""
        n = self.player_count()
        if self.name == "additive":
            return additive_game(self.values, offset=self.options.get("offset", 0.0))
        if self.name == "voting":
            if "quota" not in self.options:
                raise ValueError("voting game needs ;quota=...")
            return voting_game(self.values, quota=self.options["quota"])
        if self.name == "glove":
            return glove_game()
        if self.name == "interaction":
            return interaction_game(n, seed=int(self.options.get("seed", 0)))
        if self.name == "gamma":
            oracle, _ = make_gamma_game(
                n, self.options.get("target", 1.0), seed=int(self.options.get("seed", 0))
            )
            return oracle
        if self.name == "external":
            return external_oracle(self.command, n)
        raise AssertionError(self.name)

    def exact_phi(self):
        """Analytic ground truth when one exists (additive), else None."""
        if self.name == "additive":
            return np.asarray(self.values, dtype=np.float64)
        return None


def parse_game_spec(spec: str, n: int | None = None) -> GameSpec:
    """Parse a compact game string; raises ValueError on malformed input."""
    spec = spec.strip()
    name, _, rest = spec.partition(":")
    name = name.strip().lower()
    if name not in _KNOWN:
        raise ValueError(f"unknown game {name!r}; expected one of {_KNOWN}")
    if name == "external":
        if not rest.strip():
            raise ValueError("external game needs a command: external:<command>")
        return GameSpec(name, (), {}, rest.strip().strip('"'), n)
    values: list[float] = []
    options: dict = {}
    for part in rest.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" in part and "," not in part.split("=", 1)[0]:
            key, _, raw = part.partition("=")
            try:
                options[key.strip()] = float(raw)
            except ValueError as exc:
                raise ValueError(f"bad option {part!r} in game spec {spec!r}") from exc
        else:
            for tok in part.split(","):
                tok = tok.strip()
                if not tok:
                    continue
                try:
                    values.append(float(tok))
                except ValueError as exc:
                    raise ValueError(f"bad value {tok!r} in game spec {spec!r}") from exc
    return GameSpec(name, tuple(values), options, None, n)
