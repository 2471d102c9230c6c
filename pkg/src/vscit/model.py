"""System-under-test models, variable-strength configurations, test suites.

Parameters are indexed 0..k-1 and values 0..v_i-1 everywhere, including in
file formats. Models use exponent notation ("3^15", "4^3 5^3 6^2"),
configurations the text form "t=2; sub=0,1,2:3; sub=3,4:2".
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import NamedTuple


class ParseError(ValueError):
    """A model spec, configuration string, or suite file failed to parse."""


class ConfigError(ValueError):
    """A variable-strength configuration violates its bounds."""


@dataclass(frozen=True)
class SutModel:
    """The system under test: one entry per parameter giving its value count."""

    param_levels: tuple[int, ...]

    def __post_init__(self):
        levels = tuple(int(v) for v in self.param_levels)
        if not levels:
            raise ValueError("a model needs at least one parameter")
        if any(v < 1 for v in levels):
            raise ValueError(f"every parameter needs at least one value, got {levels}")
        object.__setattr__(self, "param_levels", levels)

    @property
    def k(self) -> int:
        return len(self.param_levels)

    def render(self) -> str:
        """Exponent notation, runs of equal counts grouped left to right."""
        terms = []
        for value, group in itertools.groupby(self.param_levels):
            n = len(list(group))
            terms.append(f"{value}^{n}" if n > 1 else str(value))
        return " ".join(terms)


class SubConfig(NamedTuple):
    indices: tuple[int, ...]
    strength: int


@dataclass(frozen=True)
class VscaConfig:
    """Main interaction strength plus optional higher-strength sub-configurations."""

    main_strength: int
    sub_configs: tuple[SubConfig, ...] = ()

    def __post_init__(self):
        subs = tuple(
            SubConfig(tuple(int(i) for i in indices), int(strength))
            for indices, strength in self.sub_configs
        )
        object.__setattr__(self, "main_strength", int(self.main_strength))
        object.__setattr__(self, "sub_configs", subs)

    def render(self) -> str:
        parts = [f"t={self.main_strength}"]
        parts += [
            f"sub={','.join(map(str, sub.indices))}:{sub.strength}"
            for sub in self.sub_configs
        ]
        return "; ".join(parts)


TestCase = tuple[int, ...]


def check_case(model: SutModel, case: TestCase) -> None:
    """Raise ValueError unless every entry is a legal level index for the model."""
    if len(case) != model.k:
        raise ValueError(f"case has {len(case)} values, model has {model.k} parameters")
    for i, (x, v) in enumerate(zip(case, model.param_levels)):
        if not 0 <= x < v:
            raise ValueError(f"value {x} at index {i} outside 0..{v - 1}")


@dataclass(frozen=True)
class TestSuite:
    """A generated array: every case validated against the owning model."""

    model: SutModel
    config: VscaConfig
    cases: tuple[TestCase, ...]

    def __post_init__(self):
        cases = tuple(tuple(int(x) for x in case) for case in self.cases)
        for case in cases:
            check_case(self.model, case)
        object.__setattr__(self, "cases", cases)

    def __len__(self) -> int:
        return len(self.cases)


def parse_model(spec: str) -> SutModel:
    """Parse exponent notation: "3^15" means fifteen 3-level parameters.

    Terms are whitespace separated; a bare integer is a single parameter.
    "4^3 5^3 6^2" expands left to right to [4,4,4,5,5,5,6,6].
    """
    terms = spec.split()
    if not terms:
        raise ParseError("empty model spec")
    levels: list[int] = []
    for term in terms:
        head, sep, tail = term.partition("^")
        try:
            value = int(head)
            count = int(tail) if sep else 1
        except ValueError:
            raise ParseError(f"bad model term {term!r}") from None
        if value < 1:
            raise ParseError(f"bad model term {term!r}: value count must be >= 1")
        if count < 1:
            raise ParseError(f"bad model term {term!r}: repeat count must be >= 1")
        levels.extend([value] * count)
    return SutModel(tuple(levels))


def parse_config(text: str) -> VscaConfig:
    """Parse "t=2; sub=0,1,2:3; sub=3,4:2" into a VscaConfig."""
    main: int | None = None
    subs: list[SubConfig] = []
    for raw in text.split(";"):
        part = raw.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep:
            raise ParseError(f"bad config part {part!r}")
        if key == "t":
            if main is not None:
                raise ParseError("duplicate 't=' in config")
            try:
                main = int(value)
            except ValueError:
                raise ParseError(f"bad main strength {value!r}") from None
        elif key == "sub":
            idx_text, sep2, s_text = value.partition(":")
            if not sep2:
                raise ParseError(f"bad sub-config {part!r}, expected indices:strength")
            try:
                indices = tuple(int(i) for i in idx_text.split(","))
                strength = int(s_text)
            except ValueError:
                raise ParseError(f"bad sub-config {part!r}") from None
            subs.append(SubConfig(indices, strength))
        else:
            raise ParseError(f"unknown config key {key!r}")
    if main is None:
        raise ParseError("config must set the main strength, e.g. 't=2'")
    return VscaConfig(main, tuple(subs))


def validate_config(model: SutModel, config: VscaConfig) -> VscaConfig:
    """Check a configuration against a model; returns it unchanged when legal.

    A sub-configuration whose strength does not exceed the main strength is
    legal but adds nothing the main strength does not already imply, so it
    warns instead of failing.
    """
    k = model.k
    t = config.main_strength
    if not 1 <= t <= k:
        raise ConfigError(f"main strength {t} outside 1..{k}")
    for sub in config.sub_configs:
        if len(set(sub.indices)) != len(sub.indices):
            raise ConfigError(f"duplicate parameter index in sub-config {sub.indices}")
        for i in sub.indices:
            if not 0 <= i < k:
                raise ConfigError(f"sub-config index {i} outside 0..{k - 1}")
        if not 0 < sub.strength <= len(sub.indices):
            raise ConfigError(
                f"sub-config strength {sub.strength} outside 1..{len(sub.indices)}"
            )
        if sub.strength <= t:
            warnings.warn(
                f"sub-config {sub.indices} at strength {sub.strength} is redundant: "
                f"main strength {t} already implies its coverage",
                stacklevel=2,
            )
    return config
