"""Mamdani fuzzy inference engine and the shipped pedal controller.

The engine is generic: triangular memberships, min for AND and implication,
max for aggregation, centroid defuzzification on a fixed uniform grid.
Rule bases load from a small line-oriented text format (see ``parse_rule_base``).

The shipped pedal controller maps driver inputs (pedal positions, press
rates, motor-speed feedback) to two voltage commands, one per power source.
A crisp mode layer sits outside the fuzzy engine: the reverse switch flips
the sign convention of the motor command, and a balance mode flags that the
wheels should be held still (idle and stop conditions).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import (
    ConfigurationError,
    DefuzzificationError,
    InferenceError,
    RuleParseError,
)

DEFAULT_GRID_POINTS = 201

# Crisp mode thresholds (normalized units): the accelerator is considered
# untouched below the deadband, and the wheels are held at zero whenever the
# motor feedback is below the balance threshold with no accelerator input.
ACCEL_DEADBAND = 0.02
BALANCE_FEEDBACK_MAX = 0.1


@dataclass(frozen=True)
class TriangularMF:
    """Triangular membership with vertices a <= b <= c.

    Degenerate shoulders (a == b or b == c) are allowed at universe edges.
    """

    name: str
    a: float
    b: float
    c: float

    def validate(self) -> None:
        if not self.a <= self.b <= self.c:
            raise ConfigurationError(
                f"term {self.name!r}: vertices must satisfy a <= b <= c, "
                f"got ({self.a}, {self.b}, {self.c})"
            )
        if self.a == self.c:
            raise ConfigurationError(f"term {self.name!r} has empty support")

    def sample(self, xs: np.ndarray) -> np.ndarray:
        mu = np.zeros_like(xs)
        if self.b > self.a:
            rising = (xs >= self.a) & (xs < self.b)
            mu[rising] = (xs[rising] - self.a) / (self.b - self.a)
        if self.c > self.b:
            falling = (xs > self.b) & (xs <= self.c)
            mu[falling] = (self.c - xs[falling]) / (self.c - self.b)
        mu[xs == self.b] = 1.0
        return mu


def membership(mf: TriangularMF, x: float) -> float:
    """Piecewise-linear hat evaluation; exactly 0/1 at the vertices."""
    if x < mf.a or x > mf.c:
        return 0.0
    if x == mf.b:
        return 1.0
    if x < mf.b:
        return (x - mf.a) / (mf.b - mf.a)
    return (mf.c - x) / (mf.c - mf.b)


@dataclass(frozen=True)
class FuzzyVariable:
    """A linguistic variable: a universe interval and ordered terms."""

    name: str
    lo: float
    hi: float
    terms: tuple[TriangularMF, ...]

    def validate(self) -> None:
        if not self.lo < self.hi:
            raise ConfigurationError(
                f"variable {self.name!r}: universe [{self.lo}, {self.hi}] is empty"
            )
        if not self.terms:
            raise ConfigurationError(f"variable {self.name!r} has no terms")
        names = [t.name for t in self.terms]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"variable {self.name!r} has duplicate terms")
        previous_peak = None
        for term in self.terms:
            term.validate()
            if term.a < self.lo or term.c > self.hi:
                raise ConfigurationError(
                    f"term {self.name}.{term.name} support [{term.a}, {term.c}] "
                    f"exceeds universe [{self.lo}, {self.hi}]"
                )
            if previous_peak is not None and term.b <= previous_peak:
                raise ConfigurationError(
                    f"term peaks of {self.name!r} must be strictly increasing"
                )
            previous_peak = term.b

    def term(self, name: str) -> TriangularMF:
        for t in self.terms:
            if t.name == name:
                return t
        raise ConfigurationError(f"variable {self.name!r} has no term {name!r}")

    def clamp(self, x: float) -> float:
        return min(max(x, self.lo), self.hi)

    def grid(self, points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
        return np.linspace(self.lo, self.hi, points)


def uniform_terms(names: list[str], lo: float, hi: float) -> tuple[TriangularMF, ...]:
    """Equally spaced peaks across [lo, hi], feet on the neighbouring peaks.

    The resulting family is a Ruspini partition: memberships sum to one
    everywhere on the universe.
    """
    if len(names) < 2:
        raise ConfigurationError("a uniform partition needs at least two terms")
    peaks = np.linspace(lo, hi, len(names))
    terms = []
    for i, name in enumerate(names):
        a = peaks[max(i - 1, 0)]
        c = peaks[min(i + 1, len(names) - 1)]
        terms.append(TriangularMF(name, float(a), float(peaks[i]), float(c)))
    return tuple(terms)


def fuzzify(var: FuzzyVariable, x: float) -> dict[str, float]:
    """Degrees of all terms at x, with x clamped to the universe first."""
    xc = var.clamp(x)
    return {t.name: membership(t, xc) for t in var.terms}


@dataclass(frozen=True)
class Rule:
    """IF <conjunction of input terms> THEN <output term assignments>."""

    antecedent: tuple[tuple[str, str], ...]
    consequent: tuple[tuple[str, str], ...]
    tags: tuple[str, ...] = ()
    comment: str = ""


class RuleBase:
    """An immutable, validated rule base with precomputed output grids."""

    def __init__(
        self,
        inputs: list[FuzzyVariable],
        outputs: list[FuzzyVariable],
        rules: list[Rule],
        grid_points: int = DEFAULT_GRID_POINTS,
    ):
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.rules = tuple(rules)
        self.grid_points = grid_points
        self._validate()
        self._grids = {v.name: v.grid(grid_points) for v in self.outputs}
        self._curves = {
            v.name: {t.name: t.sample(self._grids[v.name]) for t in v.terms}
            for v in self.outputs
        }

    def _validate(self) -> None:
        for var in (*self.inputs, *self.outputs):
            var.validate()
        input_terms = {v.name: {t.name for t in v.terms} for v in self.inputs}
        output_terms = {v.name: {t.name for t in v.terms} for v in self.outputs}
        if not self.rules:
            raise ConfigurationError("rule base has no rules")
        for index, rule in enumerate(self.rules, start=1):
            if not rule.antecedent:
                raise ConfigurationError(f"rule {index} has an empty antecedent")
            if not rule.consequent:
                raise ConfigurationError(f"rule {index} has an empty consequent")
            for var, term in rule.antecedent:
                if var not in input_terms:
                    raise ConfigurationError(
                        f"rule {index} references unknown input variable {var!r}"
                    )
                if term not in input_terms[var]:
                    raise ConfigurationError(
                        f"rule {index} references unknown term {var}.{term}"
                    )
            for var, term in rule.consequent:
                if var not in output_terms:
                    raise ConfigurationError(
                        f"rule {index} references unknown output variable {var!r}"
                    )
                if term not in output_terms[var]:
                    raise ConfigurationError(
                        f"rule {index} references unknown term {var}.{term}"
                    )

    def input(self, name: str) -> FuzzyVariable:
        for v in self.inputs:
            if v.name == name:
                return v
        raise ConfigurationError(f"no input variable {name!r}")

    def output(self, name: str) -> FuzzyVariable:
        for v in self.outputs:
            if v.name == name:
                return v
        raise ConfigurationError(f"no output variable {name!r}")

    def output_grid(self, name: str) -> np.ndarray:
        return self._grids[name]


def infer(rb: RuleBase, crisp_inputs: dict[str, float]) -> dict[str, np.ndarray]:
    """Mamdani inference: clipped consequents aggregated by pointwise max.

    Returns one sampled fuzzy set per output variable, on that variable's
    fixed uniform grid.
    """
    degrees: dict[str, dict[str, float]] = {}
    for var in rb.inputs:
        if var.name not in crisp_inputs:
            raise InferenceError(f"missing input variable {var.name!r}")
        degrees[var.name] = fuzzify(var, crisp_inputs[var.name])

    aggregated = {
        v.name: np.zeros(rb.grid_points, dtype=float) for v in rb.outputs
    }
    for rule in rb.rules:
        strength = min(degrees[var][term] for var, term in rule.antecedent)
        if strength <= 0.0:
            continue
        for var, term in rule.consequent:
            curve = rb._curves[var][term]
            np.maximum(
                aggregated[var], np.minimum(strength, curve), out=aggregated[var]
            )
    return aggregated


def defuzzify(xs: np.ndarray, mus: np.ndarray) -> tuple[float, bool]:
    """Centroid of a sampled set; (universe midpoint, False) when nothing fired.

    The boolean is True when at least one rule contributed mass.
    """
    xs = np.asarray(xs, dtype=float)
    mus = np.asarray(mus, dtype=float)
    if xs.size < 2 or mus.size != xs.size:
        raise DefuzzificationError(
            f"need a sampled set on >= 2 grid points, got {xs.size}/{mus.size}"
        )
    total = float(np.sum(mus))
    if total == 0.0:
        return float((xs[0] + xs[-1]) / 2.0), False
    return float(np.sum(xs * mus) / total), True


# ---------------------------------------------------------------------------
# Rule-base file format
# ---------------------------------------------------------------------------
#
#   input  <name> <lo> <hi>          declare an input variable
#   output <name> <lo> <hi>          declare an output variable
#   term   <variable> <label> <a> <b> <c>
#   rule   [<tags>] IF <v> IS <t> (AND <v> IS <t>)* THEN <v> IS <t> (AND ...)
#
# '#' starts a comment; a trailing comment on a rule line is kept as the
# rule's annotation.  Tags are comma-separated labels in square brackets.


def parse_rule_base(text: str, grid_points: int = DEFAULT_GRID_POINTS) -> RuleBase:
    inputs: list[FuzzyVariable] = []
    outputs: list[FuzzyVariable] = []
    pending_terms: dict[str, list[TriangularMF]] = {}
    declarations: dict[str, tuple[str, float, float]] = {}
    rules: list[Rule] = []

    def fail(line_no: int, message: str) -> RuleParseError:
        return RuleParseError(f"line {line_no}: {message}")

    for line_no, raw in enumerate(text.splitlines(), start=1):
        comment = ""
        line = raw
        if "#" in line:
            line, comment = line.split("#", 1)
            comment = comment.strip()
        line = line.strip()
        if not line:
            continue
        fields = line.split()
        keyword = fields[0].lower()

        if keyword in ("input", "output"):
            if len(fields) != 4:
                raise fail(line_no, f"expected '{keyword} <name> <lo> <hi>'")
            name = fields[1]
            if name in declarations:
                raise fail(line_no, f"variable {name!r} declared twice")
            try:
                lo, hi = float(fields[2]), float(fields[3])
            except ValueError as exc:
                raise fail(line_no, f"bad universe bounds: {exc}") from None
            declarations[name] = (keyword, lo, hi)
            pending_terms[name] = []
        elif keyword == "term":
            if len(fields) != 6:
                raise fail(line_no, "expected 'term <variable> <label> <a> <b> <c>'")
            name = fields[1]
            if name not in declarations:
                raise fail(line_no, f"term for undeclared variable {name!r}")
            try:
                a, b, c = (float(v) for v in fields[3:6])
            except ValueError as exc:
                raise fail(line_no, f"bad term vertices: {exc}") from None
            pending_terms[name].append(TriangularMF(fields[2], a, b, c))
        elif keyword == "rule":
            rules.append(_parse_rule_line(fields[1:], comment, line_no, fail))
        else:
            raise fail(line_no, f"unknown keyword {fields[0]!r}")

    for name, (kind, lo, hi) in declarations.items():
        var = FuzzyVariable(name, lo, hi, tuple(pending_terms[name]))
        (inputs if kind == "input" else outputs).append(var)
    try:
        return RuleBase(inputs, outputs, rules, grid_points=grid_points)
    except ConfigurationError as exc:
        raise RuleParseError(str(exc)) from exc


def _parse_rule_line(tokens: list[str], comment: str, line_no: int, fail) -> Rule:
    tags: tuple[str, ...] = ()
    if tokens and tokens[0].startswith("["):
        tag_text = tokens[0]
        if not tag_text.endswith("]"):
            raise fail(line_no, "unterminated tag list")
        tags = tuple(t.strip() for t in tag_text[1:-1].split(",") if t.strip())
        tokens = tokens[1:]
    if not tokens or tokens[0].upper() != "IF":
        raise fail(line_no, "rule must start with IF")
    try:
        then_at = [t.upper() for t in tokens].index("THEN")
    except ValueError:
        raise fail(line_no, "rule has no THEN") from None

    def parse_pairs(parts: list[str], where: str) -> tuple[tuple[str, str], ...]:
        pairs = []
        i = 0
        while i < len(parts):
            if i + 2 >= len(parts) or parts[i + 1].upper() != "IS":
                raise fail(line_no, f"malformed {where}: expected '<var> IS <term>'")
            pairs.append((parts[i], parts[i + 2]))
            i += 3
            if i < len(parts):
                if parts[i].upper() != "AND":
                    raise fail(line_no, f"expected AND in {where}")
                i += 1
        if not pairs:
            raise fail(line_no, f"empty {where}")
        return tuple(pairs)

    antecedent = parse_pairs(tokens[1:then_at], "antecedent")
    consequent = parse_pairs(tokens[then_at + 1 :], "consequent")
    return Rule(antecedent, consequent, tags=tags, comment=comment)


def load_rule_base(path, grid_points: int = DEFAULT_GRID_POINTS) -> RuleBase:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_rule_base(handle.read(), grid_points=grid_points)


PEDAL_RULE_COUNT = 24
_pedal_cache: dict[int, RuleBase] = {}


def pedal_controller(grid_points: int = DEFAULT_GRID_POINTS) -> RuleBase:
    """The shipped 24-rule pedal controller, loaded from package data."""
    if grid_points not in _pedal_cache:
        text = (
            resources.files("fuzzydrive.data")
            .joinpath("pedal_controller.rules")
            .read_text(encoding="utf-8")
        )
        rb = parse_rule_base(text, grid_points=grid_points)
        if len(rb.rules) != PEDAL_RULE_COUNT:
            raise ConfigurationError(
                f"pedal controller must have exactly {PEDAL_RULE_COUNT} rules, "
                f"found {len(rb.rules)}"
            )
        _pedal_cache[grid_points] = rb
    return _pedal_cache[grid_points]


class Mode(enum.Enum):
    """Crisp drive mode decided alongside the fuzzy outputs."""

    DRIVE = "drive"
    BALANCE = "balance"  # hold the wheels at zero (idle / stop)
    REVERSE = "reverse"


@dataclass(frozen=True)
class ControlCommand:
    """Fuzzy voltage commands plus the crisp mode and no-fire diagnostics."""

    engine_v: float
    motor_v: float
    mode: Mode
    engine_fired: bool = True
    motor_fired: bool = True

    @property
    def no_fire(self) -> bool:
        return not (self.engine_fired and self.motor_fired)


def controller_step(
    rb: RuleBase,
    pedals,
    pedal_rates: tuple[float, float],
    motor_speed_feedback: float,
) -> ControlCommand:
    """Evaluate the pedal controller for one tick.

    ``pedals`` needs ``accel``/``brake`` positions in [0, 1] and a ``reverse``
    flag; ``pedal_rates`` are the filtered press rates (per second);
    ``motor_speed_feedback`` is the DC motor speed normalized to rated speed.
    Pure function of its arguments.
    """
    accel_rate, brake_rate = pedal_rates
    aggregated = infer(
        rb,
        {
            "accel": pedals.accel,
            "accel_rate": accel_rate,
            "brake": pedals.brake,
            "brake_rate": brake_rate,
            "speed": motor_speed_feedback,
        },
    )
    engine_v, engine_fired = defuzzify(
        rb.output_grid("engine_v"), aggregated["engine_v"]
    )
    motor_v, motor_fired = defuzzify(rb.output_grid("motor_v"), aggregated["motor_v"])

    if pedals.reverse:
        mode = Mode.REVERSE
    elif (
        pedals.accel < ACCEL_DEADBAND
        and motor_speed_feedback < BALANCE_FEEDBACK_MAX
    ):
        mode = Mode.BALANCE
    else:
        mode = Mode.DRIVE
    return ControlCommand(
        engine_v=engine_v,
        motor_v=motor_v,
        mode=mode,
        engine_fired=engine_fired,
        motor_fired=motor_fired,
    )
