"""Problem data for the inter-cell layout problem.

An instance holds ``n`` manufacturing cells and ``n`` candidate locations:

* ``flow[i, k]``      directed material flow from cell ``i`` to cell ``k``
* ``closeness[i, k]`` symmetric closeness score of the pair (A=6 ... X=1)
* ``distance[j, l]``  symmetric travel distance between locations ``j`` and ``l``
* ``w``               load factor of the closeness term, ``0 <= w <= 1``

Both cell matrices are normalized to unit mass before they are blended, so
the two terms of the objective live on the same scale::

    c[i, k] = flow[i, k] / sum(flow) + w * closeness[i, k] / sum(closeness)

Instances are read from and written to a small line-oriented text format::

    N 3
    W 0.5
    FLOW
    0 4 0
    1 0 2
    0 0 0
    CLOSENESS LETTERS
    - E U
    - - A
    - - -
    DISTANCE
    0 1 2
    1 0 1
    2 1 0

``CLOSENESS NUMERIC`` may replace the letter section (integer scores, 0 on
the diagonal). ``#`` starts a comment line.
"""

from __future__ import annotations

import dataclasses
import math
from functools import cached_property
from importlib import resources

import numpy as np

from .errors import (
    DegenerateMatrix,
    InvalidGeneratorArgs,
    InvalidInstance,
    ParseError,
    UnknownRatingLetter,
)

RATING_SCORES = {"A": 6, "E": 5, "I": 4, "O": 3, "U": 2, "X": 1}
SCORE_LETTERS = {v: k for k, v in RATING_SCORES.items()}

FIXTURES = ("table1_6x6",)


def letter_to_score(letter: str) -> int:
    """Map a closeness rating letter (case-insensitive) to its score."""
    try:
        return RATING_SCORES[letter.upper()]
    except (KeyError, AttributeError):
        raise UnknownRatingLetter(letter) from None


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclasses.dataclass(frozen=True, eq=False)
class CellLayoutInstance:
    flow: np.ndarray
    closeness: np.ndarray
    distance: np.ndarray
    w: float
    name: str = "instance"

    def __post_init__(self):
        flow = _frozen(self.flow)
        closeness = np.array(self.closeness, dtype=np.int64, copy=True)
        if closeness.ndim == 2 and closeness.shape[0] == closeness.shape[1]:
            np.fill_diagonal(closeness, 0)
        closeness.setflags(write=False)
        distance = _frozen(self.distance)
        n = flow.shape[0] if flow.ndim == 2 else -1
        for label, m in (("flow", flow), ("closeness", closeness), ("distance", distance)):
            if m.ndim != 2 or m.shape != (n, n) or n < 1:
                raise InvalidInstance([f"{label} matrix has shape {m.shape}, expected ({n}, {n})"])
        object.__setattr__(self, "flow", flow)
        object.__setattr__(self, "closeness", closeness)
        object.__setattr__(self, "distance", distance)
        object.__setattr__(self, "w", float(self.w))

    @property
    def n(self) -> int:
        return self.flow.shape[0]

    def __eq__(self, other):
        if not isinstance(other, CellLayoutInstance):
            return NotImplemented
        return (
            self.name == other.name
            and self.w == other.w
            and np.array_equal(self.flow, other.flow)
            and np.array_equal(self.closeness, other.closeness)
            and np.array_equal(self.distance, other.distance)
        )

    __hash__ = None

    def with_w(self, w: float) -> CellLayoutInstance:
        return dataclasses.replace(self, w=w)

    def violations(self) -> list[str]:
        """Every invariant the instance breaks, one human-readable line each."""
        out = []
        n = self.n
        if not 0.0 <= self.w <= 1.0:
            out.append(f"w = {self.w!r} is outside [0, 1]")
        for label, m in (("flow", self.flow), ("distance", self.distance)):
            if not np.all(np.isfinite(m)):
                out.append(f"{label} matrix contains non-finite values")
            for j, l in zip(*np.nonzero(m < 0)):
                out.append(f"{label}[{j},{l}] = {float(m[j, l])!r} is negative")
            for j in np.nonzero(np.diag(m) != 0)[0]:
                out.append(f"{label}[{j},{j}] = {float(m[j, j])!r} must be 0 on the diagonal")
        for j, l in zip(*np.triu_indices(n, 1)):
            if self.distance[j, l] != self.distance[l, j]:
                out.append(
                    f"distance is not symmetric at ({j},{l}): "
                    f"{float(self.distance[j, l])!r} != {float(self.distance[l, j])!r}"
                )
            if self.closeness[j, l] != self.closeness[l, j]:
                out.append(
                    f"closeness is not symmetric at ({j},{l}): "
                    f"{self.closeness[j, l]} != {self.closeness[l, j]}"
                )
        off = ~np.eye(n, dtype=bool)
        for i, k in zip(*np.nonzero(off & ((self.closeness < 1) | (self.closeness > 6)))):
            out.append(f"closeness[{i},{k}] = {self.closeness[i, k]} is outside 1..6")
        if n >= 2 and np.all(np.isfinite(self.flow)) and self.flow.sum() <= 0:
            out.append("flow matrix is all zero and cannot be normalized")
        return out

    def validate(self) -> CellLayoutInstance:
        problems = self.violations()
        if problems:
            raise InvalidInstance(problems)
        return self

    @cached_property
    def normalized_flow(self) -> np.ndarray:
        return normalize_matrix(self.flow)

    @cached_property
    def normalized_closeness(self) -> np.ndarray:
        return normalize_matrix(self.closeness)

    @cached_property
    def weights(self) -> np.ndarray:
        return compose_weights(self)


def normalize_matrix(source) -> np.ndarray:
    """Divide every entry by the grand total of the matrix."""
    m = np.asarray(source, dtype=float)
    if np.any(m < 0):
        raise ValueError("cannot normalize a matrix with negative entries")
    total = m.sum()
    if not total > 0:
        raise DegenerateMatrix("matrix sums to zero; normalization is undefined")
    out = m / total
    out.setflags(write=False)
    return out


def compose_weights(instance: CellLayoutInstance) -> np.ndarray:
    """Single coefficient matrix ``Nf + w * Nr`` of the weighted QAP."""
    c = instance.normalized_flow + instance.w * instance.normalized_closeness
    c.setflags(write=False)
    return c


# ---------------------------------------------------------------------------
# text format


def _number(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"{token!r} is not a number", lineno) from None
    if not math.isfinite(value):
        raise ParseError(f"{token!r} is not a finite number", lineno)
    return value


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


_SECTIONS = {
    "FLOW": "flow",
    "DISTANCE": "distance",
    "CLOSENESS LETTERS": "letters",
    "CLOSENESS NUMERIC": "numeric",
}


def _header_value(lines, key, lineno_hint):
    try:
        lineno, line = next(lines)
    except StopIteration:
        raise ParseError(f"missing '{key}' header", lineno_hint) from None
    parts = line.split()
    if len(parts) != 2 or parts[0].upper() != key:
        raise ParseError(f"expected '{key} <value>', got {line!r}", lineno)
    return lineno, parts[1]


def parse_instance(text: str, name: str = "instance", *, validate: bool = True) -> CellLayoutInstance:
    """Parse the instance text format.

    Structural problems (bad header, wrong row length, negative flow or
    distance, unknown letter, w outside [0, 1], missing section, asymmetric
    closeness) raise :class:`ParseError` carrying the line number. With
    ``validate=True`` the remaining model invariants are checked as well and
    reported through :class:`InvalidInstance`.
    """
    lines = _content_lines(text)
    lineno, raw_n = _header_value(lines, "N", 1)
    try:
        n = int(raw_n)
    except ValueError:
        raise ParseError(f"N must be an integer, got {raw_n!r}", lineno) from None
    if n < 1:
        raise ParseError(f"N must be positive, got {n}", lineno)
    lineno, raw_w = _header_value(lines, "W", lineno + 1)
    w = _number(raw_w, lineno)
    if not 0.0 <= w <= 1.0:
        raise ParseError(f"W = {w!r} is outside [0, 1]", lineno)

    rows: dict[str, list[tuple[int, list[str]]]] = {}
    header_line: dict[str, int] = {}
    current = None
    last_line = lineno
    for lineno, line in lines:
        last_line = lineno
        key = " ".join(line.split()).upper()
        if key in _SECTIONS:
            current = _SECTIONS[key]
            if current in rows or (current in ("letters", "numeric") and ("letters" in rows or "numeric" in rows)):
                raise ParseError(f"duplicate section {key}", lineno)
            rows[current] = []
            header_line[current] = lineno
            continue
        if current is None:
            raise ParseError(f"unexpected line outside any section: {line!r}", lineno)
        if len(rows[current]) == n:
            raise ParseError(f"unknown section header or extra row {line!r}", lineno)
        tokens = line.split()
        if len(tokens) != n:
            raise ParseError(f"expected {n} entries in row, got {len(tokens)}", lineno)
        rows[current].append((lineno, tokens))

    for label in ("flow", "distance"):
        if label not in rows:
            raise ParseError(f"missing {label.upper()} section", last_line)
    if "letters" not in rows and "numeric" not in rows:
        raise ParseError("missing CLOSENESS LETTERS or CLOSENESS NUMERIC section", last_line)
    for label, section in rows.items():
        if len(section) != n:
            raise ParseError(f"section has {len(section)} rows, expected {n}", header_line[label])

    flow = _read_nonnegative(rows["flow"], "flow")
    distance = _read_nonnegative(rows["distance"], "distance")
    if "letters" in rows:
        closeness = _read_letters(rows["letters"], n)
    else:
        closeness = _read_numeric(rows["numeric"], n)

    instance = CellLayoutInstance(flow=flow, closeness=closeness, distance=distance, w=w, name=name)
    if validate:
        instance.validate()
    return instance


def _read_nonnegative(section, label):
    out = []
    for lineno, tokens in section:
        row = [_number(t, lineno) for t in tokens]
        for value in row:
            if value < 0:
                raise ParseError(f"negative {label} entry {value!r}", lineno)
        out.append(row)
    return out


def _read_letters(section, n):
    # '-' at column k < i defers to row k (upper-triangular layout); '-' is
    # required on the diagonal and rejected above it.
    scores = np.zeros((n, n), dtype=np.int64)
    given = np.zeros((n, n), dtype=bool)
    for i, (lineno, tokens) in enumerate(section):
        for k, token in enumerate(tokens):
            if k == i:
                if token != "-":
                    raise ParseError(f"diagonal entry must be '-', got {token!r}", lineno)
                continue
            if token == "-" and k < i:
                continue
            try:
                scores[i, k] = letter_to_score(token)
            except UnknownRatingLetter as exc:
                raise ParseError(str(exc), lineno) from None
            given[i, k] = True
    for i, (lineno, _) in enumerate(section):
        for k in range(i):
            if given[i, k] and scores[i, k] != scores[k, i]:
                raise ParseError(
                    f"closeness is not symmetric: ({i},{k}) is {SCORE_LETTERS[scores[i, k]]} "
                    f"but ({k},{i}) is {SCORE_LETTERS[scores[k, i]]}",
                    lineno,
                )
            scores[i, k] = scores[k, i]
    return scores


def _read_numeric(section, n):
    scores = np.zeros((n, n), dtype=np.int64)
    for i, (lineno, tokens) in enumerate(section):
        for k, token in enumerate(tokens):
            try:
                value = int(token)
            except ValueError:
                raise ParseError(f"closeness score {token!r} is not an integer", lineno) from None
            if k == i:
                if value != 0:
                    raise ParseError(f"diagonal closeness score must be 0, got {value}", lineno)
            elif not 1 <= value <= 6:
                raise ParseError(f"closeness score {value} is outside 1..6", lineno)
            scores[i, k] = value
    for i, (lineno, _) in enumerate(section):
        for k in range(i):
            if scores[i, k] != scores[k, i]:
                raise ParseError(
                    f"closeness is not symmetric: ({i},{k}) = {scores[i, k]} but ({k},{i}) = {scores[k, i]}",
                    lineno,
                )
    return scores


def serialize_instance(instance: CellLayoutInstance) -> str:
    """Render ``instance`` in the text format; floats use shortest round-trip repr."""
    n = instance.n
    lines = [f"# {instance.name}", f"N {n}", f"W {instance.w!r}", "FLOW"]
    lines += [" ".join(repr(float(v)) for v in row) for row in instance.flow]
    lines.append("CLOSENESS NUMERIC")
    lines += [" ".join(str(int(v)) for v in row) for row in instance.closeness]
    lines.append("DISTANCE")
    lines += [" ".join(repr(float(v)) for v in row) for row in instance.distance]
    return "\n".join(lines) + "\n"


def read_instance(path, *, validate: bool = True) -> CellLayoutInstance:
    """Load an instance file; a bare fixture name (e.g. ``table1_6x6``) loads the bundled copy."""
    from pathlib import Path

    path = Path(path)
    if not path.exists() and str(path) in FIXTURES:
        return load_fixture(str(path), validate=validate)
    return parse_instance(path.read_text(encoding="utf-8"), name=path.stem, validate=validate)


def load_fixture(name: str, *, validate: bool = True) -> CellLayoutInstance:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
    text = resources.files("celllayout").joinpath("data").joinpath(f"{name}.txt").read_text(encoding="utf-8")
    return parse_instance(text, name=name, validate=validate)


# ---------------------------------------------------------------------------
# random instances


def generate_random_instance(
    n: int,
    seed: int,
    flow_density: float = 0.5,
    max_flow: float = 10.0,
    w: float = 0.5,
) -> CellLayoutInstance:
    """Reproducible random instance.

    Exactly ``max(1, round(flow_density * n * (n - 1)))`` off-diagonal flows
    are nonzero, each uniform in ``(0, max_flow]``. Closeness letters are
    uniform over A..X and mirrored. Locations are distinct points of an
    integer grid measured with the rectilinear metric.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidGeneratorArgs(f"n must be an integer >= 2, got {n!r}")
    if not 0.0 < flow_density <= 1.0:
        raise InvalidGeneratorArgs(f"flow density must be in (0, 1], got {flow_density!r}")
    if not max_flow > 0:
        raise InvalidGeneratorArgs(f"max_flow must be positive, got {max_flow!r}")
    if not 0.0 <= w <= 1.0:
        raise InvalidGeneratorArgs(f"w must be in [0, 1], got {w!r}")
    if seed < 0:
        raise InvalidGeneratorArgs(f"seed must be non-negative, got {seed!r}")

    rng = np.random.Generator(np.random.PCG64(seed))
    off_rows, off_cols = np.nonzero(~np.eye(n, dtype=bool))
    values = max_flow * (1.0 - rng.random(off_rows.size))
    keep = max(1, round(flow_density * off_rows.size))
    chosen = rng.permutation(off_rows.size)[:keep]
    flow = np.zeros((n, n))
    flow[off_rows[chosen], off_cols[chosen]] = values[chosen]

    scores = rng.integers(1, 7, size=(n, n))
    closeness = np.triu(scores, 1)
    closeness = closeness + closeness.T

    side = max(2, math.ceil(math.sqrt(2 * n)))
    cells = rng.choice(side * side, size=n, replace=False)
    xy = np.column_stack((cells % side, cells // side)).astype(float)
    distance = np.abs(xy[:, None, :] - xy[None, :, :]).sum(axis=2)

    return CellLayoutInstance(
        flow=flow, closeness=closeness, distance=distance, w=w, name=f"random_n{n}_s{seed}"
    )
