"""Exact-arithmetic ReLU networks.

A network is a stack of layers, each applying ``ReLU(W v + b)`` elementwise
(the last layer included). Weights, biases, inputs and outputs are
arbitrary-precision rationals (`fractions.Fraction`), so evaluation and
distance computation are exact; `forward_float` offers a float64 fast path
for search heuristics and benchmarks.

File format ("relunet-1"): a UTF-8 JSON document with fields

    version    "relunet-1"
    input_dim  positive integer
    layers     array of {rows, cols, weights, bias}, weights row-major,
               every entry a "num/den" string
    metadata   free-form object

Round-tripping through serialize/deserialize is bit-exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .ratio import format_ratio, parse_ratio

NETWORK_FORMAT_VERSION = "relunet-1"

_ZERO = Fraction(0)


def as_fraction(value) -> Fraction:
    """Coerce an int, Fraction, or "num/den" string to a Fraction.

    Floats are rejected on purpose: exact data must be supplied exactly.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_ratio(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class Layer:
    """One affine-then-ReLU stage: weights (fan_out x fan_in) and bias."""

    weights: tuple[tuple[Fraction, ...], ...]
    bias: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.weights:
            raise ValueError("layer needs at least one row")
        cols = len(self.weights[0])
        if cols < 1:
            raise ValueError("layer needs at least one column")
        if any(len(row) != cols for row in self.weights):
            raise ValueError("ragged weight matrix")
        if len(self.bias) != len(self.weights):
            raise ValueError(
                f"bias length {len(self.bias)} != row count {len(self.weights)}"
            )

    @property
    def fan_out(self) -> int:
        return len(self.weights)

    @property
    def fan_in(self) -> int:
        return len(self.weights[0])


def layer(weights: Iterable[Iterable], bias: Iterable) -> Layer:
    """Build a Layer, coercing entries to Fractions."""
    rows = tuple(tuple(as_fraction(w) for w in row) for row in weights)
    return Layer(rows, tuple(as_fraction(b) for b in bias))


@dataclass
class ReluNetwork:
    """Dimension-checked layer stack. Immutable after construction."""

    input_dim: int
    layers: tuple[Layer, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.input_dim < 1:
            raise ValueError("input_dim must be positive")
        self.layers = tuple(self.layers)
        if not self.layers:
            raise ValueError("network needs at least one layer")
        fan_in = self.input_dim
        for index, lyr in enumerate(self.layers):
            if lyr.fan_in != fan_in:
                raise ValueError(
                    f"layer {index}: fan-in {lyr.fan_in} != expected {fan_in}"
                )
            fan_in = lyr.fan_out

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def width(self) -> int:
        return max(lyr.fan_out for lyr in self.layers)

    @property
    def output_dim(self) -> int:
        return self.layers[-1].fan_out

    @property
    def hidden_units(self) -> int:
        """Total ReLU unit count across all layers."""
        return sum(lyr.fan_out for lyr in self.layers)


def network(input_dim: int, layers: Iterable[Layer], metadata: dict | None = None) -> ReluNetwork:
    return ReluNetwork(input_dim, tuple(layers), metadata or {})


def forward_layers(net: ReluNetwork, z: Sequence) -> list[tuple[Fraction, ...]]:
    """Exact forward pass returning every layer's output, in order."""
    if len(z) != net.input_dim:
        raise ValueError(f"input length {len(z)} != input_dim {net.input_dim}")
    current = tuple(as_fraction(v) for v in z)
    outputs = []
    for lyr in net.layers:
        current = tuple(
            max(sum(w * v for w, v in zip(row, current)) + b, _ZERO)
            for row, b in zip(lyr.weights, lyr.bias)
        )
        outputs.append(current)
    return outputs


def forward(net: ReluNetwork, z: Sequence) -> tuple[Fraction, ...]:
    """Exact forward pass: ReLU after every layer, no rounding anywhere."""
    return forward_layers(net, z)[-1]


def float_layers(net: ReluNetwork) -> list[tuple[np.ndarray, np.ndarray]]:
    """float64 copies of the weight matrices and biases."""
    out = []
    for lyr in net.layers:
        w = np.array([[float(v) for v in row] for row in lyr.weights], dtype=np.float64)
        b = np.array([float(v) for v in lyr.bias], dtype=np.float64)
        out.append((w, b))
    return out


def forward_float(net: ReluNetwork, z: Sequence[float]) -> np.ndarray:
    """Same computation as `forward` in hardware floating point."""
    if len(z) != net.input_dim:
        raise ValueError(f"input length {len(z)} != input_dim {net.input_dim}")
    current = np.asarray(z, dtype=np.float64)
    for w, b in float_layers(net):
        current = np.maximum(w @ current + b, 0.0)
    return current


@dataclass(frozen=True)
class DistancePow:
    """A p-th-powered l_p distance; comparisons stay rational this way."""

    value: Fraction
    exponent: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("distance power must be nonnegative")


def distance_pow(y: Sequence, x: Sequence, p: int) -> DistancePow:
    """Exact sum of |y_i - x_i|**p."""
    if len(y) != len(x):
        raise ValueError(f"length mismatch: {len(y)} vs {len(x)}")
    if p < 1:
        raise ValueError("p must be a positive integer")
    total = _ZERO
    for a, b in zip(y, x):
        total += abs(as_fraction(a) - as_fraction(b)) ** p
    return DistancePow(total, p)


def serialize(net: ReluNetwork) -> str:
    doc = {
        "version": NETWORK_FORMAT_VERSION,
        "input_dim": net.input_dim,
        "layers": [
            {
                "rows": lyr.fan_out,
                "cols": lyr.fan_in,
                "weights": [format_ratio(w) for row in lyr.weights for w in row],
                "bias": [format_ratio(b) for b in lyr.bias],
            }
            for lyr in net.layers
        ],
        "metadata": net.metadata,
    }
    return json.dumps(doc, sort_keys=True)


def network_to_dict(net: ReluNetwork) -> dict:
    return json.loads(serialize(net))


def deserialize(text: str | bytes) -> ReluNetwork:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed network document: {exc}") from exc
    return network_from_dict(doc)


def network_from_dict(doc) -> ReluNetwork:
    if not isinstance(doc, dict):
        raise ValueError("network document must be a JSON object")
    if doc.get("version") != NETWORK_FORMAT_VERSION:
        raise ValueError(f"unsupported network version: {doc.get('version')!r}")
    try:
        input_dim = int(doc["input_dim"])
        raw_layers = doc["layers"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed network document: {exc}") from exc
    layers = []
    for index, raw in enumerate(raw_layers):
        try:
            rows, cols = int(raw["rows"]), int(raw["cols"])
            flat = [parse_ratio(w) for w in raw["weights"]]
            bias = [parse_ratio(b) for b in raw["bias"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"layer {index}: malformed entry: {exc}") from exc
        if rows < 1 or cols < 1:
            raise ValueError(f"layer {index}: nonpositive shape {rows}x{cols}")
        if len(flat) != rows * cols:
            raise ValueError(
                f"layer {index}: {len(flat)} weights for declared {rows}x{cols}"
            )
        weights = tuple(tuple(flat[r * cols : (r + 1) * cols]) for r in range(rows))
        layers.append(Layer(weights, tuple(bias)))
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ValueError("metadata must be an object")
    return ReluNetwork(input_dim, tuple(layers), metadata)
