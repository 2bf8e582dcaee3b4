import random
from fractions import Fraction

import pytest

from invforge.relunet import (
    Layer,
    ReluNetwork,
    deserialize,
    distance_pow,
    forward,
    forward_float,
    layer,
    serialize,
)


def identity_net(n=2):
    rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    return ReluNetwork(n, (layer(rows, [0] * n),))


def random_net(rng, max_depth=3, max_width=6, entry_bound=10):
    def entry():
        return Fraction(rng.randint(-entry_bound, entry_bound), rng.randint(1, 4))

    n = rng.randint(1, max_width)
    layers = []
    fan_in = n
    for _ in range(rng.randint(1, max_depth)):
        fan_out = rng.randint(1, max_width)
        rows = [[entry() for _ in range(fan_in)] for _ in range(fan_out)]
        layers.append(layer(rows, [entry() for _ in range(fan_out)]))
        fan_in = fan_out
    return ReluNetwork(n, tuple(layers))


def test_forward_identity_on_nonnegative():
    net = identity_net(2)
    assert forward(net, (Fraction(1), Fraction(2))) == (Fraction(1), Fraction(2))


def test_forward_relu_annihilates_negative():
    net = ReluNetwork(1, (layer([[-1]], [0]),))
    assert forward(net, (Fraction(3),)) == (Fraction(0),)


def test_forward_clause_row_zeroes_out():
    # a satisfied 2-literal clause scores <= 0 before the ReLU
    net = ReluNetwork(2, (layer([[-1, -1]], [-1]),))
    assert forward(net, (Fraction(1), Fraction(1))) == (Fraction(0),)


def test_forward_rejects_wrong_dimension():
    with pytest.raises(ValueError):
        forward(identity_net(2), (Fraction(1),))
    with pytest.raises(ValueError):
        forward_float(identity_net(2), [1.0, 2.0, 3.0])


def test_outputs_always_nonnegative():
    rng = random.Random(7)
    for _ in range(60):
        net = random_net(rng)
        z = [Fraction(rng.randint(-20, 20), rng.randint(1, 5)) for _ in range(net.input_dim)]
        assert all(v >= 0 for v in forward(net, z))


def test_piecewise_affine_within_a_region():
    # if two points share an activation pattern, the midpoint is affine
    from invforge.oracles import pattern_of

    rng = random.Random(11)
    checked = 0
    while checked < 25:
        net = random_net(rng, max_depth=2, max_width=4)
        z1 = [Fraction(rng.randint(-8, 8), 2) for _ in range(net.input_dim)]
        z2 = [Fraction(rng.randint(-8, 8), 2) for _ in range(net.input_dim)]
        if pattern_of(net, z1) != pattern_of(net, z2):
            continue
        mid = [(a + b) / 2 for a, b in zip(z1, z2)]
        lhs = forward(net, mid)
        rhs = tuple((a + b) / 2 for a, b in zip(forward(net, z1), forward(net, z2)))
        assert lhs == rhs
        checked += 1


def test_distance_pow_examples():
    assert distance_pow((Fraction(1),), (Fraction(1),), 2).value == 0
    assert distance_pow((Fraction(3),), (Fraction(1),), 2).value == 4
    assert distance_pow((Fraction(1), Fraction(2)), (Fraction(0), Fraction(0)), 3).value == 9


def test_distance_pow_zero_iff_equal():
    rng = random.Random(3)
    for _ in range(50):
        k = rng.randint(1, 5)
        y = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(k))
        x = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(k))
        d = distance_pow(y, x, rng.randint(1, 4))
        assert (d.value == 0) == (y == x)


def test_distance_pow_length_mismatch():
    with pytest.raises(ValueError):
        distance_pow((Fraction(1),), (Fraction(1), Fraction(2)), 1)


def test_serialize_roundtrip_identity():
    net = identity_net(3)
    assert deserialize(serialize(net)) == net


def test_serialize_roundtrip_random():
    rng = random.Random(23)
    for _ in range(100):
        net = random_net(rng)
        again = deserialize(serialize(net))
        assert again == net
        assert serialize(again) == serialize(net)


def test_deserialize_rejects_bad_documents():
    net = identity_net(1)
    import json

    doc = json.loads(serialize(net))
    bad = dict(doc)
    bad["layers"] = [dict(doc["layers"][0], bias=["0/1", "0/1"])]
    with pytest.raises(ValueError):
        deserialize(json.dumps(bad))
    with pytest.raises(ValueError):
        deserialize("not json at all {{{")
    with pytest.raises(ValueError):
        deserialize(json.dumps(dict(doc, version="relunet-999")))
    mismatched = dict(doc)
    mismatched["layers"] = [dict(doc["layers"][0], cols=7)]
    with pytest.raises(ValueError):
        deserialize(json.dumps(mismatched))


def test_layer_invariants():
    with pytest.raises(ValueError):
        Layer(((Fraction(1),),), (Fraction(0), Fraction(0)))
    with pytest.raises(ValueError):
        ReluNetwork(2, (layer([[1]], [0]),))  # fan-in mismatch


def test_float_path_tracks_exact_path():
    rng = random.Random(41)
    for _ in range(120):
        net = random_net(rng, max_depth=5, max_width=16)
        z = [Fraction(rng.randint(-10, 10), rng.randint(1, 3)) for _ in range(net.input_dim)]
        exact = forward(net, z)
        approx = forward_float(net, [float(v) for v in z])
        for e, a in zip(exact, approx):
            scale = max(1.0, abs(float(e)))
            assert abs(float(e) - a) / scale <= 1e-6
