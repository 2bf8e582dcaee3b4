"""Compile source-problem instances into ReLU-network inversion queries.

Each compiler returns a ReductionArtifact: the query (network, target,
norm exponent, threshold on the p-th power, latent domain) plus the
constants it chose and a witness map describing how source witnesses
translate to latents and back.

Conventions shared by every construction here:

  * All queries are non-strict: YES iff some latent reaches p-th-powered
    distance <= threshold_pow.
  * "+/- stacking": a 1-layer network [W; -W], [b; -b] satisfies
    ||ReLU(stacked)||_p^p == sum_rows |W_r z + b_r|^p exactly, because for
    each row exactly the positive or the negative copy fires.
  * Semantic clamp/abs stages are realized with ReLU pairs whose additive
    constants cancel exactly, so the networks obey the one uniform rule
    "ReLU after every layer" without changing any quantitative claim.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .instances import CnfFormula, CvpInstance, HalfCliqueQuery, VertexCoverQuery
from .ratio import format_ratio, int_root_ceil, parse_ratio, pth_power_split, rational_root_ceil
from .relunet import (
    Layer,
    ReluNetwork,
    as_fraction,
    forward_layers,
    layer,
    network_from_dict,
    network_to_dict,
)

DOMAIN_PM1 = "pm1"
DOMAIN_01 = "01"
DOMAIN_REAL = "real"

_ZERO = Fraction(0)
_ONE = Fraction(1)

# Non-edge penalties whose p-th root is irrational are realized exactly as
# k scaled row-pairs; beyond this many copies we round the penalty up to
# the next integer p-th power instead (see halfclique_to_approx).
EXACT_SPLIT_MAX = 64


class UnsupportedReduction(ValueError):
    """The requested family/parameter combination has no construction."""


@dataclass(frozen=True)
class LatentDomain:
    """Where latents live: {-1,1}^dim, {0,1}^dim, or R^dim."""

    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in (DOMAIN_PM1, DOMAIN_01, DOMAIN_REAL):
            raise ValueError(f"bad domain kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("domain dimension must be positive")


@dataclass(frozen=True)
class InversionQuery:
    """Does some latent z in the domain satisfy dist_p(G(z), target)^p <= threshold_pow?"""

    network: ReluNetwork
    target: tuple[Fraction, ...]
    p: int
    threshold_pow: Fraction
    domain: LatentDomain

    def __post_init__(self):
        if len(self.target) != self.network.output_dim:
            raise ValueError("target length != network output dimension")
        if self.p < 1:
            raise ValueError("p must be a positive integer")
        if self.threshold_pow < 0:
            raise ValueError("threshold must be nonnegative")


@dataclass
class ReductionArtifact:
    query: InversionQuery
    constants: dict = field(default_factory=dict)
    witness_map: dict = field(default_factory=dict)
    source: object | None = None


# -- constant choosers ----------------------------------------------------
#
# The constructions need "sufficiently large" penalty constants; these
# choosers pick deterministic values and each value carries a validity
# predicate checked by constants_valid().


def choose_alpha_cvp(radius) -> Fraction:
    """Pair penalty for the lattice reduction; valid iff alpha > radius."""
    radius = as_fraction(radius)
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    return radius + 1


def choose_alpha_halfclique(p: int, total_weight, bound) -> Fraction:
    """Non-edge penalty, returned as its p-th power.

    Validity: (3**p - 1) * alpha_pow > total_weight + (3**p - 1) * bound,
    which makes any latent selecting a non-adjacent pair overshoot the
    acceptance threshold.
    """
    alpha_pow = as_fraction(bound) + as_fraction(total_weight) + 1
    if alpha_pow <= 0:
        raise ValueError("bound too negative: penalty would be nonpositive")
    return alpha_pow


def choose_alpha_vc() -> Fraction:
    """Edge penalty for the cover reduction; any positive value is valid."""
    return _ONE


def choose_beta(threshold_pow, p: int) -> Fraction:
    """Subset-size penalty, returned as its p-th power.

    Picked as the p-th power of the smallest integer whose power exceeds
    the threshold, so the penalty row itself stays rational. Validity:
    beta_pow > threshold_pow.
    """
    root = beta_root(threshold_pow, p)
    return Fraction(root) ** p


def beta_root(threshold_pow, p: int) -> int:
    """The integer actually placed in the size-penalty row."""
    threshold_pow = as_fraction(threshold_pow)
    if threshold_pow < 0:
        raise ValueError("threshold must be nonnegative")
    return int_root_ceil(threshold_pow + 1, p)


def choose_c(delta) -> int:
    """Clamp multiplier for the general binarization gadget.

    Smallest integer with (c - 2) * delta >= 1, plus one for margin.
    """
    delta = as_fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    need = 2 + 1 / delta  # smallest integer >= this
    c0 = -((-need.numerator) // need.denominator)
    return c0 + 1


# -- satisfiability, binary latents ---------------------------------------


def _clause_matrix(formula: CnfFormula) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Clause rows: -1 per positive literal, +1 per negative, 0 otherwise.

    With latents in {-1,1} a satisfied clause scores <= k-2 and an
    unsatisfied one exactly k, so bias -(k-1) sends satisfied clauses to 0
    and unsatisfied ones to 1 after the ReLU.
    """
    n = formula.num_vars
    rows = []
    for clause in formula.clauses:
        row = [_ZERO] * n
        for lit in clause:
            row[abs(lit) - 1] = Fraction(-1) if lit > 0 else _ONE
        rows.append(row)
    bias = [Fraction(-(formula.clause_width - 1))] * len(rows)
    if not rows:
        # Degenerate empty formula: a single dead row keeps the stack valid
        # and evaluates to 0 everywhere (always YES, as it should be).
        rows = [[_ZERO] * n]
        bias = [_ZERO]
    return rows, bias


def sat_to_exact_binary(formula: CnfFormula) -> ReductionArtifact:
    """Two-layer network whose range contains 0 iff the formula is satisfiable.

    Latents are assignments in {-1,1}^n (TRUE -> +1). Layer 1 scores each
    clause (0 = satisfied, 1 = violated); layer 2 sums the scores. Target 0,
    threshold 0.
    """
    rows, bias = _clause_matrix(formula)
    m = len(rows)
    net = ReluNetwork(
        formula.num_vars,
        (
            layer(rows, bias),
            layer([[1] * m], [0]),
        ),
        metadata={
            "construction": "sat-exact-binary",
            "clauses": formula.num_clauses,
            "clause_width": formula.clause_width,
        },
    )
    query = InversionQuery(
        net, (_ZERO,), 1, _ZERO, LatentDomain(DOMAIN_PM1, formula.num_vars)
    )
    return ReductionArtifact(
        query, constants={}, witness_map={"kind": "sat-pm1"}, source=formula
    )


def sat_to_exact_real(formula: CnfFormula) -> ReductionArtifact:
    """Four-layer network extending the binary construction to real latents.

    Layers 1-2 clamp each coordinate into [-1,1]; layer 3 holds the clause
    scores plus per-coordinate |v_i| split into positive/negative parts;
    layer 4 emits (sum of clause scores, sum |v_i|). Target (0, n): the
    second coordinate can only reach n when every clamped coordinate sits
    at -1 or +1, which reduces the question to the binary case.
    """
    n = formula.num_vars
    clause_rows, clause_bias = _clause_matrix(formula)
    m = len(clause_rows)

    layer1 = layer([[1 if i == j else 0 for j in range(n)] for i in range(n)], [1] * n)
    layer2 = layer([[-1 if i == j else 0 for j in range(n)] for i in range(n)], [2] * n)

    # Layer 2 outputs bv with semantic v = 1 - bv; fold that affine change
    # into layer 3.
    rows3: list[list[Fraction]] = []
    bias3: list[Fraction] = []
    for row, b in zip(clause_rows, clause_bias):
        rows3.append([-w for w in row])
        bias3.append(sum(row, _ZERO) + b)
    for i in range(n):  # ReLU(v_i) = ReLU(1 - bv_i)
        rows3.append([Fraction(-1) if j == i else _ZERO for j in range(n)])
        bias3.append(_ONE)
    for i in range(n):  # ReLU(-v_i) = ReLU(bv_i - 1)
        rows3.append([_ONE if j == i else _ZERO for j in range(n)])
        bias3.append(Fraction(-1))
    layer3 = Layer(tuple(tuple(r) for r in rows3), tuple(bias3))

    out_clause = [1] * m + [0] * (2 * n)
    out_abs = [0] * m + [1] * (2 * n)
    layer4 = layer([out_clause, out_abs], [0, 0])

    net = ReluNetwork(
        n,
        (layer1, layer2, layer3, layer4),
        metadata={
            "construction": "sat-exact-real",
            "clauses": formula.num_clauses,
            "clause_width": formula.clause_width,
        },
    )
    query = InversionQuery(
        net, (_ZERO, Fraction(n)), 1, _ZERO, LatentDomain(DOMAIN_REAL, n)
    )
    return ReductionArtifact(
        query, constants={}, witness_map={"kind": "sat-real"}, source=formula
    )


# -- lattice instances, binary latents ------------------------------------


def _stack(rows: list[list[Fraction]], bias: list[Fraction]) -> Layer:
    """[W; -W], [b; -b]: the post-ReLU l_p^p norm equals the affine residual norm."""
    stacked_rows = [list(r) for r in rows] + [[-w for w in r] for r in rows]
    stacked_bias = list(bias) + [-b for b in bias]
    return Layer(
        tuple(tuple(r) for r in stacked_rows),
        tuple(stacked_bias),
    )


def cvp_to_approx_binary(inst: CvpInstance, strict: bool = True) -> ReductionArtifact:
    """One-layer network matching binary lattice combinations within the radius.

    Latents live in {0,1}^(2n), coordinates paired: a valid latent has
    exactly one of z_{2i}, z_{2i+1} set, encoding y_i = z_{2i}. The lattice
    rows reproduce By - t on valid latents; the pair rows charge alpha > r
    for any invalid pair, pushing those latents past the threshold r^p.

    The construction works for every p >= 1; in strict mode even p is
    rejected because even-norm instances are routed through the graph
    reductions instead.
    """
    if strict and inst.p % 2 == 0:
        raise UnsupportedReduction(
            "even p is handled by the half-clique / vertex-cover route; "
            "pass strict=False to build the lattice gadget anyway"
        )
    n, d = inst.num_vectors, inst.dim
    N = 2 * n
    alpha = choose_alpha_cvp(inst.radius)

    rows: list[list[Fraction]] = []
    bias: list[Fraction] = []
    for r in range(d):
        row = [_ZERO] * N
        for i in range(n):
            row[2 * i] = inst.basis[r][i]
        rows.append(row)
        bias.append(-inst.target[r])
    for i in range(n):
        row = [_ZERO] * N
        row[2 * i] = alpha
        row[2 * i + 1] = alpha
        rows.append(row)
        bias.append(-alpha)

    net = ReluNetwork(
        N,
        (_stack(rows, bias),),
        metadata={
            "construction": "cvp-approx-binary",
            "lattice_rows": d,
            "pair_rows": n,
        },
    )
    theta = inst.radius**inst.p
    query = InversionQuery(
        net,
        tuple([_ZERO] * net.output_dim),
        inst.p,
        theta,
        LatentDomain(DOMAIN_01, N),
    )
    return ReductionArtifact(
        query,
        constants={"alpha": alpha, "radius": inst.radius},
        witness_map={"kind": "cvp-pairs", "n": n},
        source=inst,
    )


# -- the binarization gadget ----------------------------------------------

MODE_QUARTER = "quarter"
MODE_GENERAL = "general"


def binarization_gadget(inner: ReductionArtifact, delta, mode: str) -> ReductionArtifact:
    """Wrap a 1-layer binary-latent query so real latents behave binarily.

    Five layers: clamp into [0, U] (U = 1 in quarter mode, U = c*delta in
    general mode), per-coordinate collapse scores, per-coordinate deviation
    |v_i - U/2| split into ReLU pairs, a hard 0/1 collapse, and finally the
    inner layer plus one node carrying the total deviation. The appended
    target coordinate N*U/2 is reachable only when every clamped coordinate
    sits within delta of {0, U}, at which point the collapse is exactly 0/1
    and the inner (binary) question takes over. Threshold unchanged.

    Quarter mode follows the small-delta analysis (delta < 1/4, collapse
    slope 4); general mode accepts any delta > 0 via the clamp multiplier
    c with (c - 2) * delta >= 1.
    """
    delta = as_fraction(delta)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    inner_net = inner.query.network
    if inner_net.depth != 1:
        raise ValueError("gadget wraps 1-layer constructions only")
    if inner.query.domain.kind != DOMAIN_01:
        raise ValueError("gadget wraps {0,1}-latent queries only")
    N = inner.query.domain.dim

    if mode == MODE_QUARTER:
        if delta >= Fraction(1, 4):
            raise ValueError("quarter mode requires delta < 1/4")
        clamp_hi = _ONE
        collapse_bias = Fraction(1, 2)
        slope = Fraction(4)
        c = None
    elif mode == MODE_GENERAL:
        if delta <= 0:
            raise ValueError("general mode requires delta > 0")
        c = choose_c(delta)
        clamp_hi = c * delta
        collapse_bias = (c - 1) * delta
        slope = _ONE
    else:
        raise ValueError(f"unknown gadget mode {mode!r}")
    half = clamp_hi / 2

    eye = [[1 if i == j else 0 for j in range(N)] for i in range(N)]
    neg_eye = [[-1 if i == j else 0 for j in range(N)] for i in range(N)]
    layer1 = layer(eye, [0] * N)
    layer2 = layer(neg_eye, [clamp_hi] * N)

    # Layer 2 outputs bv with semantic v = clamp_hi - bv.
    rows3: list[list[Fraction]] = []
    bias3: list[Fraction] = []
    for i in range(N):  # collapse score ReLU(collapse_bias - v_i)
        rows3.append([_ONE if j == i else _ZERO for j in range(N)])
        bias3.append(collapse_bias - clamp_hi)
    for i in range(N):  # ReLU(v_i - half)
        rows3.append([Fraction(-1) if j == i else _ZERO for j in range(N)])
        bias3.append(half)
    for i in range(N):  # ReLU(half - v_i)
        rows3.append([_ONE if j == i else _ZERO for j in range(N)])
        bias3.append(-half)
    layer3 = Layer(tuple(tuple(r) for r in rows3), tuple(bias3))

    rows4: list[list[Fraction]] = []
    bias4: list[Fraction] = []
    for i in range(N):  # hard collapse: 1 when v_i is high, 0 when low
        row = [_ZERO] * (3 * N)
        row[i] = -slope
        rows4.append(row)
        bias4.append(_ONE)
    deviation_row = [_ZERO] * N + [_ONE] * (2 * N)
    rows4.append(deviation_row)
    bias4.append(_ZERO)
    layer4 = Layer(tuple(tuple(r) for r in rows4), tuple(bias4))

    inner_layer = inner_net.layers[0]
    rows5 = [list(row) + [_ZERO] for row in inner_layer.weights]
    bias5 = list(inner_layer.bias)
    rows5.append([_ZERO] * N + [_ONE])
    bias5.append(_ZERO)
    layer5 = Layer(tuple(tuple(r) for r in rows5), tuple(bias5))

    tail = Fraction(N) * clamp_hi / 2
    net = ReluNetwork(
        N,
        (layer1, layer2, layer3, layer4, layer5),
        metadata={
            "construction": "binarized:" + inner_net.metadata.get("construction", "?"),
            "gadget_mode": mode,
        },
    )
    query = InversionQuery(
        net,
        inner.query.target + (tail,),
        inner.query.p,
        inner.query.threshold_pow,
        LatentDomain(DOMAIN_REAL, N),
    )
    constants = dict(inner.constants)
    constants.update(
        {
            "gadget_mode": mode,
            "delta": delta,
            "clamp_hi": clamp_hi,
            "collapse_bias": collapse_bias,
            "collapse_slope": slope,
        }
    )
    if c is not None:
        constants["c"] = c
    return ReductionArtifact(
        query,
        constants=constants,
        witness_map={"kind": "binarized", "scale": clamp_hi, "inner": inner.witness_map},
        source=inner.source,
    )


def cvp_to_approx_real(inst: CvpInstance, strict: bool = True) -> ReductionArtifact:
    """Five-layer real-latent variant: gadget around the binary lattice query.

    Quarter mode when the radius is below 1/4, general mode otherwise.
    """
    inner = cvp_to_approx_binary(inst, strict=strict)
    mode = MODE_QUARTER if inst.radius < Fraction(1, 4) else MODE_GENERAL
    return binarization_gadget(inner, inst.radius, mode)


# -- graph queries, even p ------------------------------------------------


def _all_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def halfclique_to_approx(
    query: HalfCliqueQuery, p: int, exact_split_max: int = EXACT_SPLIT_MAX
) -> ReductionArtifact:
    """One-layer network accepting exactly the light half-cliques.

    Each vertex pair gets a row: edges are scaled by their root-weight,
    non-adjacent pairs by the non-edge penalty, and a final row charges the
    subset-size penalty unless exactly n/2 vertices are picked. For a
    half-clique indicator the powered distance evaluates to
    (3**p - 1) * clique_weight + alpha_pow * Z + total_weight, so the
    threshold encodes "clique weight < bound".

    The non-edge penalty alpha_pow = bound + total_weight + 1 rarely has a
    rational p-th root, so each non-edge is realized as k scaled row-pairs
    with k * s**p == alpha_pow exactly; when that k would exceed
    exact_split_max the penalty is rounded up to the next integer p-th
    power instead (the validity predicate is preserved either way).
    """
    if p < 2 or p % 2 != 0:
        raise UnsupportedReduction("the half-clique route requires a positive even p")
    g = query.graph
    n = g.num_vertices
    roots = g.root_weights()
    pairs = _all_pairs(n)
    nonedge_count = len(pairs) - len(roots)
    total_weight = sum((root**p for root in roots.values()), _ZERO)

    alpha_pow = choose_alpha_halfclique(p, total_weight, query.bound)
    copies, alpha_root = pth_power_split(alpha_pow, p)
    if copies > exact_split_max:
        alpha_root = Fraction(int_root_ceil(alpha_pow, p))
        alpha_pow = alpha_root**p
        copies = 1

    theta = total_weight + alpha_pow * nonedge_count + (Fraction(3) ** p - 1) * query.bound
    if theta < 0:
        raise ValueError("bound so small the threshold would be negative")
    beta = Fraction(beta_root(theta, p))

    rows: list[list[Fraction]] = []
    bias: list[Fraction] = []
    for i, j in pairs:
        if (i, j) in roots:
            scales = [roots[(i, j)]]
        else:
            scales = [alpha_root] * copies
        for s in scales:
            row = [_ZERO] * n
            row[i - 1] = 2 * s
            row[j - 1] = 2 * s
            rows.append(row)
            bias.append(-s)
    rows.append([beta] * n)
    bias.append(-Fraction(n, 2) * beta)

    net = ReluNetwork(
        n,
        (_stack(rows, bias),),
        metadata={
            "construction": "halfclique-approx",
            "nonedge_copies": copies,
            "pair_rows": len(rows) - 1,
        },
    )
    inv_query = InversionQuery(
        net, tuple([_ZERO] * net.output_dim), p, theta, LatentDomain(DOMAIN_01, n)
    )
    return ReductionArtifact(
        inv_query,
        constants={
            "alpha_pow": alpha_pow,
            "alpha_root": alpha_root,
            "alpha_copies": copies,
            "beta": beta,
            "beta_pow": beta**p,
            "total_weight": total_weight,
            "nonedge_count": nonedge_count,
            "bound": query.bound,
        },
        witness_map={"kind": "clique-indicator"},
        source=query,
    )


def halfclique_to_approx_real(
    query: HalfCliqueQuery, p: int, mode: str = MODE_GENERAL, delta=None
) -> ReductionArtifact:
    """Gadget-wrapped half-clique query for real latents.

    The gadget parameter must be a rational upper bound on the p-th root of
    the threshold; by default the smallest 1/64-grid value is used. Any
    rational delta with delta**p >= threshold works: the YES witness is the
    scaled binary witness, and an accepted real latent still pins every
    clamped coordinate within the true root of the threshold of {0, U}.
    """
    inner = halfclique_to_approx(query, p)
    if delta is None:
        delta = rational_root_ceil(inner.query.threshold_pow, p)
    else:
        delta = as_fraction(delta)
        if delta**p < inner.query.threshold_pow:
            raise ValueError("delta**p must dominate the threshold")
    return binarization_gadget(inner, delta, mode)


def vertexcover_to_approx(query: VertexCoverQuery, p: int) -> ReductionArtifact:
    """One-layer network accepting exactly the complements of size-q covers.

    Vertices outside the cover get latent value 1. Every covered edge
    contributes exactly alpha**p = 1, an uncovered edge 3**p, and the size
    row charges beta unless exactly n - q vertices are picked; the
    threshold is the edge count, reached exactly by cover complements.
    Edge weights are ignored. Non-adjacent pairs keep an all-zero row so
    the stacked width is 2*(C(n,2)+1) regardless of the graph.
    """
    if p < 2 or p % 2 != 0:
        raise UnsupportedReduction("the vertex-cover route requires a positive even p")
    g = query.graph
    n = g.num_vertices
    edge_set = {(i, j) for i, j, _ in g.edges}
    alpha = choose_alpha_vc()
    edge_count = len(edge_set)
    theta = Fraction(edge_count) * alpha**p
    beta = Fraction(beta_root(theta, p))

    rows: list[list[Fraction]] = []
    bias: list[Fraction] = []
    for i, j in _all_pairs(n):
        row = [_ZERO] * n
        if (i, j) in edge_set:
            row[i - 1] = 2 * alpha
            row[j - 1] = 2 * alpha
            rows.append(row)
            bias.append(-alpha)
        else:
            rows.append(row)
            bias.append(_ZERO)
    rows.append([beta] * n)
    bias.append(-Fraction(n - query.size) * beta)

    net = ReluNetwork(
        n,
        (_stack(rows, bias),),
        metadata={"construction": "vertexcover-approx", "edge_count": edge_count},
    )
    inv_query = InversionQuery(
        net, tuple([_ZERO] * net.output_dim), p, theta, LatentDomain(DOMAIN_01, n)
    )
    return ReductionArtifact(
        inv_query,
        constants={
            "alpha": alpha,
            "beta": beta,
            "beta_pow": beta**p,
            "edge_count": edge_count,
        },
        witness_map={"kind": "cover-complement"},
        source=query,
    )


# -- constant validity ----------------------------------------------------


def constants_valid(artifact: ReductionArtifact) -> bool:
    """Machine check of every chooser's validity predicate for this artifact."""
    consts = artifact.constants
    p = artifact.query.p
    theta = artifact.query.threshold_pow
    kind = artifact.witness_map.get("kind")
    if kind == "binarized":
        inner_kind = artifact.witness_map["inner"].get("kind")
        delta = consts["delta"]
        if consts["gadget_mode"] == MODE_GENERAL:
            if (consts["c"] - 2) * delta < 1:
                return False
        else:
            if not delta < Fraction(1, 4):
                return False
            if consts["collapse_slope"] * (consts["collapse_bias"] - delta) < 1:
                return False
    else:
        inner_kind = kind
    if inner_kind == "cvp-pairs":
        if not consts["alpha"] > consts["radius"]:
            return False
    elif inner_kind == "clique-indicator":
        lhs = (Fraction(3) ** p - 1) * consts["alpha_pow"]
        rhs = consts["total_weight"] + (Fraction(3) ** p - 1) * consts["bound"]
        if not lhs > rhs:
            return False
        if not consts["alpha_copies"] * consts["alpha_root"] ** p == consts["alpha_pow"]:
            return False
        if not consts["beta_pow"] > theta:
            return False
    elif inner_kind == "cover-complement":
        if not consts["alpha"] > 0:
            return False
        if not consts["beta_pow"] > theta:
            return False
    return True


# -- witness translation ---------------------------------------------------


def forward_witness(artifact: ReductionArtifact, source_witness) -> tuple[Fraction, ...]:
    """Map a source-problem witness to a latent in the query's domain.

    Source forms: a bool tuple (assignments), an int 0/1 tuple (lattice
    coefficients), or a vertex set (cliques and covers, 1-based).
    """
    kind = artifact.witness_map["kind"]
    dim = artifact.query.domain.dim
    if kind in ("sat-pm1", "sat-real"):
        return tuple(_ONE if v else Fraction(-1) for v in source_witness)
    if kind == "cvp-pairs":
        out = []
        for y in source_witness:
            if y not in (0, 1):
                raise ValueError("lattice coefficients must be 0/1")
            out.extend((Fraction(y), _ONE - y))
        return tuple(out)
    if kind == "clique-indicator":
        chosen = set(source_witness)
        return tuple(_ONE if i + 1 in chosen else _ZERO for i in range(dim))
    if kind == "cover-complement":
        cover = set(source_witness)
        return tuple(_ZERO if i + 1 in cover else _ONE for i in range(dim))
    if kind == "binarized":
        inner_art = ReductionArtifact(
            artifact.query, artifact.constants, artifact.witness_map["inner"]
        )
        binary = forward_witness(inner_art, source_witness)
        scale = as_fraction(artifact.witness_map["scale"])
        return tuple(scale * v for v in binary)
    raise ValueError(f"unknown witness map kind {kind!r}")


def backward_witness(artifact: ReductionArtifact, latent) -> object:
    """Map an accepted latent back to a source-problem witness."""
    kind = artifact.witness_map["kind"]
    latent = tuple(as_fraction(v) for v in latent)
    if kind == "sat-pm1":
        return tuple(v > 0 for v in latent)
    if kind == "sat-real":
        clamped = [min(max(v, Fraction(-1)), _ONE) for v in latent]
        if any(abs(v) != 1 for v in clamped):
            raise ValueError("latent does not clamp to a +/-1 assignment")
        return tuple(v == 1 for v in clamped)
    if kind == "cvp-pairs":
        out = []
        for i in range(0, len(latent), 2):
            a, b = latent[i], latent[i + 1]
            if {a, b} != {_ZERO, _ONE}:
                raise ValueError(f"pair ({a},{b}) is not exclusive")
            out.append(int(a))
        return tuple(out)
    if kind == "clique-indicator":
        if any(v not in (_ZERO, _ONE) for v in latent):
            raise ValueError("latent is not an indicator vector")
        return frozenset(i + 1 for i, v in enumerate(latent) if v == 1)
    if kind == "cover-complement":
        if any(v not in (_ZERO, _ONE) for v in latent):
            raise ValueError("latent is not an indicator vector")
        return frozenset(i + 1 for i, v in enumerate(latent) if v == 0)
    if kind == "binarized":
        # Read the exactly-collapsed 0/1 coordinates out of layer 4.
        outputs = forward_layers(artifact.query.network, latent)
        dim = artifact.query.domain.dim
        bits = outputs[3][:dim]
        if any(v not in (_ZERO, _ONE) for v in bits):
            raise ValueError("latent does not collapse to binary coordinates")
        inner_art = ReductionArtifact(
            artifact.query, artifact.constants, artifact.witness_map["inner"]
        )
        return backward_witness(inner_art, bits)
    raise ValueError(f"unknown witness map kind {kind!r}")


# -- artifact (de)serialization --------------------------------------------


def _jsonify(value):
    if isinstance(value, Fraction):
        return format_ratio(value)
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    return value


def artifact_to_json(artifact: ReductionArtifact) -> str:
    doc = {
        "network": network_to_dict(artifact.query.network),
        "target": [format_ratio(v) for v in artifact.query.target],
        "p": artifact.query.p,
        "threshold_pow": format_ratio(artifact.query.threshold_pow),
        "domain": {"kind": artifact.query.domain.kind, "dim": artifact.query.domain.dim},
        "constants": _jsonify(artifact.constants),
        "witness_map": _jsonify(artifact.witness_map),
    }
    return json.dumps(doc, sort_keys=True)


def _constants_from_json(doc):
    out = {}
    for key, value in doc.items():
        if isinstance(value, str) and "/" in value:
            out[key] = parse_ratio(value)
        elif isinstance(value, dict):
            out[key] = _constants_from_json(value)
        else:
            out[key] = value
    return out


def artifact_from_json(text: str | bytes) -> ReductionArtifact:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed artifact document: {exc}") from exc
    try:
        net = network_from_dict(doc["network"])
        target = tuple(parse_ratio(v) for v in doc["target"])
        p = int(doc["p"])
        theta = parse_ratio(doc["threshold_pow"])
        domain = LatentDomain(doc["domain"]["kind"], int(doc["domain"]["dim"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed artifact document: {exc}") from exc
    query = InversionQuery(net, target, p, theta, domain)
    constants = _constants_from_json(doc.get("constants", {}))
    witness_map = _constants_from_json(doc.get("witness_map", {}))
    return ReductionArtifact(query, constants=constants, witness_map=witness_map)
