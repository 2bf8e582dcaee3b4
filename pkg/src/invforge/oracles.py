"""Independent ground-truth solvers.

Brute force for the four source problems, brute force for binary-latent
inversion, exact activation-pattern enumeration (with rational LP) for
real-latent inversion, and a heuristic float falsifier that can only
certify YES.

Exactness contract: no verdict ever depends on floating point. The
integer fast paths rescale all data to integers and guard against int64
overflow, falling back to arbitrary-precision arithmetic when the bound
check fails. The falsifier searches in float but re-verifies every
candidate with exact rational forward evaluation before answering YES.

Enumeration caps are configuration: explicit argument, then the
INVFORGE_CAP environment variable, then the defaults below.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .instances import CnfFormula, CvpInstance, HalfCliqueQuery, VertexCoverQuery
from .lp import GE, LE, EQ, LinearProgram, lp_feasible, lp_minimize
from .relunet import ReluNetwork, as_fraction, distance_pow, float_layers, forward
from .reductions import DOMAIN_01, DOMAIN_PM1, DOMAIN_REAL, InversionQuery

YES, NO = "YES", "NO"
CERT_EXHAUSTIVE = "exhaustive"
CERT_PATTERN = "pattern-enumeration"
CERT_FALSIFIER = "falsifier-only"

DEFAULT_CAPS = {
    "sat_vars": 24,
    "latent_bits": 24,
    "subset_vertices": 16,
    "pattern_units": 18,
}

_ZERO = Fraction(0)
_ONE = Fraction(1)
_INT64_SAFE = (1 << 63) - 1  # rigorous bound: no intermediate may exceed this


class CapExceeded(RuntimeError):
    """The instance is larger than the configured enumeration cap."""


def resolve_cap(name: str, override: int | None = None) -> int:
    if override is not None:
        return override
    env = os.environ.get("INVFORGE_CAP")
    if env is not None:
        return int(env)
    return DEFAULT_CAPS[name]


@dataclass
class VerdictStats:
    latents_enumerated: int = 0
    patterns_enumerated: int = 0
    lp_pivots: int = 0


@dataclass
class Verdict:
    decision: str
    witness: tuple[Fraction, ...] | None
    certificate: str
    stats: VerdictStats = field(default_factory=VerdictStats)

    @property
    def is_yes(self) -> bool:
        return self.decision == YES

    def to_dict(self) -> dict:
        return {
            "decision": self.decision,
            "witness": None
            if self.witness is None
            else [f"{v.numerator}/{v.denominator}" for v in self.witness],
            "certificate": self.certificate,
            "stats": {
                "latents_enumerated": self.stats.latents_enumerated,
                "patterns_enumerated": self.stats.patterns_enumerated,
                "lp_pivots": self.stats.lp_pivots,
            },
        }


def _bits_msb(index: int, width: int) -> tuple[int, ...]:
    """Bits of index, most significant first, so numeric order = lex order."""
    return tuple((index >> (width - 1 - pos)) & 1 for pos in range(width))


# -- SAT -------------------------------------------------------------------


def _clause_masks(formula: CnfFormula) -> list[tuple[int, int]]:
    masks = []
    for clause in formula.clauses:
        pos = neg = 0
        for lit in clause:
            bit = 1 << (formula.num_vars - abs(lit))
            if lit > 0:
                pos |= bit
            else:
                neg |= bit
        masks.append((pos, neg))
    return masks


def solve_sat_bruteforce(
    formula: CnfFormula, cap: int | None = None, early_exit: bool = True
) -> Verdict:
    """Exhaustive 2^n scan; witness = lexicographically smallest model (F < T)."""
    n = formula.num_vars
    limit = resolve_cap("sat_vars", cap)
    if n > limit:
        raise CapExceeded(f"{n} variables exceeds cap {limit}")
    masks = _clause_masks(formula)
    full = (1 << n) - 1
    visited = 0
    found = None
    for assignment in range(1 << n):
        visited += 1
        satisfied = True
        for pos, neg in masks:
            if (assignment & pos) | (~assignment & neg & full) == 0:
                satisfied = False
                break
        if satisfied:
            found = assignment
            if early_exit:
                break
    stats = VerdictStats(latents_enumerated=visited)
    if found is None:
        return Verdict(NO, None, CERT_EXHAUSTIVE, stats)
    witness = tuple(Fraction(b) for b in _bits_msb(found, n))
    return Verdict(YES, witness, CERT_EXHAUSTIVE, stats)


def count_sat_assignments(formula: CnfFormula) -> tuple[int, int]:
    """(satisfying assignments, states scanned); full scan, used by the bench."""
    n = formula.num_vars
    masks = _clause_masks(formula)
    full = (1 << n) - 1
    count = 0
    for assignment in range(1 << n):
        for pos, neg in masks:
            if (assignment & pos) | (~assignment & neg & full) == 0:
                break
        else:
            count += 1
    return count, 1 << n


# -- (0,1)-CVP ---------------------------------------------------------------


def solve_cvp01_bruteforce(inst: CvpInstance, cap: int | None = None) -> Verdict:
    """Exhaustive over {0,1}^n coefficient vectors; exact rational comparison."""
    n = inst.num_vectors
    limit = resolve_cap("latent_bits", cap)
    if n > limit:
        raise CapExceeded(f"{n} coefficients exceeds cap {limit}")
    threshold = inst.radius**inst.p
    best_val: Fraction | None = None
    best_index = None
    for index in range(1 << n):
        y = _bits_msb(index, n)
        total = _ZERO
        for r in range(inst.dim):
            residual = -inst.target[r]
            row = inst.basis[r]
            for i in range(n):
                if y[i]:
                    residual += row[i]
            total += abs(residual) ** inst.p
        if best_val is None or total < best_val:
            best_val, best_index = total, index
    stats = VerdictStats(latents_enumerated=1 << n)
    if best_val is not None and best_val <= threshold:
        witness = tuple(Fraction(b) for b in _bits_msb(best_index, n))
        return Verdict(YES, witness, CERT_EXHAUSTIVE, stats)
    return Verdict(NO, None, CERT_EXHAUSTIVE, stats)


# -- graph problems ----------------------------------------------------------


def solve_halfclique_bruteforce(
    query: HalfCliqueQuery, p: int = 2, cap: int | None = None
) -> Verdict:
    """All C(n, n/2) subsets; YES iff some clique weighs strictly below the bound.

    Effective edge weights are root_weight**p, so the oracle needs the same
    exponent the downstream reduction uses.
    """
    g = query.graph
    n = g.num_vertices
    limit = resolve_cap("subset_vertices", cap)
    if n > limit:
        raise CapExceeded(f"{n} vertices exceeds cap {limit}")
    if n % 2 != 0:
        raise ValueError("half-clique needs an even vertex count")
    roots = g.root_weights()
    half = n // 2
    checked = 0
    for index in range(1 << n):  # ascending = indicator-lex order
        bits = _bits_msb(index, n)
        if sum(bits) != half:
            continue
        checked += 1
        vertices = [i + 1 for i, b in enumerate(bits) if b]
        weight = _ZERO
        is_clique = True
        for a, b in itertools.combinations(vertices, 2):
            root = roots.get((a, b))
            if root is None:
                is_clique = False
                break
            weight += root**p
        if is_clique and weight < query.bound:
            witness = tuple(Fraction(bit) for bit in bits)
            return Verdict(
                YES, witness, CERT_EXHAUSTIVE, VerdictStats(latents_enumerated=checked)
            )
    return Verdict(NO, None, CERT_EXHAUSTIVE, VerdictStats(latents_enumerated=checked))


def solve_vertexcover_bruteforce(query: VertexCoverQuery, cap: int | None = None) -> Verdict:
    """All C(n, q) subsets of exactly the requested size; weights ignored."""
    g = query.graph
    n = g.num_vertices
    limit = resolve_cap("subset_vertices", cap)
    if n > limit:
        raise CapExceeded(f"{n} vertices exceeds cap {limit}")
    edges = [(i, j) for i, j, _ in g.edges]
    checked = 0
    for index in range(1 << n):
        bits = _bits_msb(index, n)
        if sum(bits) != query.size:
            continue
        checked += 1
        chosen = {i + 1 for i, b in enumerate(bits) if b}
        if all(i in chosen or j in chosen for i, j in edges):
            witness = tuple(Fraction(b) for b in bits)
            return Verdict(
                YES, witness, CERT_EXHAUSTIVE, VerdictStats(latents_enumerated=checked)
            )
    return Verdict(NO, None, CERT_EXHAUSTIVE, VerdictStats(latents_enumerated=checked))


# -- binary-latent inversion -------------------------------------------------


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def _integerized(query: InversionQuery):
    """Rescale layers, target and threshold so everything is an integer.

    Layer l weights are scaled by lam_l and its bias by prod(lam_1..lam_l);
    ReLU commutes with positive scaling, so the final outputs come out
    scaled by the full product and distances by its p-th power.
    """
    scale = 1
    layers = []
    for lyr in query.network.layers:
        denoms = [w.denominator for row in lyr.weights for w in row]
        denoms += [(b * scale).denominator for b in lyr.bias]
        lam = _lcm(denoms)
        weights = [[int(w * lam) for w in row] for row in lyr.weights]
        scale *= lam
        bias = [int(b * scale) for b in lyr.bias]
        layers.append((weights, bias))
    target_lam = _lcm([(t * scale).denominator for t in query.target])
    if target_lam != 1:
        # fold the target's denominator into the last layer's scale
        weights, bias = layers[-1]
        layers[-1] = (
            [[w * target_lam for w in row] for row in weights],
            [b * target_lam for b in bias],
        )
        scale *= target_lam
    target = [int(t * scale) for t in query.target]
    threshold_scaled = query.threshold_pow * Fraction(scale) ** query.p
    return layers, target, threshold_scaled, scale


def _int_path_safe(layers, target, p: int) -> bool:
    bound = 1  # max |input coordinate|
    for weights, bias in layers:
        row_bound = 0
        for row, b in zip(weights, bias):
            row_bound = max(row_bound, sum(abs(w) for w in row) * bound + abs(b))
        bound = row_bound
        if bound > _INT64_SAFE:
            return False
    coord = bound + max((abs(t) for t in target), default=0)
    total = len(target) * coord**p
    return total <= _INT64_SAFE


def invert_binary_bruteforce(query: InversionQuery, cap: int | None = None) -> Verdict:
    """Exhaustive scan of a binary latent domain.

    YES iff the minimum p-th-powered distance is <= the threshold; the
    witness is the lexicographically smallest minimizer (-1 < 1, 0 < 1).
    """
    kind = query.domain.kind
    if kind == DOMAIN_REAL:
        raise ValueError("binary brute force cannot search a real domain")
    n = query.domain.dim
    limit = resolve_cap("latent_bits", cap)
    if n > limit:
        raise CapExceeded(f"{n} latent bits exceeds cap {limit}")
    layers, target, threshold_scaled, _ = _integerized(query)
    pm1 = kind == DOMAIN_PM1
    p = query.p

    if _int_path_safe(layers, target, p):
        best_val, best_index = _scan_int64(layers, target, p, n, pm1)
        best_val = Fraction(int(best_val))
    else:
        best_val, best_index = _scan_bigint(layers, target, p, n, pm1)
        best_val = Fraction(best_val)

    stats = VerdictStats(latents_enumerated=1 << n)
    if best_val <= threshold_scaled:
        bits = _bits_msb(best_index, n)
        if pm1:
            witness = tuple(Fraction(2 * b - 1) for b in bits)
        else:
            witness = tuple(Fraction(b) for b in bits)
        return Verdict(YES, witness, CERT_EXHAUSTIVE, stats)
    return Verdict(NO, None, CERT_EXHAUSTIVE, stats)


def _scan_int64(layers, target, p, n, pm1, chunk_bits: int = 16):
    np_layers = [
        (np.array(w, dtype=np.int64).T, np.array(b, dtype=np.int64)) for w, b in layers
    ]
    np_target = np.array(target, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    total = 1 << n
    step = 1 << min(chunk_bits, n)
    best_val = None
    best_index = -1
    for base in range(0, total, step):
        idx = np.arange(base, min(base + step, total), dtype=np.int64)
        acts = (idx[:, None] >> shifts[None, :]) & 1
        if pm1:
            acts = 2 * acts - 1
        for w_t, b in np_layers:
            acts = np.maximum(acts @ w_t + b, 0)
        dist = np.abs(acts - np_target) ** p
        dist = dist.sum(axis=1)
        pos = int(np.argmin(dist))
        val = int(dist[pos])
        if best_val is None or val < best_val:
            best_val = val
            best_index = base + pos
    return best_val, best_index


def _scan_bigint(layers, target, p, n, pm1):
    """Arbitrary-precision fallback; same scan in pure Python integers."""
    best_val = None
    best_index = -1
    for index in range(1 << n):
        bits = _bits_msb(index, n)
        acts = [2 * b - 1 for b in bits] if pm1 else list(bits)
        for weights, bias in layers:
            acts = [
                max(sum(w * a for w, a in zip(row, acts)) + b, 0)
                for row, b in zip(weights, bias)
            ]
        val = sum(abs(a - t) ** p for a, t in zip(acts, target))
        if best_val is None or val < best_val:
            best_val = val
            best_index = index
    return best_val, best_index


# -- activation patterns and real-latent inversion ---------------------------


@dataclass(frozen=True)
class ActivationPattern:
    """Active/inactive flag for every unit, layer by layer."""

    layers: tuple[tuple[bool, ...], ...]

    @property
    def total_units(self) -> int:
        return sum(len(l) for l in self.layers)


def pattern_of(net: ReluNetwork, z) -> ActivationPattern:
    """The pattern the exact forward pass induces (pre-activation 0 counts active)."""
    current = tuple(as_fraction(v) for v in z)
    flags = []
    for lyr in net.layers:
        pre = [
            sum(w * v for w, v in zip(row, current)) + b
            for row, b in zip(lyr.weights, lyr.bias)
        ]
        flags.append(tuple(v >= 0 for v in pre))
        current = tuple(max(v, _ZERO) for v in pre)
    return ActivationPattern(tuple(flags))


def pattern_region(net: ReluNetwork, pattern: ActivationPattern):
    """(constraints, output affine map) for a fixed activation pattern.

    Constraints are non-strict on both sides, so neighbouring regions share
    their boundary and no solution can fall between regions. The affine map
    is a list of (coeffs, const) rows giving the network output on the region.
    """
    n = net.input_dim
    affine = [
        (tuple(_ONE if j == i else _ZERO for j in range(n)), _ZERO) for i in range(n)
    ]
    lp = LinearProgram(n)
    for lyr, flags in zip(net.layers, pattern.layers):
        next_affine = []
        for row, b, active in zip(lyr.weights, lyr.bias, flags):
            coeffs = [_ZERO] * n
            const = b
            for w, (acoeffs, aconst) in zip(row, affine):
                if w != 0:
                    const += w * aconst
                    for j in range(n):
                        coeffs[j] += w * acoeffs[j]
            if active:
                lp.constrain(coeffs, GE, -const)
                next_affine.append((tuple(coeffs), const))
            else:
                lp.constrain(coeffs, LE, -const)
                next_affine.append((tuple(_ZERO for _ in range(n)), _ZERO))
        affine = next_affine
    return lp, affine


def enumerate_patterns_invert(query: InversionQuery, cap: int | None = None) -> Verdict:
    """Exact real-latent decision by activation-pattern enumeration.

    Supported: threshold 0 with any p (range membership), or p = 1 with any
    threshold (per-region L1 minimization is an LP). The DFS walks layer
    sign-vectors and prunes prefixes whose constraint systems are already
    infeasible, which enumerates a subset of the full 2^H pattern space with
    identical verdict.
    """
    if query.domain.kind != DOMAIN_REAL:
        raise ValueError("pattern enumeration needs a real latent domain")
    exact = query.threshold_pow == 0
    if not exact and query.p != 1:
        raise ValueError("thresholded pattern enumeration supports p = 1 only")
    net = query.network
    total_units = net.hidden_units
    limit = resolve_cap("pattern_units", cap)
    if total_units > limit:
        raise CapExceeded(f"{total_units} units exceeds cap {limit}")

    n = net.input_dim
    stats = VerdictStats()
    lp_stats: dict = {}
    identity = [
        (tuple(_ONE if j == i else _ZERO for j in range(n)), _ZERO) for i in range(n)
    ]

    def leaf(constraints, affine):
        stats.patterns_enumerated += 1
        if exact:
            lp = LinearProgram(n)
            lp.constraints.extend(constraints)
            for (coeffs, const), x in zip(affine, query.target):
                lp.constrain(coeffs, EQ, x - const)
            point = lp_feasible(lp, lp_stats)
            return None if point is None else tuple(point)
        out_dim = len(affine)
        lp = LinearProgram(n + out_dim)
        for con in constraints:
            lp.constrain(con.coeffs + (_ZERO,) * out_dim, con.relation, con.rhs)
        for k, ((coeffs, const), x) in enumerate(zip(affine, query.target)):
            err = tuple(_ONE if j == n + k else _ZERO for j in range(n + out_dim))
            row = tuple(coeffs) + (_ZERO,) * out_dim
            # e_k >= (out_k - x) and e_k >= -(out_k - x)
            lp.constrain([e - c for e, c in zip(err, row)], GE, const - x)
            lp.constrain([e + c for e, c in zip(err, row)], GE, x - const)
        lp.set_objective((_ZERO,) * n + (_ONE,) * out_dim)
        result = lp_minimize(lp, lp_stats)
        if result is None:
            return None
        point, value = result
        if value <= query.threshold_pow:
            return tuple(point[:n])
        return None

    def dfs(layer_idx, affine, constraints):
        if layer_idx == net.depth:
            return leaf(constraints, affine)
        lyr = net.layers[layer_idx]
        pre = []
        for row, b in zip(lyr.weights, lyr.bias):
            coeffs = [_ZERO] * n
            const = b
            for w, (acoeffs, aconst) in zip(row, affine):
                if w != 0:
                    const += w * aconst
                    for j in range(n):
                        coeffs[j] += w * acoeffs[j]
            pre.append((tuple(coeffs), const))
        zero_row = (tuple(_ZERO for _ in range(n)), _ZERO)
        for mask in range(1 << lyr.fan_out):
            branch = LinearProgram(n)
            branch.constraints.extend(constraints)
            next_affine = []
            for j, (coeffs, const) in enumerate(pre):
                if mask >> j & 1:
                    branch.constrain(coeffs, GE, -const)
                    next_affine.append((coeffs, const))
                else:
                    branch.constrain(coeffs, LE, -const)
                    next_affine.append(zero_row)
            if lp_feasible(branch, lp_stats) is None:
                continue
            found = dfs(layer_idx + 1, next_affine, branch.constraints)
            if found is not None:
                return found
        return None

    witness = dfs(0, identity, [])
    stats.lp_pivots = lp_stats.get("pivots", 0)
    if witness is None:
        return Verdict(NO, None, CERT_PATTERN, stats)
    check = distance_pow(forward(net, witness), query.target, query.p)
    if check.value > query.threshold_pow:
        raise AssertionError("pattern witness failed exact re-verification")
    return Verdict(YES, witness, CERT_PATTERN, stats)


# -- float falsifier ---------------------------------------------------------


def falsify_real(
    query: InversionQuery,
    restarts: int = 10_000,
    seed: int = 0,
    corner_levels: tuple = (0, 1),
) -> Verdict:
    """Multi-start float search; YES only after exact rational re-verification.

    Seeds every {lo,hi}-corner of the latent cube first (up to the restart
    budget), then random points, and runs a batched coordinate descent.
    Candidates near or below the threshold are rationalized with bounded
    denominators and checked exactly; a NO answer is explicitly
    non-certifying.
    """
    if query.domain.kind != DOMAIN_REAL:
        raise ValueError("the falsifier searches real latent domains only")
    n = query.domain.dim
    stats = VerdictStats()
    if restarts <= 0:
        return Verdict(NO, None, CERT_FALSIFIER, stats)

    lo, hi = float(corner_levels[0]), float(corner_levels[1])
    net_layers = float_layers(query.network)
    target = np.array([float(v) for v in query.target])
    theta = float(query.threshold_pow)
    p = query.p

    def dist(points):
        acts = points
        for w, b in net_layers:
            acts = np.maximum(acts @ w.T + b, 0.0)
        return (np.abs(acts - target) ** p).sum(axis=1)

    blocks = []
    corner_count = min(1 << n, restarts) if n <= 20 else 0
    if corner_count:
        idx = np.arange(corner_count, dtype=np.int64)
        shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
        bits = ((idx[:, None] >> shifts[None, :]) & 1).astype(np.float64)
        blocks.append(lo + bits * (hi - lo))
    remaining = restarts - corner_count
    if remaining > 0:
        rng = np.random.default_rng(seed)
        span = max(hi - lo, 1.0)
        blocks.append(
            rng.uniform(lo - 0.5 * span, hi + 0.5 * span, size=(remaining, n))
        )
    points = np.vstack(blocks)
    values = dist(points)
    stats.latents_enumerated += len(points)

    step = max(hi - lo, 1.0) / 2.0
    for _ in range(4):
        for j in range(n):
            for direction in (step, -step):
                candidate = points.copy()
                candidate[:, j] += direction
                cand_values = dist(candidate)
                stats.latents_enumerated += len(points)
                better = cand_values < values
                points[better] = candidate[better]
                values[better] = cand_values[better]
        step /= 2.0

    order = np.argsort(values, kind="stable")
    shortlist = [int(i) for i in order[:16]]
    shortlist += [
        int(i) for i in np.nonzero(values <= theta * (1 + 1e-9) + 1e-9)[0][:64]
    ]
    seen: set[int] = set()
    for i in shortlist:
        if i in seen:
            continue
        seen.add(i)
        for denom in (1, 2, 4, 8, 16, 64, 256, 4096, 1 << 16):
            z = tuple(Fraction(float(v)).limit_denominator(denom) for v in points[i])
            exact = distance_pow(forward(query.network, z), query.target, p)
            if exact.value <= query.threshold_pow:
                return Verdict(YES, z, CERT_FALSIFIER, stats)
    return Verdict(NO, None, CERT_FALSIFIER, stats)
