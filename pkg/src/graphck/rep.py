"""Truncated path-space representation and the compression-map machinery.

Generators act on the span of paths of length <= N.  Truncation only corrupts
creation: appending an edge to a top-shell path gives zero instead of a longer
path, while co-isometries and diagonal projections are exact everywhere.
Every operator therefore carries a bound on its creation factors, and exact
identities are asserted on the columns indexed by paths of length
<= N - creations, where nothing has been lost.  A built representation is
immutable and all operations are pure, so independent scans parallelize.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from .construct import BlowupGraph, embed_path
from .errors import ContractViolation, ResourceLimit
from .graphs import DirectedGraph, Edge, Path, Vertex, paths, paths_from, sinks
from .sparse import RatMatrix
from .symbolic import AlgebraMode, FormalSum, Word, iota_path_image, normal_form

DEFAULT_MAX_BASIS = 200_000


@dataclass
class RepOperator:
    """A matrix plus creation bounds governing its exact region.

    `creations` bounds how far the operator can lengthen a basis path, which
    is exactly what truncation corrupts; `star_creations` is the same bound
    for the adjoint, so taking adjoints keeps the bookkeeping sound.  An
    operator with bound k is exact on columns of length <= cutoff - k.
    """

    matrix: RatMatrix
    creations: int
    star_creations: int | None = None

    def __post_init__(self):
        if self.star_creations is None:
            self.star_creations = self.creations

    def __mul__(self, other: "RepOperator") -> "RepOperator":
        return RepOperator(self.matrix * other.matrix,
                           self.creations + other.creations,
                           self.star_creations + other.star_creations)

    def __add__(self, other: "RepOperator") -> "RepOperator":
        return RepOperator(self.matrix + other.matrix,
                           max(self.creations, other.creations),
                           max(self.star_creations, other.star_creations))

    def __sub__(self, other: "RepOperator") -> "RepOperator":
        return RepOperator(self.matrix - other.matrix,
                           max(self.creations, other.creations),
                           max(self.star_creations, other.star_creations))

    def scale(self, c) -> "RepOperator":
        return RepOperator(self.matrix.scale(c), self.creations, self.star_creations)

    def star(self) -> "RepOperator":
        return RepOperator(self.matrix.star(), self.star_creations, self.creations)


class TruncatedRep:
    """Concrete generators on the span of paths of length at most N."""

    def __init__(self, graph: DirectedGraph, cutoff: int, max_basis: int = DEFAULT_MAX_BASIS):
        if cutoff < 1:
            raise ContractViolation("cutoff must be positive")
        env = os.environ.get("GRAPHCK_MAX_BASIS")
        if env:
            max_basis = int(env)
        self.graph = graph
        self.cutoff = cutoff
        self.basis: list[Path] = []
        layer = [Path.at(v) for v in graph.vertices]
        for _ in range(cutoff + 1):
            self.basis.extend(layer)
            if len(self.basis) > max_basis:
                raise ResourceLimit(
                    f"basis exceeds {max_basis} paths; lower the cutoff or raise "
                    "GRAPHCK_MAX_BASIS")
            layer = [p * Path((e,)) for p in layer for e in graph.out_edges(p.range)]
        self.index: dict[Path, int] = {p: i for i, p in enumerate(self.basis)}
        n = len(self.basis)
        self._t: dict[Edge, RatMatrix] = {}
        self._tmap: dict[Edge, dict[int, int]] = {}
        for e in graph.edges:
            m = RatMatrix(n, n)
            cmap: dict[int, int] = {}
            for p, i in self.index.items():
                if e.range == p.source and len(p) + 1 <= cutoff:
                    j = self.index[Path((e,)) * p]
                    m.rows.setdefault(j, {})[i] = Fraction(1)
                    cmap[i] = j
            self._t[e] = m
            self._tmap[e] = cmap
        self._q: dict[Vertex, RatMatrix] = {}
        for v in graph.vertices:
            m = RatMatrix(n, n)
            for p, i in self.index.items():
                if p.source == v:
                    m.rows.setdefault(i, {})[i] = Fraction(1)
            self._q[v] = m

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def t(self, e: Edge) -> RepOperator:
        return RepOperator(self._t[e], 1, 0)

    def q(self, v: Vertex) -> RepOperator:
        return RepOperator(self._q[v], 0, 0)

    def t_path(self, mu: Path) -> RepOperator:
        """T_mu: column xi_tau -> row xi_{mu tau}, composed from edge maps."""
        n = self.dimension
        if not mu.edges:
            return RepOperator(self._q[mu.base], 0)
        mapping = self._tmap[mu.edges[-1]]
        for e in reversed(mu.edges[:-1]):
            step = self._tmap[e]
            mapping = {c: step[r] for c, r in mapping.items() if r in step}
        m = RatMatrix(n, n)
        one = Fraction(1)
        for c, r in mapping.items():
            m.rows.setdefault(r, {})[c] = one
        return RepOperator(m, len(mu), 0)

    def word_operator(self, alpha: Path, beta: Path) -> RepOperator:
        """T_alpha T_beta*, with the tight length-shift creation bounds."""
        mat = self.t_path(alpha).matrix * self.t_path(beta).matrix.star()
        return RepOperator(mat, max(0, len(alpha) - len(beta)),
                           max(0, len(beta) - len(alpha)))

    def exact_columns(self, creations: int) -> list[int]:
        """Basis indices on which operators with this creation bound are exact."""
        limit = self.cutoff - creations
        return [i for i, p in enumerate(self.basis) if len(p) <= limit]

    def equal_on_exact_region(self, a: RepOperator, b: RepOperator) -> bool:
        k = max(a.creations, b.creations)
        cols = self.exact_columns(k)
        if not cols:
            raise ContractViolation(
                f"exact region is empty at creation bound {k} (cutoff {self.cutoff})")
        return a.matrix.equal_on_columns(b.matrix, cols)

    def evaluate(self, s: FormalSum) -> RepOperator:
        """Matrix of a formal sum; words must be untensored."""
        if s.graph != self.graph:
            raise ContractViolation("formal sum lives over a different graph")
        n = self.dimension
        total = RatMatrix(n, n)
        creations = 0
        star_creations = 0
        for w, c in s.terms.items():
            if w.unit is not None:
                raise ContractViolation("tensored words have no truncated-representation matrix")
            op = self.word_operator(w.alpha, w.beta)
            total = total + op.matrix.scale(c)
            creations = max(creations, op.creations)
            star_creations = max(star_creations, op.star_creations)
        return RepOperator(total, creations, star_creations)


def build_rep(g: DirectedGraph, cutoff: int, max_basis: int = DEFAULT_MAX_BASIS) -> TruncatedRep:
    return TruncatedRep(g, cutoff, max_basis)


def path_projection(rep: TruncatedRep, mu: Path) -> RepOperator:
    """Range projection of mu minus its one-edge extensions; on the exact
    region this is the rank-one projection onto the basis vector of mu."""
    if len(mu) + 1 > rep.cutoff:
        raise ContractViolation(
            f"path projection needs |mu|+1 <= cutoff, got |mu|={len(mu)}, cutoff={rep.cutoff}")
    tm = rep.t_path(mu)
    out = tm * tm.star()
    for e in rep.graph.out_edges(mu.range):
        ext = rep.t_path(mu * Path((e,)))
        out = out - ext * ext.star()
    # the two prefix projections cancel exactly off the single basis vector,
    # so no truncation error survives anywhere
    return RepOperator(out.matrix, 0, 0)


def matrix_unit(rep: TruncatedRep, mu: Path, nu: Path) -> RepOperator:
    """T_mu Delta_{r(mu)} T_nu*, the (mu, nu) matrix unit."""
    if mu.range != nu.range:
        raise ContractViolation(
            f"matrix unit needs matching ranges: {mu.id} vs {nu.id}")
    d = path_projection(rep, Path.at(mu.range))
    op = rep.t_path(mu) * d * rep.t_path(nu).star()
    # exact everywhere: the only surviving column is the basis vector of nu
    return RepOperator(op.matrix, max(0, len(mu) - len(nu)),
                       max(0, len(nu) - len(mu)))


def check_matrix_units(rep: TruncatedRep, p: int) -> bool:
    """Multiplication and adjoint rules for all matrix units of length < p."""
    all_paths = [q for q in paths(rep.graph, 0, p)]
    pairs = [(mu, nu) for mu in all_paths for nu in all_paths if mu.range == nu.range]
    units = {(mu, nu): matrix_unit(rep, mu, nu) for mu, nu in pairs}
    for (mu, nu), u in units.items():
        if not rep.equal_on_exact_region(u.star(), units[(nu, mu)]):
            return False
    zero = RepOperator(RatMatrix(rep.dimension, rep.dimension), 0)
    for (mu, nu), u in units.items():
        for (rho, sigma), w in units.items():
            prod = u * w
            if nu == rho:
                expected = matrix_unit(rep, mu, sigma)
                expected = RepOperator(expected.matrix, prod.creations)
            else:
                expected = RepOperator(zero.matrix, prod.creations)
            if not rep.equal_on_exact_region(prod, expected):
                return False
    return True


def window_projection(rep: TruncatedRep, m: int) -> RepOperator:
    """Sum of the path projections over all paths of length < m."""
    if m > rep.cutoff:
        raise ContractViolation(f"need m <= cutoff, got m={m}, cutoff={rep.cutoff}")
    total = RatMatrix(rep.dimension, rep.dimension)
    for mu in paths(rep.graph, 0, m):
        total = total + path_projection(rep, mu).matrix
    return RepOperator(total, 0, 0)


@dataclass(frozen=True)
class KappaMatrix:
    """Symmetric averaging-weight matrix; entries min(i,j,m+1-i,m+1-j)/(L+1)."""

    m: int
    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def half(self) -> int:
        return ceil(self.m / 2)

    def entry(self, i: int, j: int) -> Fraction:
        """1-based access, zero outside {1..m}^2."""
        if 1 <= i <= self.m and 1 <= j <= self.m:
            return self.entries[i - 1][j - 1]
        return Fraction(0)

    def entry0(self, a: int, b: int) -> Fraction:
        """0-based access: the windowed formulas feed arguments in {0..m-1}."""
        return self.entry(a + 1, b + 1)


def kappa_matrix(m: int) -> KappaMatrix:
    if m < 1:
        raise ContractViolation("m must be positive")
    half = ceil(m / 2)
    rows = tuple(
        tuple(Fraction(min(i, j, m + 1 - i, m + 1 - j), half + 1) for j in range(1, m + 1))
        for i in range(1, m + 1))
    return KappaMatrix(m, rows)


def schur_multiply(kappa: KappaMatrix, a: list[list[Fraction]]) -> list[list[Fraction]]:
    """Entrywise product kappa * a."""
    m = kappa.m
    return [[kappa.entries[i][j] * a[i][j] for j in range(m)] for i in range(m)]


def schur_via_projections(kappa: KappaMatrix, a: list[list[Fraction]]) -> list[list[Fraction]]:
    """The same map written as an average of corner compressions: summing the
    middle blocks l..m-l+1 over l = 1..ceil(m/2), normalized by 1/(half+1)."""
    m = kappa.m
    out = [[Fraction(0)] * m for _ in range(m)]
    for l in range(1, kappa.half + 1):
        for i in range(l - 1, m - l + 1):
            row = out[i]
            arow = a[i]
            for j in range(l - 1, m - l + 1):
                row[j] += arow[j]
    c = Fraction(1, kappa.half + 1)
    return [[c * x for x in row] for row in out]


def _windowed_sum(rep: TruncatedRep, m: int, shift: int, mu: Path, nu: Path) -> RepOperator:
    """Sum of weighted matrix units over shared extensions whose lengths land
    in [shift, shift+m) on both legs."""
    if mu.range != nu.range:
        raise ContractViolation("legs must share their range")
    a, b = len(mu), len(nu)
    # the longest extended leg has length shift+m-1 and its projection needs one more
    if shift + m > rep.cutoff:
        raise ContractViolation(
            f"cutoff {rep.cutoff} too small for window [{shift},{shift + m})")
    kappa = kappa_matrix(m)
    total = RatMatrix(rep.dimension, rep.dimension)
    t_lo = max(0, shift - min(a, b))
    t_hi = max(t_lo, shift + m - max(a, b))
    for t in range(t_lo, t_hi):
        for tau in paths_from(rep.graph, mu.range, t):
            c = kappa.entry0(a + t - shift, b + t - shift)
            if not c:
                continue
            unit = matrix_unit(rep, mu * tau, nu * tau)
            total = total + unit.matrix.scale(c)
    return RepOperator(total, max(0, a - b), max(0, b - a))


def band_compression(rep: TruncatedRep, m: int, w: Word) -> RepOperator:
    """First compression map on a word: weighted matrix units with both legs
    extended into the window [m, 2m)."""
    return _windowed_sum(rep, m, m, w.alpha, w.beta)


def shifted_band_compression(rep: TruncatedRep, m: int, w: Word) -> RepOperator:
    """Second compression map, window shifted by half: [m+l, 2m+l)."""
    return _windowed_sum(rep, m, m + ceil(m / 2), w.alpha, w.beta)


def _schur_by_length(rep: TruncatedRep, mat: RatMatrix, m: int, shift: int) -> RatMatrix:
    kappa = kappa_matrix(m)
    out = RatMatrix(rep.dimension, rep.dimension)
    for i, row in mat.rows.items():
        li = len(rep.basis[i])
        for j, v in row.items():
            c = kappa.entry0(li - shift, len(rep.basis[j]) - shift)
            if c:
                out.rows.setdefault(i, {})[j] = c * v
    return out


def compression_route(rep: TruncatedRep, m: int, w: Word, shift: int) -> RepOperator:
    """The same compression computed as M * (Phi_big - Phi_small) a (...),
    where the Schur weights depend only on the path lengths."""
    lo = window_projection(rep, shift)
    hi = window_projection(rep, shift + m)
    band = hi - lo
    a = rep.word_operator(w.alpha, w.beta)
    mid = band * a * band
    return RepOperator(_schur_by_length(rep, mid.matrix, m, shift), mid.creations)


def lambda_map(bg: BlowupGraph, p: int, mu: Path, nu: Path) -> FormalSum:
    """Matrix unit of the window [p, p+m) sent to the blow-up word on the
    embedded paths."""
    m = bg.m
    if mu.range != nu.range:
        raise ContractViolation("legs must share their range")
    for leg in (mu, nu):
        if not (p <= len(leg) < p + m):
            raise ContractViolation(
                f"path {leg.id} has length {len(leg)} outside [{p}, {p + m})")
    return FormalSum.of(bg.graph, Word(embed_path(bg, mu), embed_path(bg, nu)))


@dataclass(frozen=True)
class KCoefficients:
    """Per-length coefficient sums of the two windowed compressions."""

    m: int
    a: int
    b: int
    values: tuple[Fraction, ...]

    @property
    def max_defect(self) -> Fraction:
        return max(abs(1 - v) for v in self.values)


def k_coefficients(m: int, a: int, b: int) -> KCoefficients:
    """Exact values K_{m,i}, i = 0..m-1, for legs of lengths a and b.

    Each K is the sum of (at most) two weight-matrix entries: the unique
    in-window representative of a+i modulo m, and the one at the half-shifted
    window; out-of-range partners contribute zero.
    """
    if m < 1:
        raise ContractViolation("m must be positive")
    if abs(a - b) >= m:
        raise ContractViolation("leg length gap must be smaller than m")
    kappa = kappa_matrix(m)
    vals = []
    for i in range(m):
        r1 = (a + i) % m
        c1 = kappa.entry0(r1, r1 - a + b)
        r2 = (a + i - (3 * m) // 2) % m
        c2 = kappa.entry0(r2, r2 - a + b)
        vals.append(c1 + c2)
    return KCoefficients(m, a, b, tuple(vals))


@dataclass
class ApproximationGap:
    """Canonical form of (compressed image) - (inclusion image) of a word."""

    difference: FormalSum
    max_coefficient: Fraction
    coefficients: KCoefficients


def approximation_gap(bg: BlowupGraph, mu: Path, nu: Path,
                      depth: int | None = None) -> ApproximationGap:
    """Gap between the two windowed compressions of s_mu s_nu* (pushed into
    the blow-up algebra) and the inclusion image, in canonical form.

    Expressed over the blow-up graph in Cuntz-Krieger mode; the coefficients
    that survive are exactly 1 - K_{m,i}, so the largest absolute coefficient
    reports the approximation quality of the compression pair.
    """
    g = bg.base
    m = bg.m
    bad = sinks(g)
    if bad:
        raise ContractViolation(f"base graph has a sink ({bad[0].id})")
    a, b = len(mu), len(nu)
    if not (m > a and m > b):
        raise ContractViolation("need m greater than both leg lengths")
    if mu.range != nu.range:
        raise ContractViolation("legs must share their range")
    kappa = kappa_matrix(m)
    half = ceil(m / 2)
    terms: dict[Word, Fraction] = {}
    for shift in (m, m + half):
        t_lo = max(0, shift - min(a, b))
        t_hi = max(t_lo, shift + m - max(a, b))
        for t in range(t_lo, t_hi):
            c = kappa.entry0(a + t - shift, b + t - shift)
            if not c:
                continue
            for tau in paths_from(g, mu.range, t):
                w = Word(embed_path(bg, mu * tau), embed_path(bg, nu * tau))
                terms[w] = terms.get(w, Fraction(0)) + c
    lhs = FormalSum(bg.graph, terms)
    rhs = iota_path_image(bg, mu) * iota_path_image(bg, nu).star()
    diff = normal_form(lhs - rhs, AlgebraMode.CUNTZ_KRIEGER, depth)
    return ApproximationGap(diff, diff.max_abs_coefficient(), k_coefficients(m, a, b))
