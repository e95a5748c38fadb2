"""Cech cochains of a presheaf on a cover, and their cohomology.

The complex starts at the global sections::

    F(x) --d(-1)--> prod_i F(u_i) --d(0)--> prod_ij F(u_ij) --d(1)--> ...

so degree 0 measures matching families that do not come from F(x), and
degree -1 measures global sections that vanish on the cover. Products run
over all ordered index tuples, repeats included. Cochain coordinates are
laid out tuple by tuple in lexicographic order.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .linalg import (Colimit, FinitePosetDiagram, Matrix, QuotientPresentation,
                     finite_colimit, induced_map_on_quotients, kernel_basis, quotient,
                     solve, trivial_quotient)
from .presheaf import Presheaf
from .site import Cover, refinement_choice


def _cache(F, name):
    try:
        return F.__dict__[name]
    except KeyError:
        d = F.__dict__[name] = {}
        return d


def _level(F: Presheaf, cover: Cover, n: int):
    """Tuples of degree n, their meet objects and coordinate offsets."""
    cache = _cache(F, "_cech_levels")
    key = (cover, n)
    if key not in cache:
        lv = F.site.nerve(cover, n)[n]
        offsets = {}
        total = 0
        for t in lv.tuples:
            offsets[t] = total
            total += F.dims[lv.tuple_object[t]]
        cache[key] = (lv, offsets, total)
    return cache[key]


def cochain_dim(F: Presheaf, cover: Cover, n: int) -> int:
    if n == -1:
        return F.dims[cover.target]
    return _level(F, cover, n)[2]


def coboundary(F: Presheaf, cover: Cover, n: int) -> Matrix:
    """The coboundary from degree n to degree n+1 (``n >= -1``).

    Degree -1 stacks the restrictions ``F(x) -> F(u_i)``. For ``n >= 0``,
    ``(d c)_t = sum_k (-1)^k c_{t minus k}|_t`` over the n+2 faces of t.
    """
    cache = _cache(F, "_cech_coboundaries")
    key = (cover, n)
    if key in cache:
        return cache[key]
    x = cover.target
    if n == -1:
        blocks = [F.restriction(u, x) for u in cover.legs]
        m = Matrix.vstack(blocks, cols=F.dims[x])
    elif n >= 0:
        src, src_off, ncols = _level(F, cover, n)
        dst, dst_off, nrows = _level(F, cover, n + 1)
        grid = [[0] * ncols for _ in range(nrows)]
        for t in dst.tuples:
            ot = dst.tuple_object[t]
            r0 = dst_off[t]
            for k, s in dst.faces[t]:
                block = F.restriction(ot, src.tuple_object[s])
                c0 = src_off[s]
                sign = -1 if k % 2 else 1
                for i, row in enumerate(block._data):
                    g = grid[r0 + i]
                    for j, v in enumerate(row):
                        if v:
                            g[c0 + j] += sign * v
        m = Matrix(nrows, ncols, grid)
    else:
        raise ValueError("coboundaries start in degree -1")
    cache[key] = m
    return m


@dataclass(frozen=True)
class CochainComplex:
    target: str
    cover: Cover
    max_degree: int
    dims: tuple
    coboundaries: tuple

    def coboundary(self, n):
        return self.coboundaries[n + 1]


def cochain_complex(F: Presheaf, cover: Cover, max_degree: int = 2) -> CochainComplex:
    """Cochain spaces in degrees -1..max_degree+1 and coboundaries d(-1)..d(max_degree)."""
    dims = tuple(cochain_dim(F, cover, n) for n in range(-1, max_degree + 2))
    cobs = tuple(coboundary(F, cover, n) for n in range(-1, max_degree + 1))
    return CochainComplex(cover.target, cover, max_degree, dims, cobs)


def cochain_map(F: Presheaf, src: Cover, dst: Cover, n: int, choice=None) -> Matrix:
    """Degree-n cochain map induced by a refinement.

    ``dst`` covers some ``y <= src.target`` and each of its legs lies below a
    leg of ``src``; ``choice`` (default: least such leg) picks one per leg.
    """
    x, y = src.target, dst.target
    if n == -1:
        return F.restriction(y, x)
    if choice is None:
        choice = refinement_choice(dst.legs, src.legs, F.site.leq)
        if choice is None:
            raise ValueError(f"{dst} does not refine {src}")
    s_lv, s_off, ncols = _level(F, src, n)
    d_lv, d_off, nrows = _level(F, dst, n)
    grid = [[0] * ncols for _ in range(nrows)]
    for t in d_lv.tuples:
        s = tuple(choice[j] for j in t)
        block = F.restriction(d_lv.tuple_object[t], s_lv.tuple_object[s])
        r0, c0 = d_off[t], s_off[s]
        for i, row in enumerate(block._data):
            g = grid[r0 + i]
            for j, v in enumerate(row):
                if v:
                    g[c0 + j] = v
    return Matrix(nrows, ncols, grid)


@dataclass(frozen=True)
class CohomologyPiece:
    """``ker d(n) / im d(n-1)``: a kernel basis plus a quotient of its coordinates."""

    degree: int
    kernel: Matrix
    quotient: QuotientPresentation

    @property
    def dim(self):
        return self.quotient.quotient_dim

    @property
    def representatives(self) -> Matrix:
        """Cochains whose classes form the chosen basis."""
        return self.kernel @ self.quotient.lift


def cohomology_at_cover(F: Presheaf, cover: Cover, n: int) -> CohomologyPiece:
    cache = _cache(F, "_cech_pieces")
    key = (cover, n)
    if key in cache:
        return cache[key]
    k = kernel_basis(coboundary(F, cover, n))
    if n == -1:
        q = trivial_quotient(k.cols)
    else:
        q = quotient(solve(k, coboundary(F, cover, n - 1)))
    piece = CohomologyPiece(n, k, q)
    cache[key] = piece
    return piece


def matching_space(F: Presheaf, cover: Cover):
    """``(dim, inclusion)`` of the matching families, i.e. ``ker d(0)``."""
    k = cohomology_at_cover(F, cover, 0).kernel
    return k.cols, k


def induced_on_pieces(src: CohomologyPiece, dst: CohomologyPiece, chain: Matrix) -> Matrix:
    """Map on cohomology induced by a cochain map ``chain`` in the pieces' degree."""
    coords = solve(dst.kernel, chain @ src.kernel)
    return induced_map_on_quotients(coords, src.quotient, dst.quotient)


def refinement_map_on_matching(F: Presheaf, src: Cover, dst: Cover, choice=None) -> Matrix:
    """Matching families on ``src`` restricted to the refinement ``dst``, in kernel coordinates."""
    ks = matching_space(F, src)[1]
    kd = matching_space(F, dst)[1]
    return solve(kd, cochain_map(F, src, dst, 0, choice) @ ks)


@dataclass(frozen=True)
class CechCohomology:
    """``H^n(x, F)``: the colimit over ``Cov(x)`` of the per-cover pieces."""

    target: str
    degree: int
    covers: tuple
    pieces: tuple = field(repr=False)
    colimit: Colimit = field(repr=False)
    filtered: bool

    @property
    def dim(self):
        return self.colimit.dim

    @property
    def per_cover(self):
        return {c.key: p.dim for c, p in zip(self.covers, self.pieces)}


def colimit_over_covers(F: Presheaf, x, piece_at, map_between, validate=False):
    """Colimit over ``Cov(x)`` of ``piece_at(cover)`` along refinements.

    ``map_between(i, j)`` is the matrix from node i to node j, j refining i.
    """
    cp = F.site.cover_poset(x)
    pieces = [piece_at(c) for c in cp.nodes]
    edges = [(i, j, map_between(i, j)) for i, j in cp.generating_edges]
    diagram = FinitePosetDiagram(tuple(p if isinstance(p, int) else p.dim for p in pieces), edges)
    return cp, pieces, finite_colimit(diagram, validate=validate)


def cohomology(F: Presheaf, x, n: int, validate=False) -> CechCohomology:
    """Cover-independent ``H^n(x, F)``."""
    cache = _cache(F, "_cech_colimits")
    if (x, n) in cache:
        return cache[(x, n)]
    site = F.site
    cp = site.cover_poset(x)

    def trans(i, j):
        u, v = cp.nodes[i], cp.nodes[j]
        return induced_on_pieces(cohomology_at_cover(F, u, n), cohomology_at_cover(F, v, n),
                                 cochain_map(F, u, v, n, cp.choice[(i, j)]))

    cp, pieces, colim = colimit_over_covers(F, x, lambda c: cohomology_at_cover(F, c, n), trans, validate)
    out = CechCohomology(x, n, cp.nodes, tuple(pieces), colim, cp.filtered)
    cache[(x, n)] = out
    return out


def hn_presheaf(F: Presheaf, n: int) -> Presheaf:
    """``H^n(-, F)`` with restrictions induced by pulling covers back."""
    site = F.site
    coh = {x: cohomology(F, x, n) for x in site.objects}
    edges = {}
    for y, x in site.hasse_edges:
        cx, cy = coh[x], coh[y]
        maps = []
        for u, piece in zip(cx.covers, cx.pieces):
            w = site.pullback_cover(u, y)
            k = cy.covers.index(w)
            chain = cochain_map(F, u, w, n)
            maps.append(cy.colimit.cocone[k] @ induced_on_pieces(piece, cy.pieces[k], chain))
        edges[(y, x)] = cx.colimit.universal_map(maps, cy.dim)
    return Presheaf(site, {x: c.dim for x, c in coh.items()}, edges)


def h0_presheaf(F: Presheaf) -> Presheaf:
    return hn_presheaf(F, 0)


def h_minus1_presheaf(F: Presheaf) -> Presheaf:
    return hn_presheaf(F, -1)


@dataclass
class CohomologyReport:
    """Per-object, per-degree dimensions plus the degree -1 and 0 presheaves."""

    degrees: dict
    presheaves: dict
    non_filtered: list

    def to_json(self):
        return {
            "cohomology": {
                x: {str(n): {"per_cover": entry.per_cover, "colimit": entry.dim}
                    for n, entry in per_deg.items()}
                for x, per_deg in self.degrees.items()
            },
            "presheaves": {str(n): p.to_json() for n, p in self.presheaves.items()},
            "non_filtered_cover_posets": list(self.non_filtered),
        }


def cohomology_report(F: Presheaf, max_degree: int = 2, objects=None) -> CohomologyReport:
    site = F.site
    objects = list(site.objects if objects is None else objects)
    degrees = {x: {n: cohomology(F, x, n) for n in range(-1, max_degree + 1)} for x in objects}
    presheaves = {n: hn_presheaf(F, n) for n in (-1, 0) if n <= max_degree}
    non_filtered = [x for x in objects if not site.is_filtered(x)]
    return CohomologyReport(degrees, presheaves, non_filtered)
