"""The plus construction, its unit, and sheafification as two plus steps."""
from __future__ import annotations

from dataclasses import dataclass, field

from .cech import cochain_map, colimit_over_covers, matching_space, refinement_map_on_matching
from .classify import xi
from .linalg import solve
from .presheaf import NatTransformation, Presheaf


@dataclass(frozen=True)
class _Match:
    inclusion: object

    @property
    def dim(self):
        return self.inclusion.cols


@dataclass(frozen=True)
class PlusResult:
    plus_presheaf: Presheaf
    unit: NatTransformation
    colimits: dict = field(repr=False)


def plus(F: Presheaf) -> PlusResult:
    """``F+(x)`` is the colimit over ``Cov(x)`` of matching families.

    Restrictions of ``F+`` come from pulling covers back, and the unit at x
    is ``xi`` of the identity cover pushed into the colimit.
    """
    site = F.site
    colims = {}
    for x in site.objects:
        cp = site.cover_poset(x)

        def trans(i, j, cp=cp):
            return refinement_map_on_matching(F, cp.nodes[i], cp.nodes[j], cp.choice[(i, j)])

        colims[x] = colimit_over_covers(F, x, lambda c: _Match(matching_space(F, c)[1]), trans)
    edges = {}
    for y, x in site.hasse_edges:
        cpx, px, cx = colims[x]
        cpy, py, cy = colims[y]
        maps = []
        for u, piece in zip(cpx.nodes, px):
            w = site.pullback_cover(u, y)
            k = cpy.index(w)
            restricted = solve(py[k].inclusion, cochain_map(F, u, w, 0) @ piece.inclusion)
            maps.append(cy.cocone[k] @ restricted)
        edges[(y, x)] = cx.universal_map(maps, cy.dim)
    fplus = Presheaf(site, {x: c[2].dim for x, c in colims.items()}, edges)
    unit = {}
    for x in site.objects:
        cp, _, colim = colims[x]
        ident = site.find_cover(x, [x])
        unit[x] = colim.cocone[cp.index(ident)] @ xi(F, ident)
    return PlusResult(fplus, NatTransformation(F, fplus, unit), colims)


def unit_via_cover(F: Presheaf, result: PlusResult, x, cover):
    """``eta_x`` computed through ``cover`` instead of the identity cover."""
    cp, _, colim = result.colimits[x]
    return colim.cocone[cp.index(cover)] @ xi(F, cover)


def sheafify(F: Presheaf):
    """``(F++, F -> F+ -> F++)``."""
    first = plus(F)
    second = plus(first.plus_presheaf)
    return second.plus_presheaf, first.unit.then(second.unit)
