"""Separated / lavish / sheaf classification via the comparison map xi.

For a cover U of x, xi sends a global section to the matching family of
its restrictions. F is separated when every xi is injective, lavish when
every xi is surjective, and a sheaf when every xi is invertible.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .cech import coboundary, matching_space
from .linalg import Matrix, is_epi, is_mono, solve


def xi(F, cover) -> Matrix:
    """The factorization of d(-1) through the matching families, in kernel coordinates."""
    k = matching_space(F, cover)[1]
    return solve(k, coboundary(F, cover, -1))


@dataclass(frozen=True)
class CoverVerdict:
    target: str
    cover: str
    mono: bool
    epi: bool

    @property
    def iso(self):
        return self.mono and self.epi


@dataclass(frozen=True)
class Verdict:
    per_cover: tuple = field(repr=False)
    separated: bool
    lavish: bool
    sheaf: bool
    witnesses: dict

    def to_json(self):
        return {
            "separated": self.separated,
            "lavish": self.lavish,
            "sheaf": self.sheaf,
            "witnesses": {k: (None if w is None else {"object": w[0], "cover": w[1]})
                          for k, w in self.witnesses.items()},
            "per_cover": [
                {"object": v.target, "cover": v.cover, "mono": v.mono, "epi": v.epi, "iso": v.iso}
                for v in self.per_cover
            ],
        }


def classify(F) -> Verdict:
    rows = []
    for x in F.site.objects:
        for c in F.site.covers[x]:
            m = xi(F, c)
            rows.append(CoverVerdict(x, c.key, is_mono(m), is_epi(m)))

    def first(pred):
        return next(((v.target, v.cover) for v in rows if not pred(v)), None)

    witnesses = {
        "separated": first(lambda v: v.mono),
        "lavish": first(lambda v: v.epi),
        "sheaf": first(lambda v: v.iso),
    }
    return Verdict(tuple(rows), witnesses["separated"] is None, witnesses["lavish"] is None,
                   witnesses["sheaf"] is None, witnesses)
