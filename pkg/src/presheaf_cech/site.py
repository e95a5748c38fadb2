"""Finite poset sites.

Objects form a finite poset; the pullback of ``u -> x`` and ``v -> x`` is
the meet ``u ^ v``. Each object carries a finite list of covering families
(a pretopology), and covers of one object are preordered by refinement.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

from .errors import InvalidSiteError

# caps the family combinations enumerated by the transitivity warning check
TRANSITIVITY_CHECK_LIMIT = 20000


@dataclass(frozen=True)
class Cover:
    """A covering family of ``target``. Legs are deduplicated, in site order."""

    target: str
    legs: tuple

    @property
    def key(self) -> str:
        return ",".join(self.legs)

    def __len__(self):
        return len(self.legs)

    def __str__(self):
        return f"{{{self.key}}}->{self.target}"


@dataclass(frozen=True)
class NerveLevel:
    """Degree-n part of the Cech nerve: ordered (n+1)-tuples of leg indices.

    ``faces[t]`` lists ``(k, t without index k)`` for degree >= 1; at degree 0
    the single face of each tuple is the leg's inclusion into the target,
    recorded as ``(0, None)``.
    """

    degree: int
    tuples: tuple
    tuple_object: dict = field(repr=False)
    faces: dict = field(repr=False)


@dataclass(frozen=True)
class CoverPoset:
    """``J(x)`` preordered by reverse refinement.

    ``choice[(i, j)]`` is defined when node j refines node i and sends each
    leg of j to the least leg of i above it. ``generating_edges`` is a
    minimal set of pairs ``(i, j)`` whose reflexive-transitive closure is the
    whole relation: Hasse edges between classes of mutually refining covers,
    plus a star of edges both ways inside each class.
    """

    target: str
    nodes: tuple
    choice: dict = field(repr=False)
    generating_edges: tuple
    classes: tuple
    filtered: bool

    def refines(self, j, i) -> bool:
        return (i, j) in self.choice

    def index(self, cover: Cover) -> int:
        return self.nodes.index(cover)


def refinement_choice(v_legs, u_legs, leq):
    """Map each leg of V to the least leg of U above it, or None if V does not refine U."""
    r = []
    for v in v_legs:
        for i, u in enumerate(u_legs):
            if leq(v, u):
                r.append(i)
                break
        else:
            return None
    return tuple(r)


class FinitePosetSite:
    """A validated finite poset with a pretopology. Build with ``validate_site``."""

    def __init__(self, objects, le, covers, warnings=()):
        self.objects = tuple(objects)
        self.index = {o: i for i, o in enumerate(self.objects)}
        self._le = le
        self.covers = {x: tuple(covers[x]) for x in self.objects}
        self.warnings = list(warnings)
        self._meets = {}
        self._cover_posets = {}

    def __repr__(self):
        return f"FinitePosetSite({len(self.objects)} objects, {sum(map(len, self.covers.values()))} covers)"

    # order

    def leq(self, a, b) -> bool:
        return self._le[self.index[a]][self.index[b]]

    def below(self, x):
        """Objects ``y <= x`` in site order."""
        i = self.index[x]
        return [o for j, o in enumerate(self.objects) if self._le[j][i]]

    def above(self, y):
        i = self.index[y]
        return [o for j, o in enumerate(self.objects) if self._le[i][j]]

    @cached_property
    def hasse_edges(self):
        """Covering pairs ``(y, x)`` with y < x and nothing strictly between."""
        n = len(self.objects)
        le = self._le
        out = []
        for i in range(n):
            for j in range(n):
                if i != j and le[i][j]:
                    if not any(k != i and k != j and le[i][k] and le[k][j] for k in range(n)):
                        out.append((self.objects[i], self.objects[j]))
        return tuple(out)

    @cached_property
    def linear_extension(self):
        """Objects ordered so that every object precedes everything below it."""
        n = len(self.objects)
        ups = [sum(1 for j in range(n) if self._le[i][j]) for i in range(n)]
        return tuple(self.objects[i] for i in sorted(range(n), key=lambda i: (ups[i], i)))

    def glb(self, items):
        """Greatest lower bound of a nonempty collection, or None."""
        items = tuple(sorted(set(items), key=self.index.__getitem__))
        if not items:
            raise ValueError("glb of an empty family")
        if len(items) == 1:
            return items[0]
        if items in self._meets:
            return self._meets[items]
        idx = [self.index[o] for o in items]
        le = self._le
        lower = [k for k in range(len(self.objects)) if all(le[k][i] for i in idx)]
        best = [k for k in lower if all(le[l][k] for l in lower)]
        out = self.objects[best[0]] if best else None
        self._meets[items] = out
        return out

    def meet(self, a, b):
        return self.glb((a, b))

    # covers

    def normalize(self, target, legs) -> Cover:
        legs = sorted(set(legs), key=self.index.__getitem__)
        return Cover(target, tuple(legs))

    def find_cover(self, target, legs):
        c = self.normalize(target, legs)
        return c if c in self.covers[target] else None

    def pullback_cover(self, cover: Cover, y) -> Cover:
        """The cover ``(u_i ^ y)`` of ``y``, as listed in ``J(y)``."""
        if not self.leq(y, cover.target):
            raise ValueError(f"{y} is not below {cover.target}")
        legs = [self.meet(u, y) for u in cover.legs]
        if any(l is None for l in legs):
            raise ValueError(f"missing meet pulling {cover} back to {y}")
        c = self.normalize(y, legs)
        if c not in self.covers[y]:
            raise ValueError(f"pullback {c} of {cover} is not a cover of {y}")
        return c

    def nerve(self, cover: Cover, up_to_degree: int):
        legs = cover.legs
        levels = []
        for n in range(up_to_degree + 1):
            tuples = tuple(itertools.product(range(len(legs)), repeat=n + 1))
            objs = {t: self.glb(legs[i] for i in t) for t in tuples}
            if n == 0:
                faces = {t: ((0, None),) for t in tuples}
            else:
                faces = {t: tuple((k, t[:k] + t[k + 1:]) for k in range(n + 1)) for t in tuples}
            levels.append(NerveLevel(n, tuples, objs, faces))
        return levels

    def cover_poset(self, x) -> CoverPoset:
        if x in self._cover_posets:
            return self._cover_posets[x]
        nodes = self.covers[x]
        n = len(nodes)
        choice = {}
        for i, u in enumerate(nodes):
            for j, v in enumerate(nodes):
                if i != j:
                    r = refinement_choice(v.legs, u.legs, self.leq)
                    if r is not None:
                        choice[(i, j)] = r
        # classes of mutually refining covers, keyed by their first member
        cls_of = list(range(n))
        for i in range(n):
            for j in range(i):
                if (i, j) in choice and (j, i) in choice:
                    cls_of[i] = cls_of[j]
                    break
        reps = sorted(set(cls_of))
        classes = tuple(tuple(k for k in range(n) if cls_of[k] == r) for r in reps)
        edges = []
        for cl in classes:
            for k in cl[1:]:
                edges.append((cl[0], k))
                edges.append((k, cl[0]))
        above = {a: {b for b in reps if b != a and (a, b) in choice} for a in reps}
        for a in reps:
            for b in sorted(above[a]):
                if not any(b in above[c] for c in above[a]):
                    edges.append((a, b))
        filtered = any(all(i == j or (i, j) in choice for i in range(n)) for j in range(n))
        cp = CoverPoset(x, nodes, choice, tuple(edges), classes, filtered)
        self._cover_posets[x] = cp
        return cp

    def is_filtered(self, x) -> bool:
        return self.cover_poset(x).filtered

    # interchange

    def to_json(self):
        return {
            "objects": list(self.objects),
            "leq": [[y, x] for y, x in self.hasse_edges],
            "covers": {x: [list(c.legs) for c in self.covers[x]] for x in self.objects},
        }

    @classmethod
    def from_json(cls, raw):
        return validate_site(raw)


def _sieve(site, legs):
    return frozenset(o for u in legs for o in site.below(u))


def validate_site(raw) -> FinitePosetSite:
    """Check a raw site description and return the validated site.

    Collects every violation (order axioms, legs not below their target,
    missing meets, missing identity covers, stability failures) into one
    ``InvalidSiteError``. Failures of transitivity, judged up to the sieve a
    family generates, only produce warnings on the returned site.
    """
    violations = []
    if not isinstance(raw, dict):
        raise InvalidSiteError([f"site must be a JSON object, got {type(raw).__name__}"])
    objects = raw.get("objects")
    if not isinstance(objects, list) or not all(isinstance(o, str) for o in objects):
        raise InvalidSiteError(["'objects' must be a list of names"])
    if len(set(objects)) != len(objects):
        raise InvalidSiteError(["duplicate object names"])
    index = {o: i for i, o in enumerate(objects)}
    n = len(objects)
    le = [[i == j for j in range(n)] for i in range(n)]
    for pair in raw.get("leq", []):
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            violations.append(f"malformed order pair {pair!r}")
            continue
        lo, hi = pair
        if lo not in index or hi not in index:
            violations.append(f"order pair {lo!r} <= {hi!r} names an unknown object")
            continue
        le[index[lo]][index[hi]] = True
    for k in range(n):
        for i in range(n):
            if le[i][k]:
                row_k = le[k]
                row_i = le[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    for i in range(n):
        for j in range(i + 1, n):
            if le[i][j] and le[j][i]:
                violations.append(f"antisymmetry fails: {objects[i]} <= {objects[j]} <= {objects[i]}")
    if violations:
        raise InvalidSiteError(violations)

    raw_covers = raw.get("covers", {})
    if not isinstance(raw_covers, dict):
        raise InvalidSiteError(["'covers' must map objects to lists of families"])
    site = FinitePosetSite(objects, le, {o: () for o in objects})
    covers = {}
    for x in objects:
        fams = raw_covers.get(x)
        if fams is None:
            violations.append(f"{x} has no covers (identity cover missing)")
            covers[x] = ()
            continue
        seen = []
        for fam in fams:
            if not isinstance(fam, list) or any(l not in index for l in fam):
                violations.append(f"cover {fam!r} of {x} names an unknown object")
                continue
            bad = [l for l in fam if not le[index[l]][index[x]]]
            if bad:
                violations.append(f"legs {bad} of cover {fam} are not below {x}")
                continue
            c = site.normalize(x, fam)
            if c not in seen:
                seen.append(c)
        covers[x] = tuple(seen)
        if Cover(x, (x,)) not in seen:
            violations.append(f"identity cover {{{x}}} missing from J({x})")
    for x in raw_covers:
        if x not in index:
            violations.append(f"covers given for unknown object {x!r}")
    site.covers = covers

    for x in objects:
        for c in covers[x]:
            for size in range(2, len(c.legs) + 1):
                for sub in itertools.combinations(c.legs, size):
                    if site.glb(sub) is None:
                        violations.append(f"legs {list(sub)} of cover {c} have no meet")
    if violations:
        raise InvalidSiteError(violations)

    for x in objects:
        for c in covers[x]:
            for y in site.below(x):
                legs = [site.meet(u, y) for u in c.legs]
                if any(l is None for l in legs):
                    violations.append(f"cover {c} cannot be pulled back to {y}: missing meet")
                    continue
                pb = site.normalize(y, legs)
                if pb not in covers[y]:
                    violations.append(f"stability fails: pullback of {c} to {y} is {pb}, not in J({y})")
    if violations:
        raise InvalidSiteError(violations)

    site.warnings = _transitivity_warnings(site)
    return site


def _transitivity_warnings(site):
    warnings = []
    for x in site.objects:
        sieves = {_sieve(site, c.legs) for c in site.covers[x]}
        checked = 0
        for c in site.covers[x]:
            options = [site.covers[u] for u in c.legs]
            for combo in itertools.product(*options):
                checked += 1
                if checked > TRANSITIVITY_CHECK_LIMIT:
                    warnings.append(f"transitivity check truncated at {x}")
                    break
                legs = [l for v in combo for l in v.legs]
                if _sieve(site, legs) not in sieves:
                    composite = site.normalize(x, legs)
                    warnings.append(f"transitivity: composite {composite} of {c} generates no sieve of J({x})")
                    break
            else:
                continue
            break
    return warnings
