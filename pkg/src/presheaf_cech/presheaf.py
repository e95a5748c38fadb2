"""Presheaves of finite-dimensional rational vector spaces on a poset site.

Restrictions are stored on Hasse edges ``y < x`` as ``dims[y] x dims[x]``
matrices; the restriction along any ``y <= x`` is the composite along a
Hasse path, and construction fails unless all such composites agree.
"""
from __future__ import annotations

from .errors import FunctorialityError, NaturalityError
from .linalg import (Matrix, cokernel, image_basis, induced_map_on_quotients, is_epi,
                     is_iso, is_mono, kernel_basis, solve)


def edge_key(y, x) -> str:
    return f"{y}<={x}"


def parse_edge_key(key):
    y, sep, x = key.partition("<=")
    if not sep:
        raise ValueError(f"restriction key {key!r} is not of the form 'y<=x'")
    return y, x


class Presheaf:
    """A functor from the site's poset (opposite) to rational vector spaces."""

    def __init__(self, site, dims, restrictions):
        self.site = site
        problems = []
        missing = [o for o in site.objects if o not in dims]
        if missing:
            problems.append(f"no dimension given for {missing}")
        extra = [o for o in dims if o not in site.index]
        if extra:
            problems.append(f"dimensions given for unknown objects {extra}")
        if problems:
            raise FunctorialityError(problems)
        self.dims = {o: int(dims[o]) for o in site.objects}
        if any(d < 0 for d in self.dims.values()):
            raise FunctorialityError(["negative dimension"])
        hasse = set(site.hasse_edges)
        for e in restrictions:
            if e not in hasse:
                problems.append(f"restriction {edge_key(*e)} is not on a Hasse edge")
        edges = {}
        for y, x in site.hasse_edges:
            m = restrictions.get((y, x))
            shape = (self.dims[y], self.dims[x])
            if m is None:
                if 0 in shape:
                    m = Matrix.zeros(*shape)
                else:
                    problems.append(f"restriction {edge_key(y, x)} missing")
                    continue
            if m.shape != shape:
                problems.append(f"restriction {edge_key(y, x)} has shape {m.shape}, expected {shape}")
                continue
            edges[(y, x)] = m
        if problems:
            raise FunctorialityError(problems)
        self.edges = edges
        self._maps = self._compose_all()

    def _compose_all(self):
        site = self.site
        children = {}
        for y, x in site.hasse_edges:
            children.setdefault(x, []).append(y)
        maps = {}
        for x in site.objects:
            comp = {x: Matrix.identity(self.dims[x])}
            path = {x: (x,)}
            stack = [x]
            while stack:
                u = stack.pop()
                for y in children.get(u, ()):
                    c = self.edges[(y, u)] @ comp[u]
                    if y not in comp:
                        comp[y] = c
                        path[y] = path[u] + (y,)
                        stack.append(y)
                    elif comp[y] != c:
                        raise FunctorialityError([(edge_key(y, x), path[y], path[u] + (y,))])
            for y, m in comp.items():
                maps[(y, x)] = m
        return maps

    def restriction(self, y, x) -> Matrix:
        """``F(y <= x): F(x) -> F(y)``."""
        try:
            return self._maps[(y, x)]
        except KeyError:
            raise ValueError(f"{y} is not below {x}") from None

    def __repr__(self):
        return f"Presheaf({self.dims})"

    def to_json(self):
        return {
            "dims": dict(self.dims),
            "restrictions": {edge_key(y, x): m.to_json() for (y, x), m in self.edges.items()},
        }

    @classmethod
    def from_json(cls, site, obj):
        return validate_presheaf(site, obj)


def validate_presheaf(site, raw) -> Presheaf:
    """Parse presheaf JSON against ``site``; raises ``FunctorialityError``."""
    if isinstance(raw, Presheaf):
        return Presheaf(site, raw.dims, raw.edges)
    if not isinstance(raw, dict) or "dims" not in raw:
        raise FunctorialityError(["presheaf JSON needs a 'dims' object"])
    restrictions = {}
    for key, m in raw.get("restrictions", {}).items():
        try:
            restrictions[parse_edge_key(key)] = Matrix.from_json(m)
        except (ValueError, TypeError) as exc:
            raise FunctorialityError([f"restriction {key}: {exc}"]) from exc
    return Presheaf(site, raw["dims"], restrictions)


def zero_presheaf(site) -> Presheaf:
    return Presheaf(site, {o: 0 for o in site.objects}, {})


def constant_presheaf(site, n=1) -> Presheaf:
    return Presheaf(site, {o: n for o in site.objects},
                    {e: Matrix.identity(n) for e in site.hasse_edges})


class NatTransformation:
    """Components ``source(x) -> target(x)``, checked natural on Hasse edges."""

    def __init__(self, source, target, components):
        if source.site is not target.site:
            raise NaturalityError("source and target live on different sites")
        self.source = source
        self.target = target
        self.components = {}
        for x in source.site.objects:
            if x not in components:
                raise NaturalityError(f"missing component at {x}")
            m = components[x]
            if m.shape != (target.dims[x], source.dims[x]):
                raise NaturalityError(f"component at {x} has shape {m.shape}")
            self.components[x] = m
        for y, x in source.site.hasse_edges:
            lhs = target.edges[(y, x)] @ self.components[x]
            rhs = self.components[y] @ source.edges[(y, x)]
            if lhs != rhs:
                raise NaturalityError(f"naturality square fails on {edge_key(y, x)}")

    @property
    def site(self):
        return self.source.site

    def __getitem__(self, x):
        return self.components[x]

    def then(self, other: "NatTransformation") -> "NatTransformation":
        """``other`` after ``self``."""
        return NatTransformation(self.source, other.target,
                                 {x: other[x] @ self[x] for x in self.site.objects})

    def is_mono(self):
        return all(is_mono(m) for m in self.components.values())

    def is_epi(self):
        return all(is_epi(m) for m in self.components.values())

    def is_iso(self):
        return all(is_iso(m) for m in self.components.values())

    def to_json(self):
        return {x: m.to_json() for x, m in self.components.items()}


def identity_nat(p: Presheaf) -> NatTransformation:
    return NatTransformation(p, p, {x: Matrix.identity(d) for x, d in p.dims.items()})


def zero_nat(source: Presheaf, target: Presheaf) -> NatTransformation:
    return NatTransformation(source, target, {x: Matrix.zeros(target.dims[x], source.dims[x])
                                              for x in source.site.objects})


def is_flasque(p: Presheaf):
    """``(True, None)`` if every restriction is onto, else ``(False, edge)``."""
    for e in p.site.hasse_edges:
        if not is_epi(p.edges[e]):
            return False, e
    return True, None


def kernel_presheaf(t: NatTransformation):
    """Pointwise kernels with their induced restrictions, and the inclusion."""
    site = t.site
    basis = {x: kernel_basis(t[x]) for x in site.objects}
    edges = {(y, x): solve(basis[y], t.source.edges[(y, x)] @ basis[x]) for y, x in site.hasse_edges}
    ker = Presheaf(site, {x: b.cols for x, b in basis.items()}, edges)
    return ker, NatTransformation(ker, t.source, basis)


def cokernel_presheaf(t: NatTransformation):
    """Pointwise cokernels, restrictions induced on quotients, and the projection."""
    site = t.site
    pres = {x: cokernel(t[x]) for x in site.objects}
    edges = {(y, x): induced_map_on_quotients(t.target.edges[(y, x)], pres[x], pres[y])
             for y, x in site.hasse_edges}
    cok = Presheaf(site, {x: q.quotient_dim for x, q in pres.items()}, edges)
    return cok, NatTransformation(t.target, cok, {x: q.projection for x, q in pres.items()})


def image_presheaf(t: NatTransformation):
    """Pointwise images (pivot-column bases) and their inclusion into the target."""
    site = t.site
    basis = {x: image_basis(t[x]) for x in site.objects}
    edges = {(y, x): solve(basis[y], t.target.edges[(y, x)] @ basis[x]) for y, x in site.hasse_edges}
    img = Presheaf(site, {x: b.cols for x, b in basis.items()}, edges)
    return img, NatTransformation(img, t.target, basis)


def epi_mono_factorization(t: NatTransformation):
    """``t = lam . sigma`` through the image presheaf; returns ``(sigma, mid, lam)``."""
    mid, lam = image_presheaf(t)
    sigma = NatTransformation(t.source, mid, {x: solve(lam[x], t[x]) for x in t.site.objects})
    return sigma, mid, lam


class SetPresheaf:
    """Finite-set-valued presheaf: section labels and functions on Hasse edges."""

    def __init__(self, site, sections, restrictions):
        self.site = site
        self.sections = {o: list(sections.get(o, [])) for o in site.objects}
        problems = []
        for o, secs in self.sections.items():
            if len(set(secs)) != len(secs):
                problems.append(f"duplicate section labels at {o}")
        funcs = {}
        for y, x in site.hasse_edges:
            f = dict(restrictions.get((y, x), {}))
            if set(f) != set(self.sections[x]) or not set(f.values()) <= set(self.sections[y]):
                problems.append(f"restriction {edge_key(y, x)} is not a function "
                                f"{self.sections[x]} -> {self.sections[y]}")
            funcs[(y, x)] = f
        if problems:
            raise FunctorialityError(problems)
        self.functions = funcs
        children = {}
        for y, x in site.hasse_edges:
            children.setdefault(x, []).append(y)
        for x in site.objects:
            comp = {x: {s: s for s in self.sections[x]}}
            stack = [x]
            while stack:
                u = stack.pop()
                for y in children.get(u, ()):
                    f = funcs[(y, u)]
                    c = {s: f[v] for s, v in comp[u].items()}
                    if y not in comp:
                        comp[y] = c
                        stack.append(y)
                    elif comp[y] != c:
                        raise FunctorialityError([f"set restrictions {edge_key(y, x)} depend on the path"])

    def to_json(self):
        return {
            "sections": {o: list(s) for o, s in self.sections.items()},
            "restrictions": {edge_key(y, x): dict(f) for (y, x), f in self.functions.items()},
        }

    @classmethod
    def from_json(cls, site, obj):
        return cls(site, obj["sections"],
                   {parse_edge_key(k): v for k, v in obj.get("restrictions", {}).items()})


def abelianize(s: SetPresheaf) -> Presheaf:
    """Free vector space on each section set; restrictions become 0/1 selection matrices."""
    site = s.site
    edges = {}
    for (y, x), f in s.functions.items():
        rows = {lab: i for i, lab in enumerate(s.sections[y])}
        m = [[0] * len(s.sections[x]) for _ in s.sections[y]]
        for j, lab in enumerate(s.sections[x]):
            m[rows[f[lab]]][j] = 1
        edges[(y, x)] = Matrix(len(s.sections[y]), len(s.sections[x]), m)
    return Presheaf(site, {o: len(v) for o, v in s.sections.items()}, edges)
