"""Curated and random sites and presheaves.

Random sites are the open sets of a random finite topological space
(down-sets of a random preorder on a few points), ordered by inclusion, so
meets always exist. Covers are random families whose union is the target,
closed under pullback exactly and under composition up to the generated
sieve; that keeps every ``Cov(x)`` filtered. Everything is a deterministic
function of the config.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import asdict, dataclass, replace

from .classify import classify
from .errors import BudgetExceeded
from .linalg import FinitePosetDiagram, Matrix, finite_colimit, inverse
from .plus import plus, sheafify
from .presheaf import Presheaf, SetPresheaf, abelianize, constant_presheaf
from .site import validate_site

FLAVORS = ("arbitrary", "separated", "flasque", "flasque-separated", "sheaf", "set-valued")


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    max_objects: int = 8
    max_dim: int = 3
    max_covers: int = 6
    max_legs: int = 4
    max_points: int = 4
    budget: int = 50
    flavor: str = "arbitrary"
    empty_cover_prob: float = 0.3

    def __post_init__(self):
        for name in ("max_objects", "max_dim", "max_covers", "max_legs", "budget"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {self.flavor!r}; choose from {FLAVORS}")

    def to_json(self):
        return asdict(self)


def _rng(tag, seed):
    return random.Random(f"{tag}:{seed}")


# curated


@dataclass(frozen=True)
class CuratedExample:
    name: str
    site: object
    presheaf: Presheaf
    expected: dict


def diamond_site(empty_cover_at_bottom=False):
    """Bottom ``0`` below ``a`` and ``b`` below top ``X``; ``{a, b}`` covers ``X``."""
    return validate_site({
        "objects": ["0", "a", "b", "X"],
        "leq": [["0", "a"], ["0", "b"], ["a", "X"], ["b", "X"]],
        "covers": {
            "X": [["X"], ["a", "b"]],
            "a": [["a"], ["a", "0"]],
            "b": [["b"], ["b", "0"]],
            "0": [["0"], []] if empty_cover_at_bottom else [["0"]],
        },
    })


def f1_presheaf(site=None):
    """Flasque and separated but not lavish: one global section, two independent local ones."""
    site = site or diamond_site()
    return Presheaf(site, {"X": 1, "a": 1, "b": 1, "0": 0},
                    {("a", "X"): Matrix.identity(1), ("b", "X"): Matrix.identity(1)})


def two_point_space_site():
    """Open sets of the discrete space ``{p, q}``."""
    return validate_site({
        "objects": ["0", "p", "q", "pq"],
        "leq": [["0", "p"], ["0", "q"], ["p", "pq"], ["q", "pq"]],
        "covers": {
            "pq": [["pq"], ["p", "q"]],
            "p": [["p"], ["p", "0"]],
            "q": [["q"], ["q", "0"]],
            "0": [["0"], []],
        },
    })


def function_sheaf():
    """Rational-valued functions on the discrete two-point space."""
    site = two_point_space_site()
    return Presheaf(site, {"pq": 2, "p": 1, "q": 1, "0": 0}, {
        ("p", "pq"): Matrix.from_rows([[1, 0]]),
        ("q", "pq"): Matrix.from_rows([[0, 1]]),
    })


def curated_examples():
    s = diamond_site()
    return [
        CuratedExample("F1", s, f1_presheaf(s),
                       {"separated": True, "lavish": False, "sheaf": False}),
        CuratedExample("F2_empty_cover", diamond_site(True), constant_presheaf(diamond_site(True)),
                       {"separated": False, "lavish": True, "sheaf": False}),
        CuratedExample("two_point_functions", two_point_space_site(), function_sheaf(),
                       {"separated": True, "lavish": True, "sheaf": True}),
        CuratedExample("constant_on_diamond", s, constant_presheaf(s),
                       {"separated": True, "lavish": True, "sheaf": True}),
    ]


# random sites


def _random_down_sets(rng, npoints):
    le = [[i == j for j in range(npoints)] for i in range(npoints)]
    for i in range(npoints):
        for j in range(npoints):
            if i != j and rng.random() < 0.3:
                le[i][j] = True
    for k in range(npoints):
        for i in range(npoints):
            if le[i][k]:
                for j in range(npoints):
                    if le[k][j]:
                        le[i][j] = True
    opens = []
    for bits in range(1 << npoints):
        s = frozenset(i for i in range(npoints) if bits >> i & 1)
        if all(i in s for j in s for i in range(npoints) if le[i][j]):
            opens.append(s)
    opens.sort(key=lambda s: (len(s), sorted(s)))
    return opens


def _name(s):
    return "{" + ",".join(str(i) for i in sorted(s)) + "}"


def _maximal(sets):
    sets = set(sets)
    return [s for s in sets if not any(s < t for t in sets)]


def random_site(config: GeneratorConfig):
    rng = _rng("site", config.seed)
    for _ in range(config.budget):
        if config.max_objects == 1:
            npoints = 0
        else:
            # small spaces rarely carry nontrivial covers, so favour larger ones
            npoints = rng.choice([k for k in range(1, config.max_points + 1) for _ in range(k)])
        opens = _random_down_sets(rng, npoints)
        if len(opens) > config.max_objects:
            continue
        order = {s: i for i, s in enumerate(opens)}

        def norm(legs):
            return tuple(sorted(set(legs), key=order.__getitem__))

        covers = {s: [(s,)] for s in opens}
        for s in opens:
            if not s:
                if len(opens) > 1 and rng.random() < config.empty_cover_prob:
                    covers[s].append(())
                continue
            proper = [t for t in opens if t < s]
            for _ in range(rng.randint(1, 2)):
                for _try in range(10):
                    k = rng.randint(1, min(config.max_legs, max(1, len(proper))))
                    legs = rng.sample(proper, min(k, len(proper))) if proper else []
                    if legs and frozenset().union(*legs) == s:
                        c = norm(legs)
                        if c not in covers[s]:
                            covers[s].append(c)
                        break
        try:
            _close(opens, covers, norm, config)
        except BudgetExceeded:
            continue
        raw = {
            "objects": [_name(s) for s in opens],
            "leq": [[_name(a), _name(b)] for a in opens for b in opens if a < b],
            "covers": {_name(s): [[_name(l) for l in c] for c in covers[s]] for s in opens},
        }
        return validate_site(raw)
    raise BudgetExceeded(f"no site within bounds after {config.budget} attempts",
                         {"attempts": config.budget})


def _close(opens, covers, norm, config):
    def sieve(legs):
        return frozenset(t for t in opens if any(t <= l for l in legs))

    changed = True
    while changed:
        changed = False
        for s in opens:
            for c in list(covers[s]):
                for y in opens:
                    if y <= s:
                        pb = norm([l & y for l in c])
                        if pb not in covers[y]:
                            covers[y].append(pb)
                            changed = True
        for s in opens:
            sieves = {sieve(c) for c in covers[s]}
            for c in list(covers[s]):
                for combo in itertools.product(*(covers[l] for l in c)):
                    legs = [l for v in combo for l in v]
                    sv = sieve(legs)
                    if sv not in sieves:
                        covers[s].append(norm(_maximal(legs)))
                        sieves.add(sv)
                        changed = True
            if len(covers[s]) > config.max_covers or any(len(c) > config.max_legs for c in covers[s]):
                raise BudgetExceeded("cover closure exceeds bounds")


# random presheaves


def _random_matrix(rng, rows, cols, entries=(-1, 0, 0, 1, 2)):
    return Matrix(rows, cols, [[rng.choice(entries) for _ in range(cols)] for _ in range(rows)])


def _up_diagram(site, y, dims, edges):
    ups = [o for o in site.above(y) if o != y]
    pos = {o: i for i, o in enumerate(ups)}
    diag_edges = [(pos[z], pos[x], edges[(x, z)]) for x, z in site.hasse_edges if x in pos and z in pos]
    return ups, FinitePosetDiagram(tuple(dims[o] for o in ups), diag_edges)


def random_presheaf(site, config: GeneratorConfig):
    """A random functorial presheaf, built top-down.

    Each object's restrictions are a random map out of the colimit of
    everything above it, which makes all Hasse-path composites agree.
    """
    if config.flavor == "set-valued":
        return abelianize(random_set_presheaf(site, config))
    rng = _rng("presheaf", config.seed)
    dims, edges = {}, {}
    for y in site.linear_extension:
        dims[y] = rng.randint(0, config.max_dim)
        parents = [x for (w, x) in site.hasse_edges if w == y]
        if not parents:
            continue
        ups, diag = _up_diagram(site, y, dims, edges)
        colim = finite_colimit(diag, validate=False)
        r = _random_matrix(rng, dims[y], colim.dim)
        for x in parents:
            edges[(y, x)] = r @ colim.cocone[ups.index(x)]
    return Presheaf(site, dims, edges)


def random_set_presheaf(site, config: GeneratorConfig) -> SetPresheaf:
    rng = _rng("sets", config.seed)
    sections, funcs = {}, {}
    for y in site.linear_extension:
        ups = [o for o in site.above(y) if o != y]
        parents = [x for (w, x) in site.hasse_edges if w == y]
        # classes of the colimit of the section sets above y
        parent_of = {(o, s): (o, s) for o in ups for s in sections[o]}

        def find(k):
            while parent_of[k] != k:
                parent_of[k] = parent_of[parent_of[k]]
                k = parent_of[k]
            return k

        for x, z in site.hasse_edges:
            if x in sections and z in sections and x in ups and z in ups:
                for s in sections[z]:
                    a, b = find((z, s)), find((x, funcs[(x, z)][s]))
                    if a != b:
                        parent_of[a] = b
        classes = sorted({find(k) for k in parent_of}, key=repr)
        lo = 1 if classes else 0
        m = rng.randint(lo, max(lo, config.max_dim))
        labels = [f"s{i}" for i in range(m)]
        sections[y] = labels
        pick = {c: rng.choice(labels) for c in classes}
        for x in parents:
            funcs[(y, x)] = {s: pick[find((x, s))] for s in sections[x]}
    return SetPresheaf(site, sections, funcs)


def window_presheaf(site, ambient_dim, windows, basis_change=None):
    """Coordinate projections between monotone windows of ``Q^ambient_dim``.

    ``windows[x]`` is a set of coordinates with ``windows[y] <= windows[x]``
    whenever ``y <= x``. ``basis_change`` optionally maps objects to
    invertible matrices applied at each stalk.
    """
    win = {x: sorted(windows[x]) for x in site.objects}
    for y, x in site.hasse_edges:
        if not set(win[y]) <= set(win[x]):
            raise ValueError(f"window at {y} is not inside the window at {x}")
        if any(c >= ambient_dim or c < 0 for c in win[x]):
            raise ValueError("window coordinate out of range")
    edges = {}
    for y, x in site.hasse_edges:
        m = [[1 if cx == cy else 0 for cx in win[x]] for cy in win[y]]
        edges[(y, x)] = Matrix(len(win[y]), len(win[x]), m)
    if basis_change:
        inv = {x: inverse(b) for x, b in basis_change.items()}
        edges = {(y, x): basis_change[y] @ m @ inv[x] for (y, x), m in edges.items()}
    return Presheaf(site, {x: len(w) for x, w in win.items()}, edges)


def _random_invertible(rng, n):
    m = Matrix.identity(n)
    for _ in range(2 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i != j:
            e = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
            e[i][j] = rng.choice((-1, 1, 2))
            m = Matrix(n, n, e) @ m
    return m


def random_flasque(site, config: GeneratorConfig, keep=0.75, basis_change=True):
    rng = _rng("flasque", config.seed)
    ambient = rng.randint(1, config.max_dim)
    windows = {}
    for y in site.linear_extension:
        parents = [x for (w, x) in site.hasse_edges if w == y]
        base = set(range(ambient))
        for x in parents:
            base &= windows[x]
        windows[y] = {c for c in sorted(base) if rng.random() < keep}
    change = None
    if basis_change:
        change = {x: _random_invertible(rng, len(windows[x])) for x in site.objects}
    return window_presheaf(site, ambient, windows, change)


def make_separated(F):
    return plus(F).plus_presheaf


def sample_flasque_separated(site, config: GeneratorConfig):
    """Rejection-sample flasque presheaves until one is separated.

    Returns ``(presheaf, stats)``; raises ``BudgetExceeded`` carrying the
    same statistics when the budget runs out.
    """
    for attempt in range(config.budget):
        F = random_flasque(site, replace(config, seed=f"{config.seed}/{attempt}"))
        if classify(F).separated:
            return F, {"attempts": attempt + 1, "accepted": 1, "acceptance_rate": 1 / (attempt + 1)}
    stats = {"attempts": config.budget, "accepted": 0, "acceptance_rate": 0.0}
    raise BudgetExceeded(f"no flasque separated presheaf in {config.budget} attempts", stats)


def generate(config: GeneratorConfig):
    """A site and a presheaf of the configured flavor, with the config embedded."""
    site = random_site(config)
    stats = None
    if config.flavor == "set-valued":
        F = random_set_presheaf(site, config)
    elif config.flavor == "arbitrary":
        F = random_presheaf(site, config)
    elif config.flavor == "separated":
        F = make_separated(random_presheaf(site, replace(config, flavor="arbitrary")))
    elif config.flavor == "flasque":
        F = random_flasque(site, config)
    elif config.flavor == "flasque-separated":
        F, stats = sample_flasque_separated(site, config)
    else:
        F = sheafify(random_presheaf(site, replace(config, flavor="arbitrary")))[0]
    out = {"config": config.to_json(), "site": site.to_json(), "presheaf": F.to_json()}
    if stats is not None:
        out["sampling"] = stats
    return out
