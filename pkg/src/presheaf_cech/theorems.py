"""Mechanical checks of the structural results, on curated and random instances.

Each ``verify_*`` returns a :class:`VerificationOutcome` with status ``pass``
or ``fail`` and raises :class:`PreconditionError` when its hypotheses do not
hold; :func:`run_claim` turns that into a ``precondition`` outcome so it is
reported rather than skipped. Failures carry the offending object, cover and
matrices plus a payload that reproduces them.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .cech import cochain_map, coboundary, cohomology, h0_presheaf, h_minus1_presheaf
from .classify import classify, xi
from .errors import BudgetExceeded, PreconditionError, WellDefinednessError
from .generators import (GeneratorConfig, curated_examples, make_separated, random_presheaf,
                         random_site, sample_flasque_separated)
from .linalg import (FinitePosetDiagram, Matrix, cokernel, fiber_product, finite_colimit,
                     image_basis, induced_map_on_quotients, is_epi, is_iso, is_mono,
                     kernel_basis, rank, same_span, solve, trivial_quotient)
from .plus import plus, sheafify
from .presheaf import cokernel_presheaf, edge_key, epi_mono_factorization, is_flasque, kernel_presheaf

CLAIMS = ("lemma1", "thm1", "corollary", "lemma2", "thm2", "exactseq")


@dataclass
class VerificationOutcome:
    claim: str
    instance: str
    status: str
    details: dict = field(default_factory=dict)
    payload: dict | None = None

    @property
    def passed(self):
        return self.status == "pass"

    def to_json(self):
        out = {"claim": self.claim, "instance": self.instance, "status": self.status,
               "details": self.details}
        if self.payload is not None:
            out["payload"] = self.payload
        return out


def _payload(F, seed):
    return {"site": F.site.to_json(), "presheaf": F.to_json(), "seed": seed}


def _outcome(claim, instance, problems, details, payload):
    if problems:
        return VerificationOutcome(claim, instance, "fail", {**details, "problems": problems}, payload)
    return VerificationOutcome(claim, instance, "pass", details)


def _require_separated(F):
    v = classify(F)
    if not v.separated:
        x, key = v.witnesses["separated"]
        raise PreconditionError(f"not separated: xi is not injective at {x} on cover [{key}]")


def _check_naturality(F, G, comp, problems):
    for y, x in F.site.hasse_edges:
        if G.restriction(y, x) @ comp[x] != comp[y] @ F.restriction(y, x):
            problems.append({"check": "naturality", "edge": edge_key(y, x),
                             "component_x": comp[x].to_json(), "component_y": comp[y].to_json()})


def verify_colimit_of_images(F, instance="input", seed=None):
    """Colimit over covers of the images of the global-section map is F(x)."""
    _require_separated(F)
    problems, dims = [], {}
    for x in F.site.objects:
        cp = F.site.cover_poset(x)
        bases, cores = [], []
        for c in cp.nodes:
            d = coboundary(F, c, -1)
            b = image_basis(d)
            bases.append(b)
            cores.append(solve(b, d))
        edges = [(i, j, solve(bases[j], cochain_map(F, cp.nodes[i], cp.nodes[j], 0, cp.choice[(i, j)]) @ bases[i]))
                 for i, j in cp.generating_edges]
        colim = finite_colimit(FinitePosetDiagram(tuple(b.cols for b in bases), edges))
        maps = [colim.cocone[k] @ cores[k] for k in range(len(cp.nodes))]
        dims[x] = colim.dim
        for k, m in enumerate(maps):
            if m != maps[0]:
                problems.append({"check": "cocone agreement", "object": x, "cover": cp.nodes[k].key})
        if not is_iso(maps[0]):
            problems.append({"check": "canonical map iso", "object": x,
                             "matrix": maps[0].to_json(), "colimit_dim": colim.dim})
    return _outcome("lemma1", instance, problems, {"colimit_dims": dims}, _payload(F, seed))


def h0_comparison(F, plus_result=None):
    """Canonical maps ``H^0(x) -> coker(eta_x)`` out of the shared cover colimits.

    Returns ``(H0 presheaf, cokernel presheaf, components)``.
    """
    P = plus_result or plus(F)
    H = h0_presheaf(F)
    C, proj = cokernel_presheaf(P.unit)
    comp = {}
    for x in F.site.objects:
        coh = cohomology(F, x, 0)
        _, _, pcolim = P.colimits[x]
        maps = []
        for k, piece in enumerate(coh.pieces):
            g = proj[x] @ pcolim.cocone[k]
            maps.append(induced_map_on_quotients(g, piece.quotient, trivial_quotient(C.dims[x])))
        comp[x] = coh.colimit.universal_map(maps, C.dims[x])
    return H, C, comp


def verify_cokernel_theorem(F, instance="input", seed=None):
    """For separated F, H^0(-, F) is the cokernel of the unit into F+."""
    _require_separated(F)
    H, C, comp = h0_comparison(F)
    problems = []
    for x, m in comp.items():
        if not is_iso(m):
            problems.append({"check": "component iso", "object": x, "matrix": m.to_json(),
                             "h0_dim": H.dims[x], "coker_dim": C.dims[x]})
    _check_naturality(H, C, comp, problems)
    details = {"h0_dims": H.dims, "coker_dims": C.dims}
    return _outcome("thm1", instance, problems, details, _payload(F, seed))


def verify_corollary(F, instance="input", seed=None):
    """H^{-1}(-, F) is the kernel of the unit, for any F."""
    Hm = h_minus1_presheaf(F)
    P = plus(F)
    K, incl = kernel_presheaf(P.unit)
    problems, comp = [], {}
    for x in F.site.objects:
        coh = cohomology(F, x, -1)
        maps = []
        for k, piece in enumerate(coh.pieces):
            try:
                maps.append(solve(incl[x], piece.kernel))
            except WellDefinednessError:
                problems.append({"check": "vanishing sections lie in ker eta", "object": x,
                                 "cover": coh.covers[k].key, "matrix": piece.kernel.to_json()})
                maps.append(Matrix.zeros(K.dims[x], piece.kernel.cols))
        comp[x] = coh.colimit.universal_map(maps, K.dims[x])
        if not is_iso(comp[x]):
            problems.append({"check": "component iso", "object": x, "matrix": comp[x].to_json(),
                             "h_minus1_dim": Hm.dims[x], "ker_dim": K.dims[x]})
    _check_naturality(Hm, K, comp, problems)
    details = {"h_minus1_dims": Hm.dims, "ker_dims": K.dims}
    return _outcome("corollary", instance, problems, details, _payload(F, seed))


def pullback_cokernel_map(f, l1, l2, r1, r2):
    """The induced map ``coker f -> coker(l1 f) x_{coker(l2 l1 f)} coker(r1 f)``.

    Raises ``PreconditionError`` unless ``l2 l1 = r2 r1`` and ``(l1, r1)``
    exhibits the middle object as the pullback of ``l2`` and ``r2``.
    """
    if l2 @ l1 != r2 @ r1:
        raise PreconditionError("square does not commute")
    pair = Matrix.vstack([l1, r1], cols=l1.cols)
    fp_dim = fiber_product(l2, r2)[0]
    if not is_mono(pair) or l1.cols != fp_dim:
        raise PreconditionError("the square is not a pullback")
    cf, cl, cr, cm = cokernel(f), cokernel(l1 @ f), cokernel(r1 @ f), cokernel(l2 @ l1 @ f)
    l1s = induced_map_on_quotients(l1, cf, cl)
    r1s = induced_map_on_quotients(r1, cf, cr)
    l2s = induced_map_on_quotients(l2, cl, cm)
    r2s = induced_map_on_quotients(r2, cr, cm)
    _, pl, pr = fiber_product(l2s, r2s)
    return solve(Matrix.vstack([pl, pr], cols=pl.cols), Matrix.vstack([l1s, r1s], cols=cf.quotient_dim))


def verify_pullback_cokernel_lemma(f, l1, l2, r1, r2, instance="input", seed=None):
    u = pullback_cokernel_map(f, l1, l2, r1, r2)
    details = {"source_dim": u.cols, "target_dim": u.rows, "epi": is_epi(u), "mono": is_mono(u)}
    problems = [] if details["epi"] else [{"check": "u epi", "matrix": u.to_json()}]
    payload = {"f": f.to_json(), "l1": l1.to_json(), "l2": l2.to_json(),
               "r1": r1.to_json(), "r2": r2.to_json(), "seed": seed}
    return _outcome("lemma2", instance, problems, details, payload)


def verify_lavish_theorem(F, instance="input", seed=None):
    """Flasque and separated F has lavish H^0(-, F).

    Also runs the pullback-cokernel map inside the argument: at each cover,
    the matching families of F+ are the pullback of their coboundary
    against zero, and the map out of coker(eta_x) must be onto.
    """
    flasque, edge = is_flasque(F)
    if not flasque:
        raise PreconditionError(f"not flasque: restriction {edge_key(*edge)} is not onto")
    _require_separated(F)
    H = h0_presheaf(F)
    v = classify(H)
    problems = []
    if not v.lavish:
        x, key = v.witnesses["lavish"]
        problems.append({"check": "H0 lavish", "object": x, "cover": key, "h0_dims": H.dims})
    P = plus(F)
    Fp = P.plus_presheaf
    in_situ = 0
    for x in F.site.objects:
        for c in F.site.covers[x]:
            d0 = coboundary(Fp, c, 0)
            k = kernel_basis(d0)
            f = xi(Fp, c) @ P.unit[x]
            zero_out = Matrix.zeros(0, k.cols)
            u = pullback_cokernel_map(f, k, d0, zero_out, Matrix.zeros(d0.rows, 0))
            in_situ += 1
            if not is_epi(u):
                problems.append({"check": "in-situ pullback map epi", "object": x, "cover": c.key,
                                 "matrix": u.to_json()})
    details = {"h0_dims": H.dims, "lavish": v.lavish, "in_situ_squares": in_situ}
    return _outcome("thm2", instance, problems, details, _payload(F, seed))


def verify_exact_sequence(F, instance="input", seed=None):
    """0 -> ker eta -> F -> sh(F) -> coker eta -> 0 and the epi-mono factorization of eta."""
    sh, eta = sheafify(F)
    K, kincl = kernel_presheaf(eta)
    C, cproj = cokernel_presheaf(eta)
    sigma, mid, lam = epi_mono_factorization(eta)
    problems = []

    def bad(check, x, m=None):
        entry = {"check": check, "object": x}
        if m is not None:
            entry["matrix"] = m.to_json()
        problems.append(entry)

    for x in F.site.objects:
        e = eta[x]
        if not is_mono(kincl[x]):
            bad("ker -> F mono", x, kincl[x])
        if not (e @ kincl[x]).is_zero() or kincl[x].cols != F.dims[x] - rank(e):
            bad("exact at F", x, e)
        if not same_span(e, kernel_basis(cproj[x])):
            bad("exact at sh(F)", x, e)
        if not is_epi(cproj[x]):
            bad("sh(F) -> coker epi", x, cproj[x])
        if not is_epi(sigma[x]) or not is_mono(lam[x]) or lam[x] @ sigma[x] != e:
            bad("epi-mono factorization", x, e)
        if not same_span(kernel_basis(sigma[x]), kincl[x]):
            bad("ker sigma = ker eta", x, sigma[x])
        comp = induced_map_on_quotients(Matrix.identity(e.rows), cokernel(lam[x]), cokernel(e))
        if not is_iso(comp):
            bad("coker lambda = coker eta", x, comp)
    if not classify(mid).separated:
        problems.append({"check": "image presheaf separated"})
    details = {"ker_dims": K.dims, "coker_dims": C.dims, "image_dims": mid.dims}
    return _outcome("exactseq", instance, problems, details, _payload(F, seed))


PRESHEAF_CLAIMS = {
    "lemma1": verify_colimit_of_images,
    "thm1": verify_cokernel_theorem,
    "corollary": verify_corollary,
    "thm2": verify_lavish_theorem,
    "exactseq": verify_exact_sequence,
}


def run_claim(claim, F, instance="input", seed=None):
    """Run one presheaf claim, turning a failed hypothesis into a ``precondition`` outcome."""
    try:
        return PRESHEAF_CLAIMS[claim](F, instance=instance, seed=seed)
    except PreconditionError as exc:
        return VerificationOutcome(claim, instance, "precondition", {"reason": str(exc)},
                                   _payload(F, seed))


# instances


def curated_square():
    """L = R = Q, M = 0, f the diagonal: u is onto but not injective."""
    return (Matrix.from_rows([[1], [1]]), Matrix.from_rows([[1, 0]]), Matrix.zeros(0, 1),
            Matrix.from_rows([[0, 1]]), Matrix.zeros(0, 1))


def random_square(seed, max_dim=5):
    """A random pullback square with a random map into its corner, all dims <= max_dim."""
    rng = random.Random(f"square:{seed}")
    entries = (-2, -1, 0, 0, 1, 1, 2)

    def mat(r, c):
        return Matrix(r, c, [[rng.choice(entries) for _ in range(c)] for _ in range(r)])

    while True:
        dl, dr, dm, dz = (rng.randint(0, max_dim) for _ in range(4))
        l2, r2 = mat(dm, dl), mat(dm, dr)
        dp, pl, pr = fiber_product(l2, r2)
        if dp <= max_dim:
            break
    f = mat(dp, dz)
    return f, pl, l2, pr, r2


def _random_instances(seeds, start, make):
    for s in range(start, start + seeds):
        yield f"random:seed={s}", s, make(s)


def suite_instances(claim, seeds, start=0):
    """``(instance, seed, presheaf)`` triples for a presheaf claim."""
    curated = [(f"curated:{ex.name}", None, ex.presheaf) for ex in curated_examples()]
    if claim in ("lemma1", "thm1"):
        def make(s):
            cfg = GeneratorConfig(seed=s)
            return make_separated(random_presheaf(random_site(cfg), cfg))
    elif claim == "thm2":
        def make(s):
            cfg = GeneratorConfig(seed=s, flavor="flasque-separated")
            try:
                return sample_flasque_separated(random_site(cfg), cfg)[0]
            except BudgetExceeded:
                return None
    else:
        def make(s):
            cfg = GeneratorConfig(seed=s)
            return random_presheaf(random_site(cfg), cfg)
    yield from curated
    yield from _random_instances(seeds, start, make)


def run_suite(claim, seeds=10, start=0, presheaf=None):
    """Outcomes for one claim on curated plus ``seeds`` random instances, or on ``presheaf`` alone."""
    if claim == "lemma2":
        if presheaf is not None:
            raise ValueError("the pullback-cokernel suite takes no presheaf input")
        out = [verify_pullback_cokernel_lemma(*curated_square(), instance="curated:diagonal")]
        for s in range(start, start + seeds):
            out.append(verify_pullback_cokernel_lemma(*random_square(s), instance=f"random:seed={s}", seed=s))
        return out
    if presheaf is not None:
        return [run_claim(claim, presheaf)]
    out = []
    for instance, seed, F in suite_instances(claim, seeds, start):
        if F is None:
            out.append(VerificationOutcome(claim, instance, "precondition",
                                           {"reason": "no flasque separated sample within budget"},
                                           {"seed": seed}))
        else:
            out.append(run_claim(claim, F, instance, seed))
    return out
