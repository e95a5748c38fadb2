"""Independent reference computations built on sympy.

Works from raw site/presheaf JSON only, uses sympy for all rank and
nullspace computations, picks refinement legs the opposite way from the
package (largest index), and takes colimits over every refinement pair
rather than a generating set.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import sympy


def _mat(entries, rows, cols):
    if rows == 0 or cols == 0:
        return sympy.zeros(rows, cols)
    return sympy.Matrix(rows, cols, lambda i, j: sympy.Rational(str(Fraction(entries[i][j]))))


class Oracle:
    def __init__(self, site_json, presheaf_json):
        self.objects = list(site_json["objects"])
        self.le = {(o, o) for o in self.objects} | {tuple(p) for p in site_json["leq"]}
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in itertools.product(list(self.le), repeat=2):
                if b == c and (a, d) not in self.le:
                    self.le.add((a, d))
                    changed = True
        self.covers = {x: [list(c) for c in fams] for x, fams in site_json["covers"].items()}
        self.dims = dict(presheaf_json["dims"])
        self.edge = {}
        for key, m in presheaf_json.get("restrictions", {}).items():
            y, x = key.split("<=")
            self.edge[(y, x)] = _mat(m["entries"], m["rows"], m["cols"])

    def leq(self, a, b):
        return (a, b) in self.le

    def meet(self, items):
        lower = [o for o in self.objects if all(self.leq(o, i) for i in items)]
        top = [o for o in lower if all(self.leq(p, o) for p in lower)]
        assert len(top) == 1
        return top[0]

    def res(self, y, x):
        if y == x:
            return sympy.eye(self.dims[x])
        for (a, b), m in self.edge.items():
            if b == x and self.leq(y, a):
                return self.res(y, a) * m
        # a missing edge only happens when one side is zero-dimensional
        for o in self.objects:
            if o != x and self.leq(o, x) and self.leq(y, o):
                return self.res(y, o) * self.res(o, x)
        return sympy.zeros(self.dims[y], self.dims[x])

    def tuples(self, legs, n):
        return list(itertools.product(range(len(legs)), repeat=n + 1))

    def cdim(self, x, legs, n):
        if n == -1:
            return self.dims[x]
        return sum(self.dims[self.meet([legs[i] for i in t])] for t in self.tuples(legs, n))

    def delta(self, x, legs, n):
        if n == -2:
            return sympy.zeros(self.dims[x], 0)
        if n == -1:
            blocks = [self.res(u, x) for u in legs]
            return sympy.Matrix.vstack(*blocks) if blocks else sympy.zeros(0, self.dims[x])
        src, dst = self.tuples(legs, n), self.tuples(legs, n + 1)
        sobj = {t: self.meet([legs[i] for i in t]) for t in src}
        off, acc = {}, 0
        for t in src:
            off[t] = acc
            acc += self.dims[sobj[t]]
        out = sympy.zeros(self.cdim(x, legs, n + 1), acc)
        r = 0
        for t in dst:
            ot = self.meet([legs[i] for i in t])
            for k in range(len(t)):
                s = t[:k] + t[k + 1:]
                block = self.res(ot, sobj[s]) * (-1) ** k
                out[r:r + block.rows, off[s]:off[s] + block.cols] += block
            r += self.dims[ot]
        return out

    def piece_dim(self, x, legs, n):
        d = self.delta(x, legs, n)
        ker = d.cols - d.rank()
        prev = self.delta(x, legs, n - 1).rank() if n >= 0 else 0
        return ker - prev

    def xi_flags(self, x, legs):
        d = self.delta(x, legs, -1)
        r = d.rank()
        d0 = self.delta(x, legs, 0)
        match = d0.cols - d0.rank()
        return r == self.dims[x], r == match

    def classify(self):
        mono = epi = True
        for x in self.objects:
            for legs in self.covers[x]:
                m, e = self.xi_flags(x, legs)
                mono &= m
                epi &= e
        return {"separated": mono, "lavish": epi, "sheaf": mono and epi}

    def _chain(self, x, legs_u, y, legs_v, n):
        """Cochain map from cover of x to a refining cover of y, choosing the last admissible leg."""
        if n == -1:
            return self.res(y, x)
        choice = [max(i for i, u in enumerate(legs_u) if self.leq(v, u)) for v in legs_v]
        src, dst = self.tuples(legs_u, n), self.tuples(legs_v, n)
        sobj = {t: self.meet([legs_u[i] for i in t]) for t in src}
        off, acc = {}, 0
        for t in src:
            off[t] = acc
            acc += self.dims[sobj[t]]
        out = sympy.zeros(self.cdim(y, legs_v, n), acc)
        r = 0
        for t in dst:
            ot = self.meet([legs_v[i] for i in t])
            s = tuple(choice[i] for i in t)
            block = self.res(ot, sobj[s])
            out[r:r + block.rows, off[s]:off[s] + block.cols] = block
            r += self.dims[ot]
        return out

    def refines(self, legs_v, legs_u):
        return all(any(self.leq(v, u) for u in legs_u) for v in legs_v)

    def colimit_dim(self, x, n):
        """dim of the colimit over all covers of x of ker d(n)/im d(n-1), over every refinement pair."""
        covers = self.covers[x]
        kers = []
        for legs in covers:
            d = self.delta(x, legs, n)
            ns = d.nullspace()
            kers.append(sympy.Matrix.hstack(*ns) if ns else sympy.zeros(d.cols, 0))
        offs, total = [], 0
        for k in kers:
            offs.append(total)
            total += k.cols
        rels = []
        for i, legs in enumerate(covers):
            if n >= 0:
                im = self.delta(x, legs, n - 1)
                if im.cols:
                    coords = kers[i].solve_least_squares(im) if kers[i].cols else sympy.zeros(0, im.cols)
                    for c in range(coords.cols):
                        v = sympy.zeros(total, 1)
                        v[offs[i]:offs[i] + kers[i].cols, 0] = coords[:, c]
                        rels.append(v)
        for i, j in itertools.permutations(range(len(covers)), 2):
            if self.refines(covers[j], covers[i]):
                chain = self._chain(x, covers[i], x, covers[j], n) * kers[i]
                coords = kers[j].solve_least_squares(chain) if kers[j].cols else sympy.zeros(0, chain.cols)
                for c in range(kers[i].cols):
                    v = sympy.zeros(total, 1)
                    v[offs[i] + c, 0] = 1
                    v[offs[j]:offs[j] + kers[j].cols, 0] -= coords[:, c]
                    rels.append(v)
        if not rels:
            return total
        return total - sympy.Matrix.hstack(*rels).rank()

    def plus_dim(self, x):
        """dim of the colimit of matching families, i.e. the degree-0 kernels without the quotient."""
        covers = self.covers[x]
        kers = []
        for legs in covers:
            d = self.delta(x, legs, 0)
            ns = d.nullspace()
            kers.append(sympy.Matrix.hstack(*ns) if ns else sympy.zeros(d.cols, 0))
        total = sum(k.cols for k in kers)
        offs = list(itertools.accumulate([0] + [k.cols for k in kers]))
        rels = []
        for i, j in itertools.permutations(range(len(covers)), 2):
            if self.refines(covers[j], covers[i]):
                chain = self._chain(x, covers[i], x, covers[j], 0) * kers[i]
                coords = kers[j].solve_least_squares(chain) if kers[j].cols else sympy.zeros(0, chain.cols)
                for c in range(kers[i].cols):
                    v = sympy.zeros(total, 1)
                    v[offs[i] + c, 0] = 1
                    v[offs[j]:offs[j] + kers[j].cols, 0] -= coords[:, c]
                    rels.append(v)
        if not rels:
            return total
        return total - sympy.Matrix.hstack(*rels).rank()
