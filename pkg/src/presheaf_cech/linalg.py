"""Exact linear algebra over the rationals.

Finite-dimensional rational vector spaces are the Abelian category every
other module computes in. A linear map V -> W is a ``Matrix`` with
``dim W`` rows and ``dim V`` columns; a space is just its dimension.
No floating point is ever involved.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from numbers import Rational

from .errors import InconsistentDiagramError, WellDefinednessError

if os.environ.get("PRESHEAF_CECH_PURE"):
    from ._elim import rref_int
    BACKEND = "python"
else:
    try:
        from ._elim_fast import rref_int
        BACKEND = "cython"
    except ImportError:  # extension not built
        from ._elim import rref_int
        BACKEND = "python"


def as_rational(v):
    """Coerce ``v`` to an exact scalar: ``int`` when integral, else ``Fraction``."""
    if isinstance(v, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else v
    if isinstance(v, str):
        q = Fraction(v.strip())
        if "." in v or "e" in v.lower():
            raise ValueError(f"decimal notation not accepted for exact entries: {v!r}")
        return q.numerator if q.denominator == 1 else q
    if isinstance(v, Rational):
        q = Fraction(v.numerator, v.denominator)
        return q.numerator if q.denominator == 1 else q
    raise TypeError(f"not an exact rational: {v!r} ({type(v).__name__})")


def format_rational(v) -> str:
    q = Fraction(v)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class Matrix:
    """Immutable dense matrix with exact rational entries."""

    __slots__ = ("rows", "cols", "_data", "_hash")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix shape")
        if entries is None:
            data = tuple((0,) * cols for _ in range(rows))
        else:
            data = tuple(tuple(as_rational(v) for v in row) for row in entries)
            if len(data) != rows or any(len(row) != cols for row in data):
                raise ValueError(f"entries do not form a {rows}x{cols} grid")
        self.rows = rows
        self.cols = cols
        self._data = data
        self._hash = None

    @classmethod
    def _raw(cls, rows, cols, data):
        m = cls.__new__(cls)
        m.rows, m.cols, m._data, m._hash = rows, cols, data, None
        return m

    # constructors

    @classmethod
    def from_rows(cls, rows, cols=None):
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cannot infer column count of an empty row list")
            cols = len(rows[0])
        return cls(len(rows), cols, rows)

    @classmethod
    def zeros(cls, rows, cols):
        return cls._raw(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n):
        return cls._raw(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def column(cls, values):
        values = list(values)
        return cls(len(values), 1, [[v] for v in values])

    @classmethod
    def from_columns(cls, columns, rows):
        columns = [list(c) for c in columns]
        return cls(rows, len(columns), [[c[i] for c in columns] for i in range(rows)])

    @staticmethod
    def hstack(blocks, rows=None):
        blocks = list(blocks)
        if rows is None:
            if not blocks:
                raise ValueError("hstack of nothing needs an explicit row count")
            rows = blocks[0].rows
        for b in blocks:
            if b.rows != rows:
                raise ValueError(f"hstack row mismatch: {b.rows} != {rows}")
        data = tuple(tuple(v for b in blocks for v in b._data[i]) for i in range(rows))
        return Matrix._raw(rows, sum(b.cols for b in blocks), data)

    @staticmethod
    def vstack(blocks, cols=None):
        blocks = list(blocks)
        if cols is None:
            if not blocks:
                raise ValueError("vstack of nothing needs an explicit column count")
            cols = blocks[0].cols
        for b in blocks:
            if b.cols != cols:
                raise ValueError(f"vstack column mismatch: {b.cols} != {cols}")
        data = tuple(row for b in blocks for row in b._data)
        return Matrix._raw(len(data), cols, data)

    @staticmethod
    def block_diag(blocks):
        blocks = list(blocks)
        cols = sum(b.cols for b in blocks)
        data = []
        off = 0
        for b in blocks:
            for row in b._data:
                data.append((0,) * off + row + (0,) * (cols - off - b.cols))
            off += b.cols
        return Matrix._raw(len(data), cols, tuple(data))

    # access

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def row(self, i):
        return self._data[i]

    def col(self, j):
        return tuple(r[j] for r in self._data)

    def tolist(self):
        return [list(r) for r in self._data]

    def select_columns(self, idx):
        idx = list(idx)
        return Matrix._raw(self.rows, len(idx), tuple(tuple(r[j] for j in idx) for r in self._data))

    def select_rows(self, idx):
        idx = list(idx)
        return Matrix._raw(len(idx), self.cols, tuple(self._data[i] for i in idx))

    def row_block(self, start, stop):
        return Matrix._raw(stop - start, self.cols, self._data[start:stop])

    def col_block(self, start, stop):
        return Matrix._raw(self.rows, stop - start, tuple(r[start:stop] for r in self._data))

    @property
    def T(self):
        return Matrix._raw(self.cols, self.rows, tuple(zip(*self._data)) if self.rows else tuple(() for _ in range(self.cols)))

    def is_zero(self):
        return not any(any(r) for r in self._data)

    # arithmetic

    def __matmul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"cannot compose {self.shape} after {other.shape}")
        n = other.cols
        odata = other._data
        out = []
        for row in self._data:
            acc = [0] * n
            for k, a in enumerate(row):
                if a:
                    orow = odata[k]
                    for j in range(n):
                        b = orow[j]
                        if b:
                            acc[j] += a * b
            out.append(tuple(_norm(v) for v in acc))
        return Matrix._raw(self.rows, n, tuple(out))

    def __add__(self, other):
        self._check_same(other)
        return Matrix._raw(self.rows, self.cols, tuple(
            tuple(_norm(a + b) for a, b in zip(r, s)) for r, s in zip(self._data, other._data)))

    def __sub__(self, other):
        self._check_same(other)
        return Matrix._raw(self.rows, self.cols, tuple(
            tuple(_norm(a - b) for a, b in zip(r, s)) for r, s in zip(self._data, other._data)))

    def __neg__(self):
        return Matrix._raw(self.rows, self.cols, tuple(tuple(-a for a in r) for r in self._data))

    def scale(self, c):
        c = as_rational(c)
        return Matrix._raw(self.rows, self.cols, tuple(tuple(_norm(c * a) for a in r) for r in self._data))

    def _check_same(self, other):
        if not isinstance(other, Matrix) or self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {getattr(other, 'shape', other)}")

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._data))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(format_rational(v) for v in r) for r in self._data)
        return f"Matrix({self.rows}x{self.cols}: [{body}])"

    # interchange

    def to_json(self):
        return {"rows": self.rows, "cols": self.cols,
                "entries": [[format_rational(v) for v in r] for r in self._data]}

    @classmethod
    def from_json(cls, obj):
        try:
            rows, cols, entries = obj["rows"], obj["cols"], obj["entries"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed matrix JSON: {obj!r}") from exc
        for row in entries:
            for v in row:
                if not isinstance(v, (str, int)) or isinstance(v, bool):
                    raise ValueError(f"matrix entries must be rational strings, got {v!r}")
        return cls(rows, cols, entries)


def _norm(v):
    if type(v) is Fraction and v.denominator == 1:
        return v.numerator
    return v


# elimination


def _integer_rows(m: Matrix):
    out = []
    for row in m._data:
        d = 1
        for v in row:
            if type(v) is Fraction:
                d = lcm(d, v.denominator)
        if d == 1:
            out.append(list(row))
        else:
            out.append([int(v * d) for v in row])
    return out


def rref(m: Matrix):
    """Reduced row echelon form and pivot columns."""
    rows, pivots = rref_int(_integer_rows(m), m.cols)
    data = []
    for i, row in enumerate(rows):
        if i < len(pivots):
            p = row[pivots[i]]
            data.append(tuple(v // p if v % p == 0 else Fraction(v, p) for v in row) if p != 1 else tuple(row))
        else:
            data.append((0,) * m.cols)
    return Matrix._raw(m.rows, m.cols, tuple(data)), list(pivots)


def pivot_columns(m: Matrix):
    return rref_int(_integer_rows(m), m.cols)[1]


def rank(m: Matrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(pivot_columns(m))


def kernel_basis(m: Matrix) -> Matrix:
    """Columns form a basis of the null space, one per free column of the RREF."""
    r, pivots = rref(m)
    pset = set(pivots)
    free = [j for j in range(m.cols) if j not in pset]
    cols = []
    for f in free:
        v = [0] * m.cols
        v[f] = 1
        for i, p in enumerate(pivots):
            v[p] = -r[i, f]
        cols.append(v)
    return Matrix.from_columns(cols, m.cols)


def image_basis(m: Matrix) -> Matrix:
    """The pivot columns of ``m``: a basis of its column span."""
    return m.select_columns(pivot_columns(m))


def solve(a: Matrix, b: Matrix) -> Matrix:
    """Some X with ``a @ X == b``; raises ``WellDefinednessError`` if none exists.

    When the columns of ``a`` are independent the solution is unique.
    """
    if a.rows != b.rows:
        raise ValueError(f"solve: row mismatch {a.shape} vs {b.shape}")
    aug = Matrix.hstack([a, b], rows=a.rows)
    r, pivots = rref(aug)
    if pivots and pivots[-1] >= a.cols:
        raise WellDefinednessError("right-hand side is not in the column span")
    x = [[0] * b.cols for _ in range(a.cols)]
    for i, p in enumerate(pivots):
        x[p] = [r[i, a.cols + j] for j in range(b.cols)]
    return Matrix(a.cols, b.cols, x)


def spans_contain(a: Matrix, b: Matrix) -> bool:
    """True when every column of ``b`` lies in the column span of ``a``."""
    if b.cols == 0:
        return True
    return rank(Matrix.hstack([a, b], rows=a.rows)) == rank(a)


def same_span(a: Matrix, b: Matrix) -> bool:
    return spans_contain(a, b) and spans_contain(b, a)


def is_mono(m: Matrix) -> bool:
    return rank(m) == m.cols


def is_epi(m: Matrix) -> bool:
    return rank(m) == m.rows


def is_iso(m: Matrix) -> bool:
    return m.rows == m.cols and rank(m) == m.rows


def inverse(m: Matrix) -> Matrix:
    if not is_iso(m):
        raise ValueError("matrix is not invertible")
    return solve(m, Matrix.identity(m.rows))


# quotients


@dataclass(frozen=True)
class QuotientPresentation:
    """``ambient / span(relations)`` with a chosen projection and section.

    The complement basis is the set of coordinates that are not pivots of
    the row-reduced relation vectors, so ``lift`` picks those coordinates
    and ``projection @ lift`` is the identity.
    """

    ambient_dim: int
    relations: Matrix
    quotient_dim: int
    projection: Matrix
    lift: Matrix = field(repr=False)

    @property
    def dim(self):
        return self.quotient_dim


def quotient(relations: Matrix) -> QuotientPresentation:
    n = relations.rows
    e, pivots = rref(relations.T)
    pset = set(pivots)
    free = [j for j in range(n) if j not in pset]
    proj = []
    for j in free:
        row = [0] * n
        row[j] = 1
        for i, p in enumerate(pivots):
            row[p] = -e[i, j]
        proj.append(row)
    projection = Matrix(len(free), n, proj)
    lift = Matrix(n, len(free), [[1 if j == f else 0 for f in free] for j in range(n)])
    return QuotientPresentation(n, relations, len(free), projection, lift)


def cokernel(m: Matrix) -> QuotientPresentation:
    """Presentation of ``codomain / image(m)``."""
    return quotient(m)


def trivial_quotient(n: int) -> QuotientPresentation:
    """``Q^n`` with no relations."""
    return QuotientPresentation(n, Matrix.zeros(n, 0), n, Matrix.identity(n), Matrix.identity(n))


def induced_map_on_quotients(f: Matrix, src: QuotientPresentation, dst: QuotientPresentation) -> Matrix:
    """The unique ``g`` with ``g @ src.projection == dst.projection @ f``."""
    if f.cols != src.ambient_dim or f.rows != dst.ambient_dim:
        raise ValueError(f"map of shape {f.shape} does not go {src.ambient_dim} -> {dst.ambient_dim}")
    pf = dst.projection @ f
    if not (pf @ src.relations).is_zero():
        raise WellDefinednessError("map does not send source relations into target relations")
    return pf @ src.lift


def fiber_product(f: Matrix, g: Matrix):
    """Pullback of ``f: A -> C`` and ``g: B -> C``.

    Returns ``(dim, proj_left, proj_right)`` where the pullback is the kernel
    of ``[f, -g]`` on ``A + B``.
    """
    if f.rows != g.rows:
        raise ValueError("fiber_product: maps must share a codomain")
    k = kernel_basis(Matrix.hstack([f, -g], rows=f.rows))
    return k.cols, k.row_block(0, f.cols), k.row_block(f.cols, f.cols + g.cols)


# colimits


@dataclass(frozen=True)
class FinitePosetDiagram:
    """Nodes are dimensions; an edge ``(s, t, M)`` is a map node s -> node t."""

    nodes: tuple
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple((s, t, m) for s, t, m in self.edges))
        for s, t, m in self.edges:
            if not (0 <= s < len(self.nodes) and 0 <= t < len(self.nodes)):
                raise ValueError(f"edge ({s}, {t}) refers to a missing node")
            if m.shape != (self.nodes[t], self.nodes[s]):
                raise ValueError(f"edge ({s}, {t}) has shape {m.shape}, expected {(self.nodes[t], self.nodes[s])}")

    def validate(self):
        """Check that all parallel paths compose to the same matrix.

        Closed loops must compose to the identity. Raises
        ``InconsistentDiagramError`` naming the node pair that disagrees.
        """
        out = {}
        for s, t, m in self.edges:
            out.setdefault(s, []).append((t, m))
        for start in range(len(self.nodes)):
            comp = {start: Matrix.identity(self.nodes[start])}
            stack = [start]
            while stack:
                u = stack.pop()
                for v, m in out.get(u, ()):
                    c = m @ comp[u]
                    if v not in comp:
                        comp[v] = c
                        stack.append(v)
                    elif comp[v] != c:
                        raise InconsistentDiagramError(
                            f"paths from node {start} to node {v} disagree")


@dataclass(frozen=True)
class Colimit:
    dim: int
    cocone: tuple
    presentation: QuotientPresentation = field(repr=False)
    offsets: tuple = field(repr=False)

    def universal_map(self, maps, target_dim: int) -> Matrix:
        """The map out of the colimit induced by a compatible family ``maps``.

        ``maps[i]`` goes from node i to a space of dimension ``target_dim``.
        Incompatible families raise ``WellDefinednessError``.
        """
        f = Matrix.hstack(maps, rows=target_dim)
        return induced_map_on_quotients(f, self.presentation, trivial_quotient(target_dim))


def finite_colimit(d: FinitePosetDiagram, validate: bool = True) -> Colimit:
    """Colimit as the cokernel of ``(+)_edges V_s -> (+)_nodes V_n``, ``v -> v - M v``."""
    if validate:
        d.validate()
    offsets = []
    total = 0
    for n in d.nodes:
        offsets.append(total)
        total += n
    rel_cols = []
    for s, t, m in d.edges:
        for j in range(d.nodes[s]):
            col = [0] * total
            col[offsets[s] + j] += 1
            for i in range(d.nodes[t]):
                v = m[i, j]
                if v:
                    col[offsets[t] + i] -= v
            rel_cols.append(col)
    pres = quotient(Matrix.from_columns(rel_cols, total))
    cocone = tuple(pres.projection.col_block(offsets[k], offsets[k] + n) for k, n in enumerate(d.nodes))
    return Colimit(pres.quotient_dim, cocone, pres, tuple(offsets))
