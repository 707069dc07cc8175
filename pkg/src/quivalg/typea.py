"""Two-step comparison between a fully framed linear quiver and its
one-vertex-framed expansion.

The data of a linear quiver on vertices 1..n-1 with framing spaces D_i at
every vertex is repackaged on an expanded quiver of the same shape whose
only framing sits at vertex 1.  Each expanded vertex space splits as
Vtilde_i = V_i (+) D_i' with D_i' a direct sum of shifted copies D_j^(k),
and maps decompose into named blocks (T, S, and the V-to-V corners A, B).
This module implements the dimension bookkeeping, the graded vanishing
pattern that cuts out the transversal locus, the unique transversal lift
of a zero-moment point and its verifier, the nilpotent-endomorphism flag
correspondence in the d = (N, 0, ...) case, scaling-equivariance and
symplectic pullback checks, and Slodowy slice linear algebra in gl_N.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .quiver import FramedQuiver, Quiver, QuiverRep, moment_map, sample_tangent
from .scalars import DomainError, Jet, Matrix, NoSolution

__all__ = [
    "BlockRep",
    "FlagDimensionMismatch",
    "InvalidPartition",
    "LiftInconsistent",
    "NonPositiveDimension",
    "PreconditionMomentMap",
    "Sl2Triple",
    "SlodowySlice",
    "TypeAData",
    "build_typea",
    "flag_iso_e0",
    "grad_degree",
    "kazhdan_action_check",
    "maffei_lift",
    "maffei_verify",
    "sl2_for_blocks",
    "slodowy_slice",
    "symplectic_pullback_check",
]

_HALF = Fraction(1, 2)


class NonPositiveDimension(DomainError):
    """A derived inner dimension v_i came out nonpositive."""


class LiftInconsistent(DomainError):
    """The staged transversal solve left a nonzero residual or a
    non-unique stage."""


class PreconditionMomentMap(DomainError):
    """The input point is not on the zero fiber of the moment map."""


class FlagDimensionMismatch(DomainError):
    """A kernel step of the flag has the wrong dimension (the point is
    not semistable)."""


class InvalidPartition(DomainError):
    """Not a partition of N with positive integer parts."""


# -- dimension data --------------------------------------------------------


class TypeAData:
    """Dimension bookkeeping shared by both sides of the comparison.

    n, N are the shape parameters; r is a weak composition of N into n
    parts and d assigns a framing dimension to each of the n-1 vertices,
    subject to sum(i * d_i) = N.  The derived vector v gives the inner
    dimensions, tilde_v the expanded ones, and tilde_d = (N, 0, ..., 0)
    the expanded framing.

    Vertex i of the expansion carries Vtilde_i = V_i (+) D_i' with
    D_i' = (+)_{1 <= k <= j-i <= n-i-1} D_j^(k); vertex 0 carries only
    the D summands (k <= j <= n-1).  Summands with d_j = 0 are omitted.
    The derived dimension formulas read the printed index of the r/d sums
    as the summation index j; tilde_v counts D_j^(k) with its multiplicity
    j - i, which is what makes the summand bookkeeping close up.
    """

    __slots__ = ("n", "N", "r", "d", "v", "tilde_v", "tilde_d", "_cache")

    def __init__(self, n: int, N: int, r: Sequence[int], d: Sequence[int]):
        if not isinstance(n, int) or n < 2:
            raise ValueError("n must be an integer >= 2")
        if not isinstance(N, int) or N < 1:
            raise ValueError("N must be a positive integer")
        r = tuple(int(x) for x in r)
        d = tuple(int(x) for x in d)
        if len(r) != n:
            raise ValueError(f"r must have {n} parts, got {len(r)}")
        if len(d) != n - 1:
            raise ValueError(f"d must have {n - 1} entries, got {len(d)}")
        if any(x < 0 for x in r) or any(x < 0 for x in d):
            raise ValueError("r and d entries must be nonnegative")
        if sum(r) != N:
            raise ValueError(f"sum(r) = {sum(r)} must equal N = {N}")
        if sum((i + 1) * di for i, di in enumerate(d)) != N:
            raise ValueError("sum(i * d_i) must equal N")
        self.n = n
        self.N = N
        self.r = r
        self.d = d
        v = []
        for i in range(1, n):
            vi = sum(r[j - 1] for j in range(i + 1, n + 1)) - sum(
                (j - i) * d[j - 1] for j in range(i + 1, n)
            )
            if vi <= 0:
                raise NonPositiveDimension(
                    f"v_{i} = {vi} is not positive for r={r}, d={d}"
                )
            v.append(vi)
        self.v = tuple(v)
        self.tilde_v = tuple(
            self.v[i - 1] + sum((j - i) * d[j - 1] for j in range(i + 1, n))
            for i in range(1, n)
        )
        self.tilde_d = (N,) + (0,) * (n - 2)
        self._cache = {}

    def v_of(self, i: int) -> int:
        return self.v[i - 1]

    def d_of(self, j: int) -> int:
        return self.d[j - 1]

    def summands(self, i: int) -> tuple:
        """Ordered summand keys of Vtilde_i, V first, then D_(j,k) by
        (j, k); zero-dimensional summands are dropped."""
        key = ("summands", i)
        if key not in self._cache:
            if not 0 <= i <= self.n - 1:
                raise ValueError(f"vertex index {i} out of range")
            out = []
            if i >= 1:
                out.append(("V", i))
            for j in range(i + 1, self.n):
                if self.d_of(j) == 0:
                    continue
                for k in range(1, j - i + 1):
                    out.append(("D", j, k))
            self._cache[key] = tuple(out)
        return self._cache[key]

    def dim_of(self, key) -> int:
        if key[0] == "V":
            return self.v_of(key[1])
        return self.d_of(key[1])

    def weight(self, i: int, key) -> int:
        """Integer scaling weight of a summand at vertex i: 0 on V_i and
        j - i + 1 - 2k on D_j^(k)."""
        if key[0] == "V":
            return 0
        _, j, k = key
        return j - i + 1 - 2 * k

    def offsets(self, i: int) -> tuple:
        """(list of (key, offset, size), total dimension) at vertex i."""
        key = ("offsets", i)
        if key not in self._cache:
            out = []
            pos = 0
            for s in self.summands(i):
                size = self.dim_of(s)
                out.append((s, pos, size))
                pos += size
            self._cache[key] = (tuple(out), pos)
        return self._cache[key]

    def d_part(self, i: int) -> tuple:
        """(start offset, size, relative offsets) of D_i' inside
        Vtilde_i."""
        offs, total = self.offsets(i)
        d_offs = [(k, o, s) for (k, o, s) in offs if k[0] == "D"]
        if not d_offs:
            return (total, 0, ())
        start = d_offs[0][1]
        rel = tuple((k, o - start, s) for (k, o, s) in d_offs)
        return (start, total - start, rel)

    def framed_quiver(self) -> FramedQuiver:
        """The original shape: a linear quiver on n-1 vertices framed by
        d at every vertex."""
        if "fq" not in self._cache:
            base = Quiver(self.n - 1, [(i, i + 1) for i in range(self.n - 2)])
            self._cache["fq"] = FramedQuiver(base, self.d)
        return self._cache["fq"]

    def expanded_quiver(self) -> FramedQuiver:
        """The expanded shape: the same linear quiver framed by
        (N, 0, ..., 0)."""
        if "efq" not in self._cache:
            base = Quiver(self.n - 1, [(i, i + 1) for i in range(self.n - 2)])
            self._cache["efq"] = FramedQuiver(base, self.tilde_d)
        return self._cache["efq"]

    def to_json(self):
        return {"n": self.n, "N": self.N, "r": list(self.r), "d": list(self.d)}

    @classmethod
    def from_json(cls, obj) -> "TypeAData":
        return cls(obj["n"], obj["N"], obj["r"], obj["d"])

    def __eq__(self, other):
        if not isinstance(other, TypeAData):
            return NotImplemented
        return (self.n, self.N, self.r, self.d) == (
            other.n,
            other.N,
            other.r,
            other.d,
        )

    __hash__ = None

    def __repr__(self):
        return f"TypeAData(n={self.n}, N={self.N}, r={self.r}, d={self.d})"


def build_typea(n: int, N: int, r: Sequence[int], d: Sequence[int]) -> TypeAData:
    """Dimension data for the comparison; rejects inputs whose derived
    inner dimensions are not all positive."""
    return TypeAData(n, N, r, d)


def grad_degree(i: int, j: int, h: int, jp: int, hp: int, kind: str) -> int:
    """Grading degree of the block D_j^(h) <- D_jp^(hp) of the i-th map.

    kind "T" is the forward direction (source at vertex i, target at
    vertex i+1), kind "S" the reverse.  Blocks of negative degree vanish
    on the transversal locus and degree-0 blocks are forced to 0 or id.
    """
    if kind == "T":
        if not (j >= i + 2 and 1 <= h <= j - i - 1):
            raise ValueError(f"T target D_{j}^({h}) not a summand at vertex {i + 1}")
        if not (jp >= i + 1 and 1 <= hp <= jp - i):
            raise ValueError(f"T source D_{jp}^({hp}) not a summand at vertex {i}")
        return min(h - hp + 1, h - hp + 1 + jp - j)
    if kind == "S":
        if not (j >= i + 1 and 1 <= h <= j - i):
            raise ValueError(f"S target D_{j}^({h}) not a summand at vertex {i}")
        if not (jp >= i + 2 and 1 <= hp <= jp - i - 1):
            raise ValueError(f"S source D_{jp}^({hp}) not a summand at vertex {i + 1}")
        return min(h - hp, h - hp + jp - j)
    raise ValueError(f"kind must be 'T' or 'S', got {kind!r}")


# -- block classification ---------------------------------------------------

# Each block position of the i-th forward/reverse map is classified as
# ("zero", None), ("id", None), ("matched", component key of the original
# representation), or ("free", canonical block key).  The canonical block
# keys double as cell addresses:
#   ("A", i) / ("B", i)                       V-to-V corners, i >= 1
#   ("TV", i, (jp, hp)) / ("SV", i, (jp, hp)) target V, source D
#   ("TD", i, (j, h))  / ("SD", i, (j, h))    target D, source V
#   ("T", i, (j, h), (jp, hp)) / ("S", ...)   D-to-D blocks


def _classify(data: TypeAData, side: str, i: int, tgt, src):
    if side == "A":
        if tgt[0] == "V" and src[0] == "V":
            return ("matched", ("A", i))
        if tgt[0] == "V":
            _, jp, hp = src
            if hp != 1:
                return ("zero", None)
            if jp == i + 1:
                return ("matched", ("G", i + 1))
            return ("free", ("TV", i, (jp, hp)))
        if src[0] == "V":
            return ("zero", None)
        _, j, h = tgt
        _, jp, hp = src
        g = grad_degree(i, j, h, jp, hp, "T")
        if g < 0:
            return ("zero", None)
        if g == 0:
            return ("id", None) if (jp, hp) == (j, h + 1) else ("zero", None)
        return ("free", ("T", i, (j, h), (jp, hp)))
    if tgt[0] == "V" and src[0] == "V":
        return ("matched", ("B", i))
    if tgt[0] == "V":
        return ("zero", None)
    if src[0] == "V":
        _, j, h = tgt
        if h != j - i:
            return ("zero", None)
        if j == i + 1:
            return ("matched", ("D", i + 1))
        return ("free", ("SD", i, (j, h)))
    _, j, h = tgt
    _, jp, hp = src
    g = grad_degree(i, j, h, jp, hp, "S")
    if g < 0:
        return ("zero", None)
    if g == 0:
        return ("id", None) if (jp, hp) == (j, h) else ("zero", None)
    return ("free", ("S", i, (j, h), (jp, hp)))


def _cell_key(side: str, i: int, tgt, src):
    if side == "A":
        if tgt[0] == "V" and src[0] == "V":
            return ("A", i)
        if tgt[0] == "V":
            return ("TV", i, (src[1], src[2]))
        if src[0] == "V":
            return ("TD", i, (tgt[1], tgt[2]))
        return ("T", i, (tgt[1], tgt[2]), (src[1], src[2]))
    if tgt[0] == "V" and src[0] == "V":
        return ("B", i)
    if tgt[0] == "V":
        return ("SV", i, (src[1], src[2]))
    if src[0] == "V":
        return ("SD", i, (tgt[1], tgt[2]))
    return ("S", i, (tgt[1], tgt[2]), (src[1], src[2]))


def _cell_name(key) -> str:
    kind = key[0]
    if kind in ("A", "B"):
        return f"{kind}[{key[1]}]"
    if kind in ("TV", "SV"):
        jp, hp = key[2]
        return f"{kind}[{key[1]}] <- D({jp},{hp})"
    if kind in ("TD", "SD"):
        j, h = key[2]
        return f"{kind}[{key[1]}] D({j},{h}) <- V"
    j, h = key[2]
    jp, hp = key[3]
    return f"{kind}[{key[1]}] D({j},{h}) <- D({jp},{hp})"


def _resolve_cell(data: TypeAData, key):
    """(side, i, target summand, source summand) of a cell key."""
    kind = key[0]
    i = key[1]
    if not 0 <= i <= data.n - 2:
        raise ValueError(f"map index {i} out of range")
    if kind == "A":
        if i < 1:
            raise ValueError("no V summand at vertex 0")
        return ("A", i, ("V", i + 1), ("V", i))
    if kind == "B":
        if i < 1:
            raise ValueError("no V summand at vertex 0")
        return ("B", i, ("V", i), ("V", i + 1))
    if kind == "TV":
        return ("A", i, ("V", i + 1), ("D",) + tuple(key[2]))
    if kind == "TD":
        return ("A", i, ("D",) + tuple(key[2]), ("V", i))
    if kind == "T":
        return ("A", i, ("D",) + tuple(key[2]), ("D",) + tuple(key[3]))
    if kind == "SV":
        return ("B", i, ("V", i), ("D",) + tuple(key[2]))
    if kind == "SD":
        return ("B", i, ("D",) + tuple(key[2]), ("V", i + 1))
    if kind == "S":
        return ("B", i, ("D",) + tuple(key[2]), ("D",) + tuple(key[3]))
    raise ValueError(f"unknown block kind {kind!r}")


def _stage_of(data: TypeAData, side: str, i: int, tgt, src) -> int:
    """Scaling grade of a block position: 1 + w(source) - w(target).

    Matched blocks sit in grade 1, forced identity blocks in grade 0, and
    every free block in grade >= 2.  Equation rows are homogeneous for
    the same grading, which is what makes the staged solve triangular.
    """
    if side == "A":
        return 1 + data.weight(i, src) - data.weight(i + 1, tgt)
    return 1 + data.weight(i + 1, src) - data.weight(i, tgt)


def _iter_cells(data: TypeAData, side: str, i: int):
    for tgt, _, _ in data.offsets(i + 1 if side == "A" else i)[0]:
        for src, _, _ in data.offsets(i if side == "A" else i + 1)[0]:
            yield tgt, src


# -- the block container ----------------------------------------------------


class BlockRep:
    """A point of the expanded representation space, stored as the full
    forward/reverse matrices with block access through the summand
    decomposition."""

    __slots__ = ("data", "A_tilde", "B_tilde")

    def __init__(self, data: TypeAData, A_tilde: Sequence[Matrix], B_tilde: Sequence[Matrix]):
        if len(A_tilde) != data.n - 1 or len(B_tilde) != data.n - 1:
            raise ValueError(f"need {data.n - 1} forward and reverse matrices")
        for i in range(data.n - 1):
            rows = data.offsets(i + 1)[1]
            cols = data.offsets(i)[1]
            a, b = A_tilde[i], B_tilde[i]
            if a.rows != rows or a.cols != cols:
                raise ValueError(f"A_tilde[{i}] must be {rows}x{cols}")
            if b.rows != cols or b.cols != rows:
                raise ValueError(f"B_tilde[{i}] must be {cols}x{rows}")
        self.data = data
        self.A_tilde = tuple(A_tilde)
        self.B_tilde = tuple(B_tilde)

    @classmethod
    def from_blocks(cls, data: TypeAData, blocks: dict) -> "BlockRep":
        """Assemble from named blocks; forced identity cells are filled
        automatically and unnamed cells default to zero."""
        blocks = dict(blocks)
        A_t, B_t = [], []
        for i in range(data.n - 1):
            for side, dest in (("A", A_t), ("B", B_t)):
                row_off = data.offsets(i + 1 if side == "A" else i)[0]
                col_off = data.offsets(i if side == "A" else i + 1)[0]
                grid = []
                for tgt, _, tsz in row_off:
                    row = []
                    for src, _, ssz in col_off:
                        key = _cell_key(side, i, tgt, src)
                        if key in blocks:
                            m = blocks.pop(key)
                            if m.rows != tsz or m.cols != ssz:
                                raise ValueError(
                                    f"block {_cell_name(key)} must be {tsz}x{ssz}"
                                )
                            row.append(m)
                        elif _classify(data, side, i, tgt, src)[0] == "id":
                            row.append(Matrix.identity(tsz))
                        else:
                            row.append(Matrix.zero(tsz, ssz))
                    grid.append(row)
                dest.append(Matrix.block(grid) if grid else Matrix.zero(0, 0))
        if blocks:
            raise ValueError(f"unplaceable block keys: {sorted(map(str, blocks))}")
        return cls(data, A_t, B_t)

    def block(self, key) -> Matrix:
        side, i, tgt, src = _resolve_cell(self.data, key)
        rv, cv = (i + 1, i) if side == "A" else (i, i + 1)
        row_off = dict((k, (o, s)) for k, o, s in self.data.offsets(rv)[0])
        col_off = dict((k, (o, s)) for k, o, s in self.data.offsets(cv)[0])
        if tgt not in row_off or src not in col_off:
            raise ValueError(f"no cell {_cell_name(key)} in this decomposition")
        ro, rs = row_off[tgt]
        co, cs = col_off[src]
        mat = self.A_tilde[i] if side == "A" else self.B_tilde[i]
        return mat.submatrix(range(ro, ro + rs), range(co, co + cs))

    def cells(self) -> dict:
        """Every cell key with its current matrix value."""
        out = {}
        for i in range(self.data.n - 1):
            for side in ("A", "B"):
                for tgt, src in _iter_cells(self.data, side, i):
                    key = _cell_key(side, i, tgt, src)
                    out[key] = self.block(key)
        return out

    def with_block(self, key, mat: Matrix) -> "BlockRep":
        cells = self.cells()
        if key not in cells:
            raise ValueError(f"no cell {key!r} in this decomposition")
        cells[key] = mat
        # from_blocks refills forced ids, so pass every cell explicitly
        return BlockRep.from_blocks(self.data, cells)

    def as_quiver_rep(self) -> QuiverRep:
        """Repackage as a representation of the expanded framed quiver
        (framing N at vertex 1 only); the 0-th forward/reverse pair is
        the framing pair."""
        data = self.data
        efq = data.expanded_quiver()
        A = [self.A_tilde[k] for k in range(1, data.n - 1)]
        B = [self.B_tilde[k] for k in range(1, data.n - 1)]
        G = [self.A_tilde[0]] + [
            Matrix.zero(data.tilde_v[i], 0) for i in range(1, data.n - 1)
        ]
        D = [self.B_tilde[0]] + [
            Matrix.zero(0, data.tilde_v[i]) for i in range(1, data.n - 1)
        ]
        return QuiverRep(efq, data.tilde_v, A, B, G, D)

    def __eq__(self, other):
        if not isinstance(other, BlockRep):
            return NotImplemented
        return (
            self.data == other.data
            and all(a == b for a, b in zip(self.A_tilde, other.A_tilde))
            and all(a == b for a, b in zip(self.B_tilde, other.B_tilde))
        )

    __hash__ = None

    def to_json(self):
        blocks = []
        for key, mat in sorted(self.cells().items(), key=lambda kv: repr(kv[0])):
            side, i, tgt, src = _resolve_cell(self.data, key)
            cls_, _ = _classify(self.data, side, i, tgt, src)
            if cls_ == "id" and mat == Matrix.identity(mat.rows):
                continue
            if mat.is_zero():
                continue
            entry = {"kind": key[0], "i": key[1], "matrix": mat.to_json()}
            if key[0] in ("T", "S"):
                entry["target"] = list(key[2])
                entry["source"] = list(key[3])
            elif key[0] in ("TV", "SV"):
                entry["source"] = list(key[2])
            elif key[0] in ("TD", "SD"):
                entry["target"] = list(key[2])
            blocks.append(entry)
        out = self.data.to_json()
        out["schema"] = "blockrep"
        out["blocks"] = blocks
        return out

    @classmethod
    def from_json(cls, obj) -> "BlockRep":
        data = TypeAData.from_json(obj)
        blocks = {}
        for entry in obj["blocks"]:
            kind = entry["kind"]
            if kind in ("A", "B"):
                key = (kind, entry["i"])
            elif kind in ("TV", "SV"):
                key = (kind, entry["i"], tuple(entry["source"]))
            elif kind in ("TD", "SD"):
                key = (kind, entry["i"], tuple(entry["target"]))
            else:
                key = (kind, entry["i"], tuple(entry["target"]), tuple(entry["source"]))
            blocks[key] = Matrix.from_json(entry["matrix"])
        return cls.from_blocks(data, blocks)

    def __repr__(self):
        return f"BlockRep({self.data!r})"


# -- sl2 ladders ------------------------------------------------------------


def _comm(a: Matrix, b: Matrix) -> Matrix:
    return a * b - b * a


class Sl2Triple:
    """An exact sl2 triple of square matrices; the relations are checked
    on construction."""

    __slots__ = ("e", "h", "f")

    def __init__(self, e: Matrix, h: Matrix, f: Matrix):
        if not (e.rows == e.cols == h.rows == h.cols == f.rows == f.cols):
            raise ValueError("sl2 triple needs square matrices of one size")
        if _comm(h, e) != e.scale(2):
            raise ValueError("[h, e] = 2e fails")
        if _comm(h, f) != f.scale(-2):
            raise ValueError("[h, f] = -2f fails")
        if _comm(e, f) != h:
            raise ValueError("[e, f] = h fails")
        self.e = e
        self.h = h
        self.f = f

    def __repr__(self):
        return f"Sl2Triple(dim={self.e.rows})"


def sl2_for_blocks(i: int, data: TypeAData) -> Sl2Triple:
    """The ladder triple on D_i': e shifts D_j^(k) down to D_j^(k-1) by
    the identity, f shifts up with scalar k(j - i - k), and [e, f] acts
    on D_j^(k) by j - i + 1 - 2k."""
    start, size, rel = data.d_part(i)
    if size == 0:
        raise ValueError(f"D_{i}' is zero dimensional")
    e = [[Fraction(0)] * size for _ in range(size)]
    f = [[Fraction(0)] * size for _ in range(size)]
    h = [[Fraction(0)] * size for _ in range(size)]
    pos = {key: (off, sz) for key, off, sz in rel}
    for key, off, sz in rel:
        _, j, k = key
        for t in range(sz):
            h[off + t][off + t] = Fraction(j - i + 1 - 2 * k)
        if k >= 2:
            up, _ = pos[("D", j, k - 1)]
            for t in range(sz):
                e[up + t][off + t] = Fraction(1)
        if k <= j - i - 1:
            down, _ = pos[("D", j, k + 1)]
            c = Fraction(k * (j - i - k))
            for t in range(sz):
                f[down + t][off + t] = c
    return Sl2Triple(Matrix(e), Matrix(h), Matrix(f))


# -- equation rows ----------------------------------------------------------


def _sl2_cached(data: TypeAData, i: int):
    key = ("sl2", i)
    if key not in data._cache:
        data._cache[key] = sl2_for_blocks(i, data)
    return data._cache[key]


def _equation_rows(data: TypeAData, A_t, B_t) -> list:
    """All defining equations of the transversal zero-moment locus as
    (grade, scalar) pairs in a fixed deterministic order.

    Moment rows at vertex m live in grade 2 + w(col) - w(row); the
    bracket rows of the D_i' relation live in grade w(col) - w(row).
    Every monomial of a row has total block grade equal to the row
    grade, so rows of grade s are affine in the grade-s free blocks once
    all lower grades are fixed.
    """
    n = data.n
    rows = []
    for m in range(1, n):
        mu = A_t[m - 1] * B_t[m - 1]
        if m <= n - 2:
            mu = mu - B_t[m] * A_t[m]
        offs, _ = data.offsets(m)
        for pk, po, ps in offs:
            wp = data.weight(m, pk)
            for qk, qo, qs in offs:
                grade = 2 + data.weight(m, qk) - wp
                for rr in range(ps):
                    for cc in range(qs):
                        rows.append((grade, mu.entries[po + rr][qo + cc]))
    for i in range(n - 1):
        start, size, rel = data.d_part(i)
        if size == 0:
            continue
        triple = _sl2_cached(data, i)
        prod = B_t[i] * A_t[i]
        idx = range(start, start + size)
        M = prod.submatrix(idx, idx) - triple.e
        K = M * triple.f - triple.f * M
        for pk, po, ps in rel:
            wp = data.weight(i, pk)
            for qk, qo, qs in rel:
                grade = data.weight(i, qk) - wp
                for rr in range(ps):
                    for cc in range(qs):
                        rows.append((grade, K.entries[po + rr][qo + cc]))
    return rows


def _matched_from_rep(data: TypeAData, x: QuiverRep) -> dict:
    out = {}
    for i in range(1, data.n - 1):
        out[("A", i)] = x.A[i - 1]
        out[("B", i)] = x.B[i - 1]
    for i in range(1, data.n):
        if data.d_of(i) > 0:
            out[("G", i)] = x.Gamma[i - 1]
            out[("D", i)] = x.Delta[i - 1]
    return out


def _check_x(data: TypeAData, x: QuiverRep):
    if x.fq != data.framed_quiver() or tuple(x.v) != data.v:
        raise ValueError("representation does not match this dimension data")


# -- verification -----------------------------------------------------------


def maffei_verify(x_tilde: BlockRep, x: QuiverRep = None) -> dict:
    """Itemized transversality and matching report.

    Sections: "vanishing" (all blocks forced to zero), "identity" (the
    degree-0 identity blocks), "transv_rel" (the sl2 bracket relation on
    each D_i'), "moment" (the expanded moment map vanishes), and
    "matching" (corners and first-column blocks agree with x; skipped
    when x is None).  Each section reports a checked count and the names
    of failing cells; "ok" is the conjunction.
    """
    data = x_tilde.data
    report = {
        "vanishing": {"checked": 0, "failures": []},
        "identity": {"checked": 0, "failures": []},
        "transv_rel": {"checked": 0, "failures": []},
        "moment": {"checked": 0, "failures": []},
        "matching": {"checked": 0, "failures": []},
    }
    matched = None
    if x is not None:
        _check_x(data, x)
        matched = _matched_from_rep(data, x)
    for i in range(data.n - 1):
        for side in ("A", "B"):
            for tgt, src in _iter_cells(data, side, i):
                cls_, ref = _classify(data, side, i, tgt, src)
                key = _cell_key(side, i, tgt, src)
                val = x_tilde.block(key)
                if cls_ == "zero":
                    report["vanishing"]["checked"] += 1
                    if not val.is_zero():
                        report["vanishing"]["failures"].append(_cell_name(key))
                elif cls_ == "id":
                    report["identity"]["checked"] += 1
                    if val != Matrix.identity(val.rows):
                        report["identity"]["failures"].append(_cell_name(key))
                elif cls_ == "matched" and matched is not None:
                    report["matching"]["checked"] += 1
                    if val != matched[ref]:
                        report["matching"]["failures"].append(_cell_name(key))
    for i in range(data.n - 1):
        start, size, rel = data.d_part(i)
        if size == 0:
            continue
        triple = _sl2_cached(data, i)
        prod = x_tilde.B_tilde[i] * x_tilde.A_tilde[i]
        idx = range(start, start + size)
        M = prod.submatrix(idx, idx) - triple.e
        report["transv_rel"]["checked"] += 1
        if not (M * triple.f - triple.f * M).is_zero():
            report["transv_rel"]["failures"].append(f"bracket at vertex {i}")
    mu = moment_map(x_tilde.as_quiver_rep())
    for iv, m in enumerate(mu):
        report["moment"]["checked"] += 1
        if not m.is_zero():
            report["moment"]["failures"].append(f"vertex {iv + 1}")
    report["ok"] = all(not sec["failures"] for sec in report.values() if isinstance(sec, dict))
    return report


# -- the staged lift --------------------------------------------------------


def _split_jet(x):
    if isinstance(x, Jet):
        return x.value, x.derivative
    return x, Fraction(0)


def _linear_solve(columns: list, rhs: list) -> list:
    """Solve sum_t columns[t] * u_t = rhs exactly, free variables 0.

    Jet-valued systems are solved by splitting into value and derivative
    parts; the value part of the coefficient matrix is shared, so the
    pivot structure is consistent between the two passes.
    """
    nrows = len(rhs)
    has_jet = any(isinstance(e, Jet) for e in rhs) or any(
        isinstance(e, Jet) for col in columns for e in col
    )
    if not has_jet:
        M = Matrix.from_columns(columns, rows=nrows)
        sol = M.solve(Matrix.column(rhs))
        return [sol.entries[t][0] for t in range(sol.rows)]
    col0, col1, b0, b1 = [], [], [], []
    for col in columns:
        parts = [_split_jet(e) for e in col]
        col0.append([p[0] for p in parts])
        col1.append([p[1] for p in parts])
    for e in rhs:
        v, dv = _split_jet(e)
        b0.append(v)
        b1.append(dv)
    M0 = Matrix.from_columns(col0, rows=nrows)
    M1 = Matrix.from_columns(col1, rows=nrows)
    u0 = M0.solve(Matrix.column(b0))
    corr = Matrix.column(b1) - M1 * u0
    u1 = M0.solve(corr)
    return [
        Jet(u0.entries[t][0], u1.entries[t][0]) for t in range(u0.rows)
    ]


def maffei_lift(x: QuiverRep, data: TypeAData) -> BlockRep:
    """The unique transversal expanded point matching x on the corner and
    first-column blocks.

    Free blocks are solved stage by stage in increasing scaling grade;
    at each stage the equation rows of that grade are affine-linear in
    the stage's blocks with everything of lower grade already fixed.
    Each stage is re-solved with reversed variable and row order as a
    uniqueness probe, the full residual is checked afterwards, and the
    result must pass maffei_verify.
    """
    _check_x(data, x)
    if any(not m.is_zero() for m in moment_map(x)):
        raise PreconditionMomentMap("the input is not on the zero moment fiber")
    matched = _matched_from_rep(data, x)

    free_info = []
    for i in range(data.n - 1):
        for side in ("A", "B"):
            for tgt, src in _iter_cells(data, side, i):
                cls_, key = _classify(data, side, i, tgt, src)
                if cls_ != "free":
                    continue
                stage = _stage_of(data, side, i, tgt, src)
                free_info.append((key, stage, data.dim_of(tgt), data.dim_of(src)))
    free = {key: [[Fraction(0)] * cols for _ in range(rows)] for key, _, rows, cols in free_info}

    def assemble():
        A_t, B_t = [], []
        for i in range(data.n - 1):
            for side, dest in (("A", A_t), ("B", B_t)):
                grid = []
                for tgt, _, tsz in data.offsets(i + 1 if side == "A" else i)[0]:
                    row = []
                    for src, _, ssz in data.offsets(i if side == "A" else i + 1)[0]:
                        cls_, ref = _classify(data, side, i, tgt, src)
                        if cls_ == "zero":
                            row.append(Matrix.zero(tsz, ssz))
                        elif cls_ == "id":
                            row.append(Matrix.identity(tsz))
                        elif cls_ == "matched":
                            row.append(matched[ref])
                        else:
                            row.append(Matrix(free[ref]))
                    grid.append(row)
                dest.append(Matrix.block(grid))
        return A_t, B_t

    def residual():
        A_t, B_t = assemble()
        return _equation_rows(data, A_t, B_t)

    stages = sorted({stage for _, stage, _, _ in free_info})
    for stage in stages:
        cells = [
            (key, r, c)
            for key, s, rows, cols in free_info
            if s == stage
            for r in range(rows)
            for c in range(cols)
        ]
        if not cells:
            continue

        def solve_stage(reverse: bool):
            order = list(reversed(cells)) if reverse else cells
            base = residual()
            row_idx = [k for k, (g, _) in enumerate(base) if g == stage]
            if reverse:
                row_idx = list(reversed(row_idx))
            if not row_idx:
                return {cell: Fraction(0) for cell in order}
            rhs = [-base[k][1] for k in row_idx]
            columns = []
            for key, r, c in order:
                free[key][r][c] = Fraction(1)
                plus = residual()
                free[key][r][c] = Fraction(-1)
                minus = residual()
                free[key][r][c] = Fraction(0)
                columns.append(
                    [(plus[k][1] - minus[k][1]) * _HALF for k in row_idx]
                )
            try:
                sol = _linear_solve(columns, rhs)
            except NoSolution as exc:
                raise LiftInconsistent(
                    f"stage {stage} equations are inconsistent: {exc}"
                ) from exc
            return dict(zip(order, sol))

        sol = solve_stage(False)
        probe = solve_stage(True)
        if any(
            not _scalars_equal(sol[cell], probe[cell]) for cell in cells
        ):
            raise LiftInconsistent(f"stage {stage} solution is not unique")
        for (key, r, c), val in sol.items():
            free[key][r][c] = val

    leftover = [g for g, val in residual() if not _scalar_zero(val)]
    if leftover:
        raise LiftInconsistent(
            f"nonzero residual in grades {sorted(set(leftover))} after all stages"
        )
    A_t, B_t = assemble()
    out = BlockRep(data, A_t, B_t)
    report = maffei_verify(out, x)
    if not report["ok"]:
        bad = {k: v["failures"] for k, v in report.items() if isinstance(v, dict) and v["failures"]}
        raise LiftInconsistent(f"post-verification failed: {bad}")
    return out


def _scalar_zero(x) -> bool:
    if isinstance(x, Jet):
        return x.is_zero()
    return x == 0


def _scalars_equal(a, b) -> bool:
    return _scalar_zero(a - b) if isinstance(a, Jet) or isinstance(b, Jet) else a == b


# -- the e = 0 flag correspondence ------------------------------------------


def flag_iso_e0(x: QuiverRep, data: TypeAData) -> tuple:
    """The nilpotent endomorphism Delta_1 Gamma_1 of K^N together with its
    kernel flag F_i = ker(A_{i-1} ... A_1 Gamma_1).

    Only meaningful for d = (N, 0, ..., 0) data.  Semistability of x is
    exactly what makes every F_i have dimension N - v_i; a mismatch
    raises FlagDimensionMismatch.  The flag is returned as one column
    basis matrix per step and satisfies endo * F_i <= F_{i-1}.
    """
    if data.d[0] != data.N or any(dj != 0 for dj in data.d[1:]):
        raise ValueError("flag correspondence needs d = (N, 0, ..., 0) data")
    _check_x(data, x)
    if any(not m.is_zero() for m in moment_map(x)):
        raise PreconditionMomentMap("the input is not on the zero moment fiber")
    N = data.N
    endo = x.Delta[0] * x.Gamma[0]
    flags = []
    K = x.Gamma[0]
    for i in range(1, data.n):
        ker = K.kernel()
        want = N - data.v_of(i)
        if len(ker) != want:
            raise FlagDimensionMismatch(
                f"ker at step {i} has dimension {len(ker)}, expected {want} "
                "(the point is not semistable)"
            )
        flags.append(Matrix.hcat(ker) if ker else Matrix.zero(N, 0))
        if i <= data.n - 2:
            K = x.A[i - 1] * K
    prev = Matrix.zero(N, 0)
    for i, F in enumerate(list(flags) + [Matrix.identity(N)], start=1):
        img = endo * F
        for c in range(img.cols):
            col = Matrix.column(list(img.col(c)))
            if prev.cols == 0:
                ok = col.is_zero()
            else:
                try:
                    prev.solve(col)
                    ok = True
                except NoSolution:
                    ok = False
            if not ok:
                raise FlagDimensionMismatch(
                    f"endomorphism does not map step {i} into step {i - 1}"
                )
        prev = F
    power = Matrix.identity(N)
    for _ in range(data.n):
        power = power * endo
    if not power.is_zero():
        raise FlagDimensionMismatch("endomorphism is not nilpotent of the flag length")
    return endo, flags


# -- symplectic pullback ----------------------------------------------------


def _form_original(data: TypeAData, v1: QuiverRep, v2: QuiverRep):
    """beta(v1, v2) = sum tr(B_i^1 A_i^2) + sum tr(Delta_i^1 Gamma_i^2)
    on derivative parts."""
    total = Fraction(0)
    for k in range(data.n - 2):
        b1 = v1.B[k].jet_parts()[1]
        a2 = v2.A[k].jet_parts()[1]
        total = total + (b1 * a2).trace()
    for i in range(data.n - 1):
        d1 = v1.Delta[i].jet_parts()[1]
        g2 = v2.Gamma[i].jet_parts()[1]
        total = total + (d1 * g2).trace()
    return total


def _form_expanded(b1: BlockRep, b2: BlockRep):
    total = Fraction(0)
    for i in range(b1.data.n - 1):
        bb = b1.B_tilde[i].jet_parts()[1]
        aa = b2.A_tilde[i].jet_parts()[1]
        total = total + (bb * aa).trace()
    return total


def _pullback_pair(data: TypeAData, v1: QuiverRep, v2: QuiverRep) -> tuple:
    """(expanded form, original form) of a pair of Jet-valued points; the
    derivative parts are the tangent vectors being compared."""
    lift1 = maffei_lift(v1, data)
    lift2 = maffei_lift(v2, data)
    return _form_expanded(lift1, lift2), _form_original(data, v1, v2)


def symplectic_pullback_check(
    x: QuiverRep, data: TypeAData, trials: int, seed: int = 20406
) -> bool:
    """Whether the lift pulls the expanded pairing back to the original
    one on sampled tangent pairs at x, exactly."""
    _check_x(data, x)
    if any(not m.is_zero() for m in moment_map(x)):
        raise PreconditionMomentMap("the input is not on the zero moment fiber")
    rng = random.Random(seed)
    for _ in range(trials):
        v1 = sample_tangent(x, rng.randrange(1 << 30))
        v2 = sample_tangent(x, rng.randrange(1 << 30))
        lhs, rhs = _pullback_pair(data, v1, v2)
        if lhs != rhs:
            return False
    return True


# -- scaling equivariance ---------------------------------------------------


def kazhdan_action_check(x_tilde: BlockRep, data: TypeAData, t) -> bool:
    """Apply the combined scaling action (global t^{-1} times the weight
    torus) and check the result is transversal with every matched-position
    block scaled by exactly t^{-1}."""
    if x_tilde.data != data:
        raise ValueError("block data does not match")
    t = Fraction(t)
    if t == 0:
        raise ValueError("t must be invertible")
    blocks = {}
    matched_keys = []
    for i in range(data.n - 1):
        for side in ("A", "B"):
            for tgt, src in _iter_cells(data, side, i):
                key = _cell_key(side, i, tgt, src)
                stage = _stage_of(data, side, i, tgt, src)
                blocks[key] = x_tilde.block(key).scale(t ** (-stage))
                if _classify(data, side, i, tgt, src)[0] == "matched":
                    matched_keys.append(key)
    scaled = BlockRep.from_blocks(data, blocks)
    report = maffei_verify(scaled, None)
    if not report["ok"]:
        return False
    inv = Fraction(1) / t
    for key in matched_keys:
        if scaled.block(key) != x_tilde.block(key).scale(inv):
            return False
    return True


# -- Slodowy slices ---------------------------------------------------------


class SlodowySlice:
    """e + ker ad(f) for the standard Jordan-basis sl2 triple of a
    nilpotent of the given Jordan type, with the positive grading that
    assigns degree 2 - w to a slice direction of ad(h)-weight w."""

    __slots__ = ("N", "jordan_type", "triple", "slice_basis", "kazhdan_degrees")

    def __init__(self, N, jordan_type, triple, slice_basis, kazhdan_degrees):
        self.N = N
        self.jordan_type = jordan_type
        self.triple = triple
        self.slice_basis = slice_basis
        self.kazhdan_degrees = kazhdan_degrees

    @property
    def e(self) -> Matrix:
        return self.triple.e

    @property
    def h(self) -> Matrix:
        return self.triple.h

    @property
    def f(self) -> Matrix:
        return self.triple.f

    def dim(self) -> int:
        return len(self.slice_basis)

    def __repr__(self):
        return f"SlodowySlice(N={self.N}, type={self.jordan_type})"


def _dual_partition(parts) -> list:
    if not parts:
        return []
    return [sum(1 for p in parts if p >= j) for j in range(1, parts[0] + 1)]


def slodowy_slice(N: int, jordan_type: Sequence[int]) -> SlodowySlice:
    """The slice through the nilpotent of the given Jordan type in gl_N.

    The triple uses the Jordan basis normalization (e the Jordan form,
    f the weighted transpose ladder); ker ad(f) is computed weight by
    weight, so every basis element is an ad(h)-weight vector and its
    Kazhdan degree 2 - w is well defined.  The slice dimension always
    equals the sum of squares of the dual partition.
    """
    try:
        parts = tuple(sorted((int(p) for p in jordan_type), reverse=True))
    except (TypeError, ValueError) as exc:
        raise InvalidPartition(f"not a partition: {jordan_type!r}") from exc
    if not parts or any(p <= 0 for p in parts):
        raise InvalidPartition(f"parts must be positive, got {jordan_type!r}")
    if sum(parts) != N:
        raise InvalidPartition(f"{jordan_type!r} does not sum to {N}")
    e = [[Fraction(0)] * N for _ in range(N)]
    f = [[Fraction(0)] * N for _ in range(N)]
    hdiag = []
    offset = 0
    for m in parts:
        for t in range(m):
            hdiag.append(m - 1 - 2 * t)
            if t >= 1:
                e[offset + t - 1][offset + t] = Fraction(1)
            if t <= m - 2:
                f[offset + t + 1][offset + t] = Fraction((t + 1) * (m - 1 - t))
        offset += m
    triple = Sl2Triple(Matrix(e), Matrix.diag([Fraction(w) for w in hdiag]), Matrix(f))
    fmat = triple.f

    by_weight = {}
    for p in range(N):
        for q in range(N):
            by_weight.setdefault(hdiag[p] - hdiag[q], []).append((p, q))
    basis, degrees = [], []
    for w in sorted(by_weight, reverse=True):
        src = by_weight[w]
        tgt = by_weight.get(w - 2, [])
        tgt_index = {pair: k for k, pair in enumerate(tgt)}
        # ad(f) E_pq = f E_pq - E_pq f lands entirely in weight w - 2
        cols = []
        for p, q in src:
            col = [Fraction(0)] * len(tgt)
            for a in range(N):
                if fmat.entries[a][p] != 0:
                    col[tgt_index[(a, q)]] += fmat.entries[a][p]
            for b in range(N):
                if fmat.entries[q][b] != 0:
                    col[tgt_index[(p, b)]] -= fmat.entries[q][b]
            cols.append(col)
        if tgt:
            kernel = Matrix.from_columns(cols, rows=len(tgt)).kernel()
        else:
            kernel = [
                Matrix.column([Fraction(1 if k == t else 0) for k in range(len(src))])
                for t in range(len(src))
            ]
        for vec in kernel:
            entries = [[Fraction(0)] * N for _ in range(N)]
            for t, (p, q) in enumerate(src):
                entries[p][q] = vec.entries[t][0]
            z = Matrix(entries)
            if not _comm(fmat, z).is_zero():
                raise DomainError("weight-graded kernel produced a non-commutant")
            basis.append(z)
            degrees.append(2 - w)
    expected = sum(c * c for c in _dual_partition(parts))
    if len(basis) != expected:
        raise DomainError(
            f"slice dimension {len(basis)} disagrees with the dual-partition "
            f"count {expected}"
        )
    return SlodowySlice(N, parts, triple, basis, tuple(degrees))
