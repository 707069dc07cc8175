"""Framed doubled quivers and their exact representation spaces.

A representation point carries matrices A_a (along each arrow), B_a (along
the reverse arrow), and framing pairs Gamma_i, Delta_i.  The moment map at
vertex i is

    mu_i = sum_{a: head(a)=i} A_a B_a - sum_{a: tail(a)=i} B_a A_a
           + Gamma_i Delta_i,

valued in square matrices of size v_i.  All arithmetic is exact; sampling
routines draw integer data from a seeded generator so results are
reproducible byte for byte.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .scalars import (
    DomainError,
    Jet,
    Matrix,
    NoSolution,
    scalar_from_json,
    scalar_is_zero,
    _frac,
)


class SampleFailed(DomainError):
    """The seeded sampler could only produce the excluded zero solution."""


class NotReflectable(DomainError):
    """The reflection functor is not defined at this vertex for this
    point."""


class Quiver:
    """A finite quiver: ``vertex_count`` vertices and a list of arrows
    (tail, head)."""

    __slots__ = ("vertex_count", "arrows")

    def __init__(self, vertex_count: int, arrows: Sequence):
        if not isinstance(vertex_count, int) or vertex_count < 0:
            raise ValueError(f"bad vertex count {vertex_count!r}")
        arrows = [tuple(a) for a in arrows]
        for a in arrows:
            if len(a) != 2 or not all(isinstance(x, int) for x in a):
                raise ValueError(f"arrow must be a (tail, head) pair, got {a!r}")
            if not all(0 <= x < vertex_count for x in a):
                raise ValueError(f"arrow {a} out of range for {vertex_count} vertices")
        self.vertex_count = vertex_count
        self.arrows = tuple(arrows)

    def edge_multiplicity(self, i: int, j: int) -> int:
        """Number of arrows between i and j in either direction (loops count
        once)."""
        if i == j:
            return sum(1 for t, h in self.arrows if t == h == i)
        return sum(
            1 for t, h in self.arrows if (t, h) in ((i, j), (j, i))
        )

    def has_loop_at(self, i: int) -> bool:
        return any(t == h == i for t, h in self.arrows)

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return True
        seen = {0}
        frontier = [0]
        adj = {i: set() for i in range(self.vertex_count)}
        for t, h in self.arrows:
            adj[t].add(h)
            adj[h].add(t)
        while frontier:
            cur = frontier.pop()
            for nxt in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return len(seen) == self.vertex_count

    def to_json(self):
        return {"vertices": self.vertex_count, "arrows": [list(a) for a in self.arrows]}

    @classmethod
    def from_json(cls, obj) -> "Quiver":
        if not isinstance(obj, dict) or "vertices" not in obj or "arrows" not in obj:
            raise ValueError("quiver JSON needs 'vertices' and 'arrows'")
        return cls(obj["vertices"], obj["arrows"])

    def __eq__(self, other):
        return (
            isinstance(other, Quiver)
            and self.vertex_count == other.vertex_count
            and self.arrows == other.arrows
        )

    __hash__ = None

    def __repr__(self):
        return f"Quiver({self.vertex_count}, {list(self.arrows)})"


def dim_vector(v, n: int) -> tuple:
    """Validate a dimension vector of length n (nonnegative integers)."""
    v = tuple(v)
    if len(v) != n:
        raise ValueError(f"dimension vector has length {len(v)}, expected {n}")
    for x in v:
        if not isinstance(x, int) or x < 0:
            raise ValueError(f"dimension entries must be nonnegative integers: {v}")
    return v


class FramedQuiver:
    """A quiver together with a framing dimension vector d."""

    __slots__ = ("base", "framing")

    def __init__(self, base: Quiver, framing: Sequence[int]):
        if not isinstance(base, Quiver):
            raise ValueError("base must be a Quiver")
        self.base = base
        self.framing = dim_vector(framing, base.vertex_count)

    def to_json(self):
        obj = self.base.to_json()
        obj["framing"] = list(self.framing)
        return obj

    @classmethod
    def from_json(cls, obj) -> "FramedQuiver":
        base = Quiver.from_json(obj)
        framing = obj.get("framing", [0] * base.vertex_count)
        return cls(base, framing)

    def expand(self, v: Sequence[int]):
        """The expanded quiver Q^w with one extra vertex s carrying the
        framing.

        Each framing slot at vertex i becomes d_i parallel arrows i -> s.
        Returns (expanded quiver, expanded dimension vector (v, 1)).
        """
        v = dim_vector(v, self.base.vertex_count)
        n = self.base.vertex_count
        arrows = list(self.base.arrows)
        for i, d in enumerate(self.framing):
            arrows.extend([(i, n)] * d)
        return Quiver(n + 1, arrows), v + (1,)

    def __eq__(self, other):
        if not isinstance(other, FramedQuiver):
            return NotImplemented
        return self.base == other.base and self.framing == other.framing

    __hash__ = None

    def __repr__(self):
        return f"FramedQuiver({self.base!r}, {list(self.framing)})"


class CharacterTheta:
    """An integer stability character, paired with dimension vectors by the
    dot product."""

    __slots__ = ("coords",)

    def __init__(self, coords: Sequence[int]):
        coords = tuple(coords)
        if not all(isinstance(c, int) for c in coords):
            raise ValueError("theta coordinates must be integers")
        self.coords = coords

    def dot(self, v: Sequence) -> Fraction:
        v = tuple(v)
        if len(v) != len(self.coords):
            raise ValueError("length mismatch in theta pairing")
        return sum((Fraction(c) * x for c, x in zip(self.coords, v)), Fraction(0))

    def __repr__(self):
        return f"CharacterTheta({list(self.coords)})"


class QuiverRep:
    """A point of the framed doubled representation space.

    A[k] flows along arrow k, B[k] along its reverse; Gamma[i] maps the
    framing space into V_i and Delta[i] maps back out.
    """

    __slots__ = ("fq", "v", "A", "B", "Gamma", "Delta")

    def __init__(self, fq: FramedQuiver, v: Sequence[int], A, B, Gamma, Delta):
        if not isinstance(fq, FramedQuiver):
            raise ValueError("fq must be a FramedQuiver")
        self.fq = fq
        self.v = dim_vector(v, fq.base.vertex_count)
        arrows = fq.base.arrows
        if len(A) != len(arrows) or len(B) != len(arrows):
            raise ValueError("need one A and one B matrix per arrow")
        n = fq.base.vertex_count
        if len(Gamma) != n or len(Delta) != n:
            raise ValueError("need one Gamma and one Delta matrix per vertex")
        for k, (t, h) in enumerate(arrows):
            _expect_shape(A[k], self.v[h], self.v[t], f"A[{k}]")
            _expect_shape(B[k], self.v[t], self.v[h], f"B[{k}]")
        for i in range(n):
            _expect_shape(Gamma[i], self.v[i], fq.framing[i], f"Gamma[{i}]")
            _expect_shape(Delta[i], fq.framing[i], self.v[i], f"Delta[{i}]")
        self.A = tuple(A)
        self.B = tuple(B)
        self.Gamma = tuple(Gamma)
        self.Delta = tuple(Delta)

    @classmethod
    def zero(cls, fq: FramedQuiver, v: Sequence[int]) -> "QuiverRep":
        v = dim_vector(v, fq.base.vertex_count)
        A = [Matrix.zero(v[h], v[t]) for t, h in fq.base.arrows]
        B = [Matrix.zero(v[t], v[h]) for t, h in fq.base.arrows]
        G = [Matrix.zero(v[i], fq.framing[i]) for i in range(fq.base.vertex_count)]
        D = [Matrix.zero(fq.framing[i], v[i]) for i in range(fq.base.vertex_count)]
        return cls(fq, v, A, B, G, D)

    def components(self):
        """All matrices with addressing keys, in a fixed order."""
        out = []
        for k in range(len(self.fq.base.arrows)):
            out.append((("A", k), self.A[k]))
        for k in range(len(self.fq.base.arrows)):
            out.append((("B", k), self.B[k]))
        for i in range(self.fq.base.vertex_count):
            out.append((("G", i), self.Gamma[i]))
        for i in range(self.fq.base.vertex_count):
            out.append((("D", i), self.Delta[i]))
        return out

    def replace(self, updates: dict) -> "QuiverRep":
        """Copy with some components replaced; keys as in
        ``components``."""
        A = list(self.A)
        B = list(self.B)
        G = list(self.Gamma)
        D = list(self.Delta)
        for (kind, idx), mat in updates.items():
            {"A": A, "B": B, "G": G, "D": D}[kind][idx] = mat
        return QuiverRep(self.fq, self.v, A, B, G, D)

    def to_json(self):
        return {
            "quiver": self.fq.to_json(),
            "v": list(self.v),
            "A": [m.to_json() for m in self.A],
            "B": [m.to_json() for m in self.B],
            "Gamma": [m.to_json() for m in self.Gamma],
            "Delta": [m.to_json() for m in self.Delta],
        }

    @classmethod
    def from_json(cls, obj) -> "QuiverRep":
        fq = FramedQuiver.from_json(obj["quiver"])
        v = dim_vector(obj["v"], fq.base.vertex_count)
        arrows = fq.base.arrows

        def mat(data, rows, cols):
            if not data or not data[0]:
                m = Matrix.zero(rows, cols)
                if (len(data) if data else 0) not in (rows, 0):
                    raise ValueError("matrix JSON shape mismatch")
                return m
            return Matrix([[scalar_from_json(e) for e in row] for row in data])

        A = [mat(obj["A"][k], v[h], v[t]) for k, (t, h) in enumerate(arrows)]
        B = [mat(obj["B"][k], v[t], v[h]) for k, (t, h) in enumerate(arrows)]
        G = [mat(obj["Gamma"][i], v[i], fq.framing[i]) for i in range(len(v))]
        D = [mat(obj["Delta"][i], fq.framing[i], v[i]) for i in range(len(v))]
        return cls(fq, v, A, B, G, D)


def _expect_shape(m, rows, cols, name):
    if not isinstance(m, Matrix):
        raise ValueError(f"{name} must be a Matrix")
    if m.rows != rows or m.cols != cols:
        raise ValueError(f"{name} must be {rows}x{cols}, got {m.rows}x{m.cols}")


def moment_map(rep: QuiverRep) -> list:
    """The list of moment map values mu_i(rep), one square matrix per
    vertex."""
    fq = rep.fq
    out = [Matrix.zero(rep.v[i], rep.v[i]) for i in range(fq.base.vertex_count)]
    for k, (t, h) in enumerate(fq.base.arrows):
        out[h] = out[h] + rep.A[k] * rep.B[k]
        out[t] = out[t] - rep.B[k] * rep.A[k]
    for i in range(fq.base.vertex_count):
        out[i] = out[i] + rep.Gamma[i] * rep.Delta[i]
    return out


def moment_is(rep: QuiverRep, chi: Sequence) -> bool:
    """Whether mu_i(rep) = chi_i * id for every vertex."""
    mu = moment_map(rep)
    chi = list(chi)
    if len(chi) != rep.fq.base.vertex_count:
        raise ValueError("chi has the wrong length")
    for i, m in enumerate(mu):
        if m != Matrix.identity(rep.v[i]).scale(_frac(chi[i])):
            return False
    return True


# -- sampling ------------------------------------------------------------


def _coordinate_slots(rep: QuiverRep, kinds: str):
    """Flat list of (key, row, col) coordinate addresses for the chosen
    component kinds."""
    slots = []
    for key, mat in rep.components():
        if key[0] not in kinds:
            continue
        for r in range(mat.rows):
            for c in range(mat.cols):
                slots.append((key, r, c))
    return slots


def _rep_from_coords(base: QuiverRep, kinds: str, values) -> QuiverRep:
    """Rebuild a rep, overwriting the coordinates of the chosen kinds with
    given values."""
    updates = {}
    it = iter(values)
    for key, mat in base.components():
        if key[0] not in kinds:
            continue
        rows = [list(r) for r in mat.entries]
        for r in range(mat.rows):
            for c in range(mat.cols):
                rows[r][c] = next(it)
        updates[key] = Matrix(rows) if rows else Matrix.zero(mat.rows, mat.cols)
    return base.replace(updates)


def _flatten_moment(mu) -> list:
    out = []
    for m in mu:
        for row in m.entries:
            out.extend(row)
    return out


def sample_fiber(
    fq: FramedQuiver,
    v: Sequence[int],
    seed: int,
    chi: Sequence = None,
    require_nonzero: bool = True,
) -> QuiverRep:
    """A seeded exact point of the moment fiber mu = chi (default chi = 0).

    (A, Gamma) entries are nonzero seeded integers; with them fixed, mu is
    linear in (B, Delta), so the fiber is cut out by an inhomogeneous linear
    system: a particular solution plus a seeded integer combination of the
    kernel.  Raises SampleFailed when the system is inconsistent for the
    sampled (A, Gamma), or when it forces (B, Delta) = 0 and a nonzero
    sample was requested.
    """
    n = fq.base.vertex_count
    chi = [Fraction(0)] * n if chi is None else [_frac(c) for c in chi]
    if len(chi) != n:
        raise ValueError("chi has the wrong length")
    rng = random.Random(seed)
    zero = QuiverRep.zero(fq, v)
    ag_slots = _coordinate_slots(zero, "AG")
    ag_values = [
        Fraction(rng.choice([1, 2, 3, 4, 5]) * rng.choice([-1, 1])) for _ in ag_slots
    ]
    fixed = _rep_from_coords(zero, "AG", ag_values)

    target = _flatten_moment(
        [Matrix.identity(v_i).scale(chi[i]) for i, v_i in enumerate(fixed.v)]
    )
    bd_slots = _coordinate_slots(fixed, "BD")
    columns = []
    for idx in range(len(bd_slots)):
        unit = [Fraction(1) if k == idx else Fraction(0) for k in range(len(bd_slots))]
        probe = _rep_from_coords(fixed, "BD", unit)
        columns.append(_flatten_moment(moment_map(probe)))
    if not bd_slots:
        if any(t != 0 for t in target):
            raise SampleFailed("no (B, Delta) coordinates, but chi is nonzero")
        if require_nonzero:
            raise SampleFailed("there are no (B, Delta) coordinates to sample")
        return fixed
    system = Matrix.from_columns(columns, rows=len(target))
    try:
        particular = system.solve(Matrix.column(target))
    except NoSolution:
        raise SampleFailed("the mu = chi system is inconsistent for this seed")
    kernel = system.kernel()
    if not kernel:
        values = [particular.entries[k][0] for k in range(len(bd_slots))]
        out = _rep_from_coords(fixed, "BD", values)
        if require_nonzero and all(val == 0 for val in values):
            raise SampleFailed("mu = chi forces (B, Delta) = 0 at this dimension")
        if not moment_is(out, chi):
            raise AssertionError("particular solution left the fiber")
        return out
    for _ in range(16):
        coeffs = [Fraction(rng.randint(-3, 3)) for _ in kernel]
        combo = particular
        for c, vec in zip(coeffs, kernel):
            combo = combo + vec.scale(c)
        if not combo.is_zero() or not require_nonzero:
            values = [combo.entries[k][0] for k in range(len(bd_slots))]
            out = _rep_from_coords(fixed, "BD", values)
            if not moment_is(out, chi):
                raise AssertionError("kernel combination left the fiber")
            return out
    raise SampleFailed("seeded combinations kept hitting zero")


def sample_lambda0(
    fq: FramedQuiver,
    v: Sequence[int],
    seed: int,
    require_nonzero: bool = True,
) -> QuiverRep:
    """A seeded exact point of the zero moment fiber Lambda_0.

    The chi = 0 case of sample_fiber: (A, Gamma) from a seeded integer
    stream, (B, Delta) a seeded combination of the kernel of the linear
    system mu = 0.
    """
    return sample_fiber(fq, v, seed, chi=None, require_nonzero=require_nonzero)


def moment_differential_kernel(rep: QuiverRep) -> list:
    """Kernel basis of the moment map differential at rep, one flat
    coordinate vector per basis element (coordinates over all of A, B,
    Gamma, Delta)."""
    slots = _coordinate_slots(rep, "ABGD")
    base_mu = _flatten_moment(moment_map(rep))
    zero = QuiverRep.zero(rep.fq, rep.v)
    columns = []
    for idx in range(len(slots)):
        unit = [Fraction(1) if k == idx else Fraction(0) for k in range(len(slots))]
        probe_dir = _rep_from_coords(zero, "ABGD", unit)
        shifted = _add_reps(rep, probe_dir)
        mu_shift = _flatten_moment(moment_map(shifted))
        mu_dir = _flatten_moment(moment_map(probe_dir))
        # mu is quadratic, so the differential column is
        # mu(x + e) - mu(x) - mu(e).
        columns.append(
            [s - b - d for s, b, d in zip(mu_shift, base_mu, mu_dir)]
        )
    if not slots:
        return []
    return Matrix.from_columns(columns).kernel()


def _add_reps(x: QuiverRep, y: QuiverRep) -> QuiverRep:
    updates = {}
    ymap = dict(y.components())
    for key, mat in x.components():
        updates[key] = mat + ymap[key]
    return x.replace(updates)


def sample_tangent(rep: QuiverRep, seed: int) -> QuiverRep:
    """A Jet-valued rep x + eps*xi with xi a seeded nonzero tangent vector
    at x."""
    kernel = moment_differential_kernel(rep)
    if not kernel:
        raise SampleFailed("the tangent space at this point is zero")
    rng = random.Random(seed)
    for _ in range(16):
        coeffs = [Fraction(rng.randint(-3, 3)) for _ in kernel]
        combo = None
        for c, vec in zip(coeffs, kernel):
            term = vec.scale(c)
            combo = term if combo is None else combo + term
        if combo is not None and not combo.is_zero():
            flat = [combo.entries[k][0] for k in range(combo.rows)]
            slots = _coordinate_slots(rep, "ABGD")
            values = []
            it = iter(flat)
            for key, mat in rep.components():
                for r in range(mat.rows):
                    for c in range(mat.cols):
                        values.append(Jet(mat.entries[r][c], next(it)))
            return _rep_from_coords(rep, "ABGD", values)
    raise SampleFailed("seeded tangent combinations kept hitting zero")


# -- semistability --------------------------------------------------------


def _column_space_basis(m: Matrix) -> Matrix:
    """Deterministic basis of the column space, as a matrix of columns."""
    if m.cols == 0:
        return m
    work, pivots = m.transpose()._echelon()
    rows = [work[i] for i in range(len(pivots))]
    if not rows:
        return Matrix.zero(m.rows, 0)
    return Matrix(rows).transpose()


def _intersect(u: Matrix, w: Matrix) -> Matrix:
    """Basis of span(u) intersect span(w); u, w are column-span
    matrices."""
    if u.cols == 0 or w.cols == 0:
        return Matrix.zero(u.rows, 0)
    stacked = Matrix.hcat([u, w])
    vecs = []
    for k in stacked.kernel():
        coeffs = [k.entries[i][0] for i in range(u.cols)]
        vecs.append(u * Matrix.column(coeffs))
    if not vecs:
        return Matrix.zero(u.rows, 0)
    return _column_space_basis(Matrix.hcat(vecs))


def _preimage(a: Matrix, w: Matrix) -> Matrix:
    """Basis of {u : a*u in span(w)}."""
    if a.cols == 0:
        return Matrix.zero(0, 0)
    if w.cols == 0:
        ker = a.kernel()
        if not ker:
            return Matrix.zero(a.cols, 0)
        return Matrix.hcat(ker)
    stacked = Matrix.hcat([a, w])
    vecs = []
    for k in stacked.kernel():
        top = [k.entries[i][0] for i in range(a.cols)]
        vecs.append(Matrix.column(top))
    if not vecs:
        return Matrix.zero(a.cols, 0)
    return _column_space_basis(Matrix.hcat(vecs))


def is_semistable_det(rep: QuiverRep) -> bool:
    """Semistability for the determinant character theta = prod det^(-1).

    The point is semistable exactly when no nonzero subspace family of
    ker Delta is invariant under all A_a and B_a.  The maximal such family
    is computed by saturating downward to a fixed point.
    """
    fq = rep.fq
    n = fq.base.vertex_count
    spaces = []
    for i in range(n):
        ker = rep.Delta[i].kernel()
        spaces.append(
            Matrix.hcat(ker) if ker else Matrix.zero(rep.v[i], 0)
        )
    while True:
        dims = [s.cols for s in spaces]
        for k, (t, h) in enumerate(fq.base.arrows):
            spaces[t] = _intersect(spaces[t], _preimage(rep.A[k], spaces[h]))
            spaces[h] = _intersect(spaces[h], _preimage(rep.B[k], spaces[t]))
        if [s.cols for s in spaces] == dims:
            break
    return all(s.cols == 0 for s in spaces)


# -- trace invariants ------------------------------------------------------


def _parse_token(token):
    if isinstance(token, str):
        if len(token) < 2 or token[0] not in "ABGD":
            raise ValueError(f"bad path token {token!r}")
        return (token[0], int(token[1:]))
    kind, idx = token
    if kind not in "ABGD":
        raise ValueError(f"bad path token {token!r}")
    return (kind, int(idx))


def _token_matrix(rep: QuiverRep, token):
    kind, idx = token
    arrows = rep.fq.base.arrows
    if kind in "AB":
        if not 0 <= idx < len(arrows):
            raise ValueError(f"arrow index {idx} out of range")
        t, h = arrows[idx]
        if kind == "A":
            return rep.A[idx], ("v", t), ("v", h)
        return rep.B[idx], ("v", h), ("v", t)
    if not 0 <= idx < rep.fq.base.vertex_count:
        raise ValueError(f"vertex index {idx} out of range")
    if kind == "G":
        return rep.Gamma[idx], ("f", idx), ("v", idx)
    return rep.Delta[idx], ("v", idx), ("f", idx)


def trace_invariant(rep: QuiverRep, path: Sequence):
    """Trace of the matrix product along a cyclic path of doubled-arrow
    tokens.

    Tokens: ("A", k) / "Ak" for arrow k, ("B", k) for its reverse,
    ("G", i) / ("D", i) for the framing pair at vertex i.  The rightmost
    token acts first.  The path must compose and close up.
    """
    tokens = [_parse_token(t) for t in path]
    if not tokens:
        raise ValueError("empty path")
    mats = []
    for tok in tokens:
        mats.append(_token_matrix(rep, tok))
    for left, right in zip(mats, mats[1:]):
        if left[1] != right[2]:
            raise ValueError("path does not compose")
    if mats[0][2] != mats[-1][1]:
        raise ValueError("path is not cyclic")
    prod = mats[0][0]
    for m, _, _ in mats[1:]:
        prod = prod * m
    return prod.trace()


# -- reflection functor ----------------------------------------------------


def reflect(rep: QuiverRep, i: int, chi: Sequence):
    """Reflection functor at a loop-free vertex i on the fiber mu = chi.

    Returns (new rep, s_i(chi)).  The moment value transforms by the
    contragredient simple reflection; the new dimension at i is
    dim T - v_i, where T collects all spaces adjacent to i (framing
    included).
    """
    fq = rep.fq
    n = fq.base.vertex_count
    if not 0 <= i < n:
        raise ValueError(f"vertex {i} out of range")
    if fq.base.has_loop_at(i):
        raise NotReflectable(f"vertex {i} carries a loop")
    chi = [_frac(c) for c in chi]
    if len(chi) != n:
        raise ValueError("chi has the wrong length")
    if not moment_is(rep, chi):
        raise NotReflectable("the point does not lie on the mu = chi fiber")

    slots = []
    for k, (t, h) in enumerate(fq.base.arrows):
        if h == i:
            slots.append(("in", k, rep.v[t]))
        if t == i:
            slots.append(("out", k, rep.v[h]))
    slots.append(("fr", i, fq.framing[i]))

    in_blocks = []
    out_blocks = []
    for kind, idx, size in slots:
        if kind == "in":
            in_blocks.append(rep.A[idx])
            out_blocks.append(rep.B[idx])
        elif kind == "out":
            in_blocks.append(-rep.B[idx])
            out_blocks.append(rep.A[idx])
        else:
            in_blocks.append(rep.Gamma[idx])
            out_blocks.append(rep.Delta[idx])
    t_dim = sum(size for _, _, size in slots)
    if rep.v[i] > 0 and t_dim == 0:
        raise NotReflectable("no space adjacent to the vertex")
    IN = Matrix.hcat(in_blocks) if t_dim else Matrix.zero(rep.v[i], 0)
    OUT = Matrix.vcat(out_blocks) if t_dim else Matrix.zero(0, rep.v[i])

    if IN.rank() != rep.v[i]:
        raise NotReflectable("the combined in-map is not surjective")

    ker = IN.kernel()
    new_dim = len(ker)
    iota = Matrix.hcat(ker) if ker else Matrix.zero(t_dim, 0)
    target = OUT * IN - Matrix.identity(t_dim).scale(chi[i])
    try:
        P = iota.solve(target) if new_dim else Matrix.zero(0, t_dim)
    except NoSolution:
        raise NotReflectable("the correction equation is inconsistent")
    check = iota * P if new_dim else Matrix.zero(t_dim, t_dim)
    if check != target:
        raise NotReflectable("the correction equation is inconsistent")

    updates = {}
    offset = 0
    for kind, idx, size in slots:
        rows = range(offset, offset + size)
        iota_block = iota.submatrix(rows, range(new_dim))
        p_block = P.submatrix(range(new_dim), rows)
        if kind == "in":
            updates[("B", idx)] = iota_block
            updates[("A", idx)] = p_block
        elif kind == "out":
            updates[("A", idx)] = iota_block
            updates[("B", idx)] = -p_block
        else:
            updates[("D", idx)] = iota_block
            updates[("G", idx)] = p_block
        offset += size

    new_v = list(rep.v)
    new_v[i] = new_dim
    new_rep = QuiverRep.zero(fq, new_v).replace(
        {
            key: mat
            for key, mat in _carry_over(rep, i, updates).items()
        }
    )
    new_chi = list(chi)
    new_chi[i] = -chi[i]
    for j in range(n):
        if j != i:
            m = fq.base.edge_multiplicity(i, j)
            if m:
                new_chi[j] = chi[j] + m * chi[i]
    return new_rep, new_chi


def _carry_over(rep: QuiverRep, i: int, updates: dict) -> dict:
    """Merge untouched components into the update table for the new
    rep."""
    out = dict(updates)
    for key, mat in rep.components():
        if key not in out:
            kind, idx = key
            if kind in "AB":
                t, h = rep.fq.base.arrows[idx]
                touches = i in (t, h)
            else:
                touches = idx == i
            if touches:
                continue  # replaced above; shapes at i changed
            out[key] = mat
    return out
