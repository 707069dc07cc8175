"""Normal-ordered computation in homogenized Weyl algebras and symplectic
reflection algebras over wreath products.

Elements are finite sums coeff * v_{i_1}...v_{i_d} * g with nondecreasing
generator words, group elements on the right, and coefficients polynomial
in the central parameters (h, c_1..c_l, k).  Products are computed by a
terminating rewrite system realizing the defining relations; confluence of
that system is machine-certified per context before any dimension counting
is trusted.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Sequence

from .scalars import (
    CycScalar,
    DomainError,
    Matrix,
    rational_to_str,
    scalar_is_zero,
)
from .quiver import FramedQuiver
from .mckay import WreathGroup, symplectic_reflections, _symplectic_form


class ConfluenceNotCertified(DomainError):
    pass


def _scalar_str(x) -> str:
    if isinstance(x, CycScalar):
        if x.is_rational():
            return rational_to_str(x.rational_value())
        inner = ",".join(rational_to_str(c) for c in x.coeffs)
        return f"cyc{x.conductor}[{inner}]"
    return rational_to_str(Fraction(x))


class ParamPoly:
    """Polynomial in the commuting central parameters with exact scalar
    coefficients.  Keys are exponent tuples; zero coefficients are pruned."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        for exps, c in (terms or {}).items():
            if len(exps) != nvars:
                raise ValueError("exponent arity mismatch")
            if not scalar_is_zero(c):
                clean[tuple(exps)] = c
        self.terms = clean

    @classmethod
    def zero(cls, nvars: int) -> "ParamPoly":
        return cls(nvars, {})

    @classmethod
    def const(cls, nvars: int, value) -> "ParamPoly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "ParamPoly":
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, {tuple(exps): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            got = out.get(e)
            out[e] = c if got is None else got + c
        return ParamPoly(self.nvars, out)

    def __neg__(self):
        return ParamPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                got = out.get(e)
                out[e] = c if got is None else got + c
        return ParamPoly(self.nvars, out)

    def scale(self, scalar) -> "ParamPoly":
        if scalar_is_zero(scalar):
            return ParamPoly.zero(self.nvars)
        return ParamPoly(self.nvars, {e: c * scalar for e, c in self.terms.items()})

    def shift(self, index: int) -> "ParamPoly":
        """Multiply by the index-th parameter."""
        out = {}
        for e, c in self.terms.items():
            lifted = list(e)
            lifted[index] += 1
            out[tuple(lifted)] = c
        return ParamPoly(self.nvars, out)

    def negate_variable(self, index: int) -> "ParamPoly":
        return ParamPoly(
            self.nvars,
            {e: (c if e[index] % 2 == 0 else -c) for e, c in self.terms.items()},
        )

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def param_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, ParamPoly):
            return NotImplemented
        if self.nvars != other.nvars:
            return False
        if set(self.terms) != set(other.terms):
            return False
        return all(scalar_is_zero(self.terms[e] - other.terms[e]) for e in self.terms)

    __hash__ = None

    def to_str(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms):
            c = self.terms[e]
            factors = []
            for name, exp in zip(names, e):
                if exp == 1:
                    factors.append(name)
                elif exp > 1:
                    factors.append(f"{name}^{exp}")
            coeff = _scalar_str(c)
            if factors and coeff == "1":
                bits.append("*".join(factors))
            elif factors and coeff == "-1":
                bits.append("-" + "*".join(factors))
            else:
                bits.append("*".join([coeff] + factors) if factors else coeff)
        return " + ".join(bits).replace("+ -", "- ")

    def __repr__(self):
        return f"ParamPoly({self.terms})"


class NCElement:
    """A normal-ordered element: {(mono, grp): ParamPoly}."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for key, poly in (terms or {}).items():
            if not poly.is_zero():
                self.terms[key] = poly

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for key, poly in other.terms.items():
            got = out.get(key)
            out[key] = poly if got is None else got + poly
        return NCElement(out)

    def __neg__(self):
        return NCElement({k: -p for k, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, poly_or_scalar) -> "NCElement":
        if isinstance(poly_or_scalar, ParamPoly):
            return NCElement({k: p * poly_or_scalar for k, p in self.terms.items()})
        return NCElement({k: p.scale(poly_or_scalar) for k, p in self.terms.items()})

    def v_degree(self) -> int:
        return max((len(mono) for mono, _ in self.terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, NCElement):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"NCElement({len(self.terms)} terms)"


class AlgebraCtx:
    """Immutable rewriting context: basis order, parameter list, symplectic
    data, and the precomputed commutator table [v_a, v_b] for a < b.

    In SRA mode group elements are wreath pairs (sigma, gamma-indices); in
    Weyl mode the group slot is None throughout.
    """

    __slots__ = (
        "mode",
        "dim",
        "param_names",
        "group",
        "identity_grp",
        "omega",
        "relations",
        "reflection_elements",
        "coords",
        "labels",
        "_action_cache",
        "_certified",
    )

    def __init__(self, mode, dim, param_names, group, identity_grp, omega, relations, reflection_elements=(), coords=None, labels=None):
        self.mode = mode
        self.dim = dim
        self.param_names = tuple(param_names)
        self.group = group
        self.identity_grp = identity_grp
        self.omega = omega
        self.relations = relations
        self.reflection_elements = tuple(reflection_elements)
        self.coords = coords or {}
        self.labels = labels or []
        self._action_cache = {}
        self._certified = mode == "weyl"

    # -- element constructors ------------------------------------------

    @property
    def nparams(self) -> int:
        return len(self.param_names)

    def pp(self, value) -> ParamPoly:
        return ParamPoly.const(self.nparams, Fraction(value) if isinstance(value, int) else value)

    def param(self, name: str) -> NCElement:
        idx = self.param_names.index(name)
        return NCElement({((), self.identity_grp): ParamPoly.variable(self.nparams, idx)})

    def zero(self) -> NCElement:
        return NCElement({})

    def one(self) -> NCElement:
        return self.scalar(Fraction(1))

    def scalar(self, value) -> NCElement:
        poly = value if isinstance(value, ParamPoly) else ParamPoly.const(self.nparams, value)
        return NCElement({((), self.identity_grp): poly})

    def generator(self, index: int) -> NCElement:
        if not 0 <= index < self.dim:
            raise ValueError("generator index out of range")
        return NCElement({((index,), self.identity_grp): ParamPoly.const(self.nparams, Fraction(1))})

    def coordinate(self, label) -> NCElement:
        return self.generator(self.coords[label])

    def monomial(self, indices: Sequence[int], grp=None) -> NCElement:
        mono = tuple(indices)
        if list(mono) != sorted(mono):
            raise ValueError("monomial must be nondecreasing")
        key = (mono, self.identity_grp if grp is None else grp)
        return NCElement({key: ParamPoly.const(self.nparams, Fraction(1))})

    def group_element(self, grp) -> NCElement:
        return NCElement({((), grp): ParamPoly.const(self.nparams, Fraction(1))})

    # -- group plumbing --------------------------------------------------

    def grp_mul(self, a, b):
        if self.mode == "weyl":
            return None
        return self.group.multiply(a, b)

    def _action_columns(self, grp):
        """Columns of the action of grp on V in the context basis order:
        column b lists (row, scalar) with g . v_b = sum scalar * v_row."""
        got = self._action_cache.get(grp)
        if got is not None:
            return got
        n = self.dim // 2
        interleave = [2 * k if k < n else 2 * (k - n) + 1 for k in range(self.dim)]
        mat = self.group.matrix(grp)
        cols = []
        for b in range(self.dim):
            col = []
            for r in range(self.dim):
                val = mat.entries[interleave[r]][interleave[b]]
                if not scalar_is_zero(val):
                    col.append((r, val))
            cols.append(col)
        self._action_cache[grp] = cols
        return cols

    def group_list(self) -> list:
        """Every element of the wreath product; exponential in n, intended
        for the small contexts the spherical calculus runs in."""
        if self.mode == "weyl":
            return [None]
        n = self.group.n
        order = self.group.gamma.order
        out = []
        for sigma in itertools.permutations(range(n)):
            for parts in itertools.product(range(order), repeat=n):
                out.append((sigma, parts))
        return out

    # -- serialization ---------------------------------------------------

    def element_to_json(self, x: NCElement) -> list:
        out = []
        for (mono, grp) in sorted(x.terms, key=lambda k: (len(k[0]), k[0], repr(k[1]))):
            poly = x.terms[(mono, grp)]
            blob = {"coeff": poly.to_str(self.param_names), "mono": list(mono)}
            if self.mode == "sra":
                blob["grp"] = [list(grp[0]), list(grp[1])]
            else:
                blob["grp"] = None
            out.append(blob)
        return out


# -- context constructors ----------------------------------------------


def weyl_ctx(N: int) -> AlgebraCtx:
    """Homogenized Weyl algebra on x_1..x_N < y_1..y_N with
    [x_i, y_j] = h delta_ij."""
    dim = 2 * N
    omega = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(N):
        omega[i][N + i] = Fraction(1)
        omega[N + i][i] = Fraction(-1)
    relations = _build_relations(dim, 1, omega, [])
    return AlgebraCtx("weyl", dim, ("h",), None, None, omega, relations)


def framed_weyl_ctx(fq: FramedQuiver, v: Sequence[int]) -> AlgebraCtx:
    """Weyl context on the linear coordinates of a framed quiver's doubled
    representation space.  Position coordinates (arrow and framing-in
    entries) come first, momenta after, with omega(p, matched q) = -1 so
    that the quantum comoment acts by +h on position coordinates."""
    v = tuple(v)
    base = fq.base
    if len(v) != base.vertex_count:
        raise ValueError("dimension vector length mismatch")
    labels = []
    for a, (t, h) in enumerate(base.arrows):
        for r in range(v[h]):
            for c in range(v[t]):
                labels.append(("A", a, r, c))
    for i, w in enumerate(fq.framing):
        for r in range(v[i]):
            for c in range(w):
                labels.append(("G", i, r, c))
    half = len(labels)
    for a, (t, h) in enumerate(base.arrows):
        for r in range(v[t]):
            for c in range(v[h]):
                labels.append(("B", a, r, c))
    for i, w in enumerate(fq.framing):
        for r in range(w):
            for c in range(v[i]):
                labels.append(("D", i, r, c))
    coords = {lab: k for k, lab in enumerate(labels)}
    dim = len(labels)
    if dim != 2 * half:
        raise ValueError("doubled coordinate count is odd")
    omega = [[Fraction(0)] * dim for _ in range(dim)]
    for a, (t, h) in enumerate(base.arrows):
        for r in range(v[h]):
            for c in range(v[t]):
                p = coords[("A", a, r, c)]
                q = coords[("B", a, c, r)]
                omega[p][q] = Fraction(-1)
                omega[q][p] = Fraction(1)
    for i, w in enumerate(fq.framing):
        for r in range(v[i]):
            for c in range(w):
                p = coords[("G", i, r, c)]
                q = coords[("D", i, c, r)]
                omega[p][q] = Fraction(-1)
                omega[q][p] = Fraction(1)
    relations = _build_relations(dim, 1, omega, [])
    return AlgebraCtx(
        "weyl", dim, ("h",), None, None, omega, relations, coords=coords, labels=labels
    )


def sra_ctx(w: WreathGroup) -> AlgebraCtx:
    """Symplectic reflection context for Gamma_n = S_n wr Gamma acting on
    (K^2)^n.  Parameters: h, one c_i per nontrivial Gamma-class, and k for
    the pair-swap class when n > 1."""
    n = w.n
    dim = 2 * n
    gamma_classes = len(w.gamma.classes) - 1
    names = ["h"] + [f"c{i}" for i in range(1, gamma_classes + 1)]
    if n > 1:
        names.append("k")
    nparams = len(names)

    interleave = [2 * k if k < n else 2 * (k - n) + 1 for k in range(dim)]
    form = _symplectic_form(n)
    omega = [
        [form.entries[interleave[a]][interleave[b]] for b in range(dim)]
        for a in range(dim)
    ]

    # per-reflection skew tables in the context basis, bucketed by the
    # parameter that multiplies the class
    pieces = []
    for s in symplectic_reflections(w):
        if s.class_label == "Sym":
            var = names.index("k")
        else:
            cls = int(s.class_label[len("Gamma(") : -1])
            var = names.index(f"c{cls}")
        proj_form = s.projector.transpose() * form * s.projector
        table = [
            [proj_form.entries[interleave[a]][interleave[b]] for b in range(dim)]
            for a in range(dim)
        ]
        pieces.append((var, table, s.element))

    relations = _build_relations(dim, nparams, omega, pieces)
    elements = tuple(dict.fromkeys(piece[2] for piece in pieces))
    return AlgebraCtx("sra", dim, names, w, w.identity(), omega, relations, elements)


def _build_relations(dim, nparams, omega, reflection_pieces):
    """relations[(b, a)] for b > a lists kappa(v_a, v_b) as triples
    (param index, scalar, grp or None): v_b v_a -> v_a v_b - kappa."""
    relations = {}
    for b in range(dim):
        for a in range(b):
            entry = []
            if not scalar_is_zero(omega[a][b]):
                entry.append((0, omega[a][b], None))
            for var, table, grp in reflection_pieces:
                if not scalar_is_zero(table[a][b]):
                    entry.append((var, table[a][b], grp))
            relations[(b, a)] = entry
    return relations


# -- the rewriting engine ------------------------------------------------


def _find_redex(ctx, tokens, rightmost=False):
    order = range(len(tokens) - 2, -1, -1) if rightmost else range(len(tokens) - 1)
    for i in order:
        left, right = tokens[i], tokens[i + 1]
        lv = isinstance(left, int)
        rv = isinstance(right, int)
        if lv and rv:
            if left > right:
                return i, "swap"
        elif not lv and rv:
            return i, "move"
        elif not lv and not rv:
            return i, "merge"
    return None, None


def _normalize(ctx, items: Iterable, rightmost=False) -> dict:
    out = {}
    stack = list(items)
    while stack:
        coeff, tokens = stack.pop()
        if coeff.is_zero():
            continue
        i, kind = _find_redex(ctx, tokens, rightmost)
        if kind is None:
            mono = tuple(t for t in tokens if isinstance(t, int))
            gs = [t[1] for t in tokens if not isinstance(t, int)]
            grp = gs[0] if gs else ctx.identity_grp
            key = (mono, grp)
            got = out.get(key)
            out[key] = coeff if got is None else got + coeff
            continue
        if kind == "swap":
            b, a = tokens[i], tokens[i + 1]
            swapped = tokens[:i] + (a, b) + tokens[i + 2 :]
            stack.append((coeff, swapped))
            for var, scalar, grp in ctx.relations[(b, a)]:
                piece = coeff.shift(var).scale(-scalar)
                mid = () if grp is None else (("g", grp),)
                stack.append((piece, tokens[:i] + mid + tokens[i + 2 :]))
        elif kind == "move":
            grp = tokens[i][1]
            b = tokens[i + 1]
            for row, scalar in ctx._action_columns(grp)[b]:
                stack.append(
                    (coeff.scale(scalar), tokens[:i] + (row, ("g", grp)) + tokens[i + 2 :])
                )
        else:
            merged = ctx.grp_mul(tokens[i][1], tokens[i + 1][1])
            stack.append((coeff, tokens[:i] + (("g", merged),) + tokens[i + 2 :]))
    return {k: p for k, p in out.items() if not p.is_zero()}


def nc_mul(ctx: AlgebraCtx, x: NCElement, y: NCElement) -> NCElement:
    items = []
    for (m1, g1), p1 in x.terms.items():
        t1 = tuple(m1) if (g1 is None or g1 == ctx.identity_grp) else tuple(m1) + (("g", g1),)
        for (m2, g2), p2 in y.terms.items():
            t2 = tuple(m2) if (g2 is None or g2 == ctx.identity_grp) else tuple(m2) + (("g", g2),)
            items.append((p1 * p2, t1 + t2))
    return NCElement(_normalize(ctx, items))


def nc_pow(ctx: AlgebraCtx, x: NCElement, e: int) -> NCElement:
    out = ctx.one()
    for _ in range(e):
        out = nc_mul(ctx, out, x)
    return out


# -- confluence ------------------------------------------------------------


def confluence_check(ctx: AlgebraCtx, degree_cap: int = 3) -> dict:
    """Two-strategy reduction of every overlap ambiguity: ordered generator
    triples v_c v_b v_a, and g v_b v_a for each reflection g (the group
    rule overlapping the descent rule).  Passing certifies the PBW normal
    form by the diamond lemma; the result is cached on the context.

    degree_cap > 3 additionally cross-checks associativity exhaustively on
    normal monomials up to that total degree."""
    witness = None
    triples = 0

    def reduce_two_ways(tokens):
        one = ParamPoly.const(ctx.nparams, Fraction(1))
        left = _normalize(ctx, [(one, tokens)], rightmost=False)
        right = _normalize(ctx, [(one, tokens)], rightmost=True)
        return left, right

    for c in range(ctx.dim):
        for b in range(c):
            for a in range(b):
                triples += 1
                left, right = reduce_two_ways((c, b, a))
                if NCElement(left) != NCElement(right):
                    witness = ("vvv", c, b, a)
                    break
            if witness:
                break
        if witness:
            break

    if not witness and ctx.mode == "sra":
        for g in ctx.reflection_elements:
            for b in range(ctx.dim):
                for a in range(b):
                    triples += 1
                    left, right = reduce_two_ways((("g", g), b, a))
                    if NCElement(left) != NCElement(right):
                        witness = ("gvv", g, b, a)
                        break
                if witness:
                    break
            if witness:
                break

    assoc_checked = 0
    if not witness and degree_cap > 3:
        monos = []
        for d in range(1, degree_cap - 1):
            monos.extend(
                itertools.combinations_with_replacement(range(ctx.dim), d)
            )
        for m1, m2, m3 in itertools.product(monos, repeat=3):
            if len(m1) + len(m2) + len(m3) > degree_cap:
                continue
            assoc_checked += 1
            e1, e2, e3 = (ctx.monomial(m) for m in (m1, m2, m3))
            lhs = nc_mul(ctx, nc_mul(ctx, e1, e2), e3)
            rhs = nc_mul(ctx, e1, nc_mul(ctx, e2, e3))
            if lhs != rhs:
                witness = ("assoc", m1, m2, m3)
                break

    ok = witness is None
    if ok:
        ctx._certified = True
    return {
        "ok": ok,
        "witness": witness,
        "triples_checked": triples,
        "associativity_checked": assoc_checked,
    }


def graded_dimension(ctx: AlgebraCtx, d: int) -> int:
    """Count of normal-form monomials of V-degree d; the PBW basis size,
    dim(S^d V) times the group order."""
    if not ctx._certified:
        raise ConfluenceNotCertified("run confluence_check on this context first")
    count = sum(1 for _ in itertools.combinations_with_replacement(range(ctx.dim), d))
    group_order = 1 if ctx.mode == "weyl" else ctx.group.order
    return count * group_order


# -- quantum comoment -------------------------------------------------------


def quantum_comoment(ctx: AlgebraCtx, fq: FramedQuiver, v: Sequence[int], xi: Sequence) -> NCElement:
    """Weyl-symmetric quantization of the entrywise moment pairing
    sum_i <mu_i, xi_i>, with <M, N> = sum_{r,c} M[r][c] N[r][c] and xi in
    gl(v) given vertexwise; every coordinate product pq enters as
    (pq + qp)/2.

    With this pairing the map is a Lie homomorphism after scaling:
    [Phi(xi), Phi(eta)] = h Phi([xi, eta]), and [Phi(xi), f] equals
    h * coordinate_action(..) on every linear coordinate f.  Pairing by
    the trace form instead would reverse the bracket orientation."""
    if ctx.mode != "weyl" or not ctx.coords:
        raise ValueError("requires a framed-quiver Weyl context")
    v = tuple(v)
    base = fq.base
    mats = []
    for i, size in enumerate(v):
        m = xi[i]
        if isinstance(m, Matrix):
            ent = m.entries
        else:
            ent = m
        if size and (len(ent) != size or any(len(row) != size for row in ent)):
            raise ValueError(f"xi block {i} has the wrong shape")
        mats.append(ent)

    half = ParamPoly.const(ctx.nparams, Fraction(1, 2))
    total = ctx.zero()

    def sym_pair(p_label, q_label, weight):
        nonlocal total
        if scalar_is_zero(weight):
            return
        p = ctx.coordinate(p_label)
        q = ctx.coordinate(q_label)
        anti = nc_mul(ctx, p, q) + nc_mul(ctx, q, p)
        total = total + anti.scale(half.scale(weight))

    for a, (t, h) in enumerate(base.arrows):
        for r in range(v[h]):
            for c in range(v[t]):
                for d2 in range(v[h]):
                    # <A B, xi_h>: A[r,c] B[c,d] xi[r,d]
                    sym_pair(("A", a, r, c), ("B", a, c, d2), mats[h][r][d2])
        for r in range(v[t]):
            for c in range(v[h]):
                for d2 in range(v[t]):
                    # -<B A, xi_t>
                    sym_pair(("B", a, r, c), ("A", a, c, d2), -mats[t][r][d2])
    for i, w in enumerate(fq.framing):
        for r in range(v[i]):
            for c in range(w):
                for d2 in range(v[i]):
                    # <Gamma Delta, xi_i>
                    sym_pair(("G", i, r, c), ("D", i, c, d2), mats[i][r][d2])
    return total


def coordinate_action(ctx: AlgebraCtx, fq: FramedQuiver, v: Sequence[int], xi: Sequence, label) -> NCElement:
    """The derivation induced on linear coordinates by the gl(v) element
    xi, normalized so that [quantum_comoment(.., xi), f] = h * action(f)
    for every coordinate f.  The coordinate A[r][c] of an arrow t -> h
    picks up column r of xi_h and row c of xi_t with a sign:
    a_{rc} -> sum_k xi_h[k][r] a_{kc} - sum_k xi_t[c][k] a_{rk},
    and B, Gamma, Delta transform with head and tail roles swapped."""
    v = tuple(v)
    base = fq.base
    mats = [m.entries if isinstance(m, Matrix) else m for m in xi]
    kind = label[0]
    out = ctx.zero()
    if kind in ("A", "B"):
        a, r, c = label[1], label[2], label[3]
        t, h = base.arrows[a]
        if kind == "B":
            t, h = h, t
        for k in range(v[h]):
            out = out + ctx.coordinate((kind, a, k, c)).scale(mats[h][k][r])
        for k in range(v[t]):
            out = out - ctx.coordinate((kind, a, r, k)).scale(mats[t][c][k])
    elif kind == "G":
        i, r, c = label[1], label[2], label[3]
        for k in range(v[i]):
            out = out + ctx.coordinate(("G", i, k, c)).scale(mats[i][k][r])
    elif kind == "D":
        i, r, c = label[1], label[2], label[3]
        for k in range(v[i]):
            out = out - ctx.coordinate(("D", i, r, k)).scale(mats[i][c][k])
    else:
        raise ValueError(f"unknown coordinate label {label!r}")
    return out


def parity_antiauto(ctx: AlgebraCtx, x: NCElement) -> NCElement:
    """The antiautomorphism fixing each generator, reversing words, and
    sending h to -h."""
    if ctx.mode != "weyl":
        raise ValueError("parity antiautomorphism is defined on Weyl contexts")
    items = []
    for (mono, _), poly in x.terms.items():
        items.append((poly.negate_variable(0), tuple(reversed(mono))))
    return NCElement(_normalize(ctx, items))


# -- spherical calculus ------------------------------------------------------


def averaging_idempotent(ctx: AlgebraCtx) -> NCElement:
    if ctx.mode != "sra":
        raise ValueError("the averaging idempotent lives in SRA contexts")
    order = ctx.group.order
    coeff = ParamPoly.const(ctx.nparams, Fraction(1, order))
    return NCElement({((), g): coeff for g in ctx.group_list()})


def spherical_product(ctx: AlgebraCtx, x: NCElement, y: NCElement) -> NCElement:
    e = averaging_idempotent(ctx)
    out = nc_mul(ctx, e, x)
    out = nc_mul(ctx, out, e)
    out = nc_mul(ctx, out, y)
    return nc_mul(ctx, out, e)


def molien_dim(g, d: int) -> int:
    """dim (S^d V)^G by averaging traces on S^d V, via the Newton relation
    h_d = (1/d) sum p_k h_{d-k} on each element's eigenvalue multiset."""
    if isinstance(g, WreathGroup):
        n, order = g.n, g.gamma.order
        elements = [
            g.matrix((sigma, parts))
            for sigma in itertools.permutations(range(n))
            for parts in itertools.product(range(order), repeat=n)
        ]
    else:
        elements = list(g.elements)
    total = Fraction(0)

    def h_value(mat):
        cur = Matrix.identity(mat.rows)
        traces = [None]
        for _ in range(d):
            cur = cur * mat
            traces.append(cur.trace())
        h = [Fraction(1)] + [None] * d
        for m in range(1, d + 1):
            acc = 0
            for k in range(1, m + 1):
                acc = traces[k] * h[m - k] + acc
            h[m] = acc * Fraction(1, m)
        return h[d]

    for mat in elements:
        # per-element values may be irrational; only the average must be
        total = h_value(mat) + total
    avg = total * Fraction(1, len(elements))
    if isinstance(avg, CycScalar):
        if not avg.is_rational():
            raise ValueError("invariant dimension average is not rational")
        avg = avg.rational_value()
    if avg.denominator != 1:
        raise ValueError("non-integral invariant dimension")
    return int(avg)
