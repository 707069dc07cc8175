"""Symmetric Cartan data, bounded root enumeration, and flatness checks.

Root enumeration works for any symmetric generalized Cartan matrix: positive
roots inside a coordinate box are the simple roots plus the reflection
closure of the fundamental region (connected support, all simple pairings
<= 0), and a componentwise descent argument shows the closure never has to
leave the box.  The public enumeration refuses indefinite types by
contract; the flatness check uses the general routine internally because an
expanded framed quiver is almost never of finite or affine type.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .quiver import CharacterTheta, FramedQuiver, Quiver
from .scalars import DomainError, _frac


class IndefiniteType(DomainError):
    """The operation is contracted to finite and affine types only."""


class NonDominantHighestWeight(DomainError):
    """weight_multiplicity needs a dominant integral highest weight."""


class CartanData:
    """A symmetric generalized Cartan matrix with a type tag.

    The tag is "finite", "affine", or "indefinite"; for disconnected data
    the tag is finite when all components are finite, affine when all are
    finite or affine with at least one affine, indefinite otherwise.
    """

    __slots__ = ("matrix", "type_tag")

    def __init__(self, matrix: Sequence[Sequence[int]]):
        rows = [tuple(int(x) for x in row) for row in matrix]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("Cartan matrix must be square")
        for i in range(n):
            if rows[i][i] != 2:
                raise ValueError("Cartan diagonal entries must equal 2")
            for j in range(n):
                if i != j:
                    if rows[i][j] > 0:
                        raise ValueError("off-diagonal Cartan entries must be <= 0")
                    if rows[i][j] != rows[j][i]:
                        raise ValueError("Cartan matrix must be symmetric")
        self.matrix = tuple(rows)
        self.type_tag = _classify(self.matrix)

    @classmethod
    def from_quiver(cls, q: Quiver) -> "CartanData":
        for t, h in q.arrows:
            if t == h:
                raise ValueError("Cartan data needs a loop-free quiver")
        n = q.vertex_count
        mat = [[0] * n for _ in range(n)]
        for i in range(n):
            mat[i][i] = 2
        for t, h in q.arrows:
            mat[t][h] -= 1
            mat[h][t] -= 1
        return cls(mat)

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def apply(self, x: Sequence) -> list:
        """The vector A x."""
        return [
            sum((Fraction(a) * _frac(xi) for a, xi in zip(row, x)), Fraction(0))
            for row in self.matrix
        ]

    def pairing(self, x: Sequence, y: Sequence) -> Fraction:
        """The symmetric bilinear form x^T A y."""
        ay = self.apply(y)
        return sum((_frac(xi) * v for xi, v in zip(x, ay)), Fraction(0))

    def __repr__(self):
        return f"CartanData({[list(r) for r in self.matrix]}, {self.type_tag!r})"


def _components(matrix) -> list:
    n = len(matrix)
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        comp = []
        stack = [start]
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(n):
                if not seen[j] and matrix[i][j] != 0 and i != j:
                    seen[j] = True
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def _det(rows) -> Fraction:
    """Exact determinant by fraction-free-ish elimination."""
    n = len(rows)
    work = [[_frac(x) for x in row] for row in rows]
    det = Fraction(1)
    for c in range(n):
        pivot = None
        for r in range(c, n):
            if work[r][c] != 0:
                pivot = r
                break
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            work[c], work[pivot] = work[pivot], work[c]
            det = -det
        det *= work[c][c]
        inv = 1 / work[c][c]
        for r in range(c + 1, n):
            if work[r][c] != 0:
                f = work[r][c] * inv
                work[r] = [a - f * b for a, b in zip(work[r], work[c])]
    return det


def _kernel_vectors(matrix) -> list:
    from .scalars import Matrix

    m = Matrix([[Fraction(x) for x in row] for row in matrix])
    return [tuple(v.entries[i][0] for i in range(v.rows)) for v in m.kernel()]


def _classify_connected(matrix) -> str:
    n = len(matrix)
    if n == 0:
        return "finite"
    minors_positive = True
    for k in range(1, n + 1):
        sub = [row[:k] for row in matrix[:k]]
        if _det(sub) <= 0:
            minors_positive = False
            break
    if minors_positive:
        return "finite"
    kernel = _kernel_vectors(matrix)
    if len(kernel) != 1:
        return "indefinite"
    vec = kernel[0]
    if all(x > 0 for x in vec) or all(x < 0 for x in vec):
        return "affine"
    return "indefinite"


def _classify(matrix) -> str:
    tags = []
    for comp in _components(matrix):
        sub = [[matrix[i][j] for j in comp] for i in comp]
        tags.append(_classify_connected(sub))
    if "indefinite" in tags:
        return "indefinite"
    if "affine" in tags:
        return "affine"
    return "finite"


class Root:
    """A positive root: integer coordinates plus a real/imaginary flag."""

    __slots__ = ("coords", "real_flag")

    def __init__(self, coords: Sequence[int], real_flag: bool):
        self.coords = tuple(int(x) for x in coords)
        self.real_flag = bool(real_flag)

    def __repr__(self):
        kind = "real" if self.real_flag else "imaginary"
        return f"Root({list(self.coords)}, {kind})"

    def __eq__(self, other):
        return (
            isinstance(other, Root)
            and self.coords == other.coords
            and self.real_flag == other.real_flag
        )

    def __hash__(self):
        return hash((self.coords, self.real_flag))


class WeightVector:
    """A weight in fundamental-weight coordinates."""

    __slots__ = ("coords",)

    def __init__(self, coords: Sequence):
        self.coords = tuple(_frac(c) for c in coords)

    def __repr__(self):
        return f"WeightVector({list(self.coords)})"


def p_value(alpha: Sequence[int], q: Quiver) -> Fraction:
    """p(alpha) = 1 - sum alpha_i^2 + sum_{arrows} alpha_tail alpha_head."""
    alpha = [Fraction(int(a)) for a in alpha]
    if len(alpha) != q.vertex_count:
        raise ValueError("alpha has the wrong length")
    total = Fraction(1) - sum((a * a for a in alpha), Fraction(0))
    for t, h in q.arrows:
        total += alpha[t] * alpha[h]
    return total


def _as_cartan(source) -> CartanData:
    if isinstance(source, CartanData):
        return source
    if isinstance(source, Quiver):
        return CartanData.from_quiver(source)
    raise ValueError("expected a Quiver or CartanData")


def _positive_roots_box(cartan: CartanData, bound: Sequence[int]) -> list:
    """All positive roots <= bound componentwise, for any symmetric GCM.

    Seeds: simple roots in the box plus the fundamental region (nonzero,
    connected support, all entries of A*alpha <= 0).  Closure under simple
    reflections that stay inside the box reaches every positive root in the
    box.
    """
    n = cartan.rank
    bound = tuple(int(b) for b in bound)
    if len(bound) != n or any(b < 0 for b in bound):
        raise ValueError("bound must be a nonnegative vector of full length")
    if n == 0:
        return []
    mat = cartan.matrix

    def connected_support(vec) -> bool:
        supp = [i for i in range(n) if vec[i]]
        if not supp:
            return False
        seen = {supp[0]}
        stack = [supp[0]]
        supp_set = set(supp)
        while stack:
            i = stack.pop()
            for j in supp_set:
                if j not in seen and mat[i][j] != 0 and i != j:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == len(supp)

    seeds = set()
    for i in range(n):
        if bound[i] >= 1:
            seeds.add(tuple(1 if j == i else 0 for j in range(n)))

    def box_vectors(idx, prefix):
        if idx == n:
            yield tuple(prefix)
            return
        for val in range(bound[idx] + 1):
            prefix.append(val)
            yield from box_vectors(idx + 1, prefix)
            prefix.pop()

    for vec in box_vectors(0, []):
        if not any(vec):
            continue
        av = [sum(mat[i][j] * vec[j] for j in range(n)) for i in range(n)]
        if all(x <= 0 for x in av) and connected_support(vec):
            seeds.add(vec)

    found = set(seeds)
    frontier = list(seeds)
    while frontier:
        vec = frontier.pop()
        av = [sum(mat[i][j] * vec[j] for j in range(n)) for i in range(n)]
        for i in range(n):
            new_i = vec[i] - av[i]
            if new_i < 0 or new_i > bound[i]:
                continue
            new = vec[:i] + (new_i,) + vec[i + 1 :]
            if new not in found and any(new):
                found.add(new)
                frontier.append(new)

    out = []
    for vec in sorted(found):
        norm = sum(
            vec[i] * sum(mat[i][j] * vec[j] for j in range(n)) for i in range(n)
        )
        out.append(Root(vec, norm == 2))
    return out


def positive_roots_below(source, bound: Sequence[int]) -> list:
    """Positive roots <= bound for finite or affine symmetric Cartan data.

    Raises IndefiniteType when the type tag is indefinite; the enumeration
    itself would still make sense, but the public contract keeps unbounded
    root systems out of reach.
    """
    cartan = _as_cartan(source)
    if cartan.type_tag == "indefinite":
        raise IndefiniteType("positive_roots_below needs finite or affine type")
    return _positive_roots_box(cartan, bound)


def is_generic(theta, source, bound: Sequence[int]) -> bool:
    """Whether theta pairs nonzero with every positive root <= bound.

    This is genericity relative to the boxed root list; for affine data the
    full root system is infinite and the box is an explicit truncation.
    """
    if isinstance(theta, CharacterTheta):
        coords = theta.coords
    else:
        coords = tuple(theta)
    roots = positive_roots_below(source, bound)
    for root in roots:
        pairing = sum(
            (_frac(c) * x for c, x in zip(coords, root.coords)), Fraction(0)
        )
        if pairing == 0:
            return False
    return True


def _decompositions(target, roots, min_parts=2):
    """All multisets of positive roots (each repeated freely) summing to
    target.

    Roots are scanned in a fixed descending order, so each multiset is
    produced once, in canonical order.
    """
    vecs = [r.coords for r in sorted(roots, key=lambda r: r.coords, reverse=True)]
    n = len(target)
    out = []
    current = []

    def rec(remaining, start):
        if not any(remaining):
            if len(current) >= min_parts:
                out.append(list(current))
            return
        for idx in range(start, len(vecs)):
            vec = vecs[idx]
            if all(vec[i] <= remaining[i] for i in range(n)):
                current.append(vec)
                rec(tuple(r - x for r, x in zip(remaining, vec)), idx)
                current.pop()

    rec(tuple(target), 0)
    return out


def cb_flatness_check(fq: FramedQuiver, v: Sequence[int], strict: bool = True) -> dict:
    """Flatness test for the expanded dimension vector (v, 1).

    Checks p(v^w) >= sum_i p(v^i) (strictly, when ``strict``) over every
    decomposition of v^w into at least two positive roots of the expanded
    quiver.  The report lists all violations of the requested inequality.
    """
    if not isinstance(fq, FramedQuiver):
        raise ValueError("fq must be a FramedQuiver")
    expanded, vw = fq.expand(v)
    cartan = CartanData.from_quiver(expanded)
    roots = _positive_roots_box(cartan, vw)
    total = p_value(vw, expanded)
    decomps = _decompositions(vw, roots)
    violations = []
    for parts in decomps:
        s = sum((p_value(part, expanded) for part in parts), Fraction(0))
        bad = (total <= s) if strict else (total < s)
        if bad:
            violations.append(
                {
                    "parts": [list(part) for part in parts],
                    "p_sum": s,
                    "p_total": total,
                }
            )
    return {
        "strict": bool(strict),
        "vw": list(vw),
        "p_total": total,
        "roots": len(roots),
        "decompositions": len(decomps),
        "violations": violations,
        "holds": not violations,
    }


def weight_multiplicity(source, d: Sequence[int], v: Sequence[int]) -> int:
    """Multiplicity of the weight (d - v) in the irreducible integrable
    module L(d).

    d is given in fundamental-weight coordinates (dominant integral), v in
    simple-root coordinates.  Works for connected finite or affine symmetric
    Cartan data via the Freudenthal recursion; affine imaginary roots k*delta
    enter with multiplicity rank - 1.
    """
    cartan = _as_cartan(source)
    if cartan.type_tag == "indefinite":
        raise IndefiniteType("weight_multiplicity needs finite or affine type")
    if len(_components(cartan.matrix)) != 1:
        raise ValueError("weight_multiplicity needs connected Cartan data")
    n = cartan.rank
    d = [int(x) for x in d]
    v = [int(x) for x in v]
    if len(d) != n or len(v) != n:
        raise ValueError("d and v must have full length")
    if any(x < 0 for x in d):
        raise NonDominantHighestWeight(f"d = {d} is not dominant")
    if any(x < 0 for x in v):
        raise ValueError("v must be nonnegative")
    if not any(v):
        return 1

    roots = _positive_roots_box(cartan, v)
    imag_mult = max(n - 1, 0)
    mat = cartan.matrix

    def pair_root(x, y) -> int:
        return sum(x[i] * sum(mat[i][j] * y[j] for j in range(n)) for i in range(n))

    def d_pair(y) -> int:
        # (d, y) for y in the root lattice; simply laced normalization.
        return sum(d[i] * y[i] for i in range(n))

    cache = {tuple([0] * n): Fraction(1)}

    def mult(u) -> Fraction:
        u = tuple(u)
        if u in cache:
            return cache[u]
        denom = 2 * (d_pair(u) + sum(u)) - pair_root(u, u)
        rhs = Fraction(0)
        for root in roots:
            alpha = root.coords
            if not all(alpha[i] <= u[i] for i in range(n)):
                continue
            m_alpha = 1 if root.real_flag else imag_mult
            if m_alpha == 0:
                continue
            k = 1
            while all(k * alpha[i] <= u[i] for i in range(n)):
                rest = tuple(u[i] - k * alpha[i] for i in range(n))
                inner = mult(rest)
                if inner:
                    coeff = d_pair(alpha) - pair_root(u, alpha) + k * pair_root(alpha, alpha)
                    rhs += 2 * m_alpha * coeff * inner
                k += 1
        if denom == 0:
            if rhs != 0:
                raise ArithmeticError("Freudenthal denominator vanished unexpectedly")
            value = Fraction(0)
        else:
            value = rhs / denom
        cache[u] = value
        return value

    result = mult(tuple(v))
    if result.denominator != 1 or result < 0:
        raise ArithmeticError(f"non-integral weight multiplicity {result}")
    return int(result)


def dominance_check(d: Sequence[int], v: Sequence[int]) -> bool:
    """Type-A dominance of d - v: d_i >= 2 v_i - v_{i-1} - v_{i+1} for all
    i, with v_0 = v_n = 0."""
    d = [int(x) for x in d]
    v = [int(x) for x in v]
    if len(d) != len(v):
        raise ValueError("d and v must have the same length")
    n = len(v)
    for i in range(n):
        left = v[i - 1] if i > 0 else 0
        right = v[i + 1] if i < n - 1 else 0
        if d[i] < 2 * v[i] - left - right:
            return False
    return True
