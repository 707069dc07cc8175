"""Parameter spaces of the quantization families and the exact linear
maps between them.

Three coordinate systems appear.  The reflection-algebra side uses one
variable per nontrivial conjugacy class of the Kleinian group (and an
extra variable k for the transposition class in the wreath case), plus
the homogenization variable h.  The quiver side uses the tautological
basis eps_0..eps_r of the vertex-parameter space, plus h.  The type-A
slice side uses trace-zero diagonal values.

All maps are exact.  Character sums over group classes live in a
cyclotomic field; entries are demoted to plain rationals whenever they
are rational, and stay cyclotomic otherwise (for a cyclic group of
order 3 the class sums are genuinely irrational because the singleton
classes are not stable under the Galois power maps).  Sums over
Galois-stable classes must be rational and NonRationalTrace reports a
character-table inconsistency if one is not.

The finite Weyl group acts on the eps-coordinates by the weight-side
(contragredient) reflection formula, the same transform the reflection
functor applies to moment-map values.  The flip involution negates the
component along eps_0, the unique coordinate direction fixed by every
finite-node reflection, and is the identity on the delta-orthogonal
hyperplane; this is the choice of complement that makes the flip
commute with the Weyl action exactly.
"""

from fractions import Fraction
from math import gcd

from .mckay import KleinianGroup
from .roots import CartanData
from .scalars import CycScalar, DomainError, Matrix, scalar_to_json


class NonRationalTrace(DomainError):
    """A character sum over a Galois-stable class came out irrational."""


class RelationViolated(DomainError):
    """The delta-weighted sum of the eps-images failed to vanish."""


class NonTraceZero(DomainError):
    """Diagonal values with nonzero weighted trace."""


class NotInvertible(DomainError):
    """A parameter translation system is singular."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected a rational value, got {type(x).__name__}")


def _coeff(x):
    if isinstance(x, CycScalar):
        return x.rational_value() if x.is_rational() else x
    return _frac(x)


_KINDS = ("sra_wreath", "sra_klein", "zhat", "zhat0", "astar")


class ParamSpace:
    """A named coordinate system for quantization parameters.

    kind is one of sra_wreath (basis h, c1..cl, k), sra_klein
    (h, c1..cr), zhat (h, eps0..epsr), zhat0 (same coordinates, elements
    carry the canonical representative with delta-pairing zero), astar
    (eps1..eps_{n-1}).  zhat/zhat0 spaces optionally carry the affine
    Cartan matrix of their diagram so the Weyl action is self-contained.
    """

    __slots__ = ("kind", "basis", "delta", "cartan")

    def __init__(self, kind: str, basis, delta=None, cartan=None):
        if kind not in _KINDS:
            raise ValueError(f"unknown parameter-space kind {kind!r}")
        self.kind = kind
        self.basis = tuple(str(b) for b in basis)
        self.delta = None if delta is None else tuple(int(d) for d in delta)
        if kind in ("zhat", "zhat0"):
            if self.delta is None:
                raise ValueError(f"{kind} space needs its delta vector")
            if len(self.delta) != len(self.basis) - 1:
                raise ValueError("delta length does not match the eps basis")
        self.cartan = cartan
        if cartan is not None and len(cartan.matrix) != len(self.basis) - 1:
            raise ValueError("Cartan size does not match the eps basis")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __eq__(self, other):
        if not isinstance(other, ParamSpace):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.basis == other.basis
            and self.delta == other.delta
        )

    def __repr__(self):
        return f"ParamSpace({self.kind}, {'/'.join(self.basis)})"

    def to_json(self):
        out = {"kind": self.kind, "basis": list(self.basis)}
        if self.delta is not None:
            out["delta"] = list(self.delta)
        return out


def sra_wreath_space(l: int) -> ParamSpace:
    return ParamSpace(
        "sra_wreath", ("h",) + tuple(f"c{j}" for j in range(1, l + 1)) + ("k",)
    )


def sra_klein_space(r: int) -> ParamSpace:
    return ParamSpace("sra_klein", ("h",) + tuple(f"c{j}" for j in range(1, r + 1)))


def zhat_space(delta, cartan: CartanData = None) -> ParamSpace:
    names = ("h",) + tuple(f"eps{i}" for i in range(len(delta)))
    return ParamSpace("zhat", names, delta=delta, cartan=cartan)


def zhat0_space(delta, cartan: CartanData = None) -> ParamSpace:
    names = ("h",) + tuple(f"eps{i}" for i in range(len(delta)))
    return ParamSpace("zhat0", names, delta=delta, cartan=cartan)


def astar_space(n: int) -> ParamSpace:
    return ParamSpace("astar", tuple(f"eps{i}" for i in range(1, n)))


class ParamVec:
    """An element of a ParamSpace, stored as exact coefficients in the
    space's basis.  zhat0 vectors must satisfy the canonical-representative
    condition: the delta-weighted sum of the eps coefficients vanishes."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space: ParamSpace, coeffs):
        coeffs = tuple(_coeff(c) for c in coeffs)
        if len(coeffs) != space.dim:
            raise ValueError(
                f"expected {space.dim} coefficients, got {len(coeffs)}"
            )
        self.space = space
        self.coeffs = coeffs
        if space.kind == "zhat0":
            if not _is_zero(self.delta_pairing()):
                raise ValueError(
                    "zhat0 representative must pair to zero with delta"
                )

    def delta_pairing(self):
        """Sum of delta_i times the eps_i coefficient (h excluded)."""
        if self.space.delta is None:
            raise ValueError(f"{self.space.kind} space carries no delta")
        total = Fraction(0)
        for d, c in zip(self.space.delta, self.coeffs[1:]):
            total = total + c * d
        return total

    def __add__(self, other):
        if not isinstance(other, ParamVec) or other.space != self.space:
            return NotImplemented
        return ParamVec(
            self.space, [a + b for a, b in zip(self.coeffs, other.coeffs)]
        )

    def __sub__(self, other):
        if not isinstance(other, ParamVec) or other.space != self.space:
            return NotImplemented
        return ParamVec(
            self.space, [a - b for a, b in zip(self.coeffs, other.coeffs)]
        )

    def scale(self, s) -> "ParamVec":
        return ParamVec(self.space, [c * s for c in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, ParamVec):
            return NotImplemented
        return self.space == other.space and list(self.coeffs) == list(other.coeffs)

    def __repr__(self):
        body = ", ".join(
            f"{n}={c}" for n, c in zip(self.space.basis, self.coeffs) if not _is_zero(c)
        )
        return f"ParamVec({self.space.kind}: {body or '0'})"

    def to_json(self):
        return {
            "space": self.space.to_json(),
            "coeffs": [scalar_to_json(c) for c in self.coeffs],
        }


def _is_zero(x) -> bool:
    if isinstance(x, CycScalar):
        return x.is_zero()
    return x == 0


class ParamMap:
    """An exact linear map between two parameter spaces.

    matrix columns are the images of the source basis vectors written in
    the target basis.  inverse holds the verified inverse-direction
    matrix: a two-sided inverse when both spaces have the same dimension,
    and the defining system (whose rows are the target coordinates of
    the source-basis images, a left inverse on canonical representatives)
    in the zhat0 case.  extended, present only on the zhat0 map, is the
    square system matrix obtained by appending the delta-pairing row; its
    exact inverse produces the forward images.
    """

    __slots__ = ("source", "target", "matrix", "inverse", "extended")

    def __init__(self, source, target, matrix, inverse, extended=None):
        self.source = source
        self.target = target
        self.matrix = matrix
        self.inverse = inverse
        self.extended = extended

    def apply(self, vec) -> ParamVec:
        coeffs = self._coeffs_of(vec, self.source)
        out = self.matrix * Matrix.column(coeffs)
        return ParamVec(self.target, out.col(0))

    def invert(self, vec) -> ParamVec:
        coeffs = self._coeffs_of(vec, self.target)
        out = self.inverse * Matrix.column(coeffs)
        return ParamVec(self.source, out.col(0))

    @staticmethod
    def _coeffs_of(vec, space: ParamSpace):
        if isinstance(vec, ParamVec):
            if vec.space != space:
                raise ValueError(
                    f"vector lives in {vec.space.kind}, expected {space.kind}"
                )
            return list(vec.coeffs)
        coeffs = [_coeff(c) for c in vec]
        if len(coeffs) != space.dim:
            raise ValueError(f"expected {space.dim} coefficients")
        return coeffs

    def to_json(self):
        out = {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "matrix": self.matrix.to_json(),
            "inverse": self.inverse.to_json(),
        }
        if self.extended is not None:
            out["extended"] = self.extended.to_json()
        return out


def _element_power(g: KleinianGroup, idx: int, k: int) -> int:
    out = 0
    for _ in range(k):
        out = g.mul_index(out, idx)
    return out


def _class_is_galois_stable(g: KleinianGroup, cls_index: int) -> bool:
    rep = g.classes[cls_index][0]
    m = g.element_order(rep)
    for k in range(2, m):
        if gcd(k, m) != 1:
            continue
        if g.class_of[_element_power(g, rep, k)] != cls_index:
            return False
    return True


def _class_character_sums(g: KleinianGroup):
    """Per nontrivial class j (1-based in the group's class order), the
    vector over irreducibles i of the character sum over the class.
    Sums over Galois-stable classes are demanded rational."""
    sizes = g.class_sizes()
    sums = []
    for j in range(1, len(g.classes)):
        stable = _class_is_galois_stable(g, j)
        col = []
        for i in range(len(g.classes)):
            total = g.char_table[i][j] * sizes[j]
            if stable and not total.is_rational():
                raise NonRationalTrace(
                    f"class {j} is stable under the Galois power maps but the"
                    f" character sum against irreducible {i} is {total!r}"
                )
            col.append(_coeff(total))
        sums.append(col)
    return sums


def _group_rank(g: KleinianGroup) -> int:
    return len(g.classes) - 1


def _zhat_of_group(g: KleinianGroup, kind: str) -> ParamSpace:
    from .mckay import mckay_quiver

    quiver, delta = mckay_quiver(g)
    cartan = CartanData.from_quiver(quiver)
    names = ("h",) + tuple(f"eps{i}" for i in range(len(delta)))
    return ParamSpace(kind, names, delta=delta, cartan=cartan)


def _translation_columns(g: KleinianGroup):
    """Columns of the eps_i |-> tr_{N_i} images over (h, c_1..c_r): the
    h-coefficient is dim N_i and the c_j-coefficient is the character
    sum of N_i over the j-th nontrivial class."""
    r = _group_rank(g)
    sums = _class_character_sums(g)
    cols = []
    for i in range(r + 1):
        col = [Fraction(int(g.dims[i]))]
        col.extend(sums[j][i] for j in range(r))
        cols.append(col)
    return cols


def build_upsilon(g: KleinianGroup, n: int) -> ParamMap:
    """The wreath-case parameter translation, inverted exactly.

    The defining direction sends h to h, eps_0 to the trivial-type trace
    plus |G| k minus half |G| h, and eps_i to the i-th trace; the
    returned map is its exact inverse, from (h, c_1..c_r, k) coordinates
    to (h, eps_0..eps_r)."""
    if int(n) != n or n <= 1:
        raise ValueError("the wreath translation needs n > 1")
    if g.order <= 1:
        raise ValueError("the group must be nontrivial")
    r = _group_rank(g)
    order = Fraction(g.order)
    cols = _translation_columns(g)

    # Rows of the defining system: (h, c_1..c_r, k); columns (h, eps_0..eps_r).
    rows_n = r + 2
    sys_cols = [[Fraction(1)] + [Fraction(0)] * (r + 1)]
    for i in range(r + 1):
        col = list(cols[i])
        kcoef = Fraction(0)
        if i == 0:
            col[0] = col[0] - order / 2
            kcoef = order
        sys_cols.append(col + [kcoef])
    system = Matrix.from_columns(sys_cols, rows=rows_n)
    try:
        forward = system.inverse()
    except DomainError as exc:
        raise NotInvertible(f"the wreath translation system is singular: {exc}")
    source = sra_wreath_space(r)
    target = _zhat_of_group(g, "zhat")
    if (forward * system != Matrix.identity(rows_n)) or (
        system * forward != Matrix.identity(rows_n)
    ):
        raise NotInvertible("inverse verification failed")
    return ParamMap(source, target, forward.map(_coeff), system.map(_coeff))


def _delta_relation_check(image_cols, delta):
    """Well-definedness of the n = 1 translation: the delta-weighted sum
    of the eps-image columns must vanish coordinatewise."""
    for coord in range(len(image_cols[0])):
        total = Fraction(0)
        for i, col in enumerate(image_cols):
            total = total + col[coord] * delta[i]
        if not _is_zero(total):
            raise RelationViolated(
                f"delta-weighted image sum has a nonzero coordinate-{coord}"
                f" coefficient {total}"
            )


def build_upsilon0(g: KleinianGroup) -> ParamMap:
    """The Kleinian (n = 1) translation onto canonical representatives.

    The defining direction sends eps_0 to the trivial-type trace minus
    |G| h and eps_i to the i-th trace.  The images satisfy one linear
    relation: their delta-weighted sum vanishes, so the system drops
    rank by one and is completed by the delta-pairing row; the forward
    map sends (h, c_1..c_r) to the unique preimage with delta-pairing
    zero."""
    r = _group_rank(g)
    order = Fraction(g.order)
    cols = _translation_columns(g)
    target = _zhat_of_group(g, "zhat0")
    delta = target.delta

    sys_cols = [[Fraction(1)] + [Fraction(0)] * r]
    for i in range(r + 1):
        col = list(cols[i])
        if i == 0:
            col[0] = col[0] - order
        sys_cols.append(col)

    _delta_relation_check(sys_cols[1:], delta)

    delta_row = [Fraction(0)] + [Fraction(d) for d in delta]
    extended_rows = []
    for coord in range(r + 1):
        extended_rows.append([sys_cols[j][coord] for j in range(r + 2)])
    extended_rows.append(delta_row)
    extended = Matrix(extended_rows)
    try:
        ext_inv = extended.inverse()
    except DomainError as exc:
        raise NotInvertible(f"the Kleinian translation system is singular: {exc}")

    forward = ext_inv.submatrix(range(r + 2), range(r + 1))
    inverse = extended.submatrix(range(r + 1), range(r + 2))
    if inverse * forward != Matrix.identity(r + 1):
        raise NotInvertible("inverse verification failed")
    for j in range(r + 1):
        image = ParamVec(target, forward.col(j))
        del image  # constructor enforces the canonical-representative relation
    source = sra_klein_space(r)
    return ParamMap(
        source,
        target,
        forward.map(_coeff),
        inverse.map(_coeff),
        extended=extended.map(_coeff),
    )


def hstar_to_z0(lam, delta) -> ParamVec:
    """Simple-root coefficients to the delta-orthogonal eps hyperplane:
    eps_i coefficient lambda_i for i >= 1, eps_0 coefficient chosen so
    the delta-pairing vanishes exactly."""
    delta = tuple(int(d) for d in delta)
    lam = [_frac(x) for x in lam]
    if len(lam) != len(delta) - 1:
        raise ValueError("expected one coefficient per finite node")
    top = Fraction(0)
    for d, x in zip(delta[1:], lam):
        top = top + d * x
    chi0 = -top / delta[0]
    return ParamVec(zhat0_space(delta), [Fraction(0), chi0] + lam)


def a_to_zstar(x, r) -> tuple:
    """Trace-zero diagonal values to partial-sum eps coefficients:
    the i-th output is sum of r_j x_j over j <= i, for i = 1..n-1."""
    r = [int(v) for v in r]
    x = [_frac(v) for v in x]
    if len(x) != len(r):
        raise ValueError("diagonal values and composition differ in length")
    trace = Fraction(0)
    for rj, xj in zip(r, x):
        trace = trace + rj * xj
    if trace != 0:
        raise NonTraceZero(f"weighted trace is {trace}, not zero")
    out = []
    running = Fraction(0)
    for rj, xj in zip(r[:-1], x[:-1]):
        running = running + rj * xj
        out.append(running)
    return tuple(out)


def _cartan_for(chi: ParamVec, cartan: CartanData):
    if cartan is None:
        cartan = chi.space.cartan
    if cartan is None:
        raise ValueError(
            "the vector's space carries no Cartan matrix; pass one explicitly"
        )
    if len(cartan.matrix) != chi.space.dim - 1:
        raise ValueError("Cartan size does not match the eps basis")
    return cartan


def weyl_act(
    word, chi: ParamVec, cartan: CartanData = None, shift: bool = False
) -> ParamVec:
    """Apply a word in the finite-node simple reflections to an eps-basis
    vector, h fixed.  The reflection at node i replaces each eps_j
    coefficient by chi_j - a_ij chi_i (weight-side formula), which pairs
    with dimension vectors contragrediently to the root-side reflection
    and preserves the delta-pairing.  word[0] acts first.

    shift=True applies the rho-shifted (dot) variant instead, reading
    chi_i + 1 at the reflected node; it is conjugate to the plain action
    by the translation with unit coefficient at every finite node, so it
    satisfies the same braid relations and still fixes h and the
    delta-pairing.  It is never applied implicitly."""
    if chi.space.kind not in ("zhat", "zhat0"):
        raise ValueError("the Weyl action lives on the eps-coordinate spaces")
    cartan = _cartan_for(chi, cartan)
    a = cartan.matrix
    rank = len(a) - 1
    rho = Fraction(1) if shift else Fraction(0)
    coeffs = list(chi.coeffs)
    for i in word:
        if int(i) != i or not 1 <= i <= rank:
            raise ValueError(
                f"reflection index {i} outside the finite nodes 1..{rank}"
            )
        ci = coeffs[1 + i] + rho
        for j in range(rank + 1):
            if a[i][j]:
                coeffs[1 + j] = coeffs[1 + j] - a[i][j] * ci
    return ParamVec(chi.space, coeffs)


def sigma_flip(chi: ParamVec, delta=None) -> ParamVec:
    """The parameter flip: decompose chi into a delta-orthogonal part
    plus a multiple of the complement direction and negate the latter.

    The complement direction is eps_0, the unique coordinate direction
    fixed by every finite-node reflection; with this choice the flip is
    an involution and commutes with weyl_act exactly.  Vectors with zero
    delta-pairing are fixed."""
    if chi.space.delta is None and delta is None:
        raise ValueError("no delta vector available")
    if delta is not None:
        delta = tuple(int(d) for d in delta)
        if chi.space.delta is not None and delta != chi.space.delta:
            raise ValueError("delta disagrees with the vector's space")
    else:
        delta = chi.space.delta
    t = Fraction(0)
    for d, c in zip(delta, chi.coeffs[1:]):
        t = t + c * d
    coeffs = list(chi.coeffs)
    coeffs[1] = coeffs[1] - 2 * t / delta[0]
    return ParamVec(chi.space, coeffs)
