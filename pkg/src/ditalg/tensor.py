"""The layered graded tensor algebra of a bigraph.

Elements are kept in a canonical normal form: a term is a decorated arrow word
whose decorations are k-basis elements of the point factor rings, together
with one field scalar.  Equal elements therefore have identical term
dictionaries, which makes every downstream membership or identity check a
plain linear-algebra question.

Decoration basis of a rational factor k[x]_h: the monomials x^a together with
the h-adic fractions x^b/h^j (j >= 1, 0 <= b < deg h).  Trivial factors only
carry the unit decoration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .bigraph import Bigraph, BigraphError, Factor
from .scalars import Field, LocElt, LocalizedRing, Poly

# decoration basis key: (a, j) represents x^a / h^j; j = 0 is the monomial x^a,
# and for j >= 1 the numerator satisfies a < deg h.
BasisKey = Tuple[int, int]
UNIT: BasisKey = (0, 0)


def decompose_locelt(ring: LocalizedRing, elt: LocElt) -> List[Tuple[BasisKey, object]]:
    """Expand an element of k[x]_h over the canonical decoration basis."""
    F = ring.field
    out: List[Tuple[BasisKey, object]] = []
    num, e = elt.num, elt.den_exp
    if num.is_zero():
        return out
    if e == 0:
        for i, c in enumerate(num.coeffs):
            if not F.is_zero(c):
                out.append(((i, 0), c))
        return out
    he = ring.h ** e
    q, rem = num.divmod(he)
    for i, c in enumerate(q.coeffs):
        if not F.is_zero(c):
            out.append(((i, 0), c))
    # h-adic digits of the proper fraction rem / h^e
    m = 0
    cur = rem
    while not cur.is_zero() and m < e:
        cur, digit = cur.divmod(ring.h)
        for b, c in enumerate(digit.coeffs):
            if not F.is_zero(c):
                out.append(((b, e - m), c))
        m += 1
    return out


def key_to_locelt(ring: LocalizedRing, key: BasisKey) -> LocElt:
    a, j = key
    return LocElt(ring, Poly.x(ring.field) ** a, j)


def mul_keys(ring: Optional[LocalizedRing], k1: BasisKey, k2: BasisKey):
    """Product of two decoration basis elements, re-expanded over the basis."""
    if ring is None:
        if k1 != UNIT or k2 != UNIT:
            raise ValueError("trivial factor admits only the unit decoration")
        return [(UNIT, None)]  # scalar one, caller keeps its own coefficient
    prod = ring.mul(key_to_locelt(ring, k1), key_to_locelt(ring, k2))
    return decompose_locelt(ring, prod)


@dataclass(frozen=True)
class Word:
    """Decorated path.  `arrows` are in application order (index 0 acts
    first); `coeffs[i]` is the decoration at the i-th point of the path, so
    `coeffs[0]` sits at the start point and `coeffs[-1]` at the end."""

    start: str
    arrows: Tuple[str, ...]
    coeffs: Tuple[BasisKey, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.arrows) + 1:
            raise ValueError("decoration count must be arrow count + 1")

    def path(self, b: Bigraph) -> List[str]:
        pts = [self.start]
        for name in self.arrows:
            pts.append(b.arrow(name).target)
        return pts

    def end(self, b: Bigraph) -> str:
        return b.arrow(self.arrows[-1]).target if self.arrows else self.start

    def degree(self, b: Bigraph) -> int:
        return sum(1 for a in self.arrows if b.arrow(a).dashed)

    def length(self) -> int:
        return len(self.arrows)

    def __str__(self):
        if not self.arrows:
            a, j = self.coeffs[0]
            dec = "" if (a, j) == UNIT else f"[x^{a}/h^{j}]"
            return f"{dec}e_{self.start}"
        parts = []
        for i in range(len(self.arrows) - 1, -1, -1):
            ck = self.coeffs[i + 1]
            if ck != UNIT:
                parts.append(f"[x^{ck[0]}/h^{ck[1]}]")
            parts.append(self.arrows[i])
        if self.coeffs[0] != UNIT:
            parts.append(f"[x^{self.coeffs[0][0]}/h^{self.coeffs[0][1]}]")
        return "*".join(parts)


def idempotent_word(point: str) -> Word:
    return Word(point, (), (UNIT,))


class Elem:
    """Tensor algebra element in normal form: dict of Word -> field scalar."""

    __slots__ = ("bigraph", "terms")

    def __init__(self, bigraph: Bigraph, terms: Optional[Dict[Word, object]] = None):
        self.bigraph = bigraph
        self.terms: Dict[Word, object] = {}
        if terms:
            F = bigraph.field
            for w, c in terms.items():
                if not F.is_zero(c):
                    self.terms[w] = c

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(b: Bigraph) -> "Elem":
        return Elem(b)

    @staticmethod
    def idempotent(b: Bigraph, point: str, scalar=None) -> "Elem":
        c = b.field.one if scalar is None else scalar
        return Elem(b, {idempotent_word(point): c})

    @staticmethod
    def unit(b: Bigraph) -> "Elem":
        out = Elem(b)
        for p in b.point_order:
            out = out + Elem.idempotent(b, p)
        return out

    @staticmethod
    def arrow(b: Bigraph, name: str, scalar=None) -> "Elem":
        a = b.arrow(name)
        c = b.field.one if scalar is None else scalar
        return Elem(b, {Word(a.source, (name,), (UNIT, UNIT)): c})

    @staticmethod
    def from_word(b: Bigraph, word: Word, scalar=None) -> "Elem":
        c = b.field.one if scalar is None else scalar
        return Elem(b, {word: c})

    @staticmethod
    def decorated(b: Bigraph, point: str, value: LocElt) -> "Elem":
        """Element c*e_point for a rational point value c."""
        ring = b.factor_ring(point)
        if ring is None:
            raise ValueError(f"{point} is a trivial point")
        out = Elem(b)
        for key, c in decompose_locelt(ring, value):
            out = out + Elem(b, {Word(point, (), (key,)): c})
        return out

    # -- structure --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, Elem) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Elem") -> "Elem":
        F = self.bigraph.field
        out = dict(self.terms)
        for w, c in other.terms.items():
            acc = F.add(out.get(w, F.zero), c)
            if F.is_zero(acc):
                out.pop(w, None)
            else:
                out[w] = acc
        return Elem(self.bigraph, out)

    def __sub__(self, other: "Elem") -> "Elem":
        return self + other.scale(self.bigraph.field.neg(self.bigraph.field.one))

    def __neg__(self) -> "Elem":
        return self.scale(self.bigraph.field.neg(self.bigraph.field.one))

    def scale(self, c) -> "Elem":
        F = self.bigraph.field
        if F.is_zero(c):
            return Elem(self.bigraph)
        return Elem(self.bigraph, {w: F.mul(c, v) for w, v in self.terms.items()})

    def __mul__(self, other: "Elem") -> "Elem":
        """Graded product; non-composable words multiply to zero."""
        b = self.bigraph
        F = b.field
        out: Dict[Word, object] = {}
        for w2, c2 in other.terms.items():  # w2 acts first
            end2 = w2.end(b)
            for w1, c1 in self.terms.items():
                if w1.start != end2:
                    continue
                ring = b.factor_ring(end2)
                scalar = F.mul(c1, c2)
                for key, kc in mul_keys(ring, w1.coeffs[0], w2.coeffs[-1]):
                    word = Word(w2.start, w2.arrows + w1.arrows,
                                w2.coeffs[:-1] + (key,) + w1.coeffs[1:])
                    s = scalar if kc is None else F.mul(scalar, kc)
                    acc = F.add(out.get(word, F.zero), s)
                    if F.is_zero(acc):
                        out.pop(word, None)
                    else:
                        out[word] = acc
        return Elem(b, out)

    def degree_part(self, d: int) -> "Elem":
        b = self.bigraph
        return Elem(b, {w: c for w, c in self.terms.items() if w.degree(b) == d})

    def degrees(self) -> List[int]:
        b = self.bigraph
        return sorted({w.degree(b) for w in self.terms})

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def max_length(self) -> int:
        return max((w.length() for w in self.terms), default=0)

    def component(self, source: str, target: str) -> "Elem":
        b = self.bigraph
        return Elem(b, {w: c for w, c in self.terms.items()
                        if w.start == source and w.end(b) == target})

    def support_points(self) -> set:
        pts = set()
        for w in self.terms:
            pts.update(w.path(self.bigraph))
        return pts

    def __str__(self):
        if not self.terms:
            return "0"
        F = self.bigraph.field
        parts = []
        for w in sorted(self.terms, key=lambda w: (w.length(), str(w))):
            c = self.terms[w]
            cs = "" if c == F.one else f"{F.format(c)}*"
            parts.append(f"{cs}{w}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Elem({self})"


# -- layers and differentials ---------------------------------------------


@dataclass
class Layer:
    """Free generation data: the bigraph plus ascending generator filtrations
    of the solid and dashed arrow bimodules (by arrow-name sets)."""

    bigraph: Bigraph
    w0_levels: Tuple[frozenset, ...] = ()
    w1_levels: Tuple[frozenset, ...] = ()

    def __post_init__(self):
        solid = {a.name for a in self.bigraph.solid_arrows()}
        dashed = {a.name for a in self.bigraph.dashed_arrows()}
        if not self.w0_levels:
            self.w0_levels = (frozenset(solid),) if solid else ()
        if not self.w1_levels:
            self.w1_levels = (frozenset(dashed),) if dashed else ()
        if self.w0_levels and self.w0_levels[-1] != solid:
            raise ValueError("solid filtration must exhaust the solid arrows")
        if self.w1_levels and self.w1_levels[-1] != dashed:
            raise ValueError("dashed filtration must exhaust the dashed arrows")

    def w0_level_of(self, arrow: str) -> int:
        for i, s in enumerate(self.w0_levels):
            if arrow in s:
                return i + 1
        raise KeyError(arrow)

    def w1_level_of(self, arrow: str) -> int:
        for i, s in enumerate(self.w1_levels):
            if arrow in s:
                return i + 1
        raise KeyError(arrow)


class Differential:
    """Generator values delta0 (solid -> degree 1) and delta1 (dashed ->
    degree 2), extended to the whole algebra by the graded Leibniz rule."""

    def __init__(self, layer: Layer, values: Dict[str, Elem]):
        self.layer = layer
        b = layer.bigraph
        self.values: Dict[str, Elem] = {}
        for name, arr in b.arrows.items():
            v = values.get(name)
            if v is None:
                v = Elem.zero(b)
            expected = 2 if arr.dashed else 1
            for w, _ in v.terms.items():
                if w.degree(b) != expected:
                    raise ValueError(f"delta({name}) must be homogeneous of degree {expected}")
                if w.start != arr.source or w.end(b) != arr.target:
                    raise ValueError(f"delta({name}) violates the bimodule constraint")
            self.values[name] = v

    @property
    def bigraph(self) -> Bigraph:
        return self.layer.bigraph

    def of_arrow(self, name: str) -> Elem:
        return self.values[name]

    def apply(self, elem: Elem) -> Elem:
        """Leibniz extension: delta(ab) = delta(a) b + (-1)^deg(a) a delta(b),
        with delta vanishing on all point-factor decorations."""
        b = self.bigraph
        F = b.field
        out = Elem.zero(b)
        for word, scalar in elem.terms.items():
            n = len(word.arrows)
            if n == 0:
                continue
            dashed_after = 0  # degree of the part applied after position j
            for j in range(n - 1, -1, -1):
                name = word.arrows[j]
                dval = self.values[name]
                if not dval.is_zero():
                    sign = F.one if dashed_after % 2 == 0 else F.neg(F.one)
                    prefix = Elem(b, {Word(word.start, word.arrows[:j],
                                           word.coeffs[:j + 1]): F.one})
                    suffix = Elem(b, {Word(b.arrow(name).target, word.arrows[j + 1:],
                                           word.coeffs[j + 1:]): F.one})
                    piece = suffix * dval * prefix
                    out = out + piece.scale(F.mul(scalar, sign))
                if b.arrow(name).dashed:
                    dashed_after += 1
        return out

    def square(self, elem: Elem) -> Elem:
        return self.apply(self.apply(elem))


def graded_component_basis(b: Bigraph, source: str, target: str, degree: int,
                           word_length_cap: int, exp_cap: int = 3,
                           allow_cycles: bool = False) -> List[Word]:
    """Spanning words of e_target [T] e_source in the given degree, up to the
    length cap; exact (cap-independent) when every decoration point is
    trivial.  Rejects non-directed bigraphs unless the caller opts into the
    capped (hence possibly incomplete) enumeration."""
    if not allow_cycles and not b.is_directed():
        raise BigraphError("graded enumeration requires a directed bigraph")

    paths: List[Tuple[str, ...]] = []

    def walk(point, acc):
        if len(acc) <= word_length_cap:
            if point == target and sum(1 for n in acc if b.arrow(n).dashed) == degree:
                paths.append(tuple(acc))
        if len(acc) == word_length_cap:
            return
        for a in b.arrows_from(point):
            acc.append(a.name)
            walk(a.target, acc)
            acc.pop()

    walk(source, [])

    def keys_at(point) -> List[BasisKey]:
        fac = b.factor(point)
        if fac.is_trivial:
            return [UNIT]
        ring = fac.ring(b.field)
        keys = [(a, 0) for a in range(exp_cap + 1)]
        if not ring.h.is_constant():
            keys += [(a, j) for j in range(1, exp_cap + 1) for a in range(ring.h.degree)]
        return keys

    words: List[Word] = []
    for path_arrows in paths:
        pts = [source]
        for n in path_arrows:
            pts.append(b.arrow(n).target)
        if path_arrows == () and source != target:
            continue
        choices = [keys_at(p) for p in pts]

        def fill(i, acc):
            if i == len(choices):
                words.append(Word(source, path_arrows, tuple(acc)))
                return
            for k in choices[i]:
                acc.append(k)
                fill(i + 1, acc)
                acc.pop()

        fill(0, [])
    return words


def elem_coordinates(elems: Sequence[Elem]) -> Tuple[List[Word], List[List]]:
    """Joint word support and coordinate rows of the given elements."""
    support: List[Word] = []
    seen = set()
    for e in elems:
        for w in e.terms:
            if w not in seen:
                seen.add(w)
                support.append(w)
    F = elems[0].bigraph.field if elems else None
    rows = []
    for e in elems:
        rows.append([e.terms.get(w, F.zero) for w in support])
    return support, rows


def in_span(cands: Sequence[Elem], target: Elem) -> bool:
    """Exact linear membership of target in the k-span of cands."""
    if target.is_zero():
        return True
    if not cands:
        return False
    F = target.bigraph.field
    support, rows = elem_coordinates(list(cands) + [target])
    from .scalars import linalg

    span_rows = rows[:-1]
    vec = rows[-1]
    return linalg.row_space_contains(F, span_rows, vec)
