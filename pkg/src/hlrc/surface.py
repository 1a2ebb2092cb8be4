"""Fibered surfaces ``L(y) = f(x, z)`` and their evaluation sets.

Two families are supported:

* :class:`ArtinSchreierSurface` -- ``y^p - y = f(x, z)`` (or ``y^e + y = f``
  for cones over Hermitian-type curves), a degree-p cover of the (x, z) plane;
* :class:`KummerSurface` -- ``y^lam = c x^h z^nu prod(x - a_i z)``.

Cutting with ``z = gamma`` gives the fiber curve ``Z_gamma``.  The admissible
set of ``gamma`` and the evaluation set ``T`` are built by brute-force
enumeration over the field.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field
from typing import Mapping, Union

import numpy as np

from .errors import EmptyGammaSet, InvalidSurface
from .gf import (
    AdditiveLHS,
    Field,
    FieldElement,
    additive_preimages,
    has_primitive_root_of_unity,
    kummer_preimages,
)


@dataclass(frozen=True)
class BivariatePoly:
    """Sparse polynomial ``sum c_{ik} x^i z^k``; ``terms`` holds only nonzero coefficients."""

    field: Field
    terms: tuple[tuple[tuple[int, int], FieldElement], ...]

    @classmethod
    def from_dict(cls, field: Field, coeffs: Mapping[tuple[int, int], object]) -> "BivariatePoly":
        acc: dict[tuple[int, int], FieldElement] = {}
        for (i, k), c in coeffs.items():
            if i < 0 or k < 0:
                raise ValueError("exponents must be non-negative")
            c = field.element(c) if not isinstance(c, FieldElement) else field.element(c)
            acc[(i, k)] = acc.get((i, k), field.zero) + c
        items = tuple(sorted((ik, c) for ik, c in acc.items() if c))
        return cls(field, items)

    @property
    def coeffs(self) -> dict[tuple[int, int], FieldElement]:
        return dict(self.terms)

    @property
    def deg_x(self) -> int:
        return max((i for (i, _), _ in self.terms), default=-1)

    @property
    def deg_z(self) -> int:
        return max((k for (_, k), _ in self.terms), default=-1)

    def evaluate(self, x, z):
        """Vectorised evaluation on index arrays (broadcasting)."""
        F = self.field
        x = np.asarray(x, dtype=np.int64)
        z = np.asarray(z, dtype=np.int64)
        out = np.zeros(np.broadcast(x, z).shape, dtype=np.int64)
        for (i, k), c in self.terms:
            term = F.vmul(F.vpow(x, i), F.vpow(z, k))
            out = F.vadd(out, F.vmul(np.full_like(term, c.value), term))
        return out

    def __call__(self, x: FieldElement, z: FieldElement) -> FieldElement:
        return FieldElement(self.field, int(self.evaluate(x.value, z.value)))

    def __str__(self):
        parts = []
        for (i, k), c in self.terms:
            mono = "*".join(m for m in (f"x^{i}" if i else "", f"z^{k}" if k else "") if m)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts) or "0"


@dataclass(frozen=True)
class KummerProductForm:
    """``f(x, z) = c * x^h * z^nu * prod_i (x - a_i z)`` with distinct nonzero ``a_i``."""

    field: Field
    c: FieldElement
    h: int
    nu: int
    roots: tuple[FieldElement, ...]

    def __post_init__(self):
        F = self.field
        object.__setattr__(self, "c", F.element(self.c))
        object.__setattr__(self, "roots", tuple(F.element(a) for a in self.roots))
        if not self.c:
            raise InvalidSurface("leading constant c must be nonzero")
        if self.h < 0 or self.nu < 0:
            raise InvalidSurface("exponents h and nu must be non-negative")
        if any(not a for a in self.roots):
            raise InvalidSurface("roots a_i must be nonzero")
        if len(set(self.roots)) != len(self.roots):
            raise InvalidSurface("roots a_i must be pairwise distinct")
        if self.mu < 1 or self.h > self.mu - 1:
            raise InvalidSurface("need 0 <= h <= mu - 1, i.e. at least one linear factor")

    @property
    def mu(self) -> int:
        """Degree of ``f`` in ``x``."""
        return self.h + len(self.roots)

    def specialize_ints(self, gamma: int) -> list[int]:
        F = self.field
        poly = [F.imul(self.c.value, F.ipow(gamma, self.nu))]
        for a in self.roots:
            shift = F.ineg(F.imul(a.value, gamma))
            # multiply by (x + shift)
            new = [0] * (len(poly) + 1)
            for i, coef in enumerate(poly):
                new[i + 1] = F.iadd(new[i + 1], coef)
                new[i] = F.iadd(new[i], F.imul(coef, shift))
            poly = new
        return [0] * self.h + poly

    def to_bivariate(self) -> BivariatePoly:
        """Expanded form, used for equation checks and display."""
        F = self.field
        # product of (x - a_i z) as a dict over (i, k) with i + k fixed
        poly = {(0, 0): self.c}
        for a in self.roots:
            new: dict[tuple[int, int], FieldElement] = {}
            for (i, k), coef in poly.items():
                new[(i + 1, k)] = new.get((i + 1, k), F.zero) + coef
                new[(i, k + 1)] = new.get((i, k + 1), F.zero) - coef * a
            poly = new
        return BivariatePoly.from_dict(F, {(i + self.h, k + self.nu): c for (i, k), c in poly.items()})


@dataclass(frozen=True)
class ArtinSchreierSurface:
    """``L(y) = f(x, z)`` with ``L`` additive (default ``y^p - y``)."""

    field: Field
    f: BivariatePoly
    lhs: AdditiveLHS | None = None
    relaxed_degree: bool = False
    kind = "artin-schreier"

    def __post_init__(self):
        if self.lhs is None:
            object.__setattr__(self, "lhs", AdditiveLHS.artin_schreier(self.field.p))
        self.lhs.check(self.field)
        if self.f.field != self.field:
            raise InvalidSurface("f is defined over a different field")
        if not self.relaxed_degree and self.s < self.lhs.exponent + 1:
            raise InvalidSurface(
                f"deg_x f = {self.s} must be at least {self.lhs.exponent + 1} (use relaxed_degree to override)"
            )

    @property
    def cover_degree(self) -> int:
        return int(additive_preimages(self.field, self.lhs).count[0])

    @property
    def s(self) -> int:
        return self.f.deg_x

    def specialize_ints(self, gamma: int) -> list[int]:
        deg = max(self.s, 0)
        coeffs = [0] * (deg + 1)
        F = self.field
        for (i, k), c in self.f.terms:
            coeffs[i] = F.iadd(coeffs[i], F.imul(c.value, F.ipow(gamma, k)))
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        return coeffs

    def residual(self, x, y, z):
        """``L(y) - f(x, z)`` on index arrays; zero exactly on the surface."""
        F = self.field
        return F.vsub(self.lhs.evaluate(F, np.asarray(y)), self.f.evaluate(x, z))

    def equation(self) -> str:
        return f"{self.lhs} = {self.f}"


@dataclass(frozen=True)
class KummerSurface:
    """``y^lam = f(x, z)`` with ``f`` in product form."""

    field: Field
    lam: int
    f: KummerProductForm
    kind = "kummer"

    def __post_init__(self):
        if not has_primitive_root_of_unity(self.field, self.lam):
            raise InvalidSurface(f"lambda = {self.lam} does not divide q - 1 = {self.field.q - 1}")
        if self.f.field != self.field:
            raise InvalidSurface("f is defined over a different field")
        if not (self.f.mu < self.lam and self.f.nu < self.lam):
            raise InvalidSurface("need mu < lambda and nu < lambda")

    @property
    def cover_degree(self) -> int:
        return self.lam

    @property
    def s(self) -> int:
        return self.f.mu

    @property
    def mu(self) -> int:
        return self.f.mu

    def specialize_ints(self, gamma: int) -> list[int]:
        coeffs = self.f.specialize_ints(gamma)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        return coeffs

    def residual(self, x, y, z):
        F = self.field
        return F.vsub(F.vpow(np.asarray(y), self.lam), self.f.to_bivariate().evaluate(x, z))

    def equation(self) -> str:
        return f"y^{self.lam} = {self.f.to_bivariate()}"


SurfaceSpec = Union[ArtinSchreierSurface, KummerSurface]


def specialize(f: BivariatePoly | KummerProductForm, gamma) -> list[FieldElement]:
    """Coefficients of ``f(x, gamma)`` (constant term first, trailing zeros dropped)."""
    F = f.field
    g = F.element(gamma).value
    if isinstance(f, KummerProductForm):
        coeffs = f.specialize_ints(g)
    else:
        coeffs = [0] * (max(f.deg_x, 0) + 1)
        for (i, k), c in f.terms:
            coeffs[i] = F.iadd(coeffs[i], F.imul(c.value, F.ipow(g, k)))
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return [FieldElement(F, c) for c in coeffs]


def _horner(F: Field, coeffs: list[int], x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    for c in reversed(coeffs):
        out = F.vadd(F.vmul(out, x), c)
    return out


# -- fibers -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FiberArrays:
    """Index-array form of a fiber: points sorted by (x, y) in canonical order."""

    gamma: int
    xs: np.ndarray
    ys: np.ndarray
    ramified: np.ndarray  # bool mask: y = 0 over a zero of f(x, gamma) (Kummer only)
    degree: int  # deg_x f(x, gamma), -1 for the zero polynomial

    @property
    def x_image(self) -> np.ndarray:
        xs = self.xs[~self.ramified]
        _, first = np.unique(xs, return_index=True)
        return xs[np.sort(first)]


def _fiber_arrays(surface: SurfaceSpec, gamma: int) -> FiberArrays:
    F = surface.field
    xs_all = F.canonical
    spec = surface.specialize_ints(gamma)
    cx = _horner(F, spec, xs_all)
    if isinstance(surface, KummerSurface):
        table = kummer_preimages(F, surface.lam)
    else:
        table = additive_preimages(F, surface.lhs)
    counts = table.count[cx]
    xs = np.repeat(xs_all, counts)
    offsets = np.repeat(table.start[cx], counts)
    within = np.arange(xs.size) - np.repeat(np.cumsum(counts) - counts, counts)
    ys = table.sols[offsets + within]
    if isinstance(surface, KummerSurface):
        ramified = np.repeat(cx == 0, counts)
    else:
        ramified = np.zeros(xs.size, dtype=bool)
    return FiberArrays(gamma, xs, ys, ramified, len(spec) - 1)


@dataclass(frozen=True)
class FiberPoints:
    """Affine points of ``Z_gamma``; Kummer ramification points are flagged, not dropped."""

    gamma: FieldElement
    points: tuple[tuple[FieldElement, FieldElement], ...]
    x_image: tuple[FieldElement, ...]
    ramified: tuple[tuple[FieldElement, FieldElement], ...] = ()


def fiber_points(surface: SurfaceSpec, gamma) -> FiberPoints:
    F = surface.field
    g = F.element(gamma)
    fa = _fiber_arrays(surface, g.value)
    pts = tuple((FieldElement(F, x), FieldElement(F, y)) for x, y in zip(fa.xs.tolist(), fa.ys.tolist()))
    ram = tuple(pt for pt, r in zip(pts, fa.ramified.tolist()) if r)
    return FiberPoints(g, pts, tuple(FieldElement(F, x) for x in fa.x_image.tolist()), ram)


@functools.lru_cache(maxsize=64)
def _all_fibers(surface: SurfaceSpec) -> tuple[FiberArrays, ...]:
    return tuple(_fiber_arrays(surface, g) for g in surface.field.canonical.tolist())


def _eligible(surface: SurfaceSpec, fa: FiberArrays) -> bool:
    """The non-eta part of the admissibility predicate."""
    if isinstance(surface, KummerSurface):
        return fa.gamma != 0
    return fa.degree == surface.s


def max_eta(surface: SurfaceSpec) -> int:
    """Largest x-image size over eligible fibers (the admissible upper bound for eta)."""
    return max((fa.x_image.size for fa in _all_fibers(surface) if _eligible(surface, fa)), default=0)


def gamma_set(surface: SurfaceSpec, eta: int) -> list[FieldElement]:
    """Admissible fiber parameters in canonical order."""
    if eta < 0:
        raise ValueError("eta must be non-negative")
    F = surface.field
    out = [FieldElement(F, fa.gamma) for fa in _all_fibers(surface)
           if _eligible(surface, fa) and fa.x_image.size >= eta]
    if not out:
        raise EmptyGammaSet(f"no fiber has at least {eta} distinct x-coordinates")
    return out


@dataclass(frozen=True, eq=False)
class EvaluationSet:
    """The ordered evaluation set ``T`` with its group structure.

    ``middle[i]`` is the position of the fiber (index into ``gammas``) holding
    point ``i``; ``lower[i]`` numbers the ``(x, z)`` fibers consecutively.
    """

    surface: SurfaceSpec
    eta: int
    gammas: tuple[FieldElement, ...]
    xs: np.ndarray
    ys: np.ndarray
    zs: np.ndarray
    middle: np.ndarray
    lower: np.ndarray
    x_images: tuple[int, ...] = dc_field(default=())

    @property
    def field(self) -> Field:
        return self.surface.field

    @property
    def n(self) -> int:
        return int(self.xs.size)

    def __len__(self):
        return self.n

    @property
    def per_gamma_counts(self) -> list[int]:
        return np.bincount(self.middle, minlength=len(self.gammas)).tolist()

    @property
    def points(self) -> list[tuple[FieldElement, FieldElement, FieldElement]]:
        F = self.field
        return [(FieldElement(F, x), FieldElement(F, y), FieldElement(F, z))
                for x, y, z in zip(self.xs.tolist(), self.ys.tolist(), self.zs.tolist())]

    def rows(self) -> list[dict]:
        """Export rows ``(index, x, y, z)`` with coefficient-vector entries."""
        d = self.field.digits
        return [
            {"index": i, "x": d(x).tolist(), "y": d(y).tolist(), "z": d(z).tolist()}
            for i, (x, y, z) in enumerate(zip(self.xs.tolist(), self.ys.tolist(), self.zs.tolist()))
        ]


def evaluation_set(surface: SurfaceSpec, eta: int) -> EvaluationSet:
    F = surface.field
    gammas = gamma_set(surface, eta)
    fibers = {fa.gamma: fa for fa in _all_fibers(surface)}
    xs, ys, zs, mid, images = [], [], [], [], []
    for pos, g in enumerate(gammas):
        fa = fibers[g.value]
        keep = ~fa.ramified
        xs.append(fa.xs[keep])
        ys.append(fa.ys[keep])
        zs.append(np.full(int(keep.sum()), g.value, dtype=np.int64))
        mid.append(np.full(int(keep.sum()), pos, dtype=np.int64))
        images.append(int(fa.x_image.size))
    xs, ys, zs, mid = (np.concatenate(a) for a in (xs, ys, zs, mid))
    # (x, z) changes exactly where a new lower group starts; points are sorted by (z, x, y)
    new_group = np.ones(xs.size, dtype=bool)
    new_group[1:] = (xs[1:] != xs[:-1]) | (zs[1:] != zs[:-1])
    lower = np.cumsum(new_group) - 1
    if np.any(surface.residual(xs, ys, zs) != 0):
        raise AssertionError("evaluation point off the surface")
    return EvaluationSet(surface, eta, tuple(gammas), xs, ys, zs, mid, lower, tuple(images))


# -- worked-example families ------------------------------------------------

def as_example_surface(p: int) -> ArtinSchreierSurface:
    """``y^p - y = x^{p+1} z^2 + x^2 z^{p+1}`` over GF(p^2)."""
    from .gf import make_field

    F = make_field(p, 2)
    f = BivariatePoly.from_dict(F, {(p + 1, 2): 1, (2, p + 1): 1})
    return ArtinSchreierSurface(F, f)


def kummer_example_surface(q: int) -> KummerSurface:
    """``y^{q+1} = -x^m z^m (x^m + z^m)`` over GF(q^2), with ``q = 2 mod 3`` and ``m = (q+1)/3``."""
    from .gf import field_of_order, make_field

    if q % 3 != 2:
        raise InvalidSurface("the example family needs q = 2 mod 3")
    base = field_of_order(q)
    F = make_field(base.p, 2 * base.h)
    m = (q + 1) // 3
    minus_one = F.from_int(-1)
    roots = tuple(a for a in F.elements() if a ** m == minus_one)
    form = KummerProductForm(F, minus_one, m, m, roots)
    return KummerSurface(F, q + 1, form)


def hermitian_cone_surface(q: int) -> ArtinSchreierSurface:
    """Cone ``y^q + y = x^{q+1}`` over GF(q^2)."""
    from .gf import field_of_order, make_field

    base = field_of_order(q)
    F = make_field(base.p, 2 * base.h)
    f = BivariatePoly.from_dict(F, {(q + 1, 0): 1})
    return ArtinSchreierSurface(F, f, AdditiveLHS.trace_like(q))
