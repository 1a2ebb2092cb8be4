"""Evaluation codes ``C(T, V)`` on fibered surfaces and their parameters.

``V`` is spanned by the monomials ``x^i y^j z^k`` with ``i <= eta - rho1``,
``j <= deg - rho2`` and ``k <= |Gamma| - rho3``, where ``deg`` is the cover
degree of ``y`` over the (x, z) plane (p, or lambda for Kummer surfaces).
"""

from __future__ import annotations

import csv
import functools
import io
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import Condition2Violated, RankDeficient, RhoOutOfRange
from .gf import Field
from .surface import EvaluationSet, KummerSurface, SurfaceSpec, evaluation_set, max_eta


@dataclass(frozen=True)
class CodeSpec:
    """User-facing parameters; ``eta=None`` selects the largest admissible eta."""

    surface: SurfaceSpec
    eta: int | None
    rho1: int
    rho2: int
    rho3: int
    waive_condition2: bool = False


@dataclass(frozen=True, eq=False)
class Code:
    """A validated :class:`CodeSpec` together with its evaluation set."""

    spec: CodeSpec
    eta: int
    evalset: EvaluationSet
    warnings: tuple[str, ...] = ()

    @property
    def surface(self) -> SurfaceSpec:
        return self.spec.surface

    @property
    def field(self) -> Field:
        return self.spec.surface.field

    @property
    def is_kummer(self) -> bool:
        return isinstance(self.spec.surface, KummerSurface)

    @property
    def rho(self) -> tuple[int, int, int]:
        return (self.spec.rho1, self.spec.rho2, self.spec.rho3)

    @property
    def deg(self) -> int:
        return self.surface.cover_degree

    @property
    def s(self) -> int:
        return self.surface.s

    @property
    def n_gamma(self) -> int:
        return len(self.evalset.gammas)

    @property
    def M(self) -> int:
        return self.eta + self.deg - self.spec.rho1 - self.spec.rho2

    @property
    def n(self) -> int:
        return self.evalset.n

    @property
    def k(self) -> int:
        r1, r2, r3 = self.rho
        return (self.eta - r1 + 1) * (self.deg - r2 + 1) * (self.n_gamma - r3 + 1)


def check_rho(kummer: bool, eta: int, deg: int, s: int, n_gamma: int,
              rho1: int, rho2: int, rho3: int, waive_condition2: bool = False) -> list[str]:
    """Range and inequality checks; returns warnings for waived conditions."""
    if kummer:
        if not deg <= rho1 <= eta:
            raise RhoOutOfRange(f"rho1 = {rho1} must satisfy lambda = {deg} <= rho1 <= eta = {eta}")
        if not 2 <= rho2 <= deg:
            raise RhoOutOfRange(f"rho2 = {rho2} must satisfy 2 <= rho2 <= lambda = {deg}")
        if not 1 <= rho3 <= n_gamma:
            raise RhoOutOfRange(f"rho3 = {rho3} must satisfy 1 <= rho3 <= |Gamma| = {n_gamma}")
        return []
    if not 2 <= rho1 <= eta:
        raise RhoOutOfRange(f"rho1 = {rho1} must satisfy 2 <= rho1 <= eta = {eta}")
    if not 2 <= rho2 <= deg:
        raise RhoOutOfRange(f"rho2 = {rho2} must satisfy 2 <= rho2 <= p = {deg}")
    if not 1 <= rho3 <= n_gamma:
        raise RhoOutOfRange(f"rho3 = {rho3} must satisfy 1 <= rho3 <= |Gamma| = {n_gamma}")
    lhs = deg * eta
    rhs = s * (deg - rho2) + deg * (eta - rho1) + 1
    if lhs < rhs:
        msg = f"degree condition fails: p*eta = {lhs} < s(p - rho2) + p(eta - rho1) + 1 = {rhs}"
        if not waive_condition2:
            raise Condition2Violated(msg)
        return [msg + " (waived; the bound rho1*rho2*rho3 still holds)"]
    return []


def validate_spec(spec: CodeSpec) -> Code:
    surface = spec.surface
    eta = max_eta(surface) if spec.eta is None else spec.eta
    evalset = evaluation_set(surface, eta)
    warnings = check_rho(
        isinstance(surface, KummerSurface), eta, surface.cover_degree, surface.s,
        len(evalset.gammas), spec.rho1, spec.rho2, spec.rho3, spec.waive_condition2,
    )
    if spec.eta is None:
        warnings.insert(0, f"eta chosen automatically: {eta}")
    return Code(spec, eta, evalset, tuple(warnings))


@dataclass(frozen=True)
class MonomialBasis:
    """Exponent triples ``(i, j, k)`` of ``x^i y^j z^k`` in lexicographic order."""

    triples: tuple[tuple[int, int, int], ...]

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    @property
    def k(self) -> int:
        return len(self.triples)


def monomial_basis(code: Code) -> MonomialBasis:
    r1, r2, r3 = code.rho
    return MonomialBasis(tuple(
        (i, j, k)
        for i in range(code.eta - r1 + 1)
        for j in range(code.deg - r2 + 1)
        for k in range(code.n_gamma - r3 + 1)
    ))


def evaluate_monomials(F: Field, triples, xs, ys, zs) -> np.ndarray:
    """Matrix of monomial values: one row per triple, one column per point."""
    triples = list(triples)
    max_i = max((t[0] for t in triples), default=0)
    max_j = max((t[1] for t in triples), default=0)
    max_k = max((t[2] for t in triples), default=0)
    px = [F.vpow(xs, e) for e in range(max_i + 1)]
    py = [F.vpow(ys, e) for e in range(max_j + 1)]
    pz = [F.vpow(zs, e) for e in range(max_k + 1)]
    rows = np.empty((len(triples), len(xs)), dtype=np.int64)
    for r, (i, j, k) in enumerate(triples):
        rows[r] = F.vmul(F.vmul(px[i], py[j]), pz[k])
    return rows


def rank(F: Field, matrix: np.ndarray) -> int:
    """Rank over GF(q) by Gaussian elimination (exact, table driven)."""
    a = np.array(matrix, dtype=np.int64, copy=True)
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = F.vmul(a[r], F.iinv(int(a[r, c])))
        below = a[r + 1:, c]
        hit = np.nonzero(below)[0]
        if hit.size:
            idx = r + 1 + hit
            factors = a[idx, c]
            a[idx] = F.vsub(a[idx], F.vmul(factors[:, None], a[r][None, :]))
        r += 1
    return r


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    field: Field
    basis: MonomialBasis
    evalset: EvaluationSet
    rows: np.ndarray
    rank: int

    @property
    def k(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    def encode(self, message) -> np.ndarray:
        """Codeword (index array) of a message given as ``k`` field-element indices."""
        F = self.field
        msg = np.asarray(message, dtype=np.int64)
        if msg.shape != (self.k,):
            raise ValueError(f"message must have length k = {self.k}")
        word = np.zeros(self.n, dtype=np.int64)
        for r in np.nonzero(msg)[0]:
            word = F.vadd(word, F.vmul(msg[r], self.rows[r]))
        return word

    @functools.cached_property
    def prime_expansion(self) -> np.ndarray:
        """``(k*h) x (n*h)`` matrix over GF(p): row ``(r, t)`` holds the digits of ``alpha^t G[r]``."""
        F = self.field
        blocks = [F.digits(F.vmul(F.p ** t, self.rows)) for t in range(F.h)]
        return np.stack(blocks, axis=1).reshape(self.k * F.h, self.n * F.h)

    def encode_many(self, messages) -> np.ndarray:
        """Codewords of a batch of messages (rows of indices), via the prime-field expansion."""
        F = self.field
        msgs = np.atleast_2d(np.asarray(messages, dtype=np.int64))
        a = F.digits(msgs).reshape(msgs.shape[0], self.k * F.h).astype(np.float64)
        digits = np.mod(a @ self.prime_expansion.astype(np.float64), F.p).astype(np.int64)
        digits = digits.reshape(msgs.shape[0], self.n, F.h)
        return digits @ (F.p ** np.arange(F.h, dtype=np.int64))

    def to_json_dict(self) -> dict:
        d = self.field.digits
        return {
            "field": self.field.to_dict(),
            "basis": [list(t) for t in self.basis],
            "points": [[r["x"], r["y"], r["z"]] for r in self.evalset.rows()],
            "rows": [[d(v).tolist() for v in row] for row in self.rows.tolist()],
            "rank": self.rank,
        }

    def to_csv(self) -> str:
        """Row-major integer indices of the entries."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerows(self.rows.tolist())
        return buf.getvalue()


def generator_matrix(code: Code, check_rank: bool = True) -> GeneratorMatrix:
    basis = monomial_basis(code)
    ev = code.evalset
    rows = evaluate_monomials(code.field, basis, ev.xs, ev.ys, ev.zs)
    rk = rank(code.field, rows) if check_rank else -1
    if check_rank and rk != len(basis):
        raise RankDeficient(f"evaluation map is not injective: rank {rk} < k = {len(basis)}")
    return GeneratorMatrix(code.field, basis, ev, rows, rk)


def local_distance_terms(rho1: int, rho2: int, deg: int, s: int) -> tuple[int, int]:
    """``(rho1*rho2, deg*rho1 - s*(deg - rho2))``: product and Bezout terms of the fiber bound."""
    return rho1 * rho2, deg * rho1 - s * (deg - rho2)


def bound_branch(rho1: int, rho2: int, deg: int, s: int) -> str:
    prod, bez = local_distance_terms(rho1, rho2, deg, s)
    if bez > prod:
        return "bezout"
    if bez < prod:
        return "product"
    return "tie"


def distance_bound_value(rho1: int, rho2: int, rho3: int, deg: int, s: int) -> int:
    return rho3 * max(local_distance_terms(rho1, rho2, deg, s))


def distance_bound(code: Code) -> int:
    r1, r2, r3 = code.rho
    return distance_bound_value(r1, r2, r3, code.deg, code.s)


@dataclass(frozen=True)
class ParamReport:
    n: int
    k: int
    d_lower: int
    n1_lower: int
    n1_per_gamma: tuple[int, ...]
    k1: int
    d1: int
    n2: int
    k2: int
    d2: int
    rate: float
    rel_distance_bound: float
    branch: str
    product_term: int
    bezout_term: int
    eta: int
    n_gamma: int
    cover_degree: int
    s: int
    rho: tuple[int, int, int]
    warnings: tuple[str, ...] = dc_field(default=())

    @property
    def n1(self) -> int:
        return max(self.n1_per_gamma)

    def to_dict(self) -> dict:
        return {
            "n": self.n, "k": self.k, "d_lower": self.d_lower,
            "rate": self.rate, "relative_distance_bound": self.rel_distance_bound,
            "middle": {"n1_lower": self.n1_lower, "n1": self.n1, "k1": self.k1, "d1": self.d1},
            "lower": {"n2": self.n2, "k2": self.k2, "d2": self.d2},
            "n1_per_gamma": list(self.n1_per_gamma),
            "bound": {"branch": self.branch, "product_term": self.product_term,
                      "bezout_term": self.bezout_term},
            "eta": self.eta, "gamma_size": self.n_gamma, "cover_degree": self.cover_degree,
            "s": self.s, "rho": list(self.rho), "warnings": list(self.warnings),
        }

    def table(self) -> str:
        rows = [
            ("n", self.n), ("k", self.k), ("d >=", self.d_lower),
            ("rate k/n", f"{self.rate:.4f}"), ("rel. distance >=", f"{self.rel_distance_bound:.4f}"),
            ("(n1, k1, d1)", f"(>={self.n1_lower} [exact max {self.n1}], {self.k1}, {self.d1})"),
            ("(n2, k2, d2)", f"({self.n2}, {self.k2}, {self.d2})"),
            ("bound branch", f"{self.branch} (rho1*rho2 = {self.product_term}, bezout = {self.bezout_term})"),
            ("eta, |Gamma|", f"{self.eta}, {self.n_gamma}"),
            ("cover degree, s", f"{self.cover_degree}, {self.s}"),
            ("rho", self.rho),
        ]
        width = max(len(r[0]) for r in rows)
        lines = [f"{name.ljust(width)}  {value}" for name, value in rows]
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines)


def param_report(code: Code) -> ParamReport:
    r1, r2, r3 = code.rho
    deg, s = code.deg, code.s
    prod, bez = local_distance_terms(r1, r2, deg, s)
    d_lower = distance_bound(code)
    k = code.k
    return ParamReport(
        n=code.n, k=k, d_lower=d_lower,
        n1_lower=code.eta * deg, n1_per_gamma=tuple(code.evalset.per_gamma_counts),
        k1=(code.eta - r1 + 1) * (deg - r2 + 1), d1=max(prod, bez),
        n2=deg, k2=deg - r2 + 1, d2=r2,
        rate=k / code.n, rel_distance_bound=d_lower / code.n,
        branch=bound_branch(r1, r2, deg, s), product_term=prod, bezout_term=bez,
        eta=code.eta, n_gamma=code.n_gamma, cover_degree=deg, s=s, rho=code.rho,
        warnings=code.warnings,
    )
