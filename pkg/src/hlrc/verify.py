"""Independent oracles: minimum weight, point counts, censuses and bound audits.

Weights are computed over the prime field.  A GF(p^h) generator matrix with
``k`` rows is expanded to a ``(k*h) x (n*h)`` matrix over GF(p): row
``(r, t)`` holds the coefficient vectors of ``alpha^t * G[r]``.  A message
written in coordinates is then a digit vector, codewords come out of a float
matmul reduced mod p, and a symbol is nonzero iff any of its ``h`` digits is.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from .code import Code, GeneratorMatrix, distance_bound
from .errors import BoundViolated, BudgetExceeded, CensusMismatch, FormulaMismatch
from .gf import Field, FieldElement, make_field, field_of_order
from .surface import as_example_surface, evaluation_set, gamma_set, kummer_example_surface

DEFAULT_BUDGET = 10**7
MAX_WITNESSES = 8
_CHUNK = 2048

EXHAUSTIVE = "exhaustive"
SAMPLED = "sampled"


@dataclass(frozen=True)
class DistanceResult:
    """``measured_min_weight`` is the true distance only in exhaustive mode; otherwise an upper bound."""

    mode: str
    measured_min_weight: int
    witnesses: tuple[tuple[int, ...], ...]
    evaluated: int
    seed: int | None = None
    method: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witnesses"] = [list(w) for w in self.witnesses]
        return d


def combine(results: list[DistanceResult]) -> DistanceResult:
    """Merge searches over the same code; the merged mode is exhaustive if any part was."""
    best = min(r.measured_min_weight for r in results)
    witnesses = []
    for r in results:
        if r.measured_min_weight == best:
            witnesses += [w for w in r.witnesses if w not in witnesses]
    mode = EXHAUSTIVE if any(r.mode == EXHAUSTIVE for r in results) else SAMPLED
    return DistanceResult(
        mode, best, tuple(witnesses[:MAX_WITNESSES]), sum(r.evaluated for r in results),
        next((r.seed for r in results if r.seed is not None), None),
        "+".join(r.method for r in results),
    )


class WeightEngine:
    """Batch Hamming weights of codewords of ``G``."""

    def __init__(self, G: GeneratorMatrix):
        F = G.field
        self.field = F
        self.k, self.n = G.k, G.n
        if np.any(np.all(G.rows == 0, axis=0)):
            raise ValueError("generator matrix has an all-zero column; monomial 1 never vanishes")
        if self.k * F.h * (F.p - 1) ** 2 >= 2 ** 53:
            raise ValueError("code too large for exact float64 weight computation")
        self._gp = G.prime_expansion.astype(np.float64)

    def codeword_digits(self, messages: np.ndarray) -> np.ndarray:
        F = self.field
        msgs = np.atleast_2d(np.asarray(messages, dtype=np.int64))
        a = F.digits(msgs).reshape(msgs.shape[0], self.k * F.h).astype(np.float64)
        return np.mod(a @ self._gp, F.p).reshape(msgs.shape[0], self.n, F.h)

    def weights(self, messages: np.ndarray) -> np.ndarray:
        out = []
        msgs = np.atleast_2d(np.asarray(messages, dtype=np.int64))
        for s in range(0, msgs.shape[0], _CHUNK):
            digits = self.codeword_digits(msgs[s:s + _CHUNK])
            out.append(np.any(digits != 0, axis=2).sum(axis=1))
        return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


class _Tracker:
    def __init__(self):
        self.best = None
        self.witnesses: list[tuple[int, ...]] = []
        self.evaluated = 0

    def feed(self, messages: np.ndarray, weights: np.ndarray):
        self.evaluated += len(weights)
        if not len(weights):
            return
        w = int(weights.min())
        if self.best is None or w < self.best:
            self.best, self.witnesses = w, []
        if w == self.best:
            for row in messages[weights == w][:MAX_WITNESSES - len(self.witnesses)]:
                self.witnesses.append(tuple(int(v) for v in row))

    def result(self, mode, seed=None, method="") -> DistanceResult:
        return DistanceResult(mode, int(self.best), tuple(self.witnesses), self.evaluated, seed, method)


def projective_message_count(q: int, k: int) -> int:
    return (q ** k - 1) // (q - 1)


def min_distance_exhaustive(G: GeneratorMatrix, budget: int = DEFAULT_BUDGET) -> DistanceResult:
    """True minimum distance: every nonzero message whose first nonzero entry is 1."""
    q, k = G.field.q, G.k
    total = projective_message_count(q, k)
    if total > budget:
        raise BudgetExceeded(f"{total} projective messages exceed the budget {budget}; use sampling")
    engine, track = WeightEngine(G), _Tracker()
    for lead in range(k):
        tail = k - lead - 1
        count = q ** tail
        powers = q ** np.arange(tail - 1, -1, -1, dtype=np.int64)
        for start in range(0, count, _CHUNK):
            idx = np.arange(start, min(start + _CHUNK, count), dtype=np.int64)
            msgs = np.zeros((idx.size, k), dtype=np.int64)
            msgs[:, lead] = 1
            if tail:
                msgs[:, lead + 1:] = (idx[:, None] // powers[None, :]) % q
            track.feed(msgs, engine.weights(msgs))
    return track.result(EXHAUSTIVE, method="exhaustive")


def min_weight_sampled(G: GeneratorMatrix, trials: int, seed: int = 0) -> DistanceResult:
    """Minimum weight over ``trials`` uniform nonzero messages (an upper bound on d)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    engine, track = WeightEngine(G), _Tracker()
    q, k = G.field.q, G.k
    left = trials
    while left:
        m = min(left, _CHUNK)
        msgs = rng.integers(0, q, size=(m, k), dtype=np.int64)
        zero = ~msgs.any(axis=1)
        while zero.any():
            msgs[zero] = rng.integers(0, q, size=(int(zero.sum()), k), dtype=np.int64)
            zero = ~msgs.any(axis=1)
        track.feed(msgs, engine.weights(msgs))
        left -= m
    return track.result(SAMPLED, seed, "uniform")


def sparse_search(G: GeneratorMatrix) -> DistanceResult:
    """Exact minimum over messages supported on at most two basis monomials.

    For rows ``r < s`` and ``c != 0`` the word ``G[r] + c G[s]`` vanishes exactly
    where both rows vanish or where ``G[s] != 0`` and ``c = -G[r]/G[s]``, so the
    best ``c`` is the most frequent such ratio.
    """
    F = G.field
    rows, k, n, q = G.rows, G.k, G.n, F.q
    track = _Tracker()
    single = np.count_nonzero(rows, axis=1)
    track.feed(np.eye(k, dtype=np.int64), single)
    nz = rows != 0
    for r in range(k - 1):
        rest = rows[r + 1:]
        mask = nz[r + 1:]
        both_zero = (~nz[r])[None, :] & ~mask
        denom = np.where(mask, rest, 1)
        ratio = F.vmul(F.vneg(np.broadcast_to(rows[r], rest.shape)), F.vinv(denom))
        ratio = np.where(mask & nz[r][None, :], ratio, 0)  # ratio 0 is never a valid c
        m = rest.shape[0]
        counts = np.bincount((np.arange(m)[:, None] * q + ratio).ravel(), minlength=m * q)
        counts = counts.reshape(m, q)
        counts[:, 0] = 0
        c_best = counts.argmax(axis=1)
        c_best = np.where(c_best == 0, 1, c_best)
        weights = n - both_zero.sum(axis=1) - counts[np.arange(m), c_best]
        msgs = np.zeros((m, k), dtype=np.int64)
        msgs[:, r] = 1
        msgs[np.arange(m), r + 1 + np.arange(m)] = c_best
        track.feed(msgs, weights)
    return track.result(SAMPLED, method="sparse")


def _poly_from_roots(F: Field, roots) -> list[int]:
    poly = [1]
    for a in roots:
        new = [0] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i + 1] = F.iadd(new[i + 1], c)
            new[i] = F.isub(new[i], F.imul(c, a))
        poly = new
    return poly


def product_message(G: GeneratorMatrix, px: list[int], py: list[int], pz: list[int]) -> np.ndarray:
    """Message of ``px(x) * py(y) * pz(z)`` (coefficient lists, constant first) in the basis of ``G``."""
    F = G.field
    msg = np.zeros(G.k, dtype=np.int64)
    for r, (i, j, k) in enumerate(G.basis):
        if i < len(px) and j < len(py) and k < len(pz):
            msg[r] = F.imul(F.imul(px[i], py[j]), pz[k])
    return msg


def fiber_product_search(G: GeneratorMatrix, code: Code, max_x_sets: int = 2000) -> DistanceResult:
    """Low-weight search over products of linear factors in x, y and z.

    The z-factor vanishes on all but ``rho3`` consecutive fibers of ``Gamma``;
    the x-factor removes ``eta - rho1`` whole buckets (all subsets when there
    are at most ``max_x_sets``); the y-factor removes the ``deg - rho2`` most
    frequent surviving y-values.  Weights are measured on the encoded words.
    """
    F = G.field
    ev = code.evalset
    r1, r2, r3 = code.rho
    nx, ny = code.eta - r1, code.deg - r2
    gammas = [g.value for g in ev.gammas]
    candidates = []
    for start in range(len(gammas) - r3 + 1):
        keep = gammas[start:start + r3]
        pz = _poly_from_roots(F, [g for g in gammas if g not in keep])
        sel = np.isin(ev.zs, keep)
        xs, ys = ev.xs[sel], ev.ys[sel]
        x_values = np.unique(xs).tolist()
        subsets = itertools.combinations(x_values, min(nx, len(x_values)))
        for xset in itertools.islice(subsets, max_x_sets):
            alive = ~np.isin(xs, xset)
            vals, freq = np.unique(ys[alive], return_counts=True)
            yset = vals[np.argsort(-freq, kind="stable")[:ny]].tolist()
            candidates.append(product_message(
                G, _poly_from_roots(F, xset), _poly_from_roots(F, yset), pz))
    msgs = np.array(candidates, dtype=np.int64)
    track = _Tracker()
    track.feed(msgs, WeightEngine(G).weights(msgs))
    return track.result(SAMPLED, method="fiber-product")


def low_weight_search(G: GeneratorMatrix, code: Code, trials: int, seed: int = 0) -> DistanceResult:
    """Uniform sampling, sparse-support search and fiber-product search combined."""
    return combine([min_weight_sampled(G, trials, seed), sparse_search(G), fiber_product_search(G, code)])


# -- audits -------------------------------------------------------------------

@dataclass(frozen=True)
class AuditRecord:
    claim: str
    source: str
    expected: object
    measured: object
    verdict: str
    detail: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=str)


DISTANCE_SOURCE = "d >= rho3 * max(rho1*rho2, deg*rho1 - s*(deg - rho2))"


def check_bound(result: DistanceResult, code: Code) -> AuditRecord:
    """PASS iff the measured weight is at least the designed distance; raises otherwise."""
    bound = distance_bound(code)
    detail = {"mode": result.mode, "method": result.method, "evaluated": result.evaluated}
    if result.mode == EXHAUSTIVE:
        detail["slack"] = result.measured_min_weight - bound
    ok = result.measured_min_weight >= bound
    record = AuditRecord(
        claim=f"minimum distance of rho={code.rho} code is at least {bound}",
        source=DISTANCE_SOURCE, expected=bound, measured=result.measured_min_weight,
        verdict="PASS" if ok else "FAIL", detail=detail,
    )
    if not ok:
        detail["witnesses"] = [list(w) for w in result.witnesses]
        raise BoundViolated(
            f"codeword of weight {result.measured_min_weight} below the bound {bound}", record)
    return record


def sharpness_witness(G: GeneratorMatrix, code: Code) -> AuditRecord:
    """Weight of the codeword of ``1 - z`` against the bound; PASS iff they are equal."""
    F = G.field
    msg = product_message(G, [1], [1], [1, F.ineg(1)])
    weight = int(np.count_nonzero(G.encode(msg)))
    bound = distance_bound(code)
    return AuditRecord(
        claim="codeword of 1 - z has weight equal to the distance bound",
        source=DISTANCE_SOURCE, expected=bound, measured=weight,
        verdict="PASS" if weight == bound else "FAIL",
        detail={"message": msg.tolist()},
    )


# -- point counts ---------------------------------------------------------------

@dataclass(frozen=True)
class PointCountResult:
    label: str
    counted: int
    formula_value: int

    @property
    def match(self) -> bool:
        return self.counted == self.formula_value


def _kummer_curve_values(F: Field, gamma: int, m: int, x, y, w):
    """``y^{q+1} + g^m x^{2m} w^{m} + g^{2m} x^m w^{2m}`` (``q + 1 = 3m``)."""
    gm = F.ipow(gamma, m)
    g2m = F.imul(gm, gm)
    t1 = F.vpow(y, 3 * m)
    t2 = F.vmul(gm, F.vmul(F.vpow(x, 2 * m), F.vpow(w, m)))
    t3 = F.vmul(g2m, F.vmul(F.vpow(x, m), F.vpow(w, 2 * m)))
    return F.vadd(F.vadd(t1, t2), t3)


def projective_point_count(F: Field, gamma: int, m: int) -> int:
    """Points of the projective fiber curve in P^2, one canonical representative each."""
    Q = F.q
    x, y = np.meshgrid(np.arange(Q), np.arange(Q), indexing="ij")
    affine = int(np.count_nonzero(_kummer_curve_values(F, gamma, m, x.ravel(), y.ravel(), np.ones(Q * Q, dtype=np.int64)) == 0))
    xs = np.arange(Q)
    at_infinity = int(np.count_nonzero(_kummer_curve_values(F, gamma, m, xs, np.ones(Q, dtype=np.int64), np.zeros(Q, dtype=np.int64)) == 0))
    corner = int(_kummer_curve_values(F, gamma, m, np.array([1]), np.array([0]), np.array([0]))[0] == 0)
    return affine + at_infinity + corner


def _affine_fiber_census(F: Field, gamma: int, m: int) -> tuple[int, int]:
    """(|T_gamma|, |pi_x(T_gamma)|): affine points with y != 0 and their distinct x."""
    Q = F.q
    x, y = np.meshgrid(np.arange(Q), np.arange(1, Q), indexing="ij")
    x, y = x.ravel(), y.ravel()
    on = _kummer_curve_values(F, gamma, m, x, y, np.ones(x.size, dtype=np.int64)) == 0
    return int(on.sum()), int(np.unique(x[on]).size)


def check_point_counts(q: int, gammas=None) -> list[PointCountResult]:
    """Enumerate every fiber of the Kummer example family over GF(q^2) and compare with closed forms.

    Checks ``(q^3 + 2q^2 + 2q + 7)/3`` projective points, ``q(q+1)m`` affine
    unramified points and ``mq`` distinct x-values per fiber, and that the
    evaluation set of the surface module agrees fiber by fiber.
    """
    if q % 3 != 2:
        raise ValueError("q must be 2 mod 3")
    base = field_of_order(q)
    F = make_field(base.p, 2 * base.h)
    m = (q + 1) // 3
    proj_formula = (q ** 3 + 2 * q ** 2 + 2 * q + 7) // 3
    t_formula, x_formula = q * (q + 1) * m, m * q
    surface = kummer_example_surface(q)
    ev = evaluation_set(surface, x_formula)
    per_gamma = dict(zip((g.value for g in ev.gammas), ev.per_gamma_counts))
    images = dict(zip((g.value for g in ev.gammas), ev.x_images))
    gammas = range(1, F.q) if gammas is None else gammas
    out, bad = [], []
    for g in gammas:
        g = int(g)
        if g == 0:
            raise ValueError("gamma must be nonzero")
        t_count, x_count = _affine_fiber_census(F, g, m)
        trio = [
            PointCountResult(f"q={q} gamma={g} projective", projective_point_count(F, g, m), proj_formula),
            PointCountResult(f"q={q} gamma={g} |T_gamma|", t_count, t_formula),
            PointCountResult(f"q={q} gamma={g} |pi_x|", x_count, x_formula),
            PointCountResult(f"q={q} gamma={g} |T_gamma| (evaluation set)", per_gamma.get(g, 0), t_formula),
            PointCountResult(f"q={q} gamma={g} |pi_x| (evaluation set)", images.get(g, 0), x_formula),
        ]
        out += trio
        bad += [r for r in trio if not r.match]
    if bad:
        record = AuditRecord("Kummer fiber point counts", "closed-form point counts",
                             [r.formula_value for r in bad], [r.counted for r in bad], "FAIL",
                             {"labels": [r.label for r in bad]})
        raise FormulaMismatch(f"{len(bad)} point counts disagree, first: {bad[0]}", record)
    return out


def normalization_count(q: int, projective_count: int) -> tuple[int, int]:
    """Derived (not independent) normalization count ``|Z| + 2(m-1)`` vs ``(q^3+2q^2+4q+3)/3``."""
    m = (q + 1) // 3
    return projective_count + 2 * (m - 1), (q ** 3 + 2 * q ** 2 + 4 * q + 3) // 3


def check_as_census(p: int) -> AuditRecord:
    """Recompute Gamma for the Artin-Schreier example surface by brute force.

    ``y^p - y = c`` is solvable iff ``c + c^p = 0`` (trace zero), so a fiber's
    x-image is ``{x : f(x, g) + f(x, g)^p = 0}``; no preimage tables are used.
    """
    if p == 2 or p < 2:
        raise ValueError("p must be an odd prime")
    F = make_field(p, 2)
    eta = 2 * p - 1
    census, excluded = [], []
    for g in range(F.q):
        gamma = FieldElement(F, g)
        image = 0
        for xv in range(F.q):
            x = FieldElement(F, xv)
            c = x ** (p + 1) * gamma ** 2 + x ** 2 * gamma ** (p + 1)
            if not c + c ** p:
                image += 1
        if g and image >= eta:
            census.append((g, image))
        else:
            excluded.append(g)
    gamma_brute = sorted(g for g, _ in census)
    t_brute = sum(p * img for _, img in census)
    predicted_excluded = sorted(
        g for g in range(1, F.q)
        if FieldElement(F, g) ** (p - 1) == FieldElement(F, g) ** (F.q - 1 - (p - 1)))
    surface = as_example_surface(p)
    gamma_module = sorted(e.value for e in gamma_set(surface, eta))
    t_module = evaluation_set(surface, eta).n
    expected = {"gamma_size": (p - 1) ** 2, "T": (2 * p * p - p) * (p - 1) ** 2,
                "excluded_nonzero": predicted_excluded, "gamma_module_agrees": True}
    measured = {"gamma_size": len(gamma_brute), "T": t_brute,
                "excluded_nonzero": [g for g in excluded if g],
                "gamma_module_agrees": gamma_module == gamma_brute and t_module == t_brute}
    ok = expected == measured
    record = AuditRecord(f"Artin-Schreier census at p={p}, eta={eta}",
                         "|Gamma| = (p-1)^2, |T| = (2p^2-p)(p-1)^2",
                         expected, measured, "PASS" if ok else "FAIL")
    if not ok:
        raise CensusMismatch(f"census mismatch at p={p}: {measured} vs {expected}", record)
    return record
