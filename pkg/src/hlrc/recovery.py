"""Two-level erasure recovery by Lagrange interpolation.

Codewords are sequences of field-element *indices*; an erased symbol is
``None``.  Lower recovery interpolates along a ``(x, z)`` fiber (a polynomial
in ``y`` of degree ``<= deg - rho2``).  Middle recovery works on a whole fiber
``Z_gamma``: it first recovers the coefficients ``g_j(a)`` of
``g(a, y, gamma) = sum_j g_j(a) y^j`` on every bucket ``W_a`` with fewer than
``rho2`` erasures, then interpolates each ``g_j`` in ``x``.

Only symbols that were never erased are read; values recovered earlier are
not fed back into later recoveries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .code import Code
from .errors import InsufficientBuckets, InsufficientSurvivors, RecoveryMismatch
from .gf import Field, FieldElement
from .surface import EvaluationSet

Word = Sequence["int | None"]


def lagrange_eval(F: Field, nodes: Sequence[int], values: Sequence[int], at: int) -> int:
    """Value at ``at`` of the interpolating polynomial through ``(nodes, values)``."""
    total = 0
    for i, (xi, vi) in enumerate(zip(nodes, values)):
        if vi == 0:
            continue
        num, den = 1, 1
        for j, xj in enumerate(nodes):
            if j != i:
                num = F.imul(num, F.isub(at, xj))
                den = F.imul(den, F.isub(xi, xj))
        total = F.iadd(total, F.imul(vi, F.imul(num, F.iinv(den))))
    return total


def interpolate(F: Field, nodes: Sequence[int], values: Sequence[int]) -> list[int]:
    """Coefficients (constant first) of the interpolating polynomial of degree < len(nodes)."""
    m = len(nodes)
    coeffs = [0] * m
    for i, (xi, vi) in enumerate(zip(nodes, values)):
        basis = [1]
        den = 1
        for j, xj in enumerate(nodes):
            if j == i:
                continue
            neg = F.ineg(xj)
            nxt = [0] * (len(basis) + 1)
            for t, b in enumerate(basis):
                nxt[t + 1] = F.iadd(nxt[t + 1], b)
                nxt[t] = F.iadd(nxt[t], F.imul(b, neg))
            basis = nxt
            den = F.imul(den, F.isub(xi, xj))
        scale = F.imul(vi, F.iinv(den))
        for t, b in enumerate(basis):
            coeffs[t] = F.iadd(coeffs[t], F.imul(scale, b))
    return coeffs


@dataclass(frozen=True, eq=False)
class HierarchyMap:
    """Lower groups (same ``(x, z)``), middle groups (same ``z``) and x-buckets per middle group."""

    evalset: EvaluationSet
    lower_of: np.ndarray
    middle_of: np.ndarray
    lower_groups: tuple[tuple[int, ...], ...]
    middle_groups: tuple[tuple[int, ...], ...]
    buckets: tuple[tuple[tuple[int, tuple[int, ...]], ...], ...]

    def lower_group(self, i: int) -> tuple[int, ...]:
        return self.lower_groups[self.lower_of[i]]

    def middle_group(self, i: int) -> tuple[int, ...]:
        return self.middle_groups[self.middle_of[i]]

    def buckets_of(self, i: int) -> tuple[tuple[int, tuple[int, ...]], ...]:
        """``(x, positions)`` pairs of the middle group of ``i``, in canonical order."""
        return self.buckets[self.middle_of[i]]


def build_hierarchy(evalset: EvaluationSet) -> HierarchyMap:
    lower_of = np.asarray(evalset.lower)
    middle_of = np.asarray(evalset.middle)
    positions = np.arange(evalset.n)

    def split(labels):
        cuts = np.nonzero(np.diff(labels))[0] + 1
        return tuple(tuple(chunk.tolist()) for chunk in np.split(positions, cuts))

    lower_groups = split(lower_of)
    middle_groups = split(middle_of)
    xs = evalset.xs.tolist()
    buckets = []
    for mg in middle_groups:
        per_x: dict[int, list[int]] = {}
        for pos in mg:
            per_x.setdefault(xs[pos], []).append(pos)
        buckets.append(tuple((x, tuple(v)) for x, v in per_x.items()))
    return HierarchyMap(evalset, lower_of, middle_of, lower_groups, middle_groups, tuple(buckets))


def _lower(word: Word, i: int, hmap: HierarchyMap, code: Code) -> tuple[int, tuple[int, ...]]:
    F = code.field
    ys = hmap.evalset.ys
    need = code.deg - code.spec.rho2 + 1
    known = [j for j in hmap.lower_group(i) if j != i and word[j] is not None][:need]
    if len(known) < need:
        raise InsufficientSurvivors(
            f"position {i}: {len(known)} survivors in its lower group, {need} needed")
    value = lagrange_eval(F, [int(ys[j]) for j in known], [word[j] for j in known], int(ys[i]))
    return value, tuple(known)


def _middle_layer(word: Word, group: int, hmap: HierarchyMap, code: Code):
    """First layer: ``(nodes a, [g_0(a), ..., g_ydeg(a)] per node, accessed positions)``."""
    F = code.field
    ys = hmap.evalset.ys
    ydeg = code.deg - code.spec.rho2
    need_buckets = code.eta - code.spec.rho1 + 1
    nodes, coeff_rows, accessed = [], [], []
    for a, members in hmap.buckets[group]:
        if len(members) < code.deg:
            continue  # partial bucket (cannot occur once ramification points are excluded)
        known = [j for j in members if word[j] is not None][:ydeg + 1]
        if len(known) < ydeg + 1:
            continue
        coeff_rows.append(interpolate(F, [int(ys[j]) for j in known], [word[j] for j in known]))
        nodes.append(a)
        accessed.extend(known)
        if len(nodes) == need_buckets:
            break
    if len(nodes) < need_buckets:
        raise InsufficientBuckets(
            f"middle group {group}: {len(nodes)} usable buckets, {need_buckets} needed")
    return nodes, coeff_rows, tuple(accessed)


def _middle(word: Word, i: int, hmap: HierarchyMap, code: Code, layer=None) -> tuple[int, tuple[int, ...]]:
    F = code.field
    if layer is None:
        layer = _middle_layer(word, int(hmap.middle_of[i]), hmap, code)
    nodes, coeff_rows, accessed = layer
    x_i, y_i = int(hmap.evalset.xs[i]), int(hmap.evalset.ys[i])
    value, y_pow = 0, 1
    for j in range(code.deg - code.spec.rho2 + 1):
        g_j = lagrange_eval(F, nodes, [row[j] for row in coeff_rows], x_i)
        value = F.iadd(value, F.imul(g_j, y_pow))
        y_pow = F.imul(y_pow, y_i)
    return value, accessed


def recover_lower(word: Word, i: int, hmap: HierarchyMap, code: Code) -> FieldElement:
    """Recover position ``i`` from its ``(x, z)`` fiber."""
    return FieldElement(code.field, _lower(word, i, hmap, code)[0])


def recover_middle(word: Word, i: int, hmap: HierarchyMap, code: Code) -> FieldElement:
    """Recover position ``i`` from its fiber curve by two-layer interpolation."""
    return FieldElement(code.field, _middle(word, i, hmap, code)[0])


# -- erasure patterns ---------------------------------------------------------

@dataclass(frozen=True)
class ErasurePattern:
    indices: frozenset[int]

    @classmethod
    def of(cls, indices: Iterable[int], n: int) -> "ErasurePattern":
        idx = frozenset(int(i) for i in indices)
        bad = [i for i in idx if not 0 <= i < n]
        if bad:
            raise ValueError(f"erasure indices out of range [0, {n}): {sorted(bad)[:5]}")
        return cls(idx)

    def __len__(self):
        return len(self.indices)

    def to_json(self) -> str:
        return json.dumps(sorted(self.indices))


def random_pattern(n: int, count: int, rng: np.random.Generator) -> ErasurePattern:
    return ErasurePattern.of(rng.choice(n, size=min(count, n), replace=False).tolist(), n)


def _pick(rng, seq, k):
    return [seq[t] for t in sorted(rng.choice(len(seq), size=k, replace=False).tolist())]


def worst_lower(hmap: HierarchyMap, code: Code, rng: np.random.Generator,
                groups: Iterable[int] | None = None) -> ErasurePattern:
    """``rho2 - 1`` erasures in each chosen lower group (all groups by default)."""
    chosen = range(len(hmap.lower_groups)) if groups is None else groups
    out = []
    for g in chosen:
        out += _pick(rng, hmap.lower_groups[g], code.spec.rho2 - 1)
    return ErasurePattern.of(out, hmap.evalset.n)


def _middle_buckets(hmap: HierarchyMap, rng, middle: int | None):
    m = int(rng.integers(len(hmap.middle_groups))) if middle is None else middle
    return [members for _, members in hmap.buckets[m]]


def worst_middle(hmap: HierarchyMap, code: Code, rng: np.random.Generator,
                 middle: int | None = None) -> ErasurePattern:
    """``rho1 - 1`` buckets with ``rho2`` erasures and one with ``rho2 - 1``: ``rho1*rho2 - 1`` in all."""
    r1, r2 = code.spec.rho1, code.spec.rho2
    buckets = _middle_buckets(hmap, rng, middle)
    chosen = _pick(rng, buckets, r1)
    out = []
    for t, members in enumerate(chosen):
        out += _pick(rng, members, r2 if t < r1 - 1 else r2 - 1)
    return ErasurePattern.of(out, hmap.evalset.n)


def failing_middle(hmap: HierarchyMap, code: Code, rng: np.random.Generator,
                   middle: int | None = None) -> ErasurePattern:
    """``rho2`` erasures in each of ``rho1`` buckets of one middle group.

    Only a fiber with exactly ``eta`` buckets is left with too few good
    buckets, so by default the group is drawn among those.
    """
    r1, r2 = code.spec.rho1, code.spec.rho2
    if middle is None:
        tight = [g for g, b in enumerate(hmap.buckets) if len(b) == code.eta]
        if not tight:
            raise ValueError(f"no fiber has exactly eta = {code.eta} buckets; the pattern cannot fail")
        middle = tight[int(rng.integers(len(tight)))]
    buckets = _middle_buckets(hmap, rng, middle)
    out = []
    for members in _pick(rng, buckets, r1):
        out += _pick(rng, members, r2)
    return ErasurePattern.of(out, hmap.evalset.n)


# -- simulation ---------------------------------------------------------------

RECOVERED_LOWER = "RecoveredLower"
RECOVERED_MIDDLE = "RecoveredMiddle"
FAILED = "Failed"


@dataclass(frozen=True)
class RecoveryEntry:
    position: int
    outcome: str
    value: int | None
    cost: int
    accessed: tuple[int, ...] = ()


@dataclass(frozen=True)
class RecoveryReport:
    entries: tuple[RecoveryEntry, ...]

    def __len__(self):
        return len(self.entries)

    def count(self, outcome: str) -> int:
        return sum(e.outcome == outcome for e in self.entries)

    @property
    def fully_recovered(self) -> bool:
        return all(e.outcome != FAILED for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "erased": len(self.entries),
            "recovered_lower": self.count(RECOVERED_LOWER),
            "recovered_middle": self.count(RECOVERED_MIDDLE),
            "failed": self.count(FAILED),
            "entries": [
                {"position": e.position, "outcome": e.outcome, "value": e.value, "cost": e.cost}
                for e in self.entries
            ],
        }


def simulate(word: Sequence[int], pattern: ErasurePattern, hmap: HierarchyMap, code: Code) -> RecoveryReport:
    """Erase ``pattern`` from the codeword ``word`` and recover lower-first, then middle.

    Every recovered value is checked against ``word``; a disagreement raises
    :class:`RecoveryMismatch` instead of being reported.
    """
    truth = [int(v) for v in word]
    damaged: list[int | None] = list(truth)
    for i in pattern.indices:
        damaged[i] = None
    entries = []
    layers: dict[int, object] = {}  # the first layer depends only on the group and the damage
    for i in sorted(pattern.indices):
        try:
            value, accessed = _lower(damaged, i, hmap, code)
            outcome = RECOVERED_LOWER
        except InsufficientSurvivors:
            group = int(hmap.middle_of[i])
            try:
                if group not in layers:
                    try:
                        layers[group] = _middle_layer(damaged, group, hmap, code)
                    except InsufficientBuckets as exc:
                        layers[group] = exc
                if isinstance(layers[group], InsufficientBuckets):
                    raise layers[group]
                value, accessed = _middle(damaged, i, hmap, code, layers[group])
                outcome = RECOVERED_MIDDLE
            except InsufficientBuckets:
                entries.append(RecoveryEntry(i, FAILED, None, 0))
                continue
        if value != truth[i]:
            raise RecoveryMismatch(f"position {i}: recovered {value}, true symbol {truth[i]}")
        entries.append(RecoveryEntry(i, outcome, value, len(accessed), accessed))
    return RecoveryReport(tuple(entries))
