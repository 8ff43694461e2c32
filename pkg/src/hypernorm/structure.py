"""Necessary conditions for a hypergraph pair to define a semi-norm.

:func:`classify` is a screen: a ``TypeI``/``TypeII`` verdict means no
necessary condition failed, not that the pair is proven norming.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .pair import WEIGHT_TOL, HypergraphPair, conjugate, factorize, find_isomorphism, project

#: Default cap on ``sum(dims)`` for sub-box enumeration.
SPREAD_CAP = 20


class EnumerationBudgetExceeded(RuntimeError):
    pass


@dataclass
class Check:
    name: str
    passed: bool
    witness: Any = None
    detail: str = ""
    scope: str = "H"

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "witness": _jsonable(self.witness),
                "detail": self.detail, "scope": self.scope}


@dataclass
class ClassificationResult:
    verdict: str  # "TypeI" | "TypeII" | "NotSemiNorming"
    s: float | None = None
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    @property
    def semi_norming_candidate(self) -> bool:
        return self.verdict != "NotSemiNorming"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "s": self.s, "checks": [c.to_dict() for c in self.checks],
                "notes": list(self.notes)}


def _jsonable(x):
    if isinstance(x, (tuple, list)):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= WEIGHT_TOL


# -- degree profile --------------------------------------------------------

@dataclass
class DegreeProfile:
    #: ``sums[i][v] = (sum alpha, sum beta)`` over omegas with ``omega_i = v``
    sums: list[list[tuple[float, float]]]
    regular: list[bool]
    degrees: list[float | None]
    #: axes whose every vertex has ``{sum alpha, sum beta} = {0, 1}``
    degenerate: list[bool]
    witnesses: list[tuple[int, int] | None]

    @property
    def is_regular(self) -> bool:
        return all(self.regular)


def degree_profile(h: HypergraphPair) -> DegreeProfile:
    sums = [[[0.0, 0.0] for _ in range(d)] for d in h.dims]
    for omega, a, b in h.entries():
        for i, v in enumerate(omega):
            sums[i][v][0] += a
            sums[i][v][1] += b
    regular, degrees, degenerate, witnesses = [], [], [], []
    for i, axis in enumerate(sums):
        d = axis[0][0]
        bad = next((v for v, (sa, sb) in enumerate(axis) if not (_close(sa, d) and _close(sb, d))), None)
        regular.append(bad is None)
        degrees.append(d if bad is None else None)
        witnesses.append(None if bad is None else (i, bad))
        degenerate.append(all({round(sa), round(sb)} == {0, 1} and _close(sa, round(sa)) and _close(sb, round(sb))
                              for sa, sb in axis))
    return DegreeProfile([[tuple(x) for x in axis] for axis in sums], regular, degrees, degenerate, witnesses)


# -- spreading -------------------------------------------------------------

@dataclass
class SpreadingResult:
    passed: bool
    bound: float
    max_ratio: float
    worst_box: tuple[tuple[int, ...], ...] | None


def _subset_matrix(d: int) -> np.ndarray:
    masks = np.arange(1, 2 ** d)
    return ((masks[:, None] >> np.arange(d)[None, :]) & 1).astype(float)


def check_spreading(h: HypergraphPair, cap: int = SPREAD_CAP) -> SpreadingResult:
    """Compare every sub-box density ``|H'| / (sum |W_i| - 1)`` against the full grid's."""
    if sum(h.dims) > cap:
        raise EnumerationBudgetExceeded(f"sum(dims)={sum(h.dims)} exceeds the sub-box cap {cap}")
    denom_full = sum(h.dims) - 1
    if denom_full <= 0:
        return SpreadingResult(True, float("inf"), float("nan"), None)
    weight = np.zeros(h.dims)
    for omega, a, b in h.entries():
        weight[omega] = abs(a) + abs(b)
    bound = float(weight.sum()) / denom_full
    mats = [_subset_matrix(d) for d in h.dims]
    restricted = weight
    for m in mats:
        # contract the leading grid axis; subset axes accumulate at the end
        restricted = np.tensordot(restricted, m, axes=([0], [1]))
    counts = np.zeros(restricted.shape)
    for i, m in enumerate(mats):
        shape = [1] * len(mats)
        shape[i] = m.shape[0]
        counts = counts + m.sum(axis=1).reshape(shape)
    denom = counts - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(denom > 0, restricted / np.where(denom > 0, denom, 1), -np.inf)
    idx = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    max_ratio = float(ratio[idx])
    box = tuple(tuple(int(v) for v in np.flatnonzero(m[j])) for m, j in zip(mats, idx))
    passed = max_ratio <= bound + WEIGHT_TOL * max(1.0, bound)
    return SpreadingResult(passed, bound, max_ratio, box)


# -- degenerate axes -------------------------------------------------------

@dataclass
class DegenerateAxes:
    axes: tuple[int, ...]
    remainder: HypergraphPair | None


def detect_degenerate_axes(h: HypergraphPair) -> DegenerateAxes:
    """Axes on which every vertex carries total weight exactly 1."""
    prof = degree_profile(h)
    axes = tuple(i for i, axis in enumerate(prof.sums) if all(_close(sa + sb, 1.0) for sa, sb in axis))
    rest = [i for i in range(h.k) if i not in axes]
    return DegenerateAxes(axes, project(h, rest) if axes and rest else None)


# -- classification --------------------------------------------------------

def _shape_checks(h: HypergraphPair, scope: str, checks: list[Check]) -> tuple[str | None, float | None]:
    """Pointwise checks.  Returns the tentative type and parameter, or ``(None, None)``."""
    entries = h.entries()
    if not entries:
        checks.append(Check("nonzero", False, None, "pair has empty support, |H| = 0", scope))
        return None, None
    checks.append(Check("nonzero", True, scope=scope))
    type1 = all(_close(a, b) for _, a, b in entries)
    type2 = all({round(a), round(b)} == {0, 1} and _close(a, round(a)) and _close(b, round(b))
                for _, a, b in entries)
    if not (type1 or type2):
        bad = next(((o, a, b) for o, a, b in entries
                    if not _close(a, b) and not ({round(a), round(b)} == {0, 1}
                                                 and _close(a, round(a)) and _close(b, round(b)))), None)
        if bad is None:
            # every entry is fine on its own but the two shapes are mixed
            bad = next((o, a, b) for o, a, b in entries if not _close(a, b))
            detail = "support mixes alpha=beta entries with {0,1} entries"
        else:
            detail = "entry is neither alpha=beta nor {alpha,beta}={0,1}"
        checks.append(Check("type_dichotomy", False, {"omega": bad[0], "alpha": bad[1], "beta": bad[2]},
                            detail, scope))
        return None, None
    checks.append(Check("type_dichotomy", True, None, "Type I shape" if type1 else "Type II shape", scope))
    if type1:
        s = entries[0][1] + entries[0][2]
        odd = next(((o, a + b) for o, a, b in entries if not _close(a + b, s)), None)
        if odd is not None:
            checks.append(Check("uniform_parameter", False, {"omega": odd[0], "value": odd[1], "expected": s},
                                "alpha+beta is not constant on the support", scope))
            return None, None
        checks.append(Check("uniform_parameter", True, {"s": s}, scope=scope))
        if s < 1 - WEIGHT_TOL:
            checks.append(Check("parameter_at_least_one", False, {"omega": entries[0][0], "value": s},
                                "alpha(omega)+beta(omega) < 1", scope))
            return None, None
        checks.append(Check("parameter_at_least_one", True, {"s": s}, scope=scope))
        return "TypeI", s
    return "TypeII", None


def _structural_checks(h: HypergraphPair, kind: str, scope: str, checks: list[Check], cap: int,
                       spread: bool) -> bool:
    ok = True
    if kind == "TypeII":
        iso = find_isomorphism(h, conjugate(h))
        checks.append(Check("self_conjugate", iso is not None, None if iso is None else [list(m) for m in iso],
                            "" if iso is not None else "no isomorphism H -> conj(H)", scope))
        if iso is None:
            return False
    prof = degree_profile(h)
    for i, axis in enumerate(prof.sums):
        covered = [(v, sa, sb) for v, (sa, sb) in enumerate(axis) if sa + sb > WEIGHT_TOL]
        d = covered[0][1] if covered else 0.0
        regular = all(_close(sa, d) and _close(sb, d) for _, sa, sb in covered)
        degenerate = all(_close(sa + sb, 1.0) and (_close(sa, 0) or _close(sb, 0)) for _, sa, sb in covered)
        if regular or degenerate:
            checks.append(Check("degree_regularity", True, {"axis": i, "d": d if regular else None,
                                                            "degenerate": degenerate and not regular}, scope=scope))
        else:
            v, sa, sb = next((v, sa, sb) for v, sa, sb in covered if not (_close(sa, d) and _close(sb, d)))
            checks.append(Check("degree_regularity", False, {"axis": i, "vertex": v, "sum_alpha": sa, "sum_beta": sb,
                                                             "expected": d},
                                "fiber sums differ between vertices of one axis", scope))
            ok = False
    if not ok or not spread:
        return ok
    if h.k >= 2:
        for c, comp in enumerate(factorize(h).components):
            if sum(comp.dims) > cap:
                checks.append(Check("spreading", True, None, f"component {c} skipped: sum(dims) over cap {cap}",
                                    scope))
                continue
            res = check_spreading(comp, cap)
            checks.append(Check("spreading", res.passed,
                                {"component": c, "box": res.worst_box, "ratio": res.max_ratio, "bound": res.bound},
                                "" if res.passed else "a sub-box is denser than the whole grid", scope))
            ok = ok and res.passed
    return ok


def classify(h: HypergraphPair, *, projection_sizes=(1, 2), all_projections: bool = False,
             cap: int = SPREAD_CAP) -> ClassificationResult:
    """Run the necessary-condition screen on ``h`` and its small projections."""
    if not h.is_nonnegative:
        raise ValueError("classify needs a nonnegative pair")
    checks: list[Check] = []
    notes: list[str] = []
    kind, s = _shape_checks(h, "H", checks)
    if kind is None:
        return ClassificationResult("NotSemiNorming", None, checks, notes)
    if not _structural_checks(h, kind, "H", checks, cap, spread=True):
        return ClassificationResult("NotSemiNorming", None, checks, notes)
    sizes = range(1, h.k) if all_projections else [r for r in projection_sizes if r < h.k]
    for r in sizes:
        for axes in itertools.combinations(range(h.k), r):
            hs = project(h, axes)
            scope = f"projection {list(axes)}"
            pk, _ = _shape_checks(hs, scope, checks)
            if pk is None or not _structural_checks(hs, pk, scope, checks, cap, spread=True):
                return ClassificationResult("NotSemiNorming", None, checks, notes)
    if kind == "TypeII":
        notes.append("Type II verdict checks H = conj(H) only; no finer pairing structure is tested")
    notes.append("verdict is a necessary-condition screen, not a proof of the norm property")
    return ClassificationResult(kind, s, checks, notes)
