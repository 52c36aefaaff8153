"""Named curve families with closed-form HK predictions.

Two quartic families with explicitly known multiplicities drive the
end-to-end validation: in characteristic 2 the curves
alpha*x^2*y^2 + z^4 + x*y*z^2 + (x^3+y^3)*z have HKM = 3 + 4^(-m(alpha))
where m(alpha) is the degree over GF(2) of a solution of
lambda^2 + lambda = alpha, and in characteristic 3 the curves
z^4 - x*y*(x+y)*(x+lambda*y) have HKM = 3 + 3^(-2*d(lambda)) with
d(lambda) the degree of lambda over GF(3).  Matching those against the
trichotomy forces l = 4 and s = m (resp. s = d), which is what the
classifier should recover from raw colength data.

Curves with a point of multiplicity r >= d/2 give the third family:
HKM = 3d/4 + (2r-d)^2/4d, strongly semistable at r = d/2 and destabilized
already at s = 0 (with l = 2r - d) for r > d/2.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .classify import HKReport, snap_classify
from .engine import hk_sequence
from .gf import FieldElement, FieldSpec, d_lambda, m_alpha
from .poly import HomogeneousPoly, PlaneCurve, Poly


class FamilyError(ValueError):
    pass


@dataclass
class FamilyPrediction:
    curve: PlaneCurve
    predicted_hkm: Fraction
    predicted_s: int | None  # None marks strong semistability (s = infinity)
    predicted_l: int
    provenance: str
    param: str = ""


def _xyz(spec: FieldSpec) -> tuple[Poly, Poly, Poly]:
    return (
        Poly.variable(spec, "x"),
        Poly.variable(spec, "y"),
        Poly.variable(spec, "z"),
    )


def monsky_char2(alpha: FieldElement) -> FamilyPrediction:
    """Characteristic-2 quartic with HKM = 3 + 4^(-m(alpha)), alpha != 0."""
    spec = alpha.spec
    if spec.p != 2:
        raise FamilyError("this family lives in characteristic 2")
    if not alpha:
        raise FamilyError("alpha must be nonzero")
    x, y, z = _xyz(spec)
    f = alpha * x**2 * y**2 + z**4 + x * y * z**2 + (x**3 + y**3) * z
    m = m_alpha(alpha)
    curve = PlaneCurve(
        HomogeneousPoly.from_poly(f),
        known_smooth=True,
        name=f"monsky2(alpha={alpha})",
    )
    return FamilyPrediction(
        curve=curve,
        predicted_hkm=3 + Fraction(1, 4**m),
        predicted_s=m,
        predicted_l=4,
        provenance="char-2 quartic family: HKM = 3 + 4^(-m(alpha))",
        param=str(alpha),
    )


def monsky_char3(lam: FieldElement) -> FamilyPrediction:
    """Characteristic-3 quartic with HKM = 3 + 3^(-2 d(lambda)), lambda not in {0,1}."""
    spec = lam.spec
    if spec.p != 3:
        raise FamilyError("this family lives in characteristic 3")
    if lam == spec.zero() or lam == spec.one():
        raise FamilyError("lambda must avoid {0, 1}")
    x, y, z = _xyz(spec)
    f = z**4 - x * y * (x + y) * (x + lam * y)
    dl = d_lambda(lam)
    curve = PlaneCurve(
        HomogeneousPoly.from_poly(f),
        known_smooth=True,
        name=f"monsky3(lambda={lam})",
    )
    return FamilyPrediction(
        curve=curve,
        predicted_hkm=3 + Fraction(1, 3 ** (2 * dl)),
        predicted_s=dl,
        predicted_l=4,
        provenance="char-3 quartic family: HKM = 3 + p^(-2 d(lambda))",
        param=str(lam),
    )


def singular_prediction(d: int, r: int) -> Fraction:
    """HKM of an irreducible degree-d curve with a multiplicity-r point, r >= d/2."""
    if d <= 1:
        raise FamilyError("need degree > 1")
    if 2 * r < d:
        raise FamilyError(f"prediction requires r >= d/2, got r={r}, d={d}")
    if r >= d:
        raise FamilyError(f"a multiplicity-{r} point forces degree > {r}")
    return Fraction(3 * d, 4) + Fraction((2 * r - d) ** 2, 4 * d)


def singular_curve(d: int, r: int, spec: FieldSpec) -> PlaneCurve:
    """Built-in representative y^r z^(d-r) - x^d, multiplicity r at [0:0:1].

    The binomial is irreducible over the closure exactly when gcd(d, r) = 1,
    so other parameter pairs have no built-in curve (the prediction formula
    is still available for user-supplied equations).
    """
    if not (1 <= r < d):
        raise FamilyError(f"need 1 <= r < d, got r={r}, d={d}")
    if math.gcd(d, r) != 1:
        raise FamilyError(
            f"no built-in representative for (d={d}, r={r}): y^r z^(d-r) - x^d "
            "factors when gcd(d, r) > 1"
        )
    x, y, z = _xyz(spec)
    f = y**r * z ** (d - r) - x**d
    return PlaneCurve(
        HomogeneousPoly.from_poly(f),
        known_smooth=False,
        name=f"singular(d={d},r={r})",
    )


def singular_family(d: int, r: int, spec: FieldSpec) -> FamilyPrediction:
    curve = singular_curve(d, r, spec)
    hkm = singular_prediction(d, r)
    l = 2 * r - d
    return FamilyPrediction(
        curve=curve,
        predicted_hkm=hkm,
        predicted_s=None if l == 0 else 0,
        predicted_l=l,
        provenance="multiplicity-r point: HKM = 3d/4 + (2r-d)^2/4d",
        param=f"d={d},r={r}",
    )


# ---------------------------------------------------------------------------
# parameter sweeps
# ---------------------------------------------------------------------------

@dataclass
class SweepRow:
    param: str
    invariant: int | None  # m(alpha) or d(lambda); None for singular rows
    predicted: Fraction
    measured: Fraction | None
    agree: str  # "true" | "false" | "ambiguous"
    report: HKReport


def _orbit_representatives(spec: FieldSpec, exclude: set[int]) -> list[FieldElement]:
    """One element per Frobenius orbit, the smallest index representing each."""
    seen: set[int] = set()
    reps = []
    for idx in range(spec.order):
        if idx in exclude or idx in seen:
            continue
        a = spec.from_index(idx)
        orbit = {a.index()}
        b = a.frobenius()
        while b != a:
            orbit.add(b.index())
            b = b.frobenius()
        seen.update(orbit)
        reps.append(a)
    return reps


def _measure(pred: FamilyPrediction, n_max: int, threads: int = 1,
             progress: Callable | None = None) -> SweepRow:
    samples = hk_sequence(pred.curve, n_max, threads=threads, progress=progress)
    report = snap_classify(
        samples,
        pred.curve.d,
        pred.curve.p,
        smooth=pred.curve.known_smooth,
        curve_name=pred.curve.name,
    )
    if not report.accepted:
        agree, measured = "ambiguous", None
    elif report.hkm == pred.predicted_hkm:
        agree, measured = "true", report.hkm
    else:
        agree, measured = "false", report.hkm
    invariant = pred.predicted_s
    return SweepRow(pred.param, invariant, pred.predicted_hkm, measured, agree, report)


def sweep_monsky2(k: int, n_max: int, threads: int = 1,
                  progress: Callable | None = None) -> list[SweepRow]:
    spec = FieldSpec(2, k)
    rows = []
    for alpha in _orbit_representatives(spec, exclude={0}):
        rows.append(_measure(monsky_char2(alpha), n_max, threads, progress))
    return rows


def sweep_monsky3(k: int, n_max: int, threads: int = 1,
                  progress: Callable | None = None) -> list[SweepRow]:
    spec = FieldSpec(3, k)
    exclude = {spec.zero().index(), spec.one().index()}
    rows = []
    for lam in _orbit_representatives(spec, exclude=exclude):
        rows.append(_measure(monsky_char3(lam), n_max, threads, progress))
    return rows


def sweep_singular(d: int, r: int, spec: FieldSpec, n_max: int, threads: int = 1,
                   progress: Callable | None = None) -> list[SweepRow]:
    return [_measure(singular_family(d, r, spec), n_max, threads, progress)]


def sweep_to_csv(rows: Iterable[SweepRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["param", "invariant", "predicted", "measured", "agree"])
    for row in rows:
        writer.writerow([
            row.param,
            "" if row.invariant is None else row.invariant,
            str(row.predicted),
            "" if row.measured is None else str(row.measured),
            row.agree,
        ])
    return out.getvalue()
