"""Eigenvalue inequality evaluators with uniform margin reports.

Every evaluator consumes a spectrum (closed-form or computed), the index
and dimension parameters, and the curvature data its right-hand side
needs, and emits an :class:`InequalityReport` carrying both sides, the
margin, satisfaction and equality flags, a term breakdown that recombines
exactly to the reported sides, and caller-supplied provenance.

Margins are oriented so that nonnegative means the bound holds:
``rhs - lhs`` for upper bounds, ``lhs - rhs`` for lower bounds.  A check is
satisfied when the margin is not below ``-1e-10 * max(|lhs|, |rhs|, 1)``
and flagged as an equality case when ``|margin| <= 1e-9`` on the same
scale.  Indices are 1-based and multiplicity-repeated; an index beyond the
resolved part of a spectrum is a hard error, never a silent truncation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigensolve import EigenBasis, basis_zero_dim
from .errors import (
    HypothesisViolatedError,
    IndexRangeError,
    InconsistentKernelError,
    NormalizationError,
    UsageError,
)
from .models import (
    Lattice,
    Spectrum,
    all_spin_structures,
    field_dimension,
    torus_dirac_spectrum,
)

ABS_TOL_REL = 1e-10
EQUALITY_REL = 1e-9

UPPER = "upper"
LOWER = "lower"
EXPLORATORY = "exploratory"


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of one inequality evaluation."""

    ineq_id: str
    direction: str
    params: dict
    lhs: float
    rhs: float
    margin: float
    satisfied: bool
    equality: bool
    term_breakdown: dict
    provenance: dict
    exploratory: bool = False
    subreports: tuple = ()

    def to_json_dict(self) -> dict:
        out = {
            "ineq_id": self.ineq_id,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "satisfied": self.satisfied,
            "equality": self.equality,
            "terms": self.term_breakdown,
            "provenance": self.provenance,
        }
        if self.exploratory:
            out["exploratory"] = True
        if self.subreports:
            out["subreports"] = [r.to_json_dict() for r in self.subreports]
        return out


def make_report(
    ineq_id,
    direction,
    lhs,
    rhs,
    params,
    terms,
    provenance=None,
    exploratory=False,
    subreports=(),
) -> InequalityReport:
    lhs = float(lhs)
    rhs = float(rhs)
    margin = (rhs - lhs) if direction == UPPER else (lhs - rhs)
    scale = max(abs(lhs), abs(rhs), 1.0)
    return InequalityReport(
        ineq_id=ineq_id,
        direction=direction,
        params=dict(params),
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        satisfied=bool(margin >= -ABS_TOL_REL * scale),
        equality=bool(abs(margin) <= EQUALITY_REL * scale),
        term_breakdown=dict(terms),
        provenance=dict(provenance or {}),
        exploratory=exploratory,
        subreports=tuple(subreports),
    )


# ---------------------------------------------------------------------------
# spectrum access


class SpectrumView:
    """Uniform 1-based, multiplicity-repeated access to either spectrum kind."""

    def __init__(self, source):
        if isinstance(source, Spectrum):
            self._spec = source
            self._values = None
            self.zero_dim = source.zero_dim
            self.length = source.total_count
        elif isinstance(source, EigenBasis):
            self._spec = None
            self._values = source.values
            self.zero_dim = basis_zero_dim(source)
            self.length = source.size
        else:
            raise UsageError(
                "expected a Spectrum or EigenBasis, got %r" % type(source).__name__
            )

    def gamma(self, j: int) -> float:
        if self._spec is not None:
            return self._spec.gamma(j)
        if j < 1 or j > self.length:
            raise IndexRangeError(
                "index %d outside resolved spectrum of length %d" % (j, self.length),
                index=j,
                length=self.length,
            )
        return float(self._values[j - 1])

    def gamma_bar(self, i: int) -> float:
        return self.gamma(i + self.zero_dim)

    def gamma_sum(self, start: int, count: int) -> float:
        """sum_{k=1..count} gamma(start + k), validated up front."""
        self.gamma(start + count)  # fail before any partial work
        return float(sum(self.gamma(start + k) for k in range(1, count + 1)))


def weighted_density_integral(field_values, s, mass_diag) -> float:
    """Discrete integral of ``field * s^2`` against the vertex measure.

    ``s`` must be mass-normalized; a normalization error is raised when
    |s^T M s - 1| exceeds 1e-6.
    """
    field_values = np.asarray(field_values, dtype=float)
    s = np.asarray(s, dtype=float)
    mass_diag = np.asarray(mass_diag, dtype=float)
    if field_values.shape != s.shape or s.shape != mass_diag.shape:
        raise UsageError(
            "field, eigenvector, and mass diagonal must share one shape",
            shapes=[field_values.shape, s.shape, mass_diag.shape],
        )
    norm_sq = float(np.dot(s * s, mass_diag))
    if abs(norm_sq - 1.0) > 1e-6:
        raise NormalizationError(
            "eigenvector has squared mass norm %.12g" % norm_sq, norm_sq=norm_sq
        )
    return float(np.dot(field_values * s * s, mass_diag))


@dataclass(frozen=True)
class WeightedCurvatureTerms:
    """The two curvature integrals of the main bound for one eigenvector.

    ``h_term`` is n^2 * integral of H^2 <s_j, s_j>; ``r_term`` is
    4 * integral of <R s_j, s_j> for the bundle curvature term R.  For
    homogeneous models with constant fields and unit-normalized sections
    these reduce to n^2 H^2 and 4 kappa.
    """

    h_term: float
    r_term: float

    @classmethod
    def from_constants(cls, n: int, H_sq: float, kappa: float) -> "WeightedCurvatureTerms":
        return cls(h_term=n**2 * H_sq, r_term=4.0 * kappa)

    @classmethod
    def from_vertex_fields(
        cls, n, H_sq_field, s, mass_diag, kappa_field=None
    ) -> "WeightedCurvatureTerms":
        h = n**2 * weighted_density_integral(H_sq_field, s, mass_diag)
        r = 0.0
        if kappa_field is not None:
            r = 4.0 * weighted_density_integral(kappa_field, s, mass_diag)
        return cls(h_term=h, r_term=r)


def _base_params(view: SpectrumView, **extra) -> dict:
    params = {"spectrum_length": view.length, "zero_dim": view.zero_dim}
    params.update(extra)
    return params


# ---------------------------------------------------------------------------
# the main bound and its relatives


def check_main_theorem(
    spectrum, j: int, n: int, terms: WeightedCurvatureTerms, provenance=None
) -> InequalityReport:
    """sum_{k=1..n} G_{j+k} <= (n+4) G_j + h_term - r_term."""
    view = SpectrumView(spectrum)
    if j < 1:
        raise IndexRangeError("index j must be >= 1, got %d" % j, index=j)
    if n < 1:
        raise UsageError("dimension n must be >= 1, got %d" % n, n=n)
    gamma_j = view.gamma(j)
    lhs = view.gamma_sum(j, n)
    lead = (n + 4) * gamma_j
    rhs = lead + terms.h_term - terms.r_term
    return make_report(
        "main",
        UPPER,
        lhs,
        rhs,
        _base_params(view, j=j, n=n),
        {
            "gamma_sum": lhs,
            "gamma_j": gamma_j,
            "lead_term": lead,
            "h_term": terms.h_term,
            "r_term": terms.r_term,
        },
        provenance,
    )


def check_corollary_eta(
    spectrum, j: int, n: int, c_sup: float, kappa: float, provenance=None
) -> InequalityReport:
    """Shifted form: with eta_i = G_i + (c_sup - 4 kappa)/4,
    sum_{i=1..n} (eta_{i+j} - eta_j) <= 4 eta_j.

    The shifted sequence eta is the spectrum shifted by a quarter of the
    curvature surplus; the margin agrees with the main bound at
    c_sup = n^2 H^2 identically.
    """
    view = SpectrumView(spectrum)
    if j < 1:
        raise IndexRangeError("index j must be >= 1, got %d" % j, index=j)
    shift = (c_sup - 4.0 * kappa) / 4.0
    gamma_j = view.gamma(j)
    eta_j = gamma_j + shift
    lhs = view.gamma_sum(j, n) - n * gamma_j
    rhs = 4.0 * eta_j
    return make_report(
        "eta-shift",
        UPPER,
        lhs,
        rhs,
        _base_params(view, j=j, n=n, c_sup=c_sup, kappa=kappa,
                     eigenvalue_convention="raw spectrum values"),
        {
            "gap_sum": lhs,
            "eta_j": eta_j,
            "shift": shift,
            "gamma_j": gamma_j,
        },
        provenance,
    )


def check_universal_euclidean(
    spectrum, j: int, n: int, c1: float, c2: float, provenance=None
) -> InequalityReport:
    """sum G_{j+k} <= (n+4) G_j + c1 - 4 c2 with immersion-wide constants.

    c1 bounds n^2 H^2 from above, c2 bounds the bundle curvature term from
    below; for a minimal immersion into a round sphere c1 = n^2.
    """
    view = SpectrumView(spectrum)
    lhs = view.gamma_sum(j, n)
    gamma_j = view.gamma(j)
    lead = (n + 4) * gamma_j
    rhs = lead + c1 - 4.0 * c2
    return make_report(
        "universal-euclidean",
        UPPER,
        lhs,
        rhs,
        _base_params(view, j=j, n=n, c1=c1, c2=c2),
        {"gamma_sum": lhs, "lead_term": lead, "c1": c1, "c2_term": 4.0 * c2},
        provenance,
    )


def check_universal_sphere(
    spectrum, j: int, n: int, c3: float, provenance=None
) -> InequalityReport:
    """Minimal-in-the-unit-sphere form: sum G_{j+k} <= (n+4) G_j + n^2 - 4 c3."""
    view = SpectrumView(spectrum)
    lhs = view.gamma_sum(j, n)
    gamma_j = view.gamma(j)
    lead = (n + 4) * gamma_j
    rhs = lead + n**2 - 4.0 * c3
    return make_report(
        "universal-sphere",
        UPPER,
        lhs,
        rhs,
        _base_params(view, j=j, n=n, c3=c3),
        {"gamma_sum": lhs, "lead_term": lead, "n_sq": float(n**2), "c3_term": 4.0 * c3},
        provenance,
    )


def check_sphere_theorem(
    spectrum, j: int, n: int, hbar1_integral: float, r_term: float, provenance=None
) -> InequalityReport:
    """Immersions into the unit sphere: the H^2 integral splits as
    (Hbar^2 + 1) with Hbar the mean curvature inside the sphere.

    ``hbar1_integral`` is the weighted integral of Hbar^2 + 1 against
    <s_j, s_j>; for homogeneous models it is the constant Hbar^2 + 1.
    """
    view = SpectrumView(spectrum)
    lhs = view.gamma_sum(j, n)
    gamma_j = view.gamma(j)
    lead = (n + 4) * gamma_j
    h_term = n**2 * hbar1_integral
    rhs = lead + h_term - r_term
    return make_report(
        "sphere",
        UPPER,
        lhs,
        rhs,
        _base_params(view, j=j, n=n),
        {"gamma_sum": lhs, "lead_term": lead, "h_term": h_term, "r_term": r_term},
        provenance,
    )


def _check_kernel_args(view: SpectrumView, n: int, m: int):
    if n < 1:
        raise UsageError("dimension n must be >= 1, got %d" % n, n=n)
    if m < 0:
        raise UsageError("kernel dimension m must be >= 0, got %d" % m, m=m)
    if m != view.zero_dim:
        raise InconsistentKernelError(
            "claimed kernel dimension %d but the spectrum has %d zero modes"
            % (m, view.zero_dim),
            claimed=m,
            zero_dim=view.zero_dim,
        )


def check_reilly_I(
    spectrum, n: int, m: int, h_sq_integral: float, volume: float, provenance=None
) -> InequalityReport:
    """(1/n) sum_{k=1..n} G_{k+m} <= (n/vol) * integral of H^2.

    Also emits the first-nonzero-eigenvalue specialization
    G_{m+1} <= (n/vol) * integral of H^2 as a sub-report.
    """
    view = SpectrumView(spectrum)
    _check_kernel_args(view, n, m)
    if volume <= 0.0:
        raise UsageError("volume must be positive, got %g" % volume, volume=volume)
    lhs = view.gamma_sum(m, n) / n
    rhs = (n / volume) * h_sq_integral
    params = _base_params(view, n=n, m=m, volume=volume)
    first = make_report(
        "first-nonzero-mean-curvature",
        UPPER,
        view.gamma(m + 1),
        rhs,
        params,
        {"gamma_bar_1": view.gamma(m + 1), "mean_h_sq": rhs},
        provenance,
    )
    return make_report(
        "reilly-mean-curvature",
        UPPER,
        lhs,
        rhs,
        params,
        {"gamma_mean": lhs, "h_sq_integral": h_sq_integral, "mean_h_sq": rhs},
        provenance,
        subreports=(first,),
    )


def check_reilly_II(
    spectrum, n: int, m: int, hbar1_integral_total: float, volume: float, provenance=None
) -> InequalityReport:
    """Sphere-immersion form of the kernel-shifted mean bound:
    (1/n) sum G_{k+m} <= (n/vol) * integral of (Hbar^2 + 1)."""
    view = SpectrumView(spectrum)
    _check_kernel_args(view, n, m)
    if volume <= 0.0:
        raise UsageError("volume must be positive, got %g" % volume, volume=volume)
    lhs = view.gamma_sum(m, n) / n
    rhs = (n / volume) * hbar1_integral_total
    return make_report(
        "reilly-sphere",
        UPPER,
        lhs,
        rhs,
        _base_params(view, n=n, m=m, volume=volume),
        {"gamma_mean": lhs, "hbar1_integral": hbar1_integral_total, "mean_bound": rhs},
        provenance,
    )


def check_reilly_III(
    spectrum,
    n: int,
    m: int,
    field_id: str,
    htilde_sq_integral: float,
    volume: float,
    provenance=None,
) -> InequalityReport:
    """Projective-target form: (1/n) sum G_{k+m} <=
    (n/vol) * integral of (Htilde^2 + 2(n + d_F)/n)."""
    view = SpectrumView(spectrum)
    _check_kernel_args(view, n, m)
    if volume <= 0.0:
        raise UsageError("volume must be positive, got %g" % volume, volume=volume)
    d = field_dimension(field_id)
    lhs = view.gamma_sum(m, n) / n
    integral = htilde_sq_integral + (2.0 * (n + d) / n) * volume
    rhs = (n / volume) * integral
    return make_report(
        "reilly-projective",
        UPPER,
        lhs,
        rhs,
        _base_params(view, n=n, m=m, field=field_id, volume=volume),
        {
            "gamma_mean": lhs,
            "htilde_sq_integral": htilde_sq_integral,
            "ambient_term": 2.0 * (n + d) / n,
            "mean_bound": rhs,
        },
        provenance,
    )


def check_projective(
    spectrum,
    j: int,
    n: int,
    field_id: str,
    sup_term: float | None = None,
    s_inf: float | None = None,
    minimal: bool = False,
    provenance=None,
) -> InequalityReport:
    """Gap form for immersions into a projective space:

    sum_{i=1..n} (G_{i+j} - G_j) <= 4 (G_j + (n/2)(n + d_F) + sup_term/4)

    with ``sup_term`` an upper bound for n^2 Htilde^2 - 4 kappa_S over the
    surface (infimum over congruences of the supremum).  For minimal
    immersions Htilde vanishes and the caller passes the scalar curvature
    infimum ``s_inf`` instead; the bound becomes
    4 (G_j + (n/2)(n + d_F) - s_inf).
    """
    view = SpectrumView(spectrum)
    d = field_dimension(field_id)
    gamma_j = view.gamma(j)
    lhs = view.gamma_sum(j, n) - n * gamma_j
    ambient = 0.5 * n * (n + d)
    if minimal:
        if s_inf is None:
            raise UsageError("minimal form needs s_inf")
        rhs = 4.0 * (gamma_j + ambient - s_inf)
        terms = {"gap_sum": lhs, "gamma_j": gamma_j, "ambient": ambient, "s_inf": s_inf}
    else:
        if sup_term is None:
            raise UsageError("general form needs sup_term")
        rhs = 4.0 * (gamma_j + ambient + sup_term / 4.0)
        terms = {
            "gap_sum": lhs,
            "gamma_j": gamma_j,
            "ambient": ambient,
            "sup_term": sup_term,
        }
    return make_report(
        "projective",
        UPPER,
        lhs,
        rhs,
        _base_params(view, j=j, n=n, field=field_id, minimal=minimal),
        terms,
        provenance,
    )


def check_lp_spin(
    spectrum, j: int, n: int, b_sq_supinf: float, provenance=None
) -> InequalityReport:
    """Flat-space spin form: sum G_{j+k} <= (n+4) G_j + inf sup |B|^2."""
    view = SpectrumView(spectrum)
    lhs = view.gamma_sum(j, n)
    gamma_j = view.gamma(j)
    lead = (n + 4) * gamma_j
    rhs = lead + b_sq_supinf
    return make_report(
        "flat-spin",
        UPPER,
        lhs,
        rhs,
        _base_params(view, j=j, n=n),
        {"gamma_sum": lhs, "lead_term": lead, "b_sq_supinf": b_sq_supinf},
        provenance,
    )


def check_index_corollary(
    spectrum, n: int, m: int, b_sq_supinf: float, provenance=None
) -> InequalityReport:
    """Kernel-anchored form: sum_{i=1..n} Gbar_i <= inf sup |B|^2.

    Requires actual zero modes (m >= 1); the hypothesis is consumed as the
    presence of a kernel, so m must match the spectrum's zero count.
    """
    view = SpectrumView(spectrum)
    if m < 1:
        raise HypothesisViolatedError(
            "the kernel-anchored bound needs at least one zero mode", m=m
        )
    _check_kernel_args(view, n, m)
    lhs = view.gamma_sum(m, n)
    return make_report(
        "kernel-gap-sum",
        UPPER,
        lhs,
        b_sq_supinf,
        _base_params(view, n=n, m=m),
        {"gamma_bar_sum": lhs, "b_sq_supinf": b_sq_supinf},
        provenance,
    )


# ---------------------------------------------------------------------------
# background bounds


def check_background_bounds(spectrum, params: dict, provenance=None) -> list:
    """Evaluate the classical comparison bounds whose inputs are present.

    Keys of ``params`` select the bounds: every bound with all of its
    required inputs available is evaluated, the rest are skipped.  All
    constant curvature inputs follow the homogeneous-model convention
    (fields constant, sections unit-normalized).
    """
    view = SpectrumView(spectrum)
    n = params.get("n")
    if n is None:
        raise UsageError("background bounds need the dimension n")
    reports = []

    if "S0" in params:
        s0 = params["S0"]
        if n < 2:
            raise UsageError("the scalar-curvature lower bound needs n >= 2", n=n)
        rhs = n * s0 / (4.0 * (n - 1.0))
        reports.append(
            make_report(
                "scalar-curvature-lower",
                LOWER,
                view.gamma(1),
                rhs,
                _base_params(view, n=n, S0=s0),
                {"gamma_1": view.gamma(1), "bound": rhs},
                provenance,
            )
        )

    if "genus" in params and "area" in params:
        genus, area = params["genus"], params["area"]
        rhs = 4.0 * np.pi * (1.0 - genus) / area
        reports.append(
            make_report(
                "genus-area-lower",
                LOWER,
                view.gamma(1),
                rhs,
                _base_params(view, n=n, genus=genus, area=area),
                {"gamma_1": view.gamma(1), "bound": rhs},
                provenance,
            )
        )

    if "gap_k" in params and "H_sq" in params:
        k = params["gap_k"]
        kappa = params.get("kappa", 0.0)
        h_sq = params["H_sq"]
        partial = sum(view.gamma(i) for i in range(1, k + 1))
        lhs = view.gamma(k + 1) - view.gamma(k)
        rhs = n * h_sq + (4.0 / (k * n)) * partial - (4.0 / n) * kappa
        reports.append(
            make_report(
                "successive-gap",
                UPPER,
                lhs,
                rhs,
                _base_params(view, n=n, k=k, H_sq=h_sq, kappa=kappa),
                {
                    "gap": lhs,
                    "h_lead": n * h_sq,
                    "partial_sum_term": (4.0 / (k * n)) * partial,
                    "kappa_term": (4.0 / n) * kappa,
                },
                provenance,
            )
        )

    if "B_sq_sup" in params:
        rank = 2 ** (n // 2)
        rhs = rank * params["B_sq_sup"]
        reports.append(
            make_report(
                "second-form-first-nonzero",
                UPPER,
                view.gamma_bar(1),
                rhs,
                _base_params(view, n=n, B_sq_sup=params["B_sq_sup"]),
                {"gamma_bar_1": view.gamma_bar(1), "rank_factor": float(rank)},
                provenance,
            )
        )

    if "H_sq_integral" in params and "volume" in params:
        rhs = n**2 / (4.0 * params["volume"]) * params["H_sq_integral"]
        reports.append(
            make_report(
                "hypersurface-euclidean",
                UPPER,
                view.gamma_bar(1),
                rhs,
                _base_params(view, n=n, volume=params["volume"]),
                {"gamma_bar_1": view.gamma_bar(1), "mean_h_sq_term": rhs},
                provenance,
            )
        )

    if "Htilde_sq_integral" in params and "volume" in params:
        mean_term = n**2 / (4.0 * params["volume"]) * params["Htilde_sq_integral"]
        rhs = n**2 / 4.0 + mean_term
        reports.append(
            make_report(
                "hypersurface-sphere",
                UPPER,
                view.gamma_bar(1),
                rhs,
                _base_params(view, n=n, volume=params["volume"]),
                {
                    "gamma_bar_1": view.gamma_bar(1),
                    "flat_term": n**2 / 4.0,
                    "mean_term": mean_term,
                },
                provenance,
            )
        )

    if "yang_k" in params and "H_sq" in params:
        k = params["yang_k"]
        kappa = params.get("kappa", 0.0)
        h_sq = params["H_sq"]
        top = view.gamma(k + 1)
        gaps = np.array([top - view.gamma(i) for i in range(1, k + 1)])
        weights = np.array(
            [view.gamma(i) + n**2 / 4.0 * h_sq - kappa for i in range(1, k + 1)]
        )
        lhs = float(np.sum(gaps**2))
        rhs = float(4.0 / n * np.sum(gaps * weights))
        reports.append(
            make_report(
                "quadratic-gap",
                UPPER,
                lhs,
                rhs,
                _base_params(view, n=n, k=k, H_sq=h_sq, kappa=kappa),
                {"gap_sq_sum": lhs, "weighted_gap_sum": rhs},
                provenance,
            )
        )

    if "chen_H_sq" in params:
        kappa = params.get("kappa", 0.0)
        terms = WeightedCurvatureTerms.from_constants(n, params["chen_H_sq"], kappa)
        base = check_main_theorem(spectrum, 1, n, terms, provenance)
        reports.append(
            InequalityReport(
                ineq_id="low-order-gap",
                direction=base.direction,
                params=base.params,
                lhs=base.lhs,
                rhs=base.rhs,
                margin=base.margin,
                satisfied=base.satisfied,
                equality=base.equality,
                term_breakdown=base.term_breakdown,
                provenance=base.provenance,
            )
        )

    if "lp_j" in params:
        j = params["lp_j"]
        lhs = view.gamma_sum(j, n)
        rhs = (n + 4) * view.gamma(j)
        reports.append(
            make_report(
                "flat-domain-sum",
                UPPER,
                lhs,
                rhs,
                _base_params(view, n=n, j=j),
                {"gamma_sum": lhs, "lead_term": rhs},
                provenance,
            )
        )

    if not reports:
        raise UsageError("no background bound matched the supplied parameters",
                         keys=sorted(params.keys()))
    return reports


# ---------------------------------------------------------------------------
# exploratory conjecture probe


def conjecture_probe(
    lat: Lattice, area: float | None = None, spins=None, count: int = 64
) -> list:
    """Exploratory flat-torus probe: (Gbar_1 + Gbar_2)/2 against 4 pi^2/area.

    Evaluated for every spin structure (all four on a 2-torus by default)
    because the conjectured statement does not pin one down.  The reports
    are labeled exploratory; they never feed pass/fail aggregation.
    """
    if lat.dim != 2:
        raise UsageError(
            "the probe needs a 2-dimensional lattice, got dimension %d" % lat.dim,
            dim=lat.dim,
        )
    if area is None:
        area = lat.covolume
    if area <= 0.0:
        raise UsageError("area must be positive, got %g" % area, area=area)
    if spins is None:
        spins = all_spin_structures(lat.dim)
    rhs = 4.0 * np.pi**2 / area
    reports = []
    for spin in spins:
        spec = torus_dirac_spectrum(lat, spin, count)
        view = SpectrumView(spec)
        g1, g2 = view.gamma_bar(1), view.gamma_bar(2)
        lhs = 0.5 * (g1 + g2)
        reports.append(
            make_report(
                "two-mean-lower",
                LOWER,
                lhs,
                rhs,
                {
                    "spin": spin.label(),
                    "area": area,
                    "zero_dim": spec.zero_dim,
                },
                {"gamma_bar_1": g1, "gamma_bar_2": g2, "two_mean": lhs, "bound": rhs},
                provenance={"spectrum": "torus_dirac"},
                exploratory=True,
            )
        )
    return reports


def aggregate_exit(reports) -> bool:
    """True when every non-exploratory report is satisfied."""
    return all(r.satisfied for r in reports if not r.exploratory)
