"""Positivity certificates for Novikov acyclicity and the fibring verdicts built on them.

A certificate in degree ``n`` for a chain complex ``C`` and character ``phi``
is a list of finite group ring matrices ``sbar_0 .. sbar_n`` (``sbar_i`` of
shape ``n_i x n_{i+1}``) such that every entry of

    E_i = I - D_i @ sbar_{i-1} - sbar_i @ D_{i+1}

has strictly positive phi-support.  Then ``I - E_i`` is invertible over the
Novikov ring by the geometric series, ``s_i = sbar_i @ sum_k E_{i+1}^k`` is a
genuine partial chain contraction and the Novikov homology vanishes up to
degree ``n``.  Checking a certificate needs only finite exact arithmetic.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from math import gcd

from sympy import nextprime

from .chain import ChainComplex, check_shapes, dualize, parse_resolution, presentation_complex, verify_complex
from .coefficients import CoefficientRing, parse_field, primes_of_denominators
from .errors import (
    DenominatorDivisible,
    InsufficientPrecision,
    NoCharacters,
    NotACocycle,
    ShapeMismatch,
    UnverifiedInput,
)
from .groupring import (
    GroupRing,
    GroupRingElement,
    identity_matrix,
    is_positive_support,
    mat_is_zero,
    mat_mul,
    mat_sub,
    mat_valuation,
    matrix_from_json,
    matrix_to_json,
    truncate,
)
from .novikov import (
    INF,
    NotInRowSpace,
    NovikovApprox,
    NovikovMatrix,
    StepBudgetExhausted,
    eliminate,
    geometric_transform,
    nmat_mul,
    solve_left,
)
from .oracle import SigmaMembership, oracle_sigma
from .presentation import Character, Presentation, parse_presentation, validate_character


@dataclass(frozen=True)
class Budget:
    precision: int = 8
    max_steps: int = 10**6

    def to_json(self) -> dict:
        return {"precision": self.precision, "max_steps": self.max_steps}


@dataclass
class Certificate:
    presentation: Presentation
    phi: Character
    coeffs: CoefficientRing
    degree: int
    s: list
    E: list
    verified: bool = False
    budget_used: dict = field(default_factory=dict)
    resolution_text: str | None = None

    def to_json(self) -> dict:
        group = {"name": self.presentation.name, "presentation": self.presentation.to_text()}
        if self.resolution_text is not None:
            group["resolution"] = self.resolution_text
        return {
            "group": group,
            "character": {"values": list(self.phi.values), "scale": self.phi.scale},
            "ring": str(self.coeffs),
            "degree": self.degree,
            "s_matrices": [matrix_to_json(m, self.phi) for m in self.s],
            "E_matrices": [matrix_to_json(m, self.phi) for m in self.E],
            "verified": self.verified,
            "budget_used": self.budget_used,
        }


def certificate_from_json(data: dict, ring: GroupRing | None = None) -> tuple[Certificate, ChainComplex]:
    """Rebuild a certificate and the complex it refers to."""
    p = parse_presentation(data["group"]["presentation"])
    coeffs = parse_field(data["ring"])
    if ring is None:
        ring = GroupRing.of(p, coeffs)
    res = data["group"].get("resolution")
    c = parse_resolution(res, ring) if res else presentation_complex(p, ring=ring)
    ch = data["character"]
    phi = Character(tuple(ch["values"]), ch.get("scale", 1))
    s = [matrix_from_json(ring, m) for m in data["s_matrices"]]
    E = [matrix_from_json(ring, m) for m in data["E_matrices"]]
    cert = Certificate(p, phi, coeffs, data["degree"], s, E, data.get("verified", False), data.get("budget_used", {}), res)
    return cert, c


# ------------------------------------------------------------- verification


def error_matrices(c: ChainComplex, s: list, degree: int) -> list:
    """``E_i = I - D_i @ s_{i-1} - s_i @ D_{i+1}`` for ``i = 0..degree``."""
    ring = c.ring
    out = []
    for i in range(degree + 1):
        E = identity_matrix(ring, c.rank(i))
        if i >= 1 and c.rank(i - 1):
            E = mat_sub(E, mat_mul(c.boundary(i), s[i - 1], ring))
        if c.rank(i + 1):
            E = mat_sub(E, mat_mul(s[i], c.boundary(i + 1), ring))
        out.append(E)
    return out


def _all_positive(E: list, phi: Character) -> bool:
    return all(is_positive_support(x, phi) for m in E for row in m for x in row)


def verify_certificate(c: ChainComplex, cert: Certificate) -> bool:
    """Exact re-check of a certificate against a complex.

    Recomputes every ``E_i`` from the ``sbar`` data, requires strictly
    positive support entrywise, re-checks ``D @ D == 0`` and the chain map
    identity ``E_i @ D_i == D_i @ E_{i-1}``.
    """
    n = cert.degree
    if len(cert.s) != n + 1:
        raise ShapeMismatch(f"expected {n + 1} contraction matrices, got {len(cert.s)}")
    if n > c.max_certifiable_degree():
        raise ShapeMismatch(f"degree {n} needs boundary D_{n + 1}, which the complex does not provide")
    for i, m in enumerate(cert.s):
        check_shapes(c, i, m, c.rank(i), c.rank(i + 1), "contraction")
    if not verify_complex(c):
        return False
    E = error_matrices(c, cert.s, n)
    if not _all_positive(E, cert.phi):
        return False
    if cert.E and any(not mat_is_zero(mat_sub(a, b)) for a, b in zip(E, cert.E)):
        return False
    for i in range(1, n + 1):
        if c.rank(i) and c.rank(i - 1):
            lhs = mat_mul(E[i], c.boundary(i), c.ring)
            rhs = mat_mul(c.boundary(i), E[i - 1], c.ring)
            if not mat_is_zero(mat_sub(lhs, rhs)):
                return False
    return True


# -------------------------------------------------------------------- search


@dataclass
class SearchFailure:
    """Why no certificate was found (never a proof of non-vanishing)."""

    degree: int
    reason: str
    detail: dict = field(default_factory=dict)
    budget_used: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"degree": self.degree, "reason": self.reason, "detail": self.detail, "budget_used": self.budget_used}


def _novikov_contractions(c: ChainComplex, phi: Character, n: int, work: int, budget: Budget):
    """Solve ``S_i @ D_{i+1} = I - D_i @ S_{i-1}`` over the Novikov ring at working precision ``work``.

    Returns the list of Novikov matrices, or a :class:`SearchFailure`.
    """
    ring = c.ring
    S_prev = None
    out = []
    steps = 0
    for i in range(n + 1):
        ni = c.rank(i)
        T = NovikovMatrix.identity(ring, ni, phi)
        if i >= 1 and c.rank(i - 1):
            DS = nmat_mul(NovikovMatrix.exact(c.boundary(i), phi), S_prev, cap=work)
            T = T - DS
        nnext = c.rank(i + 1)
        if nnext == 0:
            if not T.is_known_zero():
                return SearchFailure(i, "no higher cells to bound the cycles", {})
            out.append(NovikovMatrix.zeros(ring, ni, 0, phi))
            S_prev = out[-1]
            continue
        try:
            rec = eliminate(NovikovMatrix.exact(c.boundary(i + 1), phi), work, max_steps=budget.max_steps - steps)
        except StepBudgetExhausted:
            return SearchFailure(i, "elimination step cap reached", {"max_steps": budget.max_steps})
        steps += rec.steps
        if rec.stuck is not None:
            return SearchFailure(i, "stuck", rec.stuck.to_json())
        try:
            S = solve_left(rec, T, work)
        except NotInRowSpace as exc:
            return SearchFailure(i, "cycle outside the boundary row space", {"row": exc.row, "column": exc.column})
        out.append(S)
        S_prev = S
    return out


def search_certificate(c: ChainComplex, phi: Character, n: int, budget: Budget | None = None, presentation=None):
    """Look for a certificate up to degree ``n``; returns a Certificate or a SearchFailure.

    The Novikov contraction is found by elimination at a working precision;
    its truncations at ``kappa = 0, 1, ..., budget.precision`` are tried in
    turn and the first one whose error matrices are positive is returned.
    """
    budget = budget or Budget()
    if n > c.max_certifiable_degree():
        raise ValueError(f"degree {n} exceeds what this complex supports ({c.max_certifiable_degree()})")
    p = presentation or c.ring.presentation
    # Positivity is invariant under positive scaling, so work with the
    # primitive character; truncation levels are counted from the lowest
    # level occurring in the boundary matrices.
    prim = phi.primitive
    shift = boundary_shift(c, prim, n)
    work = 4 + 2 * shift
    limit = 4 * (budget.precision + 1) + 4 * shift
    last = None
    while True:
        try:
            S = _novikov_contractions(c, prim, n, work, budget)
        except InsufficientPrecision:
            S = None
        if isinstance(S, SearchFailure):
            S.budget_used = {"working_precision": work, "offset": shift, **budget.to_json()}
            return S
        if S is not None:
            avail = min((m.precision for m in S), default=INF)
            for kappa in range(0, budget.precision + 1):
                level = shift + kappa
                if level > avail:
                    break
                sbar = [m.truncate_heads(level) for m in S]
                E = error_matrices(c, sbar, n)
                if _all_positive(E, prim):
                    used = {"kappa": kappa, "offset": shift, "working_precision": work, **budget.to_json()}
                    cert = Certificate(p, phi, c.ring.coeffs, n, sbar, E, False, used, _resolution_text(c))
                    cert.verified = verify_certificate(c, cert)
                    return cert
            last = avail
            if avail >= shift + budget.precision:
                return SearchFailure(
                    n,
                    "no truncation within the precision budget has positive error",
                    budget_used={"working_precision": work, "offset": shift, **budget.to_json()},
                )
        if work >= limit:
            return SearchFailure(
                n,
                "working precision limit reached",
                {"available_precision": None if last in (None, INF) else last},
                {"working_precision": work, "offset": shift, **budget.to_json()},
            )
        work = min(2 * work, limit)


def boundary_shift(c: ChainComplex, phi: Character, n: int) -> int:
    """How far below level 0 the boundaries used by a degree-n search reach."""
    vals = [mat_valuation(c.boundary(i), phi) for i in range(1, n + 2) if c.rank(i) and c.rank(i - 1)]
    low = min(vals, default=0)
    return 0 if low == INF else max(0, -low)


def _resolution_text(c: ChainComplex) -> str | None:
    return c.text if c.source == "resolution" else None


# ----------------------------------------------------------------- soundness


def contraction_residual(c: ChainComplex, cert: Certificate, z: list, i: int, K: int) -> list:
    """``z - (sum_{k<K} z @ E_i^k) @ sbar_i @ D_{i+1}`` for a cycle ``z`` (a row vector).

    For a cycle this equals ``z @ E_i^K`` and hence has valuation at least
    ``valuation(z) + K``.
    """
    ring = c.ring
    E = error_matrices(c, cert.s, cert.degree)[i]
    power = [list(z)]
    acc = list(z)
    for _ in range(1, K):
        power = mat_mul(power, E, ring)
        acc = [a + b for a, b in zip(acc, power[0])]
    if c.rank(i + 1):
        image = mat_mul(mat_mul([acc], cert.s[i], ring), c.boundary(i + 1), ring)
    else:
        image = [[ring.zero() for _ in range(c.rank(i))]]
    return [x - y for x, y in zip(z, image[0])]


# ---------------------------------------------------------------------- flip


def _involute(x):
    if isinstance(x, NovikovApprox):
        return NovikovApprox(x.head.involution(), x.precision, -x.phi)
    return x.involution()


def flip_cobound(c: ChainComplex, cert: Certificate, z: list, i: int, kappa: int) -> list:
    """Cobound a cocycle of the dual complex over the Novikov ring of ``-phi``.

    ``z`` is a row cochain of degree ``i`` of :func:`chain.dualize` (exact
    group ring elements or :class:`NovikovApprox` under ``-phi``) with
    ``z @ delta_{i+1} = 0``.  Returns ``w`` of degree ``i-1`` with
    ``w @ delta_i = z`` at precision ``kappa``.

    Internally the involution turns ``z`` into a column ``y`` over the
    phi-completion with ``D_{i+1} @ y = 0``, and ``w`` is the involution of
    ``s_{i-1} @ y`` where ``s_{i-1} = sbar_{i-1} @ sum_k E_i^k``.
    """
    if not 0 <= i <= cert.degree:
        raise ValueError(f"degree {i} outside the certificate range 0..{cert.degree}")
    phi = cert.phi
    ring = c.ring
    col = [[_as_approx(_involute(x), phi)] for x in z]
    if len(col) != c.rank(i):
        raise ShapeMismatch(f"cochain has {len(col)} entries, C_{i} has rank {c.rank(i)}")
    y = NovikovMatrix(col, phi, (c.rank(i), 1))
    if c.rank(i + 1):
        Dn = NovikovMatrix.exact(c.boundary(i + 1), phi)
        check = nmat_mul(Dn, y, cap=kappa)
        if check.precision < kappa:
            raise NotACocycle(f"cocycle condition cannot be checked at precision {kappa}")
        if not check.cap(kappa).is_known_zero():
            raise NotACocycle(f"coboundary of z is nonzero at precision {kappa}")
    if i == 0:
        if not y.cap(kappa).is_known_zero():
            raise NotACocycle("the only degree-0 cocycle is zero once the certificate exists")
        return []
    s_prev = cert.s[i - 1]
    D = c.boundary(i)
    vs = mat_valuation(s_prev, phi)
    vD = mat_valuation(D, phi)
    boost = kappa - min(0, vs if vs != INF else 0) - min(0, vD if vD != INF else 0)
    E = NovikovMatrix.exact(error_matrices(c, cert.s, cert.degree)[i], phi)
    G = geometric_transform(E, y, boost, side="left")
    w = nmat_mul(NovikovMatrix.exact(s_prev, phi), G, cap=boost)
    return [_involute(w.rows[r][0]) for r in range(c.rank(i - 1))]


def _as_approx(x, phi):
    if isinstance(x, NovikovApprox):
        return x
    return NovikovApprox.exact(x, phi)


def dual_coboundary_check(c: ChainComplex, w: list, z: list, i: int, kappa: int, phi_dual: Character) -> bool:
    """``w @ delta_i`` agrees with ``z`` at all (-phi)-levels at most ``kappa``."""
    dual = dualize(c)
    delta = NovikovMatrix.exact(dual.coboundaries[i], phi_dual)
    W = NovikovMatrix([[_as_approx(x, phi_dual) for x in w]], phi_dual, (1, len(w)))
    lhs = nmat_mul(W, delta, cap=kappa)
    Z = NovikovMatrix([[_as_approx(x, phi_dual) for x in z]], phi_dual, (1, len(z)))
    return lhs.agrees_with(Z.cap(kappa), kappa)


# ------------------------------------------------------------------ verdicts


@dataclass
class DirectionResult:
    sign: int
    phi: Character
    certificate: Certificate | None
    failure: SearchFailure | None
    in_sigma: bool | None = None

    @property
    def certified(self) -> bool:
        return self.certificate is not None and self.certificate.verified

    def to_json(self, include_certificate: bool = True) -> dict:
        out = {
            "sign": "+" if self.sign > 0 else "-",
            "character": list(self.phi.full_values),
            "certified": self.certified,
            "oracle_in_sigma": self.in_sigma,
        }
        if self.certificate is not None and include_certificate:
            out["certificate"] = self.certificate.to_json()
        if self.failure is not None:
            out["failure"] = self.failure.to_json()
        return out


@dataclass
class Verdict:
    kind: str  # "FibredFPn", "NotFibred", "Inconclusive"
    degree: int
    phi: Character
    field: str
    plus: DirectionResult
    minus: DirectionResult
    oracle: SigmaMembership | None = None
    notes: list = field(default_factory=list)

    @property
    def label(self) -> str:
        return f"FibredFP{self.degree}" if self.kind == "FibredFPn" else self.kind

    @property
    def exit_code(self) -> int:
        return {"FibredFPn": 0, "NotFibred": 1, "Inconclusive": 2}[self.kind]

    def certified_directions(self) -> tuple:
        return (self.plus.certified, self.minus.certified)

    def to_json(self, include_certificates: bool = True) -> dict:
        return {
            "verdict": self.label,
            "degree": self.degree,
            "character": list(self.phi.full_values),
            "field": self.field,
            "plus": self.plus.to_json(include_certificates),
            "minus": self.minus.to_json(include_certificates),
            "oracle": self.oracle.to_json() if self.oracle else None,
            "notes": list(self.notes),
        }


def _direction(c, phi, sign, n, budget, p) -> DirectionResult:
    res = search_certificate(c, phi, n, budget, p)
    if isinstance(res, Certificate):
        if res.verified:
            return DirectionResult(sign, phi, res, None)
        return DirectionResult(sign, phi, None, SearchFailure(n, "candidate failed verification"))
    return DirectionResult(sign, phi, None, res)


def sikorav_verdict(
    p: Presentation,
    phi: Character,
    coeffs: CoefficientRing | None = None,
    n: int = 1,
    budget: Budget | None = None,
    complex_: ChainComplex | None = None,
    use_oracle: bool = True,
) -> Verdict:
    """Fibred iff certificates exist for both ``phi`` and ``-phi``.

    Search failure alone never yields "NotFibred"; only an oracle stating
    that one of the classes lies outside the BNS invariant does, and that
    refutes finite generation of the kernel, hence FP_n for every n >= 1.
    """
    coeffs = coeffs or CoefficientRing.rationals()
    c = complex_ or presentation_complex(p, coeffs=coeffs)
    plus = _direction(c, phi, 1, n, budget, p)
    minus = _direction(c, -phi, -1, n, budget, p)
    notes = []
    oracle = oracle_sigma(p, phi) if use_oracle else None
    if oracle is not None:
        plus.in_sigma = oracle.in_sigma_plus
        minus.in_sigma = oracle.in_sigma_minus
        for d in (plus, minus):
            if d.certified and not d.in_sigma:
                notes.append(f"oracle conflict: direction {'+' if d.sign > 0 else '-'} certified but oracle says outside")
    if plus.certified and minus.certified:
        kind = "FibredFPn"
    elif oracle is not None and n >= 1 and not oracle.kernel_finitely_generated:
        kind = "NotFibred"
        missing = [s for s, flag in (("+", oracle.in_sigma_plus), ("-", oracle.in_sigma_minus)) if not flag]
        notes.append("oracle: direction(s) " + ", ".join(missing) + " outside the BNS invariant")
    else:
        kind = "Inconclusive"
    for d in (plus, minus):
        if not d.certified:
            notes.append(f"direction {'+' if d.sign > 0 else '-'} not certified")
    return Verdict(kind, n, phi, str(coeffs), plus, minus, oracle, notes)


# ------------------------------------------------------------------- primes


@dataclass
class PrimeReport:
    primes: tuple
    localized_verified: bool
    reductions: list  # (p, verified)

    def to_json(self) -> dict:
        return {
            "primes": list(self.primes),
            "localized_ring": "Zloc:" + ",".join(map(str, self.primes)),
            "localized_verified": self.localized_verified,
            "reductions": [{"p": p, "verified": ok} for p, ok in self.reductions],
        }


def _transport(cert: Certificate, c: ChainComplex, coeffs: CoefficientRing):
    c2 = c.with_coefficients(coeffs)
    ring = c2.ring
    s2 = [[[ring.from_terms(x.terms) for x in row] for row in m] for m in cert.s]
    cert2 = Certificate(cert.presentation, cert.phi, coeffs, cert.degree, s2, [], False, cert.budget_used, cert.resolution_text)
    return cert2, c2


def extract_primes(cert: Certificate, c: ChainComplex, samples: int = 3) -> PrimeReport:
    """Primes of the certificate denominators, with re-verification over Z_P and F_p.

    The boundary denominators are included too, so that the complex itself
    is defined over the localisation.
    """
    if cert.coeffs.kind != "Q":
        raise UnverifiedInput(f"prime extraction needs a rational certificate, got {cert.coeffs}")
    if not verify_certificate(c, cert):
        raise UnverifiedInput("certificate does not verify")
    coeffs = [x for m in cert.s for row in m for el in row for x in el.terms.values()]
    coeffs += [x for i, d in c.boundaries.items() for row in d for el in row for x in el.terms.values()]
    primes = tuple(sorted(primes_of_denominators(coeffs)))
    cloc, cl = _transport(cert, c, CoefficientRing.localization(primes))
    loc_ok = verify_certificate(cl, cloc)
    reductions = []
    q = 1
    while len(reductions) < samples:
        q = nextprime(q)
        if q in primes:
            continue
        try:
            cq, cc = _transport(cert, c, CoefficientRing.prime_field(q))
            reductions.append((q, verify_certificate(cc, cq)))
        except DenominatorDivisible:
            reductions.append((q, False))
    return PrimeReport(primes, loc_ok, reductions)


# ----------------------------------------------------------- sphere sampling


def primitive_characters(p: Presentation, grid: int) -> list:
    """Primitive integral characters in ``[-grid, grid]^n``, one per antipodal pair."""
    rows = p.exponent_matrix()
    out = []
    for v in itertools.product(range(-grid, grid + 1), repeat=p.rank):
        if not any(v):
            continue
        first = next(x for x in v if x)
        if first < 0:
            continue
        g = 0
        for x in v:
            g = gcd(g, x)
        if g != 1:
            continue
        if all(sum(a * b for a, b in zip(row, v)) == 0 for row in rows):
            out.append(Character(tuple(v)))
    return sorted(out, key=lambda ch: (sum(abs(x) for x in ch.values), tuple(-x for x in ch.values)))


def sphere_sample(
    p: Presentation,
    grid: int = 1,
    coeffs: CoefficientRing | None = None,
    n: int = 1,
    budget: Budget | None = None,
    complex_: ChainComplex | None = None,
) -> list:
    """Verdicts on a grid of characters; verdicts are antipodally symmetric so one of each pair is kept."""
    if grid < 1:
        raise ValueError("grid must be at least 1")
    chars = primitive_characters(p, grid)
    if not chars:
        raise NoCharacters("no nonzero integral character vanishes on every relator")
    coeffs = coeffs or CoefficientRing.rationals()
    c = complex_ or presentation_complex(p, coeffs=coeffs)
    return [(phi, sikorav_verdict(p, phi, coeffs, n, budget, c)) for phi in chars]
