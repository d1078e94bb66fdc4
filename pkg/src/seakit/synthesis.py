"""Stabilizing 2-DOF controller synthesis for SISO rational plants.

Three layers, each usable on its own:

* ``coprime_factorize`` / ``youla_2dof``: the all-stabilizing-controllers
  parameterization.  Any stable pair (Q1, Q2) yields a controller pair
  (C1, C2) whose closed loop is internally stable.
* ``h2_synthesize``: the quadratic-optimal design.  Two spectral
  factorizations fix the closed-loop pole set, a Sylvester solve places
  the feedback controller C2 = q/p, and the feedforward C1 reuses the
  rejection factor over the same denominator.
* map builders: the full set of closed-loop transfer functions used by
  the simulator and the acceptance oracles.

Feedback is defined positive-plant/negative-feedback throughout:
u = C1 r - C2 y, y = P(u + d) + n.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericsError
from .plant import SeaModel
from .polynomials import Polynomial, gcd_degree, is_hurwitz, roots, spectral_factor
from .transfer import RationalTF, is_stable, minimal_form, parallel, series

__all__ = [
    "SynthesisWeights",
    "CoprimeFactorization",
    "TwoDofController",
    "SignalMaps",
    "ClosedLoopMaps",
    "coprime_factorize",
    "youla_2dof",
    "h2_synthesize",
    "solve_diophantine",
    "build_compensator",
    "torque_loop_maps",
    "closed_loop_maps",
]


@dataclass(frozen=True)
class SynthesisWeights:
    """Scalar design weights of the quadratic objective.

    rho trades control energy against tracking error (small rho buys
    tracking with more actuation); lam weights disturbance against
    reference response; k weights measurement noise.  All must be
    strictly positive.
    """

    rho: float
    lam: float
    k: float

    def __post_init__(self):
        for name in ("rho", "lam", "k"):
            v = getattr(self, name)
            if not (v > 0.0) or not np.isfinite(v):
                raise ValueError(f"weight {name} must be strictly positive")


@dataclass(frozen=True)
class CoprimeFactorization:
    """Stable factorization P = N/M with Bezout pair M X + N Y = 1.

    f and h are the two polynomial factors of the closed-loop
    characteristic c = a p + b q that generate the four fractions:
    M = a/f, N = b/f, X = p/h, Y = q/h.
    """

    M: RationalTF
    N: RationalTF
    X: RationalTF
    Y: RationalTF
    f: Polynomial
    h: Polynomial


@dataclass(frozen=True)
class TwoDofController:
    """Feedforward/feedback pair sharing the denominator p(s).

    c1 filters the reference; c2 closes the measurement loop.  d_rho and
    d_lambda_k are the two stable spectral factors whose product is the
    closed-loop characteristic polynomial a p + b q.
    """

    c1: RationalTF
    c2: RationalTF
    d_rho: Polynomial
    d_lambda_k: Polynomial
    p: Polynomial
    q: Polynomial
    weights: SynthesisWeights


@dataclass(frozen=True)
class SignalMaps:
    """Transfer functions from one injection point to u, v, y, z."""

    u: RationalTF
    v: RationalTF
    y: RationalTF
    z: RationalTF

    def all(self) -> tuple[RationalTF, ...]:
        return (self.u, self.v, self.y, self.z)


@dataclass(frozen=True)
class ClosedLoopMaps:
    """The twelve loop maps: from reference r, plant-input disturbance d,
    and measurement noise n to controller output u, plant input v,
    measurement y, and plant output z."""

    from_r: SignalMaps
    from_d: SignalMaps
    from_n: SignalMaps

    def all(self) -> tuple[RationalTF, ...]:
        return self.from_r.all() + self.from_d.all() + self.from_n.all()


def _controller_pair(ctrl) -> tuple[RationalTF, RationalTF]:
    """Accept a TwoDofController or a bare (C1, C2) pair."""
    if isinstance(ctrl, TwoDofController):
        return ctrl.c1, ctrl.c2
    c1, c2 = ctrl
    return c1, c2


def solve_diophantine(
    a: Polynomial, b: Polynomial, c_target: Polynomial
) -> tuple[Polynomial, Polynomial]:
    """Solve a p + b q = c_target for deg p = n, deg q <= n-1.

    The identity is a square linear system over the 2n+1 unknown
    coefficients (Sylvester structure); with a, b coprime it has exactly
    one solution.  Solved by QR after column equilibration — the
    physical plant's coefficient spread (1 vs 2e3) makes the raw matrix
    ill-scaled — with the condition number of the raw matrix reported
    via a warning above 1e12.

    Parameters
    ----------
    a, b : Polynomial
        Plant denominator (degree n >= 1) and numerator (degree <= n-1,
        nonzero).
    c_target : Polynomial
        Desired closed-loop characteristic polynomial, degree exactly 2n.

    Returns
    -------
    (p, q) : tuple of Polynomial
        deg p = n with p(0) != 0, deg q <= n-1.

    Raises
    ------
    NumericsError
        Singular system (a, b not coprime), residual above 1e-8 relative,
        or p(0) = 0 within tolerance (the type-0 requirement).
    """
    n = a.degree
    if n < 1:
        raise ValueError("a must have degree >= 1")
    if b.is_zero or b.degree > n - 1:
        raise ValueError("b must be nonzero with degree <= deg(a) - 1")
    if c_target.degree != 2 * n:
        raise ValueError("c_target must have degree exactly 2 deg(a)")

    ac = a.coeffs
    bp = np.zeros(n)
    bp[n - len(b.coeffs):] = b.coeffs
    m = 2 * n + 1
    S = np.zeros((m, m))
    for j in range(n + 1):  # columns for p_j (coefficient of s^(n-j))
        S[j: j + n + 1, j] = ac
    for j in range(n):  # columns for q_j (coefficient of s^(n-1-j))
        S[j + 2: j + 2 + n, n + 1 + j] = bp

    rhs = np.zeros(m)
    rhs[m - len(c_target.coeffs):] = c_target.coeffs

    cond = float(np.linalg.cond(S))
    if cond > 1e12:
        warnings.warn(
            f"Sylvester system condition number {cond:.3e}; "
            "solution accuracy may be degraded",
            RuntimeWarning,
            stacklevel=2,
        )

    col_scale = np.linalg.norm(S, axis=0)
    if np.any(col_scale == 0.0):
        raise NumericsError("singular Sylvester system: a and b are not coprime")
    Se = S / col_scale
    Q, R = np.linalg.qr(Se)
    diag = np.abs(np.diag(R))
    if np.min(diag) < 1e-13 * np.max(diag):
        raise NumericsError("singular Sylvester system: a and b are not coprime")
    try:
        xe = np.linalg.solve(R, Q.T @ rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericsError(f"Sylvester solve failed: {exc}") from exc
    x = xe / col_scale

    residual = float(np.max(np.abs(S @ x - rhs)))
    bound = 1e-8 * float(np.max(np.abs(rhs)))
    if residual > bound:
        raise NumericsError(
            f"pole-placement residual {residual:.3e} exceeds {bound:.3e}"
        )

    p = Polynomial(x[: n + 1])
    q_coeffs = x[n + 1:]
    q = Polynomial(q_coeffs if np.any(q_coeffs != 0.0) else [0.0])
    if p.degree != n:
        raise NumericsError("leading coefficient of p vanished; system degenerate")
    if abs(float(p(0.0))) < 1e-9 * float(np.max(np.abs(p.coeffs))):
        raise NumericsError(
            "p(0) = 0 within tolerance: the placed controller is not type 0"
        )
    return p, q


def h2_synthesize(P: RationalTF, w: SynthesisWeights) -> TwoDofController:
    """Quadratic-optimal 2-DOF design over the closed-loop pole set.

    Writing P = b/a (monic a, degree n), the design runs:

    1. tracking factor   d_rho:      rho^2 a(-s)a(s) + b(-s)b(s)
    2. rejection factor  d_lambda_k: k^2  a(-s)a(s) + lam^2 b(-s)b(s)
    3. place the closed-loop poles at the roots of d_rho d_lambda_k by
       solving a p + b q = d_rho d_lambda_k (deg p = n, deg q <= n-1)
    4. C2 = q/p (strictly proper, type 0); C1 = (d_rho(0)/b(0)) d_lambda_k / p

    The d_lambda_k numerator of C1 cancels against the closed-loop
    characteristic, which is what decouples reference tracking from the
    feedback design; the gain d_rho(0)/b(0) makes the reference map
    exactly unity at DC for integrating plants.

    Raises
    ------
    NumericsError
        On spectral-factorization failure, a non-coprime (a, b) pair,
        or b(0) = 0 (the DC normalization is undefined).
    """
    a, b = P.den, P.num
    if b.is_zero:
        raise ValueError("plant numerator must be nonzero")
    if not P.is_strictly_proper():
        raise ValueError("plant must be strictly proper")
    if a.degree >= 1 and b.degree >= 1 and gcd_degree(a, b) > 0:
        raise NumericsError("plant numerator and denominator share a root")
    b0 = float(b(0.0))
    if abs(b0) < 1e-12 * float(np.max(np.abs(b.coeffs))):
        raise NumericsError("b(0) = 0: reference DC normalization undefined")

    d_rho = spectral_factor(a, b, w.rho, 1.0)
    d_lk = spectral_factor(a, b, w.k, w.lam)
    p, q = solve_diophantine(a, b, d_rho * d_lk)

    c2 = RationalTF(q, p)
    c1 = RationalTF(d_lk * (float(d_rho(0.0)) / b0), p)
    return TwoDofController(
        c1=c1, c2=c2, d_rho=d_rho, d_lambda_k=d_lk, p=p, q=q, weights=w
    )


def _conjugate_units(rts: np.ndarray) -> list[list[complex]]:
    """Group a conjugate-symmetric root list into reals and exact pairs."""
    remaining = list(rts)
    units: list[list[complex]] = []
    while remaining:
        r = remaining.pop(0)
        if r.imag == 0.0:
            units.append([r])
            continue
        conj = r.conjugate()
        for i, s in enumerate(remaining):
            if s == conj:
                remaining.pop(i)
                break
        else:
            raise NumericsError("root set lost conjugate symmetry")
        units.append([r, conj])
    return units


def _fillable(cap: int, sizes: list[int]) -> bool:
    """True if some subset of units (sizes 1 or 2) sums to exactly cap."""
    ones = sizes.count(1)
    twos = sizes.count(2)
    for x in range(cap % 2, min(ones, cap) + 1, 2):
        if (cap - x) // 2 <= twos:
            return True
    return False


def coprime_factorize(P: RationalTF, C0: RationalTF) -> CoprimeFactorization:
    """Stable coprime fractions of P seeded by a stabilizing controller C0.

    With P = b/a and C0 = q0/p0, the closed-loop characteristic
    c = a p0 + b q0 must be Hurwitz.  c is split into c = f h with
    deg f = deg a; f takes the roots of c sorted by descending |Re|
    (ties by descending |Im|), keeping conjugate pairs together so both
    factors stay real, and carries lead(f) = lead(c) while h is monic.
    Then M = a/f, N = b/f, X = p0/h, Y = q0/h are all stable and satisfy
    M X + N Y = 1, verified on a 20-point log frequency grid.

    Raises
    ------
    NumericsError
        If c is not Hurwitz (C0 does not stabilize P), the degree split
        cannot keep real coefficients, or the Bezout residual exceeds
        1e-8 anywhere on the verification grid.
    """
    a, b = P.den, P.num
    p0, q0 = C0.den, C0.num
    n = a.degree
    if n < 1:
        raise ValueError("plant denominator must have degree >= 1")
    c = a * p0 + b * q0
    if c.is_zero:
        raise NumericsError("degenerate loop: a p0 + b q0 is identically zero")
    if not is_hurwitz(c):
        raise NumericsError("C0 does not stabilize P: a p0 + b q0 is not Hurwitz")

    if c.degree < n:
        raise NumericsError("characteristic degree collapsed below deg(a)")
    c_roots = roots(c).as_array if c.degree >= 1 else np.zeros(0, complex)
    units = _conjugate_units(c_roots)
    units.sort(
        key=lambda u: (-abs(u[0].real), -abs(u[0].imag), u[0].real, u[0].imag)
    )
    f_roots: list[complex] = []
    h_roots: list[complex] = []
    cap = n
    sizes = [len(u) for u in units]
    for i, unit in enumerate(units):
        rest = sizes[i + 1 :]
        # Greedy by descending |Re|, but only take a unit into f when the
        # remaining units can still top f up to degree n exactly; without
        # the lookahead two leading real roots can strand f at n - 1 when
        # only conjugate pairs are left.
        if len(unit) <= cap and _fillable(cap - len(unit), rest):
            f_roots.extend(unit)
            cap -= len(unit)
        elif _fillable(cap, rest):
            h_roots.extend(unit)
        else:
            raise NumericsError(
                "cannot split the characteristic polynomial into real factors "
                f"of degrees {n} and {c.degree - n}"
            )
    f = Polynomial.from_roots(f_roots, leading=float(c.coeffs[0]))
    h = Polynomial.from_roots(h_roots)

    fact = CoprimeFactorization(
        M=RationalTF(a, f),
        N=RationalTF(b, f),
        X=RationalTF(p0, h),
        Y=RationalTF(q0, h),
        f=f,
        h=h,
    )
    _check_bezout(fact)
    return fact


def _check_bezout(fact: CoprimeFactorization, tol: float = 1e-8) -> None:
    freqs = np.logspace(np.log10(0.01), np.log10(100.0), 20)
    for f_hz in freqs:
        s = 2j * np.pi * f_hz
        val = fact.M(s) * fact.X(s) + fact.N(s) * fact.Y(s)
        if abs(val - 1.0) > tol:
            raise NumericsError(
                f"Bezout identity residual {abs(val - 1.0):.3e} at {f_hz:.4g} Hz"
            )


def youla_2dof(
    fact: CoprimeFactorization, Q1: RationalTF, Q2: RationalTF
) -> tuple[RationalTF, RationalTF]:
    """One member of the all-stabilizing-controllers family.

    C1 = Q1 / (X - N Q2), C2 = (Y + M Q2) / (X - N Q2) for any stable
    Q1, Q2.  Internal stability of the resulting loop is re-verified
    rather than trusted: every closed-loop map reduces to one of six
    products of the parameters and factors (Q1 M, Q1 N, M D, N D,
    M (Y + M Q2), N (Y + M Q2) with D = X - N Q2), and each product is
    checked stable in that factored form.  Checking the products instead
    of the raw interconnection keeps the test meaningful for this plant
    family, where the uncancelled loop maps carry root clusters too
    tight for reliable pole/zero matching.

    Returns the (C1, C2) pair in minimal form.

    Raises
    ------
    ValueError
        Q1 or Q2 unstable, or X - N Q2 identically zero.
    NumericsError
        If the stability re-verification fails (numerical degeneracy).
    """
    if not is_stable(Q1) or not is_stable(Q2):
        raise ValueError("Q1 and Q2 must be stable")
    dpar = fact.X - fact.N * Q2
    if dpar.num.is_zero:
        raise ValueError("degenerate parameter: X - N Q2 is identically zero")
    # Build the controllers at polynomial level.  Every term of
    # C2 = (Y + M Q2)/(X - N Q2) shares the factor h f den(Q2); dividing
    # it out symbolically beats forming the quotient and hoping the
    # root-matching cancellation finds eight coincident pairs.
    a, b = fact.M.num, fact.N.num
    p0, q0 = fact.X.num, fact.Y.num
    fq2d = fact.f * Q2.den
    dpoly = p0 * fq2d - b * Q2.num * fact.h
    c2 = minimal_form(RationalTF(q0 * fq2d + a * Q2.num * fact.h, dpoly))
    c1 = minimal_form(RationalTF(Q1.num * fact.h * fq2d, Q1.den * dpoly))
    comp = fact.Y + fact.M * Q2
    for tf in (
        Q1 * fact.M,
        Q1 * fact.N,
        fact.M * dpar,
        fact.N * dpar,
        fact.M * comp,
        fact.N * comp,
    ):
        if not is_stable(tf):
            raise NumericsError("closed loop failed internal-stability verification")
    return c1, c2


def closed_loop_maps(P: RationalTF, ctrl) -> ClosedLoopMaps:
    """All twelve loop maps of the 2-DOF interconnection, uncancelled.

    ``ctrl`` is a TwoDofController or a (C1, C2) pair.  The maps are
    composed exactly as written (products over the common return
    difference 1 + P C2); shared factors are left in place so hidden
    unstable cancellations stay detectable by ``is_stable``.

    The disturbance and noise maps depend only on P and C2 — swapping C1
    changes nothing in from_d / from_n, coefficient for coefficient.
    """
    c1, c2 = _controller_pair(ctrl)
    ret_diff = parallel(RationalTF([1.0], [1.0]), series(P, c2))  # 1 + P C2
    r_u = c1 / ret_diff
    r_y = series(P, c1) / ret_diff
    from_r = SignalMaps(u=r_u, v=r_u, y=r_y, z=r_y)

    d_u = -(series(P, c2) / ret_diff)
    d_v = 1.0 / ret_diff
    d_y = P / ret_diff
    from_d = SignalMaps(u=d_u, v=d_v, y=d_y, z=d_y)

    n_u = -(c2 / ret_diff)
    n_y = 1.0 / ret_diff
    n_z = -(series(P, c2) / ret_diff)
    from_n = SignalMaps(u=n_u, v=n_u, y=n_y, z=n_z)
    return ClosedLoopMaps(from_r=from_r, from_d=from_d, from_n=from_n)


def _torque_char(P: RationalTF, c2: RationalTF) -> Polynomial:
    """Characteristic polynomial of the torque loop, a p2 + b n2."""
    return P.den * c2.den + P.num * c2.num


def _motion_map(model: SeaModel, c2: RationalTF) -> RationalTF:
    """G / (1 + P C2) built at polynomial level.

    The plant pair shares the actuator dynamics: den(P) = s * den(G), so
    the quotient collapses exactly to num(G) s den(C2) / (a p2 + b n2)
    with no pole/zero matching involved.  Composing the quotient
    operator-style instead would duplicate the actuator factor and leave
    root clusters that defeat numerical cancellation.  Falls back to
    operator composition if a model ever lacks the shared structure.
    """
    char = _torque_char(model.P, c2)
    a, gd = model.P.den, model.G.den
    shares_actuator = (
        a.degree == gd.degree + 1
        and a.coeffs[-1] == 0.0
        and np.array_equal(a.coeffs[:-1], gd.coeffs)
    )
    if shares_actuator:
        num = model.G.num * Polynomial([1.0, 0.0]) * c2.den
        return minimal_form(RationalTF(num, char))
    return minimal_form(model.G * RationalTF(a * c2.den, char))


def build_compensator(model: SeaModel, ctrl) -> RationalTF:
    """Load-motion feedforward compensator C_L = G / (1 + P C2).

    Subtracting C_L phi_L from the torque reference cancels the coupling
    of load motion into the closed torque loop to the extent the
    reference map is unity.  Returned in minimal form; biproper with
    high-frequency gain equal to G's (P C2 rolls off).

    Raises
    ------
    NumericsError
        If the closed torque loop is unstable.
    """
    _, c2 = _controller_pair(ctrl)
    cl = _motion_map(model, c2)
    if not is_stable(cl):
        raise NumericsError("closed torque loop is unstable; no compensator")
    return RationalTF(cl.num, cl.den, units="Nm per rad")


def torque_loop_maps(
    model: SeaModel, ctrl, with_compensator: bool
) -> tuple[RationalTF, RationalTF]:
    """Closed torque-loop responses (reference map, load-motion map).

    Returns (G1, H_phi) with G1 = P C1 / (1 + P C2) and H_phi the
    transfer from load motion phi_L to delivered torque: G2 = G/(1+P C2)
    uncompensated, or (1 - G1) G2 with the feedforward compensator
    active.  G1 and G2 are in minimal form; the compensated H_phi is the
    product of the two minimal factors, which shares no roots between
    numerator and denominator and is therefore already minimal.

    Both quotients are reduced at polynomial level before any root
    matching: G1 = b n1 p2 / (p1 (a p2 + b n2)) cancels the actuator
    factor a exactly, which matters here because the optimal observer
    polynomial places poles within about 1e-6 of a's stable pair and a
    root-matching cancellation at that spacing picks wrong partners.

    Raises
    ------
    NumericsError
        If either map is unstable.
    """
    c1, c2 = _controller_pair(ctrl)
    char = _torque_char(model.P, c2)
    g1 = minimal_form(
        RationalTF(model.P.num * c1.num * c2.den, c1.den * char)
    )
    g2 = _motion_map(model, c2)
    if not is_stable(g1) or not is_stable(g2):
        raise NumericsError("closed torque loop is unstable")
    h_phi = (1.0 - g1) * g2 if with_compensator else g2
    return g1, h_phi
