"""Rational transfer functions, state-space realization, frequency response.

``RationalTF`` is a thin pair of :class:`~seakit.polynomials.Polynomial`
objects normalized to a monic denominator.  Composition operators
(series, parallel, feedback, +, *, /) never cancel common factors:
uncontrollable or unobservable modes stay visible until an explicit
``minimal_form`` call, so internal-stability checks cannot be fooled by
silent cancellation of an unstable factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericsError
from .polynomials import Polynomial, _match_pairs, is_hurwitz, roots

__all__ = [
    "RationalTF",
    "StateSpace",
    "FrequencyResponse",
    "constant_tf",
    "series",
    "parallel",
    "feedback",
    "evaluate",
    "minimal_form",
    "to_state_space",
    "is_stable",
    "frequency_response",
    "poles",
    "zeros",
]


class RationalTF:
    """Real rational function num(s)/den(s) with a monic denominator.

    Parameters
    ----------
    num, den : Polynomial or coefficient sequence
        Highest degree first.  ``den`` must be nonzero; both are divided
        by the leading denominator coefficient on construction.
    units : str
        Descriptive metadata only (e.g. ``"Nm per rad"``); never touched
        by arithmetic, which returns results with empty units.
    """

    __slots__ = ("num", "den", "units")

    def __init__(self, num, den, units: str = "") -> None:
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = den if isinstance(den, Polynomial) else Polynomial(den)
        if den.is_zero:
            raise ValueError("denominator must be nonzero")
        if num.is_zero:
            # canonical zero: 0/1, so zero branches drop out of compositions
            den = Polynomial([1.0])
        lead = float(den.coeffs[0])
        self.num = num * (1.0 / lead)
        self.den = den * (1.0 / lead)
        self.units = units

    # -- queries --------------------------------------------------------

    def is_proper(self) -> bool:
        return self.num.degree <= self.den.degree

    def is_strictly_proper(self) -> bool:
        return self.num.degree < self.den.degree

    def __call__(self, s: complex) -> complex:
        """Evaluate at a complex point; raises on (near-)pole hits."""
        dv = complex(self.den(s))
        scale = float(
            np.sum(
                np.abs(self.den.coeffs)
                * (max(1.0, abs(s)) ** np.arange(self.den.degree, -1, -1))
            )
        )
        if abs(dv) < 1e-12 * scale:
            raise NumericsError(f"evaluation at a pole: |den({s:.6g})| ~ 0")
        return complex(self.num(s)) / dv

    def __repr__(self) -> str:
        u = f", units={self.units!r}" if self.units else ""
        return f"RationalTF(({self.num}) / ({self.den}){u})"

    # -- algebra ----------------------------------------------------------
    # Results carry no units; combining heterogenous unit strings silently
    # would be worse than dropping them.

    def _coerce(self, other) -> "RationalTF | None":
        if isinstance(other, RationalTF):
            return other
        if isinstance(other, (int, float)):
            return constant_tf(float(other))
        return None

    def __mul__(self, other):
        g = self._coerce(other)
        if g is None:
            return NotImplemented
        return RationalTF(self.num * g.num, self.den * g.den)

    __rmul__ = __mul__

    def __add__(self, other):
        g = self._coerce(other)
        if g is None:
            return NotImplemented
        return RationalTF(self.num * g.den + g.num * self.den, self.den * g.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalTF(-self.num, self.den, self.units)

    def __sub__(self, other):
        g = self._coerce(other)
        if g is None:
            return NotImplemented
        return self + (-g)

    def __rsub__(self, other):
        g = self._coerce(other)
        if g is None:
            return NotImplemented
        return g + (-self)

    def __truediv__(self, other):
        g = self._coerce(other)
        if g is None:
            return NotImplemented
        if g.num.is_zero:
            raise ZeroDivisionError("division by the zero transfer function")
        return RationalTF(self.num * g.den, self.den * g.num)

    def __rtruediv__(self, other):
        g = self._coerce(other)
        if g is None:
            return NotImplemented
        return g.__truediv__(self)


def constant_tf(value: float, units: str = "") -> RationalTF:
    return RationalTF([float(value)], [1.0], units)


def series(g: RationalTF, h: RationalTF) -> RationalTF:
    """Cascade g*h; no cancellation."""
    return g * h


def parallel(g: RationalTF, h: RationalTF) -> RationalTF:
    """Sum g + h on the common (product) denominator; no cancellation."""
    return g + h


def feedback(g: RationalTF, h: RationalTF) -> RationalTF:
    """Negative feedback g / (1 + g h) as one rational function.

    Formed directly as num = g_num * h_den, den = g_den * h_den +
    g_num * h_num; nothing is cancelled beyond that structural form.
    """
    num = g.num * h.den
    den = g.den * h.den + g.num * h.num
    if den.is_zero:
        raise ValueError("algebraic loop: 1 + g h is identically zero")
    return RationalTF(num, den)


def evaluate(tf: RationalTF, omega: float) -> complex:
    """Frequency response value H(j omega) at a single frequency [rad/s]."""
    return tf(1j * omega)


def poles(tf: RationalTF) -> np.ndarray:
    """Denominator roots (of the stored, possibly non-minimal form)."""
    if tf.den.degree < 1:
        return np.zeros(0, dtype=complex)
    return roots(tf.den).as_array


def zeros(tf: RationalTF) -> np.ndarray:
    if tf.num.degree < 1:
        return np.zeros(0, dtype=complex)
    return roots(tf.num).as_array


def minimal_form(tf: RationalTF, tol: float = 1e-7) -> RationalTF:
    """Cancel pole/zero pairs closer than ``tol`` (relative to root scale).

    Matching is greedy closest-first; surviving roots are re-expanded to
    real coefficients.  The zero transfer function minimizes to 0/1.
    """
    if tf.num.is_zero:
        return RationalTF([0.0], [1.0], tf.units)
    gain = float(tf.num.coeffs[0])  # den is monic, so this is the HF gain ratio
    zs = roots(tf.num).as_array if tf.num.degree >= 1 else np.zeros(0, complex)
    ps = roots(tf.den).as_array if tf.den.degree >= 1 else np.zeros(0, complex)
    matches = _match_pairs(zs, ps, tol)
    if not matches:
        return tf  # nothing cancels; keep exact coefficients, skip re-expansion
    drop_z = {i for i, _ in matches}
    drop_p = {j for _, j in matches}
    keep_z = np.array([z for i, z in enumerate(zs) if i not in drop_z], complex)
    keep_p = np.array([p for j, p in enumerate(ps) if j not in drop_p], complex)
    num = Polynomial.from_roots(keep_z, leading=gain)
    den = Polynomial.from_roots(keep_p)
    return RationalTF(num, den, tf.units)


def is_stable(tf: RationalTF, cancel_tol: float = 1e-7) -> bool:
    """Hurwitz test on the denominator of the minimal form.

    Cancellation first is essential: composed closed-loop maps carry
    duplicated stable factors, and conversely a hidden unstable
    cancellation must not count as stable, so the test runs on whatever
    survives ``minimal_form`` at ``cancel_tol``.
    """
    m = minimal_form(tf, cancel_tol)
    if m.den.degree == 0:
        return True
    return is_hurwitz(m.den)


@dataclass(frozen=True)
class StateSpace:
    """Single-input single-output realization dx = Ax + Bu, y = Cx + Du."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: float

    @property
    def order(self) -> int:
        return self.A.shape[0]

    def transfer_at(self, s: complex) -> complex:
        """C (sI - A)^-1 B + D, for verification against the source TF."""
        n = self.order
        if n == 0:
            return complex(self.D)
        x = np.linalg.solve(s * np.eye(n) - self.A, self.B)
        return complex(self.C @ x + self.D)


def to_state_space(tf: RationalTF) -> StateSpace:
    """Controllable canonical realization of a proper transfer function.

    With monic denominator s^n + a1 s^(n-1) + ... + an and numerator
    residue c1 s^(n-1) + ... + cn after removing the direct term D:

        A = [[-a1 ... -an], [1 0 ...], ..., [0 ... 1 0]],  B = e1,
        C = [c1 ... cn].

    Improper inputs raise ValueError.
    """
    if not tf.is_proper():
        raise ValueError("state-space realization requires a proper transfer function")
    n = tf.den.degree
    num_p = np.zeros(n + 1)
    num_p[n + 1 - len(tf.num.coeffs):] = tf.num.coeffs
    if tf.num.is_zero:
        num_p[:] = 0.0
    d = float(num_p[0])
    if n == 0:
        return StateSpace(
            np.zeros((0, 0)), np.zeros(0), np.zeros(0), d
        )
    resid = num_p[1:] - d * tf.den.coeffs[1:]
    A = np.zeros((n, n))
    A[0, :] = -tf.den.coeffs[1:]
    if n > 1:
        A[1:, :-1] += np.eye(n - 1)
    B = np.zeros(n)
    B[0] = 1.0
    return StateSpace(A, B, resid.copy(), d)


@dataclass(frozen=True)
class FrequencyResponse:
    """Gain/phase samples over an ascending frequency grid.

    Attributes
    ----------
    freqs_hz : ndarray
    magnitude_db : ndarray
    phase_deg : ndarray
        Unwrapped; continuous along the grid.
    """

    freqs_hz: np.ndarray
    magnitude_db: np.ndarray
    phase_deg: np.ndarray

    def __post_init__(self):
        if not (
            len(self.freqs_hz) == len(self.magnitude_db) == len(self.phase_deg)
        ):
            raise ValueError("channel lengths differ")
        if len(self.freqs_hz) and np.any(np.diff(self.freqs_hz) <= 0):
            raise ValueError("frequencies must be strictly ascending")


def _phase_increment(
    tf: RationalTF, w1: float, w2: float, h1: complex, h2: complex, depth: int = 0
) -> float:
    """Continuous phase change of tf along [w1, w2], by adaptive bisection.

    The principal angle of h2/h1 is exact while the true change stays
    within (-pi, pi); intervals are split (geometrically when possible)
    until each sub-change is below pi/2, which makes fast phase
    transitions through lightly damped resonances unambiguous.
    """
    d = float(np.angle(h2 / h1))
    if abs(d) <= np.pi / 2 or depth >= 48:
        return d
    wm = np.sqrt(w1 * w2) if w1 > 0 else 0.5 * (w1 + w2)
    hm = tf(1j * wm)
    return _phase_increment(tf, w1, wm, h1, hm, depth + 1) + _phase_increment(
        tf, wm, w2, hm, h2, depth + 1
    )


def frequency_response(tf: RationalTF, freqs_hz) -> FrequencyResponse:
    """Sample magnitude [dB] and unwrapped phase [deg] at given frequencies.

    Phase starts from the principal angle at the first grid point and
    accumulates adaptive-bisection increments, so it never jumps by 360
    between neighboring grid points regardless of grid density.

    Raises
    ------
    NumericsError
        If the grid hits a pole of ``tf``.
    """
    freqs = np.asarray(freqs_hz, dtype=float)
    if freqs.ndim != 1 or freqs.size == 0:
        raise ValueError("frequency grid must be a non-empty 1-D array")
    if np.any(freqs < 0) or np.any(np.diff(freqs) <= 0):
        raise ValueError("frequencies must be nonnegative and strictly ascending")
    w = 2.0 * np.pi * freqs
    # Vectorized evaluation with the same near-pole guard as __call__;
    # per-point calls dominate the cost of dense metric sweeps otherwise.
    s = 1j * w
    dv = tf.den(s)
    smax = np.maximum(1.0, np.abs(s))
    scale = np.zeros(len(s))
    for c, k in zip(tf.den.coeffs, range(tf.den.degree, -1, -1)):
        scale += abs(c) * smax**k
    hit = np.abs(dv) < 1e-12 * scale
    if np.any(hit):
        w_bad = w[np.argmax(hit)]
        raise NumericsError(f"evaluation at a pole: |den({1j * w_bad:.6g})| ~ 0")
    h = tf.num(s) / dv
    mags = np.abs(h)
    with np.errstate(divide="ignore"):
        mag_db = 20.0 * np.log10(mags)
    # Principal increments are exact wherever |step| <= pi/2; only the
    # rest need bisection.  Accumulate sequentially so grid refinement
    # never flips a 360-degree branch.
    d = np.angle(h[1:] / h[:-1]) if len(h) > 1 else np.zeros(0)
    for i in np.nonzero(np.abs(d) > np.pi / 2)[0]:
        d[i] = _phase_increment(tf, w[i], w[i + 1], h[i], h[i + 1])
    phase = np.empty(len(w))
    phase[0] = np.angle(h[0])
    for i in range(1, len(w)):
        phase[i] = phase[i - 1] + d[i - 1]
    return FrequencyResponse(freqs, mag_db, np.degrees(phase))
