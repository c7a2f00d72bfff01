"""Numerical Riemann theta machinery for genus 3.

Evaluates the lattice series

    theta_m(tau, z) = sum_{n in Z^3} e[ (n+m'/2).tau.(n+m'/2) + 2(n+m'/2).(z+m''/2) ]

with the half-integral phase convention e(x) := exp(pi*i*x).  That
convention is the single most bug-prone piece of the whole pipeline, so
it lives in exactly one helper (:func:`ephase`) and every phase in the
package goes through it or through ``numpy.exp(1j*pi*...)`` on a value
assembled right next to a comment saying so.

Non-reduced integer characteristics are reduced first and the series is
evaluated at the reduced representative, multiplied by the tracked
reduction sign.  Truncation follows a Gaussian tail bound: terms decay
like exp(-pi * lam_min * ||n||^2), with lam_min the smallest eigenvalue
of Im(tau), so the box radius

    N = ceil( ||m'/2||_inf + ||Im(tau)^-1 Im(z)||_inf + sqrt(-ln(tail) / (pi*lam_min)) )

keeps the neglected relative mass below ``target_tail``.  The middle
term recenters the box when Im(z) shifts the Gaussian peak (it vanishes
for theta constants and gradients at z = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .charalgebra import (
    Characteristic,
    char_sum,
    even_forms,
    odd_forms,
    reduce_characteristic,
)
from .errors import InvalidTauError, TruncationError

#: Relative tolerance below which an even theta constant counts as vanishing.
#: Shared by the special-locus scan and the pipeline admission gate.
VANISHING_REL_TOL = 1e-8

DEFAULT_TAIL = 1e-15
HARD_RADIUS_CAP = 64

ASYMMETRY_TOL = 1e-9


def ephase(x) -> complex:
    """e(x) = exp(pi*i*x), the half-integral phase unit."""
    return np.exp(1j * np.pi * np.asarray(x))


@dataclass(frozen=True)
class TruncationPolicy:
    """Controls the lattice truncation of the theta series."""

    radius: int = 1
    target_tail: float = DEFAULT_TAIL
    max_radius: int = HARD_RADIUS_CAP

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("radius must be >= 1")
        if not 0 < self.target_tail <= 1e-6:
            raise ValueError("target_tail must lie in (0, 1e-6]")


DEFAULT_POLICY = TruncationPolicy()


class PeriodMatrix:
    """A genus-3 period matrix: complex symmetric with Im(tau) > 0.

    The input is symmetrized on construction; asymmetry beyond
    ``ASYMMETRY_TOL`` or a non-positive-definite imaginary part raises
    :class:`InvalidTauError` naming the violated invariant.
    """

    def __init__(self, tau):
        tau = np.asarray(tau, dtype=complex)
        if tau.shape != (3, 3):
            raise InvalidTauError(f"expected a 3x3 matrix, got shape {tau.shape}")
        if not np.all(np.isfinite(tau)):
            raise InvalidTauError("matrix contains non-finite entries")
        asym = np.abs(tau - tau.T).max()
        if asym > ASYMMETRY_TOL:
            raise InvalidTauError(f"matrix is asymmetric: max |tau - tau^T| = {asym:.3e}")
        tau = (tau + tau.T) / 2
        imag = tau.imag
        eigs = np.linalg.eigvalsh(imag)
        if eigs.min() <= 0:
            raise InvalidTauError(
                f"imaginary part is not positive definite: min eigenvalue = {eigs.min():.3e}"
            )
        tau.setflags(write=False)
        self.tau = tau
        self.lam_min = float(eigs.min())

    def __repr__(self):
        return f"PeriodMatrix(lam_min={self.lam_min:.4g})"


@lru_cache(maxsize=None)
def _box(radius: int) -> np.ndarray:
    r = np.arange(-radius, radius + 1)
    pts = np.stack(np.meshgrid(r, r, r, indexing="ij"), axis=-1).reshape(-1, 3)
    pts = pts.astype(float)
    pts.setflags(write=False)
    return pts


def _radius(tau: PeriodMatrix, mp, z, pol: TruncationPolicy) -> int:
    base = math.sqrt(-math.log(pol.target_tail) / (math.pi * tau.lam_min))
    shift = max(abs(x) for x in mp) / 2
    if z is not None:
        imz = np.asarray(z, dtype=complex).imag
        if np.any(imz):
            center = np.linalg.solve(tau.tau.imag, imz)
            shift += float(np.abs(center).max())
    n = max(pol.radius, math.ceil(shift + base))
    if n > pol.max_radius:
        raise TruncationError(
            f"needed radius {n} exceeds the cap {pol.max_radius}; "
            "Im(tau) is too close to degenerate for the requested tail"
        )
    return n


def _series(r: Characteristic, tau: PeriodMatrix, z, pol: TruncationPolicy, gradient: bool):
    n = _radius(tau, r.mp, z, pol)
    p = _box(n) + np.array(r.mp, dtype=float) / 2
    zz = np.zeros(3, dtype=complex) if z is None else np.asarray(z, dtype=complex)
    quad = np.einsum("ni,ij,nj->n", p, tau.tau, p)
    lin = 2 * p @ (zz + np.array(r.mpp, dtype=float) / 2)
    terms = np.exp(1j * np.pi * (quad + lin))  # e(x) convention
    if gradient:
        return 2j * np.pi * (p * terms[:, None]).sum(axis=0)
    return terms.sum()


def theta(m: Characteristic, tau: PeriodMatrix, z=None, pol: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """theta_m(tau, z) for an arbitrary integer characteristic m.

    Reduces m first and premultiplies by the reduction sign, so callers
    may pass non-reduced sums of characteristics directly.
    """
    r, sign = reduce_characteristic(m)
    return sign * _series(r, tau, z, pol, gradient=False)


def theta_const(m: Characteristic, tau: PeriodMatrix, pol: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """The theta constant theta_m(tau) := theta_m(tau, 0)."""
    return theta(m, tau, None, pol)


def grad_theta0(m: Characteristic, tau: PeriodMatrix, pol: TruncationPolicy = DEFAULT_POLICY) -> np.ndarray:
    """The z-gradient of theta_m at z = 0, by the termwise differentiated series."""
    r, sign = reduce_characteristic(m)
    return sign * _series(r, tau, None, pol, gradient=True)


def jacobian_det(
    q1: Characteristic,
    q2: Characteristic,
    q3: Characteristic,
    tau: PeriodMatrix,
    pol: TruncationPolicy = DEFAULT_POLICY,
) -> complex:
    """D[q1,q2,q3]: determinant of the three stacked theta gradients at 0."""
    for q in (q1, q2, q3):
        if q.parity() != 1:
            raise ValueError(f"jacobian_det needs odd characteristics, got {q.bracket()}")
    rows = np.array([grad_theta0(q, tau, pol) for q in (q1, q2, q3)])
    return complex(np.linalg.det(rows))


_ADDITION_SIGNS = ((1, 1, 1, 1), (1, 1, -1, -1), (1, -1, 1, -1), (1, -1, -1, 1))


def _half_combination(ms, signs) -> Characteristic:
    mp = tuple(sum(s * m.mp[i] for s, m in zip(signs, ms)) for i in range(3))
    mpp = tuple(sum(s * m.mpp[i] for s, m in zip(signs, ms)) for i in range(3))
    if any(x % 2 for x in mp + mpp):
        raise ValueError("half-sum characteristics are not integral for this quadruple")
    return Characteristic(tuple(x // 2 for x in mp), tuple(x // 2 for x in mpp))


def addition_formula_residual(
    m1: Characteristic,
    m2: Characteristic,
    m3: Characteristic,
    m4: Characteristic,
    u,
    v,
    tau: PeriodMatrix,
    pol: TruncationPolicy = DEFAULT_POLICY,
) -> float:
    """Normalized residual of the classical four-term addition formula.

    The left side is theta_{m1}(u+v) theta_{m2}(u-v) theta_{m3} theta_{m4};
    the right side averages, over the 64 representatives a of Z^6/2Z^6,
    the products theta_{n_i+a} with (n_i) the half-sum transform of
    (m_i), weighted by e(m1'.a'').  Raises if the (n_i) are not
    integral.
    """
    ms = (m1, m2, m3, m4)
    ns = [_half_combination(ms, s) for s in _ADDITION_SIGNS]
    u = np.zeros(3, dtype=complex) if u is None else np.asarray(u, dtype=complex)
    v = np.zeros(3, dtype=complex) if v is None else np.asarray(v, dtype=complex)

    lhs = (
        theta(m1, tau, u + v, pol)
        * theta(m2, tau, u - v, pol)
        * theta_const(m3, tau, pol)
        * theta_const(m4, tau, pol)
    )
    total = 0.0 + 0.0j
    peak = 0.0
    factor_peak = 0.0
    for a_form in even_forms() + odd_forms():
        a = a_form.characteristic
        sign = -1 if sum(m1.mp[i] * a.mpp[i] for i in range(3)) % 2 else 1
        factors = (
            theta(char_sum(ns[0], a), tau, u, pol),
            theta(char_sum(ns[1], a), tau, u, pol),
            theta(char_sum(ns[2], a), tau, v, pol),
            theta(char_sum(ns[3], a), tau, v, pol),
        )
        factor_peak = max(factor_peak, *(abs(f) for f in factors))
        term = sign * factors[0] * factors[1] * factors[2] * factors[3]
        peak = max(peak, abs(term))
        total += term
    rhs = total / 8  # 2^{-g}, g = 3
    scale = max(abs(lhs), peak / 8)
    # when parity kills every product, both sides vanish structurally;
    # measure against the factor scale instead of 0/0 noise
    if scale < 1e-8 * factor_peak**4:
        scale = factor_peak**4
    if scale == 0:
        return 0.0
    return abs(lhs - rhs) / scale


def quasi_periodicity_residual(
    q: Characteristic,
    k,
    h,
    tau: PeriodMatrix,
    z,
    pol: TruncationPolicy = DEFAULT_POLICY,
) -> float:
    """Residual of the half-period transformation law.

    Shifting z by h/2 + tau.k/2 multiplies theta[q] by
    e(-k.(m''+h)/2 - k.z - k.tau.k/4) and replaces the characteristic
    by the integer sum (m'+k, m''+h); the reduction sign of that sum is
    part of the law, which is why the right side goes through
    :func:`theta` rather than a plain reduced constant.
    """
    k = np.array([int(x) for x in k])
    h = np.array([int(x) for x in h])
    z = np.zeros(3, dtype=complex) if z is None else np.asarray(z, dtype=complex)
    lhs = theta(q, tau, z + h / 2 + tau.tau @ k / 2, pol)
    mpp = np.array(q.mpp)
    exponent = -0.5 * k @ (mpp + h) - k @ z - 0.25 * k @ tau.tau @ k
    rhs = ephase(exponent) * theta(char_sum(q, Characteristic(tuple(k), tuple(h))), tau, z, pol)
    scale = max(abs(lhs), abs(rhs))
    if scale == 0:
        return 0.0
    return float(abs(lhs - rhs) / scale)


def even_constant_table(tau: PeriodMatrix, pol: TruncationPolicy = DEFAULT_POLICY) -> dict:
    """All 36 even theta constants, keyed by reduced Characteristic."""
    return {q.characteristic: theta_const(q.characteristic, tau, pol) for q in even_forms()}


def odd_gradient_table(tau: PeriodMatrix, pol: TruncationPolicy = DEFAULT_POLICY) -> dict:
    """All 28 odd theta gradients at z = 0, keyed by reduced Characteristic."""
    return {q.characteristic: grad_theta0(q.characteristic, tau, pol) for q in odd_forms()}


def vanishing_even_characteristics(
    tau: PeriodMatrix,
    pol: TruncationPolicy = DEFAULT_POLICY,
    table: dict | None = None,
) -> list[Characteristic]:
    """Reduced even characteristics whose constant is numerically zero.

    "Zero" is scale-free: |theta| < VANISHING_REL_TOL * max over the
    even constants.  A non-empty answer means tau sits on (or hugs) the
    hyperelliptic/decomposable locus where the reconstruction formulas
    divide by zero.
    """
    if table is None:
        table = even_constant_table(tau, pol)
    scale = max(abs(v) for v in table.values())
    return sorted(
        (m for m, v in table.items() if abs(v) < VANISHING_REL_TOL * scale),
        key=lambda m: m.mp + m.mpp,
    )


def random_tau(rng: np.random.Generator) -> np.ndarray:
    """One draw of the random period matrix recipe A + i(MM^T + I/2).

    A is symmetric with entries uniform in [-1/2, 1/2] (upper triangle
    drawn, then mirrored); M is 3x3 standard normal.  Draw order is
    fixed so a seeded generator reproduces the matrix bit for bit.
    """
    u = rng.uniform(-0.5, 0.5, (3, 3))
    a = np.triu(u) + np.triu(u, 1).T
    m = rng.standard_normal((3, 3))
    return a + 1j * (m @ m.T + np.eye(3) / 2)


def tau_to_json(tau) -> dict:
    """Serialize a period matrix as {"tau": [[{"re","im"}, ...], ...]}."""
    arr = tau.tau if isinstance(tau, PeriodMatrix) else np.asarray(tau, dtype=complex)
    return {"tau": [[{"re": float(x.real), "im": float(x.imag)} for x in row] for row in arr]}


def tau_from_json(obj) -> np.ndarray:
    """Parse the {"tau": ...} wire format into a raw complex matrix."""
    try:
        rows = obj["tau"]
        arr = np.array([[complex(c["re"], c["im"]) for c in row] for row in rows], dtype=complex)
    except (KeyError, TypeError, IndexError) as exc:
        raise InvalidTauError(f"malformed tau JSON: {exc}") from exc
    if arr.shape != (3, 3):
        raise InvalidTauError(f"expected a 3x3 matrix, got shape {arr.shape}")
    return arr
