"""Validation and eigenstructure of hyperbolic integer torus matrices.

Everything that decides acceptance or rejection of a base matrix runs in exact
arithmetic: the characteristic polynomial is computed over Python integers
(Faddeev-LeVerrier), real roots are counted and isolated with Sturm chains over
`fractions.Fraction`, and eigenvalues are refined by rational bisection plus
rational Newton steps before the final rounding to float.  This keeps the
accept/reject decisions (unimodularity, hyperbolicity, distinct real spectrum)
independent of floating-point eigensolver behavior.

Eigenvectors and the dual frame are computed in floating point (SVD null space
of A - mu*I, matrix inverse) and checked against tight residual tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    DetNotUnimodular,
    EigenvalueOnUnitCircle,
    InvalidParameter,
    RepeatedOrComplexEigenvalue,
    RootPolishDiverged,
    SkewFractalError,
)

# Tolerances fixed by the module contract.
HYPERBOLICITY_TOL = 1e-9      # forbidden band around |mu| = 1
MODULI_GAP_TOL = 1e-9         # minimal gap between eigenvalue moduli
EIGEN_RESIDUAL_TOL = 1e-10    # ||A v - mu v|| <= tol * ||v||
DUALITY_TOL = 1e-10           # ||W V - I||_max

_SUPPORTED_DIMS = range(2, 7)


# ---------------------------------------------------------------------------
# Exact polynomial helpers (ascending coefficient lists over Fraction)
# ---------------------------------------------------------------------------

def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_eval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_derivative(p: Sequence[Fraction]) -> list[Fraction]:
    return [c * i for i, c in enumerate(p)][1:]


def _poly_divmod(num: Sequence[Fraction], den: Sequence[Fraction]):
    num = list(num)
    q = [Fraction(0)] * max(0, len(num) - len(den) + 1)
    inv_lead = 1 / den[-1]
    for i in range(len(num) - len(den), -1, -1):
        coef = num[i + len(den) - 1] * inv_lead
        q[i] = coef
        if coef:
            for j, d in enumerate(den):
                num[i + j] -= coef * d
    return _trim(q), _trim(num)


def _poly_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    a, b = list(a), list(b)
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def _normalize_sign_scale(p: list[Fraction]) -> list[Fraction]:
    # Rescale by a positive constant; keeps Sturm sign sequences intact while
    # bounding coefficient growth.
    if not p:
        return p
    m = max(abs(c) for c in p)
    return [c / m for c in p] if m else p


def _sturm_chain(p: Sequence[Fraction]) -> list[list[Fraction]]:
    chain = [_normalize_sign_scale(_trim(list(p)))]
    d = _normalize_sign_scale(_poly_derivative(chain[0]))
    if d:
        chain.append(d)
    while len(chain[-1]) > 1:
        _, r = _poly_divmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append(_normalize_sign_scale([-c for c in r]))
    return chain


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _variations_at(chain: list[list[Fraction]], x: Fraction) -> int:
    signs = [s for s in (_sign(_poly_eval(p, x)) for p in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _variations_at_inf(chain: list[list[Fraction]], positive: bool) -> int:
    signs = []
    for p in chain:
        s = _sign(p[-1])
        if not positive and (len(p) - 1) % 2 == 1:
            s = -s
        if s != 0:
            signs.append(s)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _count_roots(chain, lo: Fraction, hi: Fraction) -> int:
    """Distinct real roots of the (square-free) chain head in (lo, hi]."""
    return _variations_at(chain, lo) - _variations_at(chain, hi)


def _count_roots_total(chain) -> int:
    return _variations_at_inf(chain, positive=False) - _variations_at_inf(chain, positive=True)


def _isolate_real_roots(p: Sequence[Fraction]) -> list[tuple[Fraction, Fraction]]:
    """Return disjoint rational intervals each holding exactly one real root."""
    chain = _sturm_chain(p)
    bound = Fraction(1) + max(abs(c) for c in p[:-1]) / abs(p[-1])
    stack = [(-bound, bound)]
    out: list[tuple[Fraction, Fraction]] = []
    while stack:
        lo, hi = stack.pop()
        # Endpoints are never roots here: rational roots of the validated
        # polynomials are +-1 and those were rejected earlier; the initial
        # bound exceeds every root.
        n = _count_roots(chain, lo, hi)
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        if _poly_eval(p, mid) == 0:
            raise SkewFractalError("rational eigenvalue encountered during isolation")
        stack.append((lo, mid))
        stack.append((mid, hi))
    return sorted(out)


def _refine_root(p: Sequence[Fraction], lo: Fraction, hi: Fraction) -> float:
    """Bisect to 1e-8, then rational Newton steps; round to float at the end."""
    flo = _poly_eval(p, lo)
    if flo == 0:
        return float(lo)
    width_goal = Fraction(1, 10**8)
    while hi - lo > width_goal:
        mid = (lo + hi) / 2
        fmid = _poly_eval(p, mid)
        if fmid == 0:
            return float(mid)
        if (_sign(fmid) == _sign(flo)):
            lo, flo = mid, fmid
        else:
            hi = mid
    dp = _poly_derivative(p)
    x = (lo + hi) / 2
    for _ in range(3):
        fx = _poly_eval(p, x)
        dfx = _poly_eval(dp, x)
        if dfx == 0:
            raise RootPolishDiverged("zero derivative during Newton polish")
        step = fx / dfx
        x = (x - step).limit_denominator(10**60)
        if not (lo - width_goal <= x <= hi + width_goal):
            raise RootPolishDiverged("Newton step left the isolation bracket")
    return float(x)


# ---------------------------------------------------------------------------
# Characteristic polynomial (exact integers)
# ---------------------------------------------------------------------------

def char_poly(entries: Sequence[Sequence[int]]) -> list[int]:
    """Exact coefficients of det(A - x I), ascending in x.

    The leading coefficient is (-1)^k.  Uses Faddeev-LeVerrier over Python
    integers; every interior division is exact (asserted).
    """
    k = len(entries)
    a = [[int(v) for v in row] for row in entries]
    if any(len(row) != k for row in a):
        raise InvalidParameter("matrix must be square")

    def mat_mul(x, y):
        return [[sum(x[i][m] * y[m][j] for m in range(k)) for j in range(k)] for i in range(k)]

    def mat_add_diag(x, c):
        return [[x[i][j] + (c if i == j else 0) for j in range(k)] for i in range(k)]

    ident = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
    # p(x) = det(xI - A) = x^k + c[k-1] x^{k-1} + ... + c[0]
    c = [0] * (k + 1)
    c[k] = 1
    m_prev = ident
    am = mat_mul(a, m_prev)
    c[k - 1] = -sum(am[i][i] for i in range(k))
    for m in range(2, k + 1):
        m_prev = mat_add_diag(am, c[k - m + 1])
        am = mat_mul(a, m_prev)
        tr = sum(am[i][i] for i in range(k))
        q, r = divmod(-tr, m)
        if r:
            raise SkewFractalError("Faddeev-LeVerrier division was not exact")
        c[k - m] = q
    sign = -1 if k % 2 else 1
    return [sign * c[i] for i in range(k + 1)]


# ---------------------------------------------------------------------------
# Validated matrix and spectrum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HyperbolicToralMatrix:
    """An integer k x k matrix with |det| = 1, real distinct hyperbolic spectrum."""

    entries: tuple[tuple[int, ...], ...]
    k: int
    char_coeffs: tuple[int, ...]          # det(A - xI), ascending
    eigenvalues: tuple[float, ...]        # sorted by |mu| ascending

    @property
    def determinant(self) -> int:
        return self.char_coeffs[0]

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)


def validate(entries: Sequence[Sequence[int]]) -> HyperbolicToralMatrix:
    """Check the standing hypotheses and return the validated wrapper.

    Raises:
        DetNotUnimodular: |det A| != 1.
        EigenvalueOnUnitCircle: some eigenvalue modulus within 1e-9 of 1.
        RepeatedOrComplexEigenvalue: spectrum not real with distinct moduli.
        InvalidParameter: not a square integer matrix with 2 <= k <= 6.
    """
    k = len(entries)
    if k not in _SUPPORTED_DIMS:
        raise InvalidParameter(f"supported dimensions are 2..6, got k={k}")
    for row in entries:
        if len(row) != k:
            raise InvalidParameter("matrix must be square")
        for v in row:
            if int(v) != v:
                raise InvalidParameter("matrix entries must be integers")

    coeffs = char_poly(entries)
    det = coeffs[0]  # det(A - 0*I)
    if abs(det) != 1:
        raise DetNotUnimodular(f"|det A| must be 1, got det = {det}")

    p = [Fraction(c) for c in coeffs]
    if _poly_eval(p, Fraction(1)) == 0 or _poly_eval(p, Fraction(-1)) == 0:
        raise EigenvalueOnUnitCircle("an eigenvalue equals +-1 exactly")

    dp = _poly_derivative(p)
    g = _poly_gcd(p, dp)
    p_sf = p if len(g) <= 1 else _poly_divmod(p, g)[0]

    chain = _sturm_chain(p_sf)
    eps = Fraction(1, 10**9)
    for center in (Fraction(1), Fraction(-1)):
        if _count_roots(chain, center - eps, center + eps) > 0:
            raise EigenvalueOnUnitCircle(
                "an eigenvalue modulus lies within 1e-9 of 1"
            )

    if len(g) > 1:
        raise RepeatedOrComplexEigenvalue("characteristic polynomial has a repeated root")
    if _count_roots_total(chain) != k:
        raise RepeatedOrComplexEigenvalue("characteristic polynomial has complex roots")

    roots = [_refine_root(p, lo, hi) for lo, hi in _isolate_real_roots(p)]
    roots.sort(key=abs)
    for r in roots:
        _check_residual(coeffs, r, k)
    for a, b in zip(roots, roots[1:]):
        if abs(abs(b) - abs(a)) <= MODULI_GAP_TOL:
            raise RepeatedOrComplexEigenvalue(
                f"eigenvalue moduli {abs(a):.12g} and {abs(b):.12g} are not separated"
            )
    if min(abs(abs(r) - 1.0) for r in roots) <= HYPERBOLICITY_TOL:
        raise EigenvalueOnUnitCircle("an eigenvalue modulus lies within 1e-9 of 1")

    return HyperbolicToralMatrix(
        entries=tuple(tuple(int(v) for v in row) for row in entries),
        k=k,
        char_coeffs=tuple(coeffs),
        eigenvalues=tuple(roots),
    )


def _check_residual(coeffs: Sequence[int], mu: float, k: int) -> None:
    # Compensated evaluation keeps the check itself out of the noise.
    terms = [c * mu**i for i, c in enumerate(coeffs)]
    residual = abs(math.fsum(terms))
    if residual > 1e-12 * (1.0 + abs(mu) ** k):
        raise RootPolishDiverged(
            f"polished root {mu!r} has residual {residual:.3e} above tolerance"
        )


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted by modulus, unit eigenvectors, dual frame, stable count."""

    eigenvalues: tuple[float, ...]
    eigenvectors: np.ndarray   # columns v_i, unit norm, first nonzero coord > 0
    dual_basis: np.ndarray     # rows w_i with w_i . v_m = delta_im
    stable_count: int

    @property
    def k(self) -> int:
        return len(self.eigenvalues)

    @property
    def moduli(self) -> tuple[float, ...]:
        return tuple(abs(b) for b in self.eigenvalues)

    def to_eigen_coords(self, x: np.ndarray) -> np.ndarray:
        """Coordinates t with x = sum_i t_i v_i (t_i = w_i . x)."""
        return np.asarray(x, dtype=float) @ self.dual_basis.T

    def from_eigen_coords(self, t: np.ndarray) -> np.ndarray:
        """Reconstruct the standard-coordinate point sum_i t_i v_i."""
        return np.asarray(t, dtype=float) @ self.eigenvectors.T


def _fix_sign(v: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(v))
    for comp in v:
        if abs(comp) > 1e-9 * scale:
            return v if comp > 0 else -v
    return v


def spectrum(matrix: HyperbolicToralMatrix) -> Spectrum:
    """Eigenvectors (SVD null space), dual frame and stable count for A.

    Raises:
        RootPolishDiverged: residual checks fail (unexpected for k <= 6).
    """
    k = matrix.k
    a = matrix.as_array()
    vectors = np.empty((k, k))
    for idx, mu in enumerate(matrix.eigenvalues):
        m = a - mu * np.eye(k)
        _, _, vt = np.linalg.svd(m)
        v = _fix_sign(vt[-1])
        v = v / np.linalg.norm(v)
        if np.linalg.norm(a @ v - mu * v) > EIGEN_RESIDUAL_TOL:
            raise RootPolishDiverged(
                f"eigenvector residual above {EIGEN_RESIDUAL_TOL} for eigenvalue {mu}"
            )
        vectors[:, idx] = v
    dual = np.linalg.inv(vectors)
    if np.max(np.abs(dual @ vectors - np.eye(k))) > DUALITY_TOL:
        raise RootPolishDiverged("dual basis residual above tolerance")
    j = sum(1 for mu in matrix.eigenvalues if abs(mu) < 1.0)
    if not 1 <= j <= k - 1:
        raise SkewFractalError("unimodular hyperbolic matrix must mix stable/unstable")
    vectors.setflags(write=False)
    dual.setflags(write=False)
    return Spectrum(
        eigenvalues=matrix.eigenvalues,
        eigenvectors=vectors,
        dual_basis=dual,
        stable_count=j,
    )
