"""Type classification and canonical coordinates for linear second-order equations.

Two variables: ``A u_xx + 2B u_xy + C u_yy + D u_x + E u_y + F u = G``.
n variables: ``a_ij u_{x_i x_j} + b_i u_{x_i} + c u + d = 0``.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

Coeff = Union[float, Callable[[float, float], float]]

HYPERBOLIC = "hyperbolic"
PARABOLIC = "parabolic"
ELLIPTIC = "elliptic"


class ClassificationError(ValueError):
    pass


class MixedTypeError(ClassificationError):
    def __init__(self, kinds: Dict[str, List[Tuple[float, float]]]):
        parts = ", ".join(f"{k} at {v}" for k, v in sorted(kinds.items()))
        super().__init__(f"mixed type: {parts}")
        self.kinds = kinds


class DegenerateMapError(ClassificationError):
    def __init__(self, jacobian: float):
        super().__init__(f"coordinate map is degenerate (jacobian {jacobian:.3g})")
        self.jacobian = jacobian


@dataclass(frozen=True)
class SecondOrderPDE2:
    A: Coeff = 0.0
    B: Coeff = 0.0
    C: Coeff = 0.0
    D: Coeff = 0.0
    E: Coeff = 0.0
    F: Coeff = 0.0
    G: Coeff = 0.0

    def at(self, x: float, y: float) -> Tuple[float, float, float]:
        vals = []
        for c in (self.A, self.B, self.C):
            vals.append(float(c(x, y)) if callable(c) else float(c))
        return tuple(vals)

    @property
    def constant(self) -> bool:
        return not any(callable(c) for c in (self.A, self.B, self.C, self.D, self.E, self.F, self.G))

    def principal(self) -> np.ndarray:
        if not self.constant:
            raise ClassificationError("canonical coordinates need constant coefficients")
        return np.array([[self.A, self.B], [self.B, self.C]], dtype=float)


def _kind(A: float, B: float, C: float) -> Tuple[str, float]:
    disc = B * B - A * C
    if abs(disc) <= 1e-12 * max(1.0, B * B, abs(A * C)):
        return PARABOLIC, 0.0
    return (HYPERBOLIC if disc > 0 else ELLIPTIC), disc


def _roots(A: float, B: float, C: float) -> Optional[Tuple[complex, complex]]:
    if A == 0:
        return None
    root = cmath.sqrt(B * B - A * C)
    return (-B + root) / A, (-B - root) / A


@dataclass(frozen=True)
class ClassificationResult:
    kind: str
    discriminants: List[float]
    roots: List[Optional[Tuple[complex, complex]]] = field(default_factory=list)
    uniform: bool = True

    @property
    def omega_plus(self) -> Optional[complex]:
        return self.roots[0][0] if self.roots and self.roots[0] else None

    @property
    def omega_minus(self) -> Optional[complex]:
        return self.roots[0][1] if self.roots and self.roots[0] else None

    def as_dict(self) -> dict:
        def enc(z):
            if z is None:
                return None
            return [z.real, z.imag] if z.imag else z.real

        return {
            "kind": self.kind,
            "discriminant": self.discriminants[0] if len(self.discriminants) == 1 else self.discriminants,
            "omega_plus": enc(self.omega_plus),
            "omega_minus": enc(self.omega_minus),
            "uniform": self.uniform,
        }


def classify2(pde: SecondOrderPDE2, points: Sequence[Tuple[float, float]] = ((0.0, 0.0),)) -> ClassificationResult:
    """Sign of ``B² − AC`` at every sample point."""
    points = list(points)
    if not points:
        raise ClassificationError("at least one sample point is required")
    by_kind: Dict[str, List[Tuple[float, float]]] = {}
    discs, roots = [], []
    for x, y in points:
        A, B, C = pde.at(x, y)
        kind, disc = _kind(A, B, C)
        by_kind.setdefault(kind, []).append((x, y))
        discs.append(disc)
        roots.append(_roots(A, B, C))
    if len(by_kind) > 1:
        raise MixedTypeError(by_kind)
    return ClassificationResult(next(iter(by_kind)), discs, roots, uniform=pde.constant or len(points) > 1)


@dataclass(frozen=True)
class LinearFamily:
    """Level sets of ``alpha x + beta y``."""

    alpha: float
    beta: float

    def __call__(self, x, y):
        return self.alpha * x + self.beta * y

    def describe(self, names: Tuple[str, str] = ("x", "y")) -> str:
        return f"{self.alpha:g}*{names[0]} + {self.beta:g}*{names[1]} = const"


def _coordinate_rows(A: float, B: float, C: float, kind: str) -> Tuple[LinearFamily, LinearFamily]:
    if kind == HYPERBOLIC:
        if A == 0:
            return LinearFamily(1.0, 0.0), LinearFamily(C, -2.0 * B)
        wp, wm = _roots(A, B, C)
        return LinearFamily(wp.real, 1.0), LinearFamily(wm.real, 1.0)
    if kind == PARABOLIC:
        if A == 0:
            return LinearFamily(1.0, 0.0), LinearFamily(0.0, 1.0)
        w = -B / A
        return LinearFamily(w, 1.0), LinearFamily(w * w + 1.0, w)
    return LinearFamily(-B / A, 1.0), LinearFamily(1.0, 0.0)


def characteristic_families_constant(pde: SecondOrderPDE2) -> List[LinearFamily]:
    """Real characteristic families: two (hyperbolic), one (parabolic) or none."""
    A, B, C = pde.principal().ravel()[[0, 1, 3]]
    kind, _ = _kind(A, B, C)
    if kind == ELLIPTIC:
        logger.info("no real characteristics")
        return []
    xi, eta = _coordinate_rows(A, B, C, kind)
    return [xi, eta] if kind == HYPERBOLIC else [xi]


def _transformed_principal(H: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Coefficients of w_ξξ, w_ξη, w_ηη for ``u(x, y) = w(M (x, y))``.

    Evaluated by applying the original principal part to the quadratic test
    functions ``w = ξ²/2``, ``w = ξη`` and ``w = η²/2``.
    """
    out = np.zeros((2, 2))
    for a, b in ((0, 0), (0, 1), (1, 1)):
        P = np.zeros((2, 2))
        P[a, b] = P[b, a] = 1.0
        hess = M.T @ P @ M
        value = H[0, 0] * hess[0, 0] + 2.0 * H[0, 1] * hess[0, 1] + H[1, 1] * hess[1, 1]
        if a == b:
            out[a, a] = value
        else:
            out[0, 1] = out[1, 0] = 0.5 * value
    return out


@dataclass(frozen=True)
class CanonicalTransform:
    kind: str
    matrix: np.ndarray = field(repr=False)
    principal: Dict[str, float]
    form: str
    jacobian: float
    h0: Optional[float] = None

    def __call__(self, x: float, y: float) -> Tuple[float, float]:
        xi, eta = self.matrix @ np.array([x, y], dtype=float)
        return float(xi), float(eta)

    def as_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "form": self.form,
            "map": self.matrix.tolist(),
            "principal": self.principal,
            "jacobian": self.jacobian,
        }
        if self.h0 is not None:
            out["h0"] = self.h0
        return out


_PATTERNS = {
    "u_xi_eta": (0.0, 1.0, 0.0),
    "u_alpha_alpha-u_beta_beta": (1.0, 0.0, -1.0),
    "u_eta_eta": (0.0, 0.0, 1.0),
    "u_alpha_alpha+u_beta_beta": (1.0, 0.0, 1.0),
}


def canonical_transform_constant(pde: SecondOrderPDE2, hyperbolic_form: str = "xi-eta") -> CanonicalTransform:
    """Affine change of variables bringing the principal part to canonical form."""
    H = pde.principal()
    A, B, C = H[0, 0], H[0, 1], H[1, 1]
    kind, disc = _kind(A, B, C)
    xi, eta = _coordinate_rows(A, B, C, kind)
    M = np.array([[xi.alpha, xi.beta], [eta.alpha, eta.beta]], dtype=float)
    h0 = None
    if kind == HYPERBOLIC:
        form = "u_xi_eta"
        if hyperbolic_form == "alpha-beta":
            M = np.array([[1.0, 1.0], [1.0, -1.0]]) @ M
            form = "u_alpha_alpha-u_beta_beta"
    elif kind == PARABOLIC:
        form = "u_eta_eta"
    else:
        h0 = A * A / (A * C - B * B)
        M = np.diag([1.0, 1.0 / math.sqrt(h0)]) @ M
        form = "u_alpha_alpha+u_beta_beta"

    jac = float(np.linalg.det(M))
    if abs(jac) < 1e-14 * max(1.0, float(np.sum(M * M))):
        raise DegenerateMapError(jac)

    Hp = _transformed_principal(H, M)
    coeffs = np.array([Hp[0, 0], 2.0 * Hp[0, 1], Hp[1, 1]])
    pattern = np.array(_PATTERNS[form])
    lead = int(np.argmax(np.abs(pattern)))
    scale = coeffs[lead] / pattern[lead]
    normalized = coeffs / scale
    if np.max(np.abs(normalized - pattern)) > 1e-10:
        raise ClassificationError(f"transformed principal part {normalized.tolist()} does not match {form}")
    names = ("u_xixi", "u_xieta", "u_etaeta")
    return CanonicalTransform(
        kind,
        M,
        {n: float(v) for n, v in zip(names, normalized)},
        form,
        jac,
        h0,
    )


# ----------------------------------------------------------------------------
# n variables
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class NDimClassification:
    kind: str
    eigenvalues: np.ndarray
    rotation: np.ndarray = field(repr=False)
    ultrahyperbolic: bool = False

    @property
    def scales(self) -> np.ndarray:
        """``1/√|λ_i|`` for nonzero eigenvalues, 0 for the degenerate directions."""
        lam = np.abs(self.eigenvalues)
        with np.errstate(divide="ignore"):
            return np.where(lam > 0, 1.0 / np.sqrt(np.where(lam > 0, lam, 1.0)), 0.0)

    def scaled_coordinates(self, x: Sequence[float]) -> np.ndarray:
        """``α_i = ξ_i / √|λ_i|`` with ``ξ = Qᵀ x``."""
        return self.scales * (self.rotation.T @ np.asarray(x, dtype=float))

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "eigenvalues": self.eigenvalues.tolist(),
            "ultrahyperbolic": self.ultrahyperbolic,
        }


def symmetrize(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return 0.5 * (a + a.T)


def classify_ndim(form, b: Optional[Sequence[float]] = None, c: Optional[float] = None) -> NDimClassification:
    """Eigenvalue signs of the symmetrised principal matrix.

    Lower-order coefficients do not affect the type.
    """
    raw = np.asarray(form, dtype=float)
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1] or raw.shape[0] < 2:
        raise ClassificationError(f"need a square matrix of size >= 2, got shape {raw.shape}")
    a = symmetrize(raw)
    lam, Q = np.linalg.eigh(a)
    thresh = 1e-10 * np.linalg.norm(a)
    lam = np.where(np.abs(lam) <= thresh, 0.0, lam)
    pos, neg = int(np.sum(lam > 0)), int(np.sum(lam < 0))
    if pos + neg < lam.size:
        kind = PARABOLIC
    elif pos == 0 or neg == 0:
        kind = ELLIPTIC
    else:
        kind = HYPERBOLIC
    ultra = kind == HYPERBOLIC and pos >= 2 and neg >= 2
    return NDimClassification(kind, lam, Q, ultra)


@dataclass(frozen=True)
class SurfaceCheck:
    value: float
    characteristic: bool
    degenerate: bool = False


def characteristic_surface_check(form, gradient: Sequence[float]) -> SurfaceCheck:
    """Evaluate ``a_ij φ_i φ_j`` on a candidate normal."""
    a = symmetrize(form)
    g = np.asarray(gradient, dtype=float)
    value = float(g @ a @ g)
    degenerate = not np.any(g)
    if degenerate:
        logger.warning("zero gradient: surface normal undefined")
    return SurfaceCheck(value, abs(value) <= 1e-12 * max(1.0, float(g @ g)), degenerate)


__all__ = [
    "HYPERBOLIC",
    "PARABOLIC",
    "ELLIPTIC",
    "ClassificationError",
    "MixedTypeError",
    "DegenerateMapError",
    "SecondOrderPDE2",
    "ClassificationResult",
    "classify2",
    "LinearFamily",
    "characteristic_families_constant",
    "CanonicalTransform",
    "canonical_transform_constant",
    "NDimClassification",
    "symmetrize",
    "classify_ndim",
    "SurfaceCheck",
    "characteristic_surface_check",
]
