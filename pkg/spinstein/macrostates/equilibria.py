"""
Equilibrium macrostates of the Curie-Weiss-Potts model and the contraction constants
derived from the Jacobian of the softmax update at each macrostate.
"""
import logging
from typing import Any, Dict, List, Optional

import numpy as np

from ..errors import UsageError
from ..spin_core import softmax_gbeta, uniform_vector
from .critical import beta_c, s_star, solve_s_largest

logger = logging.getLogger(__name__)

CRITICAL_TOL = 1e-9
MEMBERSHIP_TOL = 1e-8


def ordered_point(s_dominant: float, q: int, color: int) -> np.ndarray:
    """T^color applied to (s*, (1 - s*)/(q - 1), ..., (1 - s*)/(q - 1))."""
    x = np.full(q, (1.0 - s_dominant) / (q - 1))
    x[color] = s_dominant
    return x


def macrostate_set(beta: float, q: int) -> List[np.ndarray]:
    """
    The set of equilibrium macrostates.

    Returns [e-hat] below beta_c, the q ordered points above it, and all q + 1 points
    when |beta - beta_c| < 1e-9. Ordered points are listed by dominant color.
    """
    critical = beta_c(q)
    if beta < critical - CRITICAL_TOL:
        return [uniform_vector(q)]
    dominant = s_star(beta, q)
    ordered = [ordered_point(dominant, q, k) for k in range(q)]
    if abs(beta - critical) < CRITICAL_TOL:
        return [uniform_vector(q)] + ordered
    return ordered


def g_potential(s: np.ndarray, beta: float) -> float:
    """
    Free-energy function G_beta(s) = beta ||s||^2 - log(sum_i exp(2 beta s_i)).

    The sign inside the exponential is the one whose gradient is 2 beta (s - g_beta(s)),
    so the macrostates are its stationary points.
    """
    s = np.asarray(s, dtype=float)
    z = 2.0 * beta * s
    top = z.max()
    return float(beta * np.dot(s, s) - (top + np.log(np.exp(z - top).sum())))


def g_potential_grad(s: np.ndarray, beta: float) -> np.ndarray:
    """Gradient 2 beta (s - g_beta(s))."""
    s = np.asarray(s, dtype=float)
    return 2.0 * beta * (s - softmax_gbeta(s, beta))


def symmetric_fixed_points(beta: float, q: int) -> List[np.ndarray]:
    """
    e-hat and, whenever the order-parameter equation has a positive root, the q ordered points.

    A superset of macrostate_set: it also holds e-hat above beta_c and the metastable
    ordered points for beta_s <= beta < beta_c. Every entry satisfies g_beta(x) = x.
    """
    points = [uniform_vector(q)]
    if beta > 0 and solve_s_largest(beta, q) > 0.0:
        dominant = s_star(beta, q)
        points.extend(ordered_point(dominant, q, k) for k in range(q))
    return points


def classify_macrostate(x: np.ndarray, beta: float, q: int) -> Optional[int]:
    """
    Identify x among the symmetric fixed points of g_beta.

    Returns:
        None for e-hat, the dominant color for an ordered point

    Raises:
        UsageError if x is not such a point within 1e-8
    """
    x = np.asarray(x, dtype=float)
    if x.size != q:
        raise UsageError(f"macrostate must have {q} entries")
    for i, point in enumerate(symmetric_fixed_points(beta, q)):
        if np.max(np.abs(point - x)) < MEMBERSHIP_TOL:
            return None if i == 0 else i - 1
    raise UsageError(f"{x.tolist()} is not an equilibrium macrostate at beta={beta}, q={q}")


def jacobian_constants(beta: float, q: int) -> Dict[str, float]:
    """The constants a, a' and b of the ordered macrostates."""
    dominant = s_star(beta, q)
    minor = (1.0 - dominant) / (q - 1)
    a_prime = 2.0 * beta * minor
    return {
        "s_star": dominant,
        "a": 2.0 * beta * q * dominant * minor,
        "a_prime": a_prime,
        "b": a_prime * (dominant - minor),
    }


def jacobian_A(x: np.ndarray, beta: float, q: int) -> np.ndarray:
    """
    Matrix A(x) that agrees with the Jacobian of g_beta at x on simplex tangent vectors.

    A(e-hat) = (2 beta / q) I. For an ordered macrostate with dominant color j the
    diagonal is a at (j, j) and a' elsewhere, column j holds -b off the diagonal, and all
    other entries are zero.
    """
    color = classify_macrostate(x, beta, q)
    if color is None:
        return (2.0 * beta / q) * np.eye(q)
    constants = jacobian_constants(beta, q)
    A = np.diag(np.full(q, constants["a_prime"]))
    A[:, color] = -constants["b"]
    A[color, color] = constants["a"]
    return A


def theta(x: np.ndarray, beta: float, q: int) -> float:
    """Local l1 Lipschitz constant of g_beta at a macrostate."""
    if classify_macrostate(x, beta, q) is None:
        return 2.0 * beta / q
    return jacobian_constants(beta, q)["a"]


def lambda_(x: np.ndarray, beta: float, q: int) -> float:
    """Largest absolute eigenvalue of (A + A^T)/2, in closed form."""
    if classify_macrostate(x, beta, q) is None:
        return 2.0 * beta / q
    c = jacobian_constants(beta, q)
    a, a_prime, b = c["a"], c["a_prime"], c["b"]
    return float(0.5 * (a + a_prime + np.sqrt((a - a_prime) ** 2 + (q - 1) * b ** 2)))


def symmetric_part_eigenvalues(x: np.ndarray, beta: float, q: int) -> np.ndarray:
    """Eigenvalues of (A + A^T)/2 in ascending order."""
    A = jacobian_A(x, beta, q)
    return np.linalg.eigvalsh(0.5 * (A + A.T))


def condition_holds(x: np.ndarray, beta: float, q: int) -> bool:
    """Both contraction conditions theta < 1 and lambda < 1."""
    return bool(theta(x, beta, q) < 1.0 and lambda_(x, beta, q) < 1.0)


class MacrostateAnalysis:
    """A macrostate together with its Jacobian-derived contraction constants."""

    def __init__(self, x: np.ndarray, beta: float, q: int):
        self.x = np.asarray(x, dtype=float)
        self.beta = beta
        self.q = q
        self.dominant_color = classify_macrostate(self.x, beta, q)
        if self.dominant_color is None:
            rate = 2.0 * beta / q
            self.s_star = 1.0 / q
            self.a = self.a_prime = rate
            self.b = 0.0
        else:
            constants = jacobian_constants(beta, q)
            self.s_star = constants["s_star"]
            self.a = constants["a"]
            self.a_prime = constants["a_prime"]
            self.b = constants["b"]
        self.matrix_A = jacobian_A(self.x, beta, q)
        self.theta = theta(self.x, beta, q)
        self.lambda_ = lambda_(self.x, beta, q)
        self.numeric_lambda = float(np.max(np.abs(symmetric_part_eigenvalues(self.x, beta, q))))

    @property
    def condition_holds(self) -> bool:
        return bool(self.theta < 1.0 and self.lambda_ < 1.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "x": self.x.tolist(),
            "dominant_color": None if self.dominant_color is None else self.dominant_color + 1,
            "s_star": self.s_star,
            "a": self.a,
            "a_prime": self.a_prime,
            "b": self.b,
            "theta": self.theta,
            "lambda": self.lambda_,
            "numeric_lambda": self.numeric_lambda,
            "condition_holds": self.condition_holds,
            "matrix_A": self.matrix_A.tolist(),
        }


def analyze(beta: float, q: int) -> List[MacrostateAnalysis]:
    """Analysis of every macrostate at (beta, q)."""
    return [MacrostateAnalysis(x, beta, q) for x in macrostate_set(beta, q)]


def select_macrostate(selector: str, beta: float, q: int) -> np.ndarray:
    """
    Resolve a macrostate selector: "e" for e-hat or "ordered:K" for the ordered point with
    dominant color K (1-based).
    """
    selector = selector.strip().lower()
    if selector in ("e", "ehat", "uniform"):
        return uniform_vector(q)
    kind, _, color = selector.partition(":")
    if kind != "ordered" or not color.isdigit() or not 1 <= int(color) <= q:
        raise UsageError(f"macrostate selector must be 'e' or 'ordered:K' with 1 <= K <= {q}, got '{selector}'")
    if solve_s_largest(beta, q) <= 0.0:
        raise UsageError(f"no ordered fixed point exists at beta={beta}, q={q}")
    return ordered_point(s_star(beta, q), q, int(color) - 1)
