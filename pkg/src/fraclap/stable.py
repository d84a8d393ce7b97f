"""Samplers for the stable laws behind the jump-process view.

All three laws are standard (unit scale): the symmetric alpha-stable has
characteristic function exp(-|xi|^alpha), the one-sided law has Laplace
transform exp(-lam^alpha), and the isotropic vector law has characteristic
function exp(-|xi|^{2s}).  Any operator normalization is applied by the
callers, never baked in here.
"""

import numpy as np

from .errors import DomainError


def sym_stable(alpha, size, rng):
    """Symmetric alpha-stable draws, char. function exp(-|xi|^alpha).

    Chambers-Mallows-Stuck: U uniform on (-pi/2, pi/2), W standard
    exponential; the formula degenerates gracefully to tan U at alpha = 1
    and to a variance-2 normal at alpha = 2.
    """
    alpha = float(alpha)
    if not (0.0 < alpha <= 2.0):
        raise DomainError(f"stable index must lie in (0, 2], got {alpha}")
    U = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, size)
    W = rng.standard_exponential(size)
    if alpha == 1.0:
        return np.tan(U)
    s1 = np.sin(alpha * U) / np.cos(U) ** (1.0 / alpha)
    s2 = (np.cos((1.0 - alpha) * U) / W) ** ((1.0 - alpha) / alpha)
    return s1 * s2


def one_sided_stable(alpha, size, rng):
    """Positive alpha-stable draws, Laplace transform exp(-lam^alpha).

    Kanter's representation, valid for 0 < alpha < 1.
    """
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"one-sided index must lie in (0, 1), got {alpha}")
    U = rng.uniform(0.0, np.pi, size)
    W = rng.standard_exponential(size)
    A = (np.sin(alpha * U) ** alpha
         * np.sin((1.0 - alpha) * U) ** (1.0 - alpha)
         / np.sin(U)) ** (1.0 / (1.0 - alpha))
    return (A / W) ** ((1.0 - alpha) / alpha)


def isotropic_stable(n, s, size, rng):
    """Isotropic 2s-stable vectors in R^n, char. function exp(-|xi|^{2s}).

    Subordinated gaussian: X = sqrt(2 S) G with S one-sided s-stable and G
    standard normal, so E exp(i<xi, X>) = E exp(-S |xi|^2) = exp(-|xi|^{2s}).
    s = 1/2 (the Cauchy case) works like every other s.
    """
    n = int(n)
    if n < 1:
        raise DomainError("dimension must be >= 1")
    if not (0.0 < s < 1.0):
        raise DomainError(f"order must lie in (0, 1), got {s}")
    S = one_sided_stable(s, size, rng)
    G = rng.standard_normal((size, n))
    return np.sqrt(2.0 * S)[:, None] * G
