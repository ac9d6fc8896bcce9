"""Scalar and vector potential functions underlying the formation controller.

All inter-agent forces act in sigma-distance space: distances are mapped
through the smoothed norm ``(sqrt(1 + eps*|z|^2) - 1) / eps``, which is
differentiable everywhere (including z = 0) and therefore yields smooth
potential gradients. The pairwise action potential combines a finite-range
smooth cutoff (``bump``) with an uneven sigmoid (``phi_uneven``) whose root
sits at the desired agent spacing.

Every function here is pure and accepts scalars or numpy arrays.
"""

from dataclasses import dataclass

import numpy as np


def bump(z, lower, upper):
    """Smooth finite-range cutoff in [0, 1].

    Equals 1 on [0, lower), decays as a half cosine on [lower, upper),
    and is 0 on [upper, inf). Continuous and monotone non-increasing.

    Parameters
    ----------
    z : float or array, >= 0
    lower, upper : cutoffs with 0 <= lower < upper

    Raises
    ------
    ValueError
        If the cutoffs are out of order or any input is negative.
    """
    if not (0.0 <= lower < upper):
        raise ValueError(f"bump cutoffs must satisfy 0 <= lower < upper, got {lower}, {upper}")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or not np.all(np.isfinite(z)):
        raise ValueError("bump input must be finite and non-negative")
    ramp = 0.5 * (1.0 + np.cos(np.pi * (z - lower) / (upper - lower)))
    out = np.where(z < lower, 1.0, np.where(z < upper, ramp, 0.0))
    return float(out) if out.ndim == 0 else out


def sigma_scalar(z, epsilon):
    """Sigma-norm of a scalar (or elementwise of an array of scalars).

    ``(sqrt(1 + eps*z^2) - 1) / eps``; used both for scalar distances and
    for dimensionless load ratios. Scalars are treated as 1-D vectors.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    z = np.asarray(z, dtype=float)
    out = (np.sqrt(1.0 + epsilon * z * z) - 1.0) / epsilon
    return float(out) if out.ndim == 0 else out


def sigma_norm(v, epsilon):
    """Sigma-norm of a vector and its gradient.

    Returns ``(value, gradient)`` where ``value = (sqrt(1+eps*|v|^2)-1)/eps``
    and ``gradient = v / sqrt(1 + eps*|v|^2) = v / (1 + eps*value)``.
    The gradient is finite at v = 0, unlike the plain Euclidean norm.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    v = np.asarray(v, dtype=float)
    nsq = float(np.sum(v * v))
    root = np.sqrt(1.0 + epsilon * nsq)
    value = (root - 1.0) / epsilon
    return value, v / root


def sigma_grad_scale(norm_sq, epsilon):
    """Elementwise scale 1/sqrt(1 + eps*|z|^2) so that grad = z * scale.

    Vectorized helper for pairwise force computation; `norm_sq` is the
    squared Euclidean norm of the displacement(s).
    """
    return 1.0 / np.sqrt(1.0 + epsilon * np.asarray(norm_sq, dtype=float))


def phi_uneven(z, a, b, c):
    """Uneven sigmoid: 0.5*[(a+b)*(z+c)/sqrt(1+(z+c)^2) + (a-b)].

    Strictly increasing with limits -b (z -> -inf) and a (z -> +inf).
    With c = (b-a)/sqrt(4ab) the root sits exactly at z = 0.
    """
    if a <= 0 or b <= 0:
        raise ValueError("sigmoid scales a, b must be positive")
    s = np.asarray(z, dtype=float) + c
    out = 0.5 * ((a + b) * s / np.sqrt(1.0 + s * s) + (a - b))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PotentialParams:
    """Constants of the pairwise action potential.

    `c` is always derived from `a` and `b` (never stored independently) so
    that the sigmoid root is at 0, i.e. the potential vanishes exactly at
    the desired spacing `d`.
    """

    epsilon: float = 0.1
    a: float = 5.0
    b: float = 5.0
    gamma: float = 0.2   # lower cutoff of the range gate inside the potential
    d: float = 20.0      # desired inter-agent spacing [m]
    r: float = 24.0      # communication range [m]

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.a <= 0 or self.b <= 0:
            raise ValueError("a and b must be positive")
        if not (0.0 < self.gamma < 1.0):
            raise ValueError("gamma must lie in (0, 1)")
        if not (0.0 < self.d < self.r):
            raise ValueError("need 0 < d < r")

    @property
    def c(self):
        return (self.b - self.a) / np.sqrt(4.0 * self.a * self.b)

    @property
    def d_sigma(self):
        return sigma_scalar(self.d, self.epsilon)

    @property
    def r_sigma(self):
        return sigma_scalar(self.r, self.epsilon)


def phi_action(z_sigma, params: PotentialParams):
    """Finite-range pairwise action potential over sigma-distance.

    Zero at the sigma-image of the desired spacing (equilibrium), negative
    (repulsive) below it, non-negative above, and identically zero at or
    beyond the sigma-image of the communication range.
    """
    z = np.asarray(z_sigma, dtype=float)
    if np.any(z < 0):
        raise ValueError("sigma-distance must be non-negative")
    gate = bump(z / params.r_sigma, params.gamma, 1.0)
    out = gate * phi_uneven(z - params.d_sigma, params.a, params.b, params.c)
    return float(out) if np.ndim(out) == 0 else out
