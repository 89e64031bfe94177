"""Dense complex matrix kernel.

Every routine accepts a single matrix or a stack of matrices (leading batch
axes), which is how sampled functions are pushed through the same formulas.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotHermitian, NotIdempotent, SingularOnSupport

MAX_SWEEPS = 60
# eigenvectors of near-zero eigenvalues must stay this far outside the support
SUPPORT_LEAK = 1e-6


@dataclass(frozen=True)
class Tolerance:
    eps: float = 1e-9
    composite: float = 1e-7

    def __post_init__(self):
        if not (self.eps > 0 and self.composite > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_TOL = Tolerance()


def as_cmatrix(m):
    a = np.asarray(m, dtype=complex)
    if a.ndim < 2:
        raise ValueError("expected a matrix, got shape %s" % (a.shape,))
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def defect(m):
    """Largest absolute entry; 0 for empty arrays."""
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def eye_like(m):
    n = m.shape[-1]
    return np.broadcast_to(np.eye(n, dtype=complex), m.shape).copy()


def kron_eye(s, k):
    """s (x) 1_k for a stack of square matrices s."""
    s = np.asarray(s, dtype=complex)
    n = s.shape[-1]
    out = s[..., :, None, :, None] * np.eye(k)[:, None, :]
    return out.reshape(s.shape[:-2] + (n * k, n * k))


def _check_hermitian(m, tol):
    d = defect(m - dagger(m))
    if d > tol.eps * max(1.0, defect(m)):
        raise NotHermitian("hermitian defect %.3g" % d)


def herm_eig(m, tol=DEFAULT_TOL):
    """Cyclic Jacobi eigendecomposition, eigenvalues in descending order.

    Returns (w, V) with m = V diag(w) V*.
    """
    a = as_cmatrix(m)
    _check_hermitian(a, tol)
    shape = a.shape
    n = shape[-1]
    a = (a + dagger(a)) / 2
    a = a.reshape((-1, n, n)).copy()
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    scale = max(1.0, defect(a))
    offmask = 1 - np.eye(n)
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    for _ in range(MAX_SWEEPS):
        off = np.sum(np.abs(a * offmask) ** 2, axis=(1, 2))
        if n < 2 or np.max(off) <= (1e-14 * scale) ** 2 * n * n:
            break
        for p, q in pairs:
            apq = a[:, p, q]
            mag = np.abs(apq)
            live = mag > 1e-300
            if not np.any(live):
                continue
            safe = np.where(live, mag, 1.0)
            phase = np.where(live, apq / safe, 1.0)
            tau = np.clip((a[:, q, q].real - a[:, p, p].real) / (2 * safe), -1e150, 1e150)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1 + tau * tau))
            c = 1 / np.sqrt(1 + t * t)
            s = t * c
            c = np.where(live, c, 1.0)
            s = np.where(live, s, 0.0)
            g = np.empty((a.shape[0], 2, 2), dtype=complex)
            g[:, 0, 0] = c
            g[:, 0, 1] = s
            g[:, 1, 0] = -s * np.conj(phase)
            g[:, 1, 1] = c * np.conj(phase)
            idx = [p, q]
            a[:, :, idx] = a[:, :, idx] @ g
            a[:, idx, :] = dagger(g) @ a[:, idx, :]
            v[:, :, idx] = v[:, :, idx] @ g
            a[:, p, q] = 0
            a[:, q, p] = 0
    else:
        raise NoConvergence("Jacobi sweeps exhausted")
    w = np.diagonal(a, axis1=1, axis2=2).real
    order = np.argsort(-w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w.reshape(shape[:-1]), v.reshape(shape)


def herm_func(m, fn, tol=DEFAULT_TOL):
    """Apply a scalar function to a hermitian matrix through its eigenbasis."""
    w, v = herm_eig(m, tol)
    return (v * fn(w)[..., None, :]) @ dagger(v)


def is_projection(m, eps):
    return defect(m @ m - m) <= eps and defect(m - dagger(m)) <= eps


def herm_exp_2pi(m, t, tol=DEFAULT_TOL):
    """exp(2 pi i t m). Projections use 1 + (e^{2 pi i t} - 1) m exactly."""
    a = as_cmatrix(m)
    _check_hermitian(a, tol)
    if is_projection(a, tol.eps):
        return eye_like(a) + (np.exp(2j * np.pi * t) - 1) * a
    return herm_func(a, lambda w: np.exp(2j * np.pi * t * w), tol)


def inv_sqrt_psd(m, support, tol=DEFAULT_TOL):
    """s with s m s = support, computed inside the corner support*M*support."""
    a = as_cmatrix(m)
    sup = as_cmatrix(support)
    w, v = herm_eig(a, tol)
    big = w > tol.eps
    leak = np.linalg.norm(sup @ (v * (~big)[..., None, :]), axis=-2)
    if leak.size and np.max(leak) > SUPPORT_LEAK:
        raise SingularOnSupport("corner spectrum reaches below %.3g" % tol.eps)
    inv = np.where(big, 1 / np.sqrt(np.where(big, w, 1.0)), 0.0)
    s = (v * inv[..., None, :]) @ dagger(v)
    return sup @ s @ sup


def corner_inverse(b, src, dst, tol=DEFAULT_TOL):
    """Inverse of b viewed as an invertible morphism src -> dst."""
    s = inv_sqrt_psd(b @ dagger(b), dst, tol)
    inv_sqrt_psd(dagger(b) @ b, src, tol)
    return src @ dagger(b) @ s @ s


def polar_partial_isometry(b, src, dst, tol=DEFAULT_TOL):
    """(b b*)^{-1/2} b, the unitary part of b between the corners src and dst."""
    b = as_cmatrix(b)
    src = as_cmatrix(src)
    dst = as_cmatrix(dst)
    off = defect(b - dst @ b @ src)
    if off > tol.composite:
        raise SingularOnSupport("b does not map src into dst (defect %.3g)" % off)
    # the source side must be invertible as well
    inv_sqrt_psd(dagger(b) @ b, src, tol)
    return inv_sqrt_psd(b @ dagger(b), dst, tol) @ b


@dataclass(frozen=True)
class Flags:
    idempotent: bool
    projection: bool
    partial_isometry: bool
    unitary: bool
    self_adjoint: bool


def classify(m, tol=DEFAULT_TOL):
    a = as_cmatrix(m)
    eps = tol.eps
    sa = defect(a - dagger(a)) <= eps
    idem = defect(a @ a - a) <= eps
    src = dagger(a) @ a
    pi = defect(src @ src - src) <= eps
    one = eye_like(a)
    uni = defect(src - one) <= eps and defect(a @ dagger(a) - one) <= eps
    return Flags(idem, idem and sa, pi, uni, sa)


def rho_projection(e, tol=DEFAULT_TOL):
    """Projection with the same range as the idempotent e."""
    e = as_cmatrix(e)
    if defect(e @ e - e) > tol.eps:
        raise NotIdempotent("idempotent defect %.3g" % defect(e @ e - e))
    d = e - dagger(e)
    x = eye_like(e) + d @ dagger(d)
    r = e @ dagger(e) @ herm_func(x, lambda w: 1 / w, tol)
    return (r + dagger(r)) / 2


def unitary_log(u, tol=DEFAULT_TOL):
    """Hermitian h with exp(i h) = u and spectrum in (-pi, pi]."""
    u = as_cmatrix(u)
    x = (u + dagger(u)) / 2
    y = (u - dagger(u)) / 2j
    for gamma in (0.6180339887498949, -1.4142135623730951, 0.2718281828459045):
        _, v = herm_eig(x + gamma * y, Tolerance(max(tol.eps, 1e-7), tol.composite))
        lam = np.diagonal(dagger(v) @ u @ v, axis1=-2, axis2=-1)
        theta = np.angle(lam)
        # keep the spectrum in (-pi, pi] so that -1 maps to pi consistently
        theta = np.where(theta <= -np.pi + 1e-9, theta + 2 * np.pi, theta)
        h = (v * theta[..., None, :]) @ dagger(v)
        if defect(exp_i_herm(h, 1.0, tol) - u) <= tol.composite:
            return (h + dagger(h)) / 2
    raise NoConvergence("could not diagonalize unitary")


def exp_i_herm(h, t, tol=DEFAULT_TOL):
    """exp(i t h) for hermitian h."""
    return herm_func(h, lambda w: np.exp(1j * t * w), tol)


def range_basis(p, tol=DEFAULT_TOL):
    """Orthonormal columns spanning the range of a projection."""
    w, v = herm_eig(p, tol)
    k = int(round(float(np.sum(w))))
    return v[..., :k]
