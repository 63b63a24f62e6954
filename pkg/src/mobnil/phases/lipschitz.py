"""Lipschitz functions on tori: Fejér approximation, extension and soft thresholding."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from mobnil.circle import circle_norm
from mobnil.errors import DomainError, ParameterError, ValidationError

MAX_DIM = 3


@dataclass
class TrigPolynomial:
    """sum_j c_j e(m_j . x) on (R/Z)^d."""
    coeffs: np.ndarray  # (J,) complex
    freqs: np.ndarray  # (J, d) int64
    error: float | None = None  # measured sup error of the approximation, if known

    @property
    def dim(self) -> int:
        return int(self.freqs.shape[1])

    @property
    def term_count(self) -> int:
        return int(self.coeffs.size)

    def __call__(self, x, chunk: int = 4096) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1 and self.dim == 1:
            x = x[:, None]
        if x.shape[-1] != self.dim:
            raise ValidationError("point dimension does not match")
        out = np.empty(x.shape[0], dtype=np.complex128)
        for s in range(0, x.shape[0], chunk):
            arg = x[s:s + chunk] @ self.freqs.T.astype(np.float64)
            out[s:s + chunk] = np.exp(2j * np.pi * arg) @ self.coeffs
        return out

    def abs_sum(self) -> float:
        return float(np.abs(self.coeffs).sum())

    def prune(self, floor: float) -> "TrigPolynomial":
        keep = np.abs(self.coeffs) > floor
        return TrigPolynomial(self.coeffs[keep], self.freqs[keep], self.error)


def grid_points(side: int, d: int, shift: float = 0.0) -> np.ndarray:
    """All points (j + shift)/side of the d-dimensional grid, C order."""
    axes = [(np.arange(side) + shift) / side] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def fejer_weights(N: int, d: int) -> np.ndarray:
    w1 = 1.0 - np.abs(np.arange(-N + 1, N)) / N
    w = w1
    for _ in range(d - 1):
        w = np.multiply.outer(w, w1)
    return w


def _fejer_tensor(values: np.ndarray, N: int) -> np.ndarray:
    """Fejér-weighted coefficients indexed by m + N - 1, from grid samples."""
    d = values.ndim
    side = values.shape[0]
    hat = np.fft.fftn(values) / values.size
    idx = np.arange(-N + 1, N) % side
    coef = hat[np.ix_(*([idx] * d))]
    return coef * fejer_weights(N, d)


def _eval_on_grid(coef: np.ndarray, N: int, side: int, shift: float) -> np.ndarray:
    """Values of the trig polynomial at the grid (j + shift)/side by inverse FFT."""
    d = coef.ndim
    m = np.arange(-N + 1, N)
    twist = np.exp(2j * np.pi * m * shift / side)
    c = coef
    for axis in range(d):
        shape = [1] * d
        shape[axis] = -1
        c = c * twist.reshape(shape)
    full = np.zeros((side,) * d, dtype=np.complex128)
    idx = m % side
    full[np.ix_(*([idx] * d))] = c
    return np.fft.ifftn(full) * full.size


def fejer_approx(F, N: int, d: int, oversample: int = 4) -> TrigPolynomial:
    """Fejér mean of F with frequencies |m_i| < N per coordinate.

    Fourier coefficients come from samples on a grid of side oversample*N,
    so aliasing from frequencies beyond that grid is folded into the
    measured error.  The error is the sup over the sampling grid and its
    half-cell shift.
    """
    if not 1 <= d <= MAX_DIM:
        raise DomainError(f"dimension must lie in 1..{MAX_DIM}")
    if N < 1:
        raise ParameterError("N must be positive")
    side = oversample * N
    pts = grid_points(side, d)
    vals = np.asarray(F(pts if d > 1 else pts[:, 0]), dtype=np.complex128).reshape((side,) * d)
    coef = _fejer_tensor(vals, N)
    err = float(np.abs(_eval_on_grid(coef, N, side, 0.0) - vals).max())
    shifted = grid_points(side, d, 0.5)
    sv = np.asarray(F(shifted if d > 1 else shifted[:, 0]), dtype=np.complex128).reshape((side,) * d)
    err = max(err, float(np.abs(_eval_on_grid(coef, N, side, 0.5) - sv).max()))
    m = np.arange(-N + 1, N)
    mesh = np.meshgrid(*([m] * d), indexing="ij")
    freqs = np.stack([g.ravel() for g in mesh], axis=1).astype(np.int64)
    return TrigPolynomial(coef.ravel().copy(), freqs, err)


def fejer_rate_constants(F, Ns, d: int = 1) -> dict:
    """Measured sup error times N / log N for each N."""
    return {N: fejer_approx(F, N, d).error * N / math.log(N) for N in Ns}


# --- Lipschitz extension -------------------------------------------------------

def euclidean(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x = x.reshape(len(x), -1)
    y = y.reshape(len(y), -1)
    return np.sqrt(((x[:, None, :] - y[None, :, :]) ** 2).sum(axis=2))


def torus_linf(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x = x.reshape(len(x), -1)
    y = y.reshape(len(y), -1)
    return np.abs(circle_norm(x[:, None, :] - y[None, :, :])).max(axis=2)


def lipschitz_constant(points, values, metric=euclidean) -> float:
    """Largest |f(x) - f(y)| / d(x, y) over distinct pairs."""
    pts = np.asarray(points, dtype=np.float64)
    v = np.asarray(values)
    dist = metric(pts, pts)
    diff = np.abs(v[:, None] - v[None, :])
    mask = dist > 0
    return float((diff[mask] / dist[mask]).max()) if mask.any() else 0.0


def _extend_real(fy, dist, M):
    return np.minimum((fy[None, :] + M * dist).min(axis=1), fy.max())


def lipschitz_extend(Y, fy, X, M: float, metric=euclidean) -> np.ndarray:
    """min(inf_y f(y) + M d(x, y), sup f) on X; complex f extends part by part."""
    Y = np.asarray(Y, dtype=np.float64)
    fy = np.asarray(fy)
    if fy.size == 0:
        raise ValidationError("Y must be nonempty")
    if M < 0:
        raise ParameterError("Lipschitz constant must be nonnegative")
    dist = metric(np.asarray(X, dtype=np.float64), Y)
    if np.iscomplexobj(fy):
        return _extend_real(fy.real, dist, M) + 1j * _extend_real(fy.imag, dist, M)
    return _extend_real(fy.astype(np.float64), dist, M)


def soft_threshold(F, lip_norm: float, delta: float) -> np.ndarray:
    """max(|F| - delta lip_norm, 0) sgn(F)."""
    if not delta > 0:
        raise ParameterError("delta must be positive")
    F = np.asarray(F)
    mag = np.abs(F)
    cut = np.maximum(mag - delta * lip_norm, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        sgn = np.where(mag > 0, F / np.where(mag > 0, mag, 1), 0)
    return cut * sgn
