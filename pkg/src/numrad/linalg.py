"""Dense complex-matrix kernel.

Adjoints, Hermitian eigendecompositions, operator absolute values,
functions of PSD matrices, spectral norms, and 2x2 block assembly.
All matrices are dense ``numpy`` arrays of ``complex128`` at desk scale
(sides <= 64); every operation is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    InvalidFunctionError,
    NegativeSpectrumError,
    NotSquareError,
    NotHermitianError,
)

# Residual bound for eigendecompositions, relative to max(1, ||H||).
EIG_TOL = 1e-10
# Relative threshold separating rounding noise from a genuinely negative spectrum.
CLAMP_TOL = 1e-12


def as_matrix(entries) -> np.ndarray:
    """Coerce input to a dense complex matrix, rejecting NaN/Inf entries."""
    m = np.array(entries, dtype=np.complex128, copy=True)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite")
    return m


def adjoint(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.asarray(m, dtype=np.complex128)).T.copy()


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return (m + adjoint(m)) / 2


def spectral_norm(m) -> float:
    """Largest singular value; exactly 0.0 for the zero matrix.

    Computed as the square root of the top eigenvalue of the smaller Gram
    matrix (M*M or MM*), which keeps the Hermitian eigendecomposition as the
    single primitive.
    """
    m = np.asarray(m, dtype=np.complex128)
    if not m.any():
        return 0.0
    if m.shape[0] <= m.shape[1]:
        gram = m @ np.conj(m).T
    else:
        gram = np.conj(m).T @ m
    gram = (gram + np.conj(gram).T) / 2
    w = np.linalg.eigvalsh(gram)
    return float(np.sqrt(max(float(w[-1]), 0.0)))


@dataclass(frozen=True)
class HermEigen:
    """Eigendecomposition H = V diag(values) V* with values nondecreasing."""

    values: np.ndarray
    vectors: np.ndarray


def herm_eig(h) -> HermEigen:
    """Eigendecomposition of a Hermitian matrix.

    The input may deviate from exact Hermitian symmetry by at most
    ``EIG_TOL * max(1, ||H||)``; it is symmetrized before decomposition.

    Raises:
        NotSquareError: non-square input.
        NotHermitianError: the symmetry pre-check fails.
        ConvergenceError: the decomposition misses its residual target.
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise NotSquareError(f"herm_eig requires a square matrix, got {h.shape}")
    nrm = spectral_norm(h)
    scale = max(1.0, nrm)
    if spectral_norm(h - adjoint(h)) > EIG_TOL * scale:
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    hs = hermitian_part(h)
    try:
        w, v = np.linalg.eigh(hs)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition failed: {exc}") from exc
    residual = spectral_norm(hs - (v * w) @ np.conj(v).T)
    if residual > EIG_TOL * scale:
        raise ConvergenceError(
            f"eigendecomposition residual {residual:.3e} exceeds target"
        )
    return HermEigen(values=w, vectors=v)


def gram_eigen(m) -> tuple[np.ndarray, np.ndarray]:
    """Spectral data of |M| = (M*M)^(1/2): returns (s, V) with |M| = V diag(s) V*.

    Eigenvalues of M*M in [-CLAMP_TOL * ||M||^2, 0) are clamped to zero;
    anything further below signals a decomposition failure.
    """
    m = as_matrix(m)
    gram = np.conj(m).T @ m
    gram = (gram + np.conj(gram).T) / 2
    w, v = np.linalg.eigh(gram)
    top = max(float(w[-1]), 0.0)
    floor = -CLAMP_TOL * top
    if float(w[0]) < floor:
        raise NegativeSpectrumError(
            f"eigenvalue {float(w[0]):.3e} of M*M below clamping floor {floor:.3e}"
        )
    s = np.sqrt(np.clip(w, 0.0, None))
    return s, v


def recompose(values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """V diag(values) V*, symmetrized."""
    out = (vectors * values) @ np.conj(vectors).T
    return (out + np.conj(out).T) / 2


def abs_op(m) -> np.ndarray:
    """Operator absolute value (M*M)^(1/2), a PSD matrix of side M.cols."""
    s, v = gram_eigen(m)
    return recompose(s, v)


def _apply_scalar_fn(phi: Callable, values: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(phi(values), dtype=np.float64)
        if out.shape != values.shape:
            raise ValueError
    except Exception:
        out = np.array([float(phi(float(t))) for t in values], dtype=np.float64)
    return out


def fn_of_abs(m, phi: Callable) -> np.ndarray:
    """phi(|M|) computed through a single Gram eigendecomposition."""
    s, v = gram_eigen(m)
    fs = _apply_scalar_fn(phi, s)
    if not np.isfinite(fs).all() or (fs < 0).any():
        raise InvalidFunctionError("function must be finite and >= 0 on the spectrum")
    return recompose(fs, v)


def fn_of_psd(h, phi: Callable) -> np.ndarray:
    """phi(H) for PSD Hermitian H via the spectral theorem.

    Eigenvalues in [-CLAMP_TOL * ||H||, 0) are clamped to zero before phi is
    applied; phi must be finite and nonnegative on the clamped spectrum.
    """
    eig = herm_eig(h)
    w = eig.values
    nrm = max(float(w[-1]), -float(w[0]), 0.0)
    if float(w[0]) < -CLAMP_TOL * nrm:
        raise NegativeSpectrumError(
            f"eigenvalue {float(w[0]):.3e} below PSD clamping floor"
        )
    w = np.clip(w, 0.0, None)
    fw = _apply_scalar_fn(phi, w)
    if not np.isfinite(fw).all() or (fw < 0).any():
        raise InvalidFunctionError("function must be finite and >= 0 on the spectrum")
    return recompose(fw, eig.vectors)


def real_part(m) -> np.ndarray:
    """(M + M*)/2; requires a square matrix."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotSquareError(f"real_part requires a square matrix, got {m.shape}")
    return hermitian_part(m)


def imag_part(m) -> np.ndarray:
    """(M - M*)/(2i); requires a square matrix."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotSquareError(f"imag_part requires a square matrix, got {m.shape}")
    return (m - adjoint(m)) / 2j


@dataclass
class OffDiagPair:
    """Blocks of [[0, X], [Y, 0]]: X maps the second summand into the first."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        self.x = as_matrix(self.x)
        self.y = as_matrix(self.y)
        if self.x.shape != self.y.shape[::-1]:
            raise DimensionMismatchError(
                f"off-diagonal blocks need X m-by-n and Y n-by-m, "
                f"got {self.x.shape} and {self.y.shape}"
            )


@dataclass
class Block2x2:
    """Blocks of [[A, B], [C, D]] with A m-by-m, B m-by-n, C n-by-m, D n-by-n."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self) -> None:
        self.a = as_matrix(self.a)
        self.b = as_matrix(self.b)
        self.c = as_matrix(self.c)
        self.d = as_matrix(self.d)
        m, n = self.a.shape[0], self.d.shape[0]
        ok = (
            self.a.shape == (m, m)
            and self.d.shape == (n, n)
            and self.b.shape == (m, n)
            and self.c.shape == (n, m)
        )
        if not ok:
            raise DimensionMismatchError(
                "block shapes must be (m,m), (m,n), (n,m), (n,n); got "
                f"{self.a.shape}, {self.b.shape}, {self.c.shape}, {self.d.shape}"
            )


def embed_offdiag(x, y) -> np.ndarray:
    """Assemble [[0, X], [Y, 0]] of side m+n."""
    pair = OffDiagPair(x, y)
    m, n = pair.x.shape
    top = np.hstack([np.zeros((m, m), dtype=np.complex128), pair.x])
    bottom = np.hstack([pair.y, np.zeros((n, n), dtype=np.complex128)])
    return np.vstack([top, bottom])


def embed_block(a, b, c, d) -> np.ndarray:
    """Assemble [[A, B], [C, D]] of side m+n."""
    blk = Block2x2(a, b, c, d)
    return np.block([[blk.a, blk.b], [blk.c, blk.d]])


def eigvals_psd(matrices: Sequence[np.ndarray]) -> np.ndarray:
    """Concatenated eigenvalues of PSD matrices, clipped at zero."""
    vals = [np.clip(np.linalg.eigvalsh(hermitian_part(as_matrix(h))), 0.0, None)
            for h in matrices]
    return np.concatenate(vals) if vals else np.zeros(0)
