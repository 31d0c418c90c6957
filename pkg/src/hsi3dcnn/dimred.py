"""Incremental PCA over per-pixel spectra.

Spectra are streamed in chunks into exact running moments (count, sum,
outer-product sum, float64), so any partition of the pixel stream yields the
same model up to floating-point reassociation.  Finalizing forms the
population covariance ``outer/count - mean mean^T`` and diagonalizes it with
a cyclic Jacobi sweep; the top components project L-band pixels down to B
while leaving the spatial grid untouched.

Model file ``.hsip``: magic ``HSIP``, 1-byte version (=1), uint32 LE L and B,
then mean (L float32), components row-major (B*L float32), eigenvalues
(B float32), all IEEE-754 little-endian.
"""

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, InsufficientDataError, ShapeError
from .ingest import HSICube

_MAGIC = b"HSIP"
_VERSION = 1


@dataclass
class PCAAccumulator:
    """Exact streaming moments of length-L spectra."""

    l: int
    count: int = 0
    sum_vec: np.ndarray = field(default=None)
    outer_sum: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.sum_vec is None:
            self.sum_vec = np.zeros(self.l, dtype=np.float64)
        if self.outer_sum is None:
            self.outer_sum = np.zeros((self.l, self.l), dtype=np.float64)


@dataclass
class PCAModel:
    """Mean spectrum plus top-B orthonormal components with eigenvalues."""

    mean: np.ndarray        # [L]
    components: np.ndarray  # [B, L], rows orthonormal
    eigenvalues: np.ndarray  # [B], non-increasing

    @property
    def l(self) -> int:
        return self.mean.shape[0]

    @property
    def b(self) -> int:
        return self.components.shape[0]


def fit_chunk(acc: PCAAccumulator, chunk: np.ndarray) -> PCAAccumulator:
    """Fold a chunk of spectra (rows) into the accumulator, in place.

    The result is independent of how the pixel stream is chunked, up to
    float64 reassociation.  An empty chunk is a no-op.
    """
    chunk = np.asarray(chunk, dtype=np.float64)
    if chunk.size == 0:
        return acc
    if chunk.ndim == 1:
        chunk = chunk[None, :]
    if chunk.ndim != 2 or chunk.shape[1] != acc.l:
        raise ShapeError(f"chunk spectra have length {chunk.shape[-1]}, expected {acc.l}")
    acc.count += chunk.shape[0]
    acc.sum_vec += chunk.sum(axis=0)
    outer = chunk.T @ chunk
    acc.outer_sum += (outer + outer.T) / 2.0  # keep the invariant: exactly symmetric
    return acc


def merge(a: PCAAccumulator, b: PCAAccumulator) -> PCAAccumulator:
    """Associative merge of two accumulators over disjoint pixel sets."""
    if a.l != b.l:
        raise ShapeError(f"cannot merge accumulators of length {a.l} and {b.l}")
    out = PCAAccumulator(l=a.l)
    out.count = a.count + b.count
    out.sum_vec = a.sum_vec + b.sum_vec
    out.outer_sum = a.outer_sum + b.outer_sum
    return out


def jacobi_eigh(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 64):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps row-cyclically over the upper triangle, rotating away each
    off-diagonal entry, until the Frobenius norm of the off-diagonal part
    drops below ``tol`` relative to the matrix norm.  Returns (eigenvalues,
    eigenvectors-as-columns), unsorted.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ShapeError(f"matrix must be square, got {a.shape}")
    v = np.eye(n)
    norm = np.linalg.norm(a)
    if norm == 0.0:
        return np.zeros(n), v
    for _ in range(max_sweeps):
        off = np.sqrt(max(0.0, np.sum(a * a) - np.sum(np.diag(a) ** 2)))
        if off <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol * norm * 1e-3:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p, rot_q = a[p].copy(), a[q].copy()
                a[p] = c * rot_p - s * rot_q
                a[q] = s * rot_p + c * rot_q
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v


def finalize(acc: PCAAccumulator, b: int) -> PCAModel:
    """Covariance eigendecomposition; keep the top-b components.

    Components are sorted by non-increasing eigenvalue and sign-fixed so the
    largest-magnitude entry of each is positive, making the model
    deterministic across platforms.
    """
    if acc.count < 2:
        raise InsufficientDataError(f"need at least 2 spectra, saw {acc.count}")
    if not 1 <= b <= acc.l:
        raise ShapeError(f"component count {b} outside 1..{acc.l}")
    mean = acc.sum_vec / acc.count
    cov = acc.outer_sum / acc.count - np.outer(mean, mean)
    cov = (cov + cov.T) / 2.0
    eigvals, eigvecs = jacobi_eigh(cov)
    order = np.argsort(-eigvals, kind="stable")[:b]
    comps = eigvecs[:, order].T.copy()
    for row in comps:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PCAModel(mean=mean, components=comps, eigenvalues=eigvals[order].copy())


def transform(model: PCAModel, cube: HSICube, b: int = None) -> np.ndarray:
    """Project every pixel spectrum onto the top-b components.

    Returns a [b, m, n] array in the cube's dtype; spatial dims untouched.
    """
    if b is None:
        b = model.b
    if cube.l != model.l:
        raise ShapeError(f"cube has {cube.l} bands, model expects {model.l}")
    if not 1 <= b <= model.b:
        raise ShapeError(f"requested {b} components, model holds {model.b}")
    flat = cube.reflectance.reshape(cube.l, -1).astype(np.float64)
    reduced = model.components[:b] @ (flat - model.mean[:, None])
    return reduced.reshape(b, cube.m, cube.n).astype(cube.reflectance.dtype)


def fit_cube(cube: HSICube, b: int, chunk_pixels: int = 4096,
             coords: np.ndarray = None) -> PCAModel:
    """Stream a cube's pixel spectra (optionally only given (row, col) coords)
    through the accumulator in fixed-size chunks and finalize."""
    if coords is None:
        spectra = cube.reflectance.reshape(cube.l, -1).T
    else:
        spectra = cube.reflectance[:, coords[:, 0], coords[:, 1]].T
    acc = PCAAccumulator(l=cube.l)
    for start in range(0, spectra.shape[0], chunk_pixels):
        fit_chunk(acc, spectra[start : start + chunk_pixels])
    return finalize(acc, b)


def save_model(model: PCAModel, path) -> None:
    """Write the model in the HSIP format (float32 payload)."""
    header = _MAGIC + bytes([_VERSION]) + struct.pack("<II", model.l, model.b)
    body = (
        np.ascontiguousarray(model.mean, dtype="<f4").tobytes()
        + np.ascontiguousarray(model.components, dtype="<f4").tobytes()
        + np.ascontiguousarray(model.eigenvalues, dtype="<f4").tobytes()
    )
    Path(path).write_bytes(header + body)


def load_model(path) -> PCAModel:
    """Read an HSIP model file."""
    data = Path(path).read_bytes()
    if len(data) < 4 or data[:4] != _MAGIC:
        raise FormatError(f"{path}: bad magic {data[:4]!r}, expected {_MAGIC!r}", offset=0)
    if len(data) < 5 or data[4] != _VERSION:
        raise FormatError(f"{path}: unsupported version", offset=4)
    if len(data) < 13:
        raise FormatError(f"{path}: truncated header", offset=len(data))
    l, b = struct.unpack_from("<II", data, 5)
    expected = 13 + 4 * (l + b * l + b)
    if len(data) != expected:
        raise FormatError(f"{path}: payload size {len(data)} != {expected}", offset=min(len(data), expected))
    mean = np.frombuffer(data, dtype="<f4", count=l, offset=13).astype(np.float64)
    comps = np.frombuffer(data, dtype="<f4", count=b * l, offset=13 + 4 * l)
    eig = np.frombuffer(data, dtype="<f4", count=b, offset=13 + 4 * (l + b * l))
    return PCAModel(
        mean=mean,
        components=comps.astype(np.float64).reshape(b, l),
        eigenvalues=eig.astype(np.float64),
    )
