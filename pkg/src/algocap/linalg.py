"""Dense complex linear algebra on numpy arrays.

Matrices are plain complex128 ndarrays in row-major layout. This module
supplies the handful of operations everything else is built on: Kronecker
products, partial traces over named subsystems, a deterministic Hermitian
eigendecomposition, and the support-restricted base-2 matrix logarithm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NotHermitianError, NotPositiveError

# Validation tolerances (shared across modules).
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9
SUPPORT_CUTOFF = 1e-12


def as_matrix(m) -> np.ndarray:
    """Coerce input to a 2-d complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-d matrix, got ndim={a.ndim}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def hermitian_defect(m: np.ndarray) -> float:
    """Largest entrywise deviation |M - M^dag|."""
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def require_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"matrix is {m.shape[0]}x{m.shape[1]}, not square")
    defect = hermitian_defect(m)
    if defect > tol:
        raise NotHermitianError(f"hermitian defect {defect:.3e} exceeds tolerance {tol:.1e}")
    return (m + dagger(m)) / 2


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the first factor on the slow (left) index."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(factors) -> np.ndarray:
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, as_matrix(f))
    return out


def partial_trace(m: np.ndarray, dims: list[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in `keep`.

    `dims` gives the local dimension of each tensor factor (left to right);
    `keep` is an iterable of factor indices to retain, in their original
    order. The result acts on the tensor product of the kept factors.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise DimensionMismatchError(
            f"product of dims {dims} is {total}, matrix is {m.shape[0]}x{m.shape[1]}"
        )
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionMismatchError(f"keep indices {keep} out of range for {len(dims)} factors")

    k = len(dims)
    t = m.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * k > len(letters):
        raise DimensionMismatchError(f"too many tensor factors ({k})")
    row = list(letters[:k])
    col = list(letters[k : 2 * k])
    for i in range(k):
        if i not in keep:
            col[i] = row[i]  # contract discarded factors
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    res = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return res.reshape(d_keep, d_keep)


@dataclass(frozen=True)
class HermitianEigenDecomposition:
    """Spectral data of a Hermitian matrix.

    Eigenvalues are real and sorted descending; eigenvectors are the matching
    unitary columns with a fixed phase convention (first component of
    magnitude above 1e-12 is made real and positive), so repeated runs on the
    same input produce identical output.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ dagger(u)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    fixed = vectors.copy()
    for j in range(fixed.shape[1]):
        col = fixed[:, j]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if nz.size:
            pivot = col[nz[0]]
            fixed[:, j] = col * (np.conj(pivot) / abs(pivot))
    return fixed


def eigh(m: np.ndarray, tol: float = HERMITIAN_TOL) -> HermitianEigenDecomposition:
    """Deterministic Hermitian eigendecomposition, eigenvalues descending.

    Exact eigenvalue ties are ordered lexicographically by eigenvector
    components after phase fixing.
    """
    h = require_hermitian(m, tol)
    vals, vecs = np.linalg.eigh(h)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = _fix_phases(vecs[:, order])

    # canonical order inside exact-tie blocks
    i = 0
    n = vals.size
    while i < n:
        j = i + 1
        while j < n and vals[j] == vals[i]:
            j += 1
        if j - i > 1:
            block = vecs[:, i:j]
            keys = [tuple(x for c in block[:, t] for x in (c.real, c.imag)) for t in range(j - i)]
            perm = sorted(range(j - i), key=keys.__getitem__)
            vecs[:, i:j] = block[:, perm]
        i = j
    return HermitianEigenDecomposition(eigenvalues=vals, eigenvectors=vecs)


def herm_log2(m: np.ndarray, support_cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """Base-2 spectral logarithm restricted to the support.

    Eigenvalues at or below `support_cutoff` are mapped to 0 on their
    eigenspace (the 0*log 0 = 0 convention); anything below -1e-9 is a
    genuine positivity violation and raises.
    """
    dec = eigh(m)
    lam = dec.eigenvalues
    if lam.size and lam.min() < -PSD_TOL:
        raise NotPositiveError(f"eigenvalue {lam.min():.3e} below -{PSD_TOL:.0e}")
    logs = np.where(lam > support_cutoff, np.log2(np.maximum(lam, support_cutoff)), 0.0)
    u = dec.eigenvectors
    out = (u * logs) @ dagger(u)
    return (out + dagger(out)) / 2


def support_projector(m: np.ndarray, support_cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """Orthogonal projector onto the span of eigenvectors above the cutoff."""
    dec = eigh(m)
    mask = dec.eigenvalues > support_cutoff
    u = dec.eigenvectors[:, mask]
    return u @ dagger(u)


def matrix_to_json(m: np.ndarray) -> dict:
    """Shared JSON encoding: row-major [re, im] pairs."""
    m = as_matrix(m)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    from .errors import ConfigError

    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError) as exc:
        raise ConfigError("matrix", f"missing or malformed field: {exc}") from exc
    if len(data) != rows * cols:
        raise ConfigError("matrix.data", f"expected {rows * cols} entries, got {len(data)}")
    flat = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    return flat.reshape(rows, cols)


def random_hermitian(rng: np.random.Generator, d: int, scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (g + dagger(g)) / 2
