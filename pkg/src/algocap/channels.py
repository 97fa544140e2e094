"""Quantum channels as finite Kraus families.

A channel is stored as an ordered tuple of Kraus operators; the ordering is
part of the channel's identity because it fixes the basis of the environment
and hence of the complementary channel. Conversions to and from the Choi
matrix, the Stinespring isometry, tensor powers, and a small zoo of standard
single-qubit channels live here.
"""

from __future__ import annotations

import hashlib
import itertools
import os
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import BudgetExceededError, ConfigError, DimensionMismatchError, NotPositiveError

COMPLETENESS_TOL = 1e-8
DEFAULT_BUDGET_DIM = 64


def dim_budget() -> int:
    """Largest tensor-power dimension allowed (ALGOCAP_BUDGET_DIM, default 64)."""
    raw = os.environ.get("ALGOCAP_BUDGET_DIM", "")
    try:
        return int(raw) if raw else DEFAULT_BUDGET_DIM
    except ValueError:
        raise ConfigError("ALGOCAP_BUDGET_DIM", f"not an integer: {raw!r}")


@dataclass(frozen=True)
class KrausChannel:
    """CPTP map rho -> sum_j K_j rho K_j^dag with dim_env = len(kraus)."""

    dim_in: int
    dim_out: int
    kraus: tuple[np.ndarray, ...]
    label: str | None = None

    def __post_init__(self):
        if not self.kraus:
            raise ConfigError("channel.kraus", "need at least one Kraus operator")
        for j, k in enumerate(self.kraus):
            if k.shape != (self.dim_out, self.dim_in):
                raise DimensionMismatchError(
                    f"Kraus operator {j} has shape {k.shape}, "
                    f"expected ({self.dim_out}, {self.dim_in})"
                )
        comp = sum(linalg.dagger(k) @ k for k in self.kraus)
        defect = float(np.max(np.abs(comp - np.eye(self.dim_in))))
        if defect > COMPLETENESS_TOL:
            raise ConfigError(
                "channel.kraus",
                f"completeness defect {defect:.3e} exceeds {COMPLETENESS_TOL:.0e}",
            )
        for k in self.kraus:
            k.setflags(write=False)

    @property
    def dim_env(self) -> int:
        return len(self.kraus)

    def ident(self) -> str:
        if self.label:
            return self.label
        h = hashlib.sha256()
        for k in self.kraus:
            h.update(np.ascontiguousarray(k).tobytes())
        return f"kraus#{h.hexdigest()[:12]}"

    def to_json(self) -> dict:
        return {
            "kind": "kraus",
            "dim_in": self.dim_in,
            "dim_out": self.dim_out,
            "kraus": [linalg.matrix_to_json(k) for k in self.kraus],
        }


def apply(phi: KrausChannel, rho: np.ndarray) -> np.ndarray:
    """Schroedinger-picture action sum_j K_j rho K_j^dag."""
    rho = linalg.as_matrix(rho)
    if rho.shape != (phi.dim_in, phi.dim_in):
        raise DimensionMismatchError(
            f"state is {rho.shape}, channel input dimension is {phi.dim_in}"
        )
    out = np.zeros((phi.dim_out, phi.dim_out), dtype=np.complex128)
    for k in phi.kraus:
        out += k @ rho @ linalg.dagger(k)
    return out


def adjoint_apply(phi: KrausChannel, x: np.ndarray) -> np.ndarray:
    """Heisenberg-picture adjoint sum_j K_j^dag X K_j.

    Satisfies Tr(apply(phi, rho) @ X) == Tr(rho @ adjoint_apply(phi, X)).
    """
    x = linalg.as_matrix(x)
    if x.shape != (phi.dim_out, phi.dim_out):
        raise DimensionMismatchError(
            f"observable is {x.shape}, channel output dimension is {phi.dim_out}"
        )
    out = np.zeros((phi.dim_in, phi.dim_in), dtype=np.complex128)
    for k in phi.kraus:
        out += linalg.dagger(k) @ x @ k
    return out


def complementary(phi: KrausChannel) -> KrausChannel:
    """Channel to the environment: output entries Tr(K_j rho K_k^dag).

    Its Kraus operators F_m (one per output basis vector of phi) are read off
    the originals as (F_m)[j, a] = (K_j)[m, a].
    """
    m_env = phi.dim_env
    stack = np.stack(phi.kraus)  # (env, out, in)
    kraus = tuple(np.array(stack[:, m, :], dtype=np.complex128) for m in range(phi.dim_out))
    label = f"comp({phi.label})" if phi.label else None
    return KrausChannel(dim_in=phi.dim_in, dim_out=m_env, kraus=kraus, label=label)


def stinespring(phi: KrausChannel) -> np.ndarray:
    """Isometry V with V rho V^dag living on output (x) environment."""
    cols = []
    for j, k in enumerate(phi.kraus):
        e_j = np.zeros((phi.dim_env, 1), dtype=np.complex128)
        e_j[j, 0] = 1.0
        cols.append(np.kron(k, e_j))
    return sum(cols)


@dataclass(frozen=True)
class ChoiMatrix:
    """Choi operator sum_ij |i><j| (x) Phi(|i><j|), input factor first."""

    dim_in: int
    dim_out: int
    matrix: np.ndarray

    def __post_init__(self):
        d = self.dim_in * self.dim_out
        if self.matrix.shape != (d, d):
            raise DimensionMismatchError(
                f"Choi matrix is {self.matrix.shape}, expected {d}x{d}"
            )
        lam_min = float(np.linalg.eigvalsh(linalg.require_hermitian(self.matrix)).min())
        if lam_min < -linalg.PSD_TOL:
            raise NotPositiveError(f"Choi matrix eigenvalue {lam_min:.3e}: map not CP")
        marginal = linalg.partial_trace(self.matrix, [self.dim_in, self.dim_out], keep=[0])
        defect = float(np.max(np.abs(marginal - np.eye(self.dim_in))))
        if defect > COMPLETENESS_TOL:
            raise ConfigError(
                "choi", f"trace-preservation defect {defect:.3e} exceeds {COMPLETENESS_TOL:.0e}"
            )

    def to_json(self) -> dict:
        return {
            "kind": "choi",
            "dim_in": self.dim_in,
            "dim_out": self.dim_out,
            "choi": linalg.matrix_to_json(self.matrix),
        }


def choi_from_kraus(phi: KrausChannel) -> ChoiMatrix:
    d_in, d_out = phi.dim_in, phi.dim_out
    c = np.zeros((d_in * d_out, d_in * d_out), dtype=np.complex128)
    for k in phi.kraus:
        v = k.T.reshape(-1)  # v[(i, a)] = K[a, i]
        c += np.outer(v, np.conj(v))
    return ChoiMatrix(dim_in=d_in, dim_out=d_out, matrix=c)


def kraus_from_choi(c: ChoiMatrix, cutoff: float = 1e-10) -> KrausChannel:
    """Eigendecompose the Choi matrix, keeping eigenvalues above the cutoff.

    Eigenvalues are taken in descending order, which fixes the Kraus ordering
    of the result.
    """
    dec = linalg.eigh(c.matrix)
    kraus = []
    for lam, v in zip(dec.eigenvalues, dec.eigenvectors.T):
        if lam <= cutoff:
            continue
        k = np.sqrt(lam) * v.reshape(c.dim_in, c.dim_out).T
        kraus.append(np.ascontiguousarray(k))
    return KrausChannel(dim_in=c.dim_in, dim_out=c.dim_out, kraus=tuple(kraus))


def check_budget(phi: KrausChannel, n: int, budget: int | None = None) -> None:
    allowed = dim_budget() if budget is None else budget
    for what, d in (("input", phi.dim_in), ("output", phi.dim_out), ("environment", phi.dim_env)):
        required = d**n
        if required > allowed:
            raise BudgetExceededError(required, allowed, what=f"{what} dimension {d}^{n}")


def tensor_power(phi: KrausChannel, n: int, budget: int | None = None) -> KrausChannel:
    """n-fold tensor power; Kraus family is all n-fold products, ordered
    lexicographically by index tuple."""
    if n < 1:
        raise ConfigError("n", f"tensor power needs n >= 1, got {n}")
    if n == 1:
        return phi
    check_budget(phi, n, budget)
    kraus = tuple(
        linalg.kron_all(combo) for combo in itertools.product(phi.kraus, repeat=n)
    )
    label = f"{phi.label}^x{n}" if phi.label else None
    return KrausChannel(
        dim_in=phi.dim_in**n, dim_out=phi.dim_out**n, kraus=kraus, label=label
    )


# --- channel zoo -----------------------------------------------------------

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def _check_prob(p: float, name: str) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ConfigError(name, f"must lie in [0, 1], got {p}")
    return p


def identity_channel(d: int = 2) -> KrausChannel:
    d = int(d)
    if d < 2:
        raise ConfigError("d", f"identity channel needs d >= 2, got {d}")
    return KrausChannel(d, d, (np.eye(d, dtype=np.complex128),), label=f"zoo:identity({d})")


def dephasing(p: float) -> KrausChannel:
    """rho -> (1-p) rho + p Z rho Z."""
    p = _check_prob(p, "p")
    kraus = (
        np.sqrt(1 - p) * np.eye(2, dtype=np.complex128),
        np.sqrt(p) * _PAULI_Z,
    )
    return KrausChannel(2, 2, kraus, label=f"zoo:dephasing({p})")


def depolarizing(p: float) -> KrausChannel:
    """rho -> (1-p) rho + p I/2."""
    p = _check_prob(p, "p")
    kraus = (
        np.sqrt(1 - 3 * p / 4) * np.eye(2, dtype=np.complex128),
        np.sqrt(p / 4) * _PAULI_X,
        np.sqrt(p / 4) * _PAULI_Y,
        np.sqrt(p / 4) * _PAULI_Z,
    )
    return KrausChannel(2, 2, kraus, label=f"zoo:depolarizing({p})")


def amplitude_damping(gamma: float) -> KrausChannel:
    gamma = _check_prob(gamma, "gamma")
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=np.complex128)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=np.complex128)
    return KrausChannel(2, 2, (k0, k1), label=f"zoo:amplitude_damping({gamma})")


def erasure(p: float) -> KrausChannel:
    """Qubit in, qutrit out: rho -> (1-p) rho (+) p Tr(rho) |2><2|."""
    p = _check_prob(p, "p")
    embed = np.zeros((3, 2), dtype=np.complex128)
    embed[0, 0] = embed[1, 1] = 1.0
    k0 = np.sqrt(1 - p) * embed
    k1 = np.zeros((3, 2), dtype=np.complex128)
    k1[2, 0] = np.sqrt(p)
    k2 = np.zeros((3, 2), dtype=np.complex128)
    k2[2, 1] = np.sqrt(p)
    return KrausChannel(2, 3, (k0, k1, k2), label=f"zoo:erasure({p})")


ZOO = {
    "identity": identity_channel,
    "dephasing": dephasing,
    "depolarizing": depolarizing,
    "amplitude_damping": amplitude_damping,
    "erasure": erasure,
}


def zoo(name: str, **params) -> KrausChannel:
    if name not in ZOO:
        raise ConfigError("channel.name", f"unknown zoo channel {name!r}; know {sorted(ZOO)}")
    return ZOO[name](**params)


def random_mixed_unitary(
    rng: np.random.Generator, d: int = 2, n_ops: int = 3
) -> KrausChannel:
    """Random CPTP map: convex mixture of phase-diagonal times permutation
    unitaries. Trivially trace preserving, used by the property suites."""
    weights = rng.random(n_ops) + 0.1
    weights = weights / weights.sum()
    kraus = []
    for w in weights:
        phases = np.exp(2j * np.pi * rng.random(d))
        perm = np.eye(d, dtype=np.complex128)[rng.permutation(d)]
        kraus.append(np.sqrt(w) * (np.diag(phases) @ perm))
    return KrausChannel(d, d, tuple(kraus))


# --- JSON ------------------------------------------------------------------


def channel_from_json(obj: dict) -> KrausChannel:
    """Parse the shared channel encoding: kraus, choi, or zoo reference."""
    kind = obj.get("kind")
    if kind == "kraus":
        try:
            d_in, d_out = int(obj["dim_in"]), int(obj["dim_out"])
            kraus = tuple(linalg.matrix_from_json(k) for k in obj["kraus"])
        except (KeyError, TypeError) as exc:
            raise ConfigError("channel.kraus", f"missing or malformed field: {exc}") from exc
        return KrausChannel(d_in, d_out, kraus)
    if kind == "choi":
        try:
            d_in, d_out = int(obj["dim_in"]), int(obj["dim_out"])
            matrix = linalg.matrix_from_json(obj["choi"])
        except (KeyError, TypeError) as exc:
            raise ConfigError("channel.choi", f"missing or malformed field: {exc}") from exc
        return kraus_from_choi(ChoiMatrix(d_in, d_out, matrix))
    if kind == "zoo":
        name = obj.get("name")
        params = obj.get("params", {})
        if not isinstance(name, str):
            raise ConfigError("channel.name", "zoo channel needs a string 'name'")
        if not isinstance(params, dict):
            raise ConfigError("channel.params", "zoo params must be an object")
        return zoo(name, **params)
    raise ConfigError("channel.kind", f"expected 'kraus', 'choi' or 'zoo', got {kind!r}")
