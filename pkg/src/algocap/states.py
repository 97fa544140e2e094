"""Density matrices, enumerated state sets, and weighted reference mixtures.

The reference mixture is the computable stand-in for a universal dominating
operator: an explicit, serializable weighted sum of the enumerated states at
one level, left subnormalized so the dominance inequality
``delta(i) * rho_i <= rho_tilde`` holds verbatim with the canonical weights
``delta(i) = 1 / (i * log2(i)^2)``.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    ConfigError,
    NotPositiveError,
    RankDeficientError,
    UndefinedWeightError,
)

TRACE_TOL = 1e-9


def validate_density_matrix(rho: np.ndarray, *, name: str = "rho") -> np.ndarray:
    """Check Hermiticity, positivity and unit trace; return the Hermitian part."""
    h = linalg.require_hermitian(rho)
    lam_min = float(np.linalg.eigvalsh(h).min())
    if lam_min < -linalg.PSD_TOL:
        raise NotPositiveError(f"{name}: eigenvalue {lam_min:.3e} below -{linalg.PSD_TOL:.0e}")
    tr = float(np.trace(h).real)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ConfigError(name, f"trace {tr!r} is not 1 within {TRACE_TOL:.0e}")
    return h


def validate_semi_density_matrix(rho: np.ndarray, *, name: str = "rho") -> np.ndarray:
    """Like validate_density_matrix but allows 0 < trace <= 1."""
    h = linalg.require_hermitian(rho)
    lam_min = float(np.linalg.eigvalsh(h).min())
    if lam_min < -linalg.PSD_TOL:
        raise NotPositiveError(f"{name}: eigenvalue {lam_min:.3e} below -{linalg.PSD_TOL:.0e}")
    tr = float(np.trace(h).real)
    if tr <= 0 or tr > 1.0 + TRACE_TOL:
        raise ConfigError(name, f"trace {tr!r} is not in (0, 1]")
    return h


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=np.complex128) / d


def delta_weight(i: int) -> float:
    """Canonical summable weight 1 / (i * log2(i)^2) for index i >= 2."""
    i = int(i)
    if i == 1:
        raise UndefinedWeightError("weight at index 1 is singular (log2(1) = 0)")
    if i < 1:
        raise UndefinedWeightError(f"index must be a positive integer, got {i}")
    return 1.0 / (i * math.log2(i) ** 2)


def purify(rho: np.ndarray) -> np.ndarray:
    """Return a purification |psi> on reference (x) system.

    Built from the spectral decomposition as sum_k sqrt(lam_k) |k>_R |v_k>_A,
    so tracing out the reference factor recovers rho.
    """
    h = validate_density_matrix(rho)
    dec = linalg.eigh(h)
    d = h.shape[0]
    psi = np.zeros(d * d, dtype=np.complex128)
    for k in range(d):
        lam = max(dec.eigenvalues[k], 0.0)
        if lam <= 0.0:
            continue
        e_k = np.zeros(d, dtype=np.complex128)
        e_k[k] = 1.0
        psi += math.sqrt(lam) * np.kron(e_k, dec.eigenvectors[:, k])
    return psi


def _poly_eval(coeffs: list[int], n: int) -> int:
    return sum(c * n**k for k, c in enumerate(coeffs))


@dataclass(frozen=True)
class StateEnumeration:
    """Ordered, leveled listing of density matrices with global indices.

    Level n holds f(n) states on dimension d**n, where f is a polynomial with
    non-negative integer coefficients (ascending order in `f_coeffs`); this
    keeps log f(n) / n -> 0, the growth condition the capacity brackets rely
    on. Global indices run consecutively level by level starting at 2, the
    first index where the canonical weight is defined.
    """

    d: int
    f_coeffs: tuple[int, ...]
    levels: dict[int, tuple[np.ndarray, ...]]
    label: str = "enumeration"

    FIRST_INDEX = 2

    def __post_init__(self):
        if self.d < 2:
            raise ConfigError("enumeration.d", f"local dimension must be >= 2, got {self.d}")
        if not self.f_coeffs or any(c < 0 for c in self.f_coeffs):
            raise ConfigError("enumeration.f_coeffs", "need non-negative integer coefficients")
        for n, states in sorted(self.levels.items()):
            want = self.f(n)
            if len(states) != want:
                raise ConfigError(
                    f"enumeration.levels[{n}]",
                    f"expected f({n}) = {want} states, got {len(states)}",
                )
            dim = self.d**n
            for s in states:
                if s.shape != (dim, dim):
                    raise ConfigError(
                        f"enumeration.levels[{n}]",
                        f"state has shape {s.shape}, expected {dim}x{dim}",
                    )

    def f(self, n: int) -> int:
        return _poly_eval(list(self.f_coeffs), n)

    @property
    def n_levels(self) -> int:
        return max(self.levels) if self.levels else 0

    def level_states(self, n: int) -> tuple[np.ndarray, ...]:
        if n not in self.levels:
            raise ConfigError("level", f"enumeration has no level {n}")
        return self.levels[n]

    def first_index(self, n: int) -> int:
        """Global index of the first state at level n."""
        idx = self.FIRST_INDEX
        for m in range(1, n):
            idx += self.f(m)
        return idx

    def global_indices(self, n: int) -> list[int]:
        start = self.first_index(n)
        return list(range(start, start + self.f(n)))

    def ident(self) -> str:
        h = hashlib.sha256()
        h.update(repr((self.d, self.f_coeffs)).encode())
        for n in sorted(self.levels):
            for s in self.levels[n]:
                h.update(np.ascontiguousarray(s).tobytes())
        return f"{self.label}#{h.hexdigest()[:12]}"

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "f_coeffs": list(self.f_coeffs),
            "levels": [
                {"n": n, "states": [linalg.matrix_to_json(s) for s in self.levels[n]]}
                for n in sorted(self.levels)
            ],
        }

    @classmethod
    def from_json(cls, obj: dict, label: str = "enumeration") -> "StateEnumeration":
        try:
            d = int(obj["d"])
            coeffs = tuple(int(c) for c in obj["f_coeffs"])
            raw_levels = obj["levels"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("enumeration", f"missing or malformed field: {exc}") from exc
        levels: dict[int, tuple[np.ndarray, ...]] = {}
        for entry in raw_levels:
            n = int(entry["n"])
            states = tuple(
                validate_density_matrix(linalg.matrix_from_json(s), name=f"levels[{n}]")
                for s in entry["states"]
            )
            levels[n] = states
        return cls(d=d, f_coeffs=coeffs, levels=levels, label=label)


def default_enumeration(d: int, n_max: int, grid: int) -> StateEnumeration:
    """Diagonal family with f(n) = 1 + grid*n states per level.

    Each level starts with the maximally mixed state (guaranteeing the
    reference mixture is full rank), followed by diagonal states that
    interpolate on a uniform rational grid between maximally mixed and the
    pure first basis state: spectrum (1-s)/D + s*e_0 at s = k / (grid*n).
    """
    if d < 2 or n_max < 1 or grid < 1:
        raise ConfigError("enumeration", f"need d>=2, n_max>=1, grid>=1; got {(d, n_max, grid)}")
    levels: dict[int, tuple[np.ndarray, ...]] = {}
    for n in range(1, n_max + 1):
        dim = d**n
        states = [maximally_mixed(dim)]
        steps = grid * n
        for k in range(1, steps + 1):
            s = k / steps
            spec = np.full(dim, (1.0 - s) / dim)
            spec[0] += s
            states.append(np.diag(spec).astype(np.complex128))
        levels[n] = tuple(states)
    return StateEnumeration(
        d=d,
        f_coeffs=(1, grid),
        levels=levels,
        label=f"default:d={d}:grid={grid}",
    )


@dataclass(frozen=True)
class ReferenceMixture:
    """Subnormalized full-rank mixture dominating each member state.

    `component_weights` maps the global index of each member to the weight it
    entered the sum with. The mixture is deliberately NOT renormalized:
    dominance and the +-log2(delta) sandwich are stated for the raw sum, and
    rescaling would silently shift every surrogate value built on it.
    """

    level: int
    rho_tilde: np.ndarray
    component_weights: dict[int, float] = field(default_factory=dict)
    label: str = "reference"

    def validate(self, members: dict[int, np.ndarray] | None = None) -> None:
        h = validate_semi_density_matrix(self.rho_tilde, name="rho_tilde")
        lam_min = float(np.linalg.eigvalsh(h).min())
        if lam_min <= 0:
            raise RankDeficientError(f"rho_tilde minimum eigenvalue {lam_min:.3e} is not positive")
        if members is not None:
            for i, rho_i in members.items():
                gap = float(np.linalg.eigvalsh(h - delta_weight(i) * rho_i).min())
                if gap < -linalg.PSD_TOL:
                    raise NotPositiveError(
                        f"dominance fails at index {i}: min eig of rho_tilde - delta*rho = {gap:.3e}"
                    )

    def ident(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.rho_tilde).tobytes())
        h.update(repr(sorted(self.component_weights.items())).encode())
        return f"{self.label}#{h.hexdigest()[:12]}"


def build_reference(enum: StateEnumeration, level: int) -> ReferenceMixture:
    """Sum the level's states with their canonical global-index weights.

    Requires the level's first state to be maximally mixed, which makes the
    sum full rank and every needed logarithm finite.
    """
    states = enum.level_states(level)
    indices = enum.global_indices(level)
    dim = enum.d**level
    if not np.allclose(states[0], maximally_mixed(dim), atol=1e-12):
        raise ConfigError(
            f"enumeration.levels[{level}]",
            "first state of each level must be the maximally mixed state",
        )
    rho_tilde = np.zeros((dim, dim), dtype=np.complex128)
    weights: dict[int, float] = {}
    for i, rho_i in zip(indices, states):
        w = delta_weight(i)
        weights[i] = w
        rho_tilde = rho_tilde + w * rho_i
    mixture = ReferenceMixture(
        level=level,
        rho_tilde=rho_tilde,
        component_weights=weights,
        label=f"{enum.label}:n={level}",
    )
    lam_min = float(np.linalg.eigvalsh(mixture.rho_tilde).min())
    if lam_min <= 0:
        raise RankDeficientError(f"reference at level {level} is rank deficient ({lam_min:.3e})")
    return mixture


def random_density_matrix(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed random state, optionally rank-restricted."""
    r = d if rank is None else rank
    g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    m = g @ linalg.dagger(g)
    return m / np.trace(m).real
