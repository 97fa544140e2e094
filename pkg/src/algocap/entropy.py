"""Entropic functionals, in bits throughout.

Besides the standard von Neumann / relative / exchange entropies and
coherent information, this module houses the computable complexity
surrogate: trace pairings -Tr(rho log2 ref) against a declared reference
operator, and the linear coherent-information surrogate they induce. All
surrogate values are relative to a serialized reference mixture; reports
must record which reference produced a number.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channels as ch
from . import linalg
from .errors import DimensionMismatchError, SupportViolationError
from .states import ReferenceMixture, validate_density_matrix

SUPPORT_TOL = 1e-9


class _InfiniteRelativeEntropy:
    """Tagged signal for an infinite relative entropy.

    Deliberately not a float: any attempt to use it in arithmetic raises
    instead of silently propagating an inf through a report.
    """

    __slots__ = ()

    def __repr__(self) -> str:
        return "INFINITE"


INFINITE = _InfiniteRelativeEntropy()


def is_infinite(value) -> bool:
    return value is INFINITE


def von_neumann(rho: np.ndarray, support_cutoff: float = linalg.SUPPORT_CUTOFF) -> float:
    """-sum lam log2 lam over eigenvalues above the cutoff."""
    dec = linalg.eigh(rho)
    lam = dec.eigenvalues
    if lam.size and lam.min() < -linalg.PSD_TOL:
        from .errors import NotPositiveError

        raise NotPositiveError(f"eigenvalue {lam.min():.3e} below -{linalg.PSD_TOL:.0e}")
    lam = lam[lam > support_cutoff]
    return float(-np.sum(lam * np.log2(lam)))


def _kernel_mass(rho: np.ndarray, ref: np.ndarray) -> float:
    """Weight of rho outside the support of ref."""
    proj = linalg.support_projector(ref)
    return float(np.trace(rho).real - np.trace(rho @ proj).real)


def relative_entropy(rho: np.ndarray, sigma: np.ndarray, support_tol: float = SUPPORT_TOL):
    """Tr rho (log2 rho - log2 sigma), or the INFINITE signal when the
    support of rho leaks outside the support of sigma."""
    rho = linalg.as_matrix(rho)
    sigma = linalg.as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatchError(f"shapes {rho.shape} and {sigma.shape} differ")
    if _kernel_mass(rho, sigma) > support_tol:
        return INFINITE
    log_rho = linalg.herm_log2(rho)
    log_sigma = linalg.herm_log2(sigma)
    return float(np.trace(rho @ (log_rho - log_sigma)).real)


def exchange_entropy(rho: np.ndarray, phi: ch.KrausChannel, verify: bool = False) -> float:
    """Entropy exchanged with the environment, computed as S of the
    complementary output. With verify=True the purification route is also
    evaluated and must agree to 1e-9."""
    env_out = ch.apply(ch.complementary(phi), rho)
    value = von_neumann(env_out)
    if verify:
        other = exchange_entropy_purification(rho, phi)
        if abs(value - other) > 1e-9:
            raise RuntimeError(
                f"exchange-entropy routes disagree: complementary {value!r} "
                f"vs purification {other!r}"
            )
    return value


def exchange_entropy_purification(rho: np.ndarray, phi: ch.KrausChannel) -> float:
    """Reference route: purify rho, push the system half through the channel,
    and take the entropy of the joint reference-output state."""
    from .states import purify

    psi = purify(rho)
    d = rho.shape[0]
    eye_r = np.eye(d, dtype=np.complex128)
    joint = np.zeros((d * phi.dim_out, d * phi.dim_out), dtype=np.complex128)
    for k in phi.kraus:
        vec = np.kron(eye_r, k) @ psi
        joint += np.outer(vec, np.conj(vec))
    return von_neumann(joint)


def coherent_information(rho: np.ndarray, phi: ch.KrausChannel) -> float:
    """S(output) - S(exchange)."""
    return von_neumann(ch.apply(phi, rho)) - exchange_entropy(rho, phi)


def gacs_surrogate(
    rho: np.ndarray,
    ref: np.ndarray,
    support_tol: float = SUPPORT_TOL,
    strict: bool = True,
) -> float:
    """Complexity surrogate -Tr(rho log2 ref) against a declared reference.

    Requires support(rho) inside support(ref); with strict=False the leaked
    weight is ignored (support-restricted log) instead of raising, which is
    occasionally useful when debugging a reference choice.
    """
    rho = linalg.as_matrix(rho)
    ref = linalg.as_matrix(ref)
    if rho.shape != ref.shape:
        raise DimensionMismatchError(f"shapes {rho.shape} and {ref.shape} differ")
    mass = _kernel_mass(rho, ref)
    if strict and mass > support_tol:
        raise SupportViolationError(
            f"state has weight {mass:.3e} outside the reference support"
        )
    return float(-np.trace(rho @ linalg.herm_log2(ref)).real)


@dataclass(frozen=True)
class SurrogateContext:
    """Frozen evaluation context for the linear surrogate at one level.

    Holds the n-letter channel, its complementary, the pushforwards of the
    reference mixture through both, and their cached support-restricted logs.
    Immutable after construction, so evaluations are pure and re-entrant.
    """

    level: int
    ref_in: ReferenceMixture
    channel_n: ch.KrausChannel
    comp_n: ch.KrausChannel
    ref_out_b: np.ndarray
    ref_out_e: np.ndarray
    log_ref_b: np.ndarray
    log_ref_e: np.ndarray

    def pushforward_residuals(self) -> tuple[float, float]:
        """Recompute both pushforwards and report the max entrywise drift."""
        b = ch.apply(self.channel_n, self.ref_in.rho_tilde)
        e = ch.apply(self.comp_n, self.ref_in.rho_tilde)
        return (
            float(np.max(np.abs(b - self.ref_out_b))),
            float(np.max(np.abs(e - self.ref_out_e))),
        )


def build_surrogate_context(
    phi: ch.KrausChannel,
    level: int,
    ref: ReferenceMixture,
    budget: int | None = None,
) -> SurrogateContext:
    """Push the reference through the n-letter channel and cache the logs."""
    if ref.level != level:
        raise DimensionMismatchError(
            f"reference is at level {ref.level}, context requested level {level}"
        )
    expected = phi.dim_in**level
    if ref.rho_tilde.shape != (expected, expected):
        raise DimensionMismatchError(
            f"reference dimension {ref.rho_tilde.shape[0]} does not match "
            f"dim_in^n = {expected}"
        )
    ch.check_budget(phi, level, budget)
    phi_n = ch.tensor_power(phi, level, budget)
    comp_n = ch.tensor_power(ch.complementary(phi), level, budget)
    ref_out_b = ch.apply(phi_n, ref.rho_tilde)
    ref_out_e = ch.apply(comp_n, ref.rho_tilde)
    return SurrogateContext(
        level=level,
        ref_in=ref,
        channel_n=phi_n,
        comp_n=comp_n,
        ref_out_b=ref_out_b,
        ref_out_e=ref_out_e,
        log_ref_b=linalg.herm_log2(ref_out_b),
        log_ref_e=linalg.herm_log2(ref_out_e),
    )


def algorithmic_coherent_information(
    rho: np.ndarray,
    ctx: SurrogateContext,
    support_tol: float = SUPPORT_TOL,
    strict: bool = True,
) -> float:
    """Linear coherent-information surrogate against the context's reference.

    Exactly a trace pairing in rho: the surrogate of the channel output minus
    the surrogate of the environment output, both taken against the
    reference pushforwards cached in the context.
    """
    rho = validate_density_matrix(rho)
    b_out = ch.apply(ctx.channel_n, rho)
    e_out = ch.apply(ctx.comp_n, rho)
    for out, ref, side in ((b_out, ctx.ref_out_b, "output"), (e_out, ctx.ref_out_e, "environment")):
        mass = _kernel_mass(out, ref)
        if strict and mass > support_tol:
            raise SupportViolationError(
                f"reference mixture lacks rank on the {side} support "
                f"(leaked weight {mass:.3e})"
            )
    term_b = -float(np.trace(b_out @ ctx.log_ref_b).real)
    term_e = -float(np.trace(e_out @ ctx.log_ref_e).real)
    return term_b - term_e


def binary_entropy(p: float) -> float:
    """h2(p) in bits; endpoint convention h2(0) = h2(1) = 0."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))
