"""Log-parametrized positive equilibria: certificates, theorem application, numerics.

Certificates are exact objects: a kind, a subspace of species space and the
list of facts that justify it. Floating point only enters in the sampler, the
membership test and the root finder, which exist to validate certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import least_squares

from .decomposition import Decomposition, is_independent
from .kinetic_complexes import induced_decomposition, kinetic_network
from .kinetics import KineticsError, _arrays, check_kinetics, classify_system, sfrf_eval
from .linalg import Matrix, Subspace, float_matrix, orthogonal_complement, sum_of
from .network import Network, _select, is_weakly_reversible, summarize

PASS, FAIL, ASSUMED = "pass", "fail", "assumed"


class CertificationError(ValueError):
    pass


@dataclass(frozen=True)
class LPCertificate:
    kind: str  # "PLP" or "CLP"
    P: Subspace
    justification: tuple[str, ...]
    reactions: tuple[int, ...] = ()
    assumed: bool = False
    reference_equilibrium: tuple[float, ...] | None = None
    bi_lp: bool = False  # also CLP with the same subspace

    @property
    def plp(self) -> bool:
        return self.kind == "PLP"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "dim": self.P.dim,
            "basis": [[str(x) for x in v] for v in self.P.basis],
            "assumed": self.assumed,
            "bi_lp": self.bi_lp,
            "justification": list(self.justification),
        }


@dataclass(frozen=True)
class NotCertified:
    reasons: tuple[str, ...]
    reactions: tuple[int, ...] = ()

    plp = False

    def to_dict(self) -> dict:
        return {"kind": "not-certified", "reasons": list(self.reasons)}


@dataclass
class TheoremReport:
    applicable: bool
    hypotheses: dict[str, str]
    P_E: Subspace | None = None
    route: str = "bi-level independence"
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"applicable": self.applicable, "route": self.route, "hypotheses": dict(self.hypotheses),
               "notes": list(self.notes)}
        if self.P_E is not None:
            perp = orthogonal_complement(self.P_E)
            out["P_E"] = {"dim": self.P_E.dim, "basis": [[str(x) for x in v] for v in self.P_E.basis]}
            out["P_E_perp"] = {"dim": perp.dim, "basis": [[str(x) for x in v] for v in perp.basis]}
        return out


# ------------------------------------------------------------- certificates


def certify_block_plp(net: Network, F: Matrix, reactions: Iterable[int] | None = None) -> LPCertificate | NotCertified:
    """Zero-deficiency sufficient condition for a log-parametrized block.

    A weakly reversible PL-RDK block with deficiency zero and with both the
    kinetic-complex deficiency and the kinetic deficiency ``n - l - s~`` zero
    is complex balanced for all rate constants, all its positive equilibria are
    complex balanced, and they form the family ``log x - log x* in S~^perp``.
    Failing the test never means the block is not of that type.
    """
    sel = tuple(_select(net, reactions))
    if classify_system(net, F, sel).kind != "PL-RDK":
        raise CertificationError("block kinetics is not reactant-determined (PL-RDK)")
    reasons = []
    summ = summarize(net, sel)
    if not summ.weakly_reversible:
        return NotCertified(("block is not weakly reversible",), sel)
    kn = kinetic_network(net, F, sel)
    kinetic_def = summ.n - summ.l - kn.s
    if summ.delta != 0:
        reasons.append(f"block deficiency is {summ.delta}")
    if kn.deficiency != 0:
        reasons.append(f"kinetic complex deficiency is {kn.deficiency}")
    if kinetic_def != 0:
        reasons.append(f"kinetic deficiency n - l - s~ is {kinetic_def}")
    if reasons:
        return NotCertified(tuple(reasons), sel)
    return LPCertificate(
        kind="PLP",
        P=kn.flux_space,
        justification=(
            "weakly reversible PL-RDK block",
            "deficiency 0, so every positive equilibrium is complex balanced",
            "kinetic deficiency 0, so complex balanced equilibria exist for all rates "
            "and are log-parametrized by the kinetic flux space",
        ),
        reactions=sel,
        bi_lp=True,
    )


def assumed_certificate(net: Network, F: Matrix, reactions: Iterable[int]) -> LPCertificate:
    """User-asserted PLP property with the kinetic flux space of the block."""
    sel = tuple(_select(net, reactions))
    kn = kinetic_network(net, F, sel)
    return LPCertificate("PLP", kn.flux_space, ("asserted by the user",), sel, assumed=True)


def _check_hypotheses(net, F, D, certs, bi_level_route: bool) -> TheoremReport:
    hyp: dict[str, str] = {}
    notes: list[str] = []
    hyp["weakly_reversible_blocks"] = PASS if all(is_weakly_reversible(net, b) for b in D.blocks) else FAIL
    rdk = [classify_system(net, F, b).kind == "PL-RDK" for b in D.blocks]
    hyp["pl_rdk_blocks"] = PASS if all(rdk) else FAIL
    try:
        ind = induced_decomposition(net, F, D)
    except ValueError as exc:
        ind = None
        notes.append(str(exc))
    if bi_level_route:
        ok = ind is not None and bool(ind.bi_level_independent)
        hyp["bi_level_independent"] = PASS if ok else FAIL
    else:
        hyp["independent"] = PASS if is_independent(net, D.blocks) else FAIL
        hyp["equal_flux_dims"] = PASS if ind is not None and ind.equal_flux_dims else FAIL

    if certs is None:
        certs = [certify_block_plp(net, F, b) if rdk[i] else NotCertified(("block is not PL-RDK",), b)
                 for i, b in enumerate(D.blocks)]
    plp_state = PASS
    spaces = []
    for i, (b, c) in enumerate(zip(D.blocks, certs), 1):
        kn = kinetic_network(net, F, b) if ind is None else ind.blocks[i - 1]
        spaces.append(kn.flux_space)
        if isinstance(c, LPCertificate) and c.plp and c.P == kn.flux_space:
            if c.assumed and plp_state == PASS:
                plp_state = ASSUMED
        else:
            plp_state = FAIL
            why = "; ".join(c.reasons) if isinstance(c, NotCertified) else "certificate space differs"
            notes.append(f"block {i} not certified: {why}")
    hyp["plp_blocks_with_flux_space"] = plp_state

    applicable = all(v in (PASS, ASSUMED) for v in hyp.values())
    rep = TheoremReport(applicable, hyp, notes=notes,
                        route="bi-level independence" if bi_level_route else "independence with equal flux dimensions")
    if applicable:
        rep.P_E = sum_of(spaces, net.m)
    return rep


def apply_main_theorem(net: Network, F: Matrix, D: Decomposition,
                       certificates: Sequence[LPCertificate | NotCertified] | None = None) -> TheoremReport:
    """Positive-equilibria space of the whole system from block certificates.

    When every hypothesis holds, ``P_E`` is the sum of the block kinetic flux
    spaces and the positive equilibria are ``log x - log x* in P_E^perp``.
    """
    check_kinetics(net, F)
    return _check_hypotheses(net, F, D, certificates, bi_level_route=True)


def corollary_check(net: Network, F: Matrix, D: Decomposition,
                    certificates: Sequence[LPCertificate | NotCertified] | None = None) -> TheoremReport:
    """Same conclusion, reaching bi-level independence through equal flux dimensions."""
    check_kinetics(net, F)
    return _check_hypotheses(net, F, D, certificates, bi_level_route=False)


# ---------------------------------------------------------------- numerics


def _orthonormal(vectors: Sequence[Sequence], m: int) -> np.ndarray:
    """Orthonormal columns spanning the given exact vectors (m x d)."""
    if not vectors:
        return np.zeros((m, 0))
    A = float_matrix(vectors, m).T
    q, _ = np.linalg.qr(A)
    return q[:, : len(vectors)]


@dataclass
class EquilibriumFamily:
    """The set ``{x > 0 : log x - log x_star in P^perp}``."""

    P: Subspace
    x_star: np.ndarray
    _p_basis: np.ndarray = field(init=False, repr=False)
    _perp_basis: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = self.P.ambient_dim
        self._p_basis = _orthonormal(self.P.basis, m)
        self._perp_basis = _orthonormal(orthogonal_complement(self.P).basis, m)

    @property
    def dim(self) -> int:
        return self._perp_basis.shape[1]

    def contains(self, x: Sequence[float], tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise ValueError("points must be strictly positive")
        d = np.log(x) - np.log(self.x_star)
        proj = self._p_basis @ (self._p_basis.T @ d)
        return float(np.max(np.abs(proj), initial=0.0)) <= tol * max(1.0, float(np.max(np.abs(d), initial=0.0)))

    def point(self, v: Sequence[float]) -> np.ndarray:
        """``x_star * exp(v)`` for a direction ``v`` (not checked against the family)."""
        return self.x_star * np.exp(np.asarray(v, dtype=float))

    def sample(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        coeff = rng.normal(scale=scale, size=self.dim)
        return self.point(self._perp_basis @ coeff)


def parametrize_equilibria(cert: LPCertificate | TheoremReport | Subspace, x_star: Sequence[float],
                           net: Network | None = None, F: Matrix | None = None,
                           k: Sequence[float] | None = None, tol: float = 1e-8) -> EquilibriumFamily:
    """Family of equilibria through ``x_star``; residual at ``x_star`` checked when rates are given."""
    if isinstance(cert, LPCertificate):
        P = cert.P
    elif isinstance(cert, TheoremReport):
        if cert.P_E is None:
            raise ValueError("theorem report carries no equilibria space")
        P = cert.P_E
    else:
        P = cert
    x_star = np.asarray(x_star, dtype=float)
    if x_star.shape != (P.ambient_dim,) or np.any(~np.isfinite(x_star)) or np.any(x_star <= 0):
        raise ValueError("reference point must be a strictly positive species vector")
    if net is not None and F is not None and k is not None:
        res = float(np.max(np.abs(sfrf_eval(net, F, k, x_star))))
        if res >= tol:
            raise ValueError(f"reference point is not an equilibrium (residual {res:.3g})")
    return EquilibriumFamily(P, x_star)


def coset_constraints(P: Subspace) -> np.ndarray:
    """Rows spanning ``P^perp``; ``W (x - x0) = 0`` pins the coset ``x0 + P``."""
    perp = orthogonal_complement(P)
    return _orthonormal(perp.basis, P.ambient_dim).T


def find_equilibrium_numeric(net: Network, F: Matrix, k: Sequence[float],
                             initial_guesses: Iterable[Sequence[float]],
                             coset: tuple[Subspace, Sequence[float]] | None = None,
                             tol: float = 1e-10, max_nfev: int = 2000) -> np.ndarray | None:
    """Positive root of the species formation rate, solved in ``log x``.

    The residual is divided by the total reaction rate, so points drifting
    towards the boundary, where every rate vanishes, are never accepted. With
    ``coset=(P, x0)`` the root is constrained to ``x0 + P`` inside the positive
    orthant. Returns the first root with scaled residual below ``tol``, or None.
    """
    check_kinetics(net, F)
    Fm, V = _arrays(net, F)
    k = np.asarray(k, dtype=float)
    if k.shape != (net.r,) or np.any(k <= 0):
        raise KineticsError("rate constants must be positive, one per reaction")
    W = x0 = None
    if coset is not None:
        W = coset_constraints(coset[0])
        x0 = np.asarray(coset[1], dtype=float)
        if x0.shape != (net.m,) or np.any(x0 <= 0):
            raise ValueError("coset base point must be strictly positive")
        if not W.shape[0]:
            W = None
    x_scale = 1.0 if x0 is None else max(1.0, float(np.max(x0)))

    def fun(u):
        rates = k * np.exp(Fm @ u)
        g = V.T @ rates / rates.sum()
        if W is None:
            return g
        return np.concatenate([g, W @ (np.exp(u) - x0) / x_scale])

    def jac(u):
        rates = k * np.exp(Fm @ u)
        total = rates.sum()
        f = V.T @ rates
        J = V.T @ (rates[:, None] * Fm) / total - np.outer(f, rates @ Fm) / total**2
        if W is None:
            return J
        return np.vstack([J, W * np.exp(u)[None, :] / x_scale])

    for guess in initial_guesses:
        start = np.asarray(guess, dtype=float)
        if start.shape != (net.m,) or np.any(start <= 0):
            raise ValueError("initial guesses must be strictly positive species vectors")
        with np.errstate(over="ignore", invalid="ignore"):
            sol = least_squares(fun, np.log(start), jac=jac, method="lm", xtol=1e-15, ftol=1e-15,
                                gtol=1e-15, max_nfev=max_nfev)
        g = sol.fun
        if np.all(np.isfinite(g)) and np.max(np.abs(g), initial=0.0) < tol:
            return np.exp(sol.x)
    return None
