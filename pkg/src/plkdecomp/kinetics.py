"""Power-law kinetics: CF/NF node classification and rate functions.

The kinetic order matrix ``F`` is an r x m exact rational matrix; row ``q``
holds the exponents of reaction ``q``. Classification works on exact row
equality. Rate evaluation is floating point and never feeds back into the
structural analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .linalg import Matrix, Vector
from .network import Network, _select


class KineticsError(ValueError):
    pass


@dataclass(frozen=True)
class NodeClass:
    """Branching reactions of one reactant complex grouped by kinetic-order row."""

    complex: int
    reactions: tuple[int, ...]
    cf_subsets: tuple[tuple[int, ...], ...]

    @property
    def n_cf(self) -> int:
        return len(self.cf_subsets)

    @property
    def is_nf(self) -> bool:
        return len(self.cf_subsets) > 1

    def cf_index(self, reaction: int) -> int:
        for i, sub in enumerate(self.cf_subsets):
            if reaction in sub:
                return i
        raise KeyError(reaction)


@dataclass(frozen=True)
class SystemClass:
    kind: str  # "PL-RDK" or "PL-NDK"
    nf_nodes: tuple[int, ...]
    mass_action: bool
    interaction_span_surjective: bool
    factor_span_surjective: bool


def check_kinetics(net: Network, F: Matrix) -> None:
    if F.rows != net.r or F.cols != net.m:
        raise KineticsError(
            f"kinetic order matrix is {F.rows}x{F.cols}, network needs {net.r}x{net.m}"
        )


def mass_action_orders(net: Network) -> Matrix:
    return Matrix.from_rows([net.complexes[q.reactant] for q in net.reactions], cols=net.m)


def node_class(net: Network, F: Matrix, y: int, reactions: Iterable[int] | None = None) -> NodeClass:
    """CF-subsets of reactant ``y`` restricted to the selected reactions.

    Subsets are ordered by their smallest reaction index.
    """
    sel = set(_select(net, reactions))
    branch = [j for j in net.out_arcs[y] if j in sel]
    groups: dict[Vector, list[int]] = {}
    for j in branch:
        groups.setdefault(F.row(j), []).append(j)
    subsets = sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])
    return NodeClass(y, tuple(branch), tuple(subsets))


def classify_nodes(net: Network, F: Matrix, reactions: Iterable[int] | None = None) -> dict[int, NodeClass]:
    """Node classes of every reactant complex of the (sub)network."""
    check_kinetics(net, F)
    sel = _select(net, reactions)
    reactants = sorted({net.reactions[j].reactant for j in sel})
    return {y: node_class(net, F, y, sel) for y in reactants}


def nf_nodes(net: Network, F: Matrix, reactions: Iterable[int] | None = None) -> list[int]:
    return [y for y, nc in classify_nodes(net, F, reactions).items() if nc.is_nf]


def classify_system(net: Network, F: Matrix, reactions: Iterable[int] | None = None) -> SystemClass:
    classes = classify_nodes(net, F, reactions)
    sel = _select(net, reactions)
    nf = tuple(y for y, nc in classes.items() if nc.is_nf)
    mass_action = all(F.row(j) == net.complexes[net.reactions[j].reactant] for j in sel)
    rows_by_reactant = {}
    for y, nc in classes.items():
        rows_by_reactant.setdefault(y, set()).update(F.row(j) for j in nc.reactions)
    # distinct reactants never share a kinetic-order row
    seen: dict[Vector, int] = {}
    fss = True
    for y, rows in rows_by_reactant.items():
        for row in rows:
            if seen.setdefault(row, y) != y:
                fss = False
    return SystemClass(
        kind="PL-NDK" if nf else "PL-RDK",
        nf_nodes=nf,
        mass_action=mass_action,
        interaction_span_surjective=fss,
        factor_span_surjective=fss and not nf,
    )


def is_cf(net: Network, F: Matrix, reactions: Iterable[int] | None = None) -> bool:
    return not nf_nodes(net, F, reactions)


# ------------------------------------------------------------- rate functions


def _arrays(net: Network, F: Matrix):
    Fm = np.array([[float(x) for x in F.row(j)] for j in range(F.rows)], dtype=float).reshape(F.rows, F.cols)
    V = np.array([[float(x) for x in v] for v in net.reaction_vectors], dtype=float).reshape(net.r, net.m)
    return Fm, V


def _check_positive(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise KineticsError("concentrations must be strictly positive")
    return x


def _check_rates(k, r: int) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if k.shape != (r,):
        raise KineticsError(f"expected {r} rate constants, got shape {k.shape}")
    if np.any(k <= 0):
        raise KineticsError("rate constants must be positive")
    return k


def reaction_rates(net: Network, F: Matrix, k: Sequence[float], x: Sequence[float]) -> np.ndarray:
    """``K_q(x) = k_q * prod_j x_j^F_qj`` evaluated as ``exp(F log x)``."""
    check_kinetics(net, F)
    x = _check_positive(x)
    k = _check_rates(k, net.r)
    Fm, _ = _arrays(net, F)
    return k * np.exp(Fm @ np.log(x))


def sfrf_eval(net: Network, F: Matrix, k: Sequence[float], x: Sequence[float]) -> np.ndarray:
    """Species formation rate ``f(x) = N K(x)``."""
    _, V = _arrays(net, F)
    return V.T @ reaction_rates(net, F, k, x)


def cfr_eval(net: Network, F: Matrix, k: Sequence[float], x: Sequence[float]) -> np.ndarray:
    """Complex formation rate ``g(x) = I_a diag(k) rho' Psi(x)``; CF systems only."""
    check_kinetics(net, F)
    if not is_cf(net, F):
        raise KineticsError("complex formation rate needs reactant-determined (PL-RDK) kinetics")
    x = _check_positive(x)
    k = _check_rates(k, net.r)
    logx = np.log(x)
    psi = np.zeros(net.n)
    for y in range(net.n):
        if net.out_arcs[y]:
            row = F.row(net.out_arcs[y][0])
            psi[y] = np.exp(np.dot([float(v) for v in row], logx))
    flux = k * np.array([psi[q.reactant] for q in net.reactions])
    g = np.zeros(net.n)
    for j, q in enumerate(net.reactions):
        g[q.reactant] -= flux[j]
        g[q.product] += flux[j]
    return g


def species_jacobian_log(net: Network, F: Matrix, k: Sequence[float], u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``f`` and ``df/du`` in log coordinates ``x = exp(u)``."""
    Fm, V = _arrays(net, F)
    rates = np.asarray(k, dtype=float) * np.exp(Fm @ u)
    f = V.T @ rates
    J = V.T @ (rates[:, None] * Fm)
    return f, J


