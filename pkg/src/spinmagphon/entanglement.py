"""Tripartite entanglement measures on the spin/phonon/magnon state.

Logarithms are base 2 throughout, so a three-qubit GHZ state scores exactly
1 on both the minimum residual contangle and the three-tangle.  Bosonic
subsystems enter the negativity through the truncated-matrix partial
transpose directly; the states produced here are non-Gaussian few-excitation
states, so no covariance-matrix shortcut applies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import SpaceLayout, partial_trace, partial_transpose, trace_norm


class EntanglementError(ValueError):
    """Invalid partition or state for an entanglement measure."""


@dataclass(frozen=True)
class Partition:
    """Focus subsystem and its ordered complement; a permutation of (0, 1, 2)."""

    focus: int
    complement: tuple[int, int]

    def __post_init__(self):
        if sorted((self.focus, *self.complement)) != [0, 1, 2]:
            raise EntanglementError(
                f"partition must permute the three subsystems, got focus={self.focus},"
                f" complement={self.complement}"
            )


def all_partitions() -> tuple[Partition, ...]:
    return tuple(
        Partition(a, tuple(x for x in (0, 1, 2) if x != a)) for a in (0, 1, 2)
    )


def log_negativity(rho: np.ndarray, layout: SpaceLayout, part) -> float:
    """``log2 || rho^{T_part} ||_1``, clamped to 0 for PPT states."""
    pt = partial_transpose(rho, layout, part)
    tn = trace_norm(pt, rtol=1e-8)
    if abs(tn - 1.0) < 1e-12:
        return 0.0
    return max(0.0, float(np.log2(tn)))


def residual_contangle(rho: np.ndarray, layout: SpaceLayout, partition: Partition | int) -> float:
    """Contangle of focus-vs-rest minus both pairwise contangles (raw value)."""
    if isinstance(partition, int):
        partition = Partition(partition, tuple(x for x in (0, 1, 2) if x != partition))
    if layout.nsub != 3:
        raise EntanglementError("residual contangle requires a three-subsystem layout")
    A = partition.focus
    B, C = partition.complement
    e_full = log_negativity(rho, layout, [A]) ** 2

    def pair_contangle(other: int) -> float:
        keep = sorted((A, other))
        reduced = partial_trace(rho, layout, keep)
        pair_layout = SpaceLayout(
            tuple(layout.dims[k] for k in keep),
            tuple(layout.labels[k] for k in keep),
        )
        return log_negativity(reduced, pair_layout, [keep.index(A)]) ** 2

    return e_full - pair_contangle(B) - pair_contangle(C)


def min_residual_contangle(rho: np.ndarray, layout: SpaceLayout) -> float:
    """Minimum of the residual contangle over the three focus choices.

    Values in ``[-1e-9, 0)`` are numerical zeros and clamp to 0; anything
    lower is returned as-is (monogamy violation signals an implementation
    bug and is asserted against in the test suite).
    """
    m = min(residual_contangle(rho, layout, p) for p in all_partitions())
    if -1e-9 < m < 0.0:
        return 0.0
    return m


@dataclass(frozen=True)
class ThreeQubitProjection:
    """Projection of a pure state onto the {0,1} x {0,1} levels of both modes."""

    amplitudes: np.ndarray   # shape (2, 2, 2), renormalized
    leaked_weight: float     # population outside the projected subspace

    @property
    def reliable(self) -> bool:
        return self.leaked_weight <= 0.05


def project_to_three_qubits(state: np.ndarray, layout: SpaceLayout) -> ThreeQubitProjection:
    """Restrict a pure state to spin x {0,1} phonon x {0,1} magnon levels.

    Returns the renormalized amplitude tensor and the leaked weight
    ``1 - ||projection||^2``.  Leaked weight above 0.05 marks the associated
    three-tangle as unreliable (see :class:`ThreeQubitProjection.reliable`).
    A state with (numerically) no support on the subspace comes back with
    zero amplitudes and leaked weight 1.
    """
    psi = np.asarray(state, dtype=complex).reshape(-1)
    if psi.shape[0] != layout.dim:
        raise EntanglementError("state dimension does not match layout")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-8:
        raise EntanglementError(f"pure state must be normalized, |norm-1| = {abs(norm - 1.0):.3e}")
    block = psi.reshape(layout.dims)[tuple(slice(0, 2) for _ in layout.dims)]
    weight = float(np.sum(np.abs(block) ** 2))
    leaked = 1.0 - weight
    if weight < 1e-12:
        return ThreeQubitProjection(np.zeros((2, 2, 2), dtype=complex), 1.0)
    return ThreeQubitProjection(np.asarray(block / np.sqrt(weight)), max(0.0, leaked))


# 12-term expansion of the degree-4 invariant of a 2x2x2 amplitude tensor
# (indices are basis labels in binary; coefficients +1, -2, +4).
_HYP_COEFF = np.array([1, 1, 1, 1, -2, -2, -2, -2, -2, -2, 4, 4], dtype=float)
_HYP_INDEX = np.array(
    [
        [0b000, 0b001, 0b010, 0b100, 0b000, 0b000, 0b000, 0b011, 0b011, 0b101, 0b000, 0b111],
        [0b000, 0b001, 0b010, 0b100, 0b111, 0b111, 0b111, 0b100, 0b100, 0b010, 0b110, 0b001],
        [0b111, 0b110, 0b101, 0b011, 0b011, 0b101, 0b110, 0b101, 0b110, 0b110, 0b101, 0b010],
        [0b111, 0b110, 0b101, 0b011, 0b100, 0b010, 0b001, 0b010, 0b001, 0b001, 0b011, 0b100],
    ]
)


def hyperdeterminant(amplitudes: np.ndarray) -> complex:
    """Cayley hyperdeterminant of a 2x2x2 amplitude tensor."""
    c = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if c.shape[0] != 8:
        raise EntanglementError("amplitude tensor must have 8 entries")
    return complex(
        (c[_HYP_INDEX[0]] * c[_HYP_INDEX[1]] * c[_HYP_INDEX[2]] * c[_HYP_INDEX[3]]) @ _HYP_COEFF
    )


def three_tangle_pure(amplitudes: np.ndarray) -> float:
    """``4 |hyperdeterminant|`` of a normalized three-qubit pure state."""
    c = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if c.shape[0] != 8:
        raise EntanglementError("amplitude tensor must have 8 entries")
    norm = np.linalg.norm(c)
    if abs(norm - 1.0) > 1e-8:
        raise EntanglementError(f"amplitudes must be normalized, |norm-1| = {abs(norm - 1.0):.3e}")
    return 4.0 * abs(hyperdeterminant(c))


def dominant_pure_state(rho: np.ndarray) -> tuple[np.ndarray, float]:
    """Largest-eigenvalue eigenvector of a density matrix and its purity weight.

    Used on decay-free trajectories where the state is pure up to integration
    error; the returned weight (top eigenvalue) diagnoses residual mixedness.
    """
    w, V = np.linalg.eigh(rho)
    return V[:, -1], float(w[-1])
