"""Lindblad time evolution on truncated Fock spaces.

The master equation

    drho/dt = -i[H, rho] + sum_k ( L_k rho L_k^dag - 1/2 {L_k^dag L_k, rho} )

is integrated with an adaptive embedded Runge-Kutta 4(5) pair
(Dormand-Prince, ``scipy.integrate.solve_ivp`` method ``RK45``) over the
vectorized density matrix.  Vectorization is row-stacking (C order):
``vec(rho)[i * n + j] = rho[i, j]``, so ``vec(A rho B) = (A kron B^T) vec(rho)``;
:func:`liouvillian_matrix` follows the same convention and is cross-checked
against :func:`evolve` by the oracle tests.

Time units follow the Hamiltonian: figure pipelines pass coupling-normalized
generators, so their grids are in units of the inverse bare coupling.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
import scipy.sparse
from scipy.integrate import solve_ivp

from .linalg import SpaceLayout, require_hermitian
from .model import occupation_operators


class DynamicsError(RuntimeError):
    """Integration failure (step-size underflow, solver breakdown)."""


class TraceDriftError(DynamicsError):
    """Trace left the unit-trace manifold beyond the abort threshold."""

    def __init__(self, t: float, drift: float):
        super().__init__(f"trace drift {drift:.3e} exceeds 1e-6 at t = {t:.6g}")
        self.t = t
        self.drift = drift


@dataclass
class EvolutionSpec:
    """One integration job: generator, initial state, output grid, control."""

    hamiltonian: np.ndarray
    collapse_ops: list[np.ndarray]
    initial_state: np.ndarray           # density matrix or pure-state vector
    time_grid: np.ndarray               # strictly increasing, starts at 0
    layout: SpaceLayout
    rtol: float = 1e-8
    atol: float = 1e-10
    store_states: bool = False

    def __post_init__(self):
        self.time_grid = np.asarray(self.time_grid, dtype=float)
        if self.time_grid.ndim != 1 or len(self.time_grid) < 2:
            raise ValueError("time_grid must contain at least two points")
        if self.time_grid[0] != 0.0 or np.any(np.diff(self.time_grid) <= 0.0):
            raise ValueError("time_grid must start at 0 and increase strictly")
        self.hamiltonian = require_hermitian(self.hamiltonian, rtol=1e-10, name="hamiltonian")
        n = self.layout.dim
        if self.hamiltonian.shape[0] != n:
            raise ValueError("hamiltonian dimension does not match layout")
        for L in self.collapse_ops:
            if L.shape != (n, n):
                raise ValueError("collapse operator dimension does not match layout")
        state = np.asarray(self.initial_state, dtype=complex)
        if state.ndim == 1:
            if state.shape[0] != n:
                raise ValueError("initial state dimension does not match layout")
            norm = np.linalg.norm(state)
            if abs(norm - 1.0) > 1e-12:
                raise ValueError(f"pure initial state must be normalized, |norm-1| = {abs(norm-1.0):.3e}")
            state = np.outer(state, state.conj())
        elif state.shape == (n, n):
            if np.abs(state - state.conj().T).max() > 1e-12 * max(1.0, np.abs(state).max()):
                raise ValueError("initial density matrix must be Hermitian")
            if abs(np.trace(state).real - 1.0) > 1e-12 or abs(np.trace(state).imag) > 1e-12:
                raise ValueError("initial density matrix must have unit trace")
            if np.linalg.eigvalsh(state).min() < -1e-12:
                raise ValueError("initial density matrix must be positive semidefinite")
        else:
            raise ValueError("initial state must be a vector or a square matrix")
        self.initial_state = state


@dataclass
class Trajectory:
    """Time grid, occupation observables, and optionally the full states."""

    times: np.ndarray
    spin_excitation: np.ndarray
    phonon_number: np.ndarray
    magnon_number: np.ndarray
    layout: SpaceLayout
    states: np.ndarray | None = None
    converged: bool = True
    nfev: int = 0
    max_trace_drift: float = 0.0
    max_imag_residue: float = 0.0
    error_estimate: float = 0.0

    def observables(self) -> dict[str, np.ndarray]:
        return {
            "spin_excitation": self.spin_excitation,
            "phonon_number": self.phonon_number,
            "magnon_number": self.magnon_number,
        }


@dataclass(frozen=True)
class CutoffPolicy:
    """Initial cutoffs and growth schedule for convergence control."""

    n_b: int = 8
    n_a: int = 3
    growth: int = 2
    max_rounds: int = 4
    obs_tol: float = 1e-3


def liouvillian_apply(H: np.ndarray, collapse_ops, rho: np.ndarray) -> np.ndarray:
    """Right-hand side of the master equation for a single density matrix."""
    H = np.asarray(H, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if H.shape != rho.shape:
        raise ValueError("H and rho dimensions disagree")
    out = -1j * (H @ rho - rho @ H)
    for L in collapse_ops:
        if L.shape != rho.shape:
            raise ValueError("collapse operator dimension disagrees with rho")
        Ld = L.conj().T
        out += L @ rho @ Ld - 0.5 * (Ld @ L @ rho + rho @ Ld @ L)
    return out


def liouvillian_matrix(H: np.ndarray, collapse_ops) -> np.ndarray:
    """Dense superoperator generator in the row-stacking convention."""
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]
    eye = np.eye(n, dtype=complex)
    Lsup = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for L in collapse_ops:
        Ld = L.conj().T
        LdL = Ld @ L
        Lsup += np.kron(L, L.conj()) - 0.5 * np.kron(LdL, eye) - 0.5 * np.kron(eye, LdL.T)
    return Lsup


def expectation(rho: np.ndarray, op: np.ndarray, validate: bool = True) -> float:
    """``Re tr(rho op)`` for a Hermitian observable."""
    if validate:
        op = require_hermitian(op, rtol=1e-10, name="op")
    if rho.shape != op.shape:
        raise ValueError("rho and op dimensions disagree")
    val = complex(np.einsum("ij,ji->", rho, op))
    return float(val.real)


def _occupation_weights(layout: SpaceLayout) -> np.ndarray:
    """Diagonal weight vectors of the three occupation observables."""
    ops = occupation_operators(layout)
    return np.stack([np.diagonal(op).real for op in ops])


def _make_rhs(H: np.ndarray, collapse_ops):
    """Master-equation right-hand side with structure-aware jump terms.

    Diagonal collapse operators reduce to an elementwise mask; operators with
    low fill (ladder operators on a mode factor) go through sparse products.
    Both reductions are exact, so results match the dense path bit for bit.
    """
    n = H.shape[0]
    K = -1j * H.astype(complex)
    diag_masks = []
    dense_ops = []
    sparse_ops = []
    for L in collapse_ops:
        K = K - 0.5 * (L.conj().T @ L)
        diag = np.diagonal(L)
        nnz = np.count_nonzero(L)
        if np.count_nonzero(L - np.diag(diag)) == 0:
            diag_masks.append(np.outer(diag, diag.conj()))
        elif n >= 16 and nnz <= 0.1 * n * n:
            sparse_ops.append(
                (scipy.sparse.csr_matrix(L), scipy.sparse.csr_matrix(L.conj().T))
            )
        else:
            dense_ops.append((np.ascontiguousarray(L), np.ascontiguousarray(L.conj().T)))
    Kd = np.ascontiguousarray(K.conj().T)
    K = np.ascontiguousarray(K)
    buf1 = np.empty((n, n), dtype=complex)
    buf2 = np.empty((n, n), dtype=complex)
    buf3 = np.empty((n, n), dtype=complex)

    def rhs(t, y):
        rho = y.reshape(n, n)
        np.dot(K, rho, out=buf1)
        np.dot(rho, Kd, out=buf2)
        out = buf1 + buf2
        for L, Ld in dense_ops:
            np.dot(L, rho, out=buf3)
            out += buf3 @ Ld
        for Ls, Lds in sparse_ops:
            out += (Ls @ rho) @ Lds
        for mask in diag_masks:
            out += mask * rho
        return out.reshape(-1)

    return rhs


def evolve(spec: EvolutionSpec) -> Trajectory:
    """Integrate the master equation and sample observables on the grid.

    Raises :class:`DynamicsError` on step-size underflow and
    :class:`TraceDriftError` if the trace drifts from 1 by more than 1e-6
    anywhere on the grid.
    """
    n = spec.layout.dim
    rhs = _make_rhs(spec.hamiltonian, spec.collapse_ops)
    sol = solve_ivp(
        rhs,
        (spec.time_grid[0], spec.time_grid[-1]),
        spec.initial_state.reshape(-1),
        t_eval=spec.time_grid,
        method="RK45",
        rtol=spec.rtol,
        atol=spec.atol,
    )
    if not sol.success:
        raise DynamicsError(f"integration failed at t = {sol.t[-1] if len(sol.t) else 0.0:.6g}: {sol.message}")

    nt = len(spec.time_grid)
    states = np.ascontiguousarray(sol.y.T).reshape(nt, n, n)

    diag = np.einsum("tii->ti", states)
    traces = diag.sum(axis=1)
    drift = np.abs(traces - 1.0)
    if drift.max() > 1e-6:
        bad = int(np.argmax(drift > 1e-6))
        raise TraceDriftError(float(spec.time_grid[bad]), float(drift[bad]))

    imag_residue = float(np.abs(diag.imag).max())
    weights = _occupation_weights(spec.layout)
    obs = diag.real @ weights.T  # (nt, 3)

    traj = Trajectory(
        times=spec.time_grid.copy(),
        spin_excitation=obs[:, 0],
        phonon_number=obs[:, 1],
        magnon_number=obs[:, 2],
        layout=spec.layout,
        states=states if spec.store_states else None,
        nfev=int(sol.nfev),
        max_trace_drift=float(drift.max()),
        max_imag_residue=imag_residue,
        error_estimate=200.0 * (spec.rtol * max(1.0, float(np.abs(obs).max())) + spec.atol * nt),
    )
    _validate_trajectory(traj)
    return traj


def _validate_trajectory(traj: Trajectory) -> None:
    if traj.max_imag_residue > 1e-10:
        raise DynamicsError(f"observable imaginary residue {traj.max_imag_residue:.3e} exceeds 1e-10")
    for name, series in traj.observables().items():
        if series.min() < -1e-8:
            raise DynamicsError(f"{name} dips to {series.min():.3e} below -1e-8")
    if traj.states is not None:
        herm = max(float(np.abs(s - s.conj().T).max()) for s in traj.states)
        if herm > 1e-9:
            raise DynamicsError(f"stored state Hermiticity deviation {herm:.3e} exceeds 1e-9")
        mineig = min(float(np.linalg.eigvalsh(s).min()) for s in traj.states)
        if mineig < -1e-7:
            raise DynamicsError(f"stored state eigenvalue {mineig:.3e} below -1e-7")


def converged_evolve(
    build_spec: Callable[[SpaceLayout], EvolutionSpec],
    policy: CutoffPolicy = CutoffPolicy(),
) -> Trajectory:
    """Re-run :func:`evolve` with a growing phonon cutoff until observables settle.

    ``build_spec`` receives the trial :class:`SpaceLayout` and must return the
    corresponding :class:`EvolutionSpec` (same time grid each round).  The
    phonon cutoff is multiplied by ``policy.growth`` until the maximum
    absolute change of every occupation series drops below ``policy.obs_tol``;
    the finer trajectory is returned.  After ``policy.max_rounds`` failed
    refinements the last trajectory is returned with ``converged = False``.
    """
    n_b = policy.n_b
    coarse = evolve(build_spec(SpaceLayout((2, n_b, policy.n_a))))
    for _ in range(policy.max_rounds):
        n_b *= policy.growth
        fine = evolve(build_spec(SpaceLayout((2, n_b, policy.n_a))))
        diff = max(
            float(np.abs(fine_series - coarse_series).max())
            for fine_series, coarse_series in zip(
                fine.observables().values(), coarse.observables().values()
            )
        )
        if diff < policy.obs_tol:
            fine.converged = True
            return fine
        coarse = fine
    coarse.converged = False
    return coarse
