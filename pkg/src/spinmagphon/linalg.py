"""Dense complex linear algebra on the composite spin/phonon/magnon space.

Conventions used throughout the package:

* Operators and states are dense ``numpy`` arrays of ``complex128`` in C
  (row-major) order.
* The composite Hilbert space is the ordered tensor product
  (spin, phonon, magnon).  The composite basis index is row-major over the
  subsystem levels: ``index = (s * N_b + m) * N_a + k`` for spin level ``s``,
  phonon level ``m`` and magnon level ``k``.  All modules address subsystems
  through :class:`SpaceLayout` rather than hard-coded strides.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg


class LinalgError(ValueError):
    """Precondition violation in a linear-algebra operation."""


@dataclass(frozen=True)
class SpaceLayout:
    """Ordered subsystem dimensions of the composite Hilbert space.

    ``dims`` is ``(d_spin, N_b, N_a)`` by default ordering (spin, phonon,
    magnon); every dimension must be at least 2.
    """

    dims: tuple[int, ...]
    labels: tuple[str, ...] = ("spin", "phonon", "magnon")

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if len(self.dims) != len(self.labels):
            raise LinalgError("dims and labels must have equal length")
        if any(d < 2 for d in self.dims):
            raise LinalgError(f"every subsystem dimension must be >= 2, got {self.dims}")

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def nsub(self) -> int:
        return len(self.dims)

    def slot(self, label: str) -> int:
        return self.labels.index(label)

    def index(self, *levels: int) -> int:
        """Composite basis index of ``|levels[0], levels[1], ...>``."""
        if len(levels) != self.nsub:
            raise LinalgError("one level per subsystem required")
        idx = 0
        for lev, d in zip(levels, self.dims):
            if not 0 <= lev < d:
                raise LinalgError(f"level {lev} out of range for dimension {d}")
            idx = idx * d + lev
        return idx

    def basis_state(self, *levels: int) -> np.ndarray:
        """Unit vector for the product basis state with the given levels."""
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.index(*levels)] = 1.0
        return psi


def _as_square(A: np.ndarray, name: str = "matrix") -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise LinalgError(f"{name} must be square, got shape {A.shape}")
    return A


def require_hermitian(A: np.ndarray, rtol: float = 1e-10, name: str = "matrix") -> np.ndarray:
    """Validate Hermiticity relative to the largest matrix element."""
    A = _as_square(A, name)
    scale = np.abs(A).max()
    if scale == 0.0:
        return A
    dev = np.abs(A - A.conj().T).max()
    if dev > rtol * scale:
        raise LinalgError(f"{name} is not Hermitian (relative deviation {dev / scale:.3e})")
    return A


def kron(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Tensor product with ``(A (x) B)[(i dB + k), (j dB + l)] = A[i,j] B[k,l]``."""
    return np.kron(_as_square(A, "A"), _as_square(B, "B"))


def annihilation(n: int) -> np.ndarray:
    """Truncated bosonic annihilation operator with ladder entries sqrt(k).

    The commutator ``[a, a^dag]`` equals the identity except for the
    bottom-right entry ``1 - n`` (truncation artifact).
    """
    if n < 2:
        raise LinalgError(f"cutoff dimension must be >= 2, got {n}")
    a = np.zeros((n, n), dtype=complex)
    ks = np.arange(1, n)
    a[ks - 1, ks] = np.sqrt(ks)
    return a


def number_operator(n: int) -> np.ndarray:
    """Diagonal occupation-number operator diag(0, 1, ..., n-1)."""
    if n < 2:
        raise LinalgError(f"cutoff dimension must be >= 2, got {n}")
    return np.diag(np.arange(n, dtype=float)).astype(complex)


def embed(op: np.ndarray, slot: int, layout: SpaceLayout) -> np.ndarray:
    """``I (x) ... (x) op (x) ... (x) I`` with ``op`` acting on ``slot``."""
    op = _as_square(op, "op")
    if not 0 <= slot < layout.nsub:
        raise LinalgError(f"slot {slot} out of range for {layout.nsub} subsystems")
    if op.shape[0] != layout.dims[slot]:
        raise LinalgError(
            f"operator dimension {op.shape[0]} does not match layout.dims[{slot}]"
            f" = {layout.dims[slot]}"
        )
    out = np.eye(1, dtype=complex)
    for i, d in enumerate(layout.dims):
        out = np.kron(out, op if i == slot else np.eye(d, dtype=complex))
    return out


def _check_state_dim(rho: np.ndarray, layout: SpaceLayout) -> np.ndarray:
    rho = _as_square(rho, "rho")
    if rho.shape[0] != layout.dim:
        raise LinalgError(f"state dimension {rho.shape[0]} != layout dimension {layout.dim}")
    return rho


def partial_trace(rho: np.ndarray, layout: SpaceLayout, keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep`` (kept order preserved
    as ascending slot order)."""
    rho = _check_state_dim(rho, layout)
    keep = sorted(set(int(k) for k in np.atleast_1d(keep)))
    if not keep or any(k < 0 or k >= layout.nsub for k in keep):
        raise LinalgError(f"invalid subsystem set {keep}")
    n = layout.nsub
    t = rho.reshape(*layout.dims, *layout.dims)
    drop = [i for i in range(n) if i not in keep]
    perm = keep + [k + n for k in keep] + drop + [i + n for i in drop]
    t = t.transpose(perm)
    dk = int(np.prod([layout.dims[k] for k in keep]))
    dd = layout.dim // dk
    t = t.reshape(dk, dk, dd, dd)
    return np.einsum("ijkk->ij", t)


def partial_transpose(rho: np.ndarray, layout: SpaceLayout, subsystems) -> np.ndarray:
    """Transpose the indices of the chosen subsystem(s) only."""
    rho = _check_state_dim(rho, layout)
    subs = sorted(set(int(s) for s in np.atleast_1d(subsystems)))
    if not subs or any(s < 0 or s >= layout.nsub for s in subs):
        raise LinalgError(f"invalid subsystem set {subs}")
    n = layout.nsub
    t = rho.reshape(*layout.dims, *layout.dims)
    perm = list(range(2 * n))
    for s in subs:
        perm[s], perm[s + n] = perm[s + n], perm[s]
    return np.ascontiguousarray(t.transpose(perm)).reshape(layout.dim, layout.dim)


def hermitian_eigenvalues(H: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """All real eigenvalues of a Hermitian matrix, ascending."""
    H = require_hermitian(H, rtol=rtol, name="H")
    return np.linalg.eigvalsh(H)


def hermitian_eigensystem(H: np.ndarray, rtol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    H = require_hermitian(H, rtol=rtol, name="H")
    return np.linalg.eigh(H)


def trace_norm(A: np.ndarray, rtol: float = 1e-10) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.abs(hermitian_eigenvalues(A, rtol=rtol)).sum())


def matrix_exp(A: np.ndarray) -> np.ndarray:
    """Matrix exponential via scaling-and-squaring (order-13 Pade, scipy).

    For anti-Hermitian input the result is unitary to better than 1e-10 at
    the matrix norms used in this package.
    """
    return scipy.linalg.expm(_as_square(A, "A"))
