"""Quick oracle and invariant checks behind the ``selftest`` subcommand."""

from __future__ import annotations

import math

import numpy as np

from .dynamics import EvolutionSpec, evolve, liouvillian_matrix
from .entanglement import min_residual_contangle, three_tangle_pure
from .linalg import (
    SpaceLayout,
    annihilation,
    hermitian_eigenvalues,
    kron,
    matrix_exp,
    partial_transpose,
    trace_norm,
)
from .model import (
    Detunings,
    build_hamiltonian_lab,
    build_hamiltonian_squeezed,
    derive_params,
    red_detuning,
    squeeze_unitary,
    to_lambda_units,
    trapped_diamond_params,
)


def _check(name: str, ok: bool, detail: str = "") -> bool:
    status = "PASS" if ok else "FAIL"
    print(f"selftest {status}: {name}" + (f" ({detail})" if detail else ""))
    return ok


def run_selftest() -> bool:
    rng = np.random.default_rng(20240517)
    ok = True

    A, B = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(2))
    C, D = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(2))
    dev = np.abs(kron(A, C) @ kron(B, D) - kron(A @ B, C @ D)).max()
    ok &= _check("kron mixed-product", dev < 1e-12, f"max dev {dev:.1e}")

    a = annihilation(6)
    comm = a @ a.conj().T - a.conj().T @ a
    expected = np.eye(6)
    expected[-1, -1] = 1 - 6
    dev = np.abs(comm - expected).max()
    ok &= _check("ladder commutator with truncation edge", dev < 1e-13, f"max dev {dev:.1e}")

    H = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    H = H + H.conj().T
    w = hermitian_eigenvalues(H)
    dev = abs(w.sum() - np.trace(H).real)
    ok &= _check("eigenvalue trace identity", dev < 1e-10 * max(1, abs(np.trace(H).real)), f"dev {dev:.1e}")

    G = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    G = G - G.conj().T
    U = matrix_exp(G)
    dev = np.abs(U.conj().T @ U - np.eye(8)).max()
    ok &= _check("exponential of anti-Hermitian is unitary", dev < 1e-9, f"max dev {dev:.1e}")

    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1 / math.sqrt(2)
    rho_bell = np.outer(bell, bell.conj())
    two_qubits = SpaceLayout((2, 2), ("a", "b"))
    pt = partial_transpose(rho_bell, two_qubits, [0])
    w = hermitian_eigenvalues(pt)
    ok &= _check(
        "Bell partial transpose spectrum",
        abs(w.min() + 0.5) < 1e-12 and abs(trace_norm(pt) - 2.0) < 1e-12,
        f"min eig {w.min():.6f}",
    )

    qubits = SpaceLayout((2, 2, 2), ("a", "b", "c"))
    ghz = np.zeros(8, dtype=complex)
    ghz[0] = ghz[7] = 1 / math.sqrt(2)
    mrc = min_residual_contangle(np.outer(ghz, ghz.conj()), qubits)
    tau = three_tangle_pure(ghz.reshape(2, 2, 2))
    wst = np.zeros(8, dtype=complex)
    wst[1] = wst[2] = wst[4] = 1 / math.sqrt(3)
    tau_w = three_tangle_pure(wst.reshape(2, 2, 2))
    ok &= _check(
        "GHZ / W tripartite measures",
        abs(mrc - 1) < 1e-6 and abs(tau - 1) < 1e-9 and abs(tau_w) < 1e-9,
        f"mrc {mrc:.2e}, tau {tau:.2e}, tau_W {tau_w:.2e}",
    )

    layout = SpaceLayout((2, 3, 2))
    Hs = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    Hs = Hs + Hs.conj().T
    L1 = 0.3 * (rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12)))
    psi = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    psi /= np.linalg.norm(psi)
    grid = np.array([0.0, 0.5, 1.0])
    traj = evolve(EvolutionSpec(Hs, [L1], psi, grid, layout, rtol=1e-10, atol=1e-12, store_states=True))
    prop = matrix_exp(liouvillian_matrix(Hs, [L1]) * grid[-1])
    rho_oracle = (prop @ np.outer(psi, psi.conj()).reshape(-1)).reshape(12, 12)
    dev = np.abs(traj.states[-1] - rho_oracle).max()
    ok &= _check("master-equation vs exponential propagation", dev < 1e-6, f"max dev {dev:.1e}")

    from dataclasses import replace

    r = 0.5
    delta_m = 40.0
    dpl = to_lambda_units(derive_params(trapped_diamond_params(r_requested=r)))
    dpl = replace(
        dpl,
        delta_m=delta_m,
        Omega_p=delta_m * math.tanh(2 * r),
        Delta_m=delta_m / math.cosh(2 * r),
        lambda_eff=math.exp(r),
    )
    lay = SpaceLayout((2, 96, 3))
    det_lab = Detunings(delta_K=-dpl.Delta_m, delta_mech=dpl.delta_m, delta_NV=0.0)
    det_sq = red_detuning(dpl.Delta_m)
    Hlab = build_hamiltonian_lab(dpl, det_lab, lay)
    Hsq = build_hamiltonian_squeezed(dpl, det_sq, lay)
    U = squeeze_unitary(r, lay)
    const = dpl.delta_m * math.sinh(r) ** 2 - 0.5 * dpl.Omega_p * math.sinh(2 * r)
    mask = np.zeros((2, 96, 3), dtype=bool)
    mask[:, :25, :] = True
    m = mask.reshape(-1)
    diff = (U @ Hlab @ U.conj().T - Hsq - const * np.eye(lay.dim))[np.ix_(m, m)]
    rel = np.linalg.norm(diff) / np.linalg.norm(Hsq[np.ix_(m, m)])
    ok &= _check("squeezed-frame equivalence (low block)", rel < 1e-4, f"rel {rel:.1e}")

    print("selftest:", "all checks passed" if ok else "FAILURES present")
    return bool(ok)
