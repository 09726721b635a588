"""Genuine tripartite entanglement from the amplified coupling (decay-free).

Evolves the excited spin with both modes empty under the squeezed-frame
generator and tracks the minimum residual contangle together with the
three-tangle of the projected three-qubit state.  Without amplification the
entanglement never departs from zero; at strong squeezing the state cycles
through a three-party analogue of a Bell pair.
"""

import math
from dataclasses import replace

import numpy as np

from spinmagphon import (
    EvolutionSpec,
    build_hamiltonian_squeezed,
    derive_params,
    dominant_pure_state,
    evolve,
    min_residual_contangle,
    project_to_three_qubits,
    red_detuning,
    three_tangle_pure,
    to_lambda_units,
    trapped_diamond_params,
)
from spinmagphon.linalg import SpaceLayout
from spinmagphon.sweep import figure_detuning


def run(r, t_max=0.25, points=251):
    dpl = to_lambda_units(derive_params(trapped_diamond_params(r_requested=r)))
    dpl = replace(dpl, gamma_K=0.0, gamma_s=0.0, Gamma_m=0.0)
    layout = SpaceLayout((2, 8, 3))
    H = build_hamiltonian_squeezed(dpl, red_detuning(figure_detuning(r, "fig4")), layout)
    grid = np.linspace(0.0, t_max, points)
    spec = EvolutionSpec(H, [], layout.basis_state(1, 0, 0), grid, layout,
                         rtol=1e-9, atol=1e-11, store_states=True)
    traj = evolve(spec)
    contangle = np.array([min_residual_contangle(s, layout) for s in traj.states])
    tangle = np.empty(points)
    leak = np.empty(points)
    for i, s in enumerate(traj.states):
        psi, _ = dominant_pure_state(s)
        proj = project_to_three_qubits(psi, layout)
        leak[i] = proj.leaked_weight
        tangle[i] = three_tangle_pure(proj.amplitudes)
    return grid, contangle, tangle, leak


print("=== Peak tripartite entanglement versus squeezing ===")
print(f"{'r':>4} {'peak contangle':>15} {'peak three-tangle':>18}")
peaks = {}
for r in (0.0, 1.5, 3.0, 4.5):
    grid, contangle, tangle, leak = run(r)
    peaks[r] = (contangle.max(), tangle.max())
    print(f"{r:4.1f} {contangle.max():15.4f} {tangle.max():18.4f}")

print("\nBoth measures agree: mechanical amplification converts a dark,")
print("uncoupled mechanics into a full participant of a three-party")
print("entangled state (values approach 1, the three-qubit maximum).")

grid, contangle, tangle, leak = run(4.5, t_max=0.06, points=121)
period = math.pi / (2 * math.exp(4.5))
print(f"\n=== Time trace at r = 4.5 (entangling period ~ {period:.4f}/lambda) ===")
print(f"{'lambda*t':>9} {'contangle':>10} {'3-tangle':>9} {'leak':>8}")
for i in range(0, 121, 8):
    print(f"{grid[i]:9.4f} {contangle[i]:10.4f} {tangle[i]:9.4f} {leak[i]:8.5f}")
