"""Walk through the parameter derivation and the squeezing enhancement.

Starts from raw experimental numbers (geometry, trap, temperatures, decay
rates), derives every coupling in the chain, and shows how the tripartite
coupling and the cooperativity respond to the squeezing parameter and to the
magnet radius.
"""

import math

from spinmagphon import derive_params, trapped_diamond_params

TWO_PI = 2 * math.pi

print("=== Operating point (trapped diamond, r = 4.5) ===")
dp = derive_params(trapped_diamond_params(r_requested=4.5))
print(f"effective mass            {dp.M:.3e} kg")
print(f"zero-point fluctuation    {dp.z_zpf * 1e12:.2f} pm")
print(f"bare coupling             lambda/2pi = {dp.lam / TWO_PI / 1e3:.2f} kHz")
print(f"exchange coupling         g0/2pi     = {dp.g0 / TWO_PI / 1e3:.1f} kHz  (g0 = {dp.g0 / dp.lam:.1f} lambda)")
print(f"enhanced coupling         lambda_eff/2pi = {dp.lambda_eff / TWO_PI / 1e6:.2f} MHz")
print(f"thermal mechanical decay  gamma_th/2pi = {dp.gamma_th / TWO_PI:.2f} Hz")
print(f"amplified mech. decay     Gamma_m/2pi  = {dp.Gamma_m / TWO_PI / 1e3:.1f} kHz")
print(f"cooperativity             C = {dp.C:.3e}")

print("\n=== Enhancement versus squeezing (radius fixed at 50 nm) ===")
print(f"{'r':>4} {'lambda_eff/lambda':>18} {'lambda_eff/g0':>14} {'C':>12}")
for r in (0.0, 1.0, 2.0, 3.0, 4.0, 5.0):
    d = derive_params(trapped_diamond_params(r_requested=r))
    print(f"{r:4.1f} {d.lambda_eff / d.lam:18.2f} {d.lambda_eff / d.g0:14.4f} {d.C:12.3e}")

print("\n=== Coupling map versus radius (r = 4.5) ===")
print(f"{'R (nm)':>7} {'lambda_eff/2pi (kHz)':>21} {'C':>12}")
for R_nm in (20, 35, 50, 80, 120, 200):
    d = derive_params(trapped_diamond_params(R=R_nm * 1e-9, r_requested=4.5))
    print(f"{R_nm:7d} {d.lambda_eff / TWO_PI / 1e3:21.1f} {d.C:12.3e}")

print("\nSmaller magnets and stronger squeezing push the system deep into the")
print("strong-coupling regime (C >> 1); the coupling falls roughly as the")
print("-5/2 power of the radius once the radius dominates the spin distance.")
