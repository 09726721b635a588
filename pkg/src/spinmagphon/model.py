"""Experiment parameters, derived couplings, and Hamiltonian/dissipator builders.

Parameter derivation works in SI angular frequencies (rad/s).  Dynamics and
entanglement runs use coupling-normalized units (every rate divided by the
bare tripartite coupling, time measured in its inverse);
:func:`to_lambda_units` is the single conversion between the two regimes.

Spin basis ordering is ``(g, e)``: ``sigma_z = diag(-1, +1)``,
``sigma_minus = |g><e|``, so the excited level carries composite indices
``layout.index(1, m, k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import DEFAULT_CONSTANTS
from .linalg import (
    SpaceLayout,
    annihilation,
    embed,
    matrix_exp,
    number_operator,
    require_hermitian,
)


class ParameterError(ValueError):
    """Invalid or inconsistent physical parameters."""


SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.conj().T

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysicalParams:
    """Raw experimental inputs (SI units, angular frequencies in rad/s)."""

    R: float = 50e-9            # micromagnet sphere radius, m
    R_s: float = 10e-9          # trapped diamond particle radius, m
    d: float = 5e-9             # surface-to-surface spacing, m
    rho_diamond: float = 3500.0
    rho_yig: float = 5170.0
    M_s: float = 1.96e5         # saturation magnetization, A/m
    gamma_gyro: float = TWO_PI * 28.0e9   # |gyromagnetic ratio|, rad/s/T
    g_e: float = 2.0028
    omega_m: float = TWO_PI * 1e3         # mechanical frequency
    omega_p: float = TWO_PI * 200e6       # drive half-frequency reference
    U_T: float | None = None    # trap modulation voltage amplitude, V
    d_T: float = 100e-6         # characteristic trap dimension, m
    q: float | None = None      # particle charge, C
    q_over_M: float | None = None         # charge-to-mass ratio, C/kg
    Q: float = 1e8              # mechanical quality factor
    T: float = 10e-3            # temperature, K
    gamma_K: float = TWO_PI * 1e6         # magnon (Kittel) decay
    gamma_s: float = TWO_PI * 1e3         # spin dephasing
    delta_NV: float = 0.0
    delta_K: float = 0.0
    delta_m: float = TWO_PI * 200e6       # mechanical drive detuning
    r_requested: float | None = None      # squeezing parameter, alternative to U_T
    M_override: float | None = None       # effective mass for non-default platforms, kg

    @property
    def r0(self) -> float:
        """Equilibrium spin-to-magnet distance d + R + R_s."""
        return self.d + self.R + self.R_s

    def validate(self) -> None:
        positive = {
            "R": self.R, "R_s": self.R_s, "d": self.d,
            "rho_diamond": self.rho_diamond, "rho_yig": self.rho_yig,
            "M_s": self.M_s, "gamma_gyro": self.gamma_gyro, "g_e": self.g_e,
            "omega_m": self.omega_m, "d_T": self.d_T, "Q": self.Q, "T": self.T,
            "delta_m": self.delta_m,
        }
        for name, value in positive.items():
            if not value > 0.0:
                raise ParameterError(f"{name} must be strictly positive, got {value}")
        if self.gamma_K < 0.0 or self.gamma_s < 0.0:
            raise ParameterError("decay rates must be nonnegative")
        if self.r_requested is not None and not 0.0 <= self.r_requested <= 6.0:
            raise ParameterError(f"r_requested must lie in [0, 6], got {self.r_requested}")
        if not self.r0 > self.R:
            raise ParameterError("r0 = d + R + R_s must exceed R (spin outside the sphere)")
        if (self.U_T is None) == (self.r_requested is None):
            raise ParameterError("exactly one of U_T and r_requested must be set")
        if self.U_T is not None and self.q is None and self.q_over_M is None:
            raise ParameterError("the U_T route requires q or q_over_M")


@dataclass(frozen=True)
class DerivedParams:
    """Quantities computed from :class:`PhysicalParams` (SI, rad/s)."""

    M: float            # effective mass, kg
    V: float            # magnet sphere volume, m^3
    r0: float           # equilibrium distance, m
    z_zpf: float        # mechanical zero-point fluctuation, m
    lam: float          # bare tripartite coupling
    g0: float           # spin-magnon coupling
    Omega_p: float      # parametric drive amplitude
    r: float            # squeezing parameter
    delta_m: float      # mechanical detuning (pre-squeezing)
    Delta_m: float      # squeezed-frame mechanical detuning
    lambda_eff: float   # enhanced tripartite coupling
    gamma_th: float     # thermal mechanical decay
    Gamma_m: float      # effective mechanical decay
    gamma_K: float
    gamma_s: float
    C: float            # tripartite cooperativity


def derive_params(p: PhysicalParams, constants: dict[str, float] | None = None) -> DerivedParams:
    """Populate every derived quantity from a validated parameter set.

    The magnon-mode volume entering the coupling is ``4 pi R^3`` (three times
    the geometric sphere volume); with the constants table in
    :mod:`spinmagphon.constants` this reproduces the reference operating
    point (enhanced coupling ~2pi x 1.7 MHz at squeezing 4.5, cooperativity
    ~1e5) together with ``g0`` close to 30x the bare coupling.
    """
    p.validate()
    c = dict(DEFAULT_CONSTANTS) if constants is None else dict(constants)
    hbar, k_B = c["hbar"], c["k_B"]

    M = p.M_override if p.M_override is not None else (4.0 / 3.0) * math.pi * p.R_s**3 * p.rho_diamond
    V = (4.0 / 3.0) * math.pi * p.R**3
    mode_volume = 3.0 * V
    z_zpf = math.sqrt(hbar / (2.0 * M * p.omega_m))
    r0 = p.r0

    prefactor = 3.0 * c["g_e"] * c["mu_0"] * c["mu_B"] / (8.0 * math.pi * r0**4)
    lam = prefactor * math.sqrt(c["gamma_abs"] * c["M_s_yig"] * mode_volume / (M * p.omega_m))
    g0 = r0 * lam / (3.0 * z_zpf)

    if p.r_requested is not None:
        r = p.r_requested
        Omega_p = p.delta_m * math.tanh(2.0 * r)
    else:
        q = p.q if p.q is not None else p.q_over_M * M
        Omega_p = 2.0 * q * p.U_T * z_zpf**2 / (hbar * p.d_T**2)
        if not 0.0 <= Omega_p < p.delta_m:
            raise ParameterError(
                f"no squeezing solution: Omega_p = {Omega_p:.6g} must lie in [0, delta_m"
                f" = {p.delta_m:.6g})"
            )
        r = 0.5 * math.atanh(Omega_p / p.delta_m)

    Delta_m = p.delta_m / math.cosh(2.0 * r)
    lambda_eff = lam * math.exp(r)
    gamma_th = k_B * p.T / (hbar * p.Q)
    Gamma_m = math.exp(2.0 * r) * gamma_th
    C = lambda_eff**3 / (Gamma_m * p.gamma_K * p.gamma_s) if p.gamma_K > 0 and p.gamma_s > 0 else math.inf

    return DerivedParams(
        M=M, V=V, r0=r0, z_zpf=z_zpf, lam=lam, g0=g0, Omega_p=Omega_p, r=r,
        delta_m=p.delta_m, Delta_m=Delta_m, lambda_eff=lambda_eff,
        gamma_th=gamma_th, Gamma_m=Gamma_m, gamma_K=p.gamma_K, gamma_s=p.gamma_s, C=C,
    )


def to_lambda_units(dp: DerivedParams) -> DerivedParams:
    """Rescale every rate by the bare tripartite coupling (lam -> 1).

    Times in the rescaled system are measured in units of the inverse bare
    coupling.  Lengths, masses and the squeezing parameter are unchanged.
    """
    s = 1.0 / dp.lam
    return replace(
        dp,
        lam=1.0,
        g0=dp.g0 * s,
        Omega_p=dp.Omega_p * s,
        delta_m=dp.delta_m * s,
        Delta_m=dp.Delta_m * s,
        lambda_eff=dp.lambda_eff * s,
        gamma_th=dp.gamma_th * s,
        Gamma_m=dp.Gamma_m * s,
        gamma_K=dp.gamma_K * s,
        gamma_s=dp.gamma_s * s,
    )


# --- platform presets -------------------------------------------------------

def trapped_diamond_params(**overrides) -> PhysicalParams:
    """Diamond nanoparticle in a Paul trap near a magnet sphere (default platform)."""
    base = dict(r_requested=4.5)
    base.update(overrides)
    return PhysicalParams(**base)


def cantilever_params(**overrides) -> PhysicalParams:
    """Diamond cantilever platform: effective mass and frequency replaced.

    Representative cantilever numbers (effective mass 1e-16 kg, mechanical
    frequency 2pi x 1 MHz); only M and omega_m differ from the default.
    """
    base = dict(M_override=1e-16, omega_m=TWO_PI * 1e6, r_requested=4.5)
    base.update(overrides)
    return PhysicalParams(**base)


def levitated_yig_params(**overrides) -> PhysicalParams:
    """Levitated magnet-sphere platform: the magnet itself is the oscillator."""
    p = PhysicalParams(**overrides) if overrides else PhysicalParams(r_requested=4.5)
    M = (4.0 / 3.0) * math.pi * p.R**3 * p.rho_yig
    base = dict(M_override=M, r_requested=4.5)
    base.update(overrides)
    return PhysicalParams(**base)


# --- detuning configurations ------------------------------------------------

@dataclass(frozen=True)
class Detunings:
    """Rotating-frame detunings passed to the Hamiltonian builders.

    ``delta_mech`` multiplies the phonon number operator: it is the bare
    mechanical detuning for the lab-frame builder and the squeezed-frame
    mechanical detuning for the squeezed builder.
    """

    delta_K: float
    delta_mech: float
    delta_NV: float = 0.0


def red_detuning(delta_mech: float, delta_NV: float = 0.0) -> Detunings:
    """Magnon line below the spin line by the mechanical detuning.

    Makes the joint magnon-and-phonon excitation channel from the excited
    spin resonant (``delta_K = delta_NV - delta_mech``).
    """
    return Detunings(delta_K=delta_NV - delta_mech, delta_mech=delta_mech, delta_NV=delta_NV)


def blue_detuning(delta_mech: float, delta_NV: float = 0.0) -> Detunings:
    """Magnon line above the spin line (``delta_K = delta_NV + delta_mech``)."""
    return Detunings(delta_K=delta_NV + delta_mech, delta_mech=delta_mech, delta_NV=delta_NV)


# --- operator builders ------------------------------------------------------

def _mode_ops(layout: SpaceLayout):
    spin = layout.slot("spin")
    phonon = layout.slot("phonon")
    magnon = layout.slot("magnon")
    if layout.dims[spin] != 2:
        raise ParameterError("spin subsystem must be two-level")
    a = embed(annihilation(layout.dims[magnon]), magnon, layout)
    b = embed(annihilation(layout.dims[phonon]), phonon, layout)
    sz = embed(SIGMA_Z, spin, layout)
    sm = embed(SIGMA_MINUS, spin, layout)
    return a, b, sz, sm


def spin_magnon_exchange(layout: SpaceLayout) -> np.ndarray:
    """The exchange operator ``a^dag sigma- + a sigma+`` on the full space."""
    a, _, _, sm = _mode_ops(layout)
    return a.conj().T @ sm + a @ sm.conj().T


def excitation_number(layout: SpaceLayout) -> np.ndarray:
    """Conserved excitation ``a^dag a + sigma+ sigma-``."""
    a, _, _, sm = _mode_ops(layout)
    return a.conj().T @ a + sm.conj().T @ sm


def occupation_operators(layout: SpaceLayout) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(spin excitation, phonon number, magnon number) projector/number ops."""
    spin = layout.slot("spin")
    phonon = layout.slot("phonon")
    magnon = layout.slot("magnon")
    n_spin = embed(np.diag([0.0, 1.0]).astype(complex), spin, layout)
    n_b = embed(number_operator(layout.dims[phonon]), phonon, layout)
    n_a = embed(number_operator(layout.dims[magnon]), magnon, layout)
    return n_spin, n_b, n_a


def build_hamiltonian_lab(dp: DerivedParams, det: Detunings, layout: SpaceLayout) -> np.ndarray:
    """Rotating-frame Hamiltonian with the explicit two-phonon drive."""
    a, b, sz, sm = _mode_ops(layout)
    X = a.conj().T @ sm + a @ sm.conj().T
    H = (
        det.delta_K * (a.conj().T @ a)
        + det.delta_mech * (b.conj().T @ b)
        + 0.5 * det.delta_NV * sz
        - 0.5 * dp.Omega_p * (b @ b + b.conj().T @ b.conj().T)
        + dp.lam * (b + b.conj().T) @ X
        + dp.g0 * X
    )
    return require_hermitian(H, rtol=1e-12, name="H_lab")


def build_hamiltonian_squeezed(dp: DerivedParams, det: Detunings, layout: SpaceLayout) -> np.ndarray:
    """Squeezed-frame Hamiltonian with the enhanced tripartite coupling."""
    a, b, sz, sm = _mode_ops(layout)
    X = a.conj().T @ sm + a @ sm.conj().T
    H = (
        det.delta_K * (a.conj().T @ a)
        + det.delta_mech * (b.conj().T @ b)
        + 0.5 * det.delta_NV * sz
        + dp.lambda_eff * (b + b.conj().T) @ X
        + dp.g0 * X
    )
    return require_hermitian(H, rtol=1e-12, name="H_squeezed")


def squeeze_unitary(r: float, layout: SpaceLayout) -> np.ndarray:
    """Unitary ``exp[r (b^2 - b^dag^2) / 2]`` acting on the phonon factor only.

    The phonon cutoff must dominate the squeezing spread: matrix elements of
    the transformed operators are reliable only on basis states with
    occupation well below ``N_b e^{-2|r|}``.
    """
    phonon = layout.slot("phonon")
    b = annihilation(layout.dims[phonon])
    gen = 0.5 * r * (b @ b - b.conj().T @ b.conj().T)
    return embed(matrix_exp(gen), phonon, layout)


def collapse_operators(dp: DerivedParams, frame: str, layout: SpaceLayout) -> list[np.ndarray]:
    """Lindblad collapse operators for the magnon, spin-dephasing and phonon channels.

    Squeezed frame uses the amplified phonon decay; the lab frame uses the
    bare thermal rate (lab-frame runs exist for frame-equivalence checks and
    default to decay-free).  Zero-rate channels are omitted.
    """
    if frame not in ("lab", "squeezed"):
        raise ParameterError(f"frame must be 'lab' or 'squeezed', got {frame!r}")
    for name, rate in (("gamma_K", dp.gamma_K), ("gamma_s", dp.gamma_s),
                       ("gamma_th", dp.gamma_th), ("Gamma_m", dp.Gamma_m)):
        if rate < 0.0:
            raise ParameterError(f"{name} must be nonnegative, got {rate}")
    a, b, sz, _ = _mode_ops(layout)
    mech_rate = dp.Gamma_m if frame == "squeezed" else dp.gamma_th
    ops = []
    if dp.gamma_K > 0.0:
        ops.append(math.sqrt(dp.gamma_K) * a)
    if dp.gamma_s > 0.0:
        ops.append(math.sqrt(0.5 * dp.gamma_s) * sz)
    if mech_rate > 0.0:
        ops.append(math.sqrt(mech_rate) * b)
    return ops
