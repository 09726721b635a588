"""Physical constants and the constants-override file format.

All values are SI. ``DEFAULT_CONSTANTS`` is the single source of truth for
every physical constant used by the parameter-derivation code; an override
file (flat ``key = value`` text, ``#`` comments allowed) can replace any
entry so that runs are reproducible bit-exactly.
"""

from __future__ import annotations

import hashlib
import math


DEFAULT_CONSTANTS: dict[str, float] = {
    "hbar": 1.0545718e-34,          # J s
    "k_B": 1.380649e-23,            # J/K
    "mu_0": 4.0e-7 * math.pi,       # T m / A
    "mu_B": 9.274e-24,              # J / T
    "g_e": 2.0028,                  # NV Lande factor
    "gamma_abs": 2.0 * math.pi * 28.0e9,  # |gyromagnetic ratio|, rad/s/T
    "M_s_yig": 1.96e5,              # YIG saturation magnetization, A/m
    "rho_diamond": 3500.0,          # kg/m^3
    "rho_yig": 5170.0,              # kg/m^3
}


class ConstantsError(ValueError):
    """Malformed or unknown entry in a constants-override file."""


def load_constants(path: str | None = None) -> dict[str, float]:
    """Return the constants table, optionally overridden from a file.

    The file format is one ``key = value`` pair per line; blank lines and
    ``#`` comments are ignored.  Unknown keys are rejected.
    """
    table = dict(DEFAULT_CONSTANTS)
    if path is None:
        return table
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConstantsError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in table:
                raise ConstantsError(f"{path}:{lineno}: unknown constant {key!r}")
            try:
                table[key] = float(val.strip())
            except ValueError as exc:
                raise ConstantsError(f"{path}:{lineno}: bad float {val.strip()!r}") from exc
    return table


def constants_hash(table: dict[str, float]) -> str:
    """SHA-256 of the constants table (order-independent), for run metadata."""
    payload = ";".join(f"{k}={table[k]!r}" for k in sorted(table))
    return hashlib.sha256(payload.encode("ascii")).hexdigest()
