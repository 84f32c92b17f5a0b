"""Smooth dyadic cutoffs, Littlewood-Paley shells and the shell-summed L^p norm.

The cutoff eta is the exact-plateau smooth step

    eta(xi) = psi0(2 - |xi|),  psi0(t) = g(t) / (g(t) + g(1-t)),  g(t) = e^{-1/t} (t>0),

so eta = 1 on [-1,1], supp eta = [-2,2], 0 <= eta <= 1, C-infinity.  The shell
bumps are phi(xi) = eta(xi) - eta(2 xi) and phi_N(xi) = phi(xi/N) for dyadic
N >= 1, giving the telescoping partition eta(2 xi) + sum_N phi_N(xi) = 1 for
xi != 0 (and at xi = 0 the low mask alone is 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import Field, SpatialGrid, _wrap, lebesgue_norm

PROFILE_NAME = "smoothstep-exp"

__all__ = [
    "PROFILE_NAME",
    "eta",
    "phi",
    "phi_shell",
    "dyadic_shells",
    "LPDecomposition",
    "decompose",
    "tilde_lp_norm",
]


def _g(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    pos = t > 0
    with np.errstate(over="ignore", under="ignore", divide="ignore"):
        out[pos] = np.exp(-1.0 / t[pos])
    return out


def eta(xi) -> np.ndarray | float:
    """Smooth even cutoff: 1 on |xi|<=1, 0 on |xi|>=2."""
    scalar = np.isscalar(xi)
    t = 2.0 - np.abs(np.asarray(xi, dtype=np.float64))
    num = _g(t)
    den = num + _g(1.0 - t)
    out = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return float(out) if scalar else out


def phi(xi) -> np.ndarray | float:
    """Dyadic bump phi = eta - eta(2 .), supported on 1/2 <= |xi| <= 2."""
    scalar = np.isscalar(xi)
    x = np.asarray(xi, dtype=np.float64)
    out = eta(x) - eta(2.0 * x)
    return float(out) if scalar else out


def phi_shell(xi, shell: int) -> np.ndarray | float:
    """phi_N(xi) = phi(xi/N), supported on N/2 <= |xi| <= 2N."""
    if shell < 1 or (shell & (shell - 1)) != 0:
        raise ValueError(f"shell must be a dyadic integer >= 1, got {shell}")
    return phi(np.asarray(xi, dtype=np.float64) / float(shell))


def dyadic_shells(grid: SpatialGrid) -> list[int]:
    """Shell indices 1, 2, 4, ..., N_max with N_max the smallest dyadic >= max |xi|."""
    n_max = 1
    while n_max < grid.max_frequency():
        n_max *= 2
    shells, n = [], 1
    while n <= n_max:
        shells.append(n)
        n *= 2
    return shells


@dataclass(frozen=True)
class LPDecomposition:
    """Low part plus dyadic shells of a field.

    low carries the eta(2 xi) mask (the exact complement of the shells, so
    low + sum of shells reconstructs the field); note P_lo f = low + shell 1.
    """

    low: Field
    shells: tuple  # of (N, Field) pairs

    def reconstruct(self) -> Field:
        total = self.low.copy_coefficients()
        for _, piece in self.shells:
            total = total + piece.coefficients
        return _wrap(self.low.grid, total)

    def shell_masses(self) -> list[tuple[int, float]]:
        """Per-shell L^2 mass, with the low part reported as shell 0."""
        rows = [(0, lebesgue_norm(self.low, 2) ** 2)]
        rows += [(n, lebesgue_norm(piece, 2) ** 2) for n, piece in self.shells]
        return rows


def decompose(f: Field) -> LPDecomposition:
    """Split f into the eta(2 xi) low part and the shells P_N f, N = 1..N_max."""
    xi = f.grid.xi
    low = _wrap(f.grid, f.coefficients * eta(2.0 * xi))
    shells = tuple(
        (n, _wrap(f.grid, f.coefficients * phi_shell(xi, n)))
        for n in dyadic_shells(f.grid)
    )
    return LPDecomposition(low=low, shells=shells)


def tilde_lp_norm(f: Field, p: int) -> float:
    """||P_lo f||_p + (sum_N ||P_N f||_p^2)^{1/2} over dyadic N >= 1."""
    if p not in (2, 4):
        raise ValueError("shell-summed norm supports p in {2, 4}")
    xi = f.grid.xi
    low = _wrap(f.grid, f.coefficients * eta(xi))
    shell_sq = 0.0
    for n in dyadic_shells(f.grid):
        piece = _wrap(f.grid, f.coefficients * phi_shell(xi, n))
        shell_sq += lebesgue_norm(piece, p) ** 2
    return lebesgue_norm(low, p) + float(np.sqrt(shell_sq))
