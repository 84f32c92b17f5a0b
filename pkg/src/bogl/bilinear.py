"""Bilinear operator, trilinear pairings, resonance identity and region split.

Everything here lives on the unit-scale lattice (integer frequencies) with a
2*pi time window (integer tau), so the modulation algebra

    sigma = tau + |xi| xi,   sigma1 + sigma2 - sigma = -2 xi xi2
    on  D = { xi >= 1, xi1 >= 1, xi2 = xi - xi1 <= 0 }

is carried out in exact integer arithmetic.  For a dyadic shell pair
(N, N2) the domain splits into

    A: |sigma|  >= N N2 / 6
    B: |sigma1| >= N N2 / 6,  |sigma| < N N2 / 6
    C: |sigma|, |sigma1| < N N2 / 6,  |sigma2| >= N N2 / 6

(ties belong upward: >= goes to the earlier region); coverage inside the
shells follows from the resonance identity since 2|xi xi2| >= N N2 / 2.

The bilinear operator d/dx P_+( dx^{-1} w P_- du/dx ) uses the sharp
positive/negative projections: on the integer lattice the positive
projection equals the xi >= 1 restriction defining D, which is what makes
the duality identity  <sigma-weighted h, B(w,u)> = i * I(h,w,u)  exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .bourgain import (
    SpaceTimeField,
    SpaceTimeGrid,
    spacetime_lebesgue,
    x_norm,
    z_tilde_norm,
    random_spacetime_field,
)
from .lp import phi_shell
from .reporting import ProbeReport

__all__ = [
    "FrequencyTuple",
    "RegionTag",
    "classify",
    "resonance_defect",
    "region_scan",
    "GridTooLargeError",
    "bilinear_core",
    "bilinear_B",
    "trilinear_I",
    "trilinear_I_oracle",
    "duality_pair",
    "region_pairing",
    "EstimateProbeConfig",
    "estimate_probe",
    "bracket_convolution_check",
    "bracket_convolution_integral",
    "decay_exponent",
]


class RegionTag(Enum):
    A = "A"
    B = "B"
    C = "C"
    OUTSIDE_D = "outside_D"


@dataclass(frozen=True)
class FrequencyTuple:
    """Integer lattice tuple (xi, xi1, tau, tau1) with derived modulations."""

    xi: int
    xi1: int
    tau: int
    tau1: int

    @property
    def xi2(self) -> int:
        return self.xi - self.xi1

    @property
    def tau2(self) -> int:
        return self.tau - self.tau1

    @property
    def sigma(self) -> int:
        return self.tau + abs(self.xi) * self.xi

    @property
    def sigma1(self) -> int:
        return self.tau1 + abs(self.xi1) * self.xi1

    @property
    def sigma2(self) -> int:
        return self.tau2 + abs(self.xi2) * self.xi2

    @property
    def in_domain(self) -> bool:
        return self.xi >= 1 and self.xi1 >= 1 and self.xi2 <= 0


def resonance_defect(t: FrequencyTuple) -> int:
    """sigma1 + sigma2 - sigma + 2 xi xi2; exactly zero on D."""
    return t.sigma1 + t.sigma2 - t.sigma + 2 * t.xi * t.xi2


def _shell_contains(shell: int, mag: int) -> bool:
    return shell >= 1 and 2 * mag >= shell and mag <= 2 * shell


def classify(t: FrequencyTuple, shell: int, shell2: int) -> RegionTag:
    """Region of the tuple for the shell pair (N, N2); exact rational thresholds."""
    if not t.in_domain:
        raise ValueError("tuple lies outside the domain D")
    if not _shell_contains(shell, abs(t.xi)):
        raise ValueError(f"|xi| = {abs(t.xi)} is not in shell {shell}")
    if abs(t.xi2) < 1 or not _shell_contains(shell2, abs(t.xi2)):
        raise ValueError(f"|xi2| = {abs(t.xi2)} is not in shell {shell2}")
    threshold = Fraction(shell * shell2, 6)
    if abs(t.sigma) >= threshold:
        return RegionTag.A
    if abs(t.sigma1) >= threshold:
        return RegionTag.B
    if abs(t.sigma2) >= threshold:
        return RegionTag.C
    raise AssertionError("uncovered tuple: contradicts the resonance identity")


def region_scan(k_max: int = 32, tau_half: int = 16) -> dict:
    """Exhaustive integer scan of the resonance identity and region coverage.

    Scans xi, xi1 in [1, k_max] and tau, tau1 in [-tau_half, tau_half),
    restricted to D with |xi2| >= 1; every tuple is classified for every
    admissible shell pair, counting gaps and overlaps (both must be zero).
    """
    xi = np.arange(1, k_max + 1, dtype=np.int64)
    tau = np.arange(-tau_half, tau_half, dtype=np.int64)
    xiv = xi[:, None, None, None]
    tauv = tau[None, :, None, None]
    xi1v = xi[None, None, :, None]
    tau1v = tau[None, None, None, :]
    xi2 = xiv - xi1v
    tau2 = tauv - tau1v
    sigma = tauv + np.abs(xiv) * xiv
    sigma1 = tau1v + np.abs(xi1v) * xi1v
    sigma2 = tau2 + np.abs(xi2) * xi2
    in_d = xi2 <= -1  # xi, xi1 >= 1 by construction; drop the xi2 = 0 line

    defect = sigma1 + sigma2 - sigma + 2 * xiv * xi2
    defect_in_d = defect[np.broadcast_to(in_d, defect.shape)]
    max_defect = int(np.max(np.abs(defect_in_d))) if defect_in_d.size else 0

    gaps = 0
    overlaps = 0
    classified = 0
    pair_count = 0
    for shell in _shells_range(k_max):
        m_xi = _shell_member_mask(xi, shell)[:, None, None, None]
        for shell2 in _shells_range(k_max):
            m_xi2 = _shell_member_int(-xi2, shell2)
            member = in_d & m_xi & m_xi2
            if not member.any():
                continue
            pair_count += 1
            thr = shell * shell2
            in_a = 6 * np.abs(sigma) >= thr
            in_b = (6 * np.abs(sigma1) >= thr) & ~in_a
            in_c = (6 * np.abs(sigma2) >= thr) & ~in_a & (6 * np.abs(sigma1) < thr)
            count = (
                in_a.astype(np.int64) + in_b.astype(np.int64) + in_c.astype(np.int64)
            )
            full = np.broadcast_shapes(count.shape, member.shape, defect.shape)
            count = np.broadcast_to(count, full)[np.broadcast_to(member, full)]
            gaps += int(np.sum(count == 0))
            overlaps += int(np.sum(count > 1))
            classified += int(count.size)
    return {
        "tuples_in_domain": int(np.sum(np.broadcast_to(in_d, defect.shape))),
        "max_resonance_defect": max_defect,
        "classified": classified,
        "gaps": gaps,
        "overlaps": overlaps,
        "shell_pairs": pair_count,
    }


def _shells_range(k_max: int) -> list[int]:
    out, n = [], 1
    while n <= 2 * k_max:
        out.append(n)
        n *= 2
    return out


def _shell_member_mask(vals: np.ndarray, shell: int) -> np.ndarray:
    return (2 * vals >= shell) & (vals <= 2 * shell)


def _shell_member_int(vals: np.ndarray, shell: int) -> np.ndarray:
    return (2 * vals >= shell) & (vals <= 2 * shell) & (vals >= 1)


class GridTooLargeError(ValueError):
    pass


# ----------------------------------------------------------------------------
# lattice plumbing: centered coefficient tables on the integer lattice
# ----------------------------------------------------------------------------


def _require_integer_lattice(grid: SpaceTimeGrid) -> None:
    if grid.spatial.period_scale != 1.0:
        raise ValueError("the resonance machinery requires the unit-scale lattice")
    if abs(grid.t_span - 2.0 * np.pi) > 1e-12:
        raise ValueError("the resonance machinery requires a 2*pi time window")


def _centered(field: SpaceTimeField) -> np.ndarray:
    """Coefficients reindexed to [tau = -M/2..M/2-1, xi = -N/2..N/2-1]."""
    return np.fft.fftshift(field.coefficients)


def _lattice_values(grid: SpaceTimeGrid) -> tuple[np.ndarray, np.ndarray]:
    m, n = grid.num_times, grid.spatial.n
    return (
        np.arange(-m // 2, m // 2, dtype=np.int64),
        np.arange(-n // 2, n // 2, dtype=np.int64),
    )


# ----------------------------------------------------------------------------
# bilinear operator and trilinear pairings
# ----------------------------------------------------------------------------


def _padded_product(a: SpaceTimeField, b: SpaceTimeField, pad_x: int = 4,
                    pad_t: int = 2) -> np.ndarray:
    """Exact coefficient convolution of two fields, truncated to the lattice."""
    grid = a.grid
    m, n = grid.num_times, grid.spatial.n
    mp, np_ = m * pad_t, n * pad_x

    def embed(c):
        out = np.zeros((mp, np_), dtype=np.complex128)
        hm, hn = m // 2, n // 2
        out[:hm, :hn] = c[:hm, :hn]
        out[:hm, np_ - hn :] = c[:hm, n - hn :]
        out[mp - hm :, :hn] = c[m - hm :, :hn]
        out[mp - hm :, np_ - hn :] = c[m - hm :, n - hn :]
        return out

    pa, pb = embed(a.coefficients), embed(b.coefficients)
    prod = np.fft.fft2(np.fft.ifft2(pa) * np.fft.ifft2(pb)) * (mp * np_)
    hm, hn = m // 2, n // 2
    out = np.zeros((m, n), dtype=np.complex128)
    out[:hm, :hn] = prod[:hm, :hn]
    out[:hm, n - hn :] = prod[:hm, np_ - hn :]
    out[m - hm :, :hn] = prod[mp - hm :, :hn]
    out[m - hm :, n - hn :] = prod[mp - hm :, np_ - hn :]
    return out


def _check_positive_support(w: SpaceTimeField) -> None:
    xi = w.grid.spatial.xi
    bad = np.abs(w.coefficients[:, xi < 1.0 - 1e-12])
    scale = max(float(np.max(np.abs(w.coefficients))), 1e-300)
    if bad.size and float(np.max(bad)) > 1e-12 * max(scale, 1.0):
        raise ValueError("w must be supported on frequencies xi >= 1")


def bilinear_core(
    w: SpaceTimeField,
    u: SpaceTimeField,
    outer_dx: bool = True,
    inverse_dx_on_w: bool = True,
) -> SpaceTimeField:
    """(d/dx) P_+( [dx^{-1}] w  P_- du/dx ), sharp sign projections.

    With both flags on this is the critical bilinear operator B(w, u);
    with both off it is P_+( w P_- du/dx ) (the half-weight/periodic form).
    """
    _check_positive_support(w)
    grid = w.grid
    if u.grid != grid:
        raise ValueError("fields live on different space-time grids")
    xi = grid.spatial.xi
    wc = w.coefficients.copy()
    wc[:, xi < 1.0 - 1e-12] = 0.0
    if inverse_dx_on_w:
        pos = xi >= 1.0 - 1e-12
        wc[:, pos] = wc[:, pos] / (1j * xi[pos])
    uc = u.coefficients * ((xi < 0) * (1j * xi))[None, :]
    prod = _padded_product(SpaceTimeField(grid, wc), SpaceTimeField(grid, uc))
    prod *= (xi > 0)[None, :]
    if outer_dx:
        prod *= (1j * xi)[None, :]
    return SpaceTimeField(grid, prod)


def bilinear_B(w: SpaceTimeField, u: SpaceTimeField) -> SpaceTimeField:
    """The critical operator d/dx P_+( dx^{-1} w P_- du/dx )."""
    return bilinear_core(w, u, outer_dx=True, inverse_dx_on_w=True)


def _bracket_int(v: np.ndarray) -> np.ndarray:
    return 1.0 + np.abs(v.astype(np.float64))


def trilinear_I(h: SpaceTimeField, w: SpaceTimeField, u: SpaceTimeField) -> complex:
    """I = sum over D of xi <sigma>^{-1/2} h_hat * xi1^{-1} w_hat * xi2 u_hat.

    Fast path: the (xi1, tau1) sum is an exact padded convolution; the
    restriction to D comes from the sharp masks (xi >= 1 on h, xi1 >= 1 on
    w, xi2 <= 0 on u along with the explicit xi2 factor).
    """
    grid = h.grid
    _require_integer_lattice(grid)
    xi = grid.spatial.xi
    wc = w.coefficients.copy()
    wc[:, xi < 1.0 - 1e-12] = 0.0
    pos = xi >= 1.0 - 1e-12
    wc[:, pos] = wc[:, pos] / xi[pos]
    uc = u.coefficients * ((xi <= 0) * xi)[None, :]
    conv = _padded_product(SpaceTimeField(grid, wc), SpaceTimeField(grid, uc))
    hw = h.coefficients * (xi * (xi >= 1.0 - 1e-12))[None, :] / np.sqrt(
        _bracket_int(grid.sigma)
    )
    return complex(np.sum(hw * conv))


def trilinear_I_oracle(
    h: SpaceTimeField, w: SpaceTimeField, u: SpaceTimeField, limit: int = 32
) -> complex:
    """Direct quadruple sum over D; refuses grids beyond the oracle limit."""
    grid = h.grid
    _require_integer_lattice(grid)
    m, n = grid.num_times, grid.spatial.n
    if m > limit or n > limit:
        raise GridTooLargeError(
            f"oracle limited to {limit}x{limit} grids, got {n}x{m}"
        )
    taus, xis = _lattice_values(grid)
    hc, wc, uc = _centered(h), _centered(w), _centered(u)
    t_off, x_off = m // 2, n // 2
    total = 0.0 + 0.0j
    for ki, k in enumerate(xis):
        if k < 1:
            continue
        for k1i, k1 in enumerate(xis):
            if k1 < 1:
                continue
            k2 = k - k1
            if k2 > 0 or k2 < xis[0]:
                continue
            for mi, tau_ in enumerate(taus):
                sigma = tau_ + abs(k) * k
                hval = hc[mi, ki] * k / np.sqrt(1.0 + abs(sigma))
                if hval == 0:
                    continue
                for m1i, tau1 in enumerate(taus):
                    tau2 = tau_ - tau1
                    if tau2 < taus[0] or tau2 > taus[-1]:
                        continue
                    total += (
                        hval
                        * wc[m1i, k1i] / k1
                        * k2 * uc[tau2 + t_off, k2 + x_off]
                    )
    return complex(total)


def duality_pair(h: SpaceTimeField, bfield: SpaceTimeField) -> complex:
    """<h, v> with the <sigma>^{-1/2} weight on h: sum sigma-weighted h_hat v_hat."""
    grid = h.grid
    weight = 1.0 / np.sqrt(_bracket_int(grid.sigma))
    return complex(np.sum(h.coefficients * weight * bfield.coefficients))


# ----------------------------------------------------------------------------
# region-decomposed pairings
# ----------------------------------------------------------------------------

_REGION_CACHE: dict = {}


def _region_tables(grid: SpaceTimeGrid):
    """Per-tuple region weights W_A/W_B/W_C on the (xi, tau, xi1, tau1) lattice.

    Weights are sums over admissible shell pairs of phi_N(|xi|) phi_N2(|xi2|)
    times the exact-integer region indicator; they add to one wherever
    xi >= 1, xi1 >= 1, xi2 <= -1.
    """
    key = (grid.spatial.n, grid.num_times)
    if key in _REGION_CACHE:
        return _REGION_CACHE[key]
    m, n = grid.num_times, grid.spatial.n
    k_max = n // 2 - 1
    ks = np.arange(1, k_max + 1, dtype=np.int64)
    taus = np.arange(-m // 2, m // 2, dtype=np.int64)
    xiv = ks[:, None, None, None]
    tauv = taus[None, :, None, None]
    xi1v = ks[None, None, :, None]
    tau1v = taus[None, None, None, :]
    xi2 = xiv - xi1v
    tau2 = tauv - tau1v
    sigma = tauv + xiv * xiv
    sigma1 = tau1v + xi1v * xi1v
    sigma2 = tau2 - xi2 * xi2  # xi2 <= 0 on D
    shape = np.broadcast_shapes(sigma.shape, sigma1.shape, sigma2.shape)
    wa = np.zeros(shape)
    wb = np.zeros(shape)
    wc_ = np.zeros(shape)
    mag2 = -xi2  # |xi2| where xi2 <= 0
    for shell in _shells_range(k_max):
        phi_xi = np.asarray(phi_shell(ks.astype(float), shell))[:, None, None, None]
        if not np.any(phi_xi > 0):
            continue
        for shell2 in _shells_range(k_max):
            phi_xi2 = phi_shell(np.maximum(mag2, 0).astype(float), shell2)
            phi_xi2 = np.where(mag2 >= 1, phi_xi2, 0.0)
            weight = phi_xi * phi_xi2
            if not np.any(weight > 0):
                continue
            thr = shell * shell2
            in_a = 6 * np.abs(sigma) >= thr
            in_b = (6 * np.abs(sigma1) >= thr) & ~in_a
            in_c = (
                (6 * np.abs(sigma2) >= thr)
                & (6 * np.abs(sigma) < thr)
                & (6 * np.abs(sigma1) < thr)
            )
            wa += weight * in_a
            wb += weight * in_b
            wc_ += weight * in_c
    tables = {
        "wa": wa,
        "wb": wb,
        "wc": wc_,
        "ks": ks,
        "taus": taus,
        "mask_d": np.broadcast_to(xi2 <= -1, shape),
    }
    _REGION_CACHE[key] = tables
    return tables


def _tuple_integrand(
    h_factor: np.ndarray, w_factor: np.ndarray, u_table: np.ndarray, grid: SpaceTimeGrid
) -> np.ndarray:
    """4-D integrand H(xi,tau) W(xi1,tau1) U(xi2,tau2) via table lookup."""
    m, n = grid.num_times, grid.spatial.n
    k_max = n // 2 - 1
    ks = np.arange(1, k_max + 1)
    taus = np.arange(-m // 2, m // 2)
    xi2_idx = (ks[:, None] - ks[None, :]) + (k_max - 1)  # xi - xi1 + offset
    tau2_idx = (taus[:, None] - taus[None, :]) + (m - 1)
    lookup = u_table[np.ix_(xi2_idx.ravel(), tau2_idx.ravel())].reshape(
        k_max, k_max, m, m
    )
    # reorder to (xi, tau, xi1, tau1)
    lookup = np.transpose(lookup, (0, 2, 1, 3))
    return (
        h_factor[:, :, None, None]
        * w_factor[None, None, :, :]
        * lookup
    )


def _u_lookup_table(grid: SpaceTimeGrid, u: SpaceTimeField) -> np.ndarray:
    """Table of xi2 * u_hat(xi2, tau2) over xi2 in [-(K-1), K-1], tau2 in
    [-(M-1), M-1], zero outside the lattice or for xi2 > 0."""
    m, n = grid.num_times, grid.spatial.n
    k_max = n // 2 - 1
    uc = _centered(u)  # [tau + M/2, xi + N/2]
    table = np.zeros((2 * k_max - 1, 2 * m - 1), dtype=np.complex128)
    for i, k2 in enumerate(range(-(k_max - 1), k_max)):
        if k2 > 0:
            continue
        col = uc[:, k2 + n // 2] * k2
        table[i, (m // 2) - 1 : (m // 2) - 1 + m] = col
    return table


def region_pairing(
    h: SpaceTimeField,
    w: SpaceTimeField,
    u: SpaceTimeField,
    form: str = "I",
) -> dict:
    """Total pairing over D plus its A/B/C region parts (they sum exactly).

    form "I": integrand xi <sigma>^{-1/2} h_hat xi1^{-1} w_hat xi2 u_hat.
    form "J": integrand xi <sigma>^{-1} (sum_N phi_N^2)(xi) g_hat ... with the
    witness family g_N = phi_N g_hat realizing the shell-dual pairing.
    """
    grid = h.grid
    _require_integer_lattice(grid)
    tables = _region_tables(grid)
    ks, taus = tables["ks"], tables["taus"]
    m, n = grid.num_times, grid.spatial.n
    hc = _centered(h)
    wcen = _centered(w)
    sigma_kt = taus[:, None] + (ks * ks)[None, :]  # (tau, xi) for xi >= 1
    hvals = hc[:, ks + n // 2].T  # (xi, tau)
    if form == "I":
        h_factor = hvals * ks[:, None] / np.sqrt(1.0 + np.abs(sigma_kt.T))
    elif form == "J":
        shell_sq = np.zeros(len(ks))
        for shell in _shells_range(n // 2 - 1):
            shell_sq += np.asarray(phi_shell(ks.astype(float), shell)) ** 2
        h_factor = (
            hvals * (ks * shell_sq)[:, None] / (1.0 + np.abs(sigma_kt.T))
        )
    else:
        raise ValueError("form must be 'I' or 'J'")
    w_factor = wcen[:, ks + n // 2].T / ks[:, None]  # (xi1, tau1)
    u_table = _u_lookup_table(grid, u)
    integrand = _tuple_integrand(h_factor, w_factor, u_table, grid)
    total = complex(np.sum(integrand * tables["mask_d"]))
    part_a = complex(np.sum(integrand * tables["wa"]))
    part_b = complex(np.sum(integrand * tables["wb"]))
    part_c = complex(np.sum(integrand * tables["wc"]))
    return {
        "total": total,
        "A": part_a,
        "B": part_b,
        "C": part_c,
        "closure_gap": abs(part_a + part_b + part_c - total),
    }


# ----------------------------------------------------------------------------
# estimate probes
# ----------------------------------------------------------------------------

PROBE_NAMES = (
    "bilinear_critical_x",
    "bilinear_critical_shell",
    "exp_lowband",
    "leibniz_split",
    "bilinear_half_weight",
    "bilinear_periodic",
)


@dataclass(frozen=True)
class EstimateProbeConfig:
    n: int = 32
    num_times: int = 32
    t_span: float = 2.0 * np.pi
    period_scale: float = 1.0
    samples: int = 100
    seed: int = 0
    s: float = 0.0

    def window(self) -> SpaceTimeGrid:
        from .spectral import make_grid

        return SpaceTimeGrid(
            make_grid(self.n, self.period_scale), self.num_times, self.t_span
        )


def _decay_schedule(i: int) -> float:
    return (0.5, 1.0, 2.0)[i % 3]


def _u_aux_norms(u: SpaceTimeField) -> tuple[float, float, float]:
    return (
        spacetime_lebesgue(u, 2),
        spacetime_lebesgue(u, 4),
        x_norm(u, -1.0, 1.0),
    )


def _bessel_mask(grid: SpaceTimeGrid, s: float) -> np.ndarray:
    return (1.0 + grid.spatial.xi**2) ** (s / 2.0)


def estimate_probe(which: str, cfg: EstimateProbeConfig, rng_factory) -> ProbeReport:
    """Empirical sup-ratio report for one of the bilinear/Leibniz estimates."""
    if which not in PROBE_NAMES:
        raise ValueError(f"unknown probe {which!r}; choose from {PROBE_NAMES}")
    win = cfg.window()
    env = {
        "n": cfg.n,
        "num_times": cfg.num_times,
        "t_span": cfg.t_span,
        "period_scale": cfg.period_scale,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "s": cfg.s,
    }
    builder = {
        "bilinear_critical_x": _probe_bilinear_critical_x,
        "bilinear_critical_shell": _probe_bilinear_critical_shell,
        "exp_lowband": _probe_exp_lowband,
        "leibniz_split": _probe_leibniz,
        "bilinear_half_weight": _probe_bilinear_half_weight,
        "bilinear_periodic": _probe_bilinear_periodic,
    }[which]
    return builder(cfg, win, env, rng_factory)


def _probe_bilinear_critical_x(cfg, win, env, rng_factory) -> ProbeReport:
    rep = ProbeReport(
        "bilinear_critical_x",
        "|dx P_+(dx^{-1} w P_- dx u)|_{X^{s,-1/2}} <= C |w|_{X^{s,1/2}} "
        "(|u|_{L2} + |u|_{L4} + |u|_{X^{-1,1}})",
        environment=env,
    )
    s = cfg.s
    for i in range(cfg.samples):
        rng = rng_factory("bilinear_critical_x", i)
        decay = _decay_schedule(i)
        w = random_spacetime_field(win, rng, xi_decay=decay, sigma_decay=1.25,
                                   positive_xi_only=True, min_xi=1.0)
        u = random_spacetime_field(win, rng, xi_decay=decay, sigma_decay=1.25,
                                   real=True)
        h = random_spacetime_field(win, rng, xi_decay=0.5, sigma_decay=0.75)
        rhs_u = sum(_u_aux_norms(u))
        rhs = x_norm(w, s, 0.5) * rhs_u
        if rhs == 0:
            rep.skip()
            continue
        b = bilinear_B(w, u)
        lhs = x_norm(b, s, -0.5)
        parts = region_pairing(h, w, u, form="I")
        denom = max(abs(parts["total"]), 1e-300)
        rep.add(
            sample=i,
            lhs=lhs,
            rhs=rhs,
            ratio=lhs / rhs,
            region_A=abs(parts["A"]),
            region_B=abs(parts["B"]),
            region_C=abs(parts["C"]),
            pairing_total=abs(parts["total"]),
            closure_rel=parts["closure_gap"] / denom,
        )
    return rep


def _probe_bilinear_critical_shell(cfg, win, env, rng_factory) -> ProbeReport:
    rep = ProbeReport(
        "bilinear_critical_shell",
        "|dx P_+(dx^{-1} w P_- dx u)|_{Ztilde^{s,-1}} <= C |w|_{X^{s,1/2}} "
        "(|u|_{L2} + |u|_{L4} + |u|_{X^{-1,1}})",
        environment=env,
    )
    s = cfg.s
    for i in range(cfg.samples):
        rng = rng_factory("bilinear_critical_shell", i)
        decay = _decay_schedule(i)
        w = random_spacetime_field(win, rng, xi_decay=decay, sigma_decay=1.25,
                                   positive_xi_only=True, min_xi=1.0)
        u = random_spacetime_field(win, rng, xi_decay=decay, sigma_decay=1.25,
                                   real=True)
        g = random_spacetime_field(win, rng, xi_decay=0.5, sigma_decay=0.75)
        rhs_u = sum(_u_aux_norms(u))
        rhs = x_norm(w, s, 0.5) * rhs_u
        if rhs == 0:
            rep.skip()
            continue
        b = bilinear_B(w, u)
        lhs = z_tilde_norm(b, s, -1.0)
        parts = region_pairing(g, w, u, form="J")
        denom = max(abs(parts["total"]), 1e-300)
        # discrete realization of the shell-dual norm (max over tau bins)
        gc = g.coefficients
        xi = win.spatial.xi
        dual_sq = 0.0
        for shell in _shells_range(win.spatial.n // 2 - 1):
            mask = np.asarray(phi_shell(xi, shell))[None, :]
            piece = np.max(np.abs(gc * mask), axis=0)  # L^inf over tau
            dual_sq += float(np.sum(piece**2)) * win.spatial.length
        rep.add(
            sample=i,
            lhs=lhs,
            rhs=rhs,
            ratio=lhs / rhs,
            region_A=abs(parts["A"]),
            region_B=abs(parts["B"]),
            region_C=abs(parts["C"]),
            pairing_total=abs(parts["total"]),
            closure_rel=parts["closure_gap"] / denom,
            g_dual_norm=float(np.sqrt(dual_sq)),
        )
    return rep


def _probe_exp_lowband(cfg, win, env, rng_factory) -> ProbeReport:
    from .gauge import _gauge_exponentials, _truncate
    from .spectral import RealField, projection_symbol

    rep = ProbeReport(
        "exp_lowband",
        "|dx P_+(P_lo e^{-iF/2} P_- dx u)|_{Ztilde^{s,-1} & X^{s,-1/2}} <= C |u|_{L4}^2",
        environment=env,
    )
    s = cfg.s
    grid = win.spatial
    xi = grid.xi
    s_lo = projection_symbol("lo", xi)
    s_minus_dx = projection_symbol("minus", xi) * (1j * xi)
    s_outer = projection_symbol("plus", xi) * (1j * xi)
    for i in range(cfg.samples):
        rng = rng_factory("exp_lowband", i)
        decay = max(_decay_schedule(i), 1.0)
        u = random_spacetime_field(win, rng, xi_decay=decay, sigma_decay=1.5,
                                   real=True, zero_mean_x=True)
        l4 = spacetime_lebesgue(u, 4)
        if l4 == 0:
            rep.skip()
            continue
        samples = u.samples.real
        out = np.zeros((win.num_times, grid.n), dtype=np.complex128)
        for mth in range(win.num_times):
            slice_u = RealField.from_samples(grid, samples[mth])
            em, _ = _gauge_exponentials(slice_u, 4)
            e_lo = _truncate(em, grid, 4) * s_lo
            ux_m = slice_u.coefficients * s_minus_dx
            prod = _spatial_product(grid, e_lo, ux_m)
            out[mth] = prod * s_outer
        op = SpaceTimeField.from_raw_samples(
            win, np.fft.ifft(out, axis=1) * grid.n
        )
        lhs = z_tilde_norm(op, s, -1.0) + x_norm(op, s, -0.5)
        rep.add(sample=i, lhs=lhs, rhs=l4**2, ratio=lhs / l4**2)
    return rep


def _spatial_product(grid, ca: np.ndarray, cb: np.ndarray) -> np.ndarray:
    """Exact product of two coefficient vectors (4x padded), truncated."""
    n = grid.n
    nf = 4 * n
    half = n // 2
    pa = np.zeros(nf, dtype=np.complex128)
    pb = np.zeros(nf, dtype=np.complex128)
    pa[:half], pa[nf - half :] = ca[:half], ca[n - half :]
    pb[:half], pb[nf - half :] = cb[:half], cb[n - half :]
    prod = np.fft.fft(np.fft.ifft(pa) * np.fft.ifft(pb)) * nf
    out = np.zeros(n, dtype=np.complex128)
    out[:half] = prod[:half]
    out[n - half :] = prod[nf - half :]
    out[half] = 0.0
    return out


def _probe_leibniz(cfg, win, env, rng_factory) -> ProbeReport:
    from .spectral import (
        RealField,
        fractional,
        lebesgue_norm,
        pointwise_product,
        project,
        derivative,
        random_field,
    )

    rep = ProbeReport(
        "leibniz_split",
        "|D^{1/2} P_+(f P_- dx g)|_{L2} <= C |D^{3/4} f|_{L4} |D^{3/4} g|_{L4}",
        environment=env,
    )
    grid = win.spatial
    for i in range(cfg.samples):
        rng = rng_factory("leibniz_split", i)
        decay = _decay_schedule(i)
        f = random_field(grid, rng, decay=decay, amplitude=1.0)
        g = random_field(grid, rng, decay=decay, amplitude=1.0)
        inner = pointwise_product(f, project(derivative(g), "minus"), oversample=4)
        lhs = lebesgue_norm(fractional(project(inner, "plus"), "riesz", 0.5), 2)
        rhs = lebesgue_norm(fractional(f, "riesz", 0.75), 4) * lebesgue_norm(
            fractional(g, "riesz", 0.75), 4
        )
        if rhs == 0:
            rep.skip()
            continue
        rep.add(sample=i, lhs=lhs, rhs=rhs, ratio=lhs / rhs)
    return rep


def _probe_bilinear_half_weight(cfg, win, env, rng_factory) -> ProbeReport:
    s = cfg.s if cfg.s > 0 else 0.25
    delta = s / 20.0
    theta = 0.5 + delta
    rep = ProbeReport(
        "bilinear_half_weight",
        "|P_+(W P_- dx u)|_{X^{1/2,-1/2+2d}} <= C |W|_{X^{1/2,1/2+d}} "
        "(|J^s u|_{L2} + |J^s u|_{L4} + |u|_{X^{s-th,th}})",
        environment={**env, "s_effective": s, "delta": delta, "theta": theta},
    )
    for i in range(cfg.samples):
        rng = rng_factory("bilinear_half_weight", i)
        decay = _decay_schedule(i)
        bigw = random_spacetime_field(win, rng, xi_decay=decay + 0.5,
                                      sigma_decay=1.25, positive_xi_only=True,
                                      min_xi=1.0)
        u = random_spacetime_field(win, rng, xi_decay=decay, sigma_decay=1.25,
                                   real=True)
        js = SpaceTimeField(win, u.coefficients * _bessel_mask(win, s)[None, :])
        rhs = x_norm(bigw, 0.5, 0.5 + delta) * (
            spacetime_lebesgue(js, 2)
            + spacetime_lebesgue(js, 4)
            + x_norm(u, s - theta, theta)
        )
        if rhs == 0:
            rep.skip()
            continue
        op = bilinear_core(bigw, u, outer_dx=False, inverse_dx_on_w=False)
        lhs = x_norm(op, 0.5, -0.5 + 2 * delta)
        rep.add(sample=i, lhs=lhs, rhs=rhs, ratio=lhs / rhs)
    return rep


def _probe_bilinear_periodic(cfg, win, env, rng_factory) -> ProbeReport:
    s = max(cfg.s, 0.25)
    rep = ProbeReport(
        "bilinear_periodic",
        "|P_+(W P_- dx u)|_{X^{s+1/2,-1/2}} <= C |W|_{X^{s+1/2,1/2}} "
        "(|J^s u|_{L2} + |J^s u|_{L4} + |u|_{X^{s-1,1}})",
        environment={**env, "s_effective": s},
    )
    for i in range(cfg.samples):
        rng = rng_factory("bilinear_periodic", i)
        decay = _decay_schedule(i)
        bigw = random_spacetime_field(win, rng, xi_decay=decay + 0.5,
                                      sigma_decay=1.25, positive_xi_only=True,
                                      min_xi=1.0)
        u = random_spacetime_field(win, rng, xi_decay=decay, sigma_decay=1.25,
                                   real=True)
        js = SpaceTimeField(win, u.coefficients * _bessel_mask(win, s)[None, :])
        rhs = x_norm(bigw, s + 0.5, 0.5) * (
            spacetime_lebesgue(js, 2)
            + spacetime_lebesgue(js, 4)
            + x_norm(u, s - 1.0, 1.0)
        )
        if rhs == 0:
            rep.skip()
            continue
        op = bilinear_core(bigw, u, outer_dx=False, inverse_dx_on_w=False)
        lhs = x_norm(op, s + 0.5, -0.5)
        rep.add(sample=i, lhs=lhs, rhs=rhs, ratio=lhs / rhs)
    return rep


# ----------------------------------------------------------------------------
# the bracket-weight convolution bound
# ----------------------------------------------------------------------------


def bracket_convolution_integral(a_minus: float, a_plus: float, mu: float) -> float:
    """int <y>^{-2a-} <y-mu>^{-2a+} dy with <v> = 1 + |v| (adaptive quadrature)."""
    from scipy.integrate import quad

    if not (0 < a_minus <= a_plus):
        raise ValueError("need 0 < a_minus <= a_plus")
    if a_minus + a_plus <= 0.5:
        raise ValueError("need a_minus + a_plus > 1/2")

    def f(y):
        return (1.0 + abs(y)) ** (-2 * a_minus) * (1.0 + abs(y - mu)) ** (-2 * a_plus)

    pts = sorted({0.0, float(mu)})
    total = 0.0
    segs = [(-np.inf, pts[0])] + [
        (pts[j], pts[j + 1]) for j in range(len(pts) - 1)
    ] + [(pts[-1], np.inf)]
    for a, b in segs:
        val, _ = quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=400)
        total += val
    return total


def decay_exponent(a_minus: float, a_plus: float, eps: float = 0.01) -> float:
    """Decay rate of the convolution bound: 2a- for a+ > 1/2, 2a- - eps at
    the borderline a+ = 1/2, and 2(a- + a+) - 1 for a+ < 1/2."""
    if a_plus > 0.5:
        return 2 * a_minus
    if a_plus == 0.5:
        return 2 * a_minus - eps
    return 2 * (a_minus + a_plus) - 1


def bracket_convolution_check(
    a_minus: float,
    a_plus: float,
    mu_values,
    eps: float = 0.01,
) -> ProbeReport:
    """Weighted-integral sweep: rows carry integral * <mu>^s, s per the case split."""
    s = decay_exponent(a_minus, a_plus, eps)
    rep = ProbeReport(
        "bracket_convolution",
        "int <y>^{-2a-} <y-mu>^{-2a+} dy <= C <mu>^{-s}",
        environment={"a_minus": a_minus, "a_plus": a_plus, "s": s, "eps": eps},
    )
    for mu in mu_values:
        val = bracket_convolution_integral(a_minus, a_plus, float(mu))
        weighted = val * (1.0 + abs(float(mu))) ** s
        rep.add(mu=float(mu), integral=val, ratio=weighted)
    return rep
