"""Information model of a Gaussian-modulated heterodyne CV-QKD link.

The link (entanglement-based picture): Alice keeps one arm of a two-mode
squeezed vacuum of variance V = v_mod + 1, the other arm crosses a channel of
transmittance t_ch picking up excess noise xi_ch, then enters a trusted
receiver of transmittance t_rec with trusted noise xi_rec; the receiver may
additionally inject trusted digital noise xi_art into the measured data.

All excess noises are detector-referred: they appear unattenuated in the
measurement-plane noise budget, which makes the SNR formula

    snr = t_ch * t_rec * v_mod / (2 + xi_ch + xi_rec + xi_art)

exact (the 2 is one shot-noise unit of vacuum plus one heterodyne unit).
Consequently, when channel noise is placed *before* the receiver in the
covariance-matrix construction it enters as xi_ch / t_rec.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .gaussian import (
    I2,
    SIGMA_Z,
    CovMatrix,
    NumericalError,
    apply_beamsplitter,
    heterodyne_condition,
    tmsv_cm,
    von_neumann_entropy,
)

# chi values in [-CHI_FLOOR_TOL, 0) are rounded up to 0; anything more
# negative indicates a broken covariance construction.
CHI_FLOOR_TOL = 1e-8


@dataclass(frozen=True)
class LinkParams:
    """Scenario parameters in shot-noise units.

    t_rec = 1 is accepted only with xi_rec = xi_art = 0: trusted noise is
    mixed in through the receiver's loss port, which does not exist for a
    lossless receiver, and silently approximating it with a near-unity
    beamsplitter would hide the modeling problem.
    """

    v_mod: float
    t_ch: float
    xi_ch: float
    t_rec: float
    xi_rec: float
    xi_art: float = 0.0

    def __post_init__(self):
        if self.v_mod < 0:
            raise ValueError(f"v_mod must be >= 0, got {self.v_mod}")
        if not 0.0 < self.t_ch <= 1.0:
            raise ValueError(f"t_ch must lie in (0, 1], got {self.t_ch}")
        if not 0.0 < self.t_rec <= 1.0:
            raise ValueError(f"t_rec must lie in (0, 1], got {self.t_rec}")
        for name in ("xi_ch", "xi_rec", "xi_art"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.t_rec == 1.0 and self.trusted_noise > 0:
            raise ValueError("t_rec = 1 with positive trusted noise has no loss port to mix through")

    @property
    def t_total(self) -> float:
        return self.t_ch * self.t_rec

    @property
    def trusted_noise(self) -> float:
        return self.xi_rec + self.xi_art

    def with_xi_art(self, xi_art: float) -> "LinkParams":
        return replace(self, xi_art=xi_art)


@dataclass(frozen=True)
class InfoBudget:
    """Per-symbol information budget; r = b - chi holds by construction."""

    snr: float
    i_ab: float
    b: float
    chi: float
    r: float

    def __post_init__(self):
        if self.snr < 0 or self.i_ab < 0 or self.chi < 0:
            raise ValueError("snr, i_ab and chi must be nonnegative")
        if self.r != self.b - self.chi:
            raise ValueError("r must equal b - chi exactly")


def snr(p: LinkParams) -> float:
    """Detected signal-to-noise ratio per quadrature."""
    return p.t_total * p.v_mod / (2.0 + p.xi_ch + p.xi_rec + p.xi_art)


def mutual_information_ab(snr_value: float) -> float:
    """Heterodyne Shannon rate: two quadratures at 1/2 log2(1+snr) each."""
    if snr_value < 0:
        raise ValueError(f"snr must be >= 0, got {snr_value}")
    return float(np.log2(1.0 + snr_value))


def ab1_cm(p: LinkParams) -> CovMatrix:
    """Two-mode covariance of Alice's arm and the mode entering the receiver.

    a = V, b1 = t_ch (V - 1) + 1 + xi_ch / t_rec, c = sqrt(t_ch (V^2 - 1)),
    with V = v_mod + 1.  Everything Eve can purify lives here; receiver loss
    and noise are trusted and enter later.
    """
    v = p.v_mod + 1.0
    a = v
    b1 = p.t_ch * (v - 1.0) + 1.0 + p.xi_ch / p.t_rec
    c = np.sqrt(p.t_ch * (v * v - 1.0))
    top = np.hstack([a * I2, c * SIGMA_Z])
    bot = np.hstack([c * SIGMA_Z, b1 * I2])
    return CovMatrix(np.vstack([top, bot]))


def holevo_bound(p: LinkParams) -> float:
    """Eve's information bound chi for reverse reconciliation, in bits.

    chi = S(E) - S(E|B).  Eve purifies the state (A, B1) ahead of the trusted
    receiver, so S(E) = S(AB1).  The receiver couples B1 to one arm of a
    trusted-noise EPR pair (N1, N2) of variance 1 + (xi_rec + xi_art)/(1 -
    t_rec) on a beamsplitter of transmittance t_rec; Bob heterodynes the
    transmitted mode B2.  The global state over (E, A, B2, N1', N2) is pure,
    hence S(E|B) equals the entropy of (A, N1', N2) conditioned on B2.
    """
    s_e = von_neumann_entropy(ab1_cm(p))

    if p.t_rec < 1.0:
        v_n = 1.0 + p.trusted_noise / (1.0 - p.t_rec)
    else:
        v_n = 1.0  # lossless receiver, only legal with zero trusted noise
    # modes: 0 = A, 1 = B1, 2 = N1, 3 = N2
    joint = np.zeros((8, 8))
    joint[:4, :4] = ab1_cm(p).entries
    joint[4:, 4:] = tmsv_cm(v_n).entries
    mixed = apply_beamsplitter(CovMatrix(joint), 1, 2, p.t_rec)
    conditioned = heterodyne_condition(mixed, 1)
    s_e_given_b = von_neumann_entropy(conditioned)

    chi = s_e - s_e_given_b
    if chi < 0.0:
        if chi < -CHI_FLOOR_TOL:
            raise NumericalError(f"Holevo bound came out negative ({chi}): construction bug")
        chi = 0.0
    return chi


def info_budget(p: LinkParams, beta: float, b_override: float | None = None) -> InfoBudget:
    """Assemble the budget r = b - chi with b = beta * i_ab unless overridden.

    The override models a fixed-rate code running off its design point: it
    keeps transporting the same number of bits per symbol regardless of the
    actual SNR.  Negative r is meaningful output (no secret key), not an
    error.
    """
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    s = snr(p)
    i_ab = mutual_information_ab(s)
    b = beta * i_ab if b_override is None else b_override
    chi = holevo_bound(p)
    return InfoBudget(snr=s, i_ab=i_ab, b=b, chi=chi, r=b - chi)
