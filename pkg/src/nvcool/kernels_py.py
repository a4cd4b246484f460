"""Pure-Python right-hand-side kernels for the ODE systems.

These are the reference implementations; ``_kernels.pyx`` contains a
line-for-line compiled port, and :mod:`nvcool.kernels` picks whichever is
available at import time.  All kernels write into a caller-supplied output
array and also return it.

Shared parameter vector layout (length 21, all rad/s unless noted)::

    0  xi        optical pump rate
    1  k_sp      radiative decay of the excited triplet
    2  k47   3 k57   4 k67      intersystem crossing into the singlet
    5  k71   6 k72   7 k73      singlet decay into the ground triplet
    8  k31   9 k13  10 k21  11 k12   ground spin-lattice rates
    12 chi3      dephasing of the 3<->1 coherence
    13 kappa     mode damping
    14 n_th      thermal photon number (dimensionless)
    15 g         single-spin coupling to the 3<->1 transition
    16 n_spins   ensemble size (dimensionless)
    17 delta     omega_m - omega31 (undriven rotating frame)
    18 eta       drive pumping rate Omega*sqrt(kappa/2) (driven only)
    19 delta_m   omega_m - omega_drive (driven frame)
    20 delta_3   omega31 - omega_drive (driven frame)

Undriven moment state (length 12)::

    0..6   populations of levels 1..7
    7      photon number <a^dag a>
    8, 9   Re, Im of <a^dag sigma1^13>
    10, 11 Re, Im of <sigma1^31 sigma2^13>

Driven moment state (length 30): the 12 entries above, then Re/Im pairs::

    12 <a>          14 <sigma1^13>        16 <a a>        18 <a sigma1^13>
    20 <a sigma1^11>   22 <a sigma1^33>
    24 <sigma1^13 sigma2^13>   26 <sigma1^11 sigma2^13>   28 <sigma1^33 sigma2^13>

Rate-model state (length 8): populations of levels 1..7, then the photon
number.
"""

import numpy as np

__all__ = [
    "N_PAR", "N_UNDRIVEN", "N_DRIVEN", "N_RATE",
    "PAR_XI", "PAR_KSP", "PAR_K47", "PAR_K57", "PAR_K67",
    "PAR_K71", "PAR_K72", "PAR_K73",
    "PAR_K31", "PAR_K13", "PAR_K21", "PAR_K12",
    "PAR_CHI3", "PAR_KAPPA", "PAR_NTH", "PAR_G", "PAR_NSPINS",
    "PAR_DELTA", "PAR_ETA", "PAR_DELTA_M", "PAR_DELTA_3",
    "undriven_rhs_flat", "driven_rhs_flat", "rate_rhs_flat",
]

N_PAR = 21
N_UNDRIVEN = 12
N_DRIVEN = 30
N_RATE = 8

(PAR_XI, PAR_KSP, PAR_K47, PAR_K57, PAR_K67,
 PAR_K71, PAR_K72, PAR_K73,
 PAR_K31, PAR_K13, PAR_K21, PAR_K12,
 PAR_CHI3, PAR_KAPPA, PAR_NTH, PAR_G, PAR_NSPINS,
 PAR_DELTA, PAR_ETA, PAR_DELTA_M, PAR_DELTA_3) = range(N_PAR)


def undriven_rhs_flat(y, out, par):
    """Time derivative of the closed moment system without microwave drive."""
    xi = par[0]; ksp = par[1]
    k47 = par[2]; k57 = par[3]; k67 = par[4]
    k71 = par[5]; k72 = par[6]; k73 = par[7]
    k31 = par[8]; k13 = par[9]; k21 = par[10]; k12 = par[11]
    chi3 = par[12]; kappa = par[13]; nth = par[14]
    g = par[15]; nsp = par[16]; delta = par[17]

    p1 = y[0]; p2 = y[1]; p3 = y[2]; p4 = y[3]
    p5 = y[4]; p6 = y[5]; p7 = y[6]
    n = y[7]
    cr = y[8]; ci = y[9]
    sr = y[10]; si = y[11]

    ret = xi + ksp  # stimulated + spontaneous return from the excited triplet

    out[0] = -(xi + k12 + k13) * p1 + ret * p4 + k21 * p2 + k31 * p3 \
        + k71 * p7 + 2.0 * g * ci
    out[1] = -(xi + k21) * p2 + ret * p5 + k12 * p1 + k72 * p7
    out[2] = -(xi + k31) * p3 + ret * p6 + k13 * p1 + k73 * p7 \
        - 2.0 * g * ci
    out[3] = xi * p1 - (ret + k47) * p4
    out[4] = xi * p2 - (ret + k57) * p5
    out[5] = xi * p3 - (ret + k67) * p6
    out[6] = k47 * p4 + k57 * p5 + k67 * p6 - (k71 + k72 + k73) * p7

    out[7] = kappa * (nth - n) + 2.0 * nsp * g * ci

    # <a^dag sigma13>: phase delta, decay (kappa + k12 + k13 + k31)/2 + xi + chi3
    gam_c = 0.5 * (kappa + k12 + k13 + k31) + xi + chi3
    gnm1 = (nsp - 1.0) * g
    out[8] = -delta * ci - gam_c * cr - gnm1 * si
    out[9] = delta * cr - gam_c * ci + g * (p3 * (1.0 + n) - p1 * n) \
        + gnm1 * sr

    # <sigma1^31 sigma2^13>: no phase, twice the spin coherence decay
    gam_s = k12 + k13 + k31 + 2.0 * (xi + chi3)
    out[10] = -gam_s * sr + 2.0 * g * (p3 - p1) * ci
    out[11] = -gam_s * si

    return out


def driven_rhs_flat(y, out, par):
    """Time derivative of the moment system with a coherent microwave drive.

    Works in the frame rotating at the drive frequency; the drive enters
    only through eta = Omega*sqrt(kappa/2).  Moments outside the tracked
    family are closed at first order (e.g. <a sigma^22> -> <a><sigma^22>).
    """
    xi = par[0]; ksp = par[1]
    k47 = par[2]; k57 = par[3]; k67 = par[4]
    k71 = par[5]; k72 = par[6]; k73 = par[7]
    k31 = par[8]; k13 = par[9]; k21 = par[10]; k12 = par[11]
    chi3 = par[12]; kappa = par[13]; nth = par[14]
    g = par[15]; nsp = par[16]
    eta = par[18]; dm = par[19]; d3 = par[20]

    p1 = y[0]; p2 = y[1]; p3 = y[2]; p4 = y[3]
    p5 = y[4]; p6 = y[5]; p7 = y[6]
    n = y[7]
    c = y[8] + 1j * y[9]       # <a^dag sigma1^13>
    S = y[10] + 1j * y[11]     # <sigma1^31 sigma2^13>
    al = y[12] + 1j * y[13]    # <a>
    s = y[14] + 1j * y[15]     # <sigma1^13>
    aa = y[16] + 1j * y[17]    # <a a>
    Y = y[18] + 1j * y[19]     # <a sigma1^13>
    A1 = y[20] + 1j * y[21]    # <a sigma1^11>
    A3 = y[22] + 1j * y[23]    # <a sigma1^33>
    W = y[24] + 1j * y[25]     # <sigma1^13 sigma2^13>
    P1 = y[26] + 1j * y[27]    # <sigma1^11 sigma2^13>
    P3 = y[28] + 1j * y[29]    # <sigma1^33 sigma2^13>

    ret = xi + ksp
    gam13 = 0.5 * (k12 + k13 + k31) + xi + chi3   # 3<->1 coherence decay
    lm = 1j * dm + 0.5 * kappa                    # mode: phase + decay
    l3 = 1j * d3 + gam13                          # spin coherence ditto
    nm1 = nsp - 1.0
    alc = al.conjugate(); sc = s.conjugate()
    A1c = A1.conjugate(); A3c = A3.conjugate()
    cc = c.conjugate()

    # populations: incoherent flux plus the coherent 3<->1 exchange
    out[0] = -(xi + k12 + k13) * p1 + ret * p4 + k21 * p2 + k31 * p3 \
        + k71 * p7 + 2.0 * g * c.imag
    out[1] = -(xi + k21) * p2 + ret * p5 + k12 * p1 + k72 * p7
    out[2] = -(xi + k31) * p3 + ret * p6 + k13 * p1 + k73 * p7 \
        - 2.0 * g * c.imag
    out[3] = xi * p1 - (ret + k47) * p4
    out[4] = xi * p2 - (ret + k57) * p5
    out[5] = xi * p3 - (ret + k67) * p6
    out[6] = k47 * p4 + k57 * p5 + k67 * p6 - (k71 + k72 + k73) * p7

    # photon number: thermal contact, spin exchange, coherent injection
    out[7] = kappa * (nth - n) + 2.0 * nsp * g * c.imag - 2.0 * eta * al.imag

    # <a^dag a sigma^ii> closed at second order
    t1 = n * p1 + alc * A1 + al * A1c - 2.0 * p1 * (al.real ** 2 + al.imag ** 2)
    t3 = n * p3 + alc * A3 + al * A3c - 2.0 * p3 * (al.real ** 2 + al.imag ** 2)

    dc = (1j * (dm - d3) - (0.5 * kappa + gam13)) * c + 1j * eta * s \
        + 1j * g * (p3 + t3 - t1) + 1j * nm1 * g * S

    # <sigma1^31 sigma2^13>
    x1 = alc * P1 + p1 * c + s * A1c - 2.0 * alc * p1 * s
    x3 = alc * P3 + p3 * c + s * A3c - 2.0 * alc * p3 * s
    z = x1 - x3
    dS = -2.0 * gam13 * S + 1j * g * (z - z.conjugate())

    dal = -lm * al - 1j * g * nsp * s - 1j * eta

    ds = -l3 * s + 1j * g * (A3 - A1)

    daa = -2.0 * lm * aa - 2.0 * 1j * eta * al - 2.0 * 1j * g * nsp * Y

    dY = -(1j * (dm + d3) + 0.5 * kappa + gam13) * Y - 1j * eta * s \
        + 1j * g * ((p3 - p1) * aa + 2.0 * al * (A3 - A1)
                    - 2.0 * (p3 - p1) * al * al - nm1 * W)

    # incoherent flux on the spin factor of <a sigma^ii>; moments with
    # levels 2 and 4..7 are closed as <a><sigma^jj>
    fa1 = -(xi + k12 + k13) * A1 + ret * (al * p4) + k21 * (al * p2) \
        + k31 * A3 + k71 * (al * p7)
    fa3 = -(xi + k31) * A3 + ret * (al * p6) + k13 * A1 + k73 * (al * p7)

    dA1 = -lm * A1 - 1j * eta * p1 + fa1 + 1j * g * (
        -((n + 1.0) * s + alc * Y + al * c - 2.0 * alc * al * s)
        + (sc * aa + 2.0 * al * cc - 2.0 * sc * al * al)
        - nm1 * P1)
    dA3 = -lm * A3 - 1j * eta * p3 + fa3 + 1j * g * (
        (n * s + alc * Y + al * c - 2.0 * alc * al * s)
        - (sc * aa + 2.0 * al * cc - 2.0 * sc * al * al)
        - nm1 * P3)

    dW = -2.0 * l3 * W + 2.0 * 1j * g * (
        al * (P3 - P1) + (p3 - p1) * Y + s * (A3 - A1)
        - 2.0 * al * (p3 - p1) * s)

    fp1 = -(xi + k12 + k13) * P1 + ret * (s * p4) + k21 * (s * p2) \
        + k31 * P3 + k71 * (s * p7)
    fp3 = -(xi + k31) * P3 + ret * (s * p6) + k13 * P1 + k73 * (s * p7)

    ss = s * s
    dP1 = -l3 * P1 + fp1 + 1j * g * (
        -(alc * W + 2.0 * s * c - 2.0 * alc * ss)
        + (al * S + sc * Y + s * cc - 2.0 * al * (s.real ** 2 + s.imag ** 2))
        + (p1 * A3 + p3 * A1 - 2.0 * p1 * A1 + al * p1 * (p1 - p3)))
    dP3 = -l3 * P3 + fp3 + 1j * g * (
        (alc * W + 2.0 * s * c - 2.0 * alc * ss)
        - (al * S + sc * Y + s * cc - 2.0 * al * (s.real ** 2 + s.imag ** 2))
        + (2.0 * p3 * A3 - p3 * A1 - p1 * A3 + al * p3 * (p1 - p3)))

    out[8] = dc.real; out[9] = dc.imag
    out[10] = dS.real; out[11] = dS.imag
    out[12] = dal.real; out[13] = dal.imag
    out[14] = ds.real; out[15] = ds.imag
    out[16] = daa.real; out[17] = daa.imag
    out[18] = dY.real; out[19] = dY.imag
    out[20] = dA1.real; out[21] = dA1.imag
    out[22] = dA3.real; out[23] = dA3.imag
    out[24] = dW.real; out[25] = dW.imag
    out[26] = dP1.real; out[27] = dP1.imag
    out[28] = dP3.real; out[29] = dP3.imag

    return out


def rate_rhs_flat(y, out, par):
    """Time derivative of the rate model (adiabatically eliminated coherences).

    The coherent exchange is replaced by an incoherent energy-transfer
    channel with rate 2 g^2 chi / (delta^2 + chi^2), where chi collects the
    linewidths of the mode and of the 3<->1 coherence.
    """
    xi = par[0]; ksp = par[1]
    k47 = par[2]; k57 = par[3]; k67 = par[4]
    k71 = par[5]; k72 = par[6]; k73 = par[7]
    k31 = par[8]; k13 = par[9]; k21 = par[10]; k12 = par[11]
    chi3 = par[12]; kappa = par[13]; nth = par[14]
    g = par[15]; nsp = par[16]; delta = par[17]

    p1 = y[0]; p2 = y[1]; p3 = y[2]; p4 = y[3]
    p5 = y[4]; p6 = y[5]; p7 = y[6]
    n = y[7]

    chi = 0.5 * (kappa + k12 + k13 + k31) + xi + chi3
    keet = 2.0 * g * g * chi / (delta * delta + chi * chi)
    transfer = keet * (p3 * (1.0 + n) - p1 * n)

    ret = xi + ksp
    out[0] = -(xi + k12 + k13) * p1 + ret * p4 + k21 * p2 + k31 * p3 \
        + k71 * p7 + transfer
    out[1] = -(xi + k21) * p2 + ret * p5 + k12 * p1 + k72 * p7
    out[2] = -(xi + k31) * p3 + ret * p6 + k13 * p1 + k73 * p7 - transfer
    out[3] = xi * p1 - (ret + k47) * p4
    out[4] = xi * p2 - (ret + k57) * p5
    out[5] = xi * p3 - (ret + k67) * p6
    out[6] = k47 * p4 + k57 * p5 + k67 * p6 - (k71 + k72 + k73) * p7
    out[7] = kappa * (nth - n) + nsp * transfer

    return out
