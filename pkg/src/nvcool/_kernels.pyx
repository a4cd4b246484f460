# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled right-hand-side kernels.

Line-for-line port of ``kernels_py``; see that module for the state and
parameter vector layouts.  The test suite checks that both backends agree
to machine precision.
"""


def undriven_rhs_flat(double[::1] y, double[::1] out, double[::1] par):
    cdef double xi = par[0], ksp = par[1]
    cdef double k47 = par[2], k57 = par[3], k67 = par[4]
    cdef double k71 = par[5], k72 = par[6], k73 = par[7]
    cdef double k31 = par[8], k13 = par[9], k21 = par[10], k12 = par[11]
    cdef double chi3 = par[12], kappa = par[13], nth = par[14]
    cdef double g = par[15], nsp = par[16], delta = par[17]

    cdef double p1 = y[0], p2 = y[1], p3 = y[2], p4 = y[3]
    cdef double p5 = y[4], p6 = y[5], p7 = y[6]
    cdef double n = y[7]
    cdef double cr = y[8], ci = y[9]
    cdef double sr = y[10], si = y[11]

    cdef double ret = xi + ksp

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

    cdef double gam_c = 0.5 * (kappa + k12 + k13 + k31) + xi + chi3
    cdef double gnm1 = (nsp - 1.0) * g
    out[8] = -delta * ci - gam_c * cr - gnm1 * si
    out[9] = delta * cr - gam_c * ci + g * (p3 * (1.0 + n) - p1 * n) \
        + gnm1 * sr

    cdef double gam_s = k12 + k13 + k31 + 2.0 * (xi + chi3)
    out[10] = -gam_s * sr + 2.0 * g * (p3 - p1) * ci
    out[11] = -gam_s * si

    return out


def driven_rhs_flat(double[::1] y, double[::1] out, double[::1] par):
    cdef double xi = par[0], ksp = par[1]
    cdef double k47 = par[2], k57 = par[3], k67 = par[4]
    cdef double k71 = par[5], k72 = par[6], k73 = par[7]
    cdef double k31 = par[8], k13 = par[9], k21 = par[10], k12 = par[11]
    cdef double chi3 = par[12], kappa = par[13], nth = par[14]
    cdef double g = par[15], nsp = par[16]
    cdef double eta = par[18], dm = par[19], d3 = par[20]

    cdef double p1 = y[0], p2 = y[1], p3 = y[2], p4 = y[3]
    cdef double p5 = y[4], p6 = y[5], p7 = y[6]
    cdef double n = y[7]
    cdef double complex J = 1j
    cdef double complex c = y[8] + J * y[9]
    cdef double complex S = y[10] + J * y[11]
    cdef double complex al = y[12] + J * y[13]
    cdef double complex s = y[14] + J * y[15]
    cdef double complex aa = y[16] + J * y[17]
    cdef double complex Y = y[18] + J * y[19]
    cdef double complex A1 = y[20] + J * y[21]
    cdef double complex A3 = y[22] + J * y[23]
    cdef double complex W = y[24] + J * y[25]
    cdef double complex P1 = y[26] + J * y[27]
    cdef double complex P3 = y[28] + J * y[29]

    cdef double ret = xi + ksp
    cdef double gam13 = 0.5 * (k12 + k13 + k31) + xi + chi3
    cdef double complex lm = J * dm + 0.5 * kappa
    cdef double complex l3 = J * d3 + gam13
    cdef double nm1 = nsp - 1.0
    cdef double complex alc = al.conjugate(), sc = s.conjugate()
    cdef double complex A1c = A1.conjugate(), A3c = A3.conjugate()
    cdef double complex cc = c.conjugate()

    out[0] = -(xi + k12 + k13) * p1 + ret * p4 + k21 * p2 + k31 * p3 \
        + k71 * p7 + 2.0 * g * c.imag
    out[1] = -(xi + k21) * p2 + ret * p5 + k12 * p1 + k72 * p7
    out[2] = -(xi + k31) * p3 + ret * p6 + k13 * p1 + k73 * p7 \
        - 2.0 * g * c.imag
    out[3] = xi * p1 - (ret + k47) * p4
    out[4] = xi * p2 - (ret + k57) * p5
    out[5] = xi * p3 - (ret + k67) * p6
    out[6] = k47 * p4 + k57 * p5 + k67 * p6 - (k71 + k72 + k73) * p7

    out[7] = kappa * (nth - n) + 2.0 * nsp * g * c.imag - 2.0 * eta * al.imag

    cdef double alsq = al.real * al.real + al.imag * al.imag
    cdef double complex t1 = n * p1 + alc * A1 + al * A1c - 2.0 * p1 * alsq
    cdef double complex t3 = n * p3 + alc * A3 + al * A3c - 2.0 * p3 * alsq

    cdef double complex dc = (J * (dm - d3) - (0.5 * kappa + gam13)) * c \
        + J * eta * s + J * g * (p3 + t3 - t1) + J * nm1 * g * S

    cdef double complex x1 = alc * P1 + p1 * c + s * A1c - 2.0 * alc * p1 * s
    cdef double complex x3 = alc * P3 + p3 * c + s * A3c - 2.0 * alc * p3 * s
    cdef double complex z = x1 - x3
    cdef double complex dS = -2.0 * gam13 * S + J * g * (z - z.conjugate())

    cdef double complex dal = -lm * al - J * g * nsp * s - J * eta

    cdef double complex ds = -l3 * s + J * g * (A3 - A1)

    cdef double complex daa = -2.0 * lm * aa - 2.0 * J * eta * al \
        - 2.0 * J * g * nsp * Y

    cdef double complex dY = -(J * (dm + d3) + 0.5 * kappa + gam13) * Y \
        - J * eta * s + J * g * ((p3 - p1) * aa + 2.0 * al * (A3 - A1)
                                 - 2.0 * (p3 - p1) * al * al - nm1 * W)

    cdef double complex fa1 = -(xi + k12 + k13) * A1 + ret * (al * p4) \
        + k21 * (al * p2) + k31 * A3 + k71 * (al * p7)
    cdef double complex fa3 = -(xi + k31) * A3 + ret * (al * p6) \
        + k13 * A1 + k73 * (al * p7)

    cdef double complex dA1 = -lm * A1 - J * eta * p1 + fa1 + J * g * (
        -((n + 1.0) * s + alc * Y + al * c - 2.0 * alc * al * s)
        + (sc * aa + 2.0 * al * cc - 2.0 * sc * al * al)
        - nm1 * P1)
    cdef double complex dA3 = -lm * A3 - J * eta * p3 + fa3 + J * g * (
        (n * s + alc * Y + al * c - 2.0 * alc * al * s)
        - (sc * aa + 2.0 * al * cc - 2.0 * sc * al * al)
        - nm1 * P3)

    cdef double complex dW = -2.0 * l3 * W + 2.0 * J * g * (
        al * (P3 - P1) + (p3 - p1) * Y + s * (A3 - A1)
        - 2.0 * al * (p3 - p1) * s)

    cdef double complex fp1 = -(xi + k12 + k13) * P1 + ret * (s * p4) \
        + k21 * (s * p2) + k31 * P3 + k71 * (s * p7)
    cdef double complex fp3 = -(xi + k31) * P3 + ret * (s * p6) \
        + k13 * P1 + k73 * (s * p7)

    cdef double complex ss = s * s
    cdef double ssq = s.real * s.real + s.imag * s.imag
    cdef double complex dP1 = -l3 * P1 + fp1 + J * g * (
        -(alc * W + 2.0 * s * c - 2.0 * alc * ss)
        + (al * S + sc * Y + s * cc - 2.0 * al * ssq)
        + (p1 * A3 + p3 * A1 - 2.0 * p1 * A1 + al * p1 * (p1 - p3)))
    cdef double complex dP3 = -l3 * P3 + fp3 + J * g * (
        (alc * W + 2.0 * s * c - 2.0 * alc * ss)
        - (al * S + sc * Y + s * cc - 2.0 * al * ssq)
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


def rate_rhs_flat(double[::1] y, double[::1] out, double[::1] par):
    cdef double xi = par[0], ksp = par[1]
    cdef double k47 = par[2], k57 = par[3], k67 = par[4]
    cdef double k71 = par[5], k72 = par[6], k73 = par[7]
    cdef double k31 = par[8], k13 = par[9], k21 = par[10], k12 = par[11]
    cdef double chi3 = par[12], kappa = par[13], nth = par[14]
    cdef double g = par[15], nsp = par[16], delta = par[17]

    cdef double p1 = y[0], p2 = y[1], p3 = y[2], p4 = y[3]
    cdef double p5 = y[4], p6 = y[5], p7 = y[6]
    cdef double n = y[7]

    cdef double chi = 0.5 * (kappa + k12 + k13 + k31) + xi + chi3
    cdef double keet = 2.0 * g * g * chi / (delta * delta + chi * chi)
    cdef double transfer = keet * (p3 * (1.0 + n) - p1 * n)

    cdef double ret = xi + ksp
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
