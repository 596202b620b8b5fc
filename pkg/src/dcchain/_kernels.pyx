# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled residual kernels; layout documented in kernels.py.

Kept in lockstep with _kernels_py (same order of operations)."""

from libc.math cimport cos, sin, sqrt, tanh, pi


cdef double _SQ23 = sqrt(2.0 / 3.0)
cdef double _TPI3 = 2.0 * pi / 3.0


def sdcib_fg(double[::1] x, double[::1] y, double[::1] w, double[::1] p,
             double[::1] f, double[::1] g):
    cdef double th = x[0], eps = x[1], vq = x[2]
    cdef double i_d = x[3], i_q = x[4], xdc = x[5], gd = x[6], gq = x[7]
    cdef double iu = x[8], iv = x[9], vu = x[10], vv = x[11]
    cdef double xu = x[12], xv = x[13], gu = x[14], gv = x[15]
    cdef double vdc = x[16], vpsu = x[17], xpsu = x[18], veq = x[19], xeq = x[20]

    cdef double mda = y[0], mqa = y[1], irp = y[2], iip = y[3]
    cdef double muv = y[4], mvv = y[5], geq = y[6], iuv = y[7], ivv = y[8]
    cdef double ipsu = y[9], vrp = y[10], vip = y[11]

    cdef double wb = p[0], ws = p[1], vinf = p[2], rg = p[3], xg = p[4]
    cdef double ra = p[5], la = p[6], cdc = p[7], wlp = p[8], vdcr = p[9]
    cdef double kppll = p[10], kipll = p[11], kpdc = p[12], kidc = p[13]
    cdef double kpca = p[14], kica = p[15]
    cdef double rv = p[16], lv = p[17], cv = p[18], vur = p[19], wv = p[20]
    cdef double kpvv = p[21], kivv = p[22], kpcv = p[23], kicv = p[24]
    cdef double cp = p[25], rp = p[26], vpr = p[27], kpvp = p[28], kivp = p[29]
    cdef double ce = p[30], ver = p[31], kpve = p[32], kive = p[33]

    cdef double wpll = ws + kppll * vq + kipll * eps
    cdef double cth = cos(th), sth = sin(th)
    cdef double vd = cth * vrp + sth * vip
    cdef double vqc = -sth * vrp + cth * vip
    cdef double idref = kpdc * (vdcr - vdc) + kidc * xdc
    cdef double vdref = kpca * (i_d - idref) + kica * gd + wpll * la * (-i_q)
    cdef double vqref = kpca * i_q + kica * gq + wpll * la * i_d

    f[0] = wb * (wpll - ws)
    f[1] = vq
    f[2] = wlp * (vqc - vq)
    f[3] = (wb / la) * (vd - vdc * mda - ra * i_d + wpll * la * (-i_q))
    f[4] = (wb / la) * (vqc - vdc * mqa - ra * i_q + wpll * la * i_d)
    f[5] = vdcr - vdc
    f[6] = i_d - idref
    f[7] = i_q
    g[0] = mda - vdref / vdc
    g[1] = mqa - vqref / vdc
    g[2] = irp - (cth * i_d - sth * i_q)
    g[3] = iip - (sth * i_d + cth * i_q)

    cdef double icuref = kpvv * (vur - vu) + kivv * xu - wv * cv * (-vv)
    cdef double icvref = kpvv * (0.0 - vv) + kivv * xv - wv * cv * vu
    cdef double vcuref = kpcv * (icuref - iu) + kicv * gu - wv * lv * (-iv)
    cdef double vcvref = kpcv * (icvref - iv) + kicv * gv - wv * lv * iu
    f[8] = (wb / lv) * (vdc * muv - vu - rv * iu + wv * lv * (-iv))
    f[9] = (wb / lv) * (vdc * mvv - vv - rv * iv + wv * lv * iu)
    f[10] = (wb / cv) * (iu - iuv + wv * cv * (-vv))
    f[11] = (wb / cv) * (iv - ivv + wv * cv * vu)
    f[12] = vur - vu
    f[13] = 0.0 - vv
    f[14] = icuref - iu
    f[15] = icvref - iv
    g[4] = muv - vcuref / vdc
    g[5] = mvv - vcvref / vdc

    f[16] = (wb / cdc) * ((mda * i_d + mqa * i_q) - (muv * iu + mvv * iv))

    cdef double vnorm2 = vu * vu + vv * vv
    f[17] = (wb / cp) * ((geq - rp * geq * geq) * vnorm2 / (3.0 * vpsu) - ipsu)
    f[18] = vpr - vpsu
    g[6] = geq - (kpvp * (vpr - vpsu) + kivp * xpsu)
    g[7] = iuv - geq * vu
    g[8] = ivv - geq * vv

    cdef double gload = w[0] / (3.0 * ver * ver)
    cdef double ieq = kpve * (ver - veq) + kive * xeq
    f[19] = (wb / ce) * (ieq - gload * veq)
    f[20] = ver - veq
    g[9] = ipsu - (veq / vpsu) * ieq

    g[10] = vrp - (vinf - (rg * irp - xg * iip))
    g[11] = vip - (0.0 - (xg * irp + rg * iip))


def fullorder_rhs(double[::1] x, double[::1] w, double[::1] p, double[::1] dx):
    cdef double th = x[0], eps = x[1], vq = x[2]
    cdef double i_d = x[3], i_q = x[4], xdc = x[5], gd = x[6], gq = x[7]
    cdef double iu = x[8], iv = x[9], vu = x[10], vv = x[11]
    cdef double xu = x[12], xv = x[13], gu = x[14], gv = x[15]
    cdef double vdc = x[16], ths = x[17]

    cdef double wb = p[0], ws = p[1], vinf = p[2], rg = p[3], xg = p[4]
    cdef double ra = p[5], la = p[6], cdc = p[7], wlp = p[8], vdcr = p[9]
    cdef double kppll = p[10], kipll = p[11], kpdc = p[12], kidc = p[13]
    cdef double kpca = p[14], kica = p[15]
    cdef double rv = p[16], lv = p[17], cv = p[18], vur = p[19], wv = p[20]
    cdef double kpvv = p[21], kivv = p[22], kpcv = p[23], kicv = p[24]
    cdef double cp = p[25], rp = p[26], vpr = p[27], kpvp = p[28], kivp = p[29]
    cdef double ce = p[30], ver = p[31], kpve = p[32], kive = p[33]
    cdef double lp = p[34], kpcp = p[35], kicp = p[36], seps = p[37]
    cdef double le = p[38], kpce = p[39], kice = p[40]

    cdef int n_clamped = 0
    cdef int k
    cdef double wpll, cth, sth, irp, iip, vrp, vip, vd, vqc, idref, mda, mqa
    cdef double iout_u, iout_v, p_psu, gload
    cdef double ang, cu, cv2, irec, vpsu, xpsu, gpsu, ieq, veq, xeq, geq2
    cdef double vab, s, vrec, geqk, iref, d, ieqref, de, ipsu, iac
    cdef double icuref, icvref, muv, mvv

    wpll = ws + kppll * vq + kipll * eps
    cth = cos(th); sth = sin(th)
    irp = cth * i_d - sth * i_q
    iip = sth * i_d + cth * i_q
    vrp = vinf - (rg * irp - xg * iip)
    vip = -(xg * irp + rg * iip)
    vd = cth * vrp + sth * vip
    vqc = -sth * vrp + cth * vip
    idref = kpdc * (vdcr - vdc) + kidc * xdc
    mda = (kpca * (i_d - idref) + kica * gd + wpll * la * (-i_q)) / vdc
    mqa = (kpca * i_q + kica * gq + wpll * la * i_d) / vdc

    dx[0] = wb * (wpll - ws)
    dx[1] = vq
    dx[2] = wlp * (vqc - vq)
    dx[3] = (wb / la) * (vd - vdc * mda - ra * i_d + wpll * la * (-i_q))
    dx[4] = (wb / la) * (vqc - vdc * mqa - ra * i_q + wpll * la * i_d)
    dx[5] = vdcr - vdc
    dx[6] = i_d - idref
    dx[7] = i_q

    iout_u = 0.0
    iout_v = 0.0
    p_psu = 0.0
    gload = w[0] / (3.0 * ver * ver)
    for k in range(3):
        ang = ths - k * _TPI3
        cu = _SQ23 * cos(ang)
        cv2 = -_SQ23 * sin(ang)
        irec = x[18 + k]; vpsu = x[21 + k]; xpsu = x[24 + k]; gpsu = x[27 + k]
        ieq = x[30 + 4 * k]; veq = x[31 + 4 * k]
        xeq = x[32 + 4 * k]; geq2 = x[33 + 4 * k]

        vab = cu * vu + cv2 * vv
        s = tanh(vab / seps)
        vrec = s * vab
        geqk = kpvp * (vpr - vpsu) + kivp * xpsu
        iref = geqk * vrec
        d = kpcp * (iref - irec) + kicp * gpsu
        if d < 0.0:
            d = 0.0
            n_clamped += 1
        elif d > 1.0:
            d = 1.0
            n_clamped += 1

        ieqref = kpve * (ver - veq) + kive * xeq
        de = kpce * (ieqref - ieq) + kice * geq2
        if de < 0.0:
            de = 0.0
            n_clamped += 1
        elif de > 1.0:
            de = 1.0
            n_clamped += 1
        ipsu = de * ieq

        iac = s * irec
        iout_u += cu * iac
        iout_v += cv2 * iac
        p_psu += vrec * irec

        dx[18 + k] = (wb / lp) * (vrec - (1.0 - d) * vpsu - rp * irec)
        dx[21 + k] = (wb / cp) * ((1.0 - d) * irec - ipsu)
        dx[24 + k] = vpr - vpsu
        dx[27 + k] = iref - irec
        dx[30 + 4 * k] = (wb / le) * (de * vpsu - veq)
        dx[31 + 4 * k] = (wb / ce) * (ieq - gload * veq)
        dx[32 + 4 * k] = ver - veq
        dx[33 + 4 * k] = ieqref - ieq

    icuref = kpvv * (vur - vu) + kivv * xu - wv * cv * (-vv)
    icvref = kpvv * (0.0 - vv) + kivv * xv - wv * cv * vu
    muv = (kpcv * (icuref - iu) + kicv * gu - wv * lv * (-iv)) / vdc
    mvv = (kpcv * (icvref - iv) + kicv * gv - wv * lv * iu) / vdc
    dx[8] = (wb / lv) * (vdc * muv - vu - rv * iu + wv * lv * (-iv))
    dx[9] = (wb / lv) * (vdc * mvv - vv - rv * iv + wv * lv * iu)
    dx[10] = (wb / cv) * (iu - iout_u + wv * cv * (-vv))
    dx[11] = (wb / cv) * (iv - iout_v + wv * cv * vu)
    dx[12] = vur - vu
    dx[13] = 0.0 - vv
    dx[14] = icuref - iu
    dx[15] = icvref - iv

    dx[16] = (wb / cdc) * ((mda * i_d + mqa * i_q) - (muv * iu + mvv * iv))
    dx[17] = wb * wv

    return n_clamped
