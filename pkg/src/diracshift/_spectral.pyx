# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled spectral summation kernel.

Same contract as ``_spectral_py.synthesize``.  Positions are processed in
tiles that stay in cache; inside a tile the phase factor is advanced by a
complex rotation per node and re-seeded exactly at every block start, and
block partial sums are Kahan-added into the totals.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

cdef enum:
    TILE = 256


def synthesize(coef, double k_start, double dk, z, int block=128):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2, mode="c"] c_arr = np.ascontiguousarray(coef, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] z_arr = np.ascontiguousarray(z, dtype=np.float64)
    cdef Py_ssize_t nch = c_arr.shape[0]
    cdef Py_ssize_t nodes = c_arr.shape[1]
    cdef Py_ssize_t npts = z_arr.shape[0]
    if block < 1:
        raise ValueError("block must be positive")

    cdef double[:, ::1] cre = np.ascontiguousarray(c_arr.real)
    cdef double[:, ::1] cim = np.ascontiguousarray(c_arr.imag)
    cdef double[::1] zz = z_arr

    out = np.zeros((nch, npts), dtype=np.complex128)
    cdef double[:, ::1] tot_re = np.zeros((nch, npts))
    cdef double[:, ::1] tot_im = np.zeros((nch, npts))
    cdef double[:, ::1] cmp_re = np.zeros((nch, npts))
    cdef double[:, ::1] cmp_im = np.zeros((nch, npts))

    cdef double[:, ::1] blk_re = np.zeros((nch, TILE))
    cdef double[:, ::1] blk_im = np.zeros((nch, TILE))
    cdef double[::1] ph_re = np.zeros(TILE)
    cdef double[::1] ph_im = np.zeros(TILE)
    cdef double[::1] st_re = np.zeros(TILE)
    cdef double[::1] st_im = np.zeros(TILE)

    cdef Py_ssize_t t0, tn, b0, bn, j, c, i
    cdef double ang, ar, ai, tmp, y, t
    cdef double *br
    cdef double *bi
    cdef double *pr = &ph_re[0]
    cdef double *pi = &ph_im[0]
    cdef double *sr = &st_re[0]
    cdef double *si = &st_im[0]

    with nogil:
        t0 = 0
        while t0 < npts:
            tn = min(<Py_ssize_t>TILE, npts - t0)
            for i in range(tn):
                st_re[i] = cos(dk * zz[t0 + i])
                st_im[i] = sin(dk * zz[t0 + i])
            b0 = 0
            while b0 < nodes:
                bn = min(<Py_ssize_t>block, nodes - b0)
                for i in range(tn):
                    ang = (k_start + b0 * dk) * zz[t0 + i]
                    ph_re[i] = cos(ang)
                    ph_im[i] = sin(ang)
                for c in range(nch):
                    for i in range(tn):
                        blk_re[c, i] = 0.0
                        blk_im[c, i] = 0.0
                for j in range(b0, b0 + bn):
                    for c in range(nch):
                        ar = cre[c, j]
                        ai = cim[c, j]
                        br = &blk_re[c, 0]
                        bi = &blk_im[c, 0]
                        for i in range(tn):
                            br[i] += ar * pr[i] - ai * pi[i]
                            bi[i] += ar * pi[i] + ai * pr[i]
                    for i in range(tn):
                        tmp = pr[i] * sr[i] - pi[i] * si[i]
                        pi[i] = pr[i] * si[i] + pi[i] * sr[i]
                        pr[i] = tmp
                for c in range(nch):
                    for i in range(tn):
                        y = blk_re[c, i] - cmp_re[c, t0 + i]
                        t = tot_re[c, t0 + i] + y
                        cmp_re[c, t0 + i] = (t - tot_re[c, t0 + i]) - y
                        tot_re[c, t0 + i] = t
                        y = blk_im[c, i] - cmp_im[c, t0 + i]
                        t = tot_im[c, t0 + i] + y
                        cmp_im[c, t0 + i] = (t - tot_im[c, t0 + i]) - y
                        tot_im[c, t0 + i] = t
                b0 += block
            t0 += TILE

    out.real = np.asarray(tot_re)
    out.imag = np.asarray(tot_im)
    return out
