# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled midpoint-exponential propagation kernel.

Same contract as the pure-python fallback: assemble
H_s = sum_k c[s,k] M_k + h.c. at each step, diagonalize with LAPACK
zheevd, and apply exp(-i H_s dt) to the state.  The Hamiltonian buffer is
filled transposed so LAPACK (column-major) sees H itself; after zheevd
the buffer row i (C view) holds eigenvector i.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin
from libc.stdlib cimport free, malloc
from scipy.linalg.cython_lapack cimport zheevd

cnp.import_array()


def propagate_kernel(mats, coeffs, double dt, psi0):
    mats_c = np.ascontiguousarray(mats, dtype=np.complex128)
    coeffs_c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    psi_c = np.ascontiguousarray(psi0, dtype=np.complex128)

    cdef double complex[:, :, ::1] m = mats_c
    cdef double complex[:, ::1] c = coeffs_c
    cdef Py_ssize_t n_steps = c.shape[0]
    cdef Py_ssize_t n_terms = m.shape[0]
    cdef int dim = <int> m.shape[1]
    if c.shape[1] != n_terms:
        raise ValueError("coefficient table does not match the number of monomials")
    if psi_c.shape[0] != dim:
        raise ValueError("state dimension does not match the monomials")

    out_arr = np.empty((n_steps + 1, dim), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double complex[::1] psi = psi_c.copy()

    cdef double complex *h = <double complex *> malloc(dim * dim * sizeof(double complex))
    cdef double complex *x = <double complex *> malloc(dim * dim * sizeof(double complex))
    cdef double *w = <double *> malloc(dim * sizeof(double))
    cdef double complex *proj = <double complex *> malloc(dim * sizeof(double complex))
    cdef double complex *nxt = <double complex *> malloc(dim * sizeof(double complex))

    # zheevd workspace query
    cdef int info = 0
    cdef int lwork = -1, lrwork = -1, liwork = -1
    cdef double complex wkopt
    cdef double rwkopt
    cdef int iwkopt
    zheevd(b"V", b"L", &dim, h, &dim, w, &wkopt, &lwork, &rwkopt, &lrwork,
           &iwkopt, &liwork, &info)
    lwork = <int> wkopt.real
    lrwork = <int> rwkopt
    liwork = iwkopt
    cdef double complex *work = <double complex *> malloc(lwork * sizeof(double complex))
    cdef double *rwork = <double *> malloc(lrwork * sizeof(double))
    cdef int *iwork = <int *> malloc(liwork * sizeof(int))
    if h == NULL or x == NULL or w == NULL or proj == NULL or nxt == NULL or \
            work == NULL or rwork == NULL or iwork == NULL:
        free(h); free(x); free(w); free(proj); free(nxt); free(work); free(rwork)
        free(iwork)
        raise MemoryError()

    cdef double complex *mflat = <double complex *> &m[0, 0, 0]
    cdef Py_ssize_t s, k, i, j, n2 = dim * dim
    cdef double complex ck, acc, phase
    cdef double ang
    try:
        for j in range(dim):
            out[0, j] = psi[j]
        for s in range(n_steps):
            # x = sum_k c[s, k] M_k, accumulated with contiguous reads
            for i in range(n2):
                x[i] = 0
            for k in range(n_terms):
                ck = c[s, k]
                for i in range(n2):
                    x[i] = x[i] + ck * mflat[k * n2 + i]
            # h (C layout) holds H^T = (x + x^dag)^T, i.e. H column-major.
            for i in range(dim):
                for j in range(dim):
                    h[i * dim + j] = x[j * dim + i] + x[i * dim + j].conjugate()
            zheevd(b"V", b"L", &dim, h, &dim, w, work, &lwork, rwork, &lrwork,
                   iwork, &liwork, &info)
            if info != 0:
                raise RuntimeError(f"zheevd failed with info={info} at step {s}")
            # psi <- V exp(-i w dt) V^dag psi, eigenvector i in h[i*dim:(i+1)*dim]
            for i in range(dim):
                acc = 0
                for j in range(dim):
                    acc = acc + h[i * dim + j].conjugate() * psi[j]
                ang = -w[i] * dt
                phase = cos(ang) + 1j * sin(ang)
                proj[i] = acc * phase
            for j in range(dim):
                nxt[j] = 0
            for i in range(dim):
                acc = proj[i]
                for j in range(dim):
                    nxt[j] = nxt[j] + h[i * dim + j] * acc
            for j in range(dim):
                psi[j] = nxt[j]
                out[s + 1, j] = nxt[j]
    finally:
        free(h); free(x); free(w); free(proj); free(nxt); free(work); free(rwork)
        free(iwork)
    return out_arr
