# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same signatures as ``ecokin._kernels_py``."""
from libc.math cimport sqrt, fabs, INFINITY


def boost_many(const double[:] tau, const double[:] l, double v,
               double[:] out_tau, double[:] out_l):
    cdef Py_ssize_t i, n = tau.shape[0]
    cdef double g = 1.0 / sqrt(1.0 - v * v)
    cdef double t, x
    for i in range(n):
        t = tau[i]
        x = l[i]
        out_tau[i] = (t + v * x) * g
        out_l[i] = (x + v * t) * g


def interval_many(const double[:] tau_a, const double[:] l_a,
                  const double[:] tau_b, const double[:] l_b, double[:] out):
    cdef Py_ssize_t i, n = tau_a.shape[0]
    cdef double dt, dl
    for i in range(n):
        dt = tau_a[i] - tau_b[i]
        dl = l_a[i] - l_b[i]
        out[i] = (dt - dl) * (dt + dl)


def proper_quantity(const double[:] vs, const double[:] dts):
    cdef Py_ssize_t i, n = vs.shape[0]
    cdef double total = 0.0
    for i in range(n):
        total += dts[i] * sqrt(1.0 - vs[i] * vs[i])
    return total


def rk4_growth(double y0, double rate, double h, Py_ssize_t nsteps, double[:] out):
    cdef Py_ssize_t i
    cdef double y = y0, k1, k2, k3, k4
    out[0] = y
    for i in range(nsteps):
        k1 = rate * y
        k2 = rate * (y + 0.5 * h * k1)
        k3 = rate * (y + 0.5 * h * k2)
        k4 = rate * (y + h * k3)
        y = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        out[i + 1] = y
    return y


def power_iteration(const double[:, :] K, double[:] x, double tol, Py_ssize_t maxiter):
    cdef Py_ssize_t m = x.shape[0], i, j, it = 0
    cdef double s = 0.0, lam = 0.0, res = INFINITY, acc
    cdef double[:] y = x.copy()
    for i in range(m):
        s += x[i]
    for i in range(m):
        x[i] /= s
    while it < maxiter:
        it += 1
        s = 0.0
        for i in range(m):
            acc = x[i]
            for j in range(m):
                acc += K[i, j] * x[j]
            y[i] = acc
            s += acc
        for i in range(m):
            x[i] = y[i] / s
        lam = s - 1.0
        res = 0.0
        for i in range(m):
            acc = -lam * x[i]
            for j in range(m):
                acc += K[i, j] * x[j]
            if fabs(acc) > res:
                res = fabs(acc)
        if res <= tol:
            break
    return lam, it, res
