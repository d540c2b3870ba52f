"""Pure-Python kernels. Used when the compiled ``_kernels`` extension is absent.

Every function here has a twin with the same signature in ``_kernels.pyx``.
Array arguments are 1-D (or 2-D for matrices) float64 buffers; outputs are
written into caller-provided arrays so both backends share one calling
convention.
"""
import math


def boost_many(tau, l, v, out_tau, out_l):
    g = 1.0 / math.sqrt(1.0 - v * v)
    for i in range(len(tau)):
        t = tau[i]
        x = l[i]
        out_tau[i] = (t + v * x) * g
        out_l[i] = (x + v * t) * g


def interval_many(tau_a, l_a, tau_b, l_b, out):
    for i in range(len(tau_a)):
        dt = tau_a[i] - tau_b[i]
        dl = l_a[i] - l_b[i]
        out[i] = (dt - dl) * (dt + dl)


def proper_quantity(vs, dts):
    total = 0.0
    for i in range(len(vs)):
        v = vs[i]
        total += dts[i] * math.sqrt(1.0 - v * v)
    return total


def rk4_growth(y0, rate, h, nsteps, out):
    """Integrate dy/dx = rate * y with fixed-step RK4.

    ``out`` receives the ``nsteps + 1`` samples, starting with ``y0``.
    """
    y = y0
    out[0] = y
    for i in range(nsteps):
        k1 = rate * y
        k2 = rate * (y + 0.5 * h * k1)
        k3 = rate * (y + 0.5 * h * k2)
        k4 = rate * (y + h * k3)
        y = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        out[i + 1] = y
    return y


def power_iteration(K, x, tol, maxiter):
    """Shifted power iteration on ``K + I``.

    The shift keeps periodic irreducible matrices convergent without moving
    the Perron vector. ``x`` is overwritten with the unit-sum eigenvector.
    Returns ``(eigenvalue, iterations, residual)``.
    """
    m = len(x)
    y = [0.0] * m
    s = 0.0
    for i in range(m):
        s += x[i]
    for i in range(m):
        x[i] /= s
    lam = 0.0
    res = math.inf
    it = 0
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
        # residual of K x - lam x, infinity norm
        res = 0.0
        for i in range(m):
            acc = -lam * x[i]
            for j in range(m):
                acc += K[i, j] * x[j]
            if abs(acc) > res:
                res = abs(acc)
        if res <= tol:
            break
    return lam, it, res
