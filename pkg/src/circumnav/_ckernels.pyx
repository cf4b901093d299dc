# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Must stay operation-for-operation identical to
``_pykernels.py`` so both backends agree to the bit."""
from libc.math cimport sqrt, atan2, fabs, M_PI
from libc.stdlib cimport malloc, free

cdef double TWO_PI = 2.0 * M_PI

FIT_OK = 0
FIT_NONCONVERGED = 1
FIT_DEGENERATE = 2

# extra Gauss-Newton steps once the gradient test passes (see _pykernels)
cdef int POLISH_STEPS = 2


cdef double[::1] _as_view(a):
    import numpy as np
    return np.ascontiguousarray(a, dtype=np.float64)


cdef double _cost(double* px, double* py, double* d, Py_ssize_t n,
                  double cx, double cy, double r) nogil:
    cdef double s = 0.0, dx, dy, f
    cdef Py_ssize_t i
    for i in range(n):
        dx = px[i] - cx
        dy = py[i] - cy
        f = sqrt(dx * dx + dy * dy) - r - d[i]
        s += f * f
    return s


cdef double _min_singular(double* px, double* py, Py_ssize_t n) nogil:
    cdef double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0
    cdef double ax, ay, half, lam
    cdef Py_ssize_t i
    for i in range(n):
        mx += px[i]
        my += py[i]
    mx /= n
    my /= n
    for i in range(n):
        ax = px[i] - mx
        ay = py[i] - my
        sxx += ax * ax
        syy += ay * ay
        sxy += ax * ay
    half = 0.5 * (sxx - syy)
    lam = 0.5 * (sxx + syy) - sqrt(half * half + sxy * sxy)
    if lam < 0.0:
        lam = 0.0
    return sqrt(lam)


def min_singular_centered(px, py):
    cdef double[::1] vx = _as_view(px)
    cdef double[::1] vy = _as_view(py)
    return _min_singular(&vx[0], &vy[0], vx.shape[0])


def fit_circle_lm(px, py, d, double cx, double cy, double r, double r_floor,
                  int max_iter, double gtol, double lam0, double degen_tol):
    cdef double[::1] vx = _as_view(px)
    cdef double[::1] vy = _as_view(py)
    cdef double[::1] vd = _as_view(d)
    cdef Py_ssize_t n = vx.shape[0], i
    cdef double* X = &vx[0]
    cdef double* Y = &vy[0]
    cdef double* D = &vd[0]
    cdef double cost, ncost, lam, dx, dy, dist, ux, uy, f
    cdef double a00, a01, a02, a11, a12, a22, g0, g1, g2, gr
    cdef double l00, l10, l20, l11, l21, l22, y0, y1, y2, s0, s1, s2
    cdef double ncx, ncy, nr, scale
    cdef int it = 0, status = 1, polish = 0
    if _min_singular(X, Y, n) <= degen_tol:
        return cx, cy, r, _cost(X, Y, D, n, cx, cy, r), 0, 2
    if r < r_floor:
        r = r_floor
    cost = _cost(X, Y, D, n, cx, cy, r)
    lam = lam0
    with nogil:
        while True:
            a00 = 0.0; a01 = 0.0; a02 = 0.0; a11 = 0.0; a12 = 0.0; a22 = 0.0
            g0 = 0.0; g1 = 0.0; g2 = 0.0
            for i in range(n):
                dx = X[i] - cx
                dy = Y[i] - cy
                dist = sqrt(dx * dx + dy * dy)
                if dist < 1e-12:
                    ux = 1.0
                    uy = 0.0
                else:
                    ux = dx / dist
                    uy = dy / dist
                f = dist - r - D[i]
                a00 += ux * ux
                a01 += ux * uy
                a02 += ux
                a11 += uy * uy
                a12 += uy
                a22 += 1.0
                g0 -= ux * f
                g1 -= uy * f
                g2 -= f
            gr = g2
            if r <= r_floor and gr > 0.0:
                gr = 0.0
            if fabs(g0) <= gtol and fabs(g1) <= gtol and fabs(gr) <= gtol:
                status = 0
                if polish >= POLISH_STEPS:
                    break
                polish += 1
            if it >= max_iter:
                break
            it += 1
            l00 = sqrt(a00 + lam)
            l10 = a01 / l00
            l20 = a02 / l00
            l11 = sqrt(a11 + lam - l10 * l10)
            l21 = (a12 - l20 * l10) / l11
            l22 = sqrt(a22 + lam - l20 * l20 - l21 * l21)
            y0 = -g0 / l00
            y1 = (-g1 - l10 * y0) / l11
            y2 = (-g2 - l20 * y0 - l21 * y1) / l22
            s2 = y2 / l22
            s1 = (y1 - l21 * s2) / l11
            s0 = (y0 - l10 * s1 - l20 * s2) / l00
            ncx = cx + s0
            ncy = cy + s1
            nr = r + s2
            if nr < r_floor:
                nr = r_floor
            ncost = _cost(X, Y, D, n, ncx, ncy, nr)
            if ncost < cost:
                cx = ncx
                cy = ncy
                r = nr
                cost = ncost
                lam = lam / 10.0
            else:
                if polish:
                    break
                scale = 1.0 + fabs(cx) + fabs(cy) + fabs(r)
                if fabs(ncx - cx) + fabs(ncy - cy) + fabs(nr - r) <= 1e-15 * scale:
                    status = 0
                    break
                lam = lam * 10.0
    return cx, cy, r, cost, it, status


def control_law(px, py, double chx, double chy, double rh, double cdx,
                double cdy, double rd, double eps):
    cdef double[::1] vx = _as_view(px)
    cdef double[::1] vy = _as_view(py)
    cdef Py_ssize_t n = vx.shape[0], i, j
    cdef double ax, ay, bx, by, b, radial, tang, ddx, ddy, dist
    cdef double* buf = <double*> malloc(6 * n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* dc = buf
    cdef double* psix = buf + n
    cdef double* psiy = buf + 2 * n
    cdef double* beta = buf + 3 * n
    cdef double* ux = buf + 4 * n
    cdef double* uy = buf + 5 * n
    cdef Py_ssize_t bad = -1
    try:
        for i in range(6 * n):
            buf[i] = 0.0
        for i in range(n):
            ddx = chx - vx[i]
            ddy = chy - vy[i]
            dist = sqrt(ddx * ddx + ddy * ddy)
            if not dist > eps:
                bad = i
                break
            dc[i] = dist
            psix[i] = ddx / dist
            psiy[i] = ddy / dist
        if bad < 0:
            for i in range(n):
                j = i + 1
                if j == n:
                    j = 0
                ax = vx[i] - chx
                ay = vy[i] - chy
                bx = vx[j] - chx
                by = vy[j] - chy
                b = atan2(ax * by - ay * bx, ax * bx + ay * by)
                if b < 0.0:
                    b += TWO_PI
                if b >= TWO_PI:
                    b = 0.0
                beta[i] = b
                radial = (dc[i] - rh) - rd
                tang = b * dc[i]
                ux[i] = cdx + radial * psix[i] + tang * psiy[i]
                uy[i] = cdy + radial * psiy[i] - tang * psix[i]
        return ([ux[i] for i in range(n)], [uy[i] for i in range(n)],
                [beta[i] for i in range(n)], [dc[i] for i in range(n)],
                [psix[i] for i in range(n)], [psiy[i] for i in range(n)], bad)
    finally:
        free(buf)
