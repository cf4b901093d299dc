"""Pure-Python reference implementation of the hot kernels.

Mirrors ``_ckernels.pyx`` operation for operation so both backends produce
bit-identical floats. Keep the two files in lock-step.
"""
import math

TWO_PI = 2.0 * math.pi

FIT_OK = 0
FIT_NONCONVERGED = 1
FIT_DEGENERATE = 2

# extra Gauss-Newton steps once the gradient test passes: |J^T f| <= gtol
# still leaves ~gtol/sigma_min**2 parameter error on poorly spread agents
POLISH_STEPS = 2


def _tolist(a):
    return a.tolist() if hasattr(a, "tolist") else list(a)


def _cost(px, py, d, n, cx, cy, r):
    s = 0.0
    for i in range(n):
        dx = px[i] - cx
        dy = py[i] - cy
        f = math.sqrt(dx * dx + dy * dy) - r - d[i]
        s += f * f
    return s


def min_singular_centered(px, py):
    px = _tolist(px)
    py = _tolist(py)
    n = len(px)
    mx = 0.0
    my = 0.0
    for i in range(n):
        mx += px[i]
        my += py[i]
    mx /= n
    my /= n
    sxx = 0.0
    syy = 0.0
    sxy = 0.0
    for i in range(n):
        ax = px[i] - mx
        ay = py[i] - my
        sxx += ax * ax
        syy += ay * ay
        sxy += ax * ay
    half = 0.5 * (sxx - syy)
    lam = 0.5 * (sxx + syy) - math.sqrt(half * half + sxy * sxy)
    if lam < 0.0:
        lam = 0.0
    return math.sqrt(lam)


def fit_circle_lm(px, py, d, cx, cy, r, r_floor, max_iter, gtol, lam0, degen_tol):
    """Levenberg-damped Gauss-Newton on ``f_i = |p_i - c| - r - d_i``.

    Returns ``(cx, cy, r, cost, iterations, status)``.
    """
    px = _tolist(px)
    py = _tolist(py)
    d = _tolist(d)
    n = len(px)
    if min_singular_centered(px, py) <= degen_tol:
        return cx, cy, r, _cost(px, py, d, n, cx, cy, r), 0, FIT_DEGENERATE
    if r < r_floor:
        r = r_floor
    cost = _cost(px, py, d, n, cx, cy, r)
    lam = lam0
    it = 0
    polish = 0
    status = FIT_NONCONVERGED
    while True:
        a00 = a01 = a02 = a11 = a12 = a22 = 0.0
        g0 = g1 = g2 = 0.0
        for i in range(n):
            dx = px[i] - cx
            dy = py[i] - cy
            dist = math.sqrt(dx * dx + dy * dy)
            if dist < 1e-12:
                ux = 1.0
                uy = 0.0
            else:
                ux = dx / dist
                uy = dy / dist
            f = dist - r - d[i]
            # Jacobian row is (-ux, -uy, -1)
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
        if abs(g0) <= gtol and abs(g1) <= gtol and abs(gr) <= gtol:
            status = FIT_OK
            if polish >= POLISH_STEPS:
                break
            polish += 1
        if it >= max_iter:
            break
        it += 1
        # Cholesky solve of (A + lam*I) s = -g
        l00 = math.sqrt(a00 + lam)
        l10 = a01 / l00
        l20 = a02 / l00
        l11 = math.sqrt(a11 + lam - l10 * l10)
        l21 = (a12 - l20 * l10) / l11
        l22 = math.sqrt(a22 + lam - l20 * l20 - l21 * l21)
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
        ncost = _cost(px, py, d, n, ncx, ncy, nr)
        if ncost < cost:
            cx = ncx
            cy = ncy
            r = nr
            cost = ncost
            lam = lam / 10.0
        else:
            if polish:
                break
            # the step no longer moves the iterate: minimum at working precision
            scale = 1.0 + abs(cx) + abs(cy) + abs(r)
            if abs(ncx - cx) + abs(ncy - cy) + abs(nr - r) <= 1e-15 * scale:
                status = FIT_OK
                break
            lam = lam * 10.0
    return cx, cy, r, cost, it, status


def control_law(px, py, chx, chy, rh, cdx, cdy, rd, eps):
    """Per-agent control input against a shared circle estimate.

    Agent ``i``'s successor is ``(i + 1) % n``. Returns
    ``(ux, uy, beta, dc, psix, psiy, bad)`` where ``bad`` is the index of the
    first agent violating the bearing precondition, or -1.
    """
    px = _tolist(px)
    py = _tolist(py)
    n = len(px)
    dc = [0.0] * n
    psix = [0.0] * n
    psiy = [0.0] * n
    beta = [0.0] * n
    ux = [0.0] * n
    uy = [0.0] * n
    for i in range(n):
        vx = chx - px[i]
        vy = chy - py[i]
        dist = math.sqrt(vx * vx + vy * vy)
        if not dist > eps:
            return ux, uy, beta, dc, psix, psiy, i
        dc[i] = dist
        psix[i] = vx / dist
        psiy[i] = vy / dist
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        ax = px[i] - chx
        ay = py[i] - chy
        bx = px[j] - chx
        by = py[j] - chy
        b = math.atan2(ax * by - ay * bx, ax * bx + ay * by)
        if b < 0.0:
            b += TWO_PI
        if b >= TWO_PI:
            b = 0.0
        beta[i] = b
        radial = (dc[i] - rh) - rd
        tang = b * dc[i]
        # E @ psi = (psi_y, -psi_x)
        ux[i] = cdx + radial * psix[i] + tang * psiy[i]
        uy[i] = cdy + radial * psiy[i] - tang * psix[i]
    return ux, uy, beta, dc, psix, psiy, -1
