"""Outer parametrix N = C M built from the three sheets of the curve.

Column j of M is (1, t_j, t_j^2) H_j Phi_j with H_j = F_theta(t_j, z)^{-1/2}.
Phi_j carries the gauge z^{c_j}, c = (0, alpha1, alpha2), so that the
conductor jumps of N are the weighted central factors
[[0, w], [-1/w, 0]] rather than bare permutations.  Every power is split
into principal powers of (t - const) or z, each continuous in an open
half-plane; the remaining constant jumps across the axis are fixed by
per-sheet, per-half-plane constants kappa found by walking the jump
relations.
"""

from collections import deque
from dataclasses import dataclass

import mpmath as mp

from .curve import branches_at, half_plane


class MonodromyError(RuntimeError):
    pass


def _side(z, hint):
    return half_plane(z, hint)


def zpow(z, c, hint=None):
    """z^c with the principal branch; on the negative axis the side hint decides."""
    z = mp.mpc(z)
    if mp.im(z) == 0 and mp.re(z) < 0:
        return (-mp.re(z)) ** c * mp.expjpi(c * _side(z, hint))
    return z ** c


def weight_Gamma(m, z, hint=None):
    return zpow(z, mp.mpf(m.alpha2), hint)


def weight_Delta(m, z, hint=None):
    beta = mp.mpf(m.alpha2) - mp.mpf(m.alpha1)
    z = mp.mpc(z)
    mz = -z
    if mp.im(mz) == 0 and mp.re(mz) < 0:
        p = (-mp.re(mz)) ** (-beta) * mp.expjpi(-beta * -_side(z, hint))
    else:
        p = mz ** (-beta)
    return 2j * mp.sin(mp.pi * beta) * p


CHANNELS = {"Gamma": (0, 2), "Delta": (2, 1)}   # 0-based (i, j)


def channel_weight(name, m, z, hint=None):
    return weight_Gamma(m, z, hint) if name == "Gamma" else weight_Delta(m, z, hint)


def prefactor_H(c, j, z, hint=None, t=None):
    """H_j = 1/sqrt(F_theta(t_j, z)), written as a product of principal powers."""
    if t is None:
        t = branches_at(c, z, hint)[j]
    a, b = c.af, c.bf
    return mp.sqrt(t - a) * mp.sqrt(t - b) / (t * mp.sqrt(t - c.t_plus) * mp.sqrt(t - c.t_minus))


def gauge_exponents(m):
    return (mp.mpf(0), mp.mpf(m.alpha1), mp.mpf(m.alpha2))


def abelian_Phi(c, m, j, z, hint=None, t=None, kappa=1):
    """Phi_j without normalisation constant unless kappa is supplied."""
    if t is None:
        t = branches_at(c, z, hint)[j]
    a, b = c.af, c.bf
    a1, a2 = mp.mpf(m.alpha1), mp.mpf(m.alpha2)
    half = mp.mpf(1) / 2
    val = (t - a) ** (a1 - half) * (t - b) ** (a2 - half) * t ** (-a1 - a2)
    return kappa * zpow(z, gauge_exponents(m)[j], hint) * val


def _raw_column(c, m, j, z, hint=None, t=None):
    if t is None:
        t = branches_at(c, z, hint)[j]
    s = prefactor_H(c, j, z, hint, t) * abelian_Phi(c, m, j, z, hint, t)
    return [s, t * s, t * t * s]


def phi_language_ratios(c, z, hint=None):
    t = branches_at(c, z, hint)
    return t[0] / t[2], t[1] / t[2]


def phi_language_logs(c, z, hint=None):
    t = branches_at(c, z, hint)
    return tuple(mp.log(v) for v in t)


def _ratio(u, v):
    """rho with u = rho v, plus the proportionality defect."""
    k = max(range(3), key=lambda i: abs(v[i]))
    rho = u[k] / v[k]
    defect = max(abs(u[i] - rho * v[i]) for i in range(3)) / max(abs(x) for x in u)
    return rho, defect


def _segments(c):
    x0, xs = c.x0, c.xi_star
    return [
        ("right", None, [x0 + 1, x0 * 2 + 3]),
        ("Gamma", "Gamma", [x0 / 3, x0 * 2 / 3]),
        ("Delta", "Delta", [xs * 2 / 3, xs / 3]),
        ("left", None, [xs - 1, xs * 2 - 3]),
    ]


def calibrate_kappa(c, m, tol=None):
    """Constants kappa[(sheet, half-plane)] making N satisfy the jump relations.

    Relations across a conductor in channel (i, j):  col_j^+ = w col_i^-,
    col_i^+ = -(1/w) col_j^-, spectator column continuous.  Elsewhere on the
    axis every column is continuous.
    """
    tol = tol or mp.mpf(2) ** (-mp.mp.prec // 2)
    edges = []   # (node_plus, node_minus, rho, x, defect): kappa_plus * v+ = rho * kappa_minus * v-
    for name, chan, xs in _segments(c):
        for x in xs:
            tp = branches_at(c, x, "+")
            tm = branches_at(c, x, "-")
            vp = [_raw_column(c, m, j, x, "+", tp[j]) for j in range(3)]
            vm = [_raw_column(c, m, j, x, "-", tm[j]) for j in range(3)]
            if chan is None:
                pairs = [(k, k, 1) for k in range(3)]
            else:
                i, j = CHANNELS[chan]
                w = channel_weight(chan, m, x, "+")
                spect = 3 - i - j
                pairs = [(j, i, w), (i, j, -1 / w), (spect, spect, 1)]
            for kp, km, fac in pairs:
                # kappa_{kp,+} vp[kp] = fac kappa_{km,-} vm[km]
                rho, defect = _ratio([fac * u for u in vm[km]], vp[kp])
                if defect > tol:
                    raise MonodromyError("columns %d+/%d- not proportional on %s (defect %s)"
                                         % (kp + 1, km + 1, name, mp.nstr(defect, 3)))
                # kappa_{kp,+} = rho kappa_{km,-}
                edges.append(((kp, 1), (km, -1), rho, name))
    kappa = {(0, 1): mp.mpc(1)}
    adj = {}
    for e in edges:
        adj.setdefault(e[0], []).append((e[1], 1 / e[2]))
        adj.setdefault(e[1], []).append((e[0], e[2]))
    queue = deque([(0, 1)])
    while queue:
        u = queue.popleft()
        for v, r in adj.get(u, []):
            # kappa_u = rho kappa_v  => kappa_v = kappa_u / rho, stored as r
            if v not in kappa:
                kappa[v] = kappa[u] * r
                queue.append(v)
    if len(kappa) != 6:
        raise MonodromyError("jump relations do not connect all sheets")
    worst = mp.mpf(0)
    for (p, q, rho, name) in edges:
        d = abs(kappa[p] - rho * kappa[q]) / abs(kappa[p])
        worst = max(worst, d)
        if d > tol:
            raise MonodromyError("inconsistent jump relation on %s: %s" % (name, mp.nstr(d, 3)))
    return kappa, worst


@dataclass
class SheetMatrix:
    curve: object
    model: object
    kappa: dict
    C: mp.matrix
    consistency: mp.mpf

    def M(self, z, hint=None):
        c, m = self.curve, self.model
        t = branches_at(c, z, hint)
        h = _side(z, hint)
        cols = [[self.kappa[(j, h)] * v for v in _raw_column(c, m, j, z, hint, t[j])] for j in range(3)]
        return mp.matrix([[cols[j][k] for j in range(3)] for k in range(3)])


def build_sheet_matrix(c, m, radius_bits=None):
    kappa, worst = calibrate_kappa(c, m)
    sm = SheetMatrix(c, m, kappa, None, worst)
    # C = lim M(z)^{-1}; two radii and a Richardson step remove the 1/z term
    R = mp.mpf(2) ** (radius_bits or mp.mp.prec // 3)
    zr = mp.mpc(0, R)
    m1 = mp.inverse(sm.M(zr))
    m2 = mp.inverse(sm.M(2 * zr))
    sm.C = 2 * m2 - m1
    return sm


def outer_N(sm, z, hint=None):
    return sm.C * sm.M(z, hint)


def central_jump(name, m, x, hint="+"):
    """Weighted central factor of a conductor jump (det = 1)."""
    i, j = CHANNELS[name]
    w = channel_weight(name, m, x, hint)
    J = mp.eye(3)
    J[i, i] = 0
    J[j, j] = 0
    J[i, j] = w
    J[j, i] = -1 / w
    return J


def permutation_jump(name):
    i, j = CHANNELS[name]
    P = mp.eye(3)
    P[i, i] = P[j, j] = 0
    P[i, j] = P[j, i] = 1
    return P


def conductor_nodes(c, count=32, margin=0.02):
    """Gauss-Legendre nodes on each conductor (interior, away from the edges)."""
    out = []
    xs, ws = mp.gauss_legendre_nodes(count) if hasattr(mp, "gauss_legendre_nodes") else _gl(count)
    for name, lo, hi in (("Gamma", mp.mpf(0), c.x0), ("Delta", c.xi_star, mp.mpf(0))):
        for u in xs:
            x = lo + (hi - lo) * (margin + (1 - 2 * margin) * (u + 1) / 2)
            out.append((name, x))
    return out


def _gl(count):
    import numpy as np
    u, w = np.polynomial.legendre.leggauss(count)
    return [mp.mpf(float(v)) for v in u], [mp.mpf(float(v)) for v in w]


def jump_residual(N, c, m, count=32, expected="central"):
    """max over conductor nodes of |N_+ - N_- J| / |N_+| (J central factor or bare permutation)."""
    rows = []
    worst = mp.mpf(0)
    for name, x in conductor_nodes(c, count):
        Np = N(x, "+")
        Nm = N(x, "-")
        J = central_jump(name, m, x) if expected == "central" else permutation_jump(name)
        r = mp.mnorm(Np - Nm * J, 1) / mp.mnorm(Np, 1)
        rows.append((name, x, r))
        worst = max(worst, r)
    return {"max_residual": worst, "nodes": len(rows), "rows": rows}


def axis_continuity(N, c, points=None):
    """N has no jump on the real axis outside the conductors."""
    points = points or [c.x0 + mp.mpf(1) / 2, c.x0 + 5, c.xi_star - mp.mpf(1) / 2, c.xi_star - 5]
    worst = mp.mpf(0)
    for x in points:
        worst = max(worst, mp.mnorm(N(x, "+") - N(x, "-"), 1) / mp.mnorm(N(x, "+"), 1))
    return worst
