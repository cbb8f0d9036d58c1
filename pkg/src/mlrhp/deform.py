"""Y -> X -> T -> S and back.

X = Y (I - z^{-beta} E32) turns the two weights on (0, inf) into a Nikishin
pair: J_X = I + w2 E13 on (0, inf) and I + 2i sin(pi beta)|x|^{-beta} E32 on
(-inf, 0).  T = L X diag(e^{-n g1}, e^{n g2}, e^{n (g1 - g2)}) L^{-1} with a
constant diagonal L; its conductor jumps take the phase form

    [[e^{-n phi_+}, w], [0, e^{-n phi_-}]]  in the ordered channel (i, j).
"""

from dataclasses import dataclass

import mpmath as mp

from .curve import _g1_from_t, _g2_from_t, branches_at, conf_coord_soft, half_plane
from .outer import CHANNELS, channel_weight, zpow


def jump_Y(m, x):
    x = mp.mpf(x)
    if x <= 0:
        raise ValueError("jump_Y lives on (0, inf)")
    J = mp.eye(3)
    J[0, 1] = m.weight(1, x)
    J[0, 2] = m.weight(2, x)
    return J


def _beta(m):
    return mp.mpf(m.alpha2) - mp.mpf(m.alpha1)


def nikishin_factor(m, z, hint=None):
    F = mp.eye(3)
    F[2, 1] = -zpow(z, -_beta(m), hint)
    return F


def jump_X(m, x, hint="+"):
    x = mp.mpf(x)
    J = mp.eye(3)
    if x > 0:
        J[0, 2] = m.weight(2, x)
    else:
        J[2, 1] = 2j * mp.sin(mp.pi * _beta(m)) * (-x) ** (-_beta(m))
    return J


def L_matrix(p, m, n):
    a = p.curve.af
    l1 = mp.exp(n * p.ell1)
    l2 = mp.exp(-n * p.ell2) * mp.expjpi(n * (2 * a - 1))
    return mp.diag([l1, l2, 1])


def D_matrix(p, z, n, hint=None):
    c = p.curve
    t = branches_at(c, z, hint)
    g1 = _g1_from_t(c, mp.mpc(z), t[0])
    g2 = _g2_from_t(c, t[1])
    return mp.diag([mp.exp(-n * g1), mp.exp(n * g2), mp.exp(n * (g1 - g2))])


def to_T(Y, p, m, n):
    """T-field from a Y-field (callable z, hint -> 3x3)."""
    L = L_matrix(p, m, n)
    Li = mp.inverse(L)

    def T(z, hint=None):
        return L * Y(z, hint) * nikishin_factor(m, z, hint) * D_matrix(p, z, n, hint) * Li
    return T


def jump_T(p, m, n, x):
    """J_T = L D_-^{-1} J_X D_+ L^{-1} on the real axis, from the definitions."""
    L = L_matrix(p, m, n)
    Dp = D_matrix(p, x, n, "+")
    Dm = D_matrix(p, x, n, "-")
    return L * mp.inverse(Dm) * jump_X(m, x) * Dp * mp.inverse(L)


def _channel_for_x(c, x):
    return "Gamma" if x > 0 else "Delta"


def jump_T_phase(p, m, n, x):
    """Phase form of J_T: conductor block [[e^{-n phi+}, w], [0, e^{-n phi-}]], else I + w e^{n phi} E_ij."""
    c = p.curve
    name = _channel_for_x(c, x)
    i, j = CHANNELS[name]
    w = channel_weight(name, m, x, "+")
    J = mp.eye(3)
    on = (0 < x < c.x0) if name == "Gamma" else (c.xi_star < x < 0)
    if on:
        J[i, i] = mp.exp(-n * p.phi(name, x, "+"))
        J[j, j] = mp.exp(-n * p.phi(name, x, "-"))
        J[i, j] = w
    else:
        J[i, j] = w * mp.exp(n * p.phi(name, x))
    return J


@dataclass
class TriangularFactors:
    upper: mp.matrix
    central: mp.matrix
    lower: mp.matrix

    def assemble(self):
        return self.lower * self.central * self.upper


def lens_factor(p, m, n, name, z, hint=None):
    """I + (e^{-n phi(z)}/w(z)) E_ji, analytic in the lens on either side."""
    i, j = CHANNELS[name]
    F = mp.eye(3)
    F[j, i] = mp.exp(-n * p.phi(name, z, hint)) / channel_weight(name, m, z, hint)
    return F


def factor_jumps(p, m, n, x):
    c = p.curve
    name = _channel_for_x(c, x)
    i, j = CHANNELS[name]
    w = channel_weight(name, m, x, "+")
    J0 = mp.eye(3)
    J0[i, i] = J0[j, j] = 0
    J0[i, j] = w
    J0[j, i] = -1 / w
    return TriangularFactors(lens_factor(p, m, n, name, x, "+"), J0, lens_factor(p, m, n, name, x, "-"))


def lens_region(cs, p, z):
    """('Gamma'|'Delta', +1|-1) if z lies inside a lens, else None."""
    z = complex(z)
    if z.imag == 0:
        return None
    up = 1 if z.imag > 0 else -1
    c = p.curve
    reg = cs.region(z)
    if reg in ("Gamma+", "Gamma-"):
        return ("Gamma", up)
    if reg in ("Delta+", "Delta-"):
        return ("Delta", up)
    if reg in ("Ux0", "Uxi"):
        edge = "x0" if reg == "Ux0" else "xi"
        f = conf_coord_soft(p, z, edge)
        if abs(mp.arg(f)) > 2 * mp.pi / 3:
            return ("Gamma" if edge == "x0" else "Delta", up)
        return None
    if reg == "U0":
        ang = abs(mp.arg(z))
        lo = mp.pi / 3
        if ang < lo:
            return ("Gamma", up)
        if ang > mp.pi - lo:
            return ("Delta", up)
        return None
    return None


def to_S(T, p, m, n, cs):
    def S(z, hint=None):
        tv = T(z, hint)
        lr = lens_region(cs, p, z)
        if lr is None:
            return tv
        name, up = lr
        F = lens_factor(p, m, n, name, z)
        return tv * mp.inverse(F) if up > 0 else tv * F
    return S


def reconstruct_T_from_S(S, p, m, n, cs):
    def T(z, hint=None):
        sv = S(z, hint)
        lr = lens_region(cs, p, z)
        if lr is None:
            return sv
        name, up = lr
        F = lens_factor(p, m, n, name, z)
        return sv * F if up > 0 else sv * mp.inverse(F)
    return T


def first_row_S(p, m, n, cs, Yrow, z):
    """Row 1 of S from row 1 of Y (L is diagonal, so only L_11 enters on the left)."""
    z = mp.mpc(z)
    L = L_matrix(p, m, n)
    row = L[0, 0] * Yrow * nikishin_factor(m, z) * D_matrix(p, z, n) * mp.inverse(L)
    lr = lens_region(cs, p, z)
    if lr is None:
        return row
    F = lens_factor(p, m, n, lr[0], z)
    return row * mp.inverse(F) if lr[1] > 0 else row * F


def reconstruct_Y11(T11, G, n):
    """Y11 = e^{n G} T11 (the constant prefactor is the identity here)."""
    return mp.exp(n * G) * T11


def jump_S_on_lip(p, m, n, lip, z):
    return lens_factor(p, m, n, lip.name, z)


def lip_jump_norm(p, m, n, lip, z):
    """|J_S - I| at a lip point (max-entry norm)."""
    i, j = CHANNELS[lip.name]
    return abs(mp.exp(-n * p.phi(lip.name, z)) / channel_weight(lip.name, m, z))


def lens_decay_fit(p, model_for_n, ns, cs, points_per_lip=8):
    """Least-squares fit of log sup |J_S - I| over fixed lip nodes against n."""
    import numpy as np
    from .curve import lip_nodes
    nodes = [(lip, z) for lip, z in lip_nodes(cs, points_per_lip) if not any(d.contains(z) for d in cs.disks)]
    logs = []
    for n in ns:
        m = model_for_n(n)
        logs.append(float(mp.log(max(lip_jump_norm(p, m, n, lip, z) for lip, z in nodes))))
    A = np.vstack([np.asarray(ns, float), np.ones(len(ns))]).T
    coef, *_ = np.linalg.lstsq(A, np.asarray(logs), rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((np.asarray(logs) - pred) ** 2))
    ss_tot = float(np.sum((np.asarray(logs) - np.mean(logs)) ** 2))
    r2 = 1 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {"ns": list(ns), "log_sup": logs, "slope": float(coef[0]), "intercept": float(coef[1]), "r2": r2,
            "nodes": len(nodes), "pass": bool(coef[0] < 0 and r2 >= 0.99)}
