"""Airy and Bessel model problems and the local parametrices built from them."""

import mpmath as mp

from .curve import ConformalityError, conf_coord_hard, conf_coord_soft, half_plane
from .numerics import airy, bessel_mod, bessel_mod_derivative
from .outer import CHANNELS, channel_weight, outer_N


class SectorError(ValueError):
    pass


_W = None


def _omega():
    return mp.expjpi(mp.mpf(2) / 3)


def airy_sector(zeta):
    zeta = mp.mpc(zeta)
    if zeta == 0:
        raise SectorError("zeta = 0 is the model's branch point")
    ar = mp.arg(zeta)
    for ray in (0, 2 * mp.pi / 3, -2 * mp.pi / 3):
        if abs(ar - ray) < mp.mp.eps * 8:
            raise SectorError("zeta lies on a model ray")
    if mp.im(zeta) == 0 and mp.re(zeta) < 0:
        raise SectorError("zeta lies on the negative axis")
    if ar > 2 * mp.pi / 3:
        return 2
    if ar > 0:
        return 1
    if ar > -2 * mp.pi / 3:
        return 4
    return 3


def airy_model(zeta, sector=None):
    """Normalised Airy model: det = 1 and

    Phi(zeta) ~ (1/sqrt 2) zeta^{-sigma3/4} [[1, i], [i, 1]] exp(-(2/3) zeta^{3/2} sigma3).

    Jumps (rays oriented to the origin, positive axis outward):
    [[1,1],[0,1]] on arg 0, [[1,0],[1,1]] on arg +-2pi/3, [[0,1],[-1,0]] on arg pi.
    """
    zeta = mp.mpc(zeta)
    sector = sector or airy_sector(zeta)
    w = _omega()
    e = mp.diag([mp.expjpi(-mp.mpf(1) / 6), mp.expjpi(mp.mpf(1) / 6)])
    a0, a0p = airy(zeta)
    if sector in (1, 2):
        a2, a2p = airy(w * w * zeta)
        m = mp.matrix([[a0, a2], [a0p, w * w * a2p]]) * e
        if sector == 2:
            m = m * mp.matrix([[1, 0], [-1, 1]])
    else:
        a1, a1p = airy(w * zeta)
        m = mp.matrix([[a0, -w * w * a1], [a0p, -a1p]]) * e
        if sector == 3:
            m = m * mp.matrix([[1, 0], [1, 1]])
    return mp.sqrt(2 * mp.pi) * mp.expjpi(mp.mpf(1) / 6) * mp.diag([1, -1j]) * m


def airy_outer_factor(zeta, mirrored=False):
    """(1/sqrt 2) zeta^{-sigma3/4} M with M = [[1, i], [i, 1]] ([[1,-i],[-i,1]] mirrored)."""
    zeta = mp.mpc(zeta)
    s = -1 if mirrored else 1
    q = zeta ** (mp.mpf(1) / 4)
    return mp.matrix([[1 / q, 0], [0, q]]) * mp.matrix([[1, s * 1j], [s * 1j, 1]]) / mp.sqrt(2)


def airy_model_normalised(zeta):
    """Phi(zeta) exp((2/3) zeta^{3/2} sigma3) divided on the left by the outer factor: I + O(zeta^{-3/2})."""
    zeta = mp.mpc(zeta)
    x = mp.mpf(2) / 3 * zeta ** mp.mpf(1.5)
    return mp.inverse(airy_outer_factor(zeta)) * airy_model(zeta) * mp.diag([mp.exp(x), mp.exp(-x)])


# ---------------------------------------------------------------- Bessel

def _hankel(kind, alpha, x, deriv=False):
    """H^{(1,2)}_alpha(x) (or derivative) via K: H1(x) = 2/(pi i) e^{-i alpha pi/2} K(x e^{-i pi/2})."""
    if kind == 1:
        rot = mp.expjpi(-mp.mpf(1) / 2)
        pre = 2 / (mp.pi * 1j) * mp.expjpi(-alpha / 2)
    else:
        rot = mp.expjpi(mp.mpf(1) / 2)
        pre = -2 / (mp.pi * 1j) * mp.expjpi(alpha / 2)
    if deriv:
        return pre * rot * bessel_mod_derivative("K", alpha, x * rot)
    return pre * bessel_mod("K", alpha, x * rot)


def bessel_sector(zeta):
    zeta = mp.mpc(zeta)
    if zeta == 0:
        raise SectorError("zeta = 0 is the model's branch point")
    ar = mp.arg(zeta)
    for ray in (2 * mp.pi / 3, -2 * mp.pi / 3):
        if abs(ar - ray) < mp.mp.eps * 8:
            raise SectorError("zeta lies on a model ray")
    if mp.im(zeta) == 0 and mp.re(zeta) < 0:
        raise SectorError("zeta lies on the negative axis")
    if abs(ar) < 2 * mp.pi / 3:
        return 1
    return 2 if ar > 0 else 3


def bessel_model(zeta, alpha, sector=None):
    """Hard-edge Bessel model with jumps [[1,0],[e^{+-alpha pi i},1]] on arg = +-2pi/3
    and [[0,1],[-1,0]] on the negative axis (all rays oriented to the origin)."""
    zeta = mp.mpc(zeta)
    alpha = mp.mpf(alpha)
    sector = sector or bessel_sector(zeta)
    r = mp.sqrt(zeta)
    if sector == 1:
        x = 2 * r
        return mp.matrix([
            [bessel_mod("I", alpha, x), 1j / mp.pi * bessel_mod("K", alpha, x)],
            [2j * mp.pi * r * bessel_mod_derivative("I", alpha, x), -2 * r * bessel_mod_derivative("K", alpha, x)],
        ])
    x = 2 * mp.sqrt(-zeta)
    if sector == 2:
        m = mp.matrix([
            [_hankel(1, alpha, x) / 2, _hankel(2, alpha, x) / 2],
            [mp.pi * r * _hankel(1, alpha, x, True), mp.pi * r * _hankel(2, alpha, x, True)],
        ])
        return m * mp.diag([mp.expjpi(alpha / 2), mp.expjpi(-alpha / 2)])
    m = mp.matrix([
        [_hankel(2, alpha, x) / 2, -_hankel(1, alpha, x) / 2],
        [-mp.pi * r * _hankel(2, alpha, x, True), mp.pi * r * _hankel(1, alpha, x, True)],
    ])
    return m * mp.diag([mp.expjpi(-alpha / 2), mp.expjpi(alpha / 2)])


def bessel_outer_factor(zeta):
    zeta = mp.mpc(zeta)
    s = 2 * mp.pi * mp.sqrt(zeta)
    return mp.diag([s ** (-mp.mpf(1) / 2), s ** (mp.mpf(1) / 2)]) * mp.matrix([[1, 1j], [1j, 1]]) / mp.sqrt(2)


def bessel_model_normalised(zeta, alpha):
    zeta = mp.mpc(zeta)
    x = 2 * mp.sqrt(zeta)
    return mp.inverse(bessel_outer_factor(zeta)) * bessel_model(zeta, alpha) * mp.diag([mp.exp(-x), mp.exp(x)])


# ---------------------------------------------------------------- embedding and parametrices

def embed_channel(B, channel):
    """3x3 identity with the 2x2 block B on rows/cols (i, j) (1-based, order kept)."""
    i, j = channel[0] - 1, channel[1] - 1
    E = mp.eye(3)
    E[i, i], E[i, j], E[j, i], E[j, j] = B[0, 0], B[0, 1], B[1, 0], B[1, 1]
    return E


def _chan1(name):
    i, j = CHANNELS[name]
    return (i + 1, j + 1)


class SoftEdgeParametrix:
    """Airy parametrix at x0 (channel (1,3)) or at xi_* (channel (3,2), mirrored model)."""

    def __init__(self, sm, phases, n, edge="x0"):
        self.sm = sm
        self.p = phases
        self.n = n
        self.edge = edge
        self.name = "Gamma" if edge == "x0" else "Delta"
        self.channel = _chan1(self.name)
        self.mirrored = edge != "x0"

    def zeta(self, z, hint=None):
        return mp.mpf(self.n) ** (mp.mpf(2) / 3) * conf_coord_soft(self.p, z, self.edge, hint)

    def _parts(self, z, hint):
        m = self.sm.model
        zeta = self.zeta(z, hint)
        phi = self.p.phi(self.name, z, hint)
        w = channel_weight(self.name, m, z, hint)
        sw = mp.sqrt(w)
        if self.edge == "x0":
            sw = w ** (mp.mpf(1) / 2)
        return zeta, phi, w, sw

    def E(self, z, hint=None):
        zeta, phi, w, sw = self._parts(z, hint)
        if mp.im(zeta) == 0 and mp.re(zeta) < 0:
            # zeta^{1/4} from the side the point came from
            s = half_plane(z, hint) * (1 if self.edge == "x0" else -1)
            zeta = mp.mpc(mp.re(zeta), s * mp.mpf(2) ** (-2 * mp.mp.prec))
        A = airy_outer_factor(zeta, self.mirrored)
        B = mp.diag([sw, 1 / sw]) * mp.inverse(A)
        return outer_N(self.sm, z, hint) * embed_channel(B, self.channel)

    def model(self, zeta):
        if self.mirrored:
            s3 = mp.diag([1, -1])
            return s3 * airy_model(zeta) * s3
        return airy_model(zeta)

    def __call__(self, z, hint=None):
        zeta, phi, w, sw = self._parts(z, hint)
        if mp.im(zeta) == 0 and mp.re(zeta) < 0:
            s = half_plane(z, hint) * (1 if self.edge == "x0" else -1)
            zeta = mp.mpc(mp.re(zeta), s * mp.mpf(2) ** (-2 * mp.mp.prec))
        n = self.n
        right = mp.diag([mp.exp(-n * phi / 2) / sw, mp.exp(n * phi / 2) * sw])
        return self.E(z, hint) * embed_channel(self.model(zeta) * right, self.channel)


def build_Px0(sm, phases, n, edge="x0"):
    return SoftEdgeParametrix(sm, phases, n, edge)


def build_P0(sm, phases, n, alpha=None):
    """Hard-edge parametrix; requires a conformal f_0 at the origin.

    For the Laguerre preset the origin is a cube-root point of the curve and
    conf_coord_hard raises ConformalityError, which is propagated.
    """
    conf_coord_hard(phases, mp.mpc(mp.mpf(1) / 10, mp.mpf(1) / 10))
    raise ConformalityError("hard-edge parametrix unavailable")  # pragma: no cover


def matching_sup(P, sm, center, radius, count=48):
    """sup over the circle of |P N^{-1} - I| (max-entry norm)."""
    worst = mp.mpf(0)
    for k in range(count):
        th = 2 * mp.pi * (k + mp.mpf(1) / 2) / count
        z = center + radius * mp.expj(th)
        D = P(z) * mp.inverse(outer_N(sm, z)) - mp.eye(3)
        worst = max(worst, max(abs(D[i, j]) for i in range(3) for j in range(3)))
    return worst


def global_P(sm, cs, parametrices, z, hint=None):
    """N outside the disks, the disk's parametrix inside (KeyError for a disk without one)."""
    reg = cs.region(complex(z))
    if reg in ("U0", "Ux0", "Uxi"):
        if reg not in parametrices or parametrices[reg] is None:
            raise KeyError("no local parametrix for %s" % reg)
        return parametrices[reg](z, hint)
    return outer_N(sm, z, hint)
