"""Precision policy, special functions and contour quadrature.

Special functions run in mpmath at the ambient precision.  Contour
quadrature and Cauchy operators run in double precision (numpy), which is
all the small-norm error problem needs.
"""

import contextlib
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

DEFAULT_BITS = 256


class PoleError(ValueError):
    pass


class BranchError(ValueError):
    pass


class NearContourError(ValueError):
    pass


@dataclass(frozen=True)
class PrecisionContext:
    significand_bits: int = DEFAULT_BITS

    def __post_init__(self):
        if self.significand_bits < 64:
            raise ValueError("significand_bits must be at least 64")

    @property
    def tolerance(self):
        return mp.mpf(2) ** (8 - self.significand_bits)

    def activate(self):
        return mp.workprec(self.significand_bits)


@contextlib.contextmanager
def precision(bits):
    with mp.workprec(int(bits)):
        yield PrecisionContext(int(bits))


def bits_for_degree(n, requested=DEFAULT_BITS):
    """Working precision for Gram systems of degree n.

    The moment matrix loses roughly 3.5 bits per unit of degree, so the
    request is raised when it would not leave a comfortable margin.
    """
    bits = int(requested)
    if n > 48:
        bits = max(bits, 512)
    return max(bits, 4 * int(n) + 160)


# ---------------------------------------------------------------- gamma

def gamma(x):
    x = mp.mpmathify(x)
    if mp.im(x) == 0 and mp.re(x) <= 0 and mp.re(x) == mp.floor(mp.re(x)):
        raise PoleError("gamma has a pole at %s" % mp.nstr(x, 5))
    return mp.gamma(x)


# ---------------------------------------------------------------- Bessel

def _asym_coeffs(nu, kmax):
    mu = 4 * nu * nu
    out = [mp.mpf(1)]
    for k in range(1, kmax + 1):
        out.append(out[-1] * (mu - (2 * k - 1) ** 2) / (k * 8))
    return out


def _asym_sum(nu, z, sign):
    """Sum of a_k(nu) (sign/z)^k truncated at the smallest term."""
    tol = mp.mp.eps
    total = mp.mpf(1)
    term = mp.mpf(1)
    mu = 4 * nu * nu
    prev = mp.inf
    k = 0
    while True:
        k += 1
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8) * sign / z
        size = abs(term)
        if size > prev or k > 4 * mp.mp.prec:
            break
        total += term
        if size < tol * abs(total):
            break
        prev = size
    return total


def bessel_i_series(nu, z):
    nu = mp.mpmathify(nu)
    z = mp.mpmathify(z)
    if z == 0:
        return mp.mpf(1) if nu == 0 else mp.mpf(0)
    extra = int(2 * abs(z) / math.log(2)) + 20 if abs(z) > 1 else 20
    with mp.extraprec(extra):
        q = z * z / 4
        # terms (z/2)^(2k+nu) / (k! Gamma(k+nu+1)); rgamma handles negative integer nu
        term = mp.rgamma(nu + 1)
        total = term
        k = 0
        while True:
            k += 1
            if mp.isint(nu + k) and nu + k <= 0:
                term_next = mp.rgamma(nu + k + 1) / mp.factorial(k)
                term = term_next * q ** k
            else:
                term = term * q / (k * (nu + k))
            total += term
            if k > 5 and abs(term) < mp.mp.eps * abs(total) * mp.mpf(2) ** -20:
                break
        res = total * (z / 2) ** nu
    return +res


def bessel_i_asymptotic(nu, z):
    nu = mp.mpmathify(nu)
    z = mp.mpmathify(z)
    pre = 1 / mp.sqrt(2 * mp.pi * z)
    out = mp.exp(z) * pre * _asym_sum(nu, z, -1)
    if abs(mp.exp(-2 * z)) > mp.mp.eps:
        s = 1 if mp.im(z) >= 0 else -1
        out += 1j * mp.exp(s * nu * mp.pi * 1j) * mp.exp(-z) * pre * _asym_sum(nu, z, 1)
    return out


def bessel_k_asymptotic(nu, z):
    nu = mp.mpmathify(nu)
    z = mp.mpmathify(z)
    return mp.sqrt(mp.pi / (2 * z)) * mp.exp(-z) * _asym_sum(nu, z, 1)


def bessel_k_series(nu, z):
    nu = mp.mpmathify(nu)
    z = mp.mpmathify(z)
    if not mp.isint(nu):
        extra = int(3 * abs(z) / math.log(2)) + 30
        with mp.extraprec(extra):
            r = mp.pi / 2 * (bessel_i_series(-nu, z) - bessel_i_series(nu, z)) / mp.sin(nu * mp.pi)
        return +r
    n = abs(int(nu))
    extra = int(3 * abs(z) / math.log(2)) + 30
    with mp.extraprec(extra):
        h = z / 2
        q = h * h
        first = mp.mpf(0)
        for k in range(n):
            first += mp.factorial(n - k - 1) / mp.factorial(k) * (-q) ** k
        first = first * h ** (-n) / 2
        second = (-1) ** (n + 1) * mp.log(h) * bessel_i_series(n, z)
        third = mp.mpf(0)
        k = 0
        term = 1 / mp.factorial(n)
        while True:
            third += (mp.digamma(k + 1) + mp.digamma(n + k + 1)) * term
            k += 1
            term = term * q / (k * (n + k))
            if k > 5 and abs(term) * (abs(mp.digamma(k + 1)) + 10) < mp.mp.eps * abs(third) * mp.mpf(2) ** -20:
                break
        third = third * (-1) ** n * h ** n / 2
        r = first + second + third
    return +r


def bessel_switch_radius(bits=None):
    """Radius beyond which the asymptotic expansions reach full precision."""
    bits = mp.mp.prec if bits is None else bits
    return 0.36 * bits + 8


def bessel_mod(kind, order, zeta):
    """Modified Bessel I or K at the working precision."""
    zeta = mp.mpmathify(zeta)
    if kind == "K":
        if mp.im(zeta) == 0 and mp.re(zeta) <= 0:
            raise BranchError("K is evaluated on its cut (-inf, 0]")
        if abs(zeta) > bessel_switch_radius():
            return bessel_k_asymptotic(order, zeta)
        return bessel_k_series(order, zeta)
    if kind == "I":
        if abs(zeta) > bessel_switch_radius() and mp.re(zeta) > 0:
            return bessel_i_asymptotic(order, zeta)
        return bessel_i_series(order, zeta)
    raise ValueError("kind must be 'I' or 'K'")


def bessel_mod_derivative(kind, order, zeta):
    zeta = mp.mpmathify(zeta)
    if kind == "I":
        return bessel_mod("I", order - 1, zeta) - order / zeta * bessel_mod("I", order, zeta)
    return -bessel_mod("K", order - 1, zeta) - order / zeta * bessel_mod("K", order, zeta)


# ---------------------------------------------------------------- Airy

def airy_series(z):
    z = mp.mpmathify(z)
    size = abs(z) ** 1.5 if abs(z) > 0 else 0
    extra = int(4 * size / (3 * math.log(2))) + 30
    with mp.extraprec(extra):
        c1 = 1 / (mp.cbrt(9) * mp.gamma(mp.mpf(2) / 3))
        c2 = 1 / (mp.cbrt(3) * mp.gamma(mp.mpf(1) / 3))
        z3 = z ** 3
        f = fp = g = gp = mp.mpf(0)
        tf = mp.mpf(1)    # z^(3k) coefficient term of f
        tg = z            # z^(3k+1) term of g
        k = 0
        gp = mp.mpf(1)
        f = tf
        g = tg
        while True:
            k += 1
            tf = tf * z3 / ((3 * k - 1) * (3 * k))
            tg = tg * z3 / ((3 * k) * (3 * k + 1))
            f += tf
            g += tg
            # derivatives: d/dz z^(3k) = 3k z^(3k-1)
            fp += 3 * k * tf / z if z != 0 else 0
            gp += (3 * k + 1) * tg / z if z != 0 else 0
            if abs(tf) + abs(tg) < mp.mp.eps * (abs(f) + abs(g)) and k > 3:
                break
        ai = c1 * f - c2 * g
        aip = c1 * fp - c2 * gp
    return +ai, +aip


def airy_asymptotic(z):
    """Principal-sector expansion; accurate for |arg z| <= 2pi/3."""
    z = mp.mpmathify(z)
    xi = mp.mpf(2) / 3 * z ** mp.mpf(1.5)
    u = mp.mpf(1)
    su = mp.mpf(1)
    sv = mp.mpf(1)
    prev = mp.inf
    k = 0
    while True:
        k += 1
        u = u * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        v = -u * (6 * k + 1) / (6 * k - 1)
        tu = (-1) ** k * u / xi ** k
        tv = (-1) ** k * v / xi ** k
        size = abs(tu)
        if size > prev or k > 4 * mp.mp.prec:
            break
        su += tu
        sv += tv
        if size < mp.mp.eps:
            break
        prev = size
    pre = mp.exp(-xi) / (2 * mp.sqrt(mp.pi))
    z4 = z ** mp.mpf(0.25)
    return pre / z4 * su, -pre * z4 * sv


def airy_switch_radius(bits=None):
    bits = mp.mp.prec if bits is None else bits
    return (0.75 * bits * math.log(2)) ** (2.0 / 3.0) + 2


def airy(zeta):
    """Return (Ai(zeta), Ai'(zeta))."""
    zeta = mp.mpmathify(zeta)
    if abs(zeta) <= airy_switch_radius():
        return airy_series(zeta)
    if abs(mp.arg(zeta)) <= 2 * mp.pi / 3:
        return airy_asymptotic(zeta)
    # Ai(z) = -w Ai(w z) - w^2 Ai(w^2 z), both arguments in the principal sector
    w = mp.expjpi(mp.mpf(2) / 3)
    a1, d1 = airy_asymptotic(w * zeta)
    a2, d2 = airy_asymptotic(w * w * zeta)
    return -w * a1 - w * w * a2, -w * w * d1 - w ** 4 * d2


# ---------------------------------------------------------------- arcs

def _legendre(order):
    u, w = np.polynomial.legendre.leggauss(order)
    return u, w


def _bary_weights(u):
    m = len(u)
    w = np.ones(m)
    for j in range(m):
        w[j] = 1.0 / np.prod(u[j] - np.delete(u, j))
    return w


def _diff_matrix(u):
    wb = _bary_weights(u)
    m = len(u)
    d = np.zeros((m, m))
    for j in range(m):
        for k in range(m):
            if j != k:
                d[j, k] = wb[k] / wb[j] / (u[j] - u[k])
        d[j, j] = -d[j].sum()
    return d


def _interp_matrix(u, x):
    wb = _bary_weights(u)
    out = np.zeros((len(x), len(u)))
    for i, xi in enumerate(x):
        diff = xi - u
        hit = np.isclose(diff, 0.0, atol=1e-15)
        if hit.any():
            out[i, np.argmax(hit)] = 1.0
            continue
        r = wb / diff
        out[i] = r / r.sum()
    return out


def graded_breaks(panels, grade_start=False, grade_end=False, levels=6, ratio=0.5):
    """Panel breakpoints in [0, 1], refined geometrically toward flagged ends."""
    base = list(np.linspace(0.0, 1.0, panels + 1))
    if grade_start:
        h = base[1]
        extra = [h * ratio ** k for k in range(1, levels + 1)]
        base = sorted(set(base) | set(extra))
    if grade_end:
        h = 1.0 - base[-2]
        extra = [1.0 - h * ratio ** k for k in range(1, levels + 1)]
        base = sorted(set(base) | set(extra))
    return np.array(base)


class OrientedArc:
    """A smooth oriented arc gamma: [0, 1] -> C with composite Gauss-Legendre nodes."""

    def __init__(self, param, dparam, breaks=None, order=16, closed=False, tag=""):
        self.param = param
        self.dparam = dparam
        self.order = order
        self.closed = closed
        self.tag = tag
        self.breaks = np.asarray(breaks if breaks is not None else np.linspace(0, 1, 9), dtype=float)
        ur, wr = _legendre(order)
        self._ref = ur
        self._refw = wr
        self._dref = _diff_matrix(ur)
        us, ws, pid = [], [], []
        for p, (lo, hi) in enumerate(zip(self.breaks[:-1], self.breaks[1:])):
            us.append(lo + (hi - lo) * (ur + 1) / 2)
            ws.append((hi - lo) / 2 * wr)
            pid.append(np.full(order, p))
        self.u = np.concatenate(us)
        self.wu = np.concatenate(ws)
        self.panel = np.concatenate(pid)
        self.nodes = np.asarray(param(self.u), dtype=complex)
        self.tangent = np.asarray(dparam(self.u), dtype=complex)
        self.weights = self.wu * self.tangent
        self.arclength_weights = self.wu * np.abs(self.tangent)

    def __len__(self):
        return len(self.u)

    @property
    def start(self):
        return complex(self.param(np.array([0.0]))[0])

    @property
    def end(self):
        return complex(self.param(np.array([1.0]))[0])

    def refined(self, factor=2):
        br = [self.breaks[0]]
        for lo, hi in zip(self.breaks[:-1], self.breaks[1:]):
            br.extend(list(np.linspace(lo, hi, factor + 1)[1:]))
        return OrientedArc(self.param, self.dparam, np.array(br), self.order, self.closed, self.tag)

    def panel_length(self, p):
        sel = self.panel == p
        return float(self.arclength_weights[sel].sum())

    @classmethod
    def segment(cls, a, b, panels=8, order=16, grade_start=False, grade_end=False, tag="segment"):
        a, b = complex(a), complex(b)
        return cls(lambda u: a + (b - a) * u, lambda u: (b - a) * np.ones_like(u, dtype=complex),
                   graded_breaks(panels, grade_start, grade_end), order, False, tag)

    @classmethod
    def circle(cls, center, radius, panels=8, order=16, clockwise=False, tag="circle"):
        c, r = complex(center), float(radius)
        s = -1.0 if clockwise else 1.0
        return cls(lambda u: c + r * np.exp(s * 2j * np.pi * u),
                   lambda u: s * 2j * np.pi * r * np.exp(s * 2j * np.pi * u),
                   np.linspace(0, 1, panels + 1), order, True, tag)

    @classmethod
    def from_points(cls, points, panels=8, order=16, tag="curve"):
        """Smooth arc through sample points (periodic-free cubic spline in u)."""
        from scipy.interpolate import CubicSpline
        pts = np.asarray(points, dtype=complex)
        d = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(pts)))])
        t = d / d[-1]
        sp_re = CubicSpline(t, pts.real)
        sp_im = CubicSpline(t, pts.imag)
        return cls(lambda u: sp_re(u) + 1j * sp_im(u), lambda u: sp_re(u, 1) + 1j * sp_im(u, 1),
                   np.linspace(0, 1, panels + 1), order, False, tag)

    def interpolate_panel(self, values, p, u_new):
        sel = np.where(self.panel == p)[0]
        lo, hi = self.breaks[p], self.breaks[p + 1]
        x = 2 * (np.asarray(u_new) - lo) / (hi - lo) - 1
        return np.tensordot(_interp_matrix(self._ref, x), np.asarray(values)[sel], axes=(1, 0))

    def d_ds_matrix(self, p):
        """Differentiation along the arc, d/ds, on panel p (order x order)."""
        sel = np.where(self.panel == p)[0]
        lo, hi = self.breaks[p], self.breaks[p + 1]
        du = self._dref * 2 / (hi - lo)
        return du / self.tangent[sel][:, None]


def _near_field_sum(arc, values, z, p, depth=0):
    lo, hi = arc.breaks[p], arc.breaks[p + 1]
    ur, wr = arc._ref, arc._refw
    total = 0j
    pieces = [(lo, hi)]
    for _ in range(40):
        nxt = []
        done = True
        for a, b in pieces:
            u = a + (b - a) * (ur + 1) / 2
            s = arc.param(u)
            length = np.sum((b - a) / 2 * wr * np.abs(arc.dparam(u)))
            dist = np.min(np.abs(s - z))
            if dist < 1e-13 * max(1.0, length):
                raise NearContourError("point lies on the arc")
            if dist < length:
                m = (a + b) / 2
                nxt.extend([(a, m), (m, b)])
                done = False
            else:
                nxt.append((a, b))
        pieces = nxt
        if done:
            break
    for a, b in pieces:
        u = a + (b - a) * (ur + 1) / 2
        s = arc.param(u)
        f = arc.interpolate_panel(values, p, u)
        w = (b - a) / 2 * wr * arc.dparam(u)
        total += np.sum(f * w / (s - z)) if np.ndim(f) == 1 else np.tensordot(w / (s - z), f, axes=(0, 0))
    return total


def cauchy_transform(arcs, values, z, near_field=True):
    """(1/2 pi i) sum over arcs of the integral of density(s)/(s - z) ds.

    values: one array per arc, shape (nodes,) or (nodes, ...) for matrix densities.
    """
    if isinstance(arcs, OrientedArc):
        arcs, values = [arcs], [values]
    z = complex(z)
    total = 0
    for arc, vals in zip(arcs, values):
        vals = np.asarray(vals)
        for p in range(len(arc.breaks) - 1):
            sel = arc.panel == p
            s = arc.nodes[sel]
            length = arc.arclength_weights[sel].sum()
            if np.min(np.abs(s - z)) < length:
                if not near_field:
                    raise NearContourError("z too close to the arc for plain quadrature")
                total = total + _near_field_sum(arc, vals, z, p)
            else:
                k = arc.weights[sel] / (s - z)
                total = total + np.tensordot(k, vals[sel], axes=(0, 0))
    return total / (2j * np.pi)


def _pv_log(arc, i):
    """Principal value of the integral of ds/(s - s_i) over the arc containing node i."""
    ui = arc.u[i]
    si = arc.nodes[i]
    tan = arc.tangent[i]
    m = 600
    if arc.closed:
        after = np.linspace(ui, ui + 1, m + 2)[1:-1] % 1.0
        pts = arc.param(after)
        ang = np.concatenate([[np.angle(tan)], np.angle(pts - si), [np.angle(-tan)]])
        ang = np.unwrap(ang)
        return 1j * (ang[-1] - ang[0])
    s0, s1 = arc.start, arc.end
    before = np.linspace(0, ui, m + 1)[:-1]
    after = np.linspace(ui, 1, m + 1)[1:]
    a1 = np.unwrap(np.concatenate([np.angle(arc.param(before) - si), [np.angle(-tan)]]))
    a2 = np.unwrap(np.concatenate([[np.angle(tan)], np.angle(arc.param(after) - si)]))
    return (np.log(abs(s1 - si)) - np.log(abs(s0 - si))) + 1j * ((a1[-1] - a1[0]) + (a2[-1] - a2[0]))


def cauchy_matrix(arcs, side=-1):
    """Dense matrix K with (K f)_i = C_side f (s_i) for f sampled at all nodes.

    Singularity subtraction on the arc containing s_i; the subtracted part is
    integrated in closed form, the remainder is smooth.
    """
    if isinstance(arcs, OrientedArc):
        arcs = [arcs]
    s = np.concatenate([a.nodes for a in arcs])
    w = np.concatenate([a.weights for a in arcs])
    m = len(s)
    diff = s[None, :] - s[:, None]
    np.fill_diagonal(diff, 1.0)
    k = w[None, :] / diff
    np.fill_diagonal(k, 0.0)
    offset = 0
    for arc in arcs:
        idx = np.arange(offset, offset + len(arc))
        block = k[np.ix_(idx, idx)]
        k[idx, idx] -= block.sum(axis=1)
        for p in range(len(arc.breaks) - 1):
            loc = np.where(arc.panel == p)[0]
            d = arc.d_ds_matrix(p)
            for r, li in enumerate(loc):
                k[offset + li, offset + loc] += arc.weights[li] * d[r]
        for li in range(len(arc)):
            k[offset + li, offset + li] += _pv_log(arc, li)
        offset += len(arc)
    k = k / (2j * np.pi)
    k[np.arange(m), np.arange(m)] += side * 0.5
    return k


def cauchy_minus(arcs, values):
    """Minus-side boundary values of the Cauchy transform at every node."""
    if isinstance(arcs, OrientedArc):
        arcs, values = [arcs], [values]
    k = cauchy_matrix(arcs, side=-1)
    f = np.concatenate([np.asarray(v) for v in values], axis=0)
    return np.tensordot(k, f, axes=(1, 0))


def cauchy_plus(arcs, values):
    if isinstance(arcs, OrientedArc):
        arcs, values = [arcs], [values]
    k = cauchy_matrix(arcs, side=+1)
    f = np.concatenate([np.asarray(v) for v in values], axis=0)
    return np.tensordot(k, f, axes=(1, 0))
