"""Spectral curve t^3 - z t^2 + z t - ab z = 0 and everything derived from it.

The curve is rational: z = t^3 / ((t - a)(t - b)).  Sheets are labelled by
their behaviour at infinity: sheet 1 ("+") has t ~ z, sheet 2 ("-") has
t -> a, sheet 3 ("*") has t -> b.  Cuts lie on the real axis only, so a
sheet value off the axis is found by continuation along a vertical path
from a large anchor in the same half-plane.
"""

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import mpmath as mp
import numpy as np

from .numerics import BranchError

SHEETS = ("+", "-", "*")


class DegeneracyError(ValueError):
    pass


class TrackingError(RuntimeError):
    pass


class ConformalityError(ValueError):
    pass


class PathCrossingError(ValueError):
    pass


# ---------------------------------------------------------------- polynomials in z with rational coefficients

def _padd(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def _pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return out


def _pscale(p, s):
    return [s * x for x in p]


def _ptrim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


@dataclass
class SpectralCurve:
    a: Fraction
    b: Fraction
    c2: list  # polynomial coefficients in z, ascending, Fractions
    c1: list
    c0: list
    x0: mp.mpf = None
    xi_star: mp.mpf = None
    conductors: list = field(default_factory=list)
    name: str = "custom"

    @property
    def af(self):
        return mp.mpf(self.a.numerator) / self.a.denominator

    @property
    def bf(self):
        return mp.mpf(self.b.numerator) / self.b.denominator

    @property
    def symmetric(self):
        return self.a == self.b

    @property
    def t_plus(self):
        return 1 + mp.sqrt(1 - 3 * self.af * self.bf)

    @property
    def t_minus(self):
        return 1 - mp.sqrt(1 - 3 * self.af * self.bf)

    def coeffs_at(self, z):
        ev = lambda p: sum(mp.mpf(c.numerator) / c.denominator * z ** i for i, c in enumerate(p))
        return ev(self.c2), ev(self.c1), ev(self.c0)

    def F(self, t, z):
        c2, c1, c0 = self.coeffs_at(z)
        return t ** 3 + c2 * t ** 2 + c1 * t + c0

    def F_theta(self, t, z):
        c2, c1, _ = self.coeffs_at(z)
        return 3 * t ** 2 + 2 * c2 * t + c1

    def z_of_t(self, t):
        return t ** 3 / ((t - self.af) * (t - self.bf))

    def discriminant_poly(self):
        """Discriminant of F in theta, as a polynomial in z (Fractions, ascending)."""
        b, c, d = self.c2, self.c1, self.c0
        one = [Fraction(1)]
        t1 = _pscale(_pmul(_pmul(b, c), d), 18)
        t2 = _pscale(_pmul(_pmul(_pmul(b, b), b), d), -4)
        t3 = _pmul(_pmul(b, b), _pmul(c, c))
        t4 = _pscale(_pmul(_pmul(c, c), c), -4)
        t5 = _pscale(_pmul(d, d), -27)
        out = [Fraction(0)]
        for t in (t1, t2, t3, t4, t5):
            out = _padd(out, t)
        return _ptrim(out) if one else out

    def branch_points(self):
        """Roots of the discriminant: returns (multiplicity of z=0, other roots)."""
        p = self.discriminant_poly()
        k = 0
        while k < len(p) and p[k] == 0:
            k += 1
        rest = p[k:]
        if len(rest) <= 1:
            return k, []
        coeffs = [mp.mpf(c.numerator) / c.denominator for c in reversed(rest)]
        return k, mp.polyroots(coeffs, maxsteps=200, extraprec=100)

    def to_dict(self):
        fr = lambda p: [str(x) for x in p]
        return {
            "name": self.name,
            "ratio": str(self.a),
            "c2": {"num": fr(self.c2), "den": ["1"]},
            "c1": {"num": fr(self.c1), "den": ["1"]},
            "c0": {"num": fr(self.c0), "den": ["1"]},
            "x0": mp.nstr(self.x0, 30) if self.x0 is not None else None,
            "xi_star": mp.nstr(self.xi_star, 30) if self.xi_star is not None else None,
            "conductors": self.conductors,
            "sheet_anchors": {"reference_z": "1e6j", "+": "t ~ z", "-": "t -> a", "*": "t -> b"},
        }


def _cubic_for_ratio(a):
    a = Fraction(a)
    b = 1 - a
    return [Fraction(0), Fraction(-1)], [Fraction(0), Fraction(1)], [Fraction(0), -a * b]


def _conductors_for(a, b):
    out = [{"name": "Gamma", "left": "0", "right": "x0", "channel": [1, 3], "swap": [1, 3],
            "weight": "z^alpha2", "edges": {"0": "hard", "x0": "soft"}}]
    if a != b:
        out.append({"name": "Delta", "left": "xi_star", "right": "0", "channel": [3, 2], "swap": [2, 3],
                    "weight": "2i sin(pi beta) (-z)^(-beta)", "edges": {"xi_star": "soft", "0": "hard"}})
    return out


def build_curve(m=None, ratio=None, validate=True):
    """Curve for the model descriptor (uses its ratio n1/n unless ratio is given)."""
    if ratio is None:
        if m.ratio is not None:
            ratio = Fraction(str(m.ratio))
        else:
            ratio = Fraction(m.n1, m.n)
    a = Fraction(ratio).limit_denominator(10 ** 6)
    if a > Fraction(1, 2):
        raise DegeneracyError("the preset geometry needs n1/n <= 1/2 (swap the weights)")
    if not (0 < a <= Fraction(1, 2)):
        raise DegeneracyError("ratio must lie in (0, 1/2]")
    b = 1 - a
    c2, c1, c0 = _cubic_for_ratio(a)
    cur = SpectralCurve(a, b, c2, c1, c0, name="laguerre-%s" % a)
    cur.x0 = cur.z_of_t(cur.t_plus)
    cur.xi_star = cur.z_of_t(cur.t_minus) if a != b else -mp.inf
    cur.conductors = _conductors_for(a, b)
    if validate:
        validate_curve(cur)
    return cur


def validate_curve(cur):
    k, roots = cur.branch_points()
    if k == 0:
        raise DegeneracyError("z = 0 is not a branch point")
    real_pos = [mp.re(r) for r in roots if abs(mp.im(r)) < 1e-20 and mp.re(r) > 0]
    if len(real_pos) != 1 or abs(real_pos[0] - cur.x0) > 1e-20 * (1 + abs(cur.x0)):
        raise DegeneracyError("discriminant zeros on (0, inf) differ from {x0}: %s" % real_pos)
    return True


def load_preset(name_or_path):
    """Read a curve preset (JSON)."""
    if str(name_or_path).endswith(".json"):
        with open(name_or_path) as fh:
            doc = json.load(fh)
    else:
        text = resources.files("mlrhp.presets").joinpath(name_or_path + ".json").read_text()
        doc = json.loads(text)
    poly = lambda d: [Fraction(x) for x in d["num"]]
    a = Fraction(doc["ratio"])
    cur = SpectralCurve(a, 1 - a, poly(doc["c2"]), poly(doc["c1"]), poly(doc["c0"]), name=doc["name"])
    cur.x0 = cur.z_of_t(cur.t_plus)
    cur.xi_star = cur.z_of_t(cur.t_minus) if cur.a != cur.b else -mp.inf
    if abs(cur.x0 - mp.mpf(doc["x0"])) > 1e-25:
        raise DegeneracyError("declared x0 disagrees with the curve")
    cur.conductors = doc.get("conductors", _conductors_for(cur.a, cur.b))
    validate_curve(cur)
    return cur


# ---------------------------------------------------------------- branch tracking

def _roots_np(z, ab):
    return np.roots([1.0, -z, z, -ab * z])


def _asymptotic_seed(z, a, b):
    t2 = a + a ** 3 / (z * (a - b))
    t3 = b + b ** 3 / (z * (b - a)) if a != b else b
    return [z - t2 - t3, t2, t3]


def _match(prev, new):
    """Assign new roots to previous labels; None if any assignment is ambiguous."""
    out = []
    used = set()
    for p in prev:
        d = [abs(v - p) for v in new]
        order = sorted(range(3), key=d.__getitem__)
        k = order[0]
        if k in used or d[k] > 0.4 * d[order[1]]:
            return None
        used.add(k)
        out.append(new[k])
    return out


def _track_upper(x, y, a, b):
    """Sheet values (double precision) at x + iy, y > 0."""
    ab = a * b
    anchor = max(60.0, 8 * abs(x), 2 * y)
    z = complex(x, anchor)
    if a == b:
        r = _roots_np(z, ab)
        i1 = int(np.argmax(np.abs(r)))
        rest = [r[i] for i in range(3) if i != i1]
        rest.sort(key=lambda v: v.imag)
        cur = [r[i1]] + rest
    else:
        seed = _asymptotic_seed(z, a, b)
        cur = _match(seed, list(_roots_np(z, ab)))
        if cur is None:
            raise TrackingError("anchor labelling failed")
    if y >= anchor:
        return cur
    # march in log(Im z)
    s = math.log(anchor)
    s_end = math.log(y)
    h = (s_end - s) / 64
    while s > s_end:
        step = max(h, s_end - s)
        for _ in range(60):
            z_new = complex(x, math.exp(s + step))
            nxt = _match(cur, list(_roots_np(z_new, ab)))
            if nxt is not None:
                break
            step /= 2
        else:
            raise TrackingError("step halving failed near %s" % z_new)
        cur = nxt
        s += step
    return cur


def _polish(cur, t0, z):
    a, b = cur.af, cur.bf
    t = mp.mpc(t0)
    for _ in range(200):
        f = t ** 3 - z * t ** 2 + z * t - a * b * z
        d = 3 * t ** 2 - 2 * z * t + z
        step = f / d
        t -= step
        if abs(step) <= mp.mp.eps * 4 * (1 + abs(t)):
            break
    return t


def _near_branch(cur, x):
    pts = [mp.mpf(0), cur.x0]
    if cur.a != cur.b:
        pts.append(cur.xi_star)
    return min(abs(x - p) for p in pts)


# Off the axis every sheet value is non-real, and by continuity from infinity
# Im t_1 > 0, Im t_2 > 0, Im t_3 < 0 in the upper half-plane.  Boundary values
# on the axis are therefore labelled exactly from the real cubic, and real
# roots carry a signed infinitesimal imaginary part so that logs and powers
# pick the correct side.
_SIGMA = (1, 1, -1)


def _axis_values(cur, x, side):
    a, b = cur.af, cur.bf
    r = mp.polyroots([1, -x, x, -a * b * x], maxsteps=200, extraprec=mp.mp.prec)
    tiny = mp.mpf(2) ** (-2 * mp.mp.prec)
    reals = sorted([mp.re(v) for v in r if abs(mp.im(v)) <= mp.mp.eps * 16 * (1 + abs(v))])
    cplx = [v for v in r if abs(mp.im(v)) > mp.mp.eps * 16 * (1 + abs(v))]
    if len(reals) == 3:
        if x > 0:
            t = [reals[2], reals[0], reals[1]]
        else:
            t = [reals[0], reals[1], reals[2]]
    elif len(reals) == 1 and len(cplx) == 2:
        up = max(cplx, key=lambda v: mp.im(v))
        dn = min(cplx, key=lambda v: mp.im(v))
        if x > 0:   # Gamma: sheets 1 and 3 form the pair
            t = [up if side > 0 else dn, reals[0], dn if side > 0 else up]
        else:       # Delta: sheets 2 and 3 form the pair
            t = [reals[0], up if side > 0 else dn, dn if side > 0 else up]
    else:
        raise TrackingError("unexpected root configuration at x = %s" % mp.nstr(x, 8))
    out = []
    for j, v in enumerate(t):
        if mp.im(v) == 0 or len(reals) == 3 or v is reals[0]:
            v = mp.mpc(mp.re(v), _SIGMA[j] * side * tiny)
        out.append(v)
    return out


@lru_cache(maxsize=200000)
def _branches_cached(a_num, a_den, zr, zi, side, prec, name):
    cur = _CURVES[name]
    with mp.workprec(prec):
        z = mp.mpc(zr, zi)
        a, b = float(cur.af), float(cur.bf)
        if zi == 0:
            x = mp.re(z)
            if _near_branch(cur, x) == 0:
                raise BranchError("z is a branch point")
            on_cut = (cur.xi_star < x < cur.x0) and x != 0
            if on_cut and side == 0:
                raise BranchError("z on a conductor needs a side hint")
            if x == 0:
                raise BranchError("z = 0 is a branch point")
            return tuple(_axis_values(cur, x, side if side != 0 else 1))
        if abs(z) > 1e7:
            seeds = _asymptotic_seed(z, cur.af, cur.bf)
            return tuple(_polish(cur, s, z) for s in seeds)
        x, y = float(mp.re(z)), float(mp.im(z))
        approx = _track_upper(x, abs(y), a, b)
        if y < 0:
            approx = [complex(v).conjugate() for v in approx]
        vals = [_polish(cur, v, z) for v in approx]
        sg = 1 if y > 0 else -1
        for j in range(3):
            if cur.a != cur.b and mp.im(vals[j]) * _SIGMA[j] * sg <= 0:
                raise TrackingError("sheet %d has the wrong half-plane at %s" % (j + 1, mp.nstr(z, 8)))
        for i in range(3):
            for j in range(i + 1, 3):
                if abs(vals[i] - vals[j]) < mp.mpf(2) ** (-mp.mp.prec // 2):
                    raise TrackingError("branches collapsed at %s" % mp.nstr(z, 8))
        return tuple(vals)


_CURVES = {}


def _side_code(hint):
    if hint in (None, 0, "0"):
        return 0
    if hint in ("+", 1, "upper", "above"):
        return 1
    if hint in ("-", -1, "lower", "below"):
        return -1
    raise ValueError("unknown side hint %r" % (hint,))


def branches_at(c, z, hint=None):
    """(t_+, t_-, t_*) at z; for real z on a conductor, hint selects the boundary value."""
    _CURVES[c.name] = c
    z = mp.mpc(z)
    side = _side_code(hint)
    if mp.im(z) != 0:
        side = 0
    return _branches_cached(c.a.numerator, c.a.denominator, mp.re(z), mp.im(z), side, mp.mp.prec, c.name)


def half_plane(z, hint=None):
    im = mp.im(mp.mpc(z))
    if im > 0:
        return 1
    if im < 0:
        return -1
    s = _side_code(hint)
    return s if s else 1


def continue_along(c, path, start=None):
    """Continue the three roots along a closed or open path of points (double precision)."""
    ab = float(c.af * c.bf)
    pts = [complex(p) for p in path]
    cur = list(start) if start is not None else [complex(v) for v in branches_at(c, pts[0])]
    for p0, p1 in zip(pts[:-1], pts[1:]):
        k = 1
        while True:
            ok = True
            tmp = list(cur)
            for i in range(1, k + 1):
                z = p0 + (p1 - p0) * i / k
                nxt = _match(tmp, list(_roots_np(z, ab)))
                if nxt is None:
                    ok = False
                    break
                tmp = nxt
            if ok:
                cur = tmp
                break
            k *= 2
            if k > 4096:
                raise TrackingError("continuation stalled")
    return cur


def monodromy(c, center, radius, points=400):
    """Permutation of sheet labels after a counterclockwise loop."""
    center = complex(center)
    start_z = center + radius * 1j
    start = [complex(v) for v in branches_at(c, start_z)]
    path = [center + radius * 1j * np.exp(2j * np.pi * k / points) for k in range(points + 1)]
    end = continue_along(c, path, start)
    perm = []
    for v in end:
        perm.append(int(np.argmin([abs(v - s) for s in start])))
    return tuple(perm)


# ---------------------------------------------------------------- g functions and phases

@dataclass
class GFunction:
    curve: SpectralCurve
    ell_star: mp.mpf = mp.mpf(0)

    def __call__(self, z, hint=None):
        return g_eval(self.curve, z, hint)[0]


def _g1_from_t(c, z, t1):
    a, b = c.af, c.bf
    return z - t1 - 1 + a * mp.log(t1 - a) + b * mp.log(t1 - b)


def _K2(c):
    a, b = c.af, c.bf
    return -a + a * mp.log(a ** 3 / (b - a)) + b * mp.log(b - a)


def _g2_from_t(c, t2):
    a, b = c.af, c.bf
    return t2 - a * mp.log(a - t2) - b * mp.log(b - t2) + _K2(c)


def _check_path(c, z, hint):
    if mp.im(z) == 0 and hint is None:
        x = mp.re(z)
        lo = c.xi_star if c.a != c.b else mp.mpf(0)
        if lo < x < c.x0:
            raise PathCrossingError("z lies on a cut; give a side hint")


def g_eval(c, z, hint=None):
    """(G(z), ell_*) with G = g_1 and exp(n G) z^{-n} -> 1."""
    z = mp.mpc(z)
    _check_path(c, z, hint)
    if mp.im(z) == 0 and mp.re(z) <= 0 and hint is None:
        hint = "+"
    t1 = branches_at(c, z, hint)[0]
    return _g1_from_t(c, z, t1), mp.mpf(0)


def g2_eval(c, z, hint=None):
    if c.a == c.b:
        raise DegeneracyError("second g-function is not defined in the symmetric preset")
    z = mp.mpc(z)
    if mp.im(z) == 0 and mp.re(z) <= 0 and hint is None:
        hint = "+"
    t2 = branches_at(c, z, hint)[1]
    return _g2_from_t(c, t2)


def _omega(c, t):
    a, b = c.af, c.bf
    return t - a * mp.log(t - a) - b * mp.log(t - b)


@dataclass
class PhasePair:
    curve: SpectralCurve
    ell1: mp.mpf
    ell2: mp.mpf

    def phi_Gamma(self, z, hint=None):
        c = self.curve
        z = mp.mpc(z)
        if mp.im(z) == 0 and hint is None:
            hint = "+"
        t = branches_at(c, z, hint)
        return 2 * _g1_from_t(c, z, t[0]) - _g2_from_t(c, t[1]) - z + self.ell1

    def phi_Delta(self, z, hint=None):
        c = self.curve
        z = mp.mpc(z)
        if mp.im(z) == 0 and hint is None:
            hint = "+"
        t = branches_at(c, z, hint)
        s = half_plane(z, hint)
        return 2 * _g2_from_t(c, t[1]) - _g1_from_t(c, z, t[0]) + self.ell2 - 1j * mp.pi * (2 * c.af - 1) * s

    def phi(self, name, z, hint=None):
        return self.phi_Gamma(z, hint) if name == "Gamma" else self.phi_Delta(z, hint)

    def dphi(self, name, z, hint=None):
        t = branches_at(self.curve, mp.mpc(z), hint)
        if name == "Gamma":
            return (t[2] - t[0]) / z
        return (t[1] - t[2]) / z


def phases(c):
    """Phase pair with constants fixed by phi_Gamma(x0) = 0 and phi_Delta(xi_*) = 0.

    Both phases vanish like a 3/2 power at their edge, so evaluating at an
    relative offset eps = 2^(-0.7 prec) outside the conductor is exact to
    working precision.
    """
    if c.a == c.b:
        raise DegeneracyError("phases need distinct ratios (the symmetric preset has xi_* = -inf)")
    eps = mp.mpf(2) ** (-int(0.7 * mp.mp.prec))
    raw = PhasePair(c, mp.mpf(0), mp.mpf(0))
    ell1 = -raw.phi_Gamma(c.x0 * (1 + eps))
    ell2 = -raw.phi_Delta(c.xi_star * (1 + eps))
    return PhasePair(c, ell1, ell2)


# ---------------------------------------------------------------- conformal coordinates

def _local_exponent(f, center, direction, h=1e-4):
    v1 = f(center + h * direction)
    v2 = f(center + 2 * h * direction)
    return float(mp.log(abs(v2 / v1)) / mp.log(2))


def conf_coord_hard(p, z):
    """f_0 = psi^2 / 4 with psi the Gamma phase based at 0.

    Raises ConformalityError when f_0 is not locally univalent at 0 (the
    cube-root branch point of the preset curve).
    """
    c = p.curve

    def f0(w):
        w = mp.mpc(w)
        s = "+" if mp.im(w) >= 0 else "-"
        base = p.phi_Gamma(mp.mpf(0) + mp.mpf(10) ** -30, s)
        return (p.phi_Gamma(w, s) - base) ** 2 / 4

    k = _local_exponent(f0, mp.mpc(0), mp.expjpi(mp.mpf(1) / 3))
    if abs(k - 1) > 0.1:
        raise ConformalityError("f0 behaves like z^%.3f at 0; the hard edge of this curve is not "
                                "square-root type" % k)
    return f0(z)


def _soft_f(p, z, edge, hint=None):
    c = p.curve
    z = mp.mpc(z)
    if edge == "x0":
        phi = p.phi_Gamma(z, hint)
        d = z - c.x0
        if mp.im(d) == 0 and mp.re(d) < 0:
            d = mp.mpc(mp.re(d), 0) if hint in (None, "+") else mp.mpc(mp.re(d), -0.0)
            root = (mp.sqrt(-mp.re(d)) ** 3) * (-1j if hint in (None, "+") else 1j)
        else:
            root = d ** mp.mpf(1.5)
        if d == 0:
            return mp.mpc(0)
        ratio = -mp.mpf(3) / 4 * phi / root
        return (z - c.x0) * ratio ** (mp.mpf(2) / 3)
    phi = p.phi_Delta(z, hint)
    d = c.xi_star - z
    if d == 0:
        return mp.mpc(0)
    if mp.im(d) == 0 and mp.re(d) < 0:
        # z on the conductor right of xi_*: (xi_* - z)^{3/2} from the side of z
        root = (mp.sqrt(-mp.re(d)) ** 3) * (1j if hint in (None, "+") else -1j)
    else:
        root = d ** mp.mpf(1.5)
    ratio = -mp.mpf(3) / 4 * phi / root
    return -(z - c.xi_star) * ratio ** (mp.mpf(2) / 3)


def conf_coord_soft(p, z, edge="x0", hint=None):
    """Airy coordinate with f = 0 at the edge, real on the real axis, positive off the conductor."""
    f = _soft_f(p, z, edge, hint)
    if mp.im(mp.mpc(z)) == 0:
        f = mp.mpc(mp.re(f), 0)
    return f


def soft_edge_point(c, edge):
    return c.x0 if edge == "x0" else c.xi_star


def ray_exit_point(p, edge, radius, upper=True):
    """Point on the disk boundary where f maps onto the ray arg = +-2pi/3."""
    from scipy.optimize import brentq
    c = p.curve
    center = soft_edge_point(c, edge)
    target = 2 * math.pi / 3

    def g(theta):
        th = theta if upper else -theta
        z = center + radius * mp.expj(th)
        return abs(float(mp.arg(conf_coord_soft(p, z, edge)))) - target

    if edge == "x0":
        th = brentq(g, 0.05, math.pi - 0.05, xtol=1e-14)
    else:
        th = brentq(g, 0.05, math.pi - 0.05, xtol=1e-14)
    th = th if upper else -th
    return complex(center + radius * mp.expj(th))


def ray_preimage(p, edge, rho, upper=True):
    """Point z in the disk with f(z) = rho * exp(+-2pi i/3) (Newton from the linearisation)."""
    c = p.curve
    center = soft_edge_point(c, edge)
    w = rho * mp.expjpi(mp.mpf(2) / 3 * (1 if upper else -1))
    h = mp.mpf(10) ** -20
    # derivative at the edge from a one-sided difference
    d0 = (conf_coord_soft(p, center + mp.mpf(1) / 1000, edge) - conf_coord_soft(p, center - mp.mpf(1) / 1000, edge, "+")) / (mp.mpf(2) / 1000)
    z = center + w / d0
    for _ in range(60):
        fz = conf_coord_soft(p, z, edge)
        dz = (conf_coord_soft(p, z + h, edge) - conf_coord_soft(p, z - h, edge)) / (2 * h)
        step = (fz - w) / dz
        z -= step
        if abs(step) < mp.mpf(10) ** (-mp.mp.dps // 2):
            break
    return z


# ---------------------------------------------------------------- contour system

@dataclass
class Lip:
    name: str          # "Gamma" / "Delta"
    upper: bool
    start: complex
    end: complex
    height: float

    def point(self, s):
        s = np.asarray(s, dtype=float)
        return (1 - s) * self.start + s * self.end + (1j if self.upper else -1j) * self.height * np.sin(np.pi * s)

    def dpoint(self, s):
        s = np.asarray(s, dtype=float)
        return (self.end - self.start) + (1j if self.upper else -1j) * self.height * np.pi * np.cos(np.pi * s)

    def height_at(self, x):
        """|Im| of the lip above real coordinate x (nan outside its span)."""
        from scipy.optimize import brentq
        x0, x1 = self.start.real, self.end.real
        if not (min(x0, x1) <= x <= max(x0, x1)):
            return float("nan")
        s = brentq(lambda u: float(np.real(self.point(u))) - x, 0.0, 1.0, xtol=1e-15)
        return abs(float(np.imag(self.point(s))))


@dataclass
class Disk:
    name: str
    center: float
    radius: float
    kind: str           # "airy", "airy-mirrored", "hard"

    def contains(self, z):
        return abs(complex(z) - self.center) < self.radius


@dataclass
class ContourSystem:
    curve: SpectralCurve
    disks: list
    lips: list
    lip_offset: float

    def disk(self, name):
        for d in self.disks:
            if d.name == name:
                return d
        raise KeyError(name)

    def region(self, z):
        """Name of the disk containing z, or the lens ('Gamma+', ...), or 'outer'."""
        z = complex(z)
        for d in self.disks:
            if d.contains(z):
                return d.name
        if z.imag == 0:
            return "axis"
        for lip in self.lips:
            if (z.imag > 0) != lip.upper:
                continue
            h = lip.height_at(z.real)
            if h == h and abs(z.imag) < h:
                return lip.name + ("+" if lip.upper else "-")
        return "outer"

    def lip(self, name, upper):
        for l in self.lips:
            if l.name == name and l.upper == upper:
                return l
        raise KeyError(name)


def build_contours(p, radius_x0=None, radius_0=None, radius_xi=None, lip_offset=None, hard_angle=math.pi / 3):
    c = p.curve
    x0 = float(c.x0)
    xs = float(c.xi_star)
    r1 = radius_x0 or x0 / 6
    r0 = radius_0 or abs(xs) * 0.18
    r2 = radius_xi or abs(xs) * 0.8
    if r0 + r2 >= abs(xs) or r0 + r1 >= x0:
        raise ValueError("endpoint disks overlap")
    off = lip_offset or x0 / 16
    disks = [Disk("U0", 0.0, r0, "hard"), Disk("Ux0", x0, r1, "airy"), Disk("Uxi", xs, r2, "airy-mirrored")]
    lips = []
    for upper in (True, False):
        sgn = 1 if upper else -1
        q = ray_exit_point(p, "x0", r1, upper)
        s0 = r0 * complex(math.cos(hard_angle), sgn * math.sin(hard_angle))
        mid = abs(((s0 + q) / 2).imag)
        lips.append(Lip("Gamma", upper, s0, q, max(off - mid, 0.0)))
        qx = ray_exit_point(p, "xi", r2, upper)
        e0 = r0 * complex(-math.cos(hard_angle), sgn * math.sin(hard_angle))
        mid = abs(((qx + e0) / 2).imag)
        lips.append(Lip("Delta", upper, qx, e0, max(min(off, abs(xs) / 16) - mid, 0.0)))
    return ContourSystem(c, disks, lips, off)


def lip_nodes(cs, count=40, name=None):
    out = []
    for lip in cs.lips:
        if name and lip.name != name:
            continue
        s = (np.arange(count) + 0.5) / count
        out.extend([(lip, complex(z)) for z in lip.point(s)])
    return out


def sign_chart_check(p, cs, count=40):
    """Minimum of Re phi on the lips outside the disks, and max |Re phi| on the conductors."""
    c = p.curve
    lip_min = math.inf
    worst = None
    for lip, z in lip_nodes(cs, count):
        if any(d.contains(z) for d in cs.disks):
            continue
        v = float(mp.re(p.phi(lip.name, z)))
        if v < lip_min:
            lip_min, worst = v, z
    cond = 0.0
    segs = [("Gamma", 0.0, float(c.x0)), ("Delta", float(c.xi_star), 0.0)]
    for name, lo, hi in segs:
        for u in np.linspace(0.02, 0.98, count):
            x = lo + (hi - lo) * u
            for hint in ("+", "-"):
                cond = max(cond, abs(float(mp.re(p.phi(name, x, hint)))))
    axis_max = -math.inf
    for x in list(np.linspace(float(c.x0) + 0.05, float(c.x0) + 20, count)) + list(np.linspace(float(c.xi_star) - 20, float(c.xi_star) - 0.05, count)):
        name = "Gamma" if x > 0 else "Delta"
        axis_max = max(axis_max, float(mp.re(p.phi(name, x))))
    return {
        "lip_min_re_phi": lip_min,
        "lip_argmin": [worst.real, worst.imag] if worst is not None else None,
        "conductor_max_abs_re_phi": cond,
        "axis_max_re_phi": axis_max,
        "pass": bool(lip_min > 0 and cond < 1e-10 and axis_max < 0),
    }


# ---------------------------------------------------------------- density of zeros

def _density_f(ab, x0, x):
    if not (0 < x < x0):
        return 0.0
    r = np.roots([1.0, -x, x, -ab * x])
    return float(np.max(np.abs(r.imag))) / (math.pi * x)


def density(c, x):
    """Limiting zero density at x in (0, x0): Im t_+(x + i0) / (pi x), double precision."""
    return _density_f(float(c.af * c.bf), float(c.x0), float(x))


def density_cdf(c, x):
    """Mass of (0, x] under the limiting density (substitution x = x0 u^3 tames the x^{-2/3} edge)."""
    from scipy.integrate import quad
    x0 = float(c.x0)
    x = min(float(x), x0)
    if x <= 0:
        return 0.0
    ab = float(c.af * c.bf)
    ue = (x / x0) ** (1 / 3)
    f = lambda u: _density_f(ab, x0, x0 * u ** 3) * 3 * x0 * u ** 2
    val, _ = quad(f, 0, ue, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val
