"""Multiple Laguerre polynomials of the first kind: exact oracle.

Weights w_j(x) = x^{alpha_j} exp(-n x) on (0, inf), n = n1 + n2.
"""

import json
from dataclasses import dataclass, field

import mpmath as mp

from .numerics import DEFAULT_BITS, bits_for_degree, gamma


class SingularSystemError(ArithmeticError):
    pass


class RootFindingError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ModelDescriptor:
    alpha1: float
    alpha2: float
    n1: int
    n2: int
    ratio: float | None = None
    bits: int = DEFAULT_BITS

    def __post_init__(self):
        if not (self.alpha1 > -1 and self.alpha2 > -1):
            raise ValueError("alpha1 and alpha2 must exceed -1")
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("multi-index entries must be non-negative")

    @property
    def n(self):
        return self.n1 + self.n2

    @property
    def Lambda(self):
        return (self.n, -self.n1, -self.n2)

    @property
    def alphas(self):
        return (self.alpha1, self.alpha2)

    @property
    def a(self):
        """Fraction n1/n used by the spectral curve (limit ratio when declared)."""
        if self.ratio is not None:
            return mp.mpf(self.ratio)
        return mp.mpf(self.n1) / self.n

    def with_n(self, n1, n2, bits=None):
        return ModelDescriptor(self.alpha1, self.alpha2, n1, n2, self.ratio, bits or self.bits)

    def working_bits(self):
        return bits_for_degree(self.n, self.bits)

    def weight(self, j, x):
        al = mp.mpf(self.alphas[j - 1])
        return mp.mpf(x) ** al * mp.exp(-self.n * mp.mpf(x))


@dataclass
class MonicPolynomial:
    degree: int
    coefficients: list  # ascending powers, coefficients[-1] == 1
    condition: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.coefficients) != self.degree + 1:
            raise ValueError("coefficient list length must be degree + 1")
        if self.coefficients[-1] != 1:
            raise ValueError("polynomial is not monic")


def moment(j, k, m):
    """Integral of x^k w_j(x) over (0, inf)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    al = mp.mpf(m.alphas[j - 1])
    n = max(m.n, 1)
    return gamma(k + al + 1) / mp.mpf(n) ** (k + al + 1)


def _conditions(m):
    for j, nj in ((1, m.n1), (2, m.n2)):
        for k in range(nj):
            yield j, k


def solve_mop(m, bits=None):
    """Monic type II multiple orthogonal polynomial P_{n1,n2} from the Gram system.

    bits overrides the degree-based working precision.
    """
    n = m.n
    if n == 0:
        return MonicPolynomial(0, [mp.mpf(1)])
    with mp.workprec(bits or m.working_bits()):
        A = mp.matrix(n, n)
        rhs = mp.matrix(n, 1)
        for r, (j, k) in enumerate(_conditions(m)):
            mom = [moment(j, k + i, m) for i in range(n + 1)]
            scale = max(abs(x) for x in mom)
            for i in range(n):
                A[r, i] = mom[i] / scale
            rhs[r] = -mom[n] / scale
        try:
            c = mp.lu_solve(A, rhs)
        except ZeroDivisionError as exc:
            raise SingularSystemError("Gram matrix is singular at %d bits" % mp.mp.prec) from exc
        coeffs = [+c[i] for i in range(n)] + [mp.mpf(1)]
        cond = None
        if n <= 40:
            cond = float(mp.mnorm(A, 1) * mp.mnorm(mp.inverse(A), 1))
    if any(not mp.isfinite(x) for x in coeffs):
        raise SingularSystemError("non-finite Gram solution")
    return MonicPolynomial(n, coeffs, cond)


def closed_form_coefficients(m, extra_bits=600):
    """Coefficients from the Rodrigues-type finite difference formula.

    Independent of the Gram solve; used as a cross-check oracle.
    """
    a1, a2 = mp.mpf(m.alpha1), mp.mpf(m.alpha2)
    n1, n2, n = m.n1, m.n2, m.n
    with mp.extraprec(extra_bits):
        q = [mp.rf(k + a1 + 1, n1) * mp.rf(k + a2 + 1, n2) for k in range(n + 1)]
        out = []
        for j in range(n + 1):
            s = mp.fsum((-1) ** (j - k) * mp.binomial(j, k) * q[k] for k in range(j + 1))
            out.append((-1) ** (n + j) * s / mp.factorial(j) * mp.mpf(max(n, 1)) ** (j - n))
    return [+x for x in out]


def orthogonality_residuals(p, m, bits=None):
    """Relative residual of each orthogonality condition."""
    out = []
    with mp.workprec(bits or m.working_bits()):
        for j, k in _conditions(m):
            terms = [p.coefficients[i] * moment(j, k + i, m) for i in range(p.degree + 1)]
            out.append(abs(mp.fsum(terms)) / mp.fsum(abs(t) for t in terms))
    return out


def poly_eval(p, z):
    acc = mp.mpf(0)
    for c in reversed(p.coefficients):
        acc = acc * z + c
    return acc


def poly_eval_with_derivative(p, z):
    v = mp.mpf(0)
    d = mp.mpf(0)
    for c in reversed(p.coefficients):
        d = d * z + v
        v = v * z + c
    return v, d


def _root_bound(p):
    return 1 + max(abs(c) for c in p.coefficients[:-1]) if p.degree else 1


def _maehly_roots(p, tol):
    """Newton with implicit deflation, descending from above.

    For a real-rooted polynomial each run started above the largest remaining
    root converges monotonically; the doubled first steps are the usual
    acceleration.
    """
    roots = []
    x = mp.mpf(_root_bound(p))
    for _ in range(p.degree):
        for it in range(20000):
            v, d = poly_eval_with_derivative(p, x)
            if v == 0:
                break
            corr = mp.fsum(1 / (x - r) for r in roots) if roots else 0
            denom = d / v - corr
            step = 1 / denom
            x_new = x - step
            if abs(step) <= tol * max(abs(x), mp.mpf(1) / (p.degree ** 3 + 1)):
                x = x_new
                break
            x = x_new
        else:
            raise RootFindingError("Newton iteration did not converge")
        roots.append(x)
        gap = abs(x) * mp.mpf(2) ** (-mp.mp.prec // 3) + mp.mpf(2) ** (-mp.mp.prec // 2)
        x = x - gap
    return roots


def certify_real_roots(p, roots):
    """Sign alternation of p at interlacing test points proves n distinct real roots."""
    rs = sorted(roots)
    pts = [rs[0] - 1] + [(u + v) / 2 for u, v in zip(rs[:-1], rs[1:])] + [rs[-1] + 1]
    signs = [mp.sign(poly_eval(p, x)) for x in pts]
    return all(s != 0 for s in signs) and all(s1 == -s2 for s1, s2 in zip(signs[:-1], signs[1:]))


def poly_zeros(p, bits=None):
    """All zeros, ascending.  Real-rooted input is certified, otherwise polyroots is used."""
    if p.degree == 0:
        return []
    bits = bits or max(mp.mp.prec, bits_for_degree(p.degree))
    with mp.workprec(bits):
        tol = mp.mpf(2) ** (-bits // 2)
        try:
            roots = _maehly_roots(p, tol)
            if certify_real_roots(p, roots):
                return sorted(roots)
        except (RootFindingError, ZeroDivisionError):
            pass
        try:
            r = mp.polyroots(list(reversed(p.coefficients)), maxsteps=400, extraprec=2 * bits)
        except mp.NoConvergence as exc:
            raise RootFindingError(str(exc)) from exc
        return sorted(r, key=lambda x: (mp.re(x), mp.im(x)))


def export_json(p, path=None, digits=None):
    digits = digits or int(mp.mp.prec * 0.30103) + 2
    doc = {
        "degree": p.degree,
        "coefficients": [mp.nstr(c, digits, min_fixed=1, max_fixed=0) for c in p.coefficients],
    }
    text = json.dumps(doc, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def import_json(text):
    doc = json.loads(text)
    return MonicPolynomial(doc["degree"], [mp.mpf(c) for c in doc["coefficients"]])


# -- full Y (oracle for transformation tests; quadrature based, moderate n only)

def _cauchy_weighted(p, j, m, z):
    al = mp.mpf(m.alphas[j - 1])
    n = m.n
    f = lambda x: poly_eval(p, x) * x ** al * mp.exp(-n * x) / (x - z)
    top = max(40, 4 * (m.n + 10)) / max(n, 1)
    pts = [0, mp.mpf(1) / 16, mp.mpf(1) / 2, 1, 2, 4, top, mp.inf]
    if mp.im(z) == 0:
        raise ValueError("full_Y needs z off the real axis")
    return mp.quad(f, pts) / (2j * mp.pi)


def first_row_Y(p, m, z):
    """(P, C[P w1], C[P w2]) at z off [0, inf)."""
    z = mp.mpc(z)
    return mp.matrix([[poly_eval(p, z), _cauchy_weighted(p, 1, m, z), _cauchy_weighted(p, 2, m, z)]])


def full_Y(m, z):
    """Solution of the 3x3 RHP for the model at z off [0, inf)."""
    z = mp.mpc(z)
    rows = []
    P = solve_mop(m)
    rows.append([poly_eval(P, z), _cauchy_weighted(P, 1, m, z), _cauchy_weighted(P, 2, m, z)])
    for j, (d1, d2) in ((1, (1, 0)), (2, (0, 1))):
        mm = ModelDescriptor(m.alpha1, m.alpha2, m.n1 - d1, m.n2 - d2, m.ratio, m.bits)
        if mm.n1 < 0 or mm.n2 < 0:
            rows.append([mp.mpc(0)] * 3)
            continue
        Q = _solve_fixed_scale(mm, m.n)
        nj = (m.n1, m.n2)[j - 1]
        h = mp.fsum(Q.coefficients[i] * _moment_scaled(j, nj - 1 + i, m) for i in range(Q.degree + 1))
        c = -2j * mp.pi / h
        rows.append([c * poly_eval(Q, z), c * _cauchy_weighted(Q, 1, m, z), c * _cauchy_weighted(Q, 2, m, z)])
    return mp.matrix(rows)


def _moment_scaled(j, k, m):
    al = mp.mpf(m.alphas[j - 1])
    return gamma(k + al + 1) / mp.mpf(m.n) ** (k + al + 1)


def _solve_fixed_scale(mm, n):
    """P for multi-index mm but with the exponential rate of the parent n."""
    deg = mm.n
    if deg == 0:
        return MonicPolynomial(0, [mp.mpf(1)])
    parent = ModelDescriptor(mm.alpha1, mm.alpha2, mm.n1, mm.n2, mm.ratio, mm.bits)
    A = mp.matrix(deg, deg)
    rhs = mp.matrix(deg, 1)
    scaled = type("S", (), {"alphas": parent.alphas, "n": n})
    for r, (j, k) in enumerate(_conditions(parent)):
        for i in range(deg):
            A[r, i] = _moment_scaled(j, k + i, scaled)
        rhs[r] = -_moment_scaled(j, k + deg, scaled)
    c = mp.lu_solve(A, rhs)
    return MonicPolynomial(deg, [+c[i] for i in range(deg)] + [mp.mpf(1)])
