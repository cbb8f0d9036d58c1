"""Small-norm problem for R = S P^{-1}: Nystrom collocation in double precision.

Unknown mu = R_- - I at the quadrature nodes solves mu - C_-[mu W] = C_-[W],
one row of R at a time.
"""

from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from .deform import lens_factor
from .numerics import OrientedArc, cauchy_matrix, cauchy_transform
from .outer import CHANNELS, channel_weight, outer_N


class ParametrixUnavailable(RuntimeError):
    pass


class DivergenceError(RuntimeError):
    pass


def _np(M):
    return np.array([[complex(M[i, j]) for j in range(M.cols)] for i in range(M.rows)])


@dataclass
class JumpData:
    arcs: list
    W: list                          # per arc: (nodes, 3, 3) complex
    tags: list                       # per arc: tag string
    meta: dict = field(default_factory=dict)

    @property
    def nodes(self):
        return np.concatenate([a.nodes for a in self.arcs])

    def stacked(self):
        return np.concatenate(self.W, axis=0)

    def sup_by_tag(self):
        out = {}
        for tag, w in zip(self.tags, self.W):
            v = float(np.max(np.abs(w))) if len(w) else 0.0
            key = tag.split(":")[0]
            out[key] = max(out.get(key, 0.0), v)
        return out

    def l2(self):
        tot = 0.0
        for arc, w in zip(self.arcs, self.W):
            tot += float(np.sum(arc.arclength_weights * np.sum(np.abs(w) ** 2, axis=(1, 2))))
        return tot ** 0.5

    def drop_dead(self, floor=1e-40):
        """Remove nodes where |W| < floor on whole panels (arcs are kept whole if any node is alive)."""
        keep = [i for i, w in enumerate(self.W) if len(w) and np.max(np.abs(w)) >= floor]
        return JumpData([self.arcs[i] for i in keep], [self.W[i] for i in keep], [self.tags[i] for i in keep], dict(self.meta))


def _lip_arc(lip, panels, order):
    return OrientedArc(lambda s: lip.point(s), lambda s: lip.dpoint(s), np.linspace(0, 1, panels + 1), order, False,
                       "lip:%s%s" % (lip.name, "+" if lip.upper else "-"))


def _axis_cutoff(p, m, n, name, start, direction, floor=1e-17):
    """Distance along the axis after which |w e^{n phi}| < floor."""
    step = 0.25
    x = start
    for _ in range(4000):
        x_next = x + direction * step
        v = abs(channel_weight(name, m, x_next) * mp.exp(n * p.phi(name, x_next)))
        x = x_next
        if v < floor:
            break
        step *= 1.15
    return x


def assemble_WR(sm, p, m, n, cs, parametrices, panels=8, order=16, hard_edge="require", axis_floor=1e-17):
    """Jump data of R on circles, lips outside the disks and the axis tails.

    hard_edge="require" raises when no parametrix is available for U0;
    hard_edge="omit" drops the U0 circle (diagnostic only: the result is then
    not the error problem of S).
    """
    c = p.curve
    arcs, Ws, tags = [], [], []
    N = lambda z: outer_N(sm, z)
    for d in cs.disks:
        P = parametrices.get(d.name)
        if P is None:
            if hard_edge == "require":
                raise ParametrixUnavailable("no local parametrix for %s" % d.name)
            continue
        arc = OrientedArc.circle(d.center, d.radius, panels=panels, order=order, clockwise=True, tag="circle:" + d.name)
        w = []
        for z in arc.nodes:
            zz = mp.mpc(z)
            w.append(_np(P(zz) * mp.inverse(N(zz))) - np.eye(3))
        arcs.append(arc), Ws.append(np.array(w)), tags.append(arc.tag)
    for lip in cs.lips:
        arc = _lip_arc(lip, max(2, panels // 2), order)
        w = []
        for z in arc.nodes:
            zz = mp.mpc(z)
            Nz = N(zz)
            w.append(_np(Nz * lens_factor(p, m, n, lip.name, zz) * mp.inverse(Nz)) - np.eye(3))
        arcs.append(arc), Ws.append(np.array(w)), tags.append(arc.tag)
    for name, start, direction in (("Gamma", float(c.x0) + cs.disk("Ux0").radius, 1),
                                   ("Delta", float(c.xi_star) - cs.disk("Uxi").radius, -1)):
        end = _axis_cutoff(p, m, n, name, start, direction, axis_floor)
        a, b = (start, end) if direction > 0 else (end, start)
        arc = OrientedArc.segment(a, b, panels=max(2, panels // 2), order=order, tag="axis:" + name)
        i, j = CHANNELS[name]
        w = []
        for z in arc.nodes:
            x = mp.mpf(z.real)
            Nz = N(x)
            J = mp.eye(3)
            J[i, j] = channel_weight(name, m, x) * mp.exp(n * p.phi(name, x))
            w.append(_np(Nz * J * mp.inverse(Nz)) - np.eye(3))
        arcs.append(arc), Ws.append(np.array(w)), tags.append(arc.tag)
    return JumpData(arcs, Ws, tags, {"n": n, "hard_edge": hard_edge})


def solve_Rminus(jd, method="dense", tol=1e-12, maxiter=50):
    """Boundary values R_- at every node, shape (M, 3, 3)."""
    W = jd.stacked()
    M = W.shape[0]
    if M == 0:
        return np.zeros((0, 3, 3)) + np.eye(3)
    K = cauchy_matrix(jd.arcs, side=-1)
    rhs = np.einsum("ij,jab->iab", K, W)        # C_-[W], rows a, cols b
    if method == "dense":
        A = np.eye(3 * M) - np.einsum("ij,jba->iajb", K, W).reshape(3 * M, 3 * M)
        mu = np.empty((M, 3, 3), dtype=complex)
        for r in range(3):
            b = rhs[:, r, :].reshape(3 * M)
            mu[:, r, :] = np.linalg.solve(A, b).reshape(M, 3)
        return np.eye(3)[None] + mu
    if method == "neumann":
        mu = rhs.copy()
        for it in range(maxiter):
            new = rhs + np.einsum("ij,jab->iab", K, np.einsum("iab,ibc->iac", mu, W))
            upd = np.max(np.abs(new - mu)) / max(np.max(np.abs(new)), 1e-300)
            if not np.all(np.isfinite(new)) or (it > 3 and upd > 1e3):
                raise DivergenceError("Neumann series diverges (operator norm >= 1)")
            mu = new
            if upd < tol:
                break
        else:
            raise DivergenceError("Neumann iteration did not reach %g in %d steps" % (tol, maxiter))
        return np.eye(3)[None] + mu
    raise ValueError("method must be 'dense' or 'neumann'")


def integral_equation_residual(jd, Rm):
    K = cauchy_matrix(jd.arcs, side=-1)
    W = jd.stacked()
    lhs = Rm - np.eye(3)[None]
    rhs = np.einsum("ij,jab->iab", K, np.einsum("iab,ibc->iac", Rm, W))
    return float(np.max(np.abs(lhs - rhs)))


def _split(jd, values):
    out, k = [], 0
    for arc in jd.arcs:
        out.append(values[k:k + len(arc)])
        k += len(arc)
    return out


def reconstruct_R(Rm, jd, z):
    dens = np.einsum("iab,ibc->iac", Rm, jd.stacked())
    return np.eye(3) + cauchy_transform(jd.arcs, _split(jd, dens), complex(z))


def extract_R1(Rm, jd):
    dens = np.einsum("iab,ibc->iac", Rm, jd.stacked())
    w = np.concatenate([a.weights for a in jd.arcs])
    return -np.tensordot(w, dens, axes=(0, 0)) / (2j * np.pi)


def constant_jump_problem(c=0.1, clockwise=False, panels=8, order=16):
    """Unit circle with J = I + c E13; closed-form R is I + c E13 (ccw interior) or I - c E13 (cw interior)."""
    arc = OrientedArc.circle(0, 1, panels=panels, order=order, clockwise=clockwise, tag="circle:test")
    W = np.zeros((len(arc), 3, 3), dtype=complex)
    W[:, 0, 2] = c
    return JumpData([arc], [W], [arc.tag])
