"""Independent second-order Lindstedt expansion for the two-queue difference mode.

With tau = omega * t the difference mode x = q1 - q2 (logistic expanded to fifth order) obeys

    omega x'(tau) + mu x(tau) + (lam*theta/2) y - eps (lam*theta^3/24) y^3
        + eps^2 (lam*theta^5/240) y^5 = 0,
    y = x(tau - omega*Delta) + delta*omega*x'(tau - omega*Delta).

We expand x = x0 + eps x1, omega = w0 + eps w1 + eps^2 w2 and
Delta = D0 + eps D1 (D2 = 0) with

    x0 = A cos(tau)
    x1 = a1 sin(tau) + a2 cos(tau) + a3 sin(3 tau) + a4 cos(3 tau),  a1 = -3 a3,

and remove secular terms order by order. Harmonic projections are taken by a
DFT over a sampled period and the eps-Taylor coefficients by a Cauchy integral
on a small circle, so nothing here depends on a hand-simplified coefficient
formula.

Usage: python3 lindstedt_oracle.py  > fixture rows on stdout
"""
import sys

import mpmath as mp

mp.mp.dps = 30
NTAU = 32


def hopf_point(lam, mu, theta, n, delta):
    lt = lam * theta
    w0 = mp.sqrt((lt**2 - n**2 * mu**2) / (n**2 - delta**2 * lt**2))
    arg = -(delta * lt**2 + n**2 * mu) / (n * lt * (1 + delta * mu))
    return w0, mp.acos(arg) / w0


def make_residual(lam, mu, theta, delta, w0, d0, d1):
    taus = [2 * mp.pi * j / NTAU for j in range(NTAU)]
    basis = {k: [(mp.cos(k * t), mp.sin(k * t)) for t in taus] for k in (1, 3)}

    def residual(eps, A, a2, a3, a4, w1, w2):
        a1 = -3 * a3
        omega = w0 + eps * w1 + eps**2 * w2
        shift = omega * (d0 + eps * d1)
        terms = [(1, A + eps * a2, eps * a1), (3, eps * a4, eps * a3)]

        def x(t):
            return sum(c * mp.cos(k * t) + s * mp.sin(k * t) for k, c, s in terms)

        def dx(t):
            return sum(-k * c * mp.sin(k * t) + k * s * mp.cos(k * t) for k, c, s in terms)

        # e ~ sum_k C_k cos(k tau) + S_k sin(k tau); projections stay analytic in eps
        h = {1: [mp.mpc(0), mp.mpc(0)], 3: [mp.mpc(0), mp.mpc(0)]}
        for j, t in enumerate(taus):
            y = x(t - shift) + delta * omega * dx(t - shift)
            e = (omega * dx(t) + mu * x(t) + lam * theta / 2 * y
                 - eps * lam * theta**3 / 24 * y**3 + eps**2 * lam * theta**5 / 240 * y**5)
            for k in h:
                ck, sk = basis[k][j]
                h[k][0] += e * ck * 2 / NTAU
                h[k][1] += e * sk * 2 / NTAU
        return h

    return residual


def order_coeff(f, n, m=6, r=mp.mpf("1e-4")):
    """Taylor coefficient of eps^n for each output of f (entire in eps)."""
    acc = None
    for j in range(m):
        z = r * mp.expj(2 * mp.pi * j / m)
        v = f(z)
        if acc is None:
            acc = [mp.mpc(0)] * len(v)
        acc = [a + vi * z ** (-n) for a, vi in zip(acc, v)]
    return [a.real / m for a in acc]


def solve_affine(g, n_unknowns):
    """Solve g(u) = 0 where g is affine in u, by probing at the origin and unit vectors."""
    g0 = g([mp.mpf(0)] * n_unknowns)
    cols = []
    for i in range(n_unknowns):
        u = [mp.mpf(0)] * n_unknowns
        u[i] = mp.mpf(1)
        gi = g(u)
        cols.append([gi[r] - g0[r] for r in range(len(g0))])
    J = mp.matrix(len(g0), n_unknowns)
    for i in range(n_unknowns):
        for r in range(len(g0)):
            J[r, i] = cols[i][r]
    sol = mp.lu_solve(J, mp.matrix([-v for v in g0]))
    return [sol[i] for i in range(n_unknowns)]


def expand(lam, mu, theta, delta, delay):
    lam, mu, theta, delta, delay = (mp.mpf(v) for v in (lam, mu, theta, delta, delay))
    w0, d0 = hopf_point(lam, mu, theta, 2, delta)
    d1 = delay - d0
    res = make_residual(lam, mu, theta, delta, w0, d0, d1)

    r0 = res(0, 1, 0, 0, 0, 0, 0)
    assert max(abs(v) for k in r0 for v in r0[k]) < mp.mpf(10) ** -20

    # order eps, harmonic 1: divided by A it is affine in (w1, A^2)
    def sec1(u):
        w1, a_sq = u
        A = mp.sqrt(a_sq) if a_sq > 0 else mp.mpf(1)
        scale = mp.sqrt(a_sq) if a_sq > 0 else mp.mpf(1)
        c = order_coeff(lambda e: res(e, A, 0, 0, 0, w1, 0)[1], 1)
        return [v / scale for v in c] if a_sq > 0 else c

    # residual/A = lin(w1) + A^2 * cub, where lin is the A-linear part and cub the cubic coefficient
    one = order_coeff(lambda e: res(e, mp.mpf(1), 0, 0, 0, 0, 0)[1], 1)
    two = order_coeff(lambda e: res(e, mp.mpf(2), 0, 0, 0, 0, 0)[1], 1)
    cub = [(b - 2 * a) / 6 for a, b in zip(one, two)]

    def sec1_affine(u):
        w1, a_sq = u
        at_one = order_coeff(lambda e: res(e, mp.mpf(1), 0, 0, 0, w1, 0)[1], 1)
        return [v - c + a_sq * c for v, c in zip(at_one, cub)]

    w1, a_sq = solve_affine(sec1_affine, 2)
    A = mp.sqrt(a_sq)
    check = sec1([w1, a_sq])
    assert max(abs(v) for v in check) < mp.mpf(10) ** -12, check

    # order eps, harmonic 3: affine in (a3, a4)
    a3, a4 = solve_affine(lambda u: order_coeff(lambda e: res(e, A, 0, u[0], u[1], w1, 0)[3], 1), 2)

    # order eps^2, harmonic 1: affine in (a2, w2)
    a2, w2 = solve_affine(lambda u: order_coeff(lambda e: res(e, A, u[0], a3, a4, w1, u[1])[1], 2), 2)

    return dict(w0=w0, d0=d0, A=A, w1=w1, w2=w2, a1=-3 * a3, a2=a2, a3=a3, a4=a4)


CASES = [
    # lam, mu, theta, delta, delay offset past the first critical delay
    (10.0, 1.0, 1.0, 0.0, 0.2),
    (10.0, 1.0, 1.0, 0.05, 0.1),
    (10.0, 1.0, 1.0, 0.10, 0.05),
    (10.0, 1.0, 1.0, 0.15, 0.1),
    (10.0, 1.0, 1.0, 0.19, 0.2),
    (6.0, 0.7, 1.3, 0.12, 0.15),
    (4.0, 0.5, 2.0, 0.02, 0.3),
]

if __name__ == "__main__":
    out = sys.stdout
    out.write("    // lambda, mu, theta, delta, delay, A, omega1, a1, a2, a3, a4\n")
    for lam, mu, theta, delta, off in CASES:
        _, d0 = hopf_point(mp.mpf(lam), mp.mpf(mu), mp.mpf(theta), 2, mp.mpf(delta))
        delay = float(d0 + mp.mpf(off))
        r = expand(lam, mu, theta, delta, delay)
        row = [lam, mu, theta, delta, delay] + [float(r[k]) for k in ("A", "w1", "a1", "a2", "a3", "a4")]
        out.write("    {" + ", ".join("%.17g" % v for v in row) + "},\n")
        out.flush()
