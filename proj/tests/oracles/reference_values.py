"""Independent high-precision reference values for the unit tests.

Uses mpmath matrix exponentials and direct state-vector composition; none of
the closed-form eigen formulas used by the library appear here.
"""
import mpmath as mp

mp.mp.dps = 40


def sector(g, delta, be, bg, n):
    off = g * mp.sqrt((n + 1) * (n + 2))
    return mp.matrix([[delta / 2 + be * n, off], [off, -delta / 2 - bg * (n + 2)]])


def column(g, delta, be, bg, n, t):
    u = mp.expm(-1j * sector(g, delta, be, bg, n) * t)
    return u[0, 0], u[1, 0]


def joint(g, delta, be, bg, n0, t):
    a1, a2 = column(g, delta, be, bg, n0, t)
    b1, b2 = column(g, delta, be, bg, n0 + 2, t)
    # amplitudes of |ee,n0>, |eg,n0+2>, |ge,n0+2>, |gg,n0+4>
    c_ee, c_eg, c_ge, c_gg = a1 * a1, a1 * a2, a2 * b1, a2 * b2
    return (abs(c_ee) ** 2, abs(c_eg) ** 2, abs(c_ge) ** 2, abs(c_gg) ** 2,
            c_eg * mp.conj(c_ge))


def wootters(rho):
    sy = mp.matrix([[0, -1j], [1j, 0]])
    yy = mp.matrix(4, 4)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    yy[2 * i + k, 2 * j + l] = sy[i, j] * sy[k, l]
    rt = yy * rho.conjugate() * yy
    ev = mp.eig(rho * rt, left=False, right=False)
    lam = sorted([max(mp.re(x), 0) for x in ev], reverse=True)
    s = [mp.sqrt(x) for x in lam]
    return max(0, s[0] - s[1] - s[2] - s[3]), lam


def xmatrix(a, gm, d, e, eps):
    return mp.matrix([[a, 0, 0, 0], [0, gm, eps, 0], [0, mp.conj(eps), d, 0], [0, 0, 0, e]])


def h(x):
    if x in (0, 1):
        return mp.mpf(0)
    return -x * mp.log(x, 2) - (1 - x) * mp.log(1 - x, 2)


def eof(c):
    return h((1 + mp.sqrt(1 - c * c)) / 2)


def thermal(nbar, nmax):
    return [mp.mpf(nbar) ** n / (1 + mp.mpf(nbar)) ** (n + 1) for n in range(nmax + 1)]


if __name__ == "__main__":
    m = sector(1, 2, 2, 2, 0)
    ev, vec = mp.eigsy(m)
    print("eig (1,2,2,n=0):", ev[1], ev[0], "vec", vec[0, 1], vec[1, 1])
    print("passage (1,2,2,n=0,t=1):", column(1, 2, 2, 2, 0, 1))
    r = joint(1, 0, 0, 0, 0, 1)
    print("resonant joint gt=1:", [mp.nstr(x, 20) for x in r])
    c, lam = wootters(xmatrix(*r))
    print("resonant C gt=1:", c, "spectrum", lam)
    print("resonant EoF gt=1:", eof(c))
    print("EoF(0.27518):", eof(mp.mpf("0.27518")))
    print("nbar(1):", 1 / (mp.e - 1))
    print("P(0.1):", thermal(0.1, 2))
    for (d, b, n0, t) in [(2, 2, 0, 1), (-1, 1, 0, 1), (0, 0, 0, 1), (2, 2, 3, 2.5)]:
        r = joint(1, d, b, b, n0, t)
        c, _ = wootters(xmatrix(*r))
        print("joint", (d, b, n0, t), [mp.nstr(x, 20) for x in r], "C", mp.nstr(c, 20), "E", mp.nstr(eof(c), 20))
    # thermal nbar=0.1 resonant gt=1 with N=200
    w = thermal(0.1, 200)
    acc = [0, 0, 0, 0, 0]
    for n, p in enumerate(w):
        if p < mp.mpf(10) ** -60:
            break
        r = joint(1, 0, 0, 0, n, 1)
        acc = [a + p * x for a, x in zip(acc, r)]
    c, _ = wootters(xmatrix(*acc))
    print("thermal 0.1 resonant gt=1:", [mp.nstr(x, 20) for x in acc], "C", mp.nstr(c, 20), "E", mp.nstr(eof(c), 20))
