"""Generate Taylor coefficients (in x = p - 1/2) of the Riemann-Siegel
remainder functions C_0..C_4 used by src/zeta_line/rs_coeffs.rs.

    Psi(1/2 + x) = -cos(2*pi*x^2 - 5*pi/8) / cos(2*pi*x)

Run:  python3 tools/gen_rs_coeffs.py > src/zeta_line/rs_coeffs.rs
"""
import mpmath as mp

mp.mp.dps = 160
DEG = 120


def series_cos_quad():
    # -cos(2 pi x^2 - 5 pi / 8) as a power series in x
    a = [mp.mpf(0)] * (DEG + 1)
    c, s = mp.cos(5 * mp.pi / 8), mp.sin(5 * mp.pi / 8)
    k = 0
    while 2 * k <= DEG:
        # cos(u)cos(b) + sin(u)sin(b), u = 2 pi x^2
        coef_u = (2 * mp.pi) ** k / mp.factorial(k)
        if k % 2 == 0:
            a[2 * k] += -(coef_u * c * (-1) ** (k // 2))
        else:
            a[2 * k] += -(coef_u * s * (-1) ** ((k - 1) // 2))
        k += 1
    return a


def series_cos_lin():
    d = [mp.mpf(0)] * (DEG + 1)
    for k in range(0, DEG + 1, 2):
        d[k] = (-1) ** (k // 2) * (2 * mp.pi) ** k / mp.factorial(k)
    return d


def divide(n, d):
    q = [mp.mpf(0)] * (DEG + 1)
    for i in range(DEG + 1):
        acc = n[i]
        for j in range(1, i + 1):
            acc -= q[i - j] * d[j]
        q[i] = acc / d[0]
    return q


psi = divide(series_cos_quad(), series_cos_lin())


def deriv(a, m):
    return [a[i + m] * mp.factorial(i + m) / mp.factorial(i) for i in range(len(a) - m)]


def combo(terms):
    n = min(len(deriv(psi, m)) for m, _ in terms)
    out = [mp.mpf(0)] * n
    for m, w in terms:
        dm = deriv(psi, m)
        for i in range(n):
            out[i] += w * dm[i]
    return out


pi = mp.pi
C = [
    combo([(0, 1)]),
    combo([(3, -1 / (96 * pi**2))]),
    combo([(2, 1 / (64 * pi**2)), (6, 1 / (18432 * pi**4))]),
    combo([(1, -1 / (64 * pi**2)), (5, -1 / (3840 * pi**4)), (9, -1 / (5308416 * pi**6))]),
    combo([(0, 1 / (128 * pi**2)), (4, mp.mpf(19) / (24576 * pi**4)),
           (8, mp.mpf(11) / (5898240 * pi**6)), (12, 1 / (2038431744 * pi**8))]),
]

print("// Generated by tools/gen_rs_coeffs.py. Do not edit by hand.")
print("//")
print("// Taylor coefficients of the Riemann-Siegel remainder functions C_k(p)")
print("// in powers of x = p - 1/2, truncated where |c_n| 2^-n < 1e-22.")
print()
for k, c in enumerate(C):
    keep = [v for i, v in enumerate(c)]
    last = 0
    for i, v in enumerate(keep):
        if abs(v) * mp.mpf(2) ** (-i) > mp.mpf("1e-22"):
            last = i
    keep = keep[: last + 1]
    print(f"pub(super) const C{k}: [f64; {len(keep)}] = [")
    for v in keep:
        print(f"    {mp.nstr(v, 20, min_fixed=-1, max_fixed=-1)},")
    print("];")
    print()
