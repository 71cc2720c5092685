"""Independent high-precision evaluation of every reference value used by the tests.

Run `python3 derive.py > oracles.hpp` to regenerate the frozen header. Uses mpmath
only; nothing here shares code with the C++ library.
"""

import mpmath as mp

mp.mp.dps = 40
pi = mp.pi


def sphere(n):
    return 2 * pi ** (mp.mpf(n) / 2) / mp.gamma(mp.mpf(n) / 2)


def riesz_a(n, a):
    return mp.gamma((n - a) / mp.mpf(2)) / (mp.gamma(a / mp.mpf(2)) * pi ** (n / mp.mpf(2)) * 2 ** a)


def hls_c(n, a):
    return pi ** ((n - a) / mp.mpf(2)) * mp.gamma(a / mp.mpf(2)) / mp.gamma((n + a) / mp.mpf(2)) * (
        mp.gamma(n / mp.mpf(2)) / mp.gamma(n)) ** (-mp.mpf(a) / n)


def sobolev(n):
    return pi * n * (n - 2) * (mp.gamma(n / mp.mpf(2)) / mp.gamma(n)) ** (mp.mpf(2) / n)


def talenti(n, eps, r):
    return (n * (n - 2) * eps ** 2) ** (mp.mpf(n - 2) / 4) / (eps ** 2 + r ** 2) ** (mp.mpf(n - 2) / 2)


def rayleigh_talenti(n):
    # int |grad U|^2 / ||U||_{2N/(N-2)}^2 by direct quadrature of the bubble with eps = 1
    w = sphere(n)
    du = lambda r: mp.diff(lambda t: talenti(n, 1, t), r)
    kin = w * mp.quad(lambda r: du(r) ** 2 * r ** (n - 1), [0, 1, 10, mp.inf])
    q = mp.mpf(2 * n) / (n - 2)
    lq = (w * mp.quad(lambda r: talenti(n, 1, r) ** q * r ** (n - 1), [0, 1, 10, mp.inf])) ** (2 / q)
    return kin / lq


def newton_pairing(f, g):
    # int int f(x) g(y) / |x - y| dx dy for radial f, g in R^3 (angular mean of 1/|x-y| is 1/max)
    inner = lambda r: mp.quad(lambda s: g(s) * s ** 2, [0, r]) / r + mp.quad(lambda s: g(s) * s, [r, mp.inf])
    return (4 * pi) ** 2 * mp.quad(lambda r: f(r) * r ** 2 * inner(r), [0, 1, 4, mp.inf])


def main():
    n, a = 3, 2
    A3 = riesz_a(3, 2)
    A4 = riesz_a(4, 2)
    C = hls_c(3, 2)
    S = sobolev(3)
    S4 = sobolev(4)
    ac = A3 * C
    S_alpha = S / ac ** (mp.mpf(n - 2) / (n + a))
    threshold = mp.mpf(2 + a) / (2 * (n + a)) * (mp.mpf(n - 2) / (n + a)) ** (mp.mpf(n - 2) / (2 + a)) * S_alpha ** (
        mp.mpf(n + a) / (2 + a))

    # Gaussian e^{-r^2/2}: a = kinetic, b = mass, c = Coulomb self-energy of e^{-5 r^2/2}
    g_kin = mp.mpf(3) / 2 * pi ** 1.5
    g_mass = pi ** 1.5
    beta = mp.mpf(5) / 2
    g_c_closed = (pi / beta) ** 3 * mp.sqrt(2 * beta / pi) / (4 * pi)
    g_c_quad = A3 * newton_pairing(lambda r: mp.e ** (-beta * r * r), lambda r: mp.e ** (-beta * r * r))
    assert abs(g_c_closed - g_c_quad) < mp.mpf(10) ** -25
    g_energy = (g_kin + g_mass - g_c_closed) / 2
    g_poh = ((n - 2) * g_kin + n * g_mass - (n + a) * g_c_closed) / 2
    g_tau2 = (3 * g_mass + mp.sqrt(9 * g_mass ** 2 + 20 * g_kin * g_c_closed)) / (10 * g_c_closed)
    g_tau = mp.sqrt(g_tau2)
    fib = lambda t, ka, kb, kc: t ** (n - 2) * ka / 2 + t ** n * kb / 2 - t ** (n + a) * kc / 2
    g_proj = fib(g_tau, g_kin, g_mass, g_c_closed)

    unit_tau = mp.sqrt((3 + mp.sqrt(29)) / 10)
    unit_proj = fib(unit_tau, 1, 1, 1)
    fib_at_2 = fib(2, 1, 1, 1)

    two_tau = (mp.mpf(1) / 5) ** (mp.mpf(1) / 4)
    two_max = (two_tau - two_tau ** 5) / 2

    # HLS optimizer h = (1 + r^2)^{-5/2}: quotient equals C exactly
    h = lambda r: (1 + r * r) ** mp.mpf(-2.5)
    h_norm = (4 * pi * mp.quad(lambda r: h(r) ** (mp.mpf(6) / 5) * r * r, [0, 1, 10, mp.inf])) ** (mp.mpf(5) / 3)
    hls_ratio = newton_pairing(h, h) / h_norm
    assert abs(hls_ratio / C - 1) < mp.mpf(10) ** -20

    rows = [
        ("kRieszA3", A3, "A_2 in R^3"),
        ("kRieszA4", A4, "A_2 in R^4"),
        ("kHlsC3", C, "sharp HLS constant, N = 3, alpha = 2"),
        ("kSobolev3", S, "sharp Sobolev constant, N = 3"),
        ("kSobolev4", S4, "sharp Sobolev constant, N = 4"),
        ("kSobolev3Rayleigh", rayleigh_talenti(3), "Rayleigh quotient of the bubble by quadrature"),
        ("kSobolev4Rayleigh", rayleigh_talenti(4), "same in R^4"),
        ("kSAlpha3", S_alpha, "critical Sobolev-HLS constant, N = 3, alpha = 2"),
        ("kThreshold3", threshold, "critical level threshold, N = 3, alpha = 2, mu = 1"),
        ("kSobolev3Pow", S ** 1.5, "S^{3/2}"),
        ("kGaussKinetic", g_kin, "int |grad e^{-r^2/2}|^2 in R^3"),
        ("kGaussMass", g_mass, "int e^{-r^2} in R^3"),
        ("kGaussNonlocal", g_c_closed, "Coulomb self-energy of e^{-5r^2/2} with A_2 = 1/(4 pi)"),
        ("kGaussEnergy", g_energy, ""),
        ("kGaussPohozaev", g_poh, ""),
        ("kGaussTau", g_tau, "fiber maximizer for the Gaussian breakdown"),
        ("kGaussProjected", g_proj, ""),
        ("kUnitTau", unit_tau, "fiber maximizer for a = b = c = 1"),
        ("kUnitProjected", unit_proj, ""),
        ("kUnitFiberAt2", fib_at_2, ""),
        ("kTwoTermTau", two_tau, "two-term fiber, a = c = mu = 1"),
        ("kTwoTermMax", two_max, ""),
        ("kTalentiZero", talenti(3, mp.mpf("0.1"), 0), "U_eps(0), N = 3, eps = 0.1"),
        ("kBallL2", mp.sqrt(4 * pi / 3), "||1_{B_1}||_2 in R^3"),
        ("kBallLq", (4 * pi / 3) ** (mp.mpf(1) / 3), "||1_{B_1}||_3 in R^3"),
    ]
    print("#pragma once")
    print()
    print("// Generated by derive.py (mpmath, 40 digits). Do not edit by hand.")
    print()
    print("namespace oracle {")
    print()
    for name, value, note in rows:
        if note:
            print(f"// {note}")
        print(f"inline constexpr double {name} = {mp.nstr(value, 20, min_fixed=-5, max_fixed=5)};")
    print()
    print("}  // namespace oracle")


if __name__ == "__main__":
    main()
