#!/usr/bin/env python3
"""High-precision reference values for the C++ test suites.

Evaluates the binary coherent-state receiver formulas with mpmath at 60
significant digits, solves the displacement/transmittance optimality
conditions by Newton iteration on exact derivatives, and emits
tests/reference_values.hpp with the results frozen as double literals.

Regenerate with:

    python3 tests/oracle/compute_reference_values.py > tests/reference_values.hpp

The C++ tests must never feed values back into this script; everything here
is computed from the closed forms alone.
"""

import mpmath as mp

mp.mp.dps = 60


def helstrom(a2):
    return (1 - mp.sqrt(1 - mp.exp(-4 * a2))) / 2


def kennedy(a2):
    return mp.exp(-4 * a2) / 2


def homodyne(a2):
    # 0.5*(1 - erf(sqrt(2)*alpha)) with alpha = sqrt(a2)
    return mp.erfc(mp.sqrt(2 * a2)) / 2


def homodyne_model(a2, eff, excess):
    # detection efficiency scales the mean to sqrt(eff)*alpha, excess noise
    # widens the Gaussian: p = 0.5*erfc(sqrt(2*eff*a2/(1+excess)))
    return mp.erfc(mp.sqrt(2 * eff * a2 / (1 + excess))) / 2


def displacement(alpha, beta, eta=1, nu=0, xi=1, T=1):
    return (
        mp.mpf(1) / 2
        - mp.exp(-nu - eta * (T * alpha**2 + beta**2))
        * mp.sinh(2 * eta * xi * mp.sqrt(T) * alpha * beta)
    )


def optimal_beta(alpha, eta=1, xi=1, T=1):
    # root of  xi*sqrt(T)*alpha = beta * tanh(2*eta*xi*sqrt(T)*alpha*beta)
    m = xi * mp.sqrt(T) * alpha
    c = 2 * eta * xi * mp.sqrt(T) * alpha
    f = lambda b: b * mp.tanh(c * b) - m
    return mp.findroot(f, max(mp.mpf(1) / mp.sqrt(2 * eta), m))


def p_of_T(T, alpha, gamma, eta=1, nu=0, xi=1):
    beta = mp.sqrt(1 - T) * gamma
    return displacement(alpha, beta, eta=eta, nu=nu, xi=xi, T=T)


def optimal_T(alpha, gamma, eta=1, nu=0, xi=1):
    # stationary point of p_of_T; dp/dT = 0 is equivalent to
    # A'*sinh(S) = S'*cosh(S) with A = nu + eta*(T a^2 + (1-T) g^2),
    # S = 2 eta xi sqrt(T(1-T)) a g
    def h(T):
        Ap = eta * (alpha**2 - gamma**2)
        S = 2 * eta * xi * mp.sqrt(T * (1 - T)) * alpha * gamma
        Sp = eta * xi * alpha * gamma * (1 - 2 * T) / mp.sqrt(T * (1 - T))
        return Ap * mp.sinh(S) - Sp * mp.cosh(S)

    # h < 0 below the optimum, h -> +inf as T -> 1 (gamma > alpha cases);
    # plain bisection is the only thing that stays put this close to T = 1
    b_star = optimal_beta(alpha, eta=eta, xi=xi, T=1)
    guess = 1 - (b_star / gamma) ** 2
    lo, hi = mp.mpf(1) / 2, 1 - (1 - guess) / 1024
    assert h(lo) < 0 and h(hi) > 0
    for _ in range(220):
        mid = (lo + hi) / 2
        if h(mid) < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def eq7_residual(T, alpha, gamma, eta=1, xi=1):
    lhs = (
        xi * alpha * gamma * (1 - 2 * T)
        / ((alpha**2 - gamma**2) * mp.sqrt(T * (1 - T)))
    )
    rhs = mp.tanh(2 * eta * xi * mp.sqrt(T * (1 - T)) * alpha * gamma)
    return lhs - rhs


def mutual_information(p):
    if p == 0 or p == 1:
        return mp.mpf(1)
    return 1 + p * mp.log(p, 2) + (1 - p) * mp.log(1 - p, 2)


def crossover_kennedy_homodyne():
    return mp.findroot(lambda x: kennedy(x) - homodyne(x), mp.mpf("0.35"))


def emit(name, value, comment=""):
    if isinstance(value, mp.mpc):
        assert value.imag == 0
        value = value.real
    lit = mp.nstr(value, 17)
    if "." not in lit and "e" not in lit and "inf" not in lit:
        lit += ".0"
    line = f"inline constexpr double {name} = {lit};"
    if comment:
        line += f"  // {comment}"
    print(line)


def main():
    a04 = mp.mpf("0.4")

    print("// Generated by tests/oracle/compute_reference_values.py -- do not edit.")
    print("// High-precision (60-digit) evaluations of the receiver closed forms,")
    print("// rounded to double. Regenerate with the script if formulas change.")
    print("#pragma once")
    print("")
    print("namespace refvals {")
    print("")

    emit("kHelstromA2_016", helstrom(mp.mpf("0.16")))
    emit("kKennedyA2_016", kennedy(mp.mpf("0.16")))
    emit("kHomodyneA2_016", homodyne(mp.mpf("0.16")))
    emit("kHomodyneA2_05", homodyne(mp.mpf("0.5")))
    emit("kHomodyneModelPaperA2_016", homodyne_model(mp.mpf("0.16") / mp.mpf("0.858"),
                                                     mp.mpf("0.858"), mp.mpf("0.005")),
         "eff 0.858, excess 0.005, physical a2 = 0.16/0.858")

    b_star = optimal_beta(a04)
    p_star = displacement(a04, b_star)
    emit("kOptBetaIdealAlpha04", b_star)
    emit("kOptBeta2IdealAlpha04", b_star**2)
    emit("kOptErrorIdealAlpha04", p_star)
    emit("kDispIdealT1Alpha04Beta0748", displacement(a04, mp.mpf("0.748")))
    emit("kDispEta055Xi0996T0977Alpha04Beta0748",
         displacement(a04, mp.mpf("0.748"), eta=mp.mpf("0.55"), nu=0,
                      xi=mp.mpf("0.996"), T=mp.mpf("0.977")),
         "regression value for the imperfect-detector evaluation")

    emit("kMutualInfoAtOptError", mutual_information(p_star))

    emit("kCrossoverKennedyHomodyneA2", crossover_kennedy_homodyne())

    g247 = mp.sqrt(mp.mpf("24.7"))
    t_star = optimal_T(a04, g247)
    pT = p_of_T(t_star, a04, g247)
    emit("kToptIdealGamma2_247Alpha04", t_star)
    emit("kBetaAtToptIdealGamma2_247", mp.sqrt(1 - t_star) * g247)
    emit("kErrorAtToptIdealGamma2_247", pT)
    emit("kGapToFixedBetaOptGamma2_247", pT - p_star,
         "finite-AO penalty vs the T=1 optimum")
    assert abs(eq7_residual(t_star, a04, g247)) < mp.mpf("1e-40")

    for g2s in ("100", "1000", "10000"):
        g = mp.sqrt(mp.mpf(g2s))
        t = optimal_T(a04, g)
        emit(f"kGapGamma2_{g2s}", p_of_T(t, a04, g) - p_star)

    # imperfect apparatus: eta=0.55, xi=0.996, nu=0, gamma^2=24.7, alpha=0.4
    eta, xi = mp.mpf("0.55"), mp.mpf("0.996")
    t_imp = optimal_T(a04, g247, eta=eta, xi=xi)
    beta_imp = mp.sqrt(1 - t_imp) * g247
    emit("kToptImpGamma2_247Alpha04", t_imp, "eta=0.55, xi=0.996")
    emit("kBetaAtToptImpGamma2_247", beta_imp)
    emit("kErrorAtToptImpGamma2_247",
         displacement(a04, beta_imp, eta=eta, xi=xi, T=t_imp))
    assert abs(eq7_residual(t_imp, a04, g247, eta=eta, xi=xi)) < mp.mpf("1e-40")

    emit("kOptBetaIdealAlpha3", optimal_beta(mp.mpf(3)))
    emit("kOptBetaIdealAlpha1e4", optimal_beta(mp.mpf("1e-4")),
         "tends to 1/sqrt(2) as alpha -> 0")

    print("")
    print("}  // namespace refvals")


if __name__ == "__main__":
    main()
