#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fracmhd {

// u_t + a1 D^g u - (1 + a2 D^g) u_zz + a3 u - a4 v - a5 th = f
// v_t + a1 D^g v - (1 + a2 D^g) v_zz + a3 v + a4 u        = g
// th_t + b1 D^(1-b) th - b2 D^(-b) th_zz - b3 D^(-b) th - b4 th = p
// D^s is the Riemann-Liouville operator of order s (an integral for s < 0).
struct ProblemCoefficients {
    double a1 = 1, a2 = 1, a3 = 1, a4 = 1, a5 = 1;
    double b1 = 1, b2 = 1, b3 = 1, b4 = 1;
    double gamma = 0.5, beta = 0.5;
};

// coef * t^mu * profile(z)
struct ForcingTerm {
    double coef = 0.0;
    double mu = 0.0;
    std::function<double(double)> profile;
};

struct Forcing {
    std::vector<ForcingTerm> terms;

    double operator()(double z, double t) const;
    Forcing& add(double coef, double mu, std::function<double(double)> profile);
};

using Field = std::function<double(double, double)>;  // (z, t)

struct ProblemSpec {
    std::string name;
    ProblemCoefficients coeffs;
    double L = 1.0;
    double T = 1.0;
    Forcing f, g, p;
    Field exact_u, exact_v, exact_theta;  // empty when unknown
    Field lift_u, lift_theta;             // added back on reconstruction; empty when none

    bool has_exact() const { return static_cast<bool>(exact_u); }
};

double tpow(double t, double mu);

}  // namespace fracmhd
