#pragma once

#include <string>

#include "fracmhd/problem.hpp"

namespace fracmhd {

// D^{-s} t^mu = coef * t^exponent
struct PowerTerm {
    double coef;
    double exponent;
};

PowerTerm frac_integral_power(double mu, double s);
// Riemann-Liouville derivative of order s in (0,1) of t^mu (mu > -1): Gamma(mu+1)/Gamma(mu+1-s) t^(mu-s)
PowerTerm frac_derivative_power(double mu, double s);

// Apply D^{-s} term by term and scale by `factor`.
Forcing frac_integral(const Forcing& f, double s, double factor = 1.0);

enum class GVariant {
    Consistent,  // matches the manufactured solution
    Printed      // as typeset, with (z^2 - z) on the 4/Gamma(3-g) term
};

// Manufactured problem on [0,1] x [0,1] with all coefficients 1.
ProblemSpec example1_problem(double gamma, double beta, GVariant gv = GVariant::Consistent);
// Forcing of the untransformed temperature equation
//   th_t + D^b th_t - th_zz - th - D^b th = p.
Forcing example1_p(double beta);

struct PhysicalParams {
    double alpha = 1.0;
    double lambda = 1.0;
    double M = 2.0;
    double m = 1.0;
    double K_perm = 2.0;
    double Gr = 10.0;
    double R = 1.0;
    double Pr = 2.0;
    double H = 1.0;
    double gamma = 0.8;
    double beta = 0.6;
    double L = 4.0;
    double T_final = 0.5;
};

void validate(const PhysicalParams& p);
ProblemCoefficients physical_coefficients(const PhysicalParams& p);

enum class FVariant {
    Derived,  // mechanically derived from the lifting: -(1/K) t^3
    Printed   // +(1/K) t^3 as typeset
};

// Lifted flow and heat problem, w = u - t^3 (1 - z/L), th~ = th - t^2 (1 - z/L).
ProblemSpec example2_problem(const PhysicalParams& p, FVariant fv = FVariant::Derived);
// Forcing of the lifted, untransformed heat equation (sign-repaired).
Forcing example2_p(const PhysicalParams& p);

struct PhysicalFields {
    double u, v, theta;
};

PhysicalFields reconstruct_fields(const ProblemSpec& spec, double w, double v, double theta_lifted,
                                  double z, double t);

// No forcing, no data; every step must stay at zero.
ProblemSpec zero_problem(double gamma = 0.5, double beta = 0.5, double L = 1.0);

}  // namespace fracmhd
