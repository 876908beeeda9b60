#include "fracmhd/models.hpp"

#include "fracmhd/errors.hpp"

#include <cmath>
#include <numbers>

namespace fracmhd {

namespace {

constexpr double pi = std::numbers::pi;

double sin2pi(double z) { return std::sin(2.0 * pi * z); }
double quad(double z) { return z * z - z; }
double one(double) { return 1.0; }

}  // namespace

double tpow(double t, double mu) {
    if (mu == 0.0) return 1.0;
    return std::pow(t, mu);
}

double Forcing::operator()(double z, double t) const {
    double s = 0.0;
    for (const auto& term : terms) s += term.coef * tpow(t, term.mu) * term.profile(z);
    return s;
}

Forcing& Forcing::add(double coef, double mu, std::function<double(double)> profile) {
    terms.push_back({coef, mu, std::move(profile)});
    return *this;
}

PowerTerm frac_integral_power(double mu, double s) {
    if (!(mu > -1.0)) throw DomainError("fractional integral of t^mu needs mu > -1");
    if (!(s > 0.0)) throw DomainError("fractional integral order must be positive");
    return {std::exp(std::lgamma(mu + 1.0) - std::lgamma(mu + 1.0 + s)), mu + s};
}

PowerTerm frac_derivative_power(double mu, double s) {
    if (!(mu > -1.0)) throw DomainError("fractional derivative of t^mu needs mu > -1");
    return {std::tgamma(mu + 1.0) / std::tgamma(mu + 1.0 - s), mu - s};
}

Forcing frac_integral(const Forcing& f, double s, double factor) {
    Forcing out;
    for (const auto& term : f.terms) {
        PowerTerm pt = frac_integral_power(term.mu, s);
        out.add(factor * term.coef * pt.coef, pt.exponent, term.profile);
    }
    return out;
}

Forcing example1_p(double beta) {
    Forcing p;
    p.add(2.0, 1.0, sin2pi)
        .add(2.0 / std::tgamma(2.0 - beta), 1.0 - beta, sin2pi)
        .add(4.0 * pi * pi, 2.0, sin2pi)
        .add(-1.0, 2.0, sin2pi)
        .add(-2.0 / std::tgamma(3.0 - beta), 2.0 - beta, sin2pi);
    return p;
}

ProblemSpec example1_problem(double gamma, double beta, GVariant gv) {
    if (!(gamma > 0 && gamma < 1 && beta > 0 && beta < 1))
        throw DomainError("orders must lie in (0,1)");
    ProblemSpec s;
    s.name = "example1";
    s.coeffs = ProblemCoefficients{};
    s.coeffs.gamma = gamma;
    s.coeffs.beta = beta;
    s.L = 1.0;
    s.T = 1.0;

    const double g4 = std::tgamma(4.0 - gamma);
    const double g3 = std::tgamma(3.0 - gamma);
    s.f.add(3.0, 2.0, sin2pi)
        .add(6.0 / g4, 3.0 - gamma, sin2pi)
        .add(24.0 * pi * pi / g4, 3.0 - gamma, sin2pi)
        .add(4.0 * pi * pi, 3.0, sin2pi)
        .add(1.0, 3.0, sin2pi)
        .add(-1.0, 2.0, quad)
        .add(-1.0, 2.0, sin2pi);

    s.g.add(2.0, 1.0, quad).add(2.0 / g3, 2.0 - gamma, quad);
    if (gv == GVariant::Consistent)
        s.g.add(-4.0 / g3, 2.0 - gamma, one);
    else
        s.g.add(-4.0 / g3, 2.0 - gamma, quad);
    s.g.add(-2.0, 2.0, one).add(1.0, 2.0, quad).add(1.0, 3.0, sin2pi);

    s.p = frac_integral(example1_p(beta), beta);

    s.exact_u = [](double z, double t) { return t * t * t * sin2pi(z); };
    s.exact_v = [](double z, double t) { return t * t * quad(z); };
    s.exact_theta = [](double z, double t) { return t * t * sin2pi(z); };
    return s;
}

void validate(const PhysicalParams& p) {
    if (!(p.Pr > 0)) throw DomainError("Pr must be positive");
    if (!(p.lambda > 0)) throw DomainError("lambda must be positive");
    if (!(p.K_perm > 0)) throw DomainError("K_perm must be positive");
    if (!(p.M >= 0)) throw DomainError("M must be non-negative");
    if (!(p.L > 0)) throw DomainError("L must be positive");
    if (!(p.gamma > 0 && p.gamma < 1 && p.beta > 0 && p.beta < 1))
        throw DomainError("orders must lie in (0,1)");
}

ProblemCoefficients physical_coefficients(const PhysicalParams& p) {
    validate(p);
    ProblemCoefficients c;
    const double mag = p.M * p.M / (1.0 + p.m * p.m);
    c.a1 = p.alpha / p.K_perm;
    c.a2 = p.alpha;
    c.a3 = mag + 1.0 / p.K_perm;
    c.a4 = mag * p.m;
    c.a5 = p.Gr;
    c.b1 = 1.0 / p.lambda;
    c.b2 = (1.0 + p.R) / (p.Pr * p.lambda);
    c.b3 = p.H / (p.Pr * p.lambda);
    c.b4 = p.H / p.Pr;
    c.gamma = p.gamma;
    c.beta = p.beta;
    return c;
}

Forcing example2_p(const PhysicalParams& p) {
    const double L = p.L;
    auto lin = [L](double z) { return 1.0 - z / L; };
    const double b = p.beta;
    Forcing f;
    f.add(-2.0, 1.0, lin)
        .add(-2.0 * p.lambda / std::tgamma(2.0 - b), 1.0 - b, lin)
        .add(p.H / p.Pr, 2.0, lin)
        .add(2.0 * p.lambda * p.H / (p.Pr * std::tgamma(3.0 - b)), 2.0 - b, lin);
    return f;
}

ProblemSpec example2_problem(const PhysicalParams& p, FVariant fv) {
    validate(p);
    if (p.T_final > 1.0)
        throw DomainError("the lifting uses the t < 1 boundary branch; T_final must be <= 1");
    ProblemSpec s;
    s.name = "example2";
    s.coeffs = physical_coefficients(p);
    s.L = p.L;
    s.T = p.T_final;
    const double L = p.L;
    auto lin = [L](double z) { return 1.0 - z / L; };
    const double mag = p.M * p.M / (1.0 + p.m * p.m);
    const double g = p.gamma;

    s.f.add(-3.0, 2.0, lin)
        .add(-6.0 * p.alpha / (p.K_perm * std::tgamma(4.0 - g)), 3.0 - g, lin)
        .add(-mag, 3.0, lin)
        .add(fv == FVariant::Derived ? -1.0 / p.K_perm : 1.0 / p.K_perm, 3.0, lin)
        .add(p.Gr, 2.0, lin);
    s.g.add(-mag * p.m, 3.0, lin);
    s.p = frac_integral(example2_p(p), p.beta, 1.0 / p.lambda);

    s.lift_u = [L](double z, double t) { return t * t * t * (1.0 - z / L); };
    s.lift_theta = [L](double z, double t) { return t * t * (1.0 - z / L); };
    return s;
}

PhysicalFields reconstruct_fields(const ProblemSpec& spec, double w, double v, double theta_lifted,
                                  double z, double t) {
    PhysicalFields out{w, v, theta_lifted};
    if (spec.lift_u) out.u += spec.lift_u(z, t);
    if (spec.lift_theta) out.theta += spec.lift_theta(z, t);
    return out;
}

ProblemSpec zero_problem(double gamma, double beta, double L) {
    ProblemSpec s;
    s.name = "zero";
    s.coeffs.gamma = gamma;
    s.coeffs.beta = beta;
    s.L = L;
    s.T = 1.0;
    s.exact_u = s.exact_v = s.exact_theta = [](double, double) { return 0.0; };
    return s;
}

}  // namespace fracmhd
