#include "fracmhd/spectral.hpp"

#include "fracmhd/banded.hpp"
#include "fracmhd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fracmhd {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre_pair(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (n == 0) {
        p = 1.0;
        dp = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

constexpr int kMinRule = 32;

}  // namespace

double legendre_eval(int j, double zhat) {
    if (j < 0) throw ArgumentError("Legendre index must be non-negative");
    if (j == 0) return 1.0;
    double p0 = 1.0, p1 = zhat;
    for (int k = 2; k <= j; ++k) {
        double p2 = ((2.0 * k - 1.0) * zhat * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

QuadratureRule gauss_rule(int n, double L) {
    if (n < 1) throw ArgumentError("Gauss rule needs n >= 1");
    QuadratureRule r;
    r.z.resize(n);
    r.w.resize(n);
    r.degree = 2 * n - 1;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p = 0, dp = 1;
        for (int it = 0; it < 100; ++it) {
            legendre_pair(n, x, p, dp);
            double dx = p / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        legendre_pair(n, x, p, dp);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root; fill symmetric pair on [0, L]
        r.z[n - 1 - i] = 0.5 * L * (1.0 + x);
        r.z[i] = 0.5 * L * (1.0 - x);
        r.w[i] = r.w[n - 1 - i] = 0.5 * L * w;
    }
    if (n % 2 == 1) r.z[n / 2] = 0.5 * L;
    return r;
}

Vec EvenPenta::apply(const Vec& x) const {
    Vec y(x.size(), 0.0);
    apply_add(x, 1.0, y);
    return y;
}

void EvenPenta::apply_add(const Vec& x, double a, Vec& y) const {
    const int n = size();
    for (int j = 0; j < n; ++j) y[j] += a * diag[j] * x[j];
    for (int j = 0; j + 2 < n; ++j) {
        y[j] += a * off2[j] * x[j + 2];
        y[j + 2] += a * off2[j] * x[j];
    }
}

Vec SpectralSpace::stiff_apply(const Vec& x) const {
    Vec y(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) y[j] = stiff[j] * x[j];
    return y;
}

SpectralSpace build_space(int N, double L) {
    if (N < 3) throw ArgumentError("spectral degree N must be at least 3");
    if (!(L > 0.0)) throw ArgumentError("domain length must be positive");
    SpectralSpace sp;
    sp.N = N;
    sp.L = L;
    sp.dim = N - 1;
    const double h = 0.5 * L;
    sp.mass.diag.resize(sp.dim);
    sp.mass.off2.resize(std::max(0, sp.dim - 2));
    sp.stiff.resize(sp.dim);
    for (int j = 0; j < sp.dim; ++j) {
        sp.mass.diag[j] = (2.0 / (2 * j + 1) + 2.0 / (2 * j + 5)) * h;
        sp.stiff[j] = (4.0 * j + 6.0) / h;
        if (j + 2 < sp.dim) sp.mass.off2[j] = -2.0 / (2 * j + 5) * h;
    }
    sp.rule = gauss_rule(std::max(2 * N, kMinRule), L);
    sp.basis_at.resize(sp.rule.z.size());
    for (std::size_t q = 0; q < sp.rule.z.size(); ++q) {
        double x = sp.rule.z[q] / h - 1.0;
        Vec P(N + 1);
        P[0] = 1.0;
        P[1] = x;
        for (int k = 2; k <= N; ++k) P[k] = ((2.0 * k - 1.0) * x * P[k - 1] - (k - 1.0) * P[k - 2]) / k;
        sp.basis_at[q].resize(sp.dim);
        for (int j = 0; j < sp.dim; ++j) sp.basis_at[q][j] = P[j] - P[j + 2];
    }
    return sp;
}

double basis_eval(const SpectralSpace& sp, int j, double z) {
    double x = 2.0 * z / sp.L - 1.0;
    return legendre_eval(j, x) - legendre_eval(j + 2, x);
}

Vec project(const SpectralSpace& sp, const std::function<double(double)>& f) {
    Vec b(sp.dim, 0.0);
    for (std::size_t q = 0; q < sp.rule.z.size(); ++q) {
        double fw = f(sp.rule.z[q]) * sp.rule.w[q];
        const Vec& psi = sp.basis_at[q];
        for (int j = 0; j < sp.dim; ++j) b[j] += fw * psi[j];
    }
    return b;
}

Vec project_forcing(const SpectralSpace& sp, const std::function<double(double, double)>& f,
                    double t) {
    return project(sp, [&](double z) { return f(z, t); });
}

Vec eval_expansion(const SpectralSpace& sp, const Vec& c, const Vec& z) {
    if (static_cast<int>(c.size()) != sp.dim) throw ArgumentError("coefficient length mismatch");
    Vec out(z.size());
    const double h = 0.5 * sp.L;
    Vec P(sp.N + 1);
    for (std::size_t i = 0; i < z.size(); ++i) {
        double x = z[i] / h - 1.0;
        P[0] = 1.0;
        P[1] = x;
        for (int k = 2; k <= sp.N; ++k) P[k] = ((2.0 * k - 1.0) * x * P[k - 1] - (k - 1.0) * P[k - 2]) / k;
        double s = 0.0;
        for (int j = 0; j < sp.dim; ++j) s += c[j] * (P[j] - P[j + 2]);
        out[i] = s;
    }
    return out;
}

double l2_error(const SpectralSpace& sp, const Vec& c, const std::function<double(double)>& exact) {
    if (static_cast<int>(c.size()) != sp.dim) throw ArgumentError("coefficient length mismatch");
    double acc = 0.0;
    for (std::size_t q = 0; q < sp.rule.z.size(); ++q) {
        double v = 0.0;
        const Vec& psi = sp.basis_at[q];
        for (int j = 0; j < sp.dim; ++j) v += c[j] * psi[j];
        double d = v - exact(sp.rule.z[q]);
        acc += sp.rule.w[q] * d * d;
    }
    return std::sqrt(acc);
}

double l2_norm(const SpectralSpace& sp, const Vec& c) {
    return l2_error(sp, c, [](double) { return 0.0; });
}

Vec l2_projection(const SpectralSpace& sp, const std::function<double(double)>& f) {
    RealLDL S(sp.mass.diag, sp.mass.off2);
    return S.solve(project(sp, f));
}

}  // namespace fracmhd
