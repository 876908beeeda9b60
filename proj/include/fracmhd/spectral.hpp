#pragma once

#include <functional>
#include <vector>

namespace fracmhd {

using Vec = std::vector<double>;

struct QuadratureRule {
    Vec z;
    Vec w;
    int degree = 0;  // exact through this polynomial degree
};

// n-point Gauss-Legendre rule on [0, L].
QuadratureRule gauss_rule(int n, double L);

double legendre_eval(int j, double zhat);

// Symmetric matrix with nonzeros only at |j-l| in {0, 2}.
struct EvenPenta {
    Vec diag;  // (j, j)
    Vec off2;  // (j, j+2), size n-2

    int size() const { return static_cast<int>(diag.size()); }
    Vec apply(const Vec& x) const;
    void apply_add(const Vec& x, double a, Vec& y) const;  // y += a * M x
};

struct SpectralSpace {
    int N = 0;
    double L = 1.0;
    int dim = 0;        // N - 1
    EvenPenta mass;     // (psi_j, psi_l) on [0, L]
    Vec stiff;          // (psi_j', psi_j') on [0, L]; off-diagonal entries vanish
    QuadratureRule rule;       // 2N points, used for projections
    std::vector<Vec> basis_at; // basis_at[q][j] = psi_j(rule.z[q])

    // Diagonal stiffness product.
    Vec stiff_apply(const Vec& x) const;
};

SpectralSpace build_space(int N, double L);

// psi_j(z) = L_j(zhat) - L_{j+2}(zhat), zhat = 2z/L - 1
double basis_eval(const SpectralSpace& sp, int j, double z);

// (f, psi_l) for l = 0..dim-1 via the space's rule.
Vec project(const SpectralSpace& sp, const std::function<double(double)>& f);
Vec project_forcing(const SpectralSpace& sp, const std::function<double(double, double)>& f,
                    double t);

Vec eval_expansion(const SpectralSpace& sp, const Vec& c, const Vec& z);

double l2_error(const SpectralSpace& sp, const Vec& c, const std::function<double(double)>& exact);
double l2_norm(const SpectralSpace& sp, const Vec& c);

// L^2 projection coefficients: solve S c = (f, psi).
Vec l2_projection(const SpectralSpace& sp, const std::function<double(double)>& f);

}  // namespace fracmhd
