#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace fracmhd {

// Taylor coefficients of (3/2 - 2x + x^2/2)^order.
struct WeightTable {
    double order = 0.0;
    std::vector<double> w;

    std::size_t count() const { return w.size(); }
    double operator[](std::size_t k) const { return w[k]; }
};

WeightTable fbdf_weights(double order, long K);

// Pole/weight pairs such that
//   w~_k = tau^(1+order) * sum_i h_i (1 + sigma_i tau)^(-1-k),   k > k0.
struct ContourNodes {
    double order = 0.0;
    double tau = 0.0;
    std::vector<double> poles;      // sigma_i, increasing
    std::vector<double> weights_h;  // h_i
    int k0 = 1;
    long K = 0;                     // validated through this index
    double achieved_eps = 0.0;
    double dy = 0.0;                // trapezoidal spacing that was accepted

    std::size_t Q() const { return poles.size(); }
};

struct CalibrationOptions {
    std::size_t max_nodes = 20000;
    double dy_start = 1.0;
    double dy_min = 0.02;
    double refine = 0.8;
};

ContourNodes contour_nodes(double order, double tau, long K, int k0, double eps,
                           const CalibrationOptions& opt = {});

double fast_weight(const ContourNodes& nodes, long k);

struct WeightDiag {
    std::vector<double> rel_err;  // index k; zero for k <= k0
    long max_index = 0;
    double max_err = 0.0;
    long argmax = 0;
};

WeightDiag weight_diagnostics(const ContourNodes& nodes, const WeightTable& table);

// Header `k,omega,omega_fast,rel_err`; omega_fast is blank for k <= k0.
void write_weight_csv(std::ostream& os, const ContourNodes& nodes, const WeightTable& table);

}  // namespace fracmhd
