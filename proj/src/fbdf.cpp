#include "fracmhd/fbdf.hpp"

#include "fracmhd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

namespace fracmhd {

namespace {

using ld = long double;

constexpr long kTail = 120;  // 3^-120 ~ 1e-57, far below any weight we keep

void check_order(double order) {
    if (!(order > -1.0 && order < 1.0) && order != 1.0)
        throw DomainError("FBDF order must lie in (-1,1), got " + std::to_string(order));
}

// Taylor coefficients of (1 - x/r)^order.
std::vector<ld> binomial_series(ld order, ld r, long n) {
    std::vector<ld> a(static_cast<std::size_t>(n) + 1);
    a[0] = 1.0L;
    for (long k = 1; k <= n; ++k)
        a[k] = a[k - 1] * (static_cast<ld>(k) - 1.0L - order) / (r * static_cast<ld>(k));
    return a;
}

// Relative weight used for the error check; exact zeros only occur at k <= 3
// on isolated orders, so fall back to an absolute measure there.
ld denom(ld w) {
    return std::max(std::fabs(w), static_cast<ld>(1e-300));
}

struct Piece {
    std::vector<ld> s;  // dimensionless pole s = sigma * tau
    std::vector<ld> H;  // dimensionless weight
};

// Integrand of the real-line representation, split at the branch point s=2.
//   (0,2):  s = 2/(1+e^-y),  weight -(sin(pi g)/pi) * (s(2-s)/2)^(1+g)
//   (2,oo): s = 2+e^y,       weight -(sin(2 pi g)/pi) * ((2+e^y)e^y/2)^g * e^y
void node_at(ld g, bool upper, ld y, ld& s, ld& H) {
    constexpr ld pi = std::numbers::pi_v<ld>;
    if (!upper) {
        s = 2.0L / (1.0L + std::exp(-y));
        ld c = std::cosh(0.5L * y);
        ld phi = 1.0L / (2.0L * c * c);
        H = -(std::sin(pi * g) / pi) * std::pow(phi, 1.0L + g);
    } else {
        ld e = std::exp(y);
        s = 2.0L + e;
        H = -(std::sin(2.0L * pi * g) / pi) * std::pow((2.0L + e) * e / 2.0L, g) * e;
    }
}

// max over k in (k0, K] of |H| (1+s)^(-1-k) / |w_k|.
// |w_k| ~ k^(-1-g) past the first few indices, so the ratio peaks near
// k* = (1+g)/log(1+s); scan the head exactly and a window around k*.
ld max_contribution(ld s, ld H, ld g, int k0, long K, const std::vector<ld>& w) {
    const ld L1 = std::log1p(s);
    const ld aH = std::fabs(H);
    ld best = 0.0L;
    auto at = [&](long k) {
        if (k > k0 && k <= K) best = std::max(best, aH * std::exp(-(k + 1) * L1) / denom(w[k]));
    };
    long head = std::min<long>(K, k0 + 64);
    for (long k = k0 + 1; k <= head; ++k) at(k);
    ld ks = (1.0L + g) / L1;
    long kc = ks > static_cast<ld>(K) ? K : static_cast<long>(ks);
    for (long k = kc - 3; k <= kc + 3; ++k) at(k);
    at(K);
    return best;
}

// Walk outward from y=0 until `quiet` consecutive nodes are negligible.
void sweep(ld g, bool upper, ld dy, int k0, long K, const std::vector<ld>& w, ld floor_rel,
           std::size_t budget, Piece& out) {
    constexpr int quiet = 6;
    for (int dir : {-1, 1}) {
        int calm = 0;
        for (long j = (dir < 0 ? 0 : 1);; ++j) {
            ld y = dir * dy * static_cast<ld>(j);
            ld s, H;
            node_at(g, upper, y, s, H);
            if (!std::isfinite(static_cast<double>(s)) || !std::isfinite(static_cast<double>(H)))
                break;
            ld c = max_contribution(s, H * dy, g, k0, K, w);
            out.s.push_back(s);
            out.H.push_back(H * dy);
            calm = (c < floor_rel) ? calm + 1 : 0;
            if (calm >= quiet || out.s.size() > budget) break;
        }
    }
}

std::vector<ld> weights_ld(ld order, long K) {
    std::vector<ld> a = binomial_series(order, 1.0L, K);
    std::vector<ld> b = binomial_series(order, 3.0L, std::min(K, kTail));
    ld scale = std::pow(1.5L, order);
    std::vector<ld> w(static_cast<std::size_t>(K) + 1);
    for (long k = 0; k <= K; ++k) {
        ld acc = 0.0L;
        long jmax = std::min(k, kTail);
        for (long j = jmax; j >= 0; --j) acc += b[j] * a[k - j];
        w[k] = scale * acc;
    }
    return w;
}

// Max relative error of the node set over (k0, K], evaluated the same way fast_weight does.
ld validate(const std::vector<ld>& s, const std::vector<ld>& H, int k0, long K,
            const std::vector<ld>& w) {
    std::vector<ld> r(s.size()), p(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        r[i] = 1.0L / (1.0L + s[i]);
        p[i] = std::pow(r[i], static_cast<ld>(k0) + 2.0L);
    }
    ld worst = 0.0L;
    for (long k = k0 + 1; k <= K; ++k) {
        ld acc = 0.0L;
        for (std::size_t i = 0; i < s.size(); ++i) {
            acc += H[i] * p[i];
            p[i] *= r[i];
        }
        worst = std::max(worst, std::fabs(acc - w[k]) / denom(w[k]));
    }
    return worst;
}

}  // namespace

WeightTable fbdf_weights(double order, long K) {
    check_order(order);
    if (K < 0) throw ArgumentError("weight count K must be non-negative");
    std::vector<ld> w = weights_ld(order, K);
    WeightTable t;
    t.order = order;
    t.w.assign(w.begin(), w.end());
    return t;
}

ContourNodes contour_nodes(double order, double tau, long K, int k0, double eps,
                           const CalibrationOptions& opt) {
    check_order(order);
    if (!(eps > 0.0)) throw ArgumentError("eps must be positive");
    if (!(tau > 0.0)) throw ArgumentError("tau must be positive");
    if (k0 < 1) throw ArgumentError("k0 must be at least 1");
    if (K <= k0) throw ArgumentError("K must exceed k0");

    const ld g = order;
    std::vector<ld> w = weights_ld(g, K);

    ld best_err = INFINITY;
    const ld prune_budget = 0.1L * eps;
    for (ld dy = opt.dy_start; dy >= opt.dy_min; dy *= opt.refine) {
        Piece pa, pb;
        ld floor_rel = prune_budget * 1e-3L;
        sweep(g, false, dy, k0, K, w, floor_rel, opt.max_nodes * 4, pa);
        sweep(g, true, dy, k0, K, w, floor_rel, opt.max_nodes * 4, pb);

        std::vector<ld> s, H;
        s.insert(s.end(), pa.s.begin(), pa.s.end());
        s.insert(s.end(), pb.s.begin(), pb.s.end());
        H.insert(H.end(), pa.H.begin(), pa.H.end());
        H.insert(H.end(), pb.H.begin(), pb.H.end());

        // Drop the least significant nodes while their summed worst-case share stays
        // within a tenth of eps.
        std::vector<ld> c(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) c[i] = max_contribution(s[i], H[i], g, k0, K, w);
        std::vector<std::size_t> idx(s.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return c[a] < c[b]; });
        std::vector<char> keep(s.size(), 1);
        ld cum = 0.0L;
        for (std::size_t i : idx) {
            if (cum + c[i] > prune_budget) break;
            cum += c[i];
            keep[i] = 0;
        }
        std::vector<std::pair<ld, ld>> kept;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (keep[i] && H[i] != 0.0L) kept.emplace_back(s[i], H[i]);
        std::sort(kept.begin(), kept.end());
        std::vector<ld> ks, kh;
        for (auto& [si, hi] : kept) {
            ks.push_back(si);
            kh.push_back(hi);
        }
        while (ks.size() < 2) {  // degenerate orders (0): every weight past k0 is zero
            ks.push_back(ks.empty() ? 1.0L : ks.back() + 1.0L);
            kh.push_back(0.0L);
        }
        if (ks.size() > opt.max_nodes) continue;

        ContourNodes n;
        n.order = order;
        n.tau = tau;
        n.k0 = k0;
        n.K = K;
        n.dy = static_cast<double>(dy);
        const ld scale = std::pow(static_cast<ld>(tau), -1.0L - g);
        for (std::size_t i = 0; i < ks.size(); ++i) {
            n.poles.push_back(static_cast<double>(ks[i] / tau));
            n.weights_h.push_back(static_cast<double>(kh[i] * scale));
        }
        // Validate what is actually stored, not the extended-precision originals.
        std::vector<ld> vs(ks.size()), vh(ks.size());
        for (std::size_t i = 0; i < ks.size(); ++i) {
            vs[i] = static_cast<ld>(n.poles[i]) * tau;
            vh[i] = static_cast<ld>(n.weights_h[i]) / scale;
        }
        ld err = validate(vs, vh, k0, K, w);
        best_err = std::min(best_err, err);
        if (err <= eps) {
            n.achieved_eps = static_cast<double>(err);
            return n;
        }
    }
    char msg[160];
    std::snprintf(msg, sizeof msg, "contour calibration could not reach eps=%.3g (best %.3g)", eps,
                  static_cast<double>(best_err));
    throw CalibrationError(msg, static_cast<double>(best_err));
}

double fast_weight(const ContourNodes& nodes, long k) {
    if (k <= nodes.k0) throw ContractViolation("fast_weight needs k > k0; use exact weights");
    ld acc = 0.0L;
    ld tau = nodes.tau;
    for (std::size_t i = 0; i < nodes.poles.size(); ++i)
        acc += static_cast<ld>(nodes.weights_h[i]) *
               std::exp(-(static_cast<ld>(k) + 1.0L) * std::log1p(nodes.poles[i] * tau));
    return static_cast<double>(acc * std::pow(tau, 1.0L + static_cast<ld>(nodes.order)));
}

WeightDiag weight_diagnostics(const ContourNodes& nodes, const WeightTable& table) {
    if (nodes.order != table.order) throw ArgumentError("order mismatch between nodes and table");
    if (table.count() <= static_cast<std::size_t>(nodes.k0))
        throw ArgumentError("table too short for k0");
    WeightDiag d;
    d.max_index = static_cast<long>(table.count()) - 1;
    d.rel_err.assign(table.count(), 0.0);
    for (long k = nodes.k0 + 1; k <= d.max_index; ++k) {
        double e = fast_weight(nodes, k) / table[k] - 1.0;
        if (table[k] == 0.0) e = fast_weight(nodes, k);
        d.rel_err[k] = e;
        if (std::fabs(e) > d.max_err) {
            d.max_err = std::fabs(e);
            d.argmax = k;
        }
    }
    return d;
}

void write_weight_csv(std::ostream& os, const ContourNodes& nodes, const WeightTable& table) {
    WeightDiag d = weight_diagnostics(nodes, table);
    os.precision(17);
    os << "k,omega,omega_fast,rel_err\n";
    for (long k = 0; k <= d.max_index; ++k) {
        os << k << ',' << table[k] << ',';
        if (k > nodes.k0) os << fast_weight(nodes, k);
        os << ',' << d.rel_err[k] << '\n';
    }
}

}  // namespace fracmhd
