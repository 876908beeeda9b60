#pragma once

#include <complex>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "fracmhd/banded.hpp"
#include "fracmhd/fbdf.hpp"
#include "fracmhd/problem.hpp"
#include "fracmhd/spectral.hpp"

namespace fracmhd {

enum class Mode { Direct, Fast };

const char* mode_name(Mode m);
Mode parse_mode(const std::string& s);

struct SolverConfig {
    double tau = 0.01;
    long K = 100;
    int N = 16;
    double L = 1.0;
    Mode mode = Mode::Direct;
    double eps = 1e-12;
    int k0 = 10;
    long history_dump = 0;           // trajectory cadence in steps, 0 = off
    int dump_points = 101;
    std::ostream* trajectory = nullptr;
    bool keep_full_history = false;  // fast mode: also retain every step (tests only)
};

struct StepMatrices {
    double varpi1 = 0, varpik = 0;  // u,v mass coefficients at k=1 and k>=2
    double rho1 = 0, rhok = 0;      // theta mass coefficients
    double uv_stiff = 0;            // a2 w0/tau^g + 1
    double th_stiff = 0;            // b2 tau^b w0^(-b)
    RealLDL theta1, thetak;
    ComplexLDL uv1, uvk;
};

StepMatrices make_step_matrices(const SpectralSpace& sp, const ProblemCoefficients& c,
                                const SolverConfig& cfg, const WeightTable& wg,
                                const WeightTable& w1mb, const WeightTable& wmb);

struct Rhs {
    Vec F, G, P;
};

struct Solution {
    Vec U, V, Theta;  // final coefficient vectors
    double t_final = 0;
    double setup_seconds = 0;
    double loop_seconds = 0;
    long peak_history_vectors = 0;
    std::size_t Q_gamma = 0, Q_one_minus_beta = 0, Q_minus_beta = 0;
    double achieved_eps = 0;  // worst over the calibrated banks
    std::vector<std::string> warnings;
};

// One bank of pole accumulators for one operator applied to one field.
struct AccumulatorBank {
    const ContourNodes* nodes = nullptr;
    Vec decay;   // 1/(1 + sigma_i tau)
    Vec scale;   // (1 + sigma_i tau)^(-k0-1) h_i
    std::vector<Vec> q;
    long n = 0;  // number of updates applied

    void init(const ContourNodes& nd, int dim);
    void push(const Vec& x, double tau);
    // tau^order * sum_i scale_i q_i
    Vec tail(double tau) const;
};

class CoupledSolver {
public:
    CoupledSolver(const ProblemSpec& problem, const SolverConfig& cfg);

    const SpectralSpace& space() const { return sp_; }
    const StepMatrices& matrices() const { return mats_; }
    const SolverConfig& config() const { return cfg_; }
    bool fast_active() const { return fast_; }
    long completed() const { return k_; }
    long stored_vectors() const;
    long peak_history_vectors() const { return peak_; }

    // Coefficient vectors at step j (must still be stored).
    const Vec& U(long j) const;
    const Vec& V(long j) const;
    const Vec& Theta(long j) const;

    Rhs assemble_rhs_direct(long k) const;
    Rhs assemble_rhs_fast(long k) const;
    // Fold step m's vectors into the accumulators (call once per completed step).
    void update_accumulators(long m);
    void step();

    const WeightTable& w_gamma() const { return wg_; }
    const WeightTable& w_one_minus_beta() const { return w1mb_; }
    const WeightTable& w_minus_beta() const { return wmb_; }
    const ContourNodes* nodes_gamma() const { return ng_.get(); }
    const ContourNodes* nodes_one_minus_beta() const { return n1mb_.get(); }
    const ContourNodes* nodes_minus_beta() const { return nmb_.get(); }
    const AccumulatorBank& bank_u() const { return bu_; }

    double setup_seconds() const { return setup_s_; }

private:
    struct History {
        std::vector<Vec> buf;
        long first = 0;   // step index of buf[0] when full history is kept
        long ring = 0;    // ring capacity, 0 = keep everything
        long count = 0;   // steps stored so far
        void push(const Vec& v);
        const Vec& at(long j) const;
        long held() const;
    };

    Vec sum_direct(const History& h, const WeightTable& w, long k) const;
    Vec sum_local(const History& h, const WeightTable& w, long k) const;
    Vec project_terms(const std::vector<Vec>& cache, const Forcing& f, double t) const;
    Rhs assemble(long k, bool fast) const;
    void dump(long k) const;

    ProblemSpec prob_;
    SolverConfig cfg_;
    SpectralSpace sp_;
    WeightTable wg_, w1mb_, wmb_;
    std::unique_ptr<ContourNodes> ng_, n1mb_, nmb_;
    StepMatrices mats_;
    bool fast_ = false;
    std::vector<Vec> pf_, pg_, pp_;  // cached profile projections per forcing term
    History hu_, hv_, ht_;
    AccumulatorBank bu_, bv_, bt1_, bt2_;  // gamma on u, gamma on v, 1-b on th, -b on th
    long k_ = 0;
    long last_update_ = -1;
    long peak_ = 0;
    double setup_s_ = 0;
};

// Full run: construct, march to K, collect timing and diagnostics.
Solution run(const ProblemSpec& problem, const SolverConfig& cfg);

}  // namespace fracmhd
