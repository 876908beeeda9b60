#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracmhd/models.hpp"
#include "fracmhd/solver.hpp"

namespace fracmhd {

inline constexpr const char* kVersion = "1.0.0";

struct RunSpec {
    std::string problem = "example1";  // example1 | example2 | zero
    double gamma = 0.4;
    double beta = 0.6;
    double tau = 1.0 / 200.0;
    int N = 32;
    Mode mode = Mode::Direct;
    double eps = 1e-12;
    int k0 = 10;
    PhysicalParams phys;                  // example2 only; phys.gamma/beta are overwritten
    GVariant g_variant = GVariant::Consistent;
    FVariant f_variant = FVariant::Derived;
    std::optional<double> t_final;        // default: problem's own end time
    int profile_points = 101;
};

ProblemSpec make_problem(const RunSpec& rs);
// K is the nearest integer to T/tau; a mismatch beyond 1e-9 relative is an argument error.
SolverConfig make_config(const RunSpec& rs, const ProblemSpec& ps, double tau);
long steps_for(double T, double tau);

struct FieldErrors {
    double u = 0, v = 0, theta = 0;
    double sum() const { return u + v + theta; }
};

FieldErrors errors_vs_exact(const ProblemSpec& ps, const SpectralSpace& sp, const Solution& s);
// Reference may live in a larger space; both expansions are compared on its rule.
FieldErrors errors_vs_reference(const SpectralSpace& sp, const Solution& s,
                                const SpectralSpace& ref_sp, const Solution& ref);

struct Profile {
    std::vector<double> z, u, v, theta;
};

// L^2(0,L) norms of the reconstructed u, v, theta.
FieldErrors physical_norms(const ProblemSpec& ps, const SpectralSpace& sp, const Solution& s);

Profile physical_profile(const ProblemSpec& ps, const SpectralSpace& sp, const Solution& s,
                         int points);
void write_profile_csv(std::ostream& os, const Profile& p, const std::string& provenance);

// --- convergence -----------------------------------------------------------

struct ConvergenceRow {
    double tau;
    int N;
    FieldErrors err;
    std::optional<double> order;
    double loop_seconds;
};

struct ConvergenceReport {
    Mode mode;
    std::vector<ConvergenceRow> rows;
};

double observed_order(double tau1, double e1, double tau2, double e2);

struct Reference {
    RunSpec spec;       // problem parameters it was computed for
    double tau = 0;
    int N = 0;
    Solution sol;
};

Reference compute_reference(const RunSpec& rs, double tau_ref, int N_ref);
void save_reference(std::ostream& os, const Reference& ref, const std::string& provenance);
Reference load_reference(std::istream& is);
// Throws ArgumentError when the reference was made for different physics.
void check_reference_matches(const Reference& ref, const RunSpec& rs);

ConvergenceReport cmd_convergence(const RunSpec& rs, std::vector<double> taus,
                                  const Reference* ref = nullptr);
void write_convergence_csv(std::ostream& os, const ConvergenceReport& r, const std::string& provenance);

// --- spatial ---------------------------------------------------------------

struct SpatialRow {
    int N;
    double error;
    bool plateau;  // error fell by less than a factor 2 from the previous N
};

std::vector<SpatialRow> cmd_spatial(const RunSpec& rs, double tau, const std::vector<int>& Ns,
                                    FieldErrors* last = nullptr);
void write_spatial_csv(std::ostream& os, const std::vector<SpatialRow>& rows,
                       const std::string& provenance);

// --- bench -----------------------------------------------------------------

struct BenchRow {
    long K;
    Mode mode;
    double setup_seconds;
    double loop_seconds;  // median of the repetitions
    long peak_history_vectors;
    std::size_t Q_total;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    double slope_fast = 0, slope_direct = 0;
    bool reliable = true;
};

// Time horizon T = K * tau is fixed by the problem; tau = T/K.
BenchReport cmd_bench(const RunSpec& rs, const std::vector<long>& Ks, int reps = 3,
                      bool run_direct = true, bool run_fast = true);
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
void write_bench_csv(std::ostream& os, const BenchReport& r, const std::string& provenance);

// --- diff ------------------------------------------------------------------

struct DiffRow {
    std::string field;
    double l2_diff;
    double max_diff;
};

std::vector<DiffRow> cmd_diff(const RunSpec& rs);
void write_diff_csv(std::ostream& os, const std::vector<DiffRow>& rows, const std::string& provenance);

// --- sweep -----------------------------------------------------------------

const std::vector<std::string>& sweep_parameters();
// Set a named parameter on the spec (gamma, beta, alpha, lambda, M, m, K_perm, Gr, R, Pr, H, t).
void set_parameter(RunSpec& rs, const std::string& name, double value);

struct SweepEntry {
    double value;
    Profile profile;
    double max_abs_u, max_abs_v, mean_theta;
    double norm_u, norm_v, norm_theta;  // L^2(0,L) of the reconstructed fields
};

struct SweepReport {
    std::string param;
    std::vector<SweepEntry> entries;
    // Trends of the L^2 magnitudes: increasing | decreasing | mixed.  max|u| is
    // pinned by the wall datum u(0,t) = t^3 and cannot discriminate.
    std::string trend_u, trend_v, trend_theta;
};

SweepReport cmd_sweep(const RunSpec& rs, const std::string& param, const std::vector<double>& values);
void write_sweep_summary(std::ostream& os, const SweepReport& r, const std::string& provenance);
std::string trend(const std::vector<double>& y);

}  // namespace fracmhd
