#include "fracmhd/experiments.hpp"

#include "fracmhd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace fracmhd {

namespace {

void header(std::ostream& os, const std::string& provenance) {
    os << "# frac-mhd " << kVersion;
    if (!provenance.empty()) os << ' ' << provenance;
    os << '\n';
}

double l2_between(const SpectralSpace& sp, const Vec& a, const SpectralSpace& ref_sp, const Vec& b) {
    Vec va = eval_expansion(sp, a, ref_sp.rule.z);
    double acc = 0.0;
    for (std::size_t q = 0; q < ref_sp.rule.z.size(); ++q) {
        double vb = 0.0;
        for (int j = 0; j < ref_sp.dim; ++j) vb += b[j] * ref_sp.basis_at[q][j];
        double d = va[q] - vb;
        acc += ref_sp.rule.w[q] * d * d;
    }
    return std::sqrt(acc);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::map<std::string, double> phys_map(const RunSpec& rs) {
    const auto& p = rs.phys;
    return {{"alpha", p.alpha}, {"lambda", p.lambda}, {"M", p.M},   {"m", p.m},
            {"K_perm", p.K_perm}, {"Gr", p.Gr},     {"R", p.R},     {"Pr", p.Pr},
            {"H", p.H},         {"L", p.L},         {"gamma", rs.gamma}, {"beta", rs.beta}};
}

}  // namespace

ProblemSpec make_problem(const RunSpec& rs) {
    ProblemSpec ps;
    if (rs.problem == "example1") {
        ps = example1_problem(rs.gamma, rs.beta, rs.g_variant);
    } else if (rs.problem == "example2") {
        PhysicalParams p = rs.phys;
        p.gamma = rs.gamma;
        p.beta = rs.beta;
        if (rs.t_final) p.T_final = *rs.t_final;
        ps = example2_problem(p, rs.f_variant);
    } else if (rs.problem == "zero") {
        ps = zero_problem(rs.gamma, rs.beta);
    } else {
        throw ArgumentError("unknown problem '" + rs.problem + "'");
    }
    if (rs.t_final) ps.T = *rs.t_final;
    return ps;
}

long steps_for(double T, double tau) {
    if (!(tau > 0) || !(T > 0)) throw ArgumentError("tau and final time must be positive");
    const double r = T / tau;
    const long K = std::lround(r);
    if (K < 1 || std::fabs(r - K) > 1e-9 * r)
        throw ArgumentError("final time " + std::to_string(T) + " is not a multiple of tau");
    return K;
}

SolverConfig make_config(const RunSpec& rs, const ProblemSpec& ps, double tau) {
    SolverConfig c;
    c.tau = tau;
    c.K = steps_for(ps.T, tau);
    c.N = rs.N;
    c.L = ps.L;
    c.mode = rs.mode;
    c.eps = rs.eps;
    c.k0 = rs.k0;
    return c;
}

FieldErrors errors_vs_exact(const ProblemSpec& ps, const SpectralSpace& sp, const Solution& s) {
    if (!ps.has_exact()) throw ArgumentError("problem '" + ps.name + "' has no exact solution");
    const double t = s.t_final;
    FieldErrors e;
    e.u = l2_error(sp, s.U, [&](double z) { return ps.exact_u(z, t); });
    e.v = l2_error(sp, s.V, [&](double z) { return ps.exact_v(z, t); });
    e.theta = l2_error(sp, s.Theta, [&](double z) { return ps.exact_theta(z, t); });
    return e;
}

FieldErrors errors_vs_reference(const SpectralSpace& sp, const Solution& s,
                                const SpectralSpace& ref_sp, const Solution& ref) {
    FieldErrors e;
    e.u = l2_between(sp, s.U, ref_sp, ref.U);
    e.v = l2_between(sp, s.V, ref_sp, ref.V);
    e.theta = l2_between(sp, s.Theta, ref_sp, ref.Theta);
    return e;
}

FieldErrors physical_norms(const ProblemSpec& ps, const SpectralSpace& sp, const Solution& s) {
    const double t = s.t_final;
    auto lifted = [&](const Field& lift) {
        return [&](double z) { return lift ? -lift(z, t) : 0.0; };
    };
    FieldErrors n;
    n.u = l2_error(sp, s.U, lifted(ps.lift_u));
    n.v = l2_norm(sp, s.V);
    n.theta = l2_error(sp, s.Theta, lifted(ps.lift_theta));
    return n;
}

Profile physical_profile(const ProblemSpec& ps, const SpectralSpace& sp, const Solution& s,
                         int points) {
    points = std::max(points, 2);
    Profile p;
    p.z.resize(points);
    for (int i = 0; i < points; ++i) p.z[i] = ps.L * i / (points - 1);
    p.u = eval_expansion(sp, s.U, p.z);
    p.v = eval_expansion(sp, s.V, p.z);
    p.theta = eval_expansion(sp, s.Theta, p.z);
    for (int i = 0; i < points; ++i) {
        PhysicalFields f = reconstruct_fields(ps, p.u[i], p.v[i], p.theta[i], p.z[i], s.t_final);
        p.u[i] = f.u;
        p.theta[i] = f.theta;
    }
    return p;
}

void write_profile_csv(std::ostream& os, const Profile& p, const std::string& provenance) {
    header(os, provenance);
    os << "z,u,v,theta\n" << std::setprecision(12);
    for (std::size_t i = 0; i < p.z.size(); ++i)
        os << p.z[i] << ',' << p.u[i] << ',' << p.v[i] << ',' << p.theta[i] << '\n';
}

double observed_order(double tau1, double e1, double tau2, double e2) {
    return std::log(e1 / e2) / std::log(tau1 / tau2);
}

Reference compute_reference(const RunSpec& rs, double tau_ref, int N_ref) {
    Reference ref;
    ref.spec = rs;
    ref.spec.mode = Mode::Fast;
    ref.spec.N = N_ref;
    ref.tau = tau_ref;
    ref.N = N_ref;
    ProblemSpec ps = make_problem(ref.spec);
    ref.spec.t_final = ps.T;
    ref.sol = run(ps, make_config(ref.spec, ps, tau_ref));
    return ref;
}

void save_reference(std::ostream& os, const Reference& ref, const std::string& provenance) {
    header(os, provenance);
    os << std::setprecision(17);
    os << "# problem=" << ref.spec.problem << '\n';
    for (const auto& [k, v] : phys_map(ref.spec)) os << "# " << k << '=' << v << '\n';
    os << "# T=" << ref.sol.t_final << '\n';
    os << "# tau=" << ref.tau << '\n';
    os << "# N=" << ref.N << '\n';
    os << "# eps=" << ref.spec.eps << '\n';
    os << "field,j,coef\n";
    auto dumpv = [&](const char* name, const Vec& v) {
        for (std::size_t j = 0; j < v.size(); ++j) os << name << ',' << j << ',' << v[j] << '\n';
    };
    dumpv("u", ref.sol.U);
    dumpv("v", ref.sol.V);
    dumpv("theta", ref.sol.Theta);
}

Reference load_reference(std::istream& is) {
    Reference ref;
    std::map<std::string, std::string> meta;
    std::string line;
    bool saw_header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto eq = line.find('=');
            if (eq != std::string::npos && line.size() > 2) {
                std::string key = line.substr(2, eq - 2);
                if (key.find(' ') == std::string::npos) meta[key] = line.substr(eq + 1);
            }
            continue;
        }
        if (!saw_header) {
            if (line != "field,j,coef") throw ArgumentError("reference file: unexpected header");
            saw_header = true;
            continue;
        }
        std::istringstream ls(line);
        std::string field, js, cs;
        std::getline(ls, field, ',');
        std::getline(ls, js, ',');
        std::getline(ls, cs, ',');
        Vec* target = field == "u" ? &ref.sol.U : field == "v" ? &ref.sol.V : field == "theta" ? &ref.sol.Theta : nullptr;
        if (!target) throw ArgumentError("reference file: unknown field '" + field + "'");
        std::size_t j = std::stoul(js);
        if (target->size() <= j) target->resize(j + 1);
        (*target)[j] = std::stod(cs);
    }
    auto need = [&](const char* k) {
        auto it = meta.find(k);
        if (it == meta.end()) throw ArgumentError(std::string("reference file: missing ") + k);
        return it->second;
    };
    ref.spec.problem = need("problem");
    ref.spec.gamma = std::stod(need("gamma"));
    ref.spec.beta = std::stod(need("beta"));
    auto& p = ref.spec.phys;
    p.alpha = std::stod(need("alpha"));
    p.lambda = std::stod(need("lambda"));
    p.M = std::stod(need("M"));
    p.m = std::stod(need("m"));
    p.K_perm = std::stod(need("K_perm"));
    p.Gr = std::stod(need("Gr"));
    p.R = std::stod(need("R"));
    p.Pr = std::stod(need("Pr"));
    p.H = std::stod(need("H"));
    p.L = std::stod(need("L"));
    ref.sol.t_final = std::stod(need("T"));
    ref.spec.t_final = ref.sol.t_final;
    ref.tau = std::stod(need("tau"));
    ref.N = std::stoi(need("N"));
    ref.spec.N = ref.N;
    ref.spec.eps = std::stod(need("eps"));
    ref.spec.mode = Mode::Fast;
    const std::size_t dim = static_cast<std::size_t>(ref.N - 1);
    if (ref.sol.U.size() != dim || ref.sol.V.size() != dim || ref.sol.Theta.size() != dim)
        throw ArgumentError("reference file: coefficient count does not match N");
    return ref;
}

void check_reference_matches(const Reference& ref, const RunSpec& rs) {
    if (ref.spec.problem != rs.problem)
        throw ArgumentError("reference is for problem " + ref.spec.problem);
    auto a = phys_map(ref.spec), b = phys_map(rs);
    for (const auto& [k, v] : a)
        if (std::fabs(v - b[k]) > 1e-12 * std::max(1.0, std::fabs(v)))
            throw ArgumentError("reference was computed with " + k + "=" + std::to_string(v));
    const double T = make_problem(rs).T;
    if (std::fabs(T - ref.sol.t_final) > 1e-12)
        throw ArgumentError("reference final time differs");
}

ConvergenceReport cmd_convergence(const RunSpec& rs, std::vector<double> taus, const Reference* ref) {
    if (taus.size() < 2) throw ArgumentError("convergence study needs at least two time steps");
    std::sort(taus.begin(), taus.end(), std::greater<>());
    ProblemSpec ps = make_problem(rs);
    std::optional<SpectralSpace> ref_sp;
    if (!ps.has_exact()) {
        if (!ref)
            throw ArgumentError("problem '" + ps.name +
                                "' has no exact solution; run `frac-mhd reference` first and pass --reference");
        check_reference_matches(*ref, rs);
        ref_sp = build_space(ref->N, ps.L);
    }
    const SpectralSpace sp = build_space(rs.N, ps.L);
    ConvergenceReport rep;
    rep.mode = rs.mode;
    for (double tau : taus) {
        Solution s = run(ps, make_config(rs, ps, tau));
        ConvergenceRow row;
        row.tau = tau;
        row.N = rs.N;
        row.err = ps.has_exact() ? errors_vs_exact(ps, sp, s) : errors_vs_reference(sp, s, *ref_sp, ref->sol);
        row.loop_seconds = s.loop_seconds;
        if (!rep.rows.empty()) {
            const auto& prev = rep.rows.back();
            row.order = observed_order(prev.tau, prev.err.sum(), tau, row.err.sum());
        }
        rep.rows.push_back(row);
    }
    return rep;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& r, const std::string& provenance) {
    header(os, provenance);
    os << "tau,N,err_u,err_v,err_theta,error,order\n";
    for (const auto& row : r.rows) {
        os << std::setprecision(10) << row.tau << ',' << row.N << ',' << std::setprecision(6)
           << std::scientific << row.err.u << ',' << row.err.v << ',' << row.err.theta << ','
           << row.err.sum() << ',' << std::defaultfloat;
        if (row.order) os << std::fixed << std::setprecision(4) << *row.order << std::defaultfloat;
        os << '\n';
    }
}

std::vector<SpatialRow> cmd_spatial(const RunSpec& rs, double tau, const std::vector<int>& Ns,
                                    FieldErrors* last) {
    ProblemSpec ps = make_problem(rs);
    if (!ps.has_exact()) throw ArgumentError("spatial study needs a problem with an exact solution");
    std::vector<SpatialRow> rows;
    for (int N : Ns) {
        RunSpec r = rs;
        r.N = N;
        Solution s = run(ps, make_config(r, ps, tau));
        SpectralSpace sp = build_space(N, ps.L);
        FieldErrors e = errors_vs_exact(ps, sp, s);
        SpatialRow row{N, e.sum(), false};
        if (!rows.empty()) row.plateau = row.error > 0.5 * rows.back().error;
        rows.push_back(row);
        if (last) *last = e;
    }
    return rows;
}

void write_spatial_csv(std::ostream& os, const std::vector<SpatialRow>& rows,
                       const std::string& provenance) {
    header(os, provenance);
    os << "N,error,plateau\n";
    for (const auto& r : rows)
        os << r.N << ',' << std::scientific << std::setprecision(6) << r.error << std::defaultfloat
           << ',' << (r.plateau ? 1 : 0) << '\n';
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return NAN;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

BenchReport cmd_bench(const RunSpec& rs, const std::vector<long>& Ks, int reps, bool run_direct,
                      bool run_fast) {
    if (Ks.empty()) throw ArgumentError("bench needs at least one K");
    ProblemSpec ps = make_problem(rs);
    BenchReport rep;
    std::vector<double> kx, tf, td;
    for (long K : Ks) {
        const double tau = ps.T / static_cast<double>(K);
        for (Mode m : {Mode::Direct, Mode::Fast}) {
            if ((m == Mode::Direct && !run_direct) || (m == Mode::Fast && !run_fast)) continue;
            RunSpec r = rs;
            r.mode = m;
            SolverConfig cfg = make_config(r, ps, tau);
            std::vector<double> loops;
            BenchRow row{K, m, 0, 0, 0, 0};
            for (int i = 0; i < std::max(1, reps); ++i) {
                Solution s = run(ps, cfg);
                loops.push_back(s.loop_seconds);
                if (i == 0) {
                    row.setup_seconds = s.setup_seconds;
                    row.peak_history_vectors = s.peak_history_vectors;
                    row.Q_total = s.Q_gamma + s.Q_one_minus_beta + s.Q_minus_beta;
                }
            }
            row.loop_seconds = median(loops);
            rep.rows.push_back(row);
            (m == Mode::Fast ? tf : td).push_back(row.loop_seconds);
        }
        kx.push_back(static_cast<double>(K));
    }
    if (run_fast) rep.slope_fast = loglog_slope(kx, tf);
    if (run_direct) rep.slope_direct = loglog_slope(kx, td);
    double tmax = 0;
    for (const auto& r : rep.rows) tmax = std::max(tmax, r.loop_seconds);
    rep.reliable = Ks.size() >= 3 && Ks.front() >= 1024 && tmax > 0.05;
    return rep;
}

void write_bench_csv(std::ostream& os, const BenchReport& r, const std::string& provenance) {
    header(os, provenance);
    os << "K,mode,setup_s,loop_s\n" << std::setprecision(6);
    for (const auto& row : r.rows)
        os << row.K << ',' << mode_name(row.mode) << ',' << row.setup_seconds << ','
           << row.loop_seconds << '\n';
}

std::vector<DiffRow> cmd_diff(const RunSpec& rs) {
    ProblemSpec ps = make_problem(rs);
    RunSpec d = rs, f = rs;
    d.mode = Mode::Direct;
    f.mode = Mode::Fast;
    Solution sd = run(ps, make_config(d, ps, rs.tau));
    Solution sf = run(ps, make_config(f, ps, rs.tau));
    SpectralSpace sp = build_space(rs.N, ps.L);
    Vec z(std::max(rs.profile_points, 2));
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = ps.L * i / (z.size() - 1);
    z.insert(z.end(), sp.rule.z.begin(), sp.rule.z.end());
    std::vector<DiffRow> rows;
    auto one = [&](const char* name, const Vec& a, const Vec& b) {
        Vec diff(a.size());
        for (std::size_t j = 0; j < a.size(); ++j) diff[j] = a[j] - b[j];
        Vec pts = eval_expansion(sp, diff, z);
        double mx = 0;
        for (double v : pts) mx = std::max(mx, std::fabs(v));
        rows.push_back({name, l2_norm(sp, diff), mx});
    };
    one("u", sd.U, sf.U);
    one("v", sd.V, sf.V);
    one("theta", sd.Theta, sf.Theta);
    return rows;
}

void write_diff_csv(std::ostream& os, const std::vector<DiffRow>& rows, const std::string& provenance) {
    header(os, provenance);
    os << "field,l2_diff,max_diff\n" << std::scientific << std::setprecision(6);
    for (const auto& r : rows) os << r.field << ',' << r.l2_diff << ',' << r.max_diff << '\n';
    os << std::defaultfloat;
}

const std::vector<std::string>& sweep_parameters() {
    static const std::vector<std::string> names = {"gamma", "beta", "alpha", "lambda", "M", "m",
                                                   "K_perm", "Gr", "R", "Pr", "H", "t"};
    return names;
}

void set_parameter(RunSpec& rs, const std::string& name, double value) {
    auto& p = rs.phys;
    if (name == "gamma") rs.gamma = value;
    else if (name == "beta") rs.beta = value;
    else if (name == "alpha") p.alpha = value;
    else if (name == "lambda") p.lambda = value;
    else if (name == "M") p.M = value;
    else if (name == "m") p.m = value;
    else if (name == "K_perm") p.K_perm = value;
    else if (name == "Gr") p.Gr = value;
    else if (name == "R") p.R = value;
    else if (name == "Pr") p.Pr = value;
    else if (name == "H") p.H = value;
    else if (name == "t") rs.t_final = value;
    else throw ArgumentError("unknown sweep parameter '" + name + "'");
}

std::string trend(const std::vector<double>& y) {
    bool inc = true, dec = true;
    for (std::size_t i = 1; i < y.size(); ++i) {
        inc = inc && y[i] > y[i - 1];
        dec = dec && y[i] < y[i - 1];
    }
    return inc ? "increasing" : dec ? "decreasing" : "mixed";
}

SweepReport cmd_sweep(const RunSpec& rs, const std::string& param, const std::vector<double>& values) {
    const auto& names = sweep_parameters();
    if (std::find(names.begin(), names.end(), param) == names.end())
        throw ArgumentError("unknown sweep parameter '" + param + "'");
    SweepReport rep;
    rep.param = param;
    std::vector<double> mu, mv, mt;
    for (double v : values) {
        RunSpec r = rs;
        set_parameter(r, param, v);
        ProblemSpec ps = make_problem(r);
        Solution s = run(ps, make_config(r, ps, r.tau));
        SpectralSpace sp = build_space(r.N, ps.L);
        SweepEntry e{v, physical_profile(ps, sp, s, r.profile_points), 0, 0, 0, 0, 0, 0};
        FieldErrors nrm = physical_norms(ps, sp, s);
        e.norm_u = nrm.u;
        e.norm_v = nrm.v;
        e.norm_theta = nrm.theta;
        for (std::size_t i = 0; i < e.profile.z.size(); ++i) {
            e.max_abs_u = std::max(e.max_abs_u, std::fabs(e.profile.u[i]));
            e.max_abs_v = std::max(e.max_abs_v, std::fabs(e.profile.v[i]));
        }
        // trapezoid mean over the uniform grid
        const auto& th = e.profile.theta;
        double acc = 0.5 * (th.front() + th.back());
        for (std::size_t i = 1; i + 1 < th.size(); ++i) acc += th[i];
        e.mean_theta = acc / static_cast<double>(th.size() - 1);
        mu.push_back(e.norm_u);
        mv.push_back(e.norm_v);
        mt.push_back(e.norm_theta);
        rep.entries.push_back(std::move(e));
    }
    rep.trend_u = trend(mu);
    rep.trend_v = trend(mv);
    rep.trend_theta = trend(mt);
    return rep;
}

void write_sweep_summary(std::ostream& os, const SweepReport& r, const std::string& provenance) {
    header(os, provenance);
    os << "# trend ||u|| in " << r.param << ": " << r.trend_u << '\n';
    os << "# trend ||v|| in " << r.param << ": " << r.trend_v << '\n';
    os << "# trend ||theta|| in " << r.param << ": " << r.trend_theta << '\n';
    os << "param,value,max_abs_u,max_abs_v,mean_theta,norm_u,norm_v,norm_theta\n"
       << std::setprecision(10);
    for (const auto& e : r.entries)
        os << r.param << ',' << e.value << ',' << e.max_abs_u << ',' << e.max_abs_v << ','
           << e.mean_theta << ',' << e.norm_u << ',' << e.norm_v << ',' << e.norm_theta << '\n';
}

}  // namespace fracmhd
