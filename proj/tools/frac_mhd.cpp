// frac-mhd: command-line front end for the coupled fractional flow/heat solver.
//
// Exit codes: 0 ok, 2 usage, 3 numerical failure, 4 I/O.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fracmhd/errors.hpp"
#include "fracmhd/experiments.hpp"

using namespace fracmhd;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "0.005" or "1/200"
double parse_real(const std::string& s) {
    auto slash = s.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        }
        double a = std::stod(s.substr(0, slash));
        double b = std::stod(s.substr(slash + 1));
        return a / b;
    } catch (const std::exception&) {
        throw ArgumentError("cannot parse number '" + s + "'");
    }
}

std::vector<double> parse_list(const std::vector<std::string>& items) {
    std::vector<double> out;
    for (const auto& it : items) {
        std::stringstream ss(it);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) out.push_back(parse_real(tok));
    }
    return out;
}

struct Options {
    std::string problem = "example1";
    double gamma = 0.4, beta = 0.6;
    std::string tau = "1/200";
    int n = 32;
    std::string mode = "direct";
    double eps = 1e-12;
    int k0 = 10;
    std::string out;
    std::string t_final;
    std::string g_variant = "consistent";
    std::string f_variant = "derived";
    PhysicalParams phys;
    int points = 101;

    // subcommand specifics
    std::vector<std::string> taus;
    std::string reference;
    std::vector<std::string> ns;
    std::vector<std::string> ks;
    int reps = 3;
    std::string param;
    std::vector<std::string> values;
    std::string ref_tau = "1/5120";
    int ref_n = 80;
    bool fine_reference = false;
};

void add_common(CLI::App* app, Options& o) {
    app->add_option("--problem", o.problem, "example1 | example2 | zero")->capture_default_str();
    app->add_option("--gamma", o.gamma, "order of the momentum operators")->capture_default_str();
    app->add_option("--beta", o.beta, "order of the heat operators")->capture_default_str();
    app->add_option("--tau", o.tau, "time step, decimal or 1/K")->capture_default_str();
    app->add_option("--n", o.n, "Legendre degree N")->capture_default_str();
    app->add_option("--mode", o.mode, "direct | fast")->capture_default_str();
    app->add_option("--eps", o.eps, "fast-history tolerance")->capture_default_str();
    app->add_option("--k0", o.k0, "exact-weight window of the fast method")->capture_default_str();
    app->add_option("--out", o.out, "output path (stdout when omitted)");
    app->add_option("--T", o.t_final, "final time (default: problem's own)");
    app->add_option("--g-variant", o.g_variant, "example1 g: consistent | printed")->capture_default_str();
    app->add_option("--f-variant", o.f_variant, "example2 f: derived | printed")->capture_default_str();
    app->add_option("--points", o.points, "profile grid size")->capture_default_str();
    auto& p = o.phys;
    app->add_option("--alpha", p.alpha)->capture_default_str();
    app->add_option("--lambda", p.lambda)->capture_default_str();
    app->add_option("--M", p.M, "Hartmann number")->capture_default_str();
    app->add_option("--m", p.m, "Hall parameter")->capture_default_str();
    app->add_option("--K_perm", p.K_perm, "permeability")->capture_default_str();
    app->add_option("--Gr", p.Gr)->capture_default_str();
    app->add_option("--R", p.R)->capture_default_str();
    app->add_option("--Pr", p.Pr)->capture_default_str();
    app->add_option("--H", p.H)->capture_default_str();
    app->add_option("--L", p.L, "truncated domain length (example2)")->capture_default_str();
}

RunSpec to_spec(const Options& o) {
    RunSpec rs;
    rs.problem = o.problem;
    rs.gamma = o.gamma;
    rs.beta = o.beta;
    rs.tau = parse_real(o.tau);
    rs.N = o.n;
    rs.mode = parse_mode(o.mode);
    rs.eps = o.eps;
    rs.k0 = o.k0;
    rs.phys = o.phys;
    rs.profile_points = o.points;
    if (!o.t_final.empty()) rs.t_final = parse_real(o.t_final);
    if (o.g_variant == "consistent") rs.g_variant = GVariant::Consistent;
    else if (o.g_variant == "printed") rs.g_variant = GVariant::Printed;
    else throw ArgumentError("g-variant must be consistent or printed");
    if (o.f_variant == "derived") rs.f_variant = FVariant::Derived;
    else if (o.f_variant == "printed") rs.f_variant = FVariant::Printed;
    else throw ArgumentError("f-variant must be derived or printed");
    return rs;
}

class Sink {
public:
    explicit Sink(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw IoError("cannot open '" + path + "' for writing");
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }
    bool is_stdout() const { return !file_; }
    void close(const std::string& path) {
        if (file_) {
            file_->close();
            if (!*file_) throw IoError("failed writing '" + path + "'");
        }
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::string sci(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4e", v);
    return b;
}

int do_run(const Options& o, const std::string& prov) {
    RunSpec rs = to_spec(o);
    ProblemSpec ps = make_problem(rs);
    SolverConfig cfg = make_config(rs, ps, rs.tau);
    Solution s = run(ps, cfg);
    SpectralSpace sp = build_space(rs.N, ps.L);
    Sink sink(o.out);
    write_profile_csv(sink.os(), physical_profile(ps, sp, s, rs.profile_points), prov);
    sink.close(o.out);
    std::ostream& msg = sink.is_stdout() ? std::cerr : std::cout;
    msg << "problem=" << ps.name << " mode=" << mode_name(rs.mode) << " tau=" << rs.tau
        << " N=" << rs.N << " K=" << cfg.K << " t=" << s.t_final
        << " loop_s=" << s.loop_seconds;
    if (ps.has_exact()) {
        FieldErrors e = errors_vs_exact(ps, sp, s);
        msg << " err_u=" << sci(e.u) << " err_v=" << sci(e.v) << " err_theta=" << sci(e.theta)
            << " Error=" << sci(e.sum());
    }
    if (rs.mode == Mode::Fast)
        msg << " Q=" << s.Q_gamma << '/' << s.Q_one_minus_beta << '/' << s.Q_minus_beta
            << " achieved_eps=" << sci(s.achieved_eps);
    msg << '\n';
    for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
    return 0;
}

Reference read_reference(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read reference '" + path + "'; run `frac-mhd reference` first");
    return load_reference(in);
}

int do_convergence(const Options& o, const std::string& prov) {
    RunSpec rs = to_spec(o);
    std::vector<double> taus = parse_list(o.taus);
    std::unique_ptr<Reference> ref;
    if (!o.reference.empty()) ref = std::make_unique<Reference>(read_reference(o.reference));
    ConvergenceReport r = cmd_convergence(rs, taus, ref.get());
    Sink sink(o.out);
    write_convergence_csv(sink.os(), r, prov);
    sink.close(o.out);
    return 0;
}

int do_reference(const Options& o, const std::string& prov) {
    RunSpec rs = to_spec(o);
    double tau = o.fine_reference ? 1.0 / 40000.0 : parse_real(o.ref_tau);
    Reference ref = compute_reference(rs, tau, o.ref_n);
    Sink sink(o.out);
    save_reference(sink.os(), ref, prov);
    sink.close(o.out);
    std::cerr << "reference: tau=" << tau << " N=" << o.ref_n << " loop_s=" << ref.sol.loop_seconds << '\n';
    return 0;
}

int do_spatial(const Options& o, const std::string& prov) {
    RunSpec rs = to_spec(o);
    std::vector<int> Ns;
    for (double v : parse_list(o.ns)) Ns.push_back(static_cast<int>(v));
    if (Ns.empty()) Ns = {4, 8, 12, 16, 20, 24, 28, 32};
    auto rows = cmd_spatial(rs, rs.tau, Ns);
    Sink sink(o.out);
    write_spatial_csv(sink.os(), rows, prov);
    sink.close(o.out);
    return 0;
}

int do_bench(const Options& o, const std::string& prov) {
    RunSpec rs = to_spec(o);
    std::vector<long> Ks;
    for (double v : parse_list(o.ks)) Ks.push_back(static_cast<long>(v));
    if (Ks.empty()) Ks = {4096, 8192, 16384};
    BenchReport r = cmd_bench(rs, Ks, o.reps);
    Sink sink(o.out);
    write_bench_csv(sink.os(), r, prov);
    sink.close(o.out);
    std::ostream& msg = sink.is_stdout() ? std::cerr : std::cout;
    msg << "slope_fast=" << r.slope_fast << " slope_direct=" << r.slope_direct
        << (r.reliable ? "" : " (unreliable: grid too small or times too short)") << '\n';
    for (const auto& row : r.rows)
        msg << "K=" << row.K << ' ' << mode_name(row.mode) << " peak_history_vectors="
            << row.peak_history_vectors << " Q=" << row.Q_total << '\n';
    return 0;
}

int do_diff(const Options& o, const std::string& prov) {
    RunSpec rs = to_spec(o);
    auto rows = cmd_diff(rs);
    Sink sink(o.out);
    write_diff_csv(sink.os(), rows, prov);
    sink.close(o.out);
    return 0;
}

int do_sweep(const Options& o, const std::string& prov) {
    RunSpec rs = to_spec(o);
    std::vector<double> values = parse_list(o.values);
    if (values.empty()) throw ArgumentError("sweep needs --values");
    SweepReport r = cmd_sweep(rs, o.param, values);
    if (!o.out.empty()) {
        for (const auto& e : r.entries) {
            std::ostringstream name;
            name << o.out << '_' << o.param << '_' << e.value << ".csv";
            Sink s(name.str());
            write_profile_csv(s.os(), e.profile, prov);
            s.close(name.str());
        }
        std::string sum = o.out + "_" + o.param + "_summary.csv";
        Sink s(sum);
        write_sweep_summary(s.os(), r, prov);
        s.close(sum);
    } else {
        write_sweep_summary(std::cout, r, prov);
    }
    return 0;
}

int do_weights(const Options& o, const std::string& prov) {
    RunSpec rs = to_spec(o);
    long K = steps_for(rs.t_final.value_or(1.0), rs.tau);
    WeightTable t = fbdf_weights(rs.gamma, K);
    ContourNodes n = contour_nodes(rs.gamma, rs.tau, K, rs.k0, rs.eps);
    Sink sink(o.out);
    sink.os() << "# frac-mhd " << kVersion << ' ' << prov << '\n';
    write_weight_csv(sink.os(), n, t);
    sink.close(o.out);
    std::cerr << "Q=" << n.Q() << " achieved_eps=" << sci(n.achieved_eps) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::string prov;
    for (int i = 0; i < argc; ++i) prov += (i ? " " : "") + std::string(argv[i]);

    CLI::App app{"Fractional MHD flow and heat transfer solver"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "key=value file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();  // inherited by the subcommands below
    Options o;

    auto* run_cmd = app.add_subcommand("run", "single run, writes the final profile z,u,v,theta");
    auto* conv = app.add_subcommand("convergence", "temporal convergence table");
    auto* spat = app.add_subcommand("spatial", "error against N at fixed tau");
    auto* bench = app.add_subcommand("bench", "loop time against K for both modes");
    auto* diff = app.add_subcommand("diff", "fast against direct at the final time");
    auto* sweep = app.add_subcommand("sweep", "profiles for a family of parameter values");
    auto* ref = app.add_subcommand("reference", "compute and store a fine reference run");
    auto* wts = app.add_subcommand("weights", "dump exact and contour weights");
    // Shared flags live on the top-level app so a flat config file can set them;
    // fallthrough lets them appear after the subcommand name too.
    add_common(&app, o);

    conv->add_option("--taus", o.taus, "time steps, e.g. 1/200,1/400")->required();
    conv->add_option("--reference", o.reference, "reference file for problems without exact solution");
    spat->add_option("--ns", o.ns, "degrees, e.g. 4,8,12");
    bench->add_option("--ks", o.ks, "step counts, e.g. 4096,8192,16384");
    bench->add_option("--reps", o.reps, "repetitions per point (median is kept)")->capture_default_str();
    sweep->add_option("--param", o.param, "gamma beta alpha lambda M m K_perm Gr R Pr H t")->required();
    sweep->add_option("--values", o.values, "values, e.g. 1,2,3")->required();
    ref->add_option("--ref-tau", o.ref_tau, "reference time step")->capture_default_str();
    ref->add_option("--ref-n", o.ref_n, "reference degree")->capture_default_str();
    ref->add_flag("--fine-reference", o.fine_reference, "use tau=1/40000");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*run_cmd) return do_run(o, prov);
        if (*conv) return do_convergence(o, prov);
        if (*spat) return do_spatial(o, prov);
        if (*bench) return do_bench(o, prov);
        if (*diff) return do_diff(o, prov);
        if (*sweep) return do_sweep(o, prov);
        if (*ref) return do_reference(o, prov);
        if (*wts) return do_weights(o, prov);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const ArgumentError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const CalibrationError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
