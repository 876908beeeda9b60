#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fracmhd/errors.hpp"
#include "fracmhd/experiments.hpp"

using namespace fracmhd;

namespace {

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string l;
    while (std::getline(is, l)) out.push_back(l);
    return out;
}

RunSpec small_ex2() {
    RunSpec rs;
    rs.problem = "example2";
    rs.gamma = 0.4;
    rs.beta = 0.6;
    rs.N = 24;
    rs.mode = Mode::Fast;
    rs.tau = 1.0 / 100;
    return rs;
}

}  // namespace

TEST_CASE("config: step count and problem selection") {
    CHECK(steps_for(1.0, 1.0 / 200) == 200);
    CHECK(steps_for(0.5, 1.0 / 40) == 20);
    CHECK_THROWS_AS(steps_for(1.0, 0.3), ArgumentError);
    CHECK_THROWS_AS(steps_for(1.0, 0.0), ArgumentError);
    RunSpec rs;
    rs.problem = "nope";
    CHECK_THROWS_AS(make_problem(rs), ArgumentError);
    rs.problem = "example2";
    auto ps = make_problem(rs);
    CHECK(ps.L == 4.0);
    auto cfg = make_config(rs, ps, 1.0 / 40);
    CHECK(cfg.K == 20);
    CHECK(cfg.L == 4.0);
}

TEST_CASE("convergence: example 1 orders near two and recomputable from the csv") {
    RunSpec rs;
    rs.gamma = 0.4;
    rs.beta = 0.6;
    rs.N = 24;
    auto rep = cmd_convergence(rs, {1.0 / 100, 1.0 / 50, 1.0 / 200});
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.rows[0].tau > rep.rows[1].tau);
    CHECK_FALSE(rep.rows[0].order.has_value());
    for (std::size_t i = 1; i < 3; ++i) {
        REQUIRE(rep.rows[i].order.has_value());
        CHECK(*rep.rows[i].order >= 1.9);
        CHECK(*rep.rows[i].order <= 2.1);
        CHECK(*rep.rows[i].order == doctest::Approx(observed_order(rep.rows[i - 1].tau, rep.rows[i - 1].err.sum(),
                                                                   rep.rows[i].tau, rep.rows[i].err.sum())));
    }
    std::ostringstream os;
    write_convergence_csv(os, rep, "convergence --test");
    auto ls = lines(os.str());
    REQUIRE(ls.size() == 5);
    CHECK(ls[0] == "# frac-mhd 1.0.0 convergence --test");
    CHECK(ls[1] == "tau,N,err_u,err_v,err_theta,error,order");
    // the order column follows from the two printed error columns
    auto field = [](const std::string& l, int idx) {
        std::istringstream is(l);
        std::string c;
        for (int i = 0; i <= idx; ++i) std::getline(is, c, ',');
        return c;
    };
    double e1 = std::stod(field(ls[2], 5)), e2 = std::stod(field(ls[3], 5));
    double t1 = std::stod(field(ls[2], 0)), t2 = std::stod(field(ls[3], 0));
    CHECK(std::stod(field(ls[3], 6)) == doctest::Approx(observed_order(t1, e1, t2, e2)).epsilon(1e-3));
    CHECK_THROWS_AS(cmd_convergence(rs, {0.01}), ArgumentError);
}

TEST_CASE("convergence: example 2 needs a matching reference") {
    RunSpec rs = small_ex2();
    CHECK_THROWS_AS(cmd_convergence(rs, {0.05, 0.025}), ArgumentError);

    Reference ref = compute_reference(rs, 1.0 / 400, 32);
    std::ostringstream os;
    save_reference(os, ref, "reference --test");
    std::istringstream is(os.str());
    Reference back = load_reference(is);
    CHECK(back.tau == doctest::Approx(ref.tau));
    CHECK(back.N == 32);
    REQUIRE(back.sol.U.size() == ref.sol.U.size());
    for (std::size_t j = 0; j < ref.sol.U.size(); ++j) {
        CHECK(back.sol.U[j] == ref.sol.U[j]);
        CHECK(back.sol.Theta[j] == ref.sol.Theta[j]);
    }

    auto rep = cmd_convergence(rs, {0.05, 0.025, 0.0125}, &back);
    CHECK(*rep.rows[2].order > 1.8);

    RunSpec other = rs;
    other.phys.M = 3.0;
    CHECK_THROWS_AS(check_reference_matches(back, other), ArgumentError);
    CHECK_THROWS_AS(cmd_convergence(other, {0.05, 0.025}, &back), ArgumentError);

    std::istringstream junk("# tau=0.1\nnot,a,header\n");
    CHECK_THROWS_AS(load_reference(junk), ArgumentError);
}

TEST_CASE("spatial: decreasing then flat, and deterministic") {
    RunSpec rs;
    auto rows = cmd_spatial(rs, 1.0 / 200, {4, 8, 12, 16, 24, 24});
    REQUIRE(rows.size() == 6);
    CHECK(rows[1].error < rows[0].error);
    CHECK(rows[2].error < rows[1].error);
    CHECK(rows[5].plateau);
    CHECK(rows[5].error == rows[4].error);

    FieldErrors last;
    cmd_spatial(rs, 1.0 / 200, {4}, &last);
    // v = t^2 (z^2 - z) lies in the space at N = 4; what remains is u's
    // spatial error leaking in through the Hall coupling
    CHECK(last.v < 1e-2 * last.u);

    rs.problem = "example2";
    CHECK_THROWS_AS(cmd_spatial(rs, 0.05, {8}), ArgumentError);
}

TEST_CASE("diff: small at tight eps, larger at loose eps, zero when k0 covers everything") {
    RunSpec rs;
    rs.N = 16;
    rs.tau = 1.0 / 400;
    rs.eps = 1e-12;
    auto tight = cmd_diff(rs);
    REQUIRE(tight.size() == 3);
    double tmax = 0;
    for (const auto& r : tight) tmax = std::max(tmax, r.l2_diff);
    CHECK(tmax <= 1e-8);

    rs.eps = 1e-6;
    double lmax = 0;
    for (const auto& r : cmd_diff(rs)) lmax = std::max(lmax, r.l2_diff);
    CHECK(lmax > tmax);

    rs.tau = 1.0 / 20;
    rs.k0 = 40;
    for (const auto& r : cmd_diff(rs)) {
        CHECK(r.l2_diff == 0.0);
        CHECK(r.max_diff == 0.0);
    }
    std::ostringstream os;
    write_diff_csv(os, tight, "diff");
    CHECK(lines(os.str())[1] == "field,l2_diff,max_diff");
}

TEST_CASE("bench: tiny grid is flagged unreliable") {
    RunSpec rs;
    rs.N = 6;
    auto rep = cmd_bench(rs, {8, 16}, 1);
    CHECK_FALSE(rep.reliable);
    CHECK(rep.rows.size() == 4);
    std::ostringstream os;
    write_bench_csv(os, rep, "bench");
    auto ls = lines(os.str());
    CHECK(ls[1] == "K,mode,setup_s,loop_s");
    CHECK(ls.size() == 6);
    CHECK(loglog_slope({1, 2, 4}, {3, 12, 48}) == doctest::Approx(2.0));
}

TEST_CASE("sweep: parameters, trends, summary") {
    CHECK(trend({1, 2, 3}) == "increasing");
    CHECK(trend({3, 2, 1}) == "decreasing");
    CHECK(trend({1, 3, 2}) == "mixed");

    RunSpec rs = small_ex2();
    rs.tau = 1.0 / 50;
    CHECK_THROWS_AS(cmd_sweep(rs, "viscosity", {1.0}), ArgumentError);
    RunSpec probe = rs;
    set_parameter(probe, "K_perm", 3.0);
    CHECK(probe.phys.K_perm == 3.0);
    set_parameter(probe, "t", 0.25);
    CHECK(*probe.t_final == 0.25);

    auto rep = cmd_sweep(rs, "Gr", {5, 10, 15});
    REQUIRE(rep.entries.size() == 3);
    CHECK(rep.trend_u == "increasing");
    for (const auto& e : rep.entries) {
        CHECK(e.profile.u.front() == doctest::Approx(0.125));
        CHECK(e.profile.theta.front() == doctest::Approx(0.25));
        CHECK(std::fabs(e.profile.u.back()) < 1e-12);
    }
    std::ostringstream os;
    write_sweep_summary(os, rep, "sweep");
    auto ls = lines(os.str());
    CHECK(ls[0].rfind("# frac-mhd 1.0.0", 0) == 0);
    CHECK(ls[1] == "# trend ||u|| in Gr: increasing");
}

TEST_CASE("profile: zero problem gives zeros, output is deterministic") {
    RunSpec rs;
    rs.problem = "zero";
    rs.N = 8;
    rs.tau = 0.05;
    auto ps = make_problem(rs);
    auto sp = build_space(rs.N, ps.L);
    auto s = run(ps, make_config(rs, ps, rs.tau));
    auto p = physical_profile(ps, sp, s, 11);
    for (double v : p.u) CHECK(v == 0.0);
    for (double v : p.theta) CHECK(v == 0.0);

    RunSpec e2 = small_ex2();
    auto render = [&]() {
        auto ps2 = make_problem(e2);
        auto sp2 = build_space(e2.N, ps2.L);
        auto s2 = run(ps2, make_config(e2, ps2, e2.tau));
        std::ostringstream os;
        write_profile_csv(os, physical_profile(ps2, sp2, s2, 21), "run");
        return os.str();
    };
    std::string a = render(), b = render();
    CHECK(a == b);
    CHECK(lines(a)[1] == "z,u,v,theta");
}
