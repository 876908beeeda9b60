#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "fracmhd/banded.hpp"
#include "fracmhd/errors.hpp"
#include "fracmhd/models.hpp"
#include "fracmhd/solver.hpp"
#include "oracles.hpp"

using namespace fracmhd;

namespace {

SolverConfig config(double tau, long K, int N, Mode mode = Mode::Direct) {
    SolverConfig c;
    c.tau = tau;
    c.K = K;
    c.N = N;
    c.L = 1.0;
    c.mode = mode;
    return c;
}

oracle::Dense dense(const EvenPenta& S, const Vec& D, double a, double b) {
    const int n = S.size();
    oracle::Dense A(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        A[i][i] = a * S.diag[i] + b * D[i];
        if (i + 2 < n) A[i][i + 2] = A[i + 2][i] = a * S.off2[i];
    }
    return A;
}

double rel_diff(const Vec& a, const Vec& b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return den == 0 ? std::sqrt(num) : std::sqrt(num / den);
}

double max_abs(const Vec& a) {
    double m = 0;
    for (double x : a) m = std::max(m, std::fabs(x));
    return m;
}

}  // namespace

TEST_CASE("banded: real and complex LDL against dense elimination") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int n : {1, 2, 3, 7, 20}) {
        std::vector<double> d(n), o(std::max(0, n - 2));
        for (double& x : o) x = u(rng);
        for (int i = 0; i < n; ++i) d[i] = 4.0 + u(rng);
        std::vector<double> b(n);
        for (double& x : b) x = u(rng);
        oracle::Dense A(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i) {
            A[i][i] = d[i];
            if (i + 2 < n) A[i][i + 2] = A[i + 2][i] = o[i];
        }
        auto ref = oracle::lu_solve(A, b);
        auto x = RealLDL(d, o).solve(b);
        CHECK(rel_diff(x, ref) < 1e-13);

        // (A + i B) with B = I: compare against the real 2n block system
        std::vector<std::complex<double>> cd(n), co(o.size());
        for (int i = 0; i < n; ++i) cd[i] = {d[i], 1.0};
        for (std::size_t i = 0; i < o.size(); ++i) co[i] = o[i];
        std::vector<std::complex<double>> cb(n);
        std::vector<double> bb(2 * n);
        for (int i = 0; i < n; ++i) {
            cb[i] = {b[i], -b[i]};
            bb[i] = b[i];
            bb[n + i] = -b[i];
        }
        oracle::Dense B(2 * n, std::vector<double>(2 * n, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) B[i][j] = B[n + i][n + j] = A[i][j];
        for (int i = 0; i < n; ++i) {
            B[i][n + i] = -1.0;
            B[n + i][i] = 1.0;
        }
        auto rb = oracle::lu_solve(B, bb);
        auto cx = ComplexLDL(cd, co).solve(cb);
        for (int i = 0; i < n; ++i) {
            CHECK(std::fabs(cx[i].real() - rb[i]) < 1e-13);
            CHECK(std::fabs(cx[i].imag() - rb[n + i]) < 1e-13);
        }
    }
}

TEST_CASE("banded: indefinite real matrix is refused") {
    CHECK_THROWS_AS(RealLDL({1.0, -1.0, 1.0}, {0.0}), NumericalError);
    CHECK_THROWS_AS(RealLDL({1.0, 1.0, 1.0}, {}), ArgumentError);
    CHECK_THROWS_AS(RealLDL({1.0, 1.0}, {}).solve({1.0}), ArgumentError);
}

TEST_CASE("step matrices: coefficient values") {
    auto p = example1_problem(0.4, 0.6);
    auto cfg = config(1.0 / 200, 200, 16);
    auto sp = build_space(cfg.N, 1.0);
    auto wg = fbdf_weights(0.4, 10), w1 = fbdf_weights(0.4, 10), wm = fbdf_weights(-0.6, 10);
    auto m = make_step_matrices(sp, p.coeffs, cfg, wg, w1, wm);
    const double expect = 300.0 + std::pow(1.5, 0.4) * std::pow(200.0, 0.4) + 1.0;
    CHECK(m.varpik == doctest::Approx(expect).epsilon(1e-14));
    CHECK(m.varpik - m.varpi1 == doctest::Approx(100.0));
    CHECK(m.rhok - m.rho1 == doctest::Approx(100.0));
    const double tb = std::pow(1.0 / 200, 0.6);
    CHECK(m.th_stiff == doctest::Approx(tb * std::pow(1.5, -0.6)));
    CHECK(m.rho1 == doctest::Approx(200.0 + std::pow(1.5, 0.4) * std::pow(200.0, 0.4) -
                                    tb * std::pow(1.5, -0.6) - 1.0));

    ProblemCoefficients c;
    c.a1 = c.a2 = c.a3 = 0;
    auto m0 = make_step_matrices(sp, c, cfg, wg, w1, wm);
    CHECK(m0.varpik == doctest::Approx(300.0));
    CHECK(m0.uv_stiff == doctest::Approx(1.0));
}

TEST_CASE("step matrices: indefinite temperature operator names the coefficients") {
    ProblemCoefficients c;
    c.b4 = 1e6;
    auto cfg = config(0.01, 10, 8);
    auto sp = build_space(8, 1.0);
    auto w = fbdf_weights(0.5, 4);
    try {
        make_step_matrices(sp, c, cfg, w, w, fbdf_weights(-0.5, 4));
        FAIL("expected a numerical error");
    } catch (const NumericalError& e) {
        std::string msg = e.what();
        CHECK(msg.find("b4=") != std::string::npos);
        CHECK(msg.find("b3=") != std::string::npos);
    }
}

TEST_CASE("rhs: first step carries only the forcing") {
    auto p = example1_problem(0.4, 0.6);
    CoupledSolver s(p, config(1.0 / 50, 50, 12));
    auto r = s.assemble_rhs_direct(1);
    auto f = project_forcing(s.space(), [&](double z, double t) { return p.f(z, t); }, 1.0 / 50);
    auto g = project_forcing(s.space(), [&](double z, double t) { return p.g(z, t); }, 1.0 / 50);
    auto q = project_forcing(s.space(), [&](double z, double t) { return p.p(z, t); }, 1.0 / 50);
    CHECK(rel_diff(r.F, f) < 1e-13);
    CHECK(rel_diff(r.G, g) < 1e-13);
    CHECK(rel_diff(r.P, q) < 1e-13);
    CHECK_THROWS_AS(s.assemble_rhs_direct(2), StateError);
}

TEST_CASE("rhs: direct assembly equals the explicit sums at k=3") {
    auto p = example1_problem(0.6, 0.3);
    const double tau = 0.05;
    CoupledSolver s(p, config(tau, 20, 4));
    s.step();
    s.step();
    auto r = s.assemble_rhs_direct(3);
    const auto& sp = s.space();
    const int n = sp.dim;
    const double g = 0.6, b = 0.3;
    auto wg = oracle::power_series(g, 3), w1 = oracle::power_series(1 - b, 3),
         wm = oracle::power_series(-b, 3);
    auto S = dense(sp.mass, sp.stiff, 1.0, 0.0);
    auto D = dense(sp.mass, sp.stiff, 0.0, 1.0);
    auto mul = [&](const oracle::Dense& A, const Vec& x) {
        Vec y(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) y[i] += A[i][j] * x[j];
        return y;
    };
    const double t = 3 * tau;
    auto forcing = [&](const Forcing& f) {
        Vec v(n, 0.0);
        for (std::size_t q = 0; q < sp.rule.z.size(); ++q)
            for (int l = 0; l < n; ++l)
                v[l] += sp.rule.w[q] * f(sp.rule.z[q], t) * oracle::psi(l, sp.rule.z[q], 1.0);
        return v;
    };
    auto momentum = [&](auto hist, const Forcing& f) {
        Vec out(n, 0.0), bdf(n), H(n, 0.0);
        for (int i = 0; i < n; ++i) bdf[i] = (2.0 * hist(2)[i] - 0.5 * hist(1)[i]) / tau;
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < n; ++i) H[i] += static_cast<double>(wg[3 - j]) * hist(j)[i];
        auto SB = mul(S, bdf), SH = mul(S, H), DH = mul(D, H);
        auto pf = forcing(f);
        const double tg = std::pow(tau, g);
        for (int i = 0; i < n; ++i) out[i] = SB[i] - SH[i] / tg - DH[i] / tg + pf[i];
        return out;
    };
    auto F = momentum([&](int j) { return s.U(j); }, p.f);
    auto G = momentum([&](int j) { return s.V(j); }, p.g);

    Vec bdf(n), H1(n, 0.0), H2(n, 0.0);
    for (int i = 0; i < n; ++i) bdf[i] = (2.0 * s.Theta(2)[i] - 0.5 * s.Theta(1)[i]) / tau;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < n; ++i) {
            H1[i] += static_cast<double>(w1[3 - j]) * s.Theta(j)[i];
            H2[i] += static_cast<double>(wm[3 - j]) * s.Theta(j)[i];
        }
    const double t1 = std::pow(tau, 1 - b), tb = std::pow(tau, b);
    Vec m(n);
    for (int i = 0; i < n; ++i) m[i] = bdf[i] - H1[i] / t1 + tb * H2[i];
    auto SM = mul(S, m), DH2 = mul(D, H2), pp = forcing(p.p);
    Vec P(n);
    for (int i = 0; i < n; ++i) P[i] = SM[i] - tb * DH2[i] + pp[i];

    CHECK(rel_diff(r.F, F) < 1e-12);
    CHECK(rel_diff(r.G, G) < 1e-12);
    CHECK(rel_diff(r.P, P) < 1e-12);
}

TEST_CASE("step: one step matches a dense real block solve") {
    auto p = example1_problem(0.4, 0.6);
    CoupledSolver s(p, config(1.0 / 200, 200, 32));
    auto r = s.assemble_rhs_direct(1);
    s.step();
    const auto& sp = s.space();
    const auto& m = s.matrices();
    const int n = sp.dim;
    auto th = oracle::lu_solve(dense(sp.mass, sp.stiff, m.rho1, m.th_stiff), r.P);
    auto A = dense(sp.mass, sp.stiff, m.varpi1, m.uv_stiff);
    auto S = dense(sp.mass, sp.stiff, 1.0, 0.0);
    oracle::Dense B(2 * n, std::vector<double>(2 * n, 0.0));
    std::vector<double> rhs(2 * n);
    const auto& c = p.coeffs;
    for (int i = 0; i < n; ++i) {
        double sth = 0;
        for (int j = 0; j < n; ++j) {
            B[i][j] = B[n + i][n + j] = A[i][j];
            B[i][n + j] = -c.a4 * S[i][j];
            B[n + i][j] = c.a4 * S[i][j];
            sth += S[i][j] * th[j];
        }
        rhs[i] = r.F[i] + c.a5 * sth;
        rhs[n + i] = r.G[i];
    }
    auto x = oracle::lu_solve(B, rhs);
    Vec u(x.begin(), x.begin() + n), v(x.begin() + n, x.end());
    CHECK(rel_diff(s.Theta(1), th) <= 1e-12);
    CHECK(rel_diff(s.U(1), u) <= 1e-12);
    CHECK(rel_diff(s.V(1), v) <= 1e-12);
}

TEST_CASE("step: without Hall coupling u and v solve the same system") {
    ProblemSpec p;
    p.coeffs.a4 = 0.0;
    p.coeffs.a5 = 0.0;
    p.coeffs.gamma = 0.7;
    p.coeffs.beta = 0.2;
    auto prof = [](double z) { return std::sin(3.0 * z) * z; };
    p.f.add(1.0, 0.5, prof).add(2.0, 2.0, [](double z) { return z * z; });
    p.g = p.f;
    CoupledSolver s(p, config(0.02, 30, 12));
    for (int k = 0; k < 30; ++k) s.step();
    for (long k = 1; k <= 30; ++k) CHECK(rel_diff(s.U(k), s.V(k)) <= 1e-13);

    // and each equals a plain real solve at k=1
    CoupledSolver s1(p, config(0.02, 30, 12));
    auto r = s1.assemble_rhs_direct(1);
    s1.step();
    std::vector<double> d, o;
    combine<double>(s1.space().mass, s1.space().stiff, s1.matrices().varpi1, s1.matrices().uv_stiff, d, o);
    auto u = RealLDL(d, o).solve(r.F);
    CHECK(rel_diff(s1.U(1), u) <= 1e-13);
}

TEST_CASE("step: zero data stays zero in both modes") {
    auto p = zero_problem(0.5, 0.5, 1.0);
    for (Mode mode : {Mode::Direct, Mode::Fast}) {
        auto cfg = config(0.01, 60, 10, mode);
        CoupledSolver s(p, cfg);
        for (int k = 0; k < 60; ++k) {
            if (k + 1 > cfg.k0 && s.fast_active()) {
                auto r = s.assemble_rhs_fast(k + 1);
                CHECK(max_abs(r.F) == 0.0);
            }
            s.step();
            CHECK(max_abs(s.U(k + 1)) <= 1e-14);
            CHECK(max_abs(s.V(k + 1)) <= 1e-14);
            CHECK(max_abs(s.Theta(k + 1)) <= 1e-14);
        }
    }
}

TEST_CASE("accumulators: closed-form sum and first update") {
    ContourNodes nd;
    nd.order = 0.3;
    nd.tau = 0.1;
    nd.poles = {0.5, 3.0, 40.0};
    nd.weights_h = {1.0, -0.5, 2.0};
    nd.k0 = 2;
    AccumulatorBank b;
    b.init(nd, 3);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Vec> c(5, Vec(3));
    for (auto& x : c)
        for (double& y : x) y = u(rng);

    b.push(c[0], nd.tau);
    for (std::size_t i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(b.q[i][j] == doctest::Approx(nd.tau * c[0][j] / (1 + nd.poles[i] * nd.tau)));
    for (int m = 1; m < 5; ++m) b.push(c[m], nd.tau);
    for (std::size_t i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int m = 0; m < 5; ++m) s += std::pow(1 + nd.poles[i] * nd.tau, -(5 - m)) * c[m][j];
            CHECK(b.q[i][j] == doctest::Approx(nd.tau * s).epsilon(1e-14));
        }
    }

    AccumulatorBank z;
    z.init(nd, 3);
    for (int m = 0; m < 7; ++m) z.push(Vec(3, 0.0), nd.tau);
    for (double v : z.tail(nd.tau)) CHECK(v == 0.0);
}

TEST_CASE("accumulators: single pole with constant history") {
    ContourNodes nd;
    nd.order = -0.4;
    nd.tau = 0.05;
    nd.poles = {2.0};
    nd.weights_h = {0.7};
    nd.k0 = 4;
    AccumulatorBank b;
    b.init(nd, 1);
    const int n = 9;
    for (int m = 0; m < n; ++m) b.push({1.0}, nd.tau);
    const double r = 1.0 / (1.0 + 2.0 * 0.05);
    const double geo = r * (1 - std::pow(r, n)) / (1 - r);
    const double expect = std::pow(0.05, -0.4) * 0.7 * std::pow(r, nd.k0 + 1) * 0.05 * geo;
    CHECK(b.tail(nd.tau)[0] == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("fast: right-hand side matches direct at eps = 1e-14") {
    auto p = example1_problem(0.4, 0.6);
    auto cfg = config(1.0 / 200, 200, 8, Mode::Fast);
    cfg.eps = 1e-14;
    cfg.keep_full_history = true;
    CoupledSolver s(p, cfg);
    REQUIRE(s.fast_active());
    double worst = 0;
    for (long k = 1; k <= cfg.k0 + 20; ++k) {
        if (k > cfg.k0) {
            auto a = s.assemble_rhs_fast(k);
            auto d = s.assemble_rhs_direct(k);
            worst = std::max({worst, rel_diff(a.F, d.F), rel_diff(a.G, d.G), rel_diff(a.P, d.P)});
        }
        s.step();
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("fast: contract and ordering errors") {
    auto p = example1_problem(0.4, 0.6);
    CoupledSolver s(p, config(0.01, 40, 6, Mode::Fast));
    CHECK_THROWS_AS(s.assemble_rhs_fast(5), ContractViolation);
    CHECK_THROWS_AS(s.update_accumulators(0), StateError);
    CHECK_THROWS_AS(s.update_accumulators(3), StateError);

    CoupledSolver d(p, config(0.01, 40, 6, Mode::Direct));
    CHECK_THROWS_AS(d.assemble_rhs_fast(20), ContractViolation);

    auto cfg = config(0.1, 8, 6, Mode::Fast);
    CoupledSolver tiny(p, cfg);
    CHECK_FALSE(tiny.fast_active());
}

TEST_CASE("fast: history memory stays bounded") {
    auto p = example1_problem(0.4, 0.6);
    auto cfg = config(1.0 / 400, 400, 8, Mode::Fast);
    CoupledSolver s(p, cfg);
    for (int k = 0; k < 400; ++k) s.step();
    const long Q = static_cast<long>(s.nodes_gamma()->Q() * 2 + s.nodes_one_minus_beta()->Q() +
                                     s.nodes_minus_beta()->Q());
    CHECK(s.peak_history_vectors() == 3 * (cfg.k0 + 2) + Q);
    CHECK_THROWS_AS(s.U(0), StateError);
    CHECK_NOTHROW(s.U(400));
}

TEST_CASE("run: fast and direct agree at tau = 1/800") {
    auto p = example1_problem(0.4, 0.6);
    auto d = run(p, config(1.0 / 800, 800, 32, Mode::Direct));
    auto f = run(p, config(1.0 / 800, 800, 32, Mode::Fast));
    auto sp = build_space(32, 1.0);
    auto diff = [&](const Vec& a, const Vec& b) {
        Vec e(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) e[i] = a[i] - b[i];
        return l2_norm(sp, e);
    };
    CHECK(diff(d.U, f.U) <= 1e-8);
    CHECK(diff(d.V, f.V) <= 1e-8);
    CHECK(diff(d.Theta, f.Theta) <= 1e-8);
    CHECK(f.achieved_eps <= 1e-12);
    CHECK(f.Q_gamma > 0);
    CHECK(d.Q_gamma == 0);
}

TEST_CASE("run: final norms stay bounded under refinement") {
    auto p = example1_problem(0.8, 0.3);
    auto sp = build_space(16, 1.0);
    double prev = -1;
    for (long K : {20, 40, 80, 160, 320}) {
        auto s = run(p, config(1.0 / K, K, 16));
        double n = l2_norm(sp, s.U) + l2_norm(sp, s.V) + l2_norm(sp, s.Theta);
        if (prev > 0) CHECK(n <= 1.05 * prev);
        prev = n;
    }
}

TEST_CASE("run: trajectory dump and long-horizon warning") {
    auto p = example1_problem(0.4, 0.6);
    std::ostringstream os;
    auto cfg = config(0.1, 12, 6);
    cfg.history_dump = 4;
    cfg.dump_points = 3;
    cfg.trajectory = &os;
    auto s = run(p, cfg);
    REQUIRE(s.warnings.size() == 1);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "k,t,field,z,value");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    // steps 0, 4, 8, 12; three fields; three points
    CHECK(rows == 4 * 3 * 3);
    CHECK(parse_mode("fast") == Mode::Fast);
    CHECK_THROWS_AS(parse_mode("slow"), ArgumentError);
}
