#include "fracmhd/solver.hpp"

#include "fracmhd/errors.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

namespace fracmhd {

namespace {

using cplx = std::complex<double>;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void axpy(double a, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

const char* mode_name(Mode m) { return m == Mode::Fast ? "fast" : "direct"; }

Mode parse_mode(const std::string& s) {
    if (s == "direct") return Mode::Direct;
    if (s == "fast") return Mode::Fast;
    throw ArgumentError("mode must be direct or fast, got '" + s + "'");
}

StepMatrices make_step_matrices(const SpectralSpace& sp, const ProblemCoefficients& c,
                                const SolverConfig& cfg, const WeightTable& wg,
                                const WeightTable& w1mb, const WeightTable& wmb) {
    const double tau = cfg.tau;
    const double tg = std::pow(tau, c.gamma);
    const double tb = std::pow(tau, c.beta);
    const double t1mb = std::pow(tau, 1.0 - c.beta);
    StepMatrices m;
    const double frac_u = c.a1 * wg[0] / tg + c.a3;
    const double frac_t = c.b1 * w1mb[0] / t1mb - c.b3 * tb * wmb[0] - c.b4;
    m.varpi1 = 1.0 / tau + frac_u;
    m.varpik = 1.5 / tau + frac_u;
    m.rho1 = 1.0 / tau + frac_t;
    m.rhok = 1.5 / tau + frac_t;
    m.uv_stiff = c.a2 * wg[0] / tg + 1.0;
    m.th_stiff = c.b2 * tb * wmb[0];

    auto real_fact = [&](double rho) {
        std::vector<double> d, o;
        combine<double>(sp.mass, sp.stiff, rho, m.th_stiff, d, o);
        try {
            return RealLDL(d, o);
        } catch (const NumericalError& e) {
            std::ostringstream os;
            os << "temperature operator is not positive definite (rho=" << rho << ", b3=" << c.b3
               << ", b4=" << c.b4 << "): " << e.what();
            throw NumericalError(os.str());
        }
    };
    auto cplx_fact = [&](double varpi) {
        std::vector<cplx> d, o;
        combine<cplx>(sp.mass, sp.stiff, cplx(varpi, c.a4), cplx(m.uv_stiff, 0.0), d, o);
        return ComplexLDL(d, o);
    };
    m.theta1 = real_fact(m.rho1);
    m.thetak = real_fact(m.rhok);
    m.uv1 = cplx_fact(m.varpi1);
    m.uvk = cplx_fact(m.varpik);
    return m;
}

void AccumulatorBank::init(const ContourNodes& nd, int dim) {
    nodes = &nd;
    const std::size_t Q = nd.Q();
    decay.resize(Q);
    scale.resize(Q);
    q.assign(Q, Vec(dim, 0.0));
    n = 0;
    for (std::size_t i = 0; i < Q; ++i) {
        double a = 1.0 + nd.poles[i] * nd.tau;
        decay[i] = 1.0 / a;
        scale[i] = std::pow(a, -static_cast<double>(nd.k0) - 1.0) * nd.weights_h[i];
    }
}

void AccumulatorBank::push(const Vec& x, double tau) {
    for (std::size_t i = 0; i < q.size(); ++i) {
        Vec& qi = q[i];
        const double d = decay[i];
        for (std::size_t j = 0; j < qi.size(); ++j) qi[j] = (qi[j] + tau * x[j]) * d;
    }
    ++n;
}

Vec AccumulatorBank::tail(double tau) const {
    Vec out(q.empty() ? 0 : q[0].size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) axpy(scale[i], q[i], out);
    const double f = std::pow(tau, nodes->order);
    for (double& v : out) v *= f;
    return out;
}

void CoupledSolver::History::push(const Vec& v) {
    if (ring == 0) {
        buf.push_back(v);
    } else {
        if (static_cast<long>(buf.size()) < ring)
            buf.push_back(v);
        else
            buf[count % ring] = v;
    }
    ++count;
}

const Vec& CoupledSolver::History::at(long j) const {
    if (j < 0 || j >= count || j < count - held())
        throw StateError("history vector for step " + std::to_string(j) + " is not stored");
    return ring == 0 ? buf[j] : buf[j % ring];
}

long CoupledSolver::History::held() const {
    return ring == 0 ? count : std::min(count, ring);
}

CoupledSolver::CoupledSolver(const ProblemSpec& problem, const SolverConfig& cfg)
    : prob_(problem), cfg_(cfg) {
    const auto t0 = clock_type::now();
    const auto& c = prob_.coeffs;
    if (!(cfg.tau > 0.0)) throw ArgumentError("tau must be positive");
    if (cfg.K < 1) throw ArgumentError("K must be at least 1");
    if (!(c.gamma > 0.0 && c.gamma < 1.0) || !(c.beta > 0.0 && c.beta < 1.0))
        throw DomainError("gamma and beta must lie in (0,1)");
    if (cfg.k0 < 1) throw ArgumentError("k0 must be at least 1");

    sp_ = build_space(cfg.N, cfg.L);
    wg_ = fbdf_weights(c.gamma, cfg.K);
    w1mb_ = fbdf_weights(1.0 - c.beta, cfg.K);
    wmb_ = fbdf_weights(-c.beta, cfg.K);
    mats_ = make_step_matrices(sp_, c, cfg_, wg_, w1mb_, wmb_);

    // With k0 >= K every step is inside the exact window, so fast equals direct.
    fast_ = cfg.mode == Mode::Fast && cfg.K > cfg.k0;
    if (fast_) {
        ng_ = std::make_unique<ContourNodes>(contour_nodes(c.gamma, cfg.tau, cfg.K, cfg.k0, cfg.eps));
        n1mb_ = std::make_unique<ContourNodes>(
            contour_nodes(1.0 - c.beta, cfg.tau, cfg.K, cfg.k0, cfg.eps));
        nmb_ = std::make_unique<ContourNodes>(contour_nodes(-c.beta, cfg.tau, cfg.K, cfg.k0, cfg.eps));
        bu_.init(*ng_, sp_.dim);
        bv_.init(*ng_, sp_.dim);
        bt1_.init(*n1mb_, sp_.dim);
        bt2_.init(*nmb_, sp_.dim);
        if (!cfg.keep_full_history) hu_.ring = hv_.ring = ht_.ring = cfg.k0 + 2;
    }

    for (auto* pr : {&prob_.f, &prob_.g, &prob_.p}) {
        auto& cache = pr == &prob_.f ? pf_ : pr == &prob_.g ? pg_ : pp_;
        for (const auto& term : pr->terms) cache.push_back(project(sp_, term.profile));
    }

    const Vec zero(sp_.dim, 0.0);
    hu_.push(zero);
    hv_.push(zero);
    ht_.push(zero);
    if (fast_) update_accumulators(0);
    peak_ = stored_vectors();
    setup_s_ = seconds_since(t0);
    dump(0);
}

long CoupledSolver::stored_vectors() const {
    long n = hu_.held() + hv_.held() + ht_.held();
    if (fast_)
        n += static_cast<long>(bu_.q.size() + bv_.q.size() + bt1_.q.size() + bt2_.q.size());
    return n;
}

const Vec& CoupledSolver::U(long j) const { return hu_.at(j); }
const Vec& CoupledSolver::V(long j) const { return hv_.at(j); }
const Vec& CoupledSolver::Theta(long j) const { return ht_.at(j); }

Vec CoupledSolver::sum_direct(const History& h, const WeightTable& w, long k) const {
    Vec out(sp_.dim, 0.0);
    for (long j = 0; j < k; ++j) axpy(w[k - j], h.at(j), out);
    return out;
}

Vec CoupledSolver::sum_local(const History& h, const WeightTable& w, long k) const {
    Vec out(sp_.dim, 0.0);
    for (long j = std::max(0L, k - cfg_.k0); j < k; ++j) axpy(w[k - j], h.at(j), out);
    return out;
}

Vec CoupledSolver::project_terms(const std::vector<Vec>& cache, const Forcing& f, double t) const {
    Vec out(sp_.dim, 0.0);
    for (std::size_t i = 0; i < cache.size(); ++i)
        axpy(f.terms[i].coef * tpow(t, f.terms[i].mu), cache[i], out);
    return out;
}

Rhs CoupledSolver::assemble(long k, bool fast) const {
    if (k < 1) throw ArgumentError("step index must be at least 1");
    if (hu_.count < k) throw StateError("history incomplete for step " + std::to_string(k));
    const auto& c = prob_.coeffs;
    const double tau = cfg_.tau;
    const double t = k * tau;
    const double tg = std::pow(tau, c.gamma);
    const double tb = std::pow(tau, c.beta);
    const double t1mb = std::pow(tau, 1.0 - c.beta);

    Vec Hu, Hv, Ht1, Ht2;
    if (fast) {
        const long need = k - cfg_.k0;
        if (bu_.n != need || bv_.n != need || bt1_.n != need || bt2_.n != need)
            throw StateError("accumulators out of step at k=" + std::to_string(k));
        Hu = sum_local(hu_, wg_, k);
        Hv = sum_local(hv_, wg_, k);
        Ht1 = sum_local(ht_, w1mb_, k);
        Ht2 = sum_local(ht_, wmb_, k);
        axpy(1.0, bu_.tail(tau), Hu);
        axpy(1.0, bv_.tail(tau), Hv);
        axpy(1.0, bt1_.tail(tau), Ht1);
        axpy(1.0, bt2_.tail(tau), Ht2);
    } else {
        Hu = sum_direct(hu_, wg_, k);
        Hv = sum_direct(hv_, wg_, k);
        Ht1 = sum_direct(ht_, w1mb_, k);
        Ht2 = sum_direct(ht_, wmb_, k);
    }

    auto bdf = [&](const History& h) {
        Vec b(sp_.dim, 0.0);
        if (k == 1) {
            axpy(1.0 / tau, h.at(0), b);
        } else {
            axpy(2.0 / tau, h.at(k - 1), b);
            axpy(-0.5 / tau, h.at(k - 2), b);
        }
        return b;
    };

    Rhs r;
    auto momentum = [&](const History& h, const Vec& H, const std::vector<Vec>& cache,
                        const Forcing& f) {
        Vec m = bdf(h);
        axpy(-c.a1 / tg, H, m);
        Vec out = sp_.mass.apply(m);
        Vec dh = sp_.stiff_apply(H);
        axpy(-c.a2 / tg, dh, out);
        axpy(1.0, project_terms(cache, f, t), out);
        return out;
    };
    r.F = momentum(hu_, Hu, pf_, prob_.f);
    r.G = momentum(hv_, Hv, pg_, prob_.g);

    Vec m = bdf(ht_);
    axpy(-c.b1 / t1mb, Ht1, m);
    axpy(c.b3 * tb, Ht2, m);
    r.P = sp_.mass.apply(m);
    axpy(-c.b2 * tb, sp_.stiff_apply(Ht2), r.P);
    axpy(1.0, project_terms(pp_, prob_.p, t), r.P);
    return r;
}

Rhs CoupledSolver::assemble_rhs_direct(long k) const { return assemble(k, false); }

Rhs CoupledSolver::assemble_rhs_fast(long k) const {
    if (!fast_) throw ContractViolation("fast assembly requested but no contour nodes are active");
    if (k <= cfg_.k0) throw ContractViolation("fast assembly needs k > k0");
    return assemble(k, true);
}

void CoupledSolver::update_accumulators(long m) {
    if (m != last_update_ + 1)
        throw StateError("accumulator update for step " + std::to_string(m) + " after step " +
                         std::to_string(last_update_));
    last_update_ = m;
    if (!fast_ || m < cfg_.k0) return;
    const long j = m - cfg_.k0;
    bu_.push(hu_.at(j), cfg_.tau);
    bv_.push(hv_.at(j), cfg_.tau);
    bt1_.push(ht_.at(j), cfg_.tau);
    bt2_.push(ht_.at(j), cfg_.tau);
}

void CoupledSolver::step() {
    const long k = k_ + 1;
    if (fast_ && last_update_ != k_)
        throw StateError("accumulators not updated after step " + std::to_string(k_));
    Rhs r = (fast_ && k > cfg_.k0) ? assemble(k, true) : assemble(k, false);

    const bool first = k == 1;
    Vec th = (first ? mats_.theta1 : mats_.thetak).solve(r.P);

    const auto& c = prob_.coeffs;
    sp_.mass.apply_add(th, c.a5, r.F);
    std::vector<cplx> b(sp_.dim);
    for (int j = 0; j < sp_.dim; ++j) b[j] = cplx(r.F[j], r.G[j]);
    std::vector<cplx> x = (first ? mats_.uv1 : mats_.uvk).solve(b);
    Vec u(sp_.dim), v(sp_.dim);
    for (int j = 0; j < sp_.dim; ++j) {
        u[j] = x[j].real();
        v[j] = x[j].imag();
        if (!std::isfinite(u[j]) || !std::isfinite(v[j]) || !std::isfinite(th[j]))
            throw NumericalError("non-finite solution at step " + std::to_string(k));
    }
    hu_.push(u);
    hv_.push(v);
    ht_.push(th);
    k_ = k;
    if (fast_) update_accumulators(k);
    peak_ = std::max(peak_, stored_vectors());
    if (cfg_.history_dump > 0 && k % cfg_.history_dump == 0) dump(k);
}

void CoupledSolver::dump(long k) const {
    if (!cfg_.trajectory || cfg_.history_dump <= 0) return;
    std::ostream& os = *cfg_.trajectory;
    const int n = std::max(2, cfg_.dump_points);
    Vec z(n);
    for (int i = 0; i < n; ++i) z[i] = sp_.L * i / (n - 1);
    const double t = k * cfg_.tau;
    Vec u = eval_expansion(sp_, hu_.at(k), z);
    Vec v = eval_expansion(sp_, hv_.at(k), z);
    Vec th = eval_expansion(sp_, ht_.at(k), z);
    for (int i = 0; i < n; ++i) {
        if (prob_.lift_u) u[i] += prob_.lift_u(z[i], t);
        if (prob_.lift_theta) th[i] += prob_.lift_theta(z[i], t);
    }
    for (auto [name, vals] : {std::pair<const char*, const Vec*>{"u", &u}, {"v", &v}, {"theta", &th}})
        for (int i = 0; i < n; ++i)
            os << k << ',' << t << ',' << name << ',' << z[i] << ',' << (*vals)[i] << '\n';
}

Solution run(const ProblemSpec& problem, const SolverConfig& cfg) {
    SolverConfig c = cfg;
    if (c.trajectory && c.history_dump > 0) *c.trajectory << "k,t,field,z,value\n";
    CoupledSolver s(problem, c);
    Solution out;
    if (cfg.tau * cfg.K > 1.0 + 1e-12)
        out.warnings.push_back("final time exceeds 1, outside the analysed window");
    const auto t0 = clock_type::now();
    for (long k = 1; k <= cfg.K; ++k) s.step();
    out.loop_seconds = seconds_since(t0);
    out.setup_seconds = s.setup_seconds();
    out.U = s.U(cfg.K);
    out.V = s.V(cfg.K);
    out.Theta = s.Theta(cfg.K);
    out.t_final = cfg.K * cfg.tau;
    out.peak_history_vectors = s.peak_history_vectors();
    if (s.fast_active()) {
        out.Q_gamma = s.nodes_gamma()->Q();
        out.Q_one_minus_beta = s.nodes_one_minus_beta()->Q();
        out.Q_minus_beta = s.nodes_minus_beta()->Q();
        out.achieved_eps = std::max({s.nodes_gamma()->achieved_eps,
                                     s.nodes_one_minus_beta()->achieved_eps,
                                     s.nodes_minus_beta()->achieved_eps});
    }
    return out;
}

}  // namespace fracmhd
