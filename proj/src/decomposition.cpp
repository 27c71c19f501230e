#include "nirenberg/decomposition.hpp"

#include "nirenberg/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace nirenberg {

namespace {

double critical_power(int n) { return (n + 2.0) / (n - 2.0); }

// phi_{k} slot value of a jet; L acts as 4n(n-1) p* phi^{p*-1} on derivatives of phi
double slot(const BubbleJet& J, const TangentFrame& fr, int k, int comp)
{
    if (k == 1)
        return J.phi1;
    if (k == 2)
        return J.phi2;
    return fr.basis.col(comp).dot(J.phi3);
}

Vec read_point(const nlohmann::json& j, int n)
{
    std::vector<double> a = j.get<std::vector<double>>();
    if ((int)a.size() != n + 1)
        throw Error(ErrorKind::DimensionMismatch, "point dimension does not match n");
    Vec v = Eigen::Map<Vec>(a.data(), (Eigen::Index)a.size());
    double r = v.norm();
    if (std::abs(r - 1.0) > 1e-6)
        throw Error(ErrorKind::InvalidInput, "center is not a unit vector");
    return v / r;
}

} // namespace

double AnalyticEnsemble::value(const Vec& x) const
{
    double s = constant;
    if (coords.size())
        s += coords.dot(x);
    for (const auto& e : bubbles)
        s += e.alpha * bubble(n, e.bubble, x);
    for (const auto& c : jets) {
        BubbleJet J = bubble_jet(n, c.bubble, x);
        s += c.coef * slot(J, chart(c.bubble.a), c.k, c.comp);
    }
    return s;
}

double AnalyticEnsemble::L_value(const Vec& x) const
{
    const double ps = critical_power(n), L = 4.0 * n * (n - 1.0);
    const double cn = 4.0 * (n - 1.0) / (n - 2.0);
    double s = n * (n - 1.0) * constant;
    if (coords.size())
        s += (cn * n + n * (n - 1.0)) * coords.dot(x);
    for (const auto& e : bubbles)
        s += e.alpha * L * std::pow(bubble(n, e.bubble, x), ps);
    for (const auto& c : jets) {
        BubbleJet J = bubble_jet(n, c.bubble, x);
        double v = slot(J, chart(c.bubble.a), c.k, c.comp);
        s += c.coef * L * (c.k == 1 ? std::pow(J.phi1, ps) : ps * std::pow(J.phi1, ps - 1.0) * v);
    }
    return s;
}

std::vector<Bubble> AnalyticEnsemble::centers() const
{
    std::vector<Bubble> b;
    for (const auto& e : bubbles)
        b.push_back(e.bubble);
    for (const auto& c : jets)
        b.push_back(c.bubble);
    return b;
}

void AnalyticEnsemble::validate() const
{
    require_dimension(n, 3, 10);
    if (coords.size() && coords.size() != n + 1)
        throw Error(ErrorKind::DimensionMismatch, "coordinate coefficients need n+1 entries");
    if (bubbles.empty() && jets.empty())
        throw Error(ErrorKind::InvalidInput, "ensemble needs a bubble component");
    for (const auto& e : bubbles) {
        check_bubble(e.bubble);
        check_point(e.bubble.a);
    }
    for (const auto& c : jets) {
        check_bubble(c.bubble);
        check_point(c.bubble.a);
        if (c.k < 1 || c.k > 3 || c.comp < 0 || c.comp >= n)
            throw Error(ErrorKind::InvalidInput, "jet slot out of range");
    }
}

AnalyticEnsemble AnalyticEnsemble::from_json_text(const std::string& text)
{
    AnalyticEnsemble u;
    try {
        auto j = nlohmann::json::parse(text);
        u.n = j.at("n").get<int>();
        require_dimension(u.n, 3, 10);
        for (const auto& e : j.value("bubbles", nlohmann::json::array())) {
            Entry en;
            en.alpha = e.value("alpha", 1.0);
            en.bubble = {read_point(e.at("a"), u.n), e.at("lambda").get<double>()};
            u.bubbles.push_back(en);
        }
        for (const auto& e : j.value("jets", nlohmann::json::array())) {
            JetComponent c;
            c.bubble = {read_point(e.at("a"), u.n), e.at("lambda").get<double>()};
            c.k = e.value("k", 1);
            c.comp = e.value("comp", 0);
            c.coef = e.value("coef", 1.0);
            u.jets.push_back(c);
        }
        if (j.contains("coordinates")) {
            std::vector<double> v = j["coordinates"].get<std::vector<double>>();
            u.coords = Eigen::Map<Vec>(v.data(), (Eigen::Index)v.size());
        }
        u.constant = j.value("constant", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("bad ensemble JSON: ") + e.what());
    }
    u.validate();
    return u;
}

AnalyticEnsemble AnalyticEnsemble::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::InvalidInput, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

namespace {

struct Sampled {
    OracleGrid g;
    Vec u, Lu; // ensemble and its conformal Laplacian at the nodes
};

// grid on the ensemble centers plus config bubbles not already resolved by them
Sampled grid_for(const AnalyticEnsemble& u, const Configuration& c, int level)
{
    std::vector<Bubble> b = u.centers();
    for (const auto& e : c.entries) {
        bool covered = false;
        for (const auto& x : b)
            covered = covered || geodesic_distance(x.a, e.bubble.a) * std::max(x.lambda, e.bubble.lambda) < 1.0;
        if (!covered)
            b.push_back(e.bubble);
    }
    Sampled s;
    // Several patches: a coarse angular rule. The fit only needs the discrete inner
    // product to be positive; exactness of u on the nodes does the rest.
    s.g = build_oracle_grid(u.n, b, level, b.size() > 1 ? 4 + 2 * level : -1, 4);
    const Eigen::Index N = s.g.weights.size();
    s.u.resize(N);
    s.Lu.resize(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        s.u[i] = u.value(s.g.nodes.col(i));
        s.Lu[i] = u.L_value(s.g.nodes.col(i));
    }
    return s;
}

struct Sums {
    Mat G;     // <psi_a, L psi_b>
    Vec rhs;   // <psi_a, L v>
    double vn = 0, un = 0;
};

Sums accumulate(const Sampled& smp, const Configuration& c, const std::vector<TangentFrame>& frames,
                bool with_gram, bool subtract = true)
{
    const OracleGrid& g = smp.g;
    const int n = c.n, q = c.q(), m = n + 2, N = q * m;
    const double ps = critical_power(n), L = 4.0 * n * (n - 1.0);
    Sums s;
    s.G = Mat::Zero(N, N);
    s.rhs = Vec::Zero(N);
    Vec psi(N), Lpsi(N);
    for (Eigen::Index i = 0; i < g.weights.size(); ++i) {
        Vec x = g.nodes.col(i);
        double w = g.weights[i];
        double uv = smp.u[i], Lu = smp.Lu[i];
        double wv = 0, Lw = 0;
        for (int j = 0; j < q; ++j) {
            BubbleJet J = bubble_jet(n, c.entries[j].bubble, x);
            double pp = std::pow(J.phi1, ps - 1.0);
            wv += c.entries[j].alpha * J.phi1;
            Lw += c.entries[j].alpha * L * pp * J.phi1;
            psi[j * m] = J.phi1;
            psi[j * m + 1] = J.phi2;
            psi.segment(j * m + 2, n) = frames[j].basis.transpose() * J.phi3;
            Lpsi.segment(j * m, m) = (L * ps * pp) * psi.segment(j * m, m);
            Lpsi[j * m] = L * pp * J.phi1;
        }
        if (!subtract)
            wv = Lw = 0;
        double v = uv - wv, Lv = Lu - Lw;
        s.vn += w * v * Lv;
        s.un += w * uv * Lu;
        s.rhs += (w * Lv) * psi;
        if (with_gram)
            s.G.noalias() += w * psi * Lpsi.transpose();
    }
    if (with_gram)
        s.G = 0.5 * (s.G + s.G.transpose()).eval();
    return s;
}

std::vector<TangentFrame> frames_of(const Configuration& c)
{
    std::vector<TangentFrame> f;
    for (const auto& e : c.entries)
        f.push_back(chart(e.bubble.a));
    return f;
}

struct Run {
    Configuration config;
    Sums sums;
    int iterations = 0;
    bool converged = false;
    std::string message;
};

double relative_residual(const Sums& s)
{
    if (!(s.vn > 0))
        return 0.0;
    double m = 0;
    for (Eigen::Index a = 0; a < s.rhs.size(); ++a)
        if (s.G(a, a) > 0)
            m = std::max(m, std::abs(s.rhs[a]) / std::sqrt(s.G(a, a) * s.vn));
    return m;
}

Run gauss_newton(const Sampled& g, Configuration c, int max_it)
{
    const int n = c.n, q = c.q(), m = n + 2, N = q * m;
    Run r;
    double mu = 1e-3;
    for (int it = 0; it <= max_it; ++it) {
        r.iterations = it;
        auto fr = frames_of(c);
        Sums s = accumulate(g, c, fr, true);
        r.config = c;
        r.sums = s;
        double rel = relative_residual(s);
        if (s.vn <= 1e-28 * s.un || rel < 1e-11) {
            r.converged = true;
            return r;
        }
        if (it == max_it)
            break;
        // d w / d(alpha, ln lambda, y) = S psi
        Vec S(N);
        for (int j = 0; j < q; ++j) {
            double al = c.entries[j].alpha, l = c.entries[j].bubble.lambda;
            S[j * m] = 1.0;
            S[j * m + 1] = -al;
            S.segment(j * m + 2, n).setConstant(al * l);
        }
        Mat H = S.asDiagonal() * s.G * S.asDiagonal();
        Vec grad = S.cwiseProduct(s.rhs);
        bool accepted = false;
        for (int tries = 0; tries < 30 && !accepted; ++tries) {
            Mat A = H;
            A.diagonal() += mu * H.diagonal();
            Vec d = A.ldlt().solve(grad);
            Configuration t = c;
            bool ok = d.allFinite();
            for (int j = 0; j < q && ok; ++j) {
                auto& e = t.entries[j];
                e.alpha += d[j * m];
                e.bubble.lambda *= std::exp(d[j * m + 1]);
                e.bubble.a = exp_map(e.bubble.a, fr[j].to_ambient(d.segment(j * m + 2, n)));
                ok = e.alpha > 0 && e.bubble.lambda < 1e6;
            }
            if (ok) {
                double vn = accumulate(g, t, frames_of(t), false).vn;
                // near the minimum the decrease of vn sinks below its rounding; then
                // judge the step by the first-order conditions instead
                bool better = vn < s.vn;
                if (!better && vn - s.vn <= 1e-12 * s.vn && mu < 1.0)
                    better = relative_residual(accumulate(g, t, frames_of(t), true)) < 0.5 * rel;
                if (better) {
                    c = t;
                    accepted = true;
                    mu = std::max(mu / 10.0, 1e-12);
                    break;
                }
            }
            mu *= 10.0;
        }
        if (!accepted) {
            // no decrease left at working precision
            r.converged = rel < 1e-8;
            r.message = r.converged ? "" : "Levenberg damping exhausted";
            return r;
        }
    }
    r.converged = relative_residual(r.sums) < 1e-8;
    r.message = r.converged ? "" : "iteration limit reached";
    return r;
}

double parameter_distance(const Configuration& a, const Configuration& b)
{
    double d = 0;
    for (int j = 0; j < a.q(); ++j) {
        const auto &x = a.entries[j], &y = b.entries[j];
        d = std::max(d, std::abs(x.alpha - y.alpha) / x.alpha);
        d = std::max(d, std::abs(std::log(x.bubble.lambda / y.bubble.lambda)));
        d = std::max(d, x.bubble.lambda * geodesic_distance(x.bubble.a, y.bubble.a));
    }
    return d;
}

} // namespace

DecompositionResult project_to_bubbles(const AnalyticEnsemble& u, const Configuration& init,
                                       const DecompositionOptions& opt)
{
    u.validate();
    init.validate();
    if (init.n != u.n)
        throw Error(ErrorKind::DimensionMismatch, "init dimension does not match ensemble");
    Sampled g = grid_for(u, init, opt.level);
    Run r = gauss_newton(g, init, opt.max_iterations);
    if (!r.converged)
        throw Error(ErrorKind::NonConvergence, "projection did not converge: " + r.message);
    DecompositionResult out;
    out.config = r.config;
    out.v_norm_sq = std::max(0.0, r.sums.vn);
    out.u_norm_sq = r.sums.un;
    out.iterations = r.iterations;
    out.max_relative_residual = relative_residual(r.sums);
    const int m = u.n + 2;
    for (int j = 0; j < init.q(); ++j)
        out.ortho_residuals.push_back(r.sums.rhs.segment(j * m, m));

    std::mt19937 rng(opt.seed);
    std::normal_distribution<double> N01(0.0, 1.0);
    for (int k = 0; k < opt.restarts; ++k) {
        Configuration c = init;
        for (auto& e : c.entries) {
            e.alpha *= 1.0 + 0.01 * N01(rng);
            e.bubble.lambda *= std::exp(0.01 * N01(rng));
            Vec v(u.n + 1);
            for (int i = 0; i <= u.n; ++i)
                v[i] = N01(rng);
            e.bubble.a = exp_map(e.bubble.a, project_tangent(e.bubble.a, v) * (0.01 / e.bubble.lambda));
        }
        Run s = gauss_newton(g, c, opt.max_iterations);
        double d = parameter_distance(r.config, s.config);
        if (!s.converged || d > opt.restart_tol) {
            out.local_min_warning = true;
            std::ostringstream os;
            os << "LocalMinWarning: restart " << k << (s.converged ? " converged elsewhere" : " did not converge")
               << " (parameter distance " << d << ")";
            out.warning = os.str();
            break;
        }
    }
    return out;
}

HProjection h_projection(const AnalyticEnsemble& u, const Configuration& c, int level)
{
    u.validate();
    c.validate();
    if (c.n != u.n)
        throw Error(ErrorKind::DimensionMismatch, "configuration dimension does not match ensemble");
    Sampled g = grid_for(u, c, level);
    auto fr = frames_of(c);
    Sums s = accumulate(g, c, fr, true, false); // rhs = <psi, L u>
    HProjection h;
    h.gram = s.G;
    Vec d = s.G.diagonal().cwiseSqrt().cwiseInverse();
    Mat Gs = d.asDiagonal() * s.G * d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat> es(Gs);
    double lo = es.eigenvalues()[0], hi = es.eigenvalues()[Gs.rows() - 1];
    h.condition = lo > 0 ? hi / lo : INFINITY;
    if (!(h.condition < 1e8))
        throw Error(ErrorKind::IllConditioned, "Gram matrix condition number above 1e8");
    Vec coef = d.asDiagonal() * Gs.ldlt().solve(d.asDiagonal() * s.rhs);
    Vec res = s.rhs - s.G * coef;
    h.complement_norm_sq = s.un - coef.dot(s.rhs);
    const int m = c.n + 2;
    for (int j = 0; j < c.q(); ++j) {
        h.coefficients.push_back(coef.segment(j * m, m));
        h.complement_residuals.push_back(res.segment(j * m, m));
    }
    return h;
}

} // namespace nirenberg
