#include "nirenberg/scanner.hpp"

#include "nirenberg/constants.hpp"
#include "nirenberg/errors.hpp"

#include <boost/math/tools/minima.hpp>
#include <json.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace nirenberg {

const char* scenario_name(ScenarioKind k)
{
    switch (k) {
    case ScenarioKind::Tower: return "tower";
    case ScenarioKind::UnstableCluster: return "unstable_cluster";
    case ScenarioKind::StableCluster: return "stable_cluster";
    case ScenarioKind::SingleProfile: return "single_profile";
    }
    return "?";
}

ScenarioKind scenario_from_name(const std::string& s)
{
    for (auto k : {ScenarioKind::Tower, ScenarioKind::UnstableCluster, ScenarioKind::StableCluster,
                   ScenarioKind::SingleProfile})
        if (s == scenario_name(k))
            return k;
    throw Error(ErrorKind::InvalidInput, "unknown scenario " + s);
}

namespace {

std::vector<double> logspace(double a, double b, int m)
{
    std::vector<double> v;
    for (int i = 0; i < m; ++i)
        v.push_back(a * std::pow(b / a, m == 1 ? 0.0 : double(i) / (m - 1)));
    return v;
}

} // namespace

Scenario Scenario::make(ScenarioKind kind, int n, double tau)
{
    Scenario s;
    s.kind = kind;
    s.n = n;
    s.tau = tau;
    s.ratios = logspace(1.5, 100.0, 12);
    s.bases = logspace(0.3, 3.0, 10);
    s.separations = logspace(0.01, 0.5, 8);
    if (kind == ScenarioKind::SingleProfile)
        s.bases = logspace(0.2, 5.0, 25);
    return s;
}

Configuration balance_alphas(const Configuration& c, const CurvatureField& K)
{
    Configuration out = c;
    const double p = c.p(), th = c.theta();
    for (auto& e : out.entries) {
        double lt = std::exp(th * std::log(e.bubble.lambda));
        e.alpha = std::pow(lt / K(e.bubble.a), 1.0 / (p - 1.0));
    }
    return normalize(out, K);
}

namespace {

struct Geometry {
    Vec x;
    KJet jet;
    double sigma = 1.0;
};

Geometry scenario_geometry(const Scenario& s, const CurvatureField& K)
{
    if (K.n() != s.n)
        throw Error(ErrorKind::DimensionMismatch, "K dimension does not match scenario");
    if (!(s.tau > 0))
        throw Error(ErrorKind::InvalidInput, "scan needs tau > 0");
    Geometry g;
    if (s.center) {
        g.x = unit(*s.center);
    } else {
        auto inv = find_critical_points(K);
        bool found = false;
        for (const auto& c : inv.points)
            if (c.is_blowup_candidate) {
                g.x = c.location;
                found = true;
                break;
            }
        if (!found)
            throw Error(ErrorKind::NotBlowupCandidate, "K has no critical point with negative Laplacian");
    }
    g.jet = k_jet(K, g.x);
    if (g.jet.lap < 0)
        g.sigma = std::sqrt(constant("tilde_c2", s.n) / constant("tilde_c1", s.n) * (-g.jet.lap / g.jet.value));
    return g;
}

Configuration make_config(const Scenario& s, const std::vector<std::pair<Vec, double>>& bubbles)
{
    Configuration c;
    c.n = s.n;
    c.tau = s.tau;
    for (const auto& b : bubbles) {
        Entry e;
        e.bubble = {b.first, b.second};
        c.entries.push_back(e);
    }
    return c;
}

bool near_critical(const Scenario& s, const Configuration& c, double sigma)
{
    for (const auto& e : c.entries)
        if (std::abs(e.bubble.lambda * std::sqrt(s.tau) - sigma) >= s.margin_sigma * sigma)
            return false;
    for (int i = 0; i < c.q(); ++i)
        for (int j = i + 1; j < c.q(); ++j)
            if (epsilon(c.n, c.entries[i].bubble, c.entries[j].bubble) >= s.margin_eps * s.tau)
                return false;
    return true;
}

// cluster direction: Hessian eigenvector, most negative (unstable) or largest (stable) eigenvalue
Vec cluster_direction(const Geometry& g, bool stable)
{
    Eigen::SelfAdjointEigenSolver<Mat> es(g.jet.hess);
    int k = stable ? (int)g.jet.hess.rows() - 1 : 0;
    return g.jet.frame.to_ambient(es.eigenvectors().col(k));
}

double relative_gap(double a, double b) { return std::abs(a - b) / (std::abs(a) + std::abs(b)); }

} // namespace

ScanReport scan(const Scenario& s, const CurvatureField& K)
{
    require_dimension(s.n, 4, 10);
    Geometry g = scenario_geometry(s, K);
    ScanReport rep;
    rep.scenario = s;
    rep.sigma = g.sigma;
    const double unit_scale = g.sigma / std::sqrt(s.tau);

    auto evaluate = [&](ScanRow row, const Configuration& c0) {
        Configuration c = balance_alphas(c0, K);
        if (near_critical(s, c, g.sigma)) {
            ++rep.excluded;
            return;
        }
        Certificate cert = residual_certificate(c, K);
        row.gradient_norm = cert.gradient_norm;
        row.lower_bound = cert.lower_bound;
        row.cert_ratio = cert.ratio;
        rep.rows.push_back(row);
    };

    switch (s.kind) {
    case ScenarioKind::Tower:
        for (double r : s.ratios)
            for (double b : s.bases) {
                ScanRow row;
                row.ratio = r;
                row.base = b;
                double l = b * unit_scale;
                evaluate(row, make_config(s, {{g.x, l}, {g.x, r * l}}));
            }
        break;
    case ScenarioKind::UnstableCluster:
    case ScenarioKind::StableCluster: {
        bool stable = s.kind == ScenarioKind::StableCluster;
        Vec e = cluster_direction(g, stable);
        for (double d : s.separations)
            for (double b : s.bases) {
                ScanRow row;
                row.base = b;
                row.separation = d;
                double l = b * unit_scale;
                evaluate(row, make_config(s, {{exp_map(g.x, 0.5 * d * e), l}, {exp_map(g.x, -0.5 * d * e), l}}));
            }
        if (stable) {
            // 1/lambda^2 ~ tau + (lambda d)^{2-n}  and  d ~ lambda^{2-n} d^{1-n}
            double best = INFINITY;
            for (double d : s.separations)
                for (double b : s.bases) {
                    double l = b * unit_scale;
                    double r1 = relative_gap(1.0 / (l * l), s.tau + std::pow(l * d, 2.0 - s.n));
                    double r2 = relative_gap(d, std::pow(l, 2.0 - s.n) * std::pow(d, 1.0 - s.n));
                    best = std::min(best, std::max(r1, r2));
                }
            rep.relation_min_residual = best;
        }
        break;
    }
    case ScenarioKind::SingleProfile: {
        auto J = [&](double t) {
            Configuration c = balance_alphas(make_config(s, {{g.x, std::exp(t)}}), K);
            return reduced_energy(c, K);
        };
        for (double b : s.bases) {
            double l = b * unit_scale;
            rep.profile_lambda.push_back(l);
            rep.profile_J.push_back(J(std::log(l)));
            ScanRow row;
            row.base = b;
            evaluate(row, make_config(s, {{g.x, l}}));
        }
        if (g.jet.lap < 0) {
            double lo = std::log(rep.profile_lambda.front()), hi = std::log(rep.profile_lambda.back());
            auto m = boost::math::tools::brent_find_minima(J, lo, hi, std::numeric_limits<double>::digits / 2);
            rep.lambda_tau = std::exp(m.first);
            const double h = 1e-2;
            rep.curvature = (J(m.first + h) - 2.0 * J(m.first) + J(m.first - h)) / (h * h);
        }
        break;
    }
    }
    rep.min_ratio = INFINITY;
    for (int i = 0; i < (int)rep.rows.size(); ++i)
        if (rep.rows[i].cert_ratio < rep.min_ratio) {
            rep.min_ratio = rep.rows[i].cert_ratio;
            rep.argmin = i;
        }
    if (rep.rows.empty())
        rep.min_ratio = 0;
    return rep;
}

std::vector<TowerSeed> tower_newton_check(const Scenario& s, const CurvatureField& K,
                                          const std::vector<double>& ratios, const std::vector<double>& bases)
{
    Geometry g = scenario_geometry(s, K);
    const double unit_scale = g.sigma / std::sqrt(s.tau);
    std::vector<TowerSeed> out;
    for (double r : ratios)
        for (double b : bases) {
            TowerSeed t;
            t.ratio = r;
            t.base = b;
            double l = b * unit_scale;
            Configuration c = balance_alphas(make_config(s, {{g.x, l}, {g.x, r * l}}), K);
            RefineResult res = newton_refine(c, K);
            t.status = res.status;
            t.residual = res.residual;
            t.message = res.message;
            if (res.status == RefineStatus::Converged) {
                const auto &b1 = res.config.entries[0].bubble, &b2 = res.config.entries[1].bubble;
                double lmin = std::min(b1.lambda, b2.lambda);
                double rr = std::max(b1.lambda, b2.lambda) / lmin;
                t.tower_zero = lmin * geodesic_distance(b1.a, b2.a) < 1.0 && rr > 1.2;
            }
            out.push_back(t);
        }
    return out;
}

std::string ScanReport::to_csv() const
{
    std::ostringstream os;
    os.precision(12);
    os << "kind,lambda_ratio,base,separation,tau,gradient_norm,lower_bound,ratio\n";
    for (const auto& r : rows)
        os << scenario_name(scenario.kind) << "," << r.ratio << "," << r.base << "," << r.separation << ","
           << scenario.tau << "," << r.gradient_norm << "," << r.lower_bound << "," << r.cert_ratio << "\n";
    return os.str();
}

std::string ScanReport::summary_json() const
{
    nlohmann::json j;
    j["scenario"] = scenario_name(scenario.kind);
    j["n"] = scenario.n;
    j["tau"] = scenario.tau;
    j["min_ratio"] = min_ratio;
    j["grid_size"] = rows.size() + excluded;
    j["excluded"] = excluded;
    j["sigma"] = sigma;
    if (argmin >= 0) {
        const auto& r = rows[argmin];
        j["argmin"] = {{"row", argmin}, {"lambda_ratio", r.ratio}, {"base", r.base}, {"separation", r.separation}};
    } else {
        j["argmin"] = nullptr;
    }
    if (scenario.kind == ScenarioKind::SingleProfile) {
        j["lambda_tau"] = lambda_tau;
        j["lambda_tau_sqrt_tau"] = lambda_tau * std::sqrt(scenario.tau);
        j["curvature"] = curvature;
    }
    if (scenario.kind == ScenarioKind::StableCluster)
        j["relation_min_residual"] = relation_min_residual;
    return j.dump(2);
}

} // namespace nirenberg
