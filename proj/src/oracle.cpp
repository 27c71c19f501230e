#include "nirenberg/oracle.hpp"

#include "nirenberg/errors.hpp"
#include "nirenberg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nirenberg {

namespace {

struct Patch {
    Vec center;
    double near_scale = 0; // largest lambda centered at +center
    double far_scale = 0;  // largest lambda centered at -center
    std::vector<int> members;
};

std::vector<double> breakpoints(const Patch& P)
{
    std::vector<double> b{0.0, M_PI_2, M_PI};
    if (P.near_scale > 0)
        for (double h = 0.5 / P.near_scale; h < M_PI_2; h *= 2.0)
            b.push_back(h);
    if (P.far_scale > 0)
        for (double h = 0.5 / P.far_scale; h < M_PI_2; h *= 2.0)
            b.push_back(M_PI - h);
    std::sort(b.begin(), b.end());
    std::vector<double> out{b[0]};
    for (size_t i = 1; i < b.size(); ++i) {
        if (b[i] - out.back() < 1e-14)
            continue;
        // cap panel width at pi/8
        double w = b[i] - out.back();
        int parts = (int)std::ceil(w / (M_PI / 8) - 1e-12);
        double s = out.back();
        for (int k = 1; k <= parts; ++k)
            out.push_back(s + w * k / parts);
    }
    return out;
}

} // namespace

OracleGrid build_oracle_grid(int n, const std::vector<Bubble>& bubbles, int level, int angular_degree, int poly_degree)
{
    require_dimension(n, 3, 10);
    if (level < 1)
        throw Error(ErrorKind::ResolutionTooCoarse, "oracle level must be >= 1");
    if (bubbles.empty())
        throw Error(ErrorKind::InvalidInput, "oracle grid needs at least one bubble");
    std::vector<Patch> patches;
    for (int i = 0; i < (int)bubbles.size(); ++i) {
        const Bubble& b = bubbles[i];
        check_bubble(b);
        if (b.lambda > 1e6)
            throw Error(ErrorKind::Overflow, "lambda above 1e6 underflows the bubble tails");
        bool placed = false;
        for (auto& P : patches) {
            if ((P.center - b.a).norm() < 1e-10) {
                P.near_scale = std::max(P.near_scale, b.lambda);
                P.members.push_back(i);
                placed = true;
                break;
            }
            if ((P.center + b.a).norm() < 1e-10) {
                P.far_scale = std::max(P.far_scale, b.lambda);
                P.members.push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) {
            Patch P;
            P.center = b.a;
            P.near_scale = b.lambda;
            P.members.push_back(i);
            patches.push_back(P);
        }
    }
    OracleGrid g;
    g.n = n;
    g.level = level;
    g.patches = (int)patches.size();
    g.angular_degree = angular_degree >= 0 ? angular_degree
        : (patches.size() == 1 ? poly_degree + 3 : 6 + 6 * level);
    const SphereRule& ang = sphere_rule(n - 1, g.angular_degree);
    const Rule1D gl = gauss_legendre(8 + 4 * level);
    const int na = (int)ang.weights.size();

    size_t estimate = 0;
    for (const auto& P : patches)
        estimate += (breakpoints(P).size() - 1) * gl.nodes.size() * (size_t)na;
    if (estimate > 20000000)
        throw Error(ErrorKind::Overflow, "oracle grid would need " + std::to_string(estimate) + " nodes; lower the level");

    std::vector<Vec> nodes;
    std::vector<double> weights;
    nodes.reserve(estimate);
    weights.reserve(estimate);
    const int m = 4;
    for (size_t pi = 0; pi < patches.size(); ++pi) {
        const Patch& P = patches[pi];
        TangentFrame fr = chart(P.center);
        Mat dirs = fr.basis * ang.points; // (n+1) x na ambient unit tangent directions
        std::vector<double> bp = breakpoints(P);
        for (size_t s = 0; s + 1 < bp.size(); ++s) {
            double lo = bp[s], hi = bp[s + 1], half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
            for (int r = 0; r < gl.nodes.size(); ++r) {
                double th = mid + half * gl.nodes[r];
                double wr = half * gl.weights[r] * std::pow(std::sin(th), n - 1);
                double ct = std::cos(th), st = std::sin(th);
                for (int a = 0; a < na; ++a) {
                    Vec x = ct * P.center + st * dirs.col(a);
                    double w = wr * ang.weights[a];
                    if (patches.size() > 1) {
                        double num = 0, den = 0;
                        for (size_t qi = 0; qi < patches.size(); ++qi)
                            for (int i : patches[qi].members) {
                                double v = std::pow(bubble(n, bubbles[i], x), m);
                                den += v;
                                if (qi == pi)
                                    num += v;
                            }
                        w *= num / den;
                    }
                    if (w == 0.0)
                        continue;
                    nodes.push_back(x);
                    weights.push_back(w);
                }
            }
        }
    }
    g.nodes.resize(n + 1, (Eigen::Index)nodes.size());
    g.weights.resize((Eigen::Index)nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
        g.nodes.col(i) = nodes[i];
        g.weights[i] = weights[i];
    }
    return g;
}

double integrate(const OracleGrid& g, const std::function<double(const Vec&)>& f)
{
    double s = 0;
    for (Eigen::Index i = 0; i < g.weights.size(); ++i)
        s += g.weights[i] * f(g.nodes.col(i));
    return s;
}

double integrate_sphere(int n, const std::vector<Bubble>& bubbles, int level, const std::function<double(const Vec&)>& f)
{
    return integrate(build_oracle_grid(n, bubbles, level), f);
}

namespace {

EnergyBreakdown energy_on(const Configuration& c, const CurvatureField& K, const OracleGrid& g)
{
    const int n = c.n;
    const double p = c.p(), ps = (n + 2.0) / (n - 2.0), L = 4.0 * n * (n - 1.0);
    double r = 0, k = 0;
    for (Eigen::Index i = 0; i < g.weights.size(); ++i) {
        Vec x = g.nodes.col(i);
        double u = 0, Lu = 0;
        for (const auto& e : c.entries) {
            double ph = bubble(n, e.bubble, x);
            u += e.alpha * ph;
            Lu += e.alpha * L * std::pow(ph, ps);
        }
        r += g.weights[i] * u * Lu;
        k += g.weights[i] * K(x) * std::pow(u, p + 1.0);
    }
    EnergyBreakdown b;
    b.r = r;
    b.k_tau = k;
    b.J = r / std::pow(k, 2.0 / (p + 1.0));
    return b;
}

} // namespace

EnergyBreakdown direct_energy(const Configuration& c, const CurvatureField& K, int level, bool estimate_error)
{
    c.validate();
    int deg = K.poly().degree();
    EnergyBreakdown b = energy_on(c, K, build_oracle_grid(c.n, c.bubbles(), level, -1, deg));
    if (estimate_error) {
        EnergyBreakdown f = energy_on(c, K, build_oracle_grid(c.n, c.bubbles(), level + 1, -1, deg));
        b.r_err = std::abs(f.r - b.r);
        b.k_err = std::abs(f.k_tau - b.k_tau);
        b.J_err = std::abs(f.J - b.J);
    }
    if (!(b.r > 0) || !(b.k_tau > 0))
        throw Error(ErrorKind::ResolutionTooCoarse, "nonpositive energy integrals");
    return b;
}

namespace {

// Integrals int Lu psi and int K u^p psi for psi in {phi_1j, phi_2j, phi_3j components}.
struct PairingSums {
    double r = 0, k = 0;
    std::vector<Vec> lu, ku; // per entry: [phi1, phi2, phi3 local...]
};

PairingSums pairing_sums(const Configuration& c, const CurvatureField& K, const OracleGrid& g,
                         const std::vector<TangentFrame>& frames)
{
    const int n = c.n, q = c.q();
    const double p = c.p(), ps = (n + 2.0) / (n - 2.0), L = 4.0 * n * (n - 1.0);
    PairingSums s;
    s.lu.assign(q, Vec::Zero(n + 2));
    s.ku.assign(q, Vec::Zero(n + 2));
    std::vector<BubbleJet> J(q);
    Vec psi(n + 2);
    for (Eigen::Index i = 0; i < g.weights.size(); ++i) {
        Vec x = g.nodes.col(i);
        double u = 0, Lu = 0;
        for (int j = 0; j < q; ++j) {
            J[j] = bubble_jet(n, c.entries[j].bubble, x);
            u += c.entries[j].alpha * J[j].phi1;
            Lu += c.entries[j].alpha * L * std::pow(J[j].phi1, ps);
        }
        double w = g.weights[i];
        double Kx = K(x), up = std::pow(u, p);
        s.r += w * u * Lu;
        s.k += w * Kx * up * u;
        for (int j = 0; j < q; ++j) {
            psi[0] = J[j].phi1;
            psi[1] = J[j].phi2;
            psi.tail(n) = frames[j].basis.transpose() * J[j].phi3;
            s.lu[j] += (w * Lu) * psi;
            s.ku[j] += (w * Kx * up) * psi;
        }
    }
    return s;
}

Vec raw_pairings(const Configuration& c, const PairingSums& s, int j)
{
    const double p = c.p();
    double pre = 2.0 / std::pow(s.k, 2.0 / (p + 1.0));
    return pre * (s.lu[j] - (s.r / s.k) * s.ku[j]);
}

} // namespace

double direct_pairing(const Configuration& c, const CurvatureField& K, int k, int j, int level, int comp)
{
    c.validate();
    if (j < 0 || j >= c.q() || k < 1 || k > 3 || comp < 0 || comp >= c.n)
        throw Error(ErrorKind::InvalidInput, "pairing slot out of range");
    std::vector<TangentFrame> frames;
    for (const auto& e : c.entries)
        frames.push_back(chart(e.bubble.a));
    OracleGrid g = build_oracle_grid(c.n, c.bubbles(), level, -1, K.poly().degree());
    PairingSums s = pairing_sums(c, K, g, frames);
    Vec v = raw_pairings(c, s, j);
    return k == 1 ? v[0] : (k == 2 ? v[1] : v[2 + comp]);
}

ReducedGradient direct_gradient(const Configuration& c, const CurvatureField& K, int level)
{
    c.validate();
    std::vector<TangentFrame> frames;
    for (const auto& e : c.entries)
        frames.push_back(chart(e.bubble.a));
    OracleGrid g = build_oracle_grid(c.n, c.bubbles(), level, -1, K.poly().degree());
    PairingSums s = pairing_sums(c, K, g, frames);
    ReducedGradient r;
    for (int j = 0; j < c.q(); ++j) {
        Vec v = raw_pairings(c, s, j);
        EntryGradient e;
        e.g_alpha = v[0];
        e.g_lambda = -v[1];
        e.g_a_local = v.tail(c.n);
        e.g_a = frames[j].to_ambient(e.g_a_local);
        r.entries.push_back(e);
    }
    return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const size_t m = x.size();
    if (m < 2 || y.size() != m)
        throw Error(ErrorKind::InvalidInput, "slope fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        double lx = std::log(x[i]), ly = std::log(std::max(std::abs(y[i]), 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ConvergenceTable convergence_study(const std::function<Configuration(double)>& family, const CurvatureField& K,
                                   const std::vector<double>& lambdas, int level, bool with_pairings)
{
    if (lambdas.empty())
        throw Error(ErrorKind::InvalidInput, "empty lambda schedule");
    ConvergenceTable t;
    std::vector<double> gaps, pgaps;
    for (double l : lambdas) {
        Configuration c = family(l);
        ConvergenceRow row;
        row.lambda = l;
        row.J_direct = direct_energy(c, K, level, false).J;
        row.J_reduced = reduced_energy(c, K);
        row.gap = std::abs(row.J_direct - row.J_reduced);
        row.budget = error_budget(c, K).value;
        row.ratio = row.gap / row.budget;
        if (with_pairings) {
            Configuration cn = normalize(c, K);
            ReducedGradient d = direct_gradient(cn, K, level), e = reduced_gradient(cn, K);
            double m = 0;
            for (int j = 0; j < c.q(); ++j) {
                m = std::max(m, std::abs(d.entries[j].g_lambda - e.entries[j].g_lambda));
                m = std::max(m, (d.entries[j].g_a - e.entries[j].g_a).norm());
            }
            row.pairing_gap = m;
            pgaps.push_back(m);
        }
        gaps.push_back(row.gap);
        t.rows.push_back(row);
    }
    if (lambdas.size() >= 2) {
        t.energy_slope = loglog_slope(lambdas, gaps);
        if (with_pairings)
            t.pairing_slope = loglog_slope(lambdas, pgaps);
    }
    return t;
}

std::string ConvergenceTable::to_csv() const
{
    std::ostringstream os;
    os.precision(15);
    os << "lambda,J_direct,J_reduced,gap,budget,ratio\n";
    for (const auto& r : rows)
        os << r.lambda << "," << r.J_direct << "," << r.J_reduced << "," << r.gap << "," << r.budget << "," << r.ratio << "\n";
    os << "# fitted slope " << energy_slope << "\n";
    return os.str();
}

} // namespace nirenberg
