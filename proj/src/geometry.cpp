#include "nirenberg/geometry.hpp"

#include "nirenberg/errors.hpp"
#include "nirenberg/quadrature.hpp"
#include "nirenberg/solver.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace nirenberg {

SphereModel SphereModel::make(int n)
{
    require_dimension(n, 3, 10);
    SphereModel m;
    m.n = n;
    m.scalar_curvature = n * (n - 1.0);
    m.omega_n = sphere_area(n - 1);
    m.gamma_n = std::pow(4.0 * n * (n - 1.0) * m.omega_n, 2.0 / (2.0 - n));
    m.c_n = 4.0 * (n - 1.0) / (n - 2.0);
    return m;
}

void check_point(const Vec& x)
{
    if (x.size() < 2 || std::abs(x.norm() - 1.0) > 1e-12)
        throw Error(ErrorKind::InvalidInput, "point is not on the unit sphere");
}

Vec unit(const Vec& x)
{
    double r = x.norm();
    if (!(r > 0.0))
        throw Error(ErrorKind::InvalidInput, "cannot normalize the zero vector");
    return x / r;
}

Vec pole(int n, int k, double sign)
{
    Vec e = Vec::Zero(n + 1);
    e[k] = sign;
    return e;
}

double geodesic_distance(const Vec& a, const Vec& b)
{
    double c = (a - b).norm();
    return 2.0 * std::asin(std::min(1.0, 0.5 * c));
}

Vec project_tangent(const Vec& a, const Vec& v)
{
    return v - a.dot(v) * a;
}

Vec exp_map(const Vec& a, const Vec& v)
{
    double t = v.norm();
    if (t == 0.0)
        return a;
    Vec x = std::cos(t) * a + std::sin(t) / t * v;
    return x / x.norm();
}

Vec TangentFrame::chart(const Vec& x) const
{
    double d = 1.0 + base.dot(x);
    if (d < 1e-300)
        throw Error(ErrorKind::AntipodalSingularity, "chart evaluated at the antipode");
    return 2.0 * basis.transpose() * x / d;
}

Vec TangentFrame::chart_inverse(const Vec& y) const
{
    double q = 0.25 * y.squaredNorm();
    return ((1.0 - q) * base + basis * y) / (1.0 + q);
}

TangentFrame chart(const Vec& a)
{
    check_point(a);
    const int N = (int)a.size();
    const int n = N - 1;
    // Householder reflection sending e_n to +-a; pick the sign that keeps |v| >= sqrt 2
    Vec v = a;
    double s = a[n] >= 0.0 ? 1.0 : -1.0;
    v[n] += s;
    double vv = v.squaredNorm();
    TangentFrame f;
    f.base = a;
    f.basis.resize(N, n);
    for (int k = 0; k < n; ++k) {
        Vec e = Vec::Zero(N);
        e[k] = 1.0;
        f.basis.col(k) = e - (2.0 * v[k] / vv) * v;
    }
    return f;
}

double conformal_factor(int n, const Vec& a, const Vec& x)
{
    double c = 1.0 + a.dot(x); // 2 cos^2(theta/2)
    if (c < 1e-12)
        throw Error(ErrorKind::AntipodalSingularity, "conformal factor at the antipode");
    return std::pow(2.0 / c, 0.5 * (n - 2));
}

double green_kernel(const Vec& a, const Vec& b)
{
    double d2 = (a - b).squaredNorm();
    if (d2 < 1e-24)
        throw Error(ErrorKind::CoincidentPoints, "green kernel at coincident points");
    return d2;
}

// ---------------------------------------------------------------- K fields

CurvatureField CurvatureField::affine(double c0, const Vec& v)
{
    CurvatureField K;
    K.family_ = FieldFamily::Affine;
    K.n_ = (int)v.size() - 1;
    K.coeffs_.push_back(c0);
    for (int i = 0; i < v.size(); ++i)
        K.coeffs_.push_back(v[i]);
    K.F_ = Polynomial::constant(K.n_ + 1, c0);
    for (int i = 0; i < v.size(); ++i)
        K.F_ += Polynomial::coordinate(K.n_ + 1, i) * v[i];
    K.build();
    return K;
}

CurvatureField CurvatureField::quadratic(double c0, const Vec& d)
{
    CurvatureField K;
    K.family_ = FieldFamily::Quadratic;
    K.n_ = (int)d.size() - 1;
    K.coeffs_.push_back(c0);
    for (int i = 0; i < d.size(); ++i)
        K.coeffs_.push_back(d[i]);
    K.F_ = Polynomial::constant(K.n_ + 1, c0);
    for (int i = 0; i < d.size(); ++i)
        K.F_ += Polynomial::coordinate(K.n_ + 1, i).times_coordinate(i) * d[i];
    K.build();
    return K;
}

CurvatureField CurvatureField::polynomial(const Polynomial& p)
{
    CurvatureField K;
    K.family_ = FieldFamily::Polynomial;
    K.n_ = p.dim() - 1;
    K.F_ = p;
    K.build();
    return K;
}

CurvatureField CurvatureField::constant(int n, double c)
{
    return affine(c, Vec::Zero(n + 1));
}

void CurvatureField::build(bool check_positive)
{
    require_dimension(n_, 3, 10);
    const int N = n_ + 1;
    dF_.clear();
    d2F_.assign(N, {});
    for (int k = 0; k < N; ++k)
        dF_.push_back(F_.derivative(k));
    for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l)
            d2F_[k].push_back(dF_[k].derivative(l));
    // Delta_S K = Delta F - x^T D^2F x - n x.grad F on |x| = 1
    G_ = Polynomial(N);
    for (int k = 0; k < N; ++k) {
        G_ += d2F_[k][k];
        G_ += dF_[k].times_coordinate(k) * (-(double)n_);
        for (int l = 0; l < N; ++l)
            G_ += d2F_[k][l].times_coordinate(k).times_coordinate(l) * -1.0;
    }
    dG_.clear();
    for (int k = 0; k < N; ++k)
        dG_.push_back(G_.derivative(k));
    if (check_positive && !(lower_bound() > 0.0))
        throw Error(ErrorKind::InvalidInput, "curvature field is not positive on the sphere");
}

double CurvatureField::lower_bound() const
{
    if (family_ == FieldFamily::Affine) {
        double s = 0;
        for (size_t i = 1; i < coeffs_.size(); ++i)
            s += coeffs_[i] * coeffs_[i];
        return coeffs_[0] - std::sqrt(s);
    }
    if (family_ == FieldFamily::Quadratic)
        return coeffs_[0] + *std::min_element(coeffs_.begin() + 1, coeffs_.end());
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> g;
    double m = 1e300;
    Vec x(n_ + 1);
    for (int s = 0; s < 20000; ++s) {
        for (int i = 0; i <= n_; ++i)
            x[i] = g(rng);
        x.normalize();
        m = std::min(m, F_(x));
    }
    return m;
}

CurvatureField CurvatureField::from_json_text(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("bad curvature JSON: ") + e.what());
    }
    if (!j.contains("family"))
        throw Error(ErrorKind::InvalidInput, "curvature JSON needs a family");
    std::string fam = j["family"];
    if (fam == "affine" || fam == "quadratic") {
        std::vector<double> c = j.at("coeffs").get<std::vector<double>>();
        if (c.size() < 5)
            throw Error(ErrorKind::InvalidInput, "too few coefficients");
        Vec v(c.size() - 1);
        for (size_t i = 1; i < c.size(); ++i)
            v[i - 1] = c[i];
        return fam == "affine" ? affine(c[0], v) : quadratic(c[0], v);
    }
    if (fam == "polynomial") {
        const auto& terms = j.at("terms");
        if (!terms.is_array() || terms.empty())
            throw Error(ErrorKind::InvalidInput, "polynomial needs terms");
        int dim = (int)terms[0].at("exp").size();
        Polynomial p(dim);
        for (const auto& t : terms)
            p.add_term(t.at("exp").get<std::vector<int>>(), t.at("coef").get<double>());
        return polynomial(p);
    }
    throw Error(ErrorKind::InvalidInput, "unknown curvature family " + fam);
}

CurvatureField CurvatureField::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::InvalidInput, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string CurvatureField::to_json_text() const
{
    nlohmann::json j;
    if (family_ == FieldFamily::Polynomial) {
        j["family"] = "polynomial";
        j["terms"] = nlohmann::json::array();
        for (const auto& [e, c] : F_.terms())
            j["terms"].push_back({{"coef", c}, {"exp", e}});
    } else {
        j["family"] = family_ == FieldFamily::Affine ? "affine" : "quadratic";
        j["coeffs"] = coeffs_;
    }
    return j.dump();
}

KJet k_jet(const CurvatureField& K, const Vec& x)
{
    check_point(x);
    const int N = K.n() + 1;
    if (x.size() != N)
        throw Error(ErrorKind::DimensionMismatch, "point dimension does not match K");
    KJet j;
    j.frame = chart(x);
    j.value = K(x);
    Vec g(N), gG(N);
    Mat D(N, N);
    for (int k = 0; k < N; ++k) {
        g[k] = K.dF()[k](x);
        gG[k] = K.dG()[k](x);
        for (int l = 0; l < N; ++l)
            D(k, l) = K.d2F()[k][l](x);
    }
    double radial = x.dot(g);
    j.grad = project_tangent(x, g);
    j.hess = j.frame.basis.transpose() * D * j.frame.basis;
    j.hess -= radial * Mat::Identity(K.n(), K.n());
    j.hess = 0.5 * (j.hess + j.hess.transpose());
    j.lap = K.lap_extension()(x);
    j.grad_lap = project_tangent(x, gG);
    return j;
}

// ---------------------------------------------------------- critical points

static bool newton_to_critical(const CurvatureField& K, Vec& x)
{
    for (int it = 0; it < 80; ++it) {
        KJet j = k_jet(K, x);
        Vec g = j.grad_local();
        double scale = std::max(1.0, std::abs(j.value));
        if (g.norm() < 1e-13 * scale)
            return true;
        Eigen::FullPivLU<Mat> lu(j.hess);
        Vec d;
        if (lu.rank() == j.hess.rows())
            d = -lu.solve(g);
        else
            d = -g;
        double len = d.norm();
        if (len > 0.5)
            d *= 0.5 / len;
        x = exp_map(x, j.frame.to_ambient(d));
    }
    KJet j = k_jet(K, x);
    return j.grad.norm() < 1e-10 * std::max(1.0, std::abs(j.value));
}

CriticalInventory find_critical_points(const CurvatureField& K, int max_seeds)
{
    const int n = K.n();
    long seeds = 1;
    for (int i = 0; i < n; ++i)
        seeds *= 4;
    seeds = std::min<long>(seeds, max_seeds);
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> gauss;
    std::vector<Vec> found;
    auto add = [&](const Vec& x) {
        for (const auto& y : found)
            if ((x - y).norm() < 1e-6)
                return;
        found.push_back(x);
    };
    // coordinate poles first: they catch the symmetric critical sets exactly
    for (int k = 0; k <= n; ++k)
        for (double s : {1.0, -1.0}) {
            Vec x = pole(n, k, s);
            if (newton_to_critical(K, x))
                add(x);
        }
    for (long s = 0; s < seeds; ++s) {
        Vec x(n + 1);
        for (int i = 0; i <= n; ++i)
            x[i] = gauss(rng);
        x.normalize();
        if (newton_to_critical(K, x))
            add(x);
    }
    CriticalInventory inv;
    int euler = 0;
    for (const auto& x : found) {
        KJet j = k_jet(K, x);
        Eigen::SelfAdjointEigenSolver<Mat> es(j.hess);
        CriticalPoint c;
        c.location = x;
        c.value = j.value;
        c.lap = j.lap;
        c.min_abs_eig = es.eigenvalues().cwiseAbs().minCoeff();
        for (int i = 0; i < n; ++i)
            if (es.eigenvalues()[i] < 0)
                ++c.morse_index;
        if (c.min_abs_eig < 1e-8)
            throw Error(ErrorKind::NotMorse, "singular Hessian at a critical point");
        c.is_blowup_candidate = c.lap < 0.0;
        euler += (c.morse_index % 2 == 0) ? 1 : -1;
        inv.points.push_back(c);
    }
    if (inv.points.empty())
        throw Error(ErrorKind::NotMorse, "no isolated critical points found");
    std::sort(inv.points.begin(), inv.points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        for (int i = 0; i < a.location.size(); ++i) {
            double x = std::round(a.location[i] * 1e9), y = std::round(b.location[i] * 1e9);
            if (x != y)
                return x > y;
        }
        return false;
    });
    int chi = 1 + (n % 2 == 0 ? 1 : -1);
    if (euler != chi) {
        inv.incomplete = true;
        inv.warning = "IncompleteSearch: Morse count " + std::to_string(euler) + " != Euler characteristic "
            + std::to_string(chi);
    }
    return inv;
}

NondegeneracyReport check_nondegeneracy(const CurvatureField& K, int q)
{
    NondegeneracyReport rep;
    CriticalInventory inv = find_critical_points(K);
    if (inv.incomplete)
        rep.lines.push_back(inv.warning);
    std::vector<CriticalPoint> cand;
    for (size_t i = 0; i < inv.points.size(); ++i) {
        const auto& c = inv.points[i];
        std::ostringstream os;
        os << "critical point " << i << ": index " << c.morse_index << ", K = " << c.value << ", lap K = " << c.lap;
        if (std::abs(c.lap) < 1e-10) {
            rep.nondegenerate = false;
            os << "  DEGENERATE (lap K = 0)";
        }
        rep.lines.push_back(os.str());
        if (c.lap < 0)
            cand.push_back(c);
    }
    if (K.n() != 4)
        return rep;
    const int k = (int)cand.size();
    if (k > 20)
        throw Error(ErrorKind::InvalidInput, "too many candidate points for subset enumeration");
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        if (__builtin_popcount(mask) > q)
            continue;
        std::vector<CriticalPoint> pts;
        NondegeneracyReport::Subset s;
        for (int i = 0; i < k; ++i)
            if (mask & (1u << i)) {
                pts.push_back(cand[i]);
                s.indices.push_back(i);
            }
        InteractionMatrix M = interaction_matrix(pts, K);
        s.least_eig = M.least_eig;
        s.positive_eigvec = M.eigvec_one_signed;
        if (std::abs(M.least_eig) < 1e-10)
            rep.nondegenerate = false;
        std::ostringstream os;
        os << "subset {";
        for (size_t i = 0; i < s.indices.size(); ++i)
            os << (i ? "," : "") << s.indices[i];
        os << "}: least eigenvalue " << s.least_eig << (s.positive_eigvec ? ", one-signed eigenvector" : ", mixed eigenvector");
        rep.lines.push_back(os.str());
        rep.subsets.push_back(s);
    }
    return rep;
}

QuadratureGrid quadrature_grid(int n, int level)
{
    require_dimension(n, 3, 10);
    if (level < 1)
        throw Error(ErrorKind::InvalidInput, "grid level must be >= 1");
    const SphereRule& r = sphere_rule(n, 2 * level + 2);
    QuadratureGrid g;
    g.n = n;
    g.level = level;
    g.nodes = r.points;
    g.weights = r.weights;
    return g;
}

} // namespace nirenberg
