#include "nirenberg/quadrature.hpp"

#include "nirenberg/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <mutex>

namespace nirenberg {

Rule1D gauss_gegenbauer(int m, double a)
{
    if (m < 1 || a <= -1.0)
        throw Error(ErrorKind::InvalidInput, "bad Gauss rule request");
    // monic recurrence for symmetric Jacobi: alpha_k = 0,
    // beta_k = k(k+2a)/((2k+2a+1)(2k+2a-1))
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int k = 1; k < m; ++k) {
        double b = k * (k + 2.0 * a) / ((2.0 * k + 2.0 * a + 1.0) * (2.0 * k + 2.0 * a - 1.0));
        J(k, k - 1) = J(k - 1, k) = std::sqrt(b);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    double mu0 = std::sqrt(M_PI) * std::tgamma(a + 1.0) / std::tgamma(a + 1.5);
    Rule1D r;
    r.nodes = es.eigenvalues();
    r.weights.resize(m);
    for (int i = 0; i < m; ++i)
        r.weights[i] = mu0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    // symmetrize to kill eigensolver asymmetry
    for (int i = 0; i < m / 2; ++i) {
        int j = m - 1 - i;
        double x = 0.5 * (r.nodes[j] - r.nodes[i]);
        double w = 0.5 * (r.weights[i] + r.weights[j]);
        r.nodes[i] = -x;
        r.nodes[j] = x;
        r.weights[i] = r.weights[j] = w;
    }
    if (m % 2 == 1)
        r.nodes[m / 2] = 0.0;
    return r;
}

double sphere_area(int m)
{
    double h = 0.5 * (m + 1);
    return 2.0 * std::pow(M_PI, h) / std::tgamma(h);
}

static SphereRule build_rule(int m, int degree)
{
    SphereRule r;
    r.degree = degree;
    if (m == 1) {
        int N = degree + 1;
        r.points.resize(2, N);
        r.weights = Eigen::VectorXd::Constant(N, 2.0 * M_PI / N);
        for (int i = 0; i < N; ++i) {
            double t = 2.0 * M_PI * i / N;
            r.points(0, i) = std::cos(t);
            r.points(1, i) = std::sin(t);
        }
        return r;
    }
    const SphereRule& sub = sphere_rule(m - 1, degree);
    Rule1D g = gauss_gegenbauer(degree / 2 + 1, 0.5 * (m - 2));
    int N = (int)g.nodes.size() * (int)sub.weights.size();
    r.points.resize(m + 1, N);
    r.weights.resize(N);
    int c = 0;
    for (int i = 0; i < g.nodes.size(); ++i) {
        double t = g.nodes[i], s = std::sqrt(1.0 - t * t);
        for (int j = 0; j < sub.weights.size(); ++j, ++c) {
            r.points.col(c).head(m) = s * sub.points.col(j);
            r.points(m, c) = t;
            r.weights[c] = g.weights[i] * sub.weights[j];
        }
    }
    return r;
}

const SphereRule& sphere_rule(int m, int degree)
{
    static std::map<std::pair<int, int>, SphereRule> cache;
    static std::recursive_mutex mu;
    std::lock_guard<std::recursive_mutex> lock(mu);
    if (m < 1)
        throw Error(ErrorKind::UnsupportedDimension, "sphere rule needs m >= 1");
    auto key = std::make_pair(m, std::max(degree, 0));
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;
    SphereRule r = build_rule(m, key.second);
    return cache.emplace(key, std::move(r)).first->second;
}

double radial_integral(const std::function<double(double)>& f, int n, double tol)
{
    // decay check: r^n f(r) must vanish at infinity
    double t1 = std::abs(f(1e3)) * std::pow(1e3, n), t2 = std::abs(f(1e6)) * std::pow(1e6, n);
    if (!std::isfinite(t1) || !std::isfinite(t2) || (t2 > 1e-3 && t2 >= 0.5 * t1))
        throw Error(ErrorKind::Divergent, "integrand decay exponent does not exceed n");
    auto g = [&](double s) {
        if (s >= M_PI_2)
            return 0.0;
        double r = std::tan(s), c = std::cos(s);
        return f(r) * std::pow(r, n - 1) / (c * c);
    };
    double err = 0.0;
    double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, M_PI_2, 20, tol, &err);
    if (!std::isfinite(I) || err > 100.0 * tol * std::max(1.0, std::abs(I)))
        throw Error(ErrorKind::NonConvergent, "adaptive radial quadrature stalled");
    return sphere_area(n - 1) * I;
}

} // namespace nirenberg
