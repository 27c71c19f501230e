#include "nirenberg/expansion.hpp"

#include "nirenberg/constants.hpp"
#include "nirenberg/errors.hpp"

#include <cmath>
#include <sstream>

namespace nirenberg {

double Aggregates::alpha_K_tau(double s) const
{
    double t = 0;
    for (size_t i = 0; i < alphas.size(); ++i)
        t += jets[i].value * std::pow(alphas[i], s) / lambda_theta[i];
    return t;
}

Aggregates aggregates(const Configuration& c, const CurvatureField& K)
{
    c.validate();
    if (K.n() != c.n)
        throw Error(ErrorKind::DimensionMismatch, "K dimension does not match configuration");
    Aggregates g;
    for (const auto& e : c.entries) {
        g.alphas.push_back(e.alpha);
        g.alpha_sq += e.alpha * e.alpha;
        g.jets.push_back(k_jet(K, e.bubble.a));
        g.lambda_theta.push_back(std::exp(c.theta() * std::log(e.bubble.lambda)));
    }
    return g;
}

MembershipReport v_membership(const Configuration& c, const CurvatureField& K, double eps, double r, double k_tau)
{
    Aggregates g = aggregates(c, K);
    MembershipReport rep;
    const int n = c.n;
    auto fail = [&](const std::string& s) {
        rep.member = false;
        rep.diagnostics.push_back(s);
    };
    for (int i = 0; i < c.q(); ++i) {
        const auto& b = c.entries[i].bubble;
        if (!(1.0 / b.lambda < eps))
            fail("lambda too small at entry " + std::to_string(i));
        if (!(std::pow(b.lambda, c.tau) < 1.0 + eps))
            fail("lambda^tau too large at entry " + std::to_string(i));
        for (int j = i + 1; j < c.q(); ++j)
            if (!(epsilon(n, b, c.entries[j].bubble) < eps))
                fail("interaction too strong between entries " + std::to_string(i) + " and " + std::to_string(j));
    }
    double rr = r, kk = k_tau;
    if (rr <= 0 || kk <= 0) {
        double c0 = constant("bar_c0", n);
        rr = 4.0 * n * (n - 1.0) * c0 * g.alpha_sq;
        kk = c0 * g.alpha_K_tau(2.0 * n / (n - 2.0));
    }
    for (int i = 0; i < c.q(); ++i) {
        double a = c.entries[i].alpha;
        double d = 1.0 - rr * std::pow(a, 4.0 / (n - 2)) * g.jets[i].value / (4.0 * n * (n - 1.0) * kk);
        if (!(std::abs(d) < eps)) {
            std::ostringstream os;
            os << "alpha balance off by " << d << " at entry " << i;
            fail(os.str());
        }
    }
    return rep;
}

double reduced_energy(const Configuration& c, const CurvatureField& K)
{
    Aggregates g = aggregates(c, K);
    const int n = c.n, q = c.q();
    const double p = c.p(), tau = c.tau;
    const double A = g.alpha_K_tau(p + 1.0);
    double self = constant("hat_c1", n) * tau;
    for (int i = 0; i < q; ++i) {
        const auto& e = c.entries[i];
        double w = g.jets[i].value * std::pow(e.alpha, p + 1.0) / g.lambda_theta[i] / A;
        self += constant("hat_c2", n) * w * g.jets[i].lap / (g.jets[i].value * e.bubble.lambda * e.bubble.lambda);
    }
    double inter_r = 0, inter_k = 0;
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
            if (i == j)
                continue;
            double eps = epsilon(n, c.entries[i].bubble, c.entries[j].bubble);
            double ai = c.entries[i].alpha, aj = c.entries[j].alpha;
            inter_r += ai * aj * eps / g.alpha_sq;
            inter_k += g.jets[i].value * std::pow(ai, p) * aj / g.lambda_theta[i] * eps / A;
        }
    const double hb = constant("hat_b1", n);
    double bracket = 1.0 - 2.0 / (p + 1.0) * self + 0.5 * hb * inter_r - hb * inter_k;
    return hat_c0(n, tau) * g.alpha_sq / std::pow(A, 2.0 / (p + 1.0)) * bracket;
}

double lambda_pairing_factor()
{
    return 2.0;
}

double a_pairing_factor(int n)
{
    return std::pow(constant("bar_c0", n), -(n - 2.0) / n);
}

namespace {

double prefactor(const Configuration& c, const Aggregates& g, int j)
{
    const int n = c.n;
    return c.entries[j].alpha / std::pow(g.alpha_K_tau(2.0 * n / (n - 2.0)), (n - 2.0) / n);
}

void check_slot(const Configuration& c, int j)
{
    if (j < 0 || j >= c.q())
        throw Error(ErrorKind::InvalidInput, "entry index out of range");
}

double grad_alpha_impl(const Configuration& c, const Aggregates& g, int j)
{
    const int n = c.n, q = c.q();
    const double p = c.p();
    const auto& ej = c.entries[j];
    double A = g.alpha_K_tau(p + 1.0);
    double t0 = 1.0 - g.alpha_sq / A * g.jets[j].value / g.lambda_theta[j] * std::pow(ej.alpha, p - 1.0);
    auto x = [&](int k) {
        double l = c.entries[k].bubble.lambda;
        return g.jets[k].lap / (g.jets[k].value * l * l);
    };
    double mean = 0;
    for (int k = 0; k < q; ++k)
        mean += x(k) * c.entries[k].alpha * c.entries[k].alpha / g.alpha_sq;
    double t2 = x(j) - mean;
    double all = 0, mine = 0;
    for (int k = 0; k < q; ++k)
        for (int l = 0; l < q; ++l) {
            if (k == l)
                continue;
            double e = epsilon(n, c.entries[k].bubble, c.entries[l].bubble);
            all += c.entries[k].alpha * c.entries[l].alpha / g.alpha_sq * e;
            if (l == j)
                mine += c.entries[k].alpha / ej.alpha * e;
        }
    double br = constant("grave_c0", n) * t0 - constant("grave_c2", n) * t2 + constant("grave_b1", n) * (all - mine);
    return prefactor(c, g, j) * br;
}

double grad_lambda_impl(const Configuration& c, const Aggregates& g, int j)
{
    const int n = c.n;
    const auto& ej = c.entries[j];
    double l = ej.bubble.lambda;
    double br = constant("tilde_c1", n) * c.tau + constant("tilde_c2", n) * g.jets[j].lap / (g.jets[j].value * l * l);
    double inter = 0;
    for (int i = 0; i < c.q(); ++i) {
        if (i == j)
            continue;
        inter += c.entries[i].alpha / ej.alpha * epsilon_derivatives(n, c.entries[i].bubble, ej.bubble).lambda_j_deriv;
    }
    br -= constant("tilde_b2", n) * inter;
    return lambda_pairing_factor() * prefactor(c, g, j) * br;
}

Vec grad_a_impl(const Configuration& c, const Aggregates& g, int j)
{
    const int n = c.n;
    const auto& ej = c.entries[j];
    double l = ej.bubble.lambda, Kj = g.jets[j].value;
    Vec v = constant("check_c3", n) * g.jets[j].grad / (Kj * l) + constant("check_c4", n) * g.jets[j].grad_lap / (Kj * l * l * l);
    for (int i = 0; i < c.q(); ++i) {
        if (i == j)
            continue;
        v += constant("check_b3", n) * c.entries[i].alpha / ej.alpha
            * epsilon_derivatives(n, c.entries[i].bubble, ej.bubble).a_j_deriv;
    }
    return -a_pairing_factor(n) * prefactor(c, g, j) * v;
}

} // namespace

double grad_alpha(const Configuration& c, const CurvatureField& K, int j)
{
    check_slot(c, j);
    return grad_alpha_impl(c, aggregates(c, K), j);
}

double grad_lambda(const Configuration& c, const CurvatureField& K, int j)
{
    check_slot(c, j);
    return grad_lambda_impl(c, aggregates(c, K), j);
}

Vec grad_a(const Configuration& c, const CurvatureField& K, int j)
{
    check_slot(c, j);
    return grad_a_impl(c, aggregates(c, K), j);
}

ReducedGradient reduced_gradient(const Configuration& c, const CurvatureField& K)
{
    Aggregates g = aggregates(c, K);
    ReducedGradient r;
    for (int j = 0; j < c.q(); ++j) {
        EntryGradient e;
        e.g_alpha = grad_alpha_impl(c, g, j);
        e.g_lambda = grad_lambda_impl(c, g, j);
        e.g_a = grad_a_impl(c, g, j);
        e.g_a_local = g.jets[j].frame.to_local(e.g_a);
        r.entries.push_back(e);
    }
    return r;
}

double ReducedGradient::norm() const
{
    double s = 0;
    for (const auto& e : entries)
        s += e.g_alpha * e.g_alpha + e.g_lambda * e.g_lambda + e.g_a.squaredNorm();
    return std::sqrt(s);
}

ErrorBudget error_budget(const Configuration& c, const CurvatureField& K)
{
    Aggregates g = aggregates(c, K);
    const int n = c.n;
    ErrorBudget b;
    b.tau_sq = c.tau * c.tau;
    for (int r = 0; r < c.q(); ++r) {
        double l = c.entries[r].bubble.lambda;
        b.grad_term += g.jets[r].grad.squaredNorm() / (l * l);
        b.lambda4 += std::pow(l, -4.0);
        b.lambda_mass += std::pow(l, -2.0 * (n - 2));
        for (int s = 0; s < c.q(); ++s)
            if (s != r)
                b.interaction += std::pow(epsilon(n, c.entries[r].bubble, c.entries[s].bubble), (n + 2.0) / n);
    }
    b.value = b.tau_sq + b.grad_term + b.lambda4 + b.lambda_mass + b.interaction;
    return b;
}

double k_tau_leading(const Configuration& c, const CurvatureField& K)
{
    Aggregates g = aggregates(c, K);
    const int n = c.n;
    const double p = c.p();
    double c0 = constant("bar_c0", n), c1 = constant("bar_c1", n), c2 = constant("bar_c2", n);
    double k = 0;
    for (int i = 0; i < c.q(); ++i) {
        const auto& e = c.entries[i];
        double l = e.bubble.lambda, Ki = g.jets[i].value;
        k += std::pow(e.alpha, p + 1.0) / g.lambda_theta[i] * (c0 * Ki + c1 * Ki * c.tau + c2 * g.jets[i].lap / (l * l));
    }
    return k;
}

Configuration normalize(const Configuration& c, const CurvatureField& K, double k_tau)
{
    double k = k_tau > 0 ? k_tau : k_tau_leading(c, K);
    double s = std::pow(k, -1.0 / (c.p() + 1.0));
    Configuration out = c;
    for (auto& e : out.entries)
        e.alpha *= s;
    return out;
}

} // namespace nirenberg
