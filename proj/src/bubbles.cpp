#include "nirenberg/bubbles.hpp"

#include "nirenberg/errors.hpp"
#include "nirenberg/oracle.hpp"

#include <cmath>

namespace nirenberg {

void check_bubble(const Bubble& b)
{
    if (!(b.lambda > 0.0))
        throw Error(ErrorKind::NonpositiveLambda, "bubble scale must be positive");
}

double bubble(int n, const Bubble& b, const Vec& x)
{
    check_bubble(b);
    double k = (x - b.a).squaredNorm();
    double D = 1.0 + (4.0 * b.lambda * b.lambda - 1.0) * 0.25 * k;
    return std::pow(b.lambda / D, 0.5 * (n - 2));
}

BubbleJet bubble_jet(int n, const Bubble& b, const Vec& x)
{
    check_bubble(b);
    const double l = b.lambda;
    double k = (x - b.a).squaredNorm();
    double D = 1.0 + (4.0 * l * l - 1.0) * 0.25 * k;
    BubbleJet j;
    j.phi1 = std::pow(l / D, 0.5 * (n - 2));
    j.phi2 = -0.5 * (n - 2) * j.phi1 * (1.0 - (l * l + 0.25) * k) / D;
    Vec px = x - b.a.dot(x) * b.a;
    j.phi3 = (0.25 * (n - 2) * (4.0 * l * l - 1.0) / l * j.phi1 / D) * px;
    return j;
}

double conformal_laplacian_on_bubble(int n, const Bubble& b, const Vec& x)
{
    return 4.0 * n * (n - 1.0) * std::pow(bubble(n, b, x), (n + 2.0) / (n - 2.0));
}

double epsilon(int n, const Bubble& bi, const Bubble& bj)
{
    check_bubble(bi);
    check_bubble(bj);
    double k = (bi.a - bj.a).squaredNorm();
    double s = bj.lambda / bi.lambda + bi.lambda / bj.lambda + bi.lambda * bj.lambda * k;
    return std::pow(s, 0.5 * (2 - n));
}

EpsilonDerivatives epsilon_derivatives(int n, const Bubble& bi, const Bubble& bj)
{
    check_bubble(bi);
    check_bubble(bj);
    const double li = bi.lambda, lj = bj.lambda;
    double k = (bi.a - bj.a).squaredNorm();
    double s = lj / li + li / lj + li * lj * k;
    double sn = std::pow(s, -0.5 * n);
    EpsilonDerivatives d;
    d.lambda_j_deriv = 0.5 * (2 - n) * (lj / li - li / lj + li * lj * k) * sn;
    Vec pa = bi.a - bj.a.dot(bi.a) * bj.a;
    d.a_j_deriv = ((n - 2.0) * li * sn) * pa;
    return d;
}

OracleValue interaction_oracle(int n, const Bubble& bi, const Bubble& bj, InteractionKind kind, int k, double tau,
                               int level, int comp)
{
    if (k < 1 || k > 3)
        throw Error(ErrorKind::InvalidInput, "slot k must be 1, 2 or 3");
    const double p = (n + 2.0) / (n - 2.0) - tau;
    const double theta = 0.5 * (n - 2) * tau;
    const Bubble& target = kind == InteractionKind::Self ? bi : bj;
    TangentFrame fr = chart(target.a);
    Vec dir = fr.basis.col(comp);
    auto slot = [&](const BubbleJet& J) {
        if (k == 1)
            return J.phi1;
        if (k == 2)
            return J.phi2;
        return J.phi3.dot(dir);
    };
    auto f = [&](const Vec& x) {
        double pi = bubble(n, bi, x);
        BubbleJet J = bubble_jet(n, target, x);
        if (kind == InteractionKind::CrossDual) {
            // d_k phi^{(n+2)/(n-2)} = (n+2)/(n-2) phi^{4/(n-2)} d_k phi
            double s = (n + 2.0) / (n - 2.0) * std::pow(J.phi1, 4.0 / (n - 2.0)) * slot(J);
            return std::pow(pi, 1.0 - tau) * s;
        }
        return std::pow(pi, p) * slot(J);
    };
    std::vector<Bubble> bs{bi};
    if (kind != InteractionKind::Self)
        bs.push_back(bj);
    double scale = std::exp(theta * std::log(bi.lambda));
    OracleValue v;
    v.value = scale * integrate_sphere(n, bs, level, f);
    double coarse = scale * integrate_sphere(n, bs, std::max(1, level - 1), f);
    v.error = std::abs(v.value - coarse);
    return v;
}

} // namespace nirenberg
