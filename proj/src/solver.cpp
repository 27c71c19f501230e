#include "nirenberg/solver.hpp"

#include "nirenberg/constants.hpp"
#include "nirenberg/errors.hpp"

#include <cmath>
#include <sstream>

namespace nirenberg {

InteractionMatrix interaction_matrix(const std::vector<CriticalPoint>& points, const CurvatureField& K)
{
    if (K.n() != 4)
        throw Error(ErrorKind::DimensionMismatch, "interaction matrix is defined for n = 4");
    if (points.empty())
        throw Error(ErrorKind::InvalidInput, "no points");
    const int k = (int)points.size();
    const double c2 = constant("tilde_c2", 4), c4 = constant("tilde_c4", 4);
    InteractionMatrix M;
    M.points = points;
    M.entries.resize(k, k);
    std::vector<KJet> jets;
    for (const auto& p : points)
        jets.push_back(k_jet(K, p.location));
    for (int i = 0; i < k; ++i) {
        M.entries(i, i) = -c2 * jets[i].lap / (jets[i].value * jets[i].value);
        for (int j = i + 1; j < k; ++j) {
            double d2 = green_kernel(points[i].location, points[j].location);
            double v = -c4 / (d2 * std::sqrt(jets[i].value * jets[j].value));
            M.entries(i, j) = M.entries(j, i) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(M.entries);
    M.least_eig = es.eigenvalues()[0];
    M.eigvec = es.eigenvectors().col(0);
    if (M.eigvec.sum() < 0)
        M.eigvec = -M.eigvec;
    M.eigvec_one_signed = (M.eigvec.array() > 0).all();
    return M;
}

SigmaResult sigma_solve(const std::vector<CriticalPoint>& points, const CurvatureField& K, const std::optional<Vec>& init)
{
    InteractionMatrix M = interaction_matrix(points, K);
    if (!(M.least_eig > 0))
        throw Error(ErrorKind::NoSolution, "interaction matrix is not positive definite");
    const int k = (int)points.size();
    const double c1 = constant("tilde_c1", 4);
    Vec Kv(k);
    for (int i = 0; i < k; ++i)
        Kv[i] = K(points[i].location);
    // convex potential in t = 1/sigma: G(t) = t.Mt/2 - c1 sum ln(t_j)/K_j
    auto G = [&](const Vec& t) {
        double s = 0.5 * t.dot(M.entries * t);
        for (int j = 0; j < k; ++j)
            s -= c1 * std::log(t[j]) / Kv[j];
        return s;
    };
    auto grad = [&](const Vec& t) {
        Vec g = M.entries * t;
        for (int j = 0; j < k; ++j)
            g[j] -= c1 / (Kv[j] * t[j]);
        return g;
    };
    auto hess = [&](const Vec& t) {
        Mat H = M.entries;
        for (int j = 0; j < k; ++j)
            H(j, j) += c1 / (Kv[j] * t[j] * t[j]);
        return H;
    };
    Vec t = init ? Vec(init->cwiseInverse()) : Vec(Vec::Ones(k));
    if ((t.array() <= 0).any())
        throw Error(ErrorKind::InvalidInput, "initial sigma must be positive");
    SigmaResult r;
    auto scale = [&](const Vec& t) {
        double s = (M.entries * t).cwiseAbs().maxCoeff();
        for (int j = 0; j < k; ++j)
            s = std::max(s, c1 / (Kv[j] * t[j]));
        return s;
    };
    for (int it = 0; it < 200; ++it) {
        r.iterations = it;
        Vec g = grad(t);
        if (g.cwiseAbs().maxCoeff() < 1e-14 * scale(t))
            break;
        Vec d = -hess(t).ldlt().solve(g);
        double step = 1.0, g0 = G(t);
        // inside the quadratic basin the Armijo test only sees rounding: take full steps
        bool basin = -g.dot(d) < 1e-8 * (1.0 + std::abs(g0)) && ((t + d).array() > 0).all();
        while (!basin && step > 1e-12) {
            Vec tn = t + step * d;
            if ((tn.array() > 0).all() && G(tn) <= g0 + 1e-4 * step * g.dot(d))
                break;
            step *= 0.5;
        }
        if (step <= 1e-12) {
            // G is flat to rounding here; take the Newton step if it still shrinks the gradient
            Vec tn = t + d;
            if (!(tn.array() > 0).all() || !(grad(tn).norm() < g.norm()))
                break;
            step = 1.0;
        }
        t += step * d;
    }
    r.sigma = t.cwiseInverse();
    Vec lhs(k), rhs = M.entries * t;
    for (int j = 0; j < k; ++j)
        lhs[j] = c1 * r.sigma[j] / Kv[j];
    r.residual = (lhs - rhs).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Mat> es(hess(t));
    r.min_hess_eig = es.eigenvalues()[0];
    if (!(r.residual < 1e-10 * std::max(1.0, lhs.cwiseAbs().maxCoeff())))
        throw Error(ErrorKind::NonConvergence, "sigma system did not converge");
    return r;
}

double theta_normalization(int n, double tau, const std::vector<double>& lambda, const std::vector<double>& Kval,
                           const std::vector<double>& lapK, const std::vector<double>& corr)
{
    const double p = (n + 2.0) / (n - 2.0) - tau, th = 0.5 * (n - 2) * tau;
    const double c0 = constant("bar_c0", n), c1 = constant("bar_c1", n), c2 = constant("bar_c2", n);
    double s = 0;
    for (size_t i = 0; i < lambda.size(); ++i) {
        double lt = std::exp(th * std::log(lambda[i]));
        s += std::pow(lt / Kval[i], 2.0 / (p - 1.0)) * std::pow(1.0 + corr[i], p + 1.0)
            * (c0 + c1 * tau + c2 * lapK[i] / (Kval[i] * lambda[i] * lambda[i]));
    }
    return std::pow(s, -1.0 / (p + 1.0));
}

CriticalPrediction predict(const std::vector<CriticalPoint>& points, double tau, const CurvatureField& K)
{
    const int n = K.n();
    require_dimension(n, 4, 10);
    if (!(tau > 0))
        throw Error(ErrorKind::InvalidInput, "predict needs tau > 0");
    if (points.empty())
        throw Error(ErrorKind::InvalidInput, "no points");
    CriticalPrediction out;
    const int q = (int)points.size();
    std::vector<KJet> jets;
    for (const auto& c : points) {
        KJet j = k_jet(K, c.location);
        if (j.grad.norm() > 1e-8)
            throw Error(ErrorKind::NotBlowupCandidate, "point is not critical");
        if (!(j.lap < 0))
            throw Error(ErrorKind::NotBlowupCandidate, "Laplacian of K is not negative at the point");
        jets.push_back(j);
    }
    std::vector<double> lam(q);
    if (n == 4) {
        SigmaResult s = sigma_solve(points, K);
        out.sigma = s.sigma;
        for (int j = 0; j < q; ++j)
            lam[j] = s.sigma[j] / std::sqrt(tau);
    } else {
        double ratio = constant("tilde_c2", n) / constant("tilde_c1", n);
        for (int j = 0; j < q; ++j)
            lam[j] = std::sqrt(ratio * (-jets[j].lap / jets[j].value) / tau);
    }
    const double p = (n + 2.0) / (n - 2.0) - tau, th = 0.5 * (n - 2) * tau;
    const double ratio_a = constant("check_c4", n) / constant("check_c3", n);
    // alpha corrections from the lower-bound displays (H = 0 on the sphere)
    double num = 0, den = 0;
    for (int j = 0; j < q; ++j) {
        num += jets[j].lap / (jets[j].value * jets[j].value * lam[j] * lam[j]);
        den += 1.0 / jets[j].value;
    }
    std::vector<double> Kv(q), lap(q), corr(q);
    for (int j = 0; j < q; ++j) {
        PointPrediction pp;
        pp.x = points[j].location;
        pp.lambda = lam[j];
        pp.a_shift = -ratio_a * jets[j].hess.ldlt().solve(jets[j].grad_lap_local()) / (lam[j] * lam[j]);
        pp.a = exp_map(pp.x, jets[j].frame.to_ambient(pp.a_shift));
        double bracket = jets[j].lap / (jets[j].value * lam[j] * lam[j]) - num / den;
        pp.correction = n == 4 ? bracket / 8.0 : (n == 5 ? -bracket / 90.0 : 0.0);
        KJet ja = k_jet(K, pp.a);
        Kv[j] = ja.value;
        lap[j] = ja.lap;
        corr[j] = pp.correction;
        out.points.push_back(pp);
    }
    out.Theta = theta_normalization(n, tau, lam, Kv, lap, corr);
    out.config.n = n;
    out.config.tau = tau;
    for (int j = 0; j < q; ++j) {
        auto& pp = out.points[j];
        double lt = std::exp(th * std::log(lam[j]));
        pp.alpha = out.Theta * std::pow(lt / Kv[j], 1.0 / (p - 1.0)) * (1.0 + pp.correction);
        Entry e;
        e.alpha = pp.alpha;
        e.bubble = {pp.a, pp.lambda};
        out.config.entries.push_back(e);
    }
    return out;
}

const char* refine_status_name(RefineStatus s)
{
    switch (s) {
    case RefineStatus::Converged: return "Converged";
    case RefineStatus::NonConvergence: return "NonConvergence";
    case RefineStatus::LeftRegime: return "LeftRegime";
    }
    return "?";
}

namespace {

struct Param {
    std::vector<Vec> base;
    std::vector<TangentFrame> frames;
};

Configuration assemble(const Configuration& tmpl, const Param& P, const Vec& z)
{
    const int n = tmpl.n;
    Configuration c = tmpl;
    for (int j = 0; j < c.q(); ++j) {
        const double* v = z.data() + j * (n + 2);
        c.entries[j].alpha = v[0];
        c.entries[j].bubble.lambda = std::exp(v[1]);
        Vec y = Eigen::Map<const Vec>(v + 2, n);
        c.entries[j].bubble.a = exp_map(P.base[j], P.frames[j].to_ambient(y));
    }
    return c;
}

Vec residual_in(const Configuration& c, const CurvatureField& K, const Param& P)
{
    const int n = c.n, q = c.q();
    ReducedGradient g = reduced_gradient(c, K);
    Vec F(q * (n + 2) + 1);
    for (int j = 0; j < q; ++j) {
        F[j * (n + 2)] = g.entries[j].g_alpha;
        F[j * (n + 2) + 1] = g.entries[j].g_lambda;
        F.segment(j * (n + 2) + 2, n) = P.frames[j].basis.transpose() * g.entries[j].g_a;
    }
    F[q * (n + 2)] = k_tau_leading(c, K) - 1.0;
    return F;
}

} // namespace

Vec refine_residual(const Configuration& c, const CurvatureField& K)
{
    Param P;
    for (const auto& e : c.entries) {
        P.base.push_back(e.bubble.a);
        P.frames.push_back(chart(e.bubble.a));
    }
    return residual_in(c, K, P);
}

RefineResult newton_refine(const Configuration& start, const CurvatureField& K, const RefineOptions& opt)
{
    start.validate();
    const int n = start.n, q = start.q(), N = q * (n + 2);
    RefineResult res;
    Configuration cur = start;
    auto in_regime = [&](const Configuration& c, std::string& why) {
        for (int i = 0; i < q; ++i) {
            const auto& b = c.entries[i].bubble;
            if (!(1.0 / b.lambda < opt.regime_eps) || !(b.lambda < 1e6)) {
                why = "lambda left the admissible range";
                return false;
            }
            if (!(c.entries[i].alpha > 0)) {
                why = "alpha became nonpositive";
                return false;
            }
            if (geodesic_distance(b.a, start.entries[i].bubble.a) > opt.max_center_move) {
                why = "center moved too far";
                return false;
            }
            for (int j = i + 1; j < q; ++j) {
                const auto& bj = c.entries[j].bubble;
                if (!(epsilon(n, b, bj) < opt.regime_eps)) {
                    why = "interaction left V(q, eps)";
                    return false;
                }
                // two slots collapsing onto one bubble is not a q-bubble configuration
                if (std::abs(std::log(b.lambda / bj.lambda)) < 1e-3 && b.lambda * geodesic_distance(b.a, bj.a) < 1e-3) {
                    why = "slots merged";
                    return false;
                }
            }
        }
        return true;
    };
    {
        std::string why;
        if (!in_regime(start, why)) {
            res.config = start;
            res.status = RefineStatus::LeftRegime;
            res.message = "start outside the regime: " + why;
            res.residual = refine_residual(start, K).norm();
            return res;
        }
    }
    for (int it = 0; it <= opt.max_iterations; ++it) {
        res.iterations = it;
        Param P;
        Vec z(N);
        for (int j = 0; j < q; ++j) {
            P.base.push_back(cur.entries[j].bubble.a);
            P.frames.push_back(chart(cur.entries[j].bubble.a));
            z[j * (n + 2)] = cur.entries[j].alpha;
            z[j * (n + 2) + 1] = std::log(cur.entries[j].bubble.lambda);
            z.segment(j * (n + 2) + 2, n).setZero();
        }
        Vec F = residual_in(cur, K, P);
        res.residual = F.norm();
        res.config = cur;
        if (!std::isfinite(res.residual)) {
            res.status = RefineStatus::NonConvergence;
            res.message = "non-finite residual";
            return res;
        }
        if (it == opt.max_iterations && !(res.residual < opt.tol))
            break;
        Mat J(F.size(), N);
        for (int i = 0; i < N; ++i) {
            double h = 1e-6 * std::max(1.0, std::abs(z[i]));
            Vec zp = z, zm = z;
            zp[i] += h;
            zm[i] -= h;
            J.col(i) = (residual_in(assemble(cur, P, zp), K, P) - residual_in(assemble(cur, P, zm), K, P)) / (2 * h);
        }
        Vec d = J.colPivHouseholderQr().solve(-F);
        // a small residual only counts once the Newton step is small too: with no
        // zero nearby the gradient can decay like 1/lambda^2 while lambda drifts
        if (res.residual < opt.tol && d.lpNorm<Eigen::Infinity>() < 1e-4) {
            res.status = RefineStatus::Converged;
            return res;
        }
        if (it == opt.max_iterations)
            break;
        double step = 1.0;
        bool accepted = false;
        Configuration next;
        while (step > 1e-6) {
            Vec zn = z + step * d;
            bool ok = true;
            for (int j = 0; j < q; ++j) {
                // a wild log-lambda step under/overflows to a non-bubble
                double l = std::exp(zn[j * (n + 2) + 1]);
                ok = ok && zn[j * (n + 2)] > 0 && l > 0 && std::isfinite(l);
            }
            if (ok) {
                next = assemble(cur, P, zn);
                Vec Fn = residual_in(next, K, P);
                if (std::isfinite(Fn.norm()) && Fn.norm() < (1.0 - 1e-4 * step) * res.residual) {
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.status = RefineStatus::NonConvergence;
            res.message = "line search failed";
            return res;
        }
        std::string why;
        if (!in_regime(next, why)) {
            res.config = next;
            res.status = RefineStatus::LeftRegime;
            res.message = why;
            res.residual = refine_residual(next, K).norm();
            return res;
        }
        cur = next;
    }
    res.status = RefineStatus::NonConvergence;
    res.message = "iteration limit reached";
    return res;
}

Certificate residual_certificate(const Configuration& c, const CurvatureField& K)
{
    Aggregates g = aggregates(c, K);
    const int n = c.n, q = c.q();
    const double p = c.p(), A = g.alpha_K_tau(p + 1.0);
    Certificate cert;
    cert.lower_bound = c.tau;
    cert.upper_bound = c.tau;
    bool window = c.tau > 0;
    for (int r = 0; r < q; ++r) {
        const auto& e = c.entries[r];
        double l = e.bubble.lambda;
        double bal = std::abs(1.0 - g.alpha_sq / A * g.jets[r].value / g.lambda_theta[r] * std::pow(e.alpha, p - 1.0));
        double gk = g.jets[r].grad.norm();
        cert.lower_bound += gk / l + 1.0 / (l * l) + bal;
        cert.upper_bound += gk / l + 1.0 / (l * l) + std::pow(l, -(n - 2.0)) + bal;
        if (gk > 10.0 / (l * l) || bal > 10.0 / (l * l) || !(g.jets[r].lap < 0))
            window = false;
        if (c.tau > 0 && g.jets[r].lap < 0 && n >= 5) {
            double pred = constant("tilde_c2", n) / constant("tilde_c1", n) * (-g.jets[r].lap / g.jets[r].value) / c.tau;
            double s = l * l / pred;
            if (s < 0.5 || s > 2.0)
                window = false;
        }
        for (int s = 0; s < q; ++s) {
            if (s == r)
                continue;
            double eps = epsilon(n, e.bubble, c.entries[s].bubble);
            cert.lower_bound += eps;
            cert.upper_bound += std::pow(eps, (n + 2.0) / (2.0 * n));
            if (eps > 10.0 * c.tau)
                window = false;
        }
    }
    cert.gradient_norm = reduced_gradient(c, K).norm();
    cert.ratio = cert.gradient_norm / cert.lower_bound;
    cert.admissible_window = window;
    cert.notes.push_back(window ? "admissible window: conditions (i)-(iv) hold" : "outside the admissible window");
    return cert;
}

} // namespace nirenberg
