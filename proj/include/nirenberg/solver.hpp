#pragma once

#include "nirenberg/configuration.hpp"
#include "nirenberg/expansion.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nirenberg {

struct InteractionMatrix {
    std::vector<CriticalPoint> points;
    Mat entries;
    double least_eig = 0;
    Vec eigvec;
    bool eigvec_one_signed = false;
};

InteractionMatrix interaction_matrix(const std::vector<CriticalPoint>& points, const CurvatureField& K);

struct SigmaResult {
    Vec sigma;
    double residual = 0;      // max_j |c1 sigma_j/K_j - [M(1/sigma)]_j|
    double min_hess_eig = 0;  // of the convex potential at the solution
    int iterations = 0;
};

SigmaResult sigma_solve(const std::vector<CriticalPoint>& points, const CurvatureField& K,
                        const std::optional<Vec>& init = std::nullopt);

struct PointPrediction {
    Vec x;            // critical point
    double lambda = 0;
    Vec a_shift;      // local coordinates in chart(x)
    Vec a;            // exp_x(a_shift)
    double alpha = 0;
    double correction = 0;
};

struct CriticalPrediction {
    std::vector<PointPrediction> points;
    double Theta = 0;
    std::optional<Vec> sigma;
    Configuration config; // assembled configuration
};

// Theta from 1 = Theta^{p+1} sum_i (lambda_i^theta/K_i)^{2/(p-1)} (1+corr_i)^{p+1} (c0 + c1 tau + c2 lapK_i/(K_i lambda_i^2))
double theta_normalization(int n, double tau, const std::vector<double>& lambda, const std::vector<double>& Kval,
                           const std::vector<double>& lapK, const std::vector<double>& corr);

CriticalPrediction predict(const std::vector<CriticalPoint>& points, double tau, const CurvatureField& K);

enum class RefineStatus { Converged, NonConvergence, LeftRegime };
const char* refine_status_name(RefineStatus s);

struct RefineOptions {
    int max_iterations = 50;
    double tol = 1e-10;
    double regime_eps = 0.5;     // V(q, eps) membership threshold for lambda and eps_ij
    double max_center_move = 0.5; // geodesic distance from the start
};

struct RefineResult {
    Configuration config;
    RefineStatus status = RefineStatus::NonConvergence;
    double residual = 0;
    int iterations = 0;
    std::string message;
};

// residual vector: reduced gradient (alpha, lambda, a components) and k_hat - 1
Vec refine_residual(const Configuration& c, const CurvatureField& K);

RefineResult newton_refine(const Configuration& start, const CurvatureField& K, const RefineOptions& opt = {});

struct Certificate {
    double lower_bound = 0;
    double gradient_norm = 0;
    double ratio = 0;
    double upper_bound = 0;
    bool admissible_window = false;
    std::vector<std::string> notes;
};

Certificate residual_certificate(const Configuration& c, const CurvatureField& K);

} // namespace nirenberg
