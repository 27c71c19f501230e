#pragma once

#include "nirenberg/configuration.hpp"
#include "nirenberg/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nirenberg {

enum class ScenarioKind { Tower, UnstableCluster, StableCluster, SingleProfile };

const char* scenario_name(ScenarioKind k);
ScenarioKind scenario_from_name(const std::string& s);

struct Scenario {
    ScenarioKind kind = ScenarioKind::Tower;
    int n = 6;
    double tau = 1e-4;
    std::vector<double> ratios;      // lambda_2/lambda_1 (tower)
    std::vector<double> bases;       // lambda_1 sqrt(tau)/sigma
    std::vector<double> separations; // geodesic distance between cluster centers
    std::optional<Vec> center;       // default: first blow-up candidate of K
    double margin_eps = 10.0;        // keep eps >= margin_eps tau ...
    double margin_sigma = 0.2;       // ... or |lambda sqrt(tau) - sigma| >= margin_sigma sigma

    // log-spaced default grids
    static Scenario make(ScenarioKind kind, int n, double tau);
};

struct ScanRow {
    double ratio = 1, base = 0, separation = 0;
    double gradient_norm = 0, lower_bound = 0, cert_ratio = 0;
};

struct TowerSeed {
    double ratio = 0, base = 0;
    RefineStatus status = RefineStatus::NonConvergence;
    bool tower_zero = false; // converged while still a tower
    double residual = 0;
    std::string message;
};

struct ScanReport {
    Scenario scenario;
    std::vector<ScanRow> rows;
    int excluded = 0;
    double min_ratio = 0;
    int argmin = -1;
    double sigma = 0; // predicted lambda sqrt(tau)

    // single_profile
    std::vector<double> profile_lambda, profile_J;
    double lambda_tau = 0, curvature = 0;
    // stable_cluster: min over the sweep of the two-relation residual
    double relation_min_residual = 0;

    std::string to_csv() const;
    std::string summary_json() const;
};

ScanReport scan(const Scenario& s, const CurvatureField& K);

// Newton from tower seeds (same center, scale ratio r, base lambda b sigma/sqrt(tau)).
std::vector<TowerSeed> tower_newton_check(const Scenario& s, const CurvatureField& K,
                                          const std::vector<double>& ratios, const std::vector<double>& bases);

// Balanced alphas: (alpha^2/alpha_{K,tau}^{p+1}) (K_i/lambda_i^theta) alpha_i^{p-1} = 1 for every i.
Configuration balance_alphas(const Configuration& c, const CurvatureField& K);

} // namespace nirenberg
