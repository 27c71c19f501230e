#pragma once

#include "nirenberg/configuration.hpp"

#include <string>
#include <vector>

namespace nirenberg {

struct Aggregates {
    double alpha_sq = 0;
    std::vector<KJet> jets; // K jets at the centers
    std::vector<double> lambda_theta;
    // sum_i K_i alpha_i^s / lambda_i^theta
    double alpha_K_tau(double s) const;
    std::vector<double> alphas;
};

Aggregates aggregates(const Configuration& c, const CurvatureField& K);

struct MembershipReport {
    bool member = true;
    std::vector<std::string> diagnostics;
};

// Optional r and k_tau from the oracle; leading-order surrogates otherwise.
MembershipReport v_membership(const Configuration& c, const CurvatureField& K, double eps, double r = -1,
                              double k_tau = -1);

double reduced_energy(const Configuration& c, const CurvatureField& K);

struct EntryGradient {
    double g_alpha = 0;
    double g_lambda = 0; // pairing with lambda_j d/dlambda_j phi_j
    Vec g_a;             // ambient tangent vector at a_j
    Vec g_a_local;       // components in chart(a_j)
};

struct ReducedGradient {
    std::vector<EntryGradient> entries;
    double norm() const;
};

// Factors mapping the expansion brackets to the true pairings on the sphere.
double lambda_pairing_factor();
double a_pairing_factor(int n);

double grad_alpha(const Configuration& c, const CurvatureField& K, int j);
double grad_lambda(const Configuration& c, const CurvatureField& K, int j);
Vec grad_a(const Configuration& c, const CurvatureField& K, int j);
ReducedGradient reduced_gradient(const Configuration& c, const CurvatureField& K);

struct ErrorBudget {
    double value = 0;
    double tau_sq = 0, grad_term = 0, lambda4 = 0, lambda_mass = 0, interaction = 0;
};

ErrorBudget error_budget(const Configuration& c, const CurvatureField& K);

// leading-order k_tau and the rescaling of alpha to k_tau = 1
double k_tau_leading(const Configuration& c, const CurvatureField& K);
Configuration normalize(const Configuration& c, const CurvatureField& K, double k_tau = -1);

} // namespace nirenberg
