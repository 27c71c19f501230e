#pragma once

#include "nirenberg/geometry.hpp"

namespace nirenberg {

struct Bubble {
    Vec a;
    double lambda = 1.0;
};

struct BubbleJet {
    double phi1 = 0; // phi
    double phi2 = 0; // -lambda d/dlambda phi
    Vec phi3;        // (1/lambda) grad_a phi, ambient tangent vector at a
};

void check_bubble(const Bubble& b);

double bubble(int n, const Bubble& b, const Vec& x);
BubbleJet bubble_jet(int n, const Bubble& b, const Vec& x);
// L_{g0} phi, exact on the round sphere
double conformal_laplacian_on_bubble(int n, const Bubble& b, const Vec& x);

double epsilon(int n, const Bubble& bi, const Bubble& bj);

struct EpsilonDerivatives {
    double lambda_j_deriv = 0; // lambda_j d/dlambda_j eps_ij
    Vec a_j_deriv;             // (1/lambda_j) grad_{a_j} eps_ij, ambient tangent at a_j
};
EpsilonDerivatives epsilon_derivatives(int n, const Bubble& bi, const Bubble& bj);

enum class InteractionKind {
    Self,      // lambda_i^theta int phi_i^p phi_{k,i}
    Cross,     // lambda_i^theta int phi_i^p phi_{k,j}
    CrossDual, // lambda_i^theta int phi_i^{1-tau} d_{k,j} phi_j^{(n+2)/(n-2)}
};

struct OracleValue {
    double value = 0;
    double error = 0;
};

// k in {1,2,3}; for k = 3 the component along local frame direction `comp` at a_j.
OracleValue interaction_oracle(int n, const Bubble& bi, const Bubble& bj, InteractionKind kind, int k, double tau,
                               int level, int comp = 0);

} // namespace nirenberg
