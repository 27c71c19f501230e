#pragma once

#include "nirenberg/configuration.hpp"
#include "nirenberg/expansion.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nirenberg {

// Nodes and weights on S^n adapted to a bubble ensemble: one geodesic-polar
// patch per group of concentric/antipodal centers, stitched by the partition
// w_P = sum_{i in P} phi_i^4 / sum_k phi_k^4 (folded into the weights).
struct OracleGrid {
    int n = 0;
    int level = 0;
    int angular_degree = 0;
    int patches = 0;
    Mat nodes;
    Vec weights;
};

// angular_degree < 0 selects: exact degree poly_degree + 3 for a single patch,
// 6 + 6 level otherwise.
OracleGrid build_oracle_grid(int n, const std::vector<Bubble>& bubbles, int level, int angular_degree = -1,
                             int poly_degree = 2);

double integrate(const OracleGrid& g, const std::function<double(const Vec&)>& f);
double integrate_sphere(int n, const std::vector<Bubble>& bubbles, int level, const std::function<double(const Vec&)>& f);

struct EnergyBreakdown {
    double r = 0;
    double k_tau = 0;
    double J = 0;
    double r_err = 0, k_err = 0, J_err = 0;
};

EnergyBreakdown direct_energy(const Configuration& c, const CurvatureField& K, int level, bool estimate_error = true);

// dJ(u) phi_{k,j}; for k = 3 the component along basis vector comp of chart(a_j)
double direct_pairing(const Configuration& c, const CurvatureField& K, int k, int j, int level, int comp = 0);

// all pairings in the orientation of the reduced gradient:
// g_alpha = dJ(u)phi_{1,j}, g_lambda = dJ(u)(lambda_j d_lambda_j phi_j), g_a = dJ(u)phi_{3,j}
ReducedGradient direct_gradient(const Configuration& c, const CurvatureField& K, int level);

struct ConvergenceRow {
    double lambda = 0;
    double J_direct = 0, J_reduced = 0, gap = 0, budget = 0, ratio = 0;
    double pairing_gap = 0; // max |direct - reduced| over gradient components
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double energy_slope = 0;
    double pairing_slope = 0;
    std::string to_csv() const;
};

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

ConvergenceTable convergence_study(const std::function<Configuration(double)>& family, const CurvatureField& K,
                                   const std::vector<double>& lambdas, int level, bool with_pairings = false);

} // namespace nirenberg
