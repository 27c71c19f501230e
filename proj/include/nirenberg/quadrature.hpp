#pragma once

#include <Eigen/Dense>
#include <functional>

namespace nirenberg {

struct Rule1D {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

// Gauss rule on [-1,1] for the weight (1-t^2)^a, a > -1 (Golub-Welsch).
Rule1D gauss_gegenbauer(int m, double a);
inline Rule1D gauss_legendre(int m) { return gauss_gegenbauer(m, 0.0); }

// Product rule on the unit sphere S^m in R^{m+1}, exact for polynomials of
// degree <= degree. Columns of points are the nodes.
struct SphereRule {
    Eigen::MatrixXd points;
    Eigen::VectorXd weights;
    int degree = 0;
};

const SphereRule& sphere_rule(int m, int degree);

double sphere_area(int m); // |S^m|

// omega_n * int_0^inf f(r) r^{n-1} dr, r = tan(s).
double radial_integral(const std::function<double(double)>& f, int n, double tol = 1e-12);

} // namespace nirenberg
