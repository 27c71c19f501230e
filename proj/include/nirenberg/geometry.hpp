#pragma once

#include "nirenberg/polynomial.hpp"

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace nirenberg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct SphereModel {
    int n = 0;
    double scalar_curvature = 0; // n(n-1)
    double omega_n = 0;          // |S^{n-1}|
    double gamma_n = 0;
    double c_n = 0;

    static SphereModel make(int n);
    // round sphere: no mass, no Weyl tensor
    double mass(const Vec&) const { return 0.0; }
    double weyl_norm(const Vec&) const { return 0.0; }
};

// Points of S^n are unit vectors of R^{n+1}.
using SpherePoint = Vec;

void check_point(const Vec& x);
Vec unit(const Vec& x);
Vec pole(int n, int k, double sign = 1.0); // sign * e_k, k in 0..n

double geodesic_distance(const Vec& a, const Vec& b);
Vec exp_map(const Vec& a, const Vec& v); // v tangent at a, ambient coordinates
Vec project_tangent(const Vec& a, const Vec& v);

struct TangentFrame {
    Vec base;
    Mat basis; // (n+1) x n, orthonormal, orthogonal to base

    int n() const { return (int)basis.cols(); }
    Vec to_local(const Vec& ambient) const { return basis.transpose() * ambient; }
    Vec to_ambient(const Vec& local) const { return basis * local; }
    // scaled stereographic chart from -base, |y| = 2 tan(theta/2)
    Vec chart(const Vec& x) const;
    Vec chart_inverse(const Vec& y) const;
};

// Deterministic Householder frame at a.
TangentFrame chart(const Vec& a);

// u_a(x) = sec^{n-2}(theta/2)
double conformal_factor(int n, const Vec& a, const Vec& x);

// gamma_n G^{2/(2-n)}(a,b) on the round sphere: squared chordal distance
double green_kernel(const Vec& a, const Vec& b);

enum class FieldFamily { Affine, Quadratic, Polynomial };

class CurvatureField {
public:
    static CurvatureField affine(double c0, const Vec& v);
    static CurvatureField quadratic(double c0, const Vec& d);
    static CurvatureField polynomial(const Polynomial& p);
    static CurvatureField constant(int n, double c);
    static CurvatureField from_json_text(const std::string& text);
    static CurvatureField from_file(const std::string& path);
    std::string to_json_text() const;

    int n() const { return n_; }
    FieldFamily family() const { return family_; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    const Polynomial& poly() const { return F_; }

    double operator()(const Vec& x) const { return F_(x); }
    // sampled minimum combined with the family bound
    double lower_bound() const;

    // ambient derivative data used by k_jet
    const std::vector<Polynomial>& dF() const { return dF_; }
    const std::vector<std::vector<Polynomial>>& d2F() const { return d2F_; }
    const Polynomial& lap_extension() const { return G_; }
    const std::vector<Polynomial>& dG() const { return dG_; }

private:
    void build(bool check_positive = true);
    int n_ = 0;
    FieldFamily family_ = FieldFamily::Polynomial;
    std::vector<double> coeffs_;
    Polynomial F_;
    std::vector<Polynomial> dF_;
    std::vector<std::vector<Polynomial>> d2F_;
    Polynomial G_; // ambient extension of the spherical Laplacian of K
    std::vector<Polynomial> dG_;
};

struct KJet {
    TangentFrame frame;
    double value = 0;
    Vec grad;     // ambient tangent vector
    Mat hess;     // n x n in frame
    double lap = 0;
    Vec grad_lap; // ambient tangent vector

    Vec grad_local() const { return frame.to_local(grad); }
    Vec grad_lap_local() const { return frame.to_local(grad_lap); }
};

KJet k_jet(const CurvatureField& K, const Vec& x);

struct CriticalPoint {
    Vec location;
    int morse_index = 0;
    double value = 0;
    double lap = 0;
    double min_abs_eig = 0;
    bool is_blowup_candidate = false;
};

struct CriticalInventory {
    std::vector<CriticalPoint> points;
    bool incomplete = false; // Morse count parity failed
    std::string warning;
};

CriticalInventory find_critical_points(const CurvatureField& K, int max_seeds = 16384);

struct NondegeneracyReport {
    bool nondegenerate = true;
    std::vector<std::string> lines;
    // n = 4 only: least eigenvalue and eigenvector positivity per subset
    struct Subset {
        std::vector<int> indices;
        double least_eig = 0;
        bool positive_eigvec = false;
    };
    std::vector<Subset> subsets;
};

NondegeneracyReport check_nondegeneracy(const CurvatureField& K, int q);

struct QuadratureGrid {
    int n = 0;
    int level = 0;
    Mat nodes; // (n+1) x N
    Vec weights;
};

QuadratureGrid quadrature_grid(int n, int level);

} // namespace nirenberg
