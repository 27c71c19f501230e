#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

namespace nirenberg {

// Sparse polynomial on R^{dim}; monomials keyed by exponent vectors.
class Polynomial {
public:
    explicit Polynomial(int dim = 0) : dim_(dim) {}

    int dim() const { return dim_; }
    const std::map<std::vector<int>, double>& terms() const { return terms_; }

    void add_term(const std::vector<int>& exps, double coef);
    static Polynomial constant(int dim, double c);
    static Polynomial coordinate(int dim, int k);

    double operator()(const Eigen::VectorXd& x) const;
    Polynomial derivative(int k) const;
    Polynomial times_coordinate(int k) const;
    int degree() const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(double s) const;

private:
    void prune();
    int dim_;
    std::map<std::vector<int>, double> terms_;
};

} // namespace nirenberg
