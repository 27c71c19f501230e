#include "nirenberg/polynomial.hpp"

#include "nirenberg/errors.hpp"

#include <cmath>

namespace nirenberg {

void Polynomial::add_term(const std::vector<int>& exps, double coef)
{
    if ((int)exps.size() != dim_)
        throw Error(ErrorKind::InvalidInput, "monomial length does not match polynomial dimension");
    for (int e : exps)
        if (e < 0)
            throw Error(ErrorKind::InvalidInput, "negative exponent");
    if (coef == 0.0)
        return;
    terms_[exps] += coef;
    if (terms_[exps] == 0.0)
        terms_.erase(exps);
}

Polynomial Polynomial::constant(int dim, double c)
{
    Polynomial p(dim);
    p.add_term(std::vector<int>(dim, 0), c);
    return p;
}

Polynomial Polynomial::coordinate(int dim, int k)
{
    Polynomial p(dim);
    std::vector<int> e(dim, 0);
    e[k] = 1;
    p.add_term(e, 1.0);
    return p;
}

double Polynomial::operator()(const Eigen::VectorXd& x) const
{
    double s = 0.0;
    for (const auto& [e, c] : terms_) {
        double m = c;
        for (int k = 0; k < dim_; ++k)
            for (int j = 0; j < e[k]; ++j)
                m *= x[k];
        s += m;
    }
    return s;
}

Polynomial Polynomial::derivative(int k) const
{
    Polynomial d(dim_);
    for (const auto& [e, c] : terms_) {
        if (e[k] == 0)
            continue;
        auto f = e;
        f[k] -= 1;
        d.add_term(f, c * e[k]);
    }
    return d;
}

Polynomial Polynomial::times_coordinate(int k) const
{
    Polynomial d(dim_);
    for (const auto& [e, c] : terms_) {
        auto f = e;
        f[k] += 1;
        d.add_term(f, c);
    }
    return d;
}

int Polynomial::degree() const
{
    int d = 0;
    for (const auto& [e, c] : terms_) {
        int s = 0;
        for (int v : e)
            s += v;
        d = std::max(d, s);
    }
    return d;
}

void Polynomial::prune()
{
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second == 0.0)
            it = terms_.erase(it);
        else
            ++it;
    }
}

Polynomial& Polynomial::operator+=(const Polynomial& o)
{
    if (o.dim_ != dim_)
        throw Error(ErrorKind::DimensionMismatch, "polynomial dimensions differ");
    for (const auto& [e, c] : o.terms_)
        terms_[e] += c;
    prune();
    return *this;
}

Polynomial Polynomial::operator+(const Polynomial& o) const
{
    Polynomial r = *this;
    r += o;
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const
{
    return *this + o * -1.0;
}

Polynomial Polynomial::operator*(double s) const
{
    Polynomial r(dim_);
    for (const auto& [e, c] : terms_)
        r.add_term(e, c * s);
    return r;
}

} // namespace nirenberg
