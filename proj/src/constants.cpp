#include "nirenberg/constants.hpp"

#include "nirenberg/errors.hpp"
#include "nirenberg/quadrature.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>

namespace nirenberg {

namespace {

using Radial = std::function<double(double)>;

struct Def {
    std::string integrand;
    std::string chain;
    // pre-integrand (empty for pure chains)
    std::function<Radial(int)> f;
    // maps the pre-constant (or 0 for pure chains) to the final value
    std::function<double(int, double)> post;
};

double P(double r2, double e) { return std::pow(1.0 + r2, -e); }

double norm_lambda(int n);

double id(int, double x) { return x; }

std::map<std::string, Def> make_defs()
{
    std::map<std::string, Def> d;
    d["bar_c0"] = {"(1+r^2)^-n", "1", [](int n) { return Radial([n](double r) { return P(r * r, n); }); }, id};
    d["bar_c1"] = {"(n-2)/2 ln(1+r^2) (1+r^2)^-n", "1",
        [](int n) { return Radial([n](double r) { return 0.5 * (n - 2) * std::log1p(r * r) * P(r * r, n); }); }, id};
    d["bar_c2"] = {"1/(2n) r^2 (1+r^2)^-n", "1",
        [](int n) { return Radial([n](double r) { return r * r * P(r * r, n) / (2.0 * n); }); }, id};
    d["bar_d1"] = {"r^n (1+r^2)^-(n+1)", "1",
        [](int n) { return Radial([n](double r) { return std::pow(r, n) * P(r * r, n + 1); }); }, id};
    for (const char* b : {"b1", "b2", "b3"})
        d[b] = {"(1+r^2)^-(n+2)/2", "1",
            [](int n) { return Radial([n](double r) { return P(r * r, 0.5 * (n + 2)); }); }, id};
    d["c1"] = {"(1+r^2)^-n", "1", [](int n) { return Radial([n](double r) { return P(r * r, n); }); }, id};
    d["c2"] = {"(n-2)^2/4 (r^2-1)^2 (1+r^2)^-(n+2)", "1", [](int n) {
                   return Radial([n](double r) {
                       double q = r * r - 1.0;
                       return 0.25 * (n - 2.0) * (n - 2.0) * q * q * P(r * r, n + 2);
                   });
               }, id};
    d["c3"] = {"(n-2)^2/n r^2 (1+r^2)^-(n+2)", "1", [](int n) {
                   return Radial([n](double r) { return (n - 2.0) * (n - 2.0) / n * r * r * P(r * r, n + 2); });
               }, id};
    d["pre_bar_b2"] = {"(n+2)/2 (r^2-1)/(r^2+1) (1+r^2)^-(n+2)/2", "1", [](int n) {
                           return Radial([n](double r) { return 0.5 * (n + 2) * (r * r - 1.0) * P(r * r, 0.5 * (n + 4)); });
                       }, id};
    d["pre_tilde_b2"] = {"(n-2)/2 (1+r^2)^-(n+2)/2", "1", [](int n) {
                             return Radial([n](double r) { return 0.5 * (n - 2) * P(r * r, 0.5 * (n + 2)); });
                         }, id};
    d["pre_tilde_c1"] = {"(n-2)^2/4 (1-r^2)(1+r^2)^-(n+1) ln(1/(1+r^2))", "1", [](int n) {
                             return Radial([n](double r) {
                                 return -0.25 * (n - 2.0) * (n - 2.0) * (1.0 - r * r) * P(r * r, n + 1) * std::log1p(r * r);
                             });
                         }, id};
    d["pre_tilde_c2"] = {"-(n-2)/(4n) r^2 (1-r^2)(1+r^2)^-(n+1)", "1", [](int n) {
                             return Radial([n](double r) { return -(n - 2.0) / (4.0 * n) * r * r * (1.0 - r * r) * P(r * r, n + 1); });
                         }, id};
    d["pre_tilde_d1"] = {"-r^n (n+2-n r^2)(1+r^2)^-(n+2)", "1", [](int n) {
                             return Radial([n](double r) { return -std::pow(r, n) * (n + 2.0 - n * r * r) * P(r * r, n + 2); });
                         }, id};
    d["header_check_c4"] = {"2(n-1) r^2 (1+r^2)^-n", "1", [](int n) {
                                return Radial([n](double r) { return 2.0 * (n - 1) * r * r * P(r * r, n); });
                            }, id};

    // chains
    auto chain = [&](const std::string& text, std::function<double(int)> g) {
        return Def{"-", text, nullptr, [g](int n, double) { return g(n); }};
    };
    auto c0p = [](int n, double e) { return std::pow(constant("bar_c0", n), e); };
    d["bar_b1"] = chain("2n/(n-2) b1", [](int n) { return 2.0 * n / (n - 2.0) * constant("b1", n); });
    d["tilde_b1"] = chain("4n(n-1) b1", [](int n) { return 4.0 * n * (n - 1.0) * constant("b1", n); });
    d["hat_c0"] = chain("4n(n-1) bar_c0^(2/n)", [c0p](int n) { return 4.0 * n * (n - 1.0) * c0p(n, 2.0 / n); });
    d["hat_c1"] = chain("bar_c1/bar_c0", [](int n) { return constant("bar_c1", n) / constant("bar_c0", n); });
    d["hat_c2"] = chain("bar_c2/bar_c0", [](int n) { return constant("bar_c2", n) / constant("bar_c0", n); });
    d["hat_d1"] = chain("bar_d1/bar_c0", [](int n) { return constant("bar_d1", n) / constant("bar_c0", n); });
    d["hat_b1"] = chain("2 b1/bar_c0", [](int n) { return 2.0 * constant("b1", n) / constant("bar_c0", n); });
    d["grave_c0"] = chain("8n(n-1) bar_c0^(2/n)", [c0p](int n) { return 8.0 * n * (n - 1.0) * c0p(n, 2.0 / n); });
    d["grave_c2"] = chain("8n(n-1) bar_c2 / bar_c0^((n-2)/n)",
        [c0p](int n) { return 8.0 * n * (n - 1.0) * constant("bar_c2", n) / c0p(n, (n - 2.0) / n); });
    d["grave_d1"] = chain("8n(n-1) bar_d1 / bar_c0^((n-2)/n)",
        [c0p](int n) { return 8.0 * n * (n - 1.0) * constant("bar_d1", n) / c0p(n, (n - 2.0) / n); });
    d["grave_b1"] = chain("8n(n-1)(n+2) b1 / ((n-2) bar_c0^((n-2)/n))", [c0p](int n) {
        return 8.0 * n * (n - 1.0) * (n + 2.0) * constant("b1", n) / ((n - 2.0) * c0p(n, (n - 2.0) / n));
    });
    d["tilde_c1"] = chain("4n(n-1)/bar_c0^((n-2)/n) pre_tilde_c1",
        [](int n) { return norm_lambda(n) * constant("pre_tilde_c1", n); });
    d["tilde_c2"] = chain("4n(n-1)/bar_c0^((n-2)/n) pre_tilde_c2",
        [](int n) { return norm_lambda(n) * constant("pre_tilde_c2", n); });
    d["tilde_d1"] = chain("4n(n-1)/bar_c0^((n-2)/n) pre_tilde_d1",
        [](int n) { return norm_lambda(n) * constant("pre_tilde_d1", n); });
    d["tilde_c3"] = chain("tilde_d1", [](int n) { return constant("tilde_d1", n); });
    d["tilde_b2"] = chain("4n(n-1)/bar_c0^((n-2)/n) b2", [](int n) { return norm_lambda(n) * constant("b2", n); });
    d["tilde_c4"] = chain("(n-2)/2 tilde_b2", [](int n) { return 0.5 * (n - 2) * constant("tilde_b2", n); });
    d["pre_check_c3"] = chain("bar_c0", [](int n) { return constant("bar_c0", n); });
    d["pre_check_c4"] = chain("bar_c2", [](int n) { return constant("bar_c2", n); });
    d["check_c3"] = chain("4(n-1)(n-2) pre_check_c3",
        [](int n) { return 4.0 * (n - 1) * (n - 2) * constant("pre_check_c3", n); });
    d["check_c4"] = chain("4(n-1)(n-2) pre_check_c4",
        [](int n) { return 4.0 * (n - 1) * (n - 2) * constant("pre_check_c4", n); });
    d["check_b3"] = chain("4(n-1)(n-2) 2n/(n-2) b3",
        [](int n) { return 4.0 * (n - 1) * (n - 2) * 2.0 * n / (n - 2.0) * constant("b3", n); });
    return d;
}

const std::map<std::string, Def>& defs()
{
    static const std::map<std::string, Def> d = make_defs();
    return d;
}

double norm_lambda(int n)
{
    return 4.0 * n * (n - 1.0) / std::pow(constant("bar_c0", n), (n - 2.0) / n);
}

// int_{R^n} r^{2a} (1+r^2)^{-b} dx
double moment(int n, double a, double b)
{
    double x = a + 0.5 * n;
    return 0.5 * sphere_area(n - 1) * boost::math::beta(x, b - x);
}

// int_{R^n} r^{2a} ln(1+r^2) (1+r^2)^{-b} dx
double log_moment(int n, double a, double b)
{
    double x = a + 0.5 * n;
    return moment(n, a, b) * (boost::math::digamma(b) - boost::math::digamma(b - x));
}

} // namespace

const std::vector<std::string>& constant_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, d] : defs())
            v.push_back(k);
        return v;
    }();
    return names;
}

const ConstantValue& constant_entry(const std::string& name, int n)
{
    static std::map<std::pair<std::string, int>, ConstantValue> cache;
    static std::recursive_mutex mu;
    std::lock_guard<std::recursive_mutex> lock(mu);
    auto key = std::make_pair(name, n);
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;
    auto dit = defs().find(name);
    if (dit == defs().end())
        throw Error(ErrorKind::UnknownConstant, name);
    require_dimension(n, 3, 10);
    const Def& d = dit->second;
    ConstantValue v;
    v.spec = {name, n, d.integrand, d.chain};
    double pre = d.f ? radial_integral(d.f(n), n) : 0.0;
    v.value = d.post(n, pre);
    v.source = d.f ? "quadrature" : "chain";
    return cache.emplace(key, v).first->second;
}

double constant(const std::string& name, int n)
{
    return constant_entry(name, n).value;
}

std::optional<double> closed_form(const std::string& name, int n)
{
    require_dimension(n, 3, 10);
    const double h = 0.5 * n;
    if (name == "bar_c0" || name == "c1")
        return moment(n, 0, n);
    if (name == "bar_c1")
        return 0.5 * (n - 2) * log_moment(n, 0, n);
    if (name == "bar_c2")
        return moment(n, 1, n) / (2.0 * n);
    if (name == "bar_d1")
        return moment(n, h, n + 1);
    if (name == "b1" || name == "b2" || name == "b3")
        return sphere_area(n - 1) / n;
    if (name == "c2")
        return 0.25 * (n - 2.0) * (n - 2.0) * (moment(n, 2, n + 2) - 2.0 * moment(n, 1, n + 2) + moment(n, 0, n + 2));
    if (name == "c3")
        return (n - 2.0) * (n - 2.0) / n * moment(n, 1, n + 2);
    if (name == "pre_bar_b2")
        return 0.5 * (n + 2) * (moment(n, 1, h + 2) - moment(n, 0, h + 2));
    if (name == "pre_tilde_b2")
        return (n - 2.0) * sphere_area(n - 1) / (2.0 * n);
    if (name == "pre_tilde_c1")
        return -0.25 * (n - 2.0) * (n - 2.0) * (log_moment(n, 0, n + 1) - log_moment(n, 1, n + 1));
    if (name == "pre_tilde_c2")
        return -(n - 2.0) / (4.0 * n) * (moment(n, 1, n + 1) - moment(n, 2, n + 1));
    if (name == "pre_tilde_d1")
        return -((n + 2.0) * moment(n, h, n + 2) - n * moment(n, h + 1, n + 2));
    if (name == "header_check_c4")
        return 2.0 * (n - 1) * moment(n, 1, n);
    return std::nullopt;
}

double hat_c0(int n, double tau)
{
    double p = (n + 2.0) / (n - 2.0) - tau;
    return 4.0 * n * (n - 1.0) * std::pow(constant("bar_c0", n), (p - 1.0) / (p + 1.0));
}

const char* status_name(AuditStatus s)
{
    switch (s) {
    case AuditStatus::Pass: return "PASS";
    case AuditStatus::Fail: return "FAIL";
    case AuditStatus::Flag: return "FLAG";
    }
    return "?";
}

bool AuditReport::any_fail() const
{
    for (const auto& l : lines)
        if (l.status == AuditStatus::Fail)
            return true;
    return false;
}

std::string AuditReport::to_text() const
{
    std::ostringstream os;
    os.precision(12);
    os << "constants audit n=" << n << " tol=" << tol << "\n";
    for (const auto& l : lines) {
        os << status_name(l.status) << " [" << l.id << "] " << l.description << ": computed " << l.computed
           << " reference " << l.reference << " rel " << l.rel_diff;
        if (!l.note.empty())
            os << " (" << l.note << ")";
        os << "\n";
    }
    return os.str();
}

namespace {

double rel(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

void compare(AuditReport& r, const std::string& id, const std::string& what, double got, double ref, double tol,
             bool flag_on_mismatch = false, const std::string& note = "")
{
    AuditLine l;
    l.id = id;
    l.description = what;
    l.computed = got;
    l.reference = ref;
    l.rel_diff = rel(got, ref);
    bool ok = l.rel_diff <= tol;
    l.status = ok ? AuditStatus::Pass : (flag_on_mismatch ? AuditStatus::Flag : AuditStatus::Fail);
    l.note = note;
    r.lines.push_back(l);
}

} // namespace

AuditReport verify_identities(int n, double tol)
{
    require_dimension(n, 3, 10);
    AuditReport r;
    r.n = n;
    r.tol = tol;
    const double w = sphere_area(n - 1);
    const double itol = std::min(tol, 1e-10);

    compare(r, "a", "b2 = b1", constant("b2", n), constant("b1", n), itol);
    compare(r, "a", "b3 = b1", constant("b3", n), constant("b1", n), itol);
    compare(r, "a", "b1 = omega_n/n", constant("b1", n), w / n, itol);
    compare(r, "b", "c1 = bar_c0", constant("c1", n), constant("bar_c0", n), itol);
    compare(r, "c", "pre_tilde_b2 = (n-2) omega_n/(2n)", constant("pre_tilde_b2", n), (n - 2.0) * w / (2.0 * n), itol);
    compare(r, "d", "pre_bar_b2 = pre_tilde_b2", constant("pre_bar_b2", n), constant("pre_tilde_b2", n), itol);

    const double t1 = constant("tilde_c1", n), t2 = constant("tilde_c2", n);
    const double t3 = constant("tilde_c3", n), t4 = constant("tilde_c4", n);
    if (n == 4) {
        compare(r, "e", "tilde_c2/tilde_c1 = 1/2", t2 / t1, 0.5, tol);
        compare(r, "f", "tilde_c3/tilde_c1 = 12", t3 / t1, 12.0, tol);
        compare(r, "f", "tilde_c4/tilde_c1 = 12", t4 / t1, 12.0, tol);
        const double s = std::sqrt(3.0 * w);
        compare(r, "f", "tilde_c1 = 2 sqrt(3 omega_4)", t1, 2 * s, tol);
        compare(r, "f", "tilde_c2 = sqrt(3 omega_4)", t2, s, tol);
        compare(r, "f", "tilde_c3 = 24 sqrt(3 omega_4)", t3, 24 * s, tol);
        compare(r, "f", "tilde_c4 = 24 sqrt(3 omega_4)", t4, 24 * s, tol);
        compare(r, "f", "grave_c0 = 16 sqrt(3 omega_4)", constant("grave_c0", n), 16 * s, tol);
        compare(r, "f", "grave_c2 = 4 sqrt(3 omega_4)", constant("grave_c2", n), 4 * s, tol);
        compare(r, "f", "grave_d1 = 24 sqrt(3 omega_4)", constant("grave_d1", n), 24 * s, tol);
        compare(r, "f", "grave_b1 = 144 sqrt(3 omega_4)", constant("grave_b1", n), 144 * s, tol);
        compare(r, "f", "bar_c0 = omega_4/12", constant("bar_c0", n), w / 12.0, tol);
    } else if (n == 5) {
        compare(r, "e", "tilde_c2/tilde_c1 = 2/9", t2 / t1, 2.0 / 9.0, tol);
        compare(r, "f", "tilde_c3/tilde_c1 = 512/(9 pi)", t3 / t1, 512.0 / (9.0 * M_PI), tol);
        compare(r, "f", "tilde_c4/tilde_c1 = 512/(9 pi)", t4 / t1, 512.0 / (9.0 * M_PI), tol);
    }

    // Gamma closed-form lines for the tilde pre-constants, audit only
    const double g = std::tgamma(0.5 * n);
    const double gamma_t1 = (n - 2.0) * (n - 2.0) / (48.0 * n) * w * g * g / std::tgamma(n);
    const double gamma_t2 = (n - 2.0) / (4.0 * n) * w
        * (std::tgamma(0.5 * n + 1) * g + std::tgamma(0.5 * n - 1) * std::tgamma(0.5 * n + 2)) / (2.0 * std::tgamma(n + 1.0));
    compare(r, "g", "pre_tilde_c1 vs Gamma line", constant("pre_tilde_c1", n), gamma_t1, tol, true,
            n == 4 ? "final value 2 sqrt(3 omega_4) agrees with the quadrature" : "");
    compare(r, "g", "pre_tilde_c2 vs Gamma line", constant("pre_tilde_c2", n), gamma_t2, tol, true);

    compare(r, "h", "bar_d1 = pre_tilde_d1 claim", constant("bar_d1", n), constant("pre_tilde_d1", n), tol, true);
    compare(r, "h", "check_c4/check_c3 (chain) vs header integrals",
            constant("check_c4", n) / constant("check_c3", n),
            constant("header_check_c4", n) / constant("check_c3", n), tol, true);
    if (n == 4) {
        compare(r, "h", "check_c3 chain vs 3 omega_4", constant("check_c3", n), 3.0 * w, tol, true);
        compare(r, "h", "check_c4 chain vs omega_4", constant("check_c4", n), w, tol, true);
    }

    // quadrature vs Beta reductions
    for (const auto& name : constant_names()) {
        auto cf = closed_form(name, n);
        if (!cf)
            continue;
        compare(r, "q", name + " quadrature vs closed form", constant(name, n), *cf, itol);
    }
    return r;
}

} // namespace nirenberg
