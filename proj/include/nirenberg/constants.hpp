#pragma once

#include <optional>
#include <string>
#include <vector>

namespace nirenberg {

struct ConstantSpec {
    std::string name;
    int n = 0;
    std::string integrand;     // radial integrand over R^n, or "-" for pure chains
    std::string normalization; // chain applied to the pre-constant
};

struct ConstantValue {
    ConstantSpec spec;
    double value = 0;
    std::string source; // "quadrature" or "closed_form"
};

const std::vector<std::string>& constant_names();

// Value through the normalization chain; cached per (name, n).
double constant(const std::string& name, int n);
const ConstantValue& constant_entry(const std::string& name, int n);

// Beta/digamma reduction when one exists.
std::optional<double> closed_form(const std::string& name, int n);

// hat c0 at exponent p = (n+2)/(n-2) - tau
double hat_c0(int n, double tau);

enum class AuditStatus { Pass, Fail, Flag };
const char* status_name(AuditStatus s);

struct AuditLine {
    std::string id;
    std::string description;
    AuditStatus status = AuditStatus::Pass;
    double computed = 0;
    double reference = 0;
    double rel_diff = 0;
    std::string note;
};

struct AuditReport {
    int n = 0;
    double tol = 0;
    std::vector<AuditLine> lines;
    bool any_fail() const;
    std::string to_text() const;
};

AuditReport verify_identities(int n, double tol = 1e-9);

} // namespace nirenberg
