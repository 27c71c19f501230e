#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nirenberg/constants.hpp"
#include "nirenberg/errors.hpp"
#include "nirenberg/quadrature.hpp"

#include <cmath>

using namespace nirenberg;

namespace {

double omega(int n) { return 2 * std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0); }

const AuditLine* find(const AuditReport& r, const std::string& prefix)
{
    for (const auto& l : r.lines)
        if (l.description.rfind(prefix, 0) == 0)
            return &l;
    return nullptr;
}

} // namespace

TEST_CASE("radial integrals against Beta closed forms")
{
    const double w4 = omega(4);
    CHECK(radial_integral([](double r) { return std::pow(1 + r * r, -4.0); }, 4) ==
          doctest::Approx(M_PI * M_PI / 6).epsilon(1e-12));
    CHECK(radial_integral([](double r) { return std::pow(1 + r * r, -3.0); }, 4) ==
          doctest::Approx(w4 / 4).epsilon(1e-12));
    CHECK(radial_integral([](double r) { return r * r * std::pow(1 + r * r, -4.0); }, 4) ==
          doctest::Approx(w4 / 6).epsilon(1e-12));
    try {
        radial_integral([](double r) { return std::pow(1 + r * r, -1.0); }, 4);
        FAIL("expected Divergent");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Divergent);
    }
}

TEST_CASE("named constants: closed values for n = 4")
{
    const double s = std::sqrt(3 * omega(4));
    CHECK(constant("bar_c0", 4) == doctest::Approx(M_PI * M_PI / 6).epsilon(1e-12));
    CHECK(constant("tilde_c1", 4) == doctest::Approx(2 * s).epsilon(1e-9));
    CHECK(constant("tilde_c1", 4) == doctest::Approx(15.39060).epsilon(1e-5));
    CHECK(constant("tilde_c2", 4) == doctest::Approx(s).epsilon(1e-9));
    CHECK(constant("tilde_c3", 4) == doctest::Approx(24 * s).epsilon(1e-9));
    CHECK(constant("tilde_c4", 4) == doctest::Approx(24 * s).epsilon(1e-9));
    CHECK(constant("grave_c0", 4) == doctest::Approx(16 * s).epsilon(1e-9));
    CHECK(constant("grave_c2", 4) == doctest::Approx(4 * s).epsilon(1e-9));
    CHECK(constant("grave_d1", 4) == doctest::Approx(24 * s).epsilon(1e-9));
    CHECK(constant("grave_b1", 4) == doctest::Approx(144 * s).epsilon(1e-9));
    CHECK(constant("hat_c0", 4) == doctest::Approx(48 * std::sqrt(M_PI * M_PI / 6)).epsilon(1e-12));
    CHECK(hat_c0(4, 0.0) == doctest::Approx(constant("hat_c0", 4)).epsilon(1e-12));
}

TEST_CASE("named constants: n = 5 ratios")
{
    CHECK(constant("tilde_c2", 5) / constant("tilde_c1", 5) == doctest::Approx(2.0 / 9).epsilon(1e-9));
    CHECK(constant("tilde_c3", 5) / constant("tilde_c1", 5) == doctest::Approx(512 / (9 * M_PI)).epsilon(1e-9));
    CHECK(constant("tilde_c4", 5) / constant("tilde_c1", 5) == doctest::Approx(512 / (9 * M_PI)).epsilon(1e-9));
}

TEST_CASE("unknown constant")
{
    try {
        constant("no_such_constant", 4);
        FAIL("expected UnknownConstant");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownConstant);
    }
}

TEST_CASE("every constant is registered for n = 3..10 and has a defining chain")
{
    for (int n = 3; n <= 10; ++n)
        for (const auto& name : constant_names()) {
            const ConstantValue& v = constant_entry(name, n);
            CHECK(std::isfinite(v.value));
            CHECK_FALSE(v.spec.normalization.empty());
        }
}

TEST_CASE("closed forms agree with quadrature")
{
    for (int n = 4; n <= 8; ++n)
        for (const auto& name : constant_names()) {
            auto cf = closed_form(name, n);
            if (!cf)
                continue;
            CHECK(constant_entry(name, n).value == doctest::Approx(*cf).epsilon(1e-10));
        }
}

TEST_CASE("identity audit: PASS lines and FLAGs with both numbers")
{
    for (int n = 4; n <= 8; ++n) {
        AuditReport r = verify_identities(n, 1e-10);
        CHECK_FALSE(r.any_fail());
        const AuditLine* d1 = find(r, "bar_d1 = pre_tilde_d1");
        REQUIRE(d1);
        CHECK(d1->status == AuditStatus::Flag);
        CHECK(d1->computed != d1->reference);
        const AuditLine* ch = find(r, "check_c4/check_c3");
        REQUIRE(ch);
        CHECK(ch->status == AuditStatus::Flag);
        CHECK(r.to_text().find("FLAG") != std::string::npos);
    }
    AuditReport r4 = verify_identities(4, 1e-9);
    const AuditLine* e = find(r4, "tilde_c2/tilde_c1");
    REQUIRE(e);
    CHECK(e->status == AuditStatus::Pass);
}
