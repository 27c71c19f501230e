#include "nirenberg/configuration.hpp"

#include "nirenberg/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace nirenberg {

std::vector<Bubble> Configuration::bubbles() const
{
    std::vector<Bubble> b;
    for (const auto& e : entries)
        b.push_back(e.bubble);
    return b;
}

void Configuration::validate() const
{
    require_dimension(n, 3, 10);
    if (entries.empty())
        throw Error(ErrorKind::InvalidInput, "configuration needs at least one entry");
    if (tau < 0.0)
        throw Error(ErrorKind::InvalidInput, "tau must be nonnegative");
    for (const auto& e : entries) {
        if (!(e.alpha > 0.0))
            throw Error(ErrorKind::InvalidInput, "alpha must be positive");
        check_bubble(e.bubble);
        if (e.bubble.a.size() != n + 1)
            throw Error(ErrorKind::DimensionMismatch, "center dimension does not match n");
        check_point(e.bubble.a);
    }
}

Problem problem_from_json_text(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("bad configuration JSON: ") + e.what());
    }
    Problem p;
    try {
        p.config.n = j.at("n").get<int>();
        p.config.tau = j.value("tau", 0.0);
        for (const auto& e : j.at("entries")) {
            Entry en;
            en.alpha = e.value("alpha", 1.0);
            std::vector<double> a = e.at("a").get<std::vector<double>>();
            en.bubble.a = Eigen::Map<Vec>(a.data(), (Eigen::Index)a.size());
            double r = en.bubble.a.norm();
            if (std::abs(r - 1.0) > 1e-6)
                throw Error(ErrorKind::InvalidInput, "center is not a unit vector");
            en.bubble.a /= r;
            en.bubble.lambda = e.at("lambda").get<double>();
            p.config.entries.push_back(en);
        }
        if (j.contains("K"))
            p.K = CurvatureField::from_json_text(j["K"].dump());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("bad configuration JSON: ") + e.what());
    }
    p.config.validate();
    if (p.K && p.K->n() != p.config.n)
        throw Error(ErrorKind::DimensionMismatch, "K dimension does not match configuration");
    return p;
}

Problem problem_from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::InvalidInput, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return problem_from_json_text(ss.str());
}

std::string config_to_json_text(const Configuration& c)
{
    nlohmann::json j;
    j["n"] = c.n;
    j["tau"] = c.tau;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : c.entries) {
        std::vector<double> a(e.bubble.a.data(), e.bubble.a.data() + e.bubble.a.size());
        j["entries"].push_back({{"alpha", e.alpha}, {"a", a}, {"lambda", e.bubble.lambda}});
    }
    return j.dump();
}

} // namespace nirenberg
