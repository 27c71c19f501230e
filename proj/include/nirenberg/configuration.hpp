#pragma once

#include "nirenberg/bubbles.hpp"
#include "nirenberg/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nirenberg {

struct Entry {
    double alpha = 1.0;
    Bubble bubble;
};

struct Configuration {
    int n = 0;
    double tau = 0.0;
    std::vector<Entry> entries;

    int q() const { return (int)entries.size(); }
    double theta() const { return 0.5 * (n - 2) * tau; }
    double p() const { return (n + 2.0) / (n - 2.0) - tau; }
    std::vector<Bubble> bubbles() const;
    void validate() const;
};

// {"n":..,"tau":..,"entries":[{"alpha":..,"a":[..],"lambda":..}], "K":{...}}
struct Problem {
    Configuration config;
    std::optional<CurvatureField> K;
};

Problem problem_from_json_text(const std::string& text);
Problem problem_from_file(const std::string& path);
std::string config_to_json_text(const Configuration& c);

} // namespace nirenberg
