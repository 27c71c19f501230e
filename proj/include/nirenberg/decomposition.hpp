#pragma once

#include "nirenberg/configuration.hpp"
#include "nirenberg/oracle.hpp"

#include <string>
#include <vector>

namespace nirenberg {

// alpha_k phi_{k,i} for a bubble jet slot; k = 3 uses basis vector comp of chart(a)
struct JetComponent {
    Bubble bubble;
    int k = 1;
    int comp = 0;
    double coef = 1.0;
};

// Test functions whose conformal Laplacian is closed form.
struct AnalyticEnsemble {
    int n = 0;
    std::vector<Entry> bubbles;
    std::vector<JetComponent> jets;
    Vec coords;          // coefficients of x_0..x_n, empty means zero
    double constant = 0; // constant component

    double value(const Vec& x) const;
    double L_value(const Vec& x) const;
    std::vector<Bubble> centers() const; // bubbles of both kinds
    void validate() const;

    static AnalyticEnsemble from_json_text(const std::string& text);
    static AnalyticEnsemble from_file(const std::string& path);
};

struct DecompositionResult {
    Configuration config;
    double v_norm_sq = 0;
    double u_norm_sq = 0;
    // <v, phi_{k,i}>_L ordered per entry as [phi1, phi2, phi3 components]
    std::vector<Vec> ortho_residuals;
    // max |<v, phi_{k,i}>_L| / (||v|| ||phi_{k,i}||), zero when v vanishes
    double max_relative_residual = 0;
    int iterations = 0;
    bool local_min_warning = false;
    std::string warning;
};

struct DecompositionOptions {
    int level = 2;
    int max_iterations = 100;
    int restarts = 3;
    double restart_tol = 1e-6;
    unsigned seed = 12345;
};

DecompositionResult project_to_bubbles(const AnalyticEnsemble& u, const Configuration& init,
                                       const DecompositionOptions& opt = {});

struct HProjection {
    std::vector<Vec> coefficients; // per entry [phi1, phi2, phi3 components]
    double complement_norm_sq = 0;
    std::vector<Vec> complement_residuals;
    Mat gram;
    double condition = 0;
};

HProjection h_projection(const AnalyticEnsemble& u, const Configuration& c, int level = 2);

} // namespace nirenberg
