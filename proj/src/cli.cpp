#include "nirenberg/cli.hpp"

#include "nirenberg/constants.hpp"
#include "nirenberg/decomposition.hpp"
#include "nirenberg/errors.hpp"
#include "nirenberg/oracle.hpp"
#include "nirenberg/scanner.hpp"
#include "nirenberg/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace nirenberg {

namespace {

using nlohmann::json;

enum Exit { kOk = 0, kFail = 1, kInvalid = 2, kNoConvergence = 3 };

int exit_for(ErrorKind k)
{
    switch (k) {
    case ErrorKind::NonConvergence:
    case ErrorKind::NonConvergent:
    case ErrorKind::LeftRegime:
    case ErrorKind::Divergent:
        return kNoConvergence;
    default:
        return kInvalid;
    }
}

std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json gradient_json(const ReducedGradient& g)
{
    json a = json::array();
    for (const auto& e : g.entries)
        a.push_back({{"g_alpha", e.g_alpha}, {"g_lambda", e.g_lambda}, {"g_a", to_std(e.g_a)}});
    return a;
}

json config_json(const Configuration& c) { return json::parse(config_to_json_text(c)); }

CurvatureField field_for(const Problem& p, const std::string& k_path)
{
    if (!k_path.empty())
        return CurvatureField::from_file(k_path);
    if (p.K)
        return *p.K;
    throw Error(ErrorKind::InvalidInput, "no curvature field: pass --k or add \"K\" to the configuration");
}

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size())
                throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidInput, "bad number in list: " + tok);
        }
    }
    if (v.empty())
        throw Error(ErrorKind::InvalidInput, "empty list");
    return v;
}

// "auto" or points separated by ';', coordinates by ','
std::vector<CriticalPoint> select_points(const std::string& spec, const CurvatureField& K)
{
    auto inv = find_critical_points(K);
    std::vector<CriticalPoint> out;
    if (spec == "auto") {
        for (const auto& c : inv.points)
            if (c.is_blowup_candidate)
                out.push_back(c);
        if (out.empty())
            throw Error(ErrorKind::NotBlowupCandidate, "K has no blow-up candidates");
        return out;
    }
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ';')) {
        std::vector<double> x = parse_list(item);
        if ((int)x.size() != K.n() + 1)
            throw Error(ErrorKind::DimensionMismatch, "point dimension does not match K");
        Vec v = unit(Eigen::Map<Vec>(x.data(), (Eigen::Index)x.size()));
        const CriticalPoint* best = nullptr;
        for (const auto& c : inv.points)
            if (!best || (c.location - v).norm() < (best->location - v).norm())
                best = &c;
        if (!best || (best->location - v).norm() > 1e-6)
            throw Error(ErrorKind::NotBlowupCandidate, "point " + item + " is not a critical point of K");
        out.push_back(*best);
    }
    return out;
}

} // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Bubble-configuration reduction engine for prescribed scalar curvature on S^n"};
    app.require_subcommand(1);

    int dim = 4;
    double tol = 1e-9, tau = 1e-4;
    int level = 3, q = 1;
    std::string name, config_path, k_path, points = "auto", schedule = "10,20,40,80", scenario = "tower",
                input_path, summary_path;
    bool with_gradient = false;

    auto* c_const = app.add_subcommand("constants", "print the constants table");
    c_const->add_option("--dim", dim, "dimension n")->required();
    c_const->add_option("--name", name, "single constant");

    auto* c_verify = app.add_subcommand("verify-constants", "run the identity audit");
    c_verify->add_option("--dim", dim, "dimension n")->required();
    c_verify->add_option("--tol", tol, "relative tolerance");

    auto* c_expand = app.add_subcommand("expand", "reduced energy, gradient and error budget");
    c_expand->add_option("--config", config_path)->required();
    c_expand->add_option("--k", k_path, "curvature field JSON");
    c_expand->add_flag("--gradient", with_gradient);

    auto* c_oracle = app.add_subcommand("oracle", "direct quadrature energy");
    c_oracle->add_option("--config", config_path)->required();
    c_oracle->add_option("--k", k_path);
    c_oracle->add_option("--level", level);

    auto* c_compare = app.add_subcommand("compare", "expansion vs oracle convergence table");
    c_compare->add_option("--config", config_path)->required();
    c_compare->add_option("--k", k_path);
    c_compare->add_option("--lambda-schedule", schedule);
    c_compare->add_option("--level", level);

    auto* c_solve = app.add_subcommand("solve", "predict and refine blow-up parameters");
    c_solve->add_option("--config", k_path, "curvature field JSON")->required();
    c_solve->add_option("--points", points, "auto, or points 'x0,..,xn;...'");
    c_solve->add_option("--tau", tau)->required();
    c_solve->add_option("--dim", dim);

    auto* c_scan = app.add_subcommand("scan", "exclusion scan");
    c_scan->add_option("--scenario", scenario)->required();
    c_scan->add_option("--dim", dim)->required();
    c_scan->add_option("--tau", tau);
    c_scan->add_option("--k", k_path)->required();
    c_scan->add_option("--summary", summary_path, "write the JSON summary here");

    auto* c_decomp = app.add_subcommand("decompose", "project an analytic ensemble onto q bubbles");
    c_decomp->add_option("--input", input_path)->required();
    c_decomp->add_option("--q", q);
    c_decomp->add_option("--level", level);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kInvalid;
    }

    try {
        if (*c_const) {
            require_dimension(dim, 3, 10);
            std::vector<std::string> names = name.empty() ? constant_names() : std::vector<std::string>{name};
            json j = json::array();
            for (const auto& nm : names) {
                const ConstantValue& v = constant_entry(nm, dim);
                j.push_back({{"name", nm}, {"n", dim}, {"value", v.value}, {"integrand", v.spec.integrand},
                             {"normalization", v.spec.normalization}, {"source", v.source}});
            }
            out << j.dump(2) << "\n";
            return kOk;
        }
        if (*c_verify) {
            require_dimension(dim, 3, 10);
            AuditReport r = verify_identities(dim, tol);
            out << r.to_text();
            return r.any_fail() ? kFail : kOk;
        }
        if (*c_expand) {
            Problem p = problem_from_file(config_path);
            CurvatureField K = field_for(p, k_path);
            const Configuration& c = p.config;
            json j;
            j["J"] = reduced_energy(c, K);
            ErrorBudget b = error_budget(c, K);
            j["error_budget"] = {{"value", b.value}, {"tau_sq", b.tau_sq}, {"grad_term", b.grad_term},
                                 {"lambda4", b.lambda4}, {"lambda_mass", b.lambda_mass},
                                 {"interaction", b.interaction}};
            j["k_tau_leading"] = k_tau_leading(c, K);
            if (with_gradient)
                j["gradient"] = gradient_json(reduced_gradient(normalize(c, K), K));
            out << j.dump(2) << "\n";
            return kOk;
        }
        if (*c_oracle) {
            Problem p = problem_from_file(config_path);
            CurvatureField K = field_for(p, k_path);
            EnergyBreakdown e = direct_energy(p.config, K, level);
            json j = {{"r", e.r}, {"k_tau", e.k_tau}, {"J", e.J}, {"r_err", e.r_err}, {"k_err", e.k_err},
                      {"J_err", e.J_err}, {"level", level}};
            out << j.dump(2) << "\n";
            return kOk;
        }
        if (*c_compare) {
            Problem p = problem_from_file(config_path);
            CurvatureField K = field_for(p, k_path);
            const Configuration base = p.config;
            const double l0 = base.entries[0].bubble.lambda;
            auto family = [&](double l) {
                Configuration c = base;
                for (auto& e : c.entries)
                    e.bubble.lambda *= l / l0;
                return c;
            };
            out << convergence_study(family, K, parse_list(schedule), level).to_csv();
            return kOk;
        }
        if (*c_solve) {
            CurvatureField K = CurvatureField::from_file(k_path);
            if (c_solve->count("--dim") && dim != K.n())
                throw Error(ErrorKind::DimensionMismatch, "--dim does not match K");
            auto pts = select_points(points, K);
            CriticalPrediction pr = predict(pts, tau, K);
            RefineResult rr = newton_refine(pr.config, K);
            json j;
            j["Theta"] = pr.Theta;
            if (pr.sigma)
                j["sigma"] = to_std(*pr.sigma);
            j["points"] = json::array();
            for (const auto& pp : pr.points)
                j["points"].push_back({{"x", to_std(pp.x)}, {"lambda_pred", pp.lambda}, {"a_shift", to_std(pp.a_shift)},
                                       {"a", to_std(pp.a)}, {"alpha_pred", pp.alpha}, {"correction", pp.correction}});
            j["prediction"] = config_json(pr.config);
            j["refinement"] = {{"status", refine_status_name(rr.status)}, {"residual", rr.residual},
                               {"iterations", rr.iterations}, {"message", rr.message},
                               {"config", config_json(rr.config)}};
            Certificate cert = residual_certificate(rr.config, K);
            j["certificate"] = {{"lower_bound", cert.lower_bound}, {"gradient_norm", cert.gradient_norm},
                                {"ratio", cert.ratio}, {"upper_bound", cert.upper_bound},
                                {"admissible_window", cert.admissible_window}};
            out << j.dump(2) << "\n";
            return rr.status == RefineStatus::Converged ? kOk : kNoConvergence;
        }
        if (*c_scan) {
            CurvatureField K = CurvatureField::from_file(k_path);
            if (dim != K.n())
                throw Error(ErrorKind::DimensionMismatch, "--dim does not match K");
            Scenario s = Scenario::make(scenario_from_name(scenario), dim, tau);
            ScanReport r = scan(s, K);
            out << r.to_csv();
            std::string summary = r.summary_json();
            if (!summary_path.empty()) {
                std::ofstream f(summary_path);
                if (!f)
                    throw Error(ErrorKind::InvalidInput, "cannot write " + summary_path);
                f << summary << "\n";
            }
            std::stringstream ss(summary);
            std::string line;
            while (std::getline(ss, line))
                out << "# " << line << "\n";
            return kOk;
        }
        if (*c_decomp) {
            AnalyticEnsemble u = AnalyticEnsemble::from_file(input_path);
            std::ifstream in(input_path);
            json raw = json::parse(in);
            Configuration init;
            init.n = u.n;
            if (raw.contains("init")) {
                init = problem_from_json_text(json{{"n", u.n}, {"entries", raw["init"]}}.dump()).config;
            } else {
                if (q > (int)u.bubbles.size())
                    throw Error(ErrorKind::InvalidInput, "--q exceeds the bubble components; supply \"init\"");
                init.entries.assign(u.bubbles.begin(), u.bubbles.begin() + q);
            }
            if (init.q() != q)
                throw Error(ErrorKind::InvalidInput, "init has a different number of entries than --q");
            DecompositionOptions opt;
            opt.level = level;
            DecompositionResult d = project_to_bubbles(u, init, opt);
            json j;
            j["config"] = config_json(d.config);
            j["v_norm_sq"] = d.v_norm_sq;
            j["u_norm_sq"] = d.u_norm_sq;
            j["max_relative_residual"] = d.max_relative_residual;
            j["iterations"] = d.iterations;
            j["ortho_residuals"] = json::array();
            for (const auto& r : d.ortho_residuals)
                j["ortho_residuals"].push_back(to_std(r));
            j["local_min_warning"] = d.local_min_warning;
            if (d.local_min_warning)
                j["warning"] = d.warning;
            out << j.dump(2) << "\n";
            return kOk;
        }
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_for(e.kind());
    } catch (const nlohmann::json::exception& e) {
        err << "InvalidInput: " << e.what() << "\n";
        return kInvalid;
    }
    return kInvalid;
}

int cli_dispatch(int argc, const char* const* argv) { return cli_dispatch(argc, argv, std::cout, std::cerr); }

} // namespace nirenberg
