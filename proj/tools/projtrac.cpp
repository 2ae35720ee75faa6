// projtrac verify | expand | orbits
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "projtrac/homogeneous.hpp"
#include "projtrac/suite.hpp"

using namespace projtrac;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_config = 2;

bool config_like(ErrorCode c) {
    switch (c) {
        case ErrorCode::ConfigParseError:
        case ErrorCode::UnknownModel:
        case ErrorCode::UnknownQuantity:
        case ErrorCode::UnknownVariable:
        case ErrorCode::EvaluationOutsideDomain:
        case ErrorCode::ChartMismatch:
        case ErrorCode::AnchorInsideHorizon:
        case ErrorCode::RemovedPoint: return true;
        default: return false;
    }
}

int verify(const std::string& path, int order, double tol, const std::string& report_path) {
    RunConfig cfg = load_config(path);
    if (order > 0) {
        if (order < 2) throw Error(ErrorCode::ConfigParseError, "--order must be at least 2");
        cfg.order = order;
    }
    if (tol > 0) cfg.global_tolerance = tol;
    if (!report_path.empty()) cfg.report = report_path;
    SuiteReport rep = run_suite(cfg);
    for (const auto& c : rep.checks) {
        const char* tag = c.excluded ? "SKIP" : c.pass ? "PASS" : "FAIL";
        std::printf("[%s] %-36s %-40s max_residual=%.2e%s%s\n", tag, c.id.c_str(), c.anchor.c_str(), c.max_residual(),
                    c.error.empty() ? "" : "  ", c.error.c_str());
    }
    std::printf("%d passed, %d failed, %d excluded\n", rep.count_passed(), rep.count_failed(), rep.count_excluded());
    if (!cfg.report.empty()) {
        std::ofstream out(cfg.report, std::ios::binary);
        if (!out) throw Error(ErrorCode::ConfigParseError, "cannot write " + cfg.report);
        out << to_json(rep);
    }
    return rep.pass ? exit_pass : exit_fail;
}

int expand(const std::string& path, const std::string& quantity, int order, const std::string& anchor) {
    RunConfig cfg = load_config(path);
    ExpansionTable t = expand_quantity(cfg, quantity, order, anchor);
    std::fputs(format_table(t).c_str(), stdout);
    return t.diagnostic.empty() ? exit_pass : exit_fail;
}

int orbits(int n, const std::vector<std::string>& point) {
    HomogeneousModel m = homogeneous_model(n);
    if (static_cast<int>(point.size()) != m.size())
        throw Error(ErrorCode::ConfigParseError, "--point needs " + std::to_string(m.size()) +
                                                     " homogeneous coordinates (x_0, x_1..x_n, x_+)");
    std::vector<Rational> x;
    for (const auto& p : point) {
        try {
            x.emplace_back(p);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ConfigParseError, "cannot read coordinate '" + p + "'");
        }
    }
    const Orbit o = orbit_classify(m, x);
    std::cout << "orbit: " << orbit_name(o) << "\n";
    std::cout << "base_orbit: " << base_orbit_name(base_of(o)) << "\n";
    std::cout << "quadratic: " << m.quadratic(x) << "\n";
    std::cout << "projection:";
    for (const auto& v : project(x)) std::cout << " " << v;
    std::cout << "\n";
    return exit_pass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Projective tractor checks for projectively compact Ricci-flat metrics"};
    app.require_subcommand(1);

    std::string config, report, quantity, anchor;
    int order = 0, dim = 4;
    double tol = 0.0;
    std::vector<std::string> point;

    auto* v = app.add_subcommand("verify", "run the check battery and report");
    v->add_option("--config", config, "configuration file")->required();
    v->add_option("--order", order, "jet order K (>= 2)");
    v->add_option("--tol", tol, "tolerance for every non-exact check");
    v->add_option("--report", report, "write the JSON report here");

    auto* e = app.add_subcommand("expand", "print the expansion of a quantity at an anchor");
    e->add_option("--config", config, "configuration file")->required();
    e->add_option("--quantity", quantity, "upsilon, chi, nu, lambda_bar, N, J, f or phi")->required();
    e->add_option("--order", order, "highest order to print")->required();
    e->add_option("--anchor", anchor, "anchor label (default: the first)");

    auto* o = app.add_subcommand("orbits", "classify a point of the homogeneous model");
    o->add_option("--dim", dim, "dimension n")->required();
    o->add_option("--point", point, "homogeneous coordinates x_0 x_1 .. x_n x_+ (rationals)")->required()->expected(-1)->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : exit_config;
    }
    try {
        if (*v) return verify(config, order, tol, report);
        if (*e) return expand(config, quantity, order, anchor);
        return orbits(dim, point);
    } catch (const Error& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return config_like(err.code()) ? exit_config : exit_fail;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return exit_fail;
    }
}
