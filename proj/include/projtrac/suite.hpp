#pragma once
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "projtrac/report.hpp"

namespace projtrac {

// Run configuration, read from an INI-style file:
//   [model]      name = minkowski | schwarzschild | expression, chart = spacelike | timelike | projective,
//                n, mass; expression models give coords = rho, y1, ... and boundary = rho
//   [metric]     g_<a>_<b> = expression (expression models)
//   [params]     named constants usable in every expression
//   [scale]      factor = expression multiplying the canonical tau (distinguished scale)
//   [sections]   label = omega expression, tau~ = tau + eps omega sigma
//   [anchors]    label = comma separated coordinates
//   [tolerances] check id = tolerance
//   [run]        order, seed, gauges, u0, report, homogeneous = true | false
struct RunConfig {
    std::string model = "minkowski";
    std::string chart = "spacelike";
    int n = 4;
    double mass = 1.0;
    std::vector<std::string> coords;
    std::string boundary;
    std::map<std::string, std::string> metric;
    std::map<std::string, double> params;
    std::string tau_factor;
    std::vector<std::pair<std::string, std::string>> sections;
    std::vector<std::pair<std::string, std::vector<double>>> anchors;
    std::map<std::string, double> tolerances;
    int order = 4;
    unsigned seed = 1;
    int gauges = 10;
    double u0 = 0.0;
    bool homogeneous = true;
    std::string report;
    // overrides every nonzero default tolerance when positive
    double global_tolerance = 0.0;
};

// Throws ConfigParseError on malformed input or violated invariants (order >= 2, tolerances > 0,
// anchors of the chart dimension).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Throws UnknownModel; anchors outside the chart domain raise the chart's own error.
void validate_config(const RunConfig& cfg);

struct SuiteReport {
    std::vector<std::pair<std::string, std::string>> model;  // echo of the model section, in order
    int order = 0;
    std::vector<CheckReport> checks;
    bool pass = false;

    int count_passed() const;
    int count_failed() const;
    int count_excluded() const;
};

// Executes the registered battery for every anchor (and the homogeneous model once). Per-check errors
// are captured in the report; checks excluded at null-infinity anchors do not enter the verdict.
// PROJTRAC_THREADS sets the number of worker threads (default 1); the report order is fixed.
SuiteReport run_suite(const RunConfig& cfg);

std::string to_json(const SuiteReport& r);
SuiteReport suite_from_json(const std::string& text);
bool operator==(const CheckReport& a, const CheckReport& b);
bool operator==(const SuiteReport& a, const SuiteReport& b);

// rho-expansion (or Taylor) table of a quantity at the first anchor, or the labelled one.
// Quantities: upsilon, chi, nu, lambda_bar, N, J, f, phi. Throws UnknownQuantity.
struct ExpansionTable {
    std::string quantity;
    std::string anchor;
    std::string order_kind;  // "rho" or "total"
    // at boundary anchors: coefficients of rho^order and of sigma^order at the anchor, the second
    // with the boundary coordinates held fixed; inside: the value (order 0) in both columns
    struct Row {
        std::string component;
        int order;
        double rho;
        double sigma;
    };
    std::vector<Row> rows;
    std::string diagnostic;  // PoleDetected message when upsilon keeps a pole
};
ExpansionTable expand_quantity(const RunConfig& cfg, const std::string& quantity, int order,
                               const std::string& anchor_label = "");
std::string format_table(const ExpansionTable& t);

}  // namespace projtrac
