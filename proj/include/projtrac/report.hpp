#pragma once
#include <string>
#include <utility>
#include <vector>

#include "projtrac/geometry.hpp"

namespace projtrac {

struct CheckReport {
    std::string id;
    std::string statement;
    std::string anchor;
    // (order, residual) pairs; orders count total degree at the anchor ("total") or the power
    // of the boundary variable ("rho"); negative orders are poles
    std::vector<std::pair<int, double>> residuals;
    std::string order_kind = "total";
    double tolerance = 1e-9;
    bool pass = false;
    double seconds = 0.0;
    std::string error;
    // sub-checks; the verdict requires each of them
    std::vector<CheckReport> parts;
    // measured quantities worth reporting (determinants, control sizes), in insertion order
    std::vector<std::pair<std::string, double>> observed;
    // documented exclusion (e.g. a null-infinity anchor); kept in the report, ignored by the suite verdict
    bool excluded = false;

    double max_residual() const;
    // verdict: no error, every residual within tolerance and every part that is not excluded passing
    CheckReport& finalize();
};

CheckReport make_check(std::string id, std::string statement, std::string anchor, double tolerance);

// max coefficient per total degree for degrees lo..hi; a field known to less than hi
// sets an error on the report instead of guessing.
void add_residuals(CheckReport& r, const Field& f, int lo, int hi);
void add_residuals(CheckReport& r, const Series& s, int lo, int hi);
// combine residual profiles by taking the maximum per order
void merge_residuals(CheckReport& r, const std::vector<std::pair<int, double>>& more);
// residuals keyed by the power of rho: max |coefficient| of the rho^k coefficient jet, k = lo..hi
void add_rho_residuals(CheckReport& r, const Field& f, int lo, int hi);
void add_rho_residuals(CheckReport& r, const Series& s, int lo, int hi);
// lowest order worth reporting: the most negative valuation among components, capped at 0
int lowest_order(const Field& f);
// "name=value,..." for the anchor of a context
std::string anchor_label(const Context& ctx);

}  // namespace projtrac
