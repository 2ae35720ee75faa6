#include "projtrac/report.hpp"

#include <algorithm>
#include <map>

namespace projtrac {

double CheckReport::max_residual() const {
    double m = 0.0;
    for (const auto& [o, v] : residuals) m = std::max(m, v);
    for (const auto& p : parts)
        if (!p.excluded) m = std::max(m, p.max_residual());
    return m;
}

CheckReport& CheckReport::finalize() {
    pass = error.empty() && (!residuals.empty() || !parts.empty());
    for (const auto& [o, v] : residuals)
        if (!(v <= tolerance)) pass = false;
    for (auto& p : parts)
        if (!p.finalize().pass && !p.excluded) pass = false;
    return *this;
}

CheckReport make_check(std::string id, std::string statement, std::string anchor, double tolerance) {
    CheckReport r;
    r.id = std::move(id);
    r.statement = std::move(statement);
    r.anchor = std::move(anchor);
    r.tolerance = tolerance;
    return r;
}

void merge_residuals(CheckReport& r, const std::vector<std::pair<int, double>>& more) {
    std::map<int, double> m(r.residuals.begin(), r.residuals.end());
    for (const auto& [o, v] : more) m[o] = std::max(m.count(o) ? m[o] : 0.0, v);
    r.residuals.assign(m.begin(), m.end());
}

void add_residuals(CheckReport& r, const Field& f, int lo, int hi) {
    if (f.precision() < hi && r.error.empty())
        r.error = "OrderExhausted: residual known through order " + std::to_string(f.precision()) + ", need " +
                  std::to_string(hi);
    std::vector<std::pair<int, double>> prof;
    for (int d = lo; d <= std::min(hi, f.precision()); ++d) prof.emplace_back(d, f.degree_norm(d));
    merge_residuals(r, prof);
}

void add_residuals(CheckReport& r, const Series& s, int lo, int hi) {
    if (s.precision() < hi && r.error.empty())
        r.error = "OrderExhausted: residual known through order " + std::to_string(s.precision()) + ", need " +
                  std::to_string(hi);
    std::vector<std::pair<int, double>> prof;
    for (int d = lo; d <= std::min(hi, s.precision()); ++d) prof.emplace_back(d, s.degree_norm(d));
    merge_residuals(r, prof);
}

void add_rho_residuals(CheckReport& r, const Series& s, int lo, int hi) {
    r.order_kind = "rho";
    std::vector<std::pair<int, double>> prof;
    for (int k = lo; k <= hi; ++k) {
        if (k > s.precision()) {
            if (r.error.empty())
                r.error = "OrderExhausted: rho^" + std::to_string(k) + " coefficient beyond precision " +
                          std::to_string(s.precision());
            break;
        }
        prof.emplace_back(k, s.rho_coefficient(k).max_abs());
    }
    merge_residuals(r, prof);
}

void add_rho_residuals(CheckReport& r, const Field& f, int lo, int hi) {
    for (size_t i = 0; i < f.size(); ++i) add_rho_residuals(r, f[i], lo, hi);
}

std::string anchor_label(const Context& ctx) {
    std::string s;
    for (int i = 0; i < ctx.dim(); ++i) {
        if (i) s += ",";
        s += ctx.names()[i] + "=" + std::to_string(ctx.anchor()[i]);
    }
    return s;
}

int lowest_order(const Field& f) {
    int v = 0;
    for (size_t i = 0; i < f.size(); ++i) v = std::min(v, f[i].valuation());
    return v;
}

}  // namespace projtrac
