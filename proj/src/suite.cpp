#include "projtrac/suite.hpp"

#include <algorithm>
#include <atomic>
#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "projtrac/carroll.hpp"
#include "projtrac/checks.hpp"
#include "projtrac/homogeneous.hpp"
#include "projtrac/models.hpp"

namespace projtrac {

namespace {

using ptree = boost::property_tree::ptree;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigParseError, what); }

template <class T>
T read_value(const std::string& section, const std::string& key, const std::string& text) {
    std::istringstream in(text);
    T v{};
    in >> v;
    std::string rest;
    if (in.fail() || (in >> rest)) config_error("[" + section + "] " + key + ": cannot read '" + text + "'");
    return v;
}

bool read_bool(const std::string& section, const std::string& key, std::string text) {
    boost::to_lower(text);
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    config_error("[" + section + "] " + key + ": expected true or false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    boost::split(out, text, boost::is_any_of(","));
    for (auto& s : out) boost::trim(s);
    if (out.size() == 1 && out[0].empty()) out.clear();
    return out;
}

void only_keys(const std::string& section, const ptree& t, std::set<std::string> allowed) {
    for (const auto& [k, v] : t)
        if (!allowed.count(k)) config_error("[" + section + "] unknown key '" + k + "'");
}

const std::set<std::string> known_sections = {"model", "metric", "params", "scale", "sections",
                                              "anchors", "tolerances", "run"};

}  // namespace

RunConfig parse_config(const std::string& text) {
    ptree root;
    try {
        std::istringstream in(text);
        boost::property_tree::ini_parser::read_ini(in, root);
    } catch (const boost::property_tree::ini_parser_error& e) {
        config_error(std::string("line ") + std::to_string(e.line()) + ": " + e.message());
    }
    RunConfig c;
    for (const auto& [k, v] : root) {
        if (!known_sections.count(k)) config_error("unknown section [" + k + "]");
        if (!v.data().empty() && v.empty()) config_error("key '" + k + "' outside a section");
    }
    if (auto m = root.get_child_optional("model")) {
        only_keys("model", *m, {"name", "chart", "n", "mass", "coords", "boundary"});
        c.model = m->get<std::string>("name", c.model);
        c.chart = m->get<std::string>("chart", c.chart);
        if (auto v = m->get_optional<std::string>("n")) c.n = read_value<int>("model", "n", *v);
        if (auto v = m->get_optional<std::string>("mass")) c.mass = read_value<double>("model", "mass", *v);
        if (auto v = m->get_optional<std::string>("coords")) c.coords = split_list(*v);
        c.boundary = m->get<std::string>("boundary", "");
    }
    if (auto m = root.get_child_optional("metric"))
        for (const auto& [k, v] : *m) c.metric[k] = v.data();
    if (auto m = root.get_child_optional("params"))
        for (const auto& [k, v] : *m) c.params[k] = read_value<double>("params", k, v.data());
    if (auto m = root.get_child_optional("scale")) {
        only_keys("scale", *m, {"factor"});
        c.tau_factor = m->get<std::string>("factor", "");
    }
    if (auto m = root.get_child_optional("sections"))
        for (const auto& [k, v] : *m) c.sections.emplace_back(k, v.data());
    if (auto m = root.get_child_optional("anchors"))
        for (const auto& [k, v] : *m) {
            std::vector<double> a;
            for (const auto& x : split_list(v.data())) a.push_back(read_value<double>("anchors", k, x));
            c.anchors.emplace_back(k, a);
        }
    if (auto m = root.get_child_optional("tolerances"))
        for (const auto& [k, v] : *m) c.tolerances[k] = read_value<double>("tolerances", k, v.data());
    if (auto m = root.get_child_optional("run")) {
        only_keys("run", *m, {"order", "seed", "gauges", "u0", "report", "homogeneous"});
        if (auto v = m->get_optional<std::string>("order")) c.order = read_value<int>("run", "order", *v);
        if (auto v = m->get_optional<std::string>("seed")) c.seed = read_value<unsigned>("run", "seed", *v);
        if (auto v = m->get_optional<std::string>("gauges")) c.gauges = read_value<int>("run", "gauges", *v);
        if (auto v = m->get_optional<std::string>("u0")) c.u0 = read_value<double>("run", "u0", *v);
        if (auto v = m->get_optional<std::string>("homogeneous")) c.homogeneous = read_bool("run", "homogeneous", *v);
        c.report = m->get<std::string>("report", "");
    }

    if (c.order < 2) config_error("order must be at least 2, got " + std::to_string(c.order));
    if (c.gauges < 1) config_error("gauges must be positive");
    for (const auto& [k, v] : c.tolerances)
        if (!(v > 0)) config_error("tolerance for " + k + " must be positive");
    if (c.anchors.empty()) config_error("no anchors given");
    std::set<std::string> labels;
    for (const auto& [k, a] : c.anchors)
        if (!labels.insert(k).second) config_error("duplicate anchor " + k);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

Chart resolve_chart(const RunConfig& c) {
    if (c.model == "minkowski") {
        if (c.chart == "spacelike") return minkowski_wedge_chart(c.n, Wedge::Spacelike);
        if (c.chart == "timelike") return minkowski_wedge_chart(c.n, Wedge::Timelike);
        if (c.chart == "projective") return minkowski_projective_chart(c.n);
        if (c.chart == "cartesian") return minkowski_cartesian_chart(c.n);
        throw Error(ErrorCode::UnknownModel, "minkowski has no chart '" + c.chart + "'");
    }
    if (c.model == "schwarzschild") return schwarzschild_chart(c.n, c.mass);
    if (c.model == "expression") {
        if (c.coords.empty()) throw Error(ErrorCode::UnknownModel, "expression model without coords");
        int b = -1;
        if (!c.boundary.empty()) {
            auto it = std::find(c.coords.begin(), c.coords.end(), c.boundary);
            if (it == c.coords.end()) throw Error(ErrorCode::UnknownModel, "boundary '" + c.boundary + "' is not a coordinate");
            b = static_cast<int>(it - c.coords.begin());
        }
        return expression_chart("expression", c.coords, b, c.metric, c.params);
    }
    throw Error(ErrorCode::UnknownModel, "unknown model '" + c.model + "'");
}

bool flat_model(const RunConfig& c) { return c.model == "minkowski" || (c.model == "schwarzschild" && c.mass == 0.0); }

int model_order(const RunConfig& c) { return c.order + 4; }

}  // namespace

void validate_config(const RunConfig& cfg) {
    Chart ch = resolve_chart(cfg);
    for (const auto& [label, a] : cfg.anchors) {
        if (static_cast<int>(a.size()) != ch.dim())
            config_error("anchor " + label + " has " + std::to_string(a.size()) + " coordinates, the chart has " +
                         std::to_string(ch.dim()));
        if (ch.check_anchor) ch.check_anchor(a);
    }
}

int SuiteReport::count_passed() const {
    return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckReport& c) { return !c.excluded && c.pass; }));
}
int SuiteReport::count_failed() const {
    return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckReport& c) { return !c.excluded && !c.pass; }));
}
int SuiteReport::count_excluded() const {
    return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckReport& c) { return c.excluded; }));
}

namespace {

void set_tolerance(CheckReport& r, double tol) {
    if (r.tolerance > 0) r.tolerance = tol;
    for (auto& p : r.parts) set_tolerance(p, tol);
}

// Runs the per-anchor battery; every registered check leaves exactly one entry.
class Battery {
public:
    Battery(const RunConfig& cfg, const Chart& chart, std::string label, std::vector<double> anchor)
        : cfg_(cfg), chart_(chart), label_(std::move(label)), anchor_(std::move(anchor)), hi_(cfg.order - 1) {}

    std::vector<CheckReport> run();

private:
    const RunConfig& cfg_;
    const Chart& chart_;
    std::string label_;
    std::vector<double> anchor_;
    int hi_;
    std::vector<CheckReport> out_;
    bool halted_ = false;

    double tol_for(const std::string& id, double fallback) const {
        auto it = cfg_.tolerances.find(id);
        if (it != cfg_.tolerances.end()) return it->second;
        if (cfg_.global_tolerance > 0 && fallback > 0) return cfg_.global_tolerance;
        return fallback;
    }

    void push(CheckReport r, double seconds) {
        r.anchor = label_ + (r.anchor.empty() ? "" : " (" + r.anchor + ")");
        const double tol = tol_for(r.id, r.tolerance);
        if (tol != r.tolerance) set_tolerance(r, tol);
        r.seconds = seconds;
        r.finalize();
        out_.push_back(std::move(r));
    }

    // id/statement are recorded for the error path; body returns the report
    void check(const std::string& id, const std::string& statement, const std::function<CheckReport()>& body,
               const std::string& suffix = "") {
        if (halted_) return;
        auto t0 = std::chrono::steady_clock::now();
        CheckReport r;
        try {
            r = body();
        } catch (const std::exception& e) {
            r = make_check(id, statement, "", 0.0);
            r.error = e.what();
            if (const auto* pe = dynamic_cast<const Error*>(&e); pe && pe->code() == ErrorCode::NullInfinityAnchor)
                r.excluded = true;
        }
        if (!suffix.empty()) r.id += ":" + suffix;
        push(std::move(r), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }

    // control: the measured size must exceed the threshold
    void control(const std::string& id, const std::string& statement, const std::function<double()>& body,
                 double threshold) {
        check(id, statement, [&] {
            CheckReport r = make_check(id, statement, "", 0.0);
            const double v = body();
            r.observed.emplace_back("size", v);
            r.observed.emplace_back("threshold", threshold);
            if (v > threshold) r.residuals.emplace_back(0, 0.0);
            else r.error = "negative control did not fire: size " + std::to_string(v);
            return r;
        });
    }

    void exclude(const std::string& id, const std::string& statement, const std::string& why) {
        CheckReport r = make_check(id, statement, "", 0.0);
        r.error = "NullInfinityAnchor: " + why;
        r.excluded = true;
        push(std::move(r), 0.0);
    }

    TauSpec base_spec() const {
        TauSpec sp;
        sp.factor = cfg_.tau_factor;
        sp.params = cfg_.params;
        return sp;
    }

    std::vector<std::pair<std::string, std::string>> sections() const {
        if (!cfg_.sections.empty()) return cfg_.sections;
        std::vector<std::string> t;
        for (int i = 0; i < chart_.dim(); ++i)
            if (i != chart_.boundary) t.push_back(chart_.coords[i]);
        const std::string& a = t[0];
        const std::string& b = t.size() > 1 ? t[1] : t[0];
        return {{"default", "0.2+0.3*" + a + "+0.1*" + a + "*" + b}};
    }

    std::string tangential_coord() const {
        for (int i = 0; i < chart_.dim(); ++i)
            if (i != chart_.boundary) return chart_.coords[i];
        return chart_.coords[0];
    }

    void interior(std::shared_ptr<const CompactModel> m, std::shared_ptr<const ScaledModel> s);
    void boundary(std::shared_ptr<const CompactModel> m, std::shared_ptr<const ScaledModel> s);
    void null_boundary(std::shared_ptr<const ScaledModel> s);
    void tau_changes(std::shared_ptr<const CompactModel> m, std::shared_ptr<const ScaledModel> s, bool at_boundary);
    void carroll(std::shared_ptr<const CompactModel> m);
};

std::vector<CheckReport> Battery::run() {
    const bool flat = flat_model(cfg_);
    std::shared_ptr<const CompactModel> m;
    check("ricci_flat", "the metric is Ricci-flat through the checked order", [&] {
        m = std::make_shared<const CompactModel>(build_compact_model(chart_, anchor_, model_order(cfg_), cfg_.order));
        CheckReport r = make_check("ricci_flat", "the metric is Ricci-flat through the checked order", "", 1e-8);
        r.residuals.emplace_back(0, m->ricci_residual);
        return r;
    });
    if (!m) return std::move(out_);

    const bool at_boundary = m->ctx.at_boundary();
    const bool null_point = at_boundary && m->orbit_sign == 0;
    std::shared_ptr<const ScaledModel> s;
    check("distinguished_scale", "the configured tau is a distinguished scale at the anchor", [&] {
        // no distinguished scale reaches a null boundary point; use the canonical tau there
        TauSpec sp = null_point ? TauSpec{} : base_spec();
        if (null_point) sp.require_distinguished = false;
        s = std::make_shared<const ScaledModel>(scale_model(m, sp));
        CheckReport r = make_check("distinguished_scale", "the configured tau is a distinguished scale at the anchor", "", 0.0);
        r.residuals.emplace_back(0, 0.0);
        return r;
    });
    if (!s) return std::move(out_);

    check("model_invariants", "|detd zeta| = sigma^2, lambda_0 iota^* nu = 1 and a constant curvature boundary metric",
          [&] { return model_invariants_check(*s, hi_); });
    check("tractor_parallel", "nabla H = 0, nabla I = 0, H I = 0 (and Omega = 0 on flat models)", [&] {
        CheckReport r = tractor_parallel_check(*s, hi_, flat);
        // curved models are checked through the Ricci tolerance
        if (!flat) r.tolerance = std::max(r.tolerance, 1e-8);
        return r;
    });
    check("schouten_asymptotics", "Schouten identities from nabla H = 0 and the asymptotic form of P",
          [&] { return schouten_asymptotics_check(*s, hi_); });

    if (!at_boundary) interior(m, s);
    else if (null_point) null_boundary(s);
    else boundary(m, s);
    return std::move(out_);
}

void Battery::interior(std::shared_ptr<const CompactModel> m, std::shared_ptr<const ScaledModel> s) {
    const bool flat = flat_model(cfg_);
    check("metric_gauge_uniqueness", "metric_gauge returns upsilon = -sigma^-1 zeta Z from any start",
          [&] { return metric_gauge_uniqueness_check(s, cfg_.gauges, cfg_.seed, hi_); });
    GaugedStructure mg = metric_gauge_structure(s);
    check("extended_parallel", "the extended metric is parallel", [&] { return parallel_check(mg, hi_); }, "metric");
    check("extended_metric_relations", "H phi + J I = delta, f I + J phi = 0, J I = 1 and the lambda relations",
          [&] { return extended_metric_relations_check(mg, hi_); }, "metric");
    if (flat)
        check("extended_flatness", "F_ab = 0", [&] { return extended_flatness_check(mg, hi_ - 1); }, "metric");
    check("extended_parallel", "the constructed extended metric is parallel",
          [&] { return parallel_check(constructed_structure(s), hi_); }, "constructed");
    check("geodesic", "|nu|^-1/2 N is affinely geodesic", [&] { return geodesic_check(*s, hi_); });
    control("geodesic_negative_control", "a perturbed field is not geodesic",
            [&] { return geodesic_negative_control(*s, hi_).max_residual(); }, 1e-3);
    tau_changes(m, s, false);
}

void Battery::null_boundary(std::shared_ptr<const ScaledModel>) {
    const std::string why = "lambda_0 vanishes below the anchor";
    exclude("scale_criterion", "distinguished scale criterion", why);
    exclude("boundary_gauge", "joint gauge fixing", why);
    exclude("extended_parallel:constructed", "the constructed extended metric is parallel", why);
    exclude("extended_invertibility", "the extended metric is invertible", why);
    exclude("geodesic", "|nu|^-1/2 N is affinely geodesic", why);
    exclude("tau_change_table", "order table for a change of tau", why);
    exclude("upsilon_shift", "change of iota^* upsilon under a change of tau", why);
    exclude("carroll_structure", "Carrollian structure on the extended boundary", why);
    exclude("vertical_curvature", "vertical curvature and transport", why);
    exclude("section_change", "change of section", why);
    exclude("boundary_tractors", "projective tractors of the extended boundary", why);
}

void Battery::boundary(std::shared_ptr<const CompactModel> m, std::shared_ptr<const ScaledModel> s) {
    const bool flat = flat_model(cfg_);
    check("scale_criterion", "a distinguished scale: N pole-free and lambda_0 = -detd hbar = iota^* nu^-1 = +-iota^* tau^2",
          [&] { return scale_criterion_check(*s, hi_); });
    check("scale_negative_control", "a rescaled tau is rejected",
          [&] { return scale_negative_control(m, "1+0.3*" + tangential_coord()); });
    std::optional<GaugedStructure> bg;
    check("boundary_gauge", "joint gauge fixing", [&] {
        bg = boundary_gauge(s);
        return boundary_gauge_check(*bg, hi_);
    });
    std::optional<GaugedStructure> cs;
    check("extended_parallel", "the constructed extended metric is parallel", [&] {
        cs = constructed_structure(s);
        return parallel_check(*cs, hi_);
    }, "constructed");
    if (cs) {
        check("extended_metric_relations", "H phi + J I = delta, f I + J phi = 0, J I = 1 and the lambda relations",
              [&] { return extended_metric_relations_check(*cs, hi_); }, "constructed");
        check("extended_invertibility", "the extended metric is invertible",
              [&] { return extended_invertibility_check(*cs); });
        if (flat)
            check("extended_flatness", "F_ab = 0", [&] { return extended_flatness_check(*cs, hi_ - 1); }, "constructed");
    }
    check("geodesic", "|nu|^-1/2 N is affinely geodesic", [&] { return geodesic_check(*s, hi_); });
    control("geodesic_negative_control", "a perturbed field is not geodesic",
            [&] { return geodesic_negative_control(*s, hi_).max_residual(); }, 1e-3);
    tau_changes(m, s, true);
    carroll(m);
}

void Battery::tau_changes(std::shared_ptr<const CompactModel> m, std::shared_ptr<const ScaledModel> s, bool at_boundary) {
    for (const auto& [label, omega] : sections()) {
        std::optional<TauChange> tc;
        check("tau_transition", "upsilon of tau~ = upsilon of tau - nabla chi", [&] {
            TauSpec sp = base_spec();
            sp.omega = omega;
            tc = gauge_change_of_tau(s, std::make_shared<const ScaledModel>(scale_model(m, sp)));
            return transition_check(*tc, hi_);
        }, label);
        if (!at_boundary || !tc) continue;
        check("tau_change_table", "order table for chi~", [&] { return tau_change_table_check(*tc, omega, cfg_.params); },
              label);
        check("upsilon_shift", "iota^* upsilon~ - iota^* upsilon = tau_0 nabla nabla omega + eps tau_0^-1 hbar omega",
              [&] { return upsilon_shift_check(*tc, omega, cfg_.params); }, label);
    }
}

void Battery::carroll(std::shared_ptr<const CompactModel> m) {
    const bool flat = flat_model(cfg_);
    std::shared_ptr<ExtendedBoundary> ext;
    check("induced_connection", "the induced non-effective connection", [&] {
        TauSpec base = base_spec();
        ext = std::make_shared<ExtendedBoundary>(extended_boundary(m, cfg_.u0, base));
        register_section(*ext, "base", scale_model(m, base));
        for (const auto& [label, omega] : sections()) {
            TauSpec sp = base;
            sp.omega = omega;
            register_section(*ext, label, scale_model(m, sp));
        }
        const auto secs = sections();
        const std::string om0 = secs.front().second, l0 = secs.front().first;
        TauSpec sp = base;
        sp.omega = om0 + "+" + chart_.coords[chart_.boundary] + "*(1+0.5*" + tangential_coord() + ")";
        register_section(*ext, l0 + "_shifted", scale_model(m, sp));
        return induced_connection_check(induced_noneffective_connection(section_scale(*ext, "base")), hi_);
    });
    if (!ext) return;
    std::shared_ptr<const ExtendedBoundary> e = ext;
    std::optional<CarrollConnection> c0;
    check("carroll_structure", "torsion-free Carrollian connection with nabla h = 0, nabla n = 0", [&] {
        c0 = effective_cartan_connection(e, "base");
        return carroll_structure_check(*c0, hi_);
    });
    if (!c0) return;
    check("vertical_curvature", "n^c F_cd = 0 and vertical transport", [&] { return vertical_curvature_check(*c0, hi_); });
    control("vertical_negative_control", "a u-dependent tractor is not vertically parallel",
            [&] { return vertical_negative_control(*c0); }, 1e-3);
    if (flat) check("cartan_flatness", "the Cartan curvature vanishes", [&] { return cartan_flatness_check(*c0, hi_); });
    for (const auto& [label, omega] : sections())
        check("section_change", "u -> u - omega and the Hessian shift", [&] {
            return section_change_check(*c0, effective_cartan_connection(e, label), hi_);
        }, label);
    const std::string l0 = sections().front().first;
    check("section_bit_identity", "iota^* upsilon depends on tau only through the section", [&] {
        auto a = effective_cartan_connection(e, l0);
        auto b = effective_cartan_connection(e, l0 + "_shifted");
        CheckReport r = make_check("section_bit_identity", "iota^* upsilon depends on tau only through the section", "", 0.0);
        bool same = a.induced.upsilon.size() == b.induced.upsilon.size();
        for (size_t i = 0; same && i < a.induced.upsilon.size(); ++i)
            same = a.induced.upsilon[i].coefficients() == b.induced.upsilon[i].coefficients();
        if (same) r.residuals.emplace_back(0, 0.0);
        else r.error = "iota^* upsilon differs for taus with equal sections";
        return r;
    });
    check("boundary_tractors", "nabla I = 0, nabla H = 0, I H = 0 on the extended boundary",
          [&] { return boundary_tractor_check(boundary_projective_tractors(*c0), e->ctx, hi_); });
    const std::string y = e->ctx.names().front();
    check("adapted_scale_invariance", "tractor components agree across adapted scales",
          [&] { return adapted_scale_invariance_check(*c0, "0.3*" + y + "+0.1*" + y + "^2", {}, hi_); });
    check("density_pullback", "L_nbar of pulled back densities vanishes", [&] { return density_pullback_check(*c0, hi_); });
    control("density_negative_control", "L_nbar (u tau0) does not vanish",
            [&] { return std::abs(density_negative_control(*c0)); }, 1e-3);
}

std::vector<CheckReport> homogeneous_battery(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    auto push = [&](const std::string& id, const std::function<CheckReport()>& f) {
        auto t0 = std::chrono::steady_clock::now();
        CheckReport r;
        try {
            r = f();
        } catch (const std::exception& e) {
            r = make_check(id, "homogeneous model", "", 0.0);
            r.error = e.what();
        }
        auto it = cfg.tolerances.find(r.id);
        if (it != cfg.tolerances.end()) set_tolerance(r, it->second);
        r.anchor = "homogeneous n=" + std::to_string(cfg.n);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.finalize();
        out.push_back(std::move(r));
    };
    std::optional<HomogeneousModel> hm;
    push("homogeneous_model", [&] {
        hm = homogeneous_model(cfg.n);
        CheckReport r = make_check("homogeneous_model", "G, P and K of the homogeneous model", "", 0.0);
        r.residuals.emplace_back(0, 0.0);
        return r;
    });
    if (!hm) return out;
    push("kernel", [&] { return kernel_check(*hm, cfg.seed); });
    push("orbit_invariance", [&] { return orbit_invariance_check(*hm, 100, cfg.seed); });
    push("fibration", [&] { return fibration_check(*hm, 50, cfg.seed); });
    push("maurer_cartan", [&] { return maurer_cartan_check(*hm); });
    return out;
}

int thread_count() {
    if (const char* v = std::getenv("PROJTRAC_THREADS")) {
        char* end = nullptr;
        const long t = std::strtol(v, &end, 10);
        if (end != v && *end == '\0' && t > 0) return static_cast<int>(std::min<long>(t, 64));
    }
    return 1;
}

}  // namespace

SuiteReport run_suite(const RunConfig& cfg) {
    validate_config(cfg);
    const Chart chart = resolve_chart(cfg);
    SuiteReport rep;
    rep.model = {{"name", cfg.model}, {"chart", chart.id}, {"n", std::to_string(cfg.n)}};
    if (cfg.model == "schwarzschild") {
        std::ostringstream m;
        m << cfg.mass;
        rep.model.emplace_back("mass", m.str());
    }
    if (!cfg.tau_factor.empty()) rep.model.emplace_back("tau_factor", cfg.tau_factor);
    rep.order = cfg.order;

    const size_t jobs = cfg.anchors.size() + (cfg.homogeneous ? 1 : 0);
    std::vector<std::vector<CheckReport>> results(jobs);
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t j; (j = next++) < jobs;) {
            if (j < cfg.anchors.size())
                results[j] = Battery(cfg, chart, cfg.anchors[j].first, cfg.anchors[j].second).run();
            else
                results[j] = homogeneous_battery(cfg);
        }
    };
    const int threads = std::min<int>(thread_count(), static_cast<int>(jobs));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& r : results)
        for (auto& c : r) rep.checks.push_back(std::move(c));
    rep.pass = rep.count_failed() == 0;
    return rep;
}

// JSON

namespace {

using ojson = nlohmann::ordered_json;

ojson number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double read_number(const ojson& j) {
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    throw Error(ErrorCode::ConfigParseError, "report: bad number '" + s + "'");
}

ojson check_json(const CheckReport& c) {
    ojson j;
    j["id"] = c.id;
    j["statement"] = c.statement;
    j["anchor"] = c.anchor;
    j["pass"] = c.pass;
    j["excluded"] = c.excluded;
    j["error"] = c.error;
    j["tolerance"] = number(c.tolerance);
    j["max_residual"] = number(c.max_residual());
    j["order_kind"] = c.order_kind;
    ojson res = ojson::array();
    for (const auto& [k, v] : c.residuals) res.push_back(ojson::array({k, number(v)}));
    j["residuals"] = res;
    ojson obs = ojson::object();
    for (const auto& [k, v] : c.observed) obs[k] = number(v);
    j["observed"] = obs;
    ojson parts = ojson::array();
    for (const auto& p : c.parts) parts.push_back(check_json(p));
    j["parts"] = parts;
    return j;
}

CheckReport check_from_json(const ojson& j) {
    CheckReport c;
    c.id = j.at("id").get<std::string>();
    c.statement = j.at("statement").get<std::string>();
    c.anchor = j.at("anchor").get<std::string>();
    c.pass = j.at("pass").get<bool>();
    c.excluded = j.at("excluded").get<bool>();
    c.error = j.at("error").get<std::string>();
    c.tolerance = read_number(j.at("tolerance"));
    c.order_kind = j.at("order_kind").get<std::string>();
    for (const auto& r : j.at("residuals")) c.residuals.emplace_back(r.at(0).get<int>(), read_number(r.at(1)));
    for (const auto& [k, v] : j.at("observed").items()) c.observed.emplace_back(k, read_number(v));
    for (const auto& p : j.at("parts")) c.parts.push_back(check_from_json(p));
    return c;
}

bool same_number(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

std::string to_json(const SuiteReport& r) {
    ojson j;
    ojson model = ojson::object();
    for (const auto& [k, v] : r.model) model[k] = v;
    j["model"] = model;
    j["order"] = r.order;
    j["pass"] = r.pass;
    j["summary"] = {{"checks", r.checks.size()},
                    {"passed", r.count_passed()},
                    {"failed", r.count_failed()},
                    {"excluded", r.count_excluded()}};
    ojson checks = ojson::array();
    for (const auto& c : r.checks) checks.push_back(check_json(c));
    j["checks"] = checks;
    return j.dump(2) + "\n";
}

SuiteReport suite_from_json(const std::string& text) {
    SuiteReport r;
    try {
        const ojson j = ojson::parse(text);
        for (const auto& [k, v] : j.at("model").items()) r.model.emplace_back(k, v.get<std::string>());
        r.order = j.at("order").get<int>();
        r.pass = j.at("pass").get<bool>();
        for (const auto& c : j.at("checks")) r.checks.push_back(check_from_json(c));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigParseError, std::string("report: ") + e.what());
    }
    return r;
}

bool operator==(const CheckReport& a, const CheckReport& b) {
    if (a.id != b.id || a.statement != b.statement || a.anchor != b.anchor || a.pass != b.pass ||
        a.excluded != b.excluded || a.error != b.error || !same_number(a.tolerance, b.tolerance) ||
        a.order_kind != b.order_kind || a.residuals.size() != b.residuals.size() ||
        a.observed.size() != b.observed.size() || a.parts != b.parts)
        return false;
    for (size_t i = 0; i < a.residuals.size(); ++i)
        if (a.residuals[i].first != b.residuals[i].first || !same_number(a.residuals[i].second, b.residuals[i].second))
            return false;
    for (size_t i = 0; i < a.observed.size(); ++i)
        if (a.observed[i].first != b.observed[i].first || !same_number(a.observed[i].second, b.observed[i].second))
            return false;
    return true;
}

bool operator==(const SuiteReport& a, const SuiteReport& b) {
    return a.model == b.model && a.order == b.order && a.pass == b.pass && a.checks == b.checks;
}

// expand

namespace {

std::string slot_component(Slot s, int i, const std::vector<std::string>& names) {
    switch (s) {
        case Slot::Lower:
        case Slot::Upper: return names[i];
        case Slot::CoTractor: return i == 0 ? "Y" : "Z." + names[i - 1];
        case Slot::Tractor: return i == 0 ? "X" : "W." + names[i - 1];
        case Slot::ExtLower: return i == 0 ? "L" : slot_component(Slot::CoTractor, i - 1, names);
        case Slot::ExtUpper: return i == 0 ? "I" : slot_component(Slot::Tractor, i - 1, names);
    }
    return std::to_string(i);
}

// Laurent series in one variable: c[i] multiplies x^(v + i)
struct Laurent {
    int v = 0;
    std::vector<double> c;
    int precision() const { return v + static_cast<int>(c.size()); }
};

Laurent mul(const Laurent& a, const Laurent& b) {
    Laurent r;
    r.v = a.v + b.v;
    const size_t len = std::min(a.c.size(), b.c.size());
    r.c.assign(len, 0.0);
    for (size_t i = 0; i < len; ++i)
        for (size_t j = 0; i + j < len; ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

Laurent power(const Laurent& a, int k, const Laurent& inv) {
    Laurent r{0, std::vector<double>(a.c.size(), 0.0)};
    r.c[0] = 1.0;
    for (int i = 0; i < std::abs(k); ++i) r = mul(r, k > 0 ? a : inv);
    return r;
}

Laurent inverse(const Laurent& a) {
    Laurent r{-a.v, std::vector<double>(a.c.size(), 0.0)};
    r.c[0] = 1.0 / a.c[0];
    for (size_t i = 1; i < a.c.size(); ++i) {
        double acc = 0.0;
        for (size_t j = 1; j <= i; ++j) acc += a.c[j] * r.c[i - j];
        r.c[i] = -acc / a.c[0];
    }
    return r;
}

// values at the anchor of the rho^k coefficients, k from lo to the precision of s
Laurent along_rho(const Series& s, int lo) {
    Laurent l{lo, {}};
    for (int k = lo; k < s.precision(); ++k) l.c.push_back(static_cast<double>(s.rho_coefficient(k).constant_term()));
    return l;
}

// re-expand r(rho) in powers of sigma(rho) = kappa rho + ...
Laurent in_sigma(Laurent r, const Laurent& sigma) {
    const Laurent inv = inverse(sigma);
    Laurent out{r.v, {}};
    for (int k = r.v; k < r.precision(); ++k) {
        const double lead = r.c[k - r.v];
        const double ck = lead / std::pow(sigma.c[0], k);
        out.c.push_back(ck);
        const Laurent sk = power(sigma, k, inv);
        for (size_t i = 0; i < r.c.size(); ++i) {
            const int p = r.v + static_cast<int>(i);
            const int j = p - sk.v;
            if (j >= 0 && j < static_cast<int>(sk.c.size())) r.c[i] -= ck * sk.c[j];
        }
    }
    return out;
}

void add_rows(ExpansionTable& t, const std::string& comp, const Series& s, const Context& ctx, const Series& sigma,
              int order) {
    if (!ctx.at_boundary()) {
        const Series ns = s.normalized();
        const double v = ns.valuation() == 0 ? static_cast<double>(ns.body().constant_term()) : 0.0;
        t.rows.push_back({comp, 0, v, v});
        return;
    }
    const Series ns = s.normalized(Series::cancel_tol);
    const int lo = ns.is_negligible() ? 0 : std::min(ns.valuation(), 0);
    const int hi = std::min(ns.precision() - 1, order);
    const Laurent r = along_rho(ns, lo);
    Laurent sg = along_rho(sigma.normalized(), 1);
    sg.c.resize(std::max<size_t>(r.c.size(), 1), 0.0);
    const Laurent z = in_sigma(r, sg);
    for (int k = lo; k <= hi; ++k) t.rows.push_back({comp, k, r.c[k - lo], z.c[k - lo]});
}

void add_rows(ExpansionTable& t, const Field& f, const Context& ctx, const Series& sigma, int order) {
    for (size_t i = 0; i < f.size(); ++i) {
        const std::vector<int> idx = f.unflat(i);
        std::string comp;
        for (size_t k = 0; k < idx.size(); ++k)
            comp += (k ? "," : "") + slot_component(f.slots()[k], idx[k], ctx.names());
        add_rows(t, comp, f[i], ctx, sigma, order);
    }
}

}  // namespace

ExpansionTable expand_quantity(const RunConfig& cfg, const std::string& quantity, int order, const std::string& anchor_label) {
    static const std::set<std::string> known = {"upsilon", "chi", "nu", "lambda_bar", "N", "J", "f", "phi"};
    if (!known.count(quantity))
        throw Error(ErrorCode::UnknownQuantity, "'" + quantity + "'; expected one of upsilon, chi, nu, lambda_bar, N, J, f, phi");
    if (order < 0) config_error("order must be non-negative");
    validate_config(cfg);
    const Chart chart = resolve_chart(cfg);
    auto it = cfg.anchors.begin();
    if (!anchor_label.empty()) {
        it = std::find_if(cfg.anchors.begin(), cfg.anchors.end(), [&](const auto& a) { return a.first == anchor_label; });
        if (it == cfg.anchors.end()) config_error("no anchor labelled " + anchor_label);
    }
    ExpansionTable t;
    t.quantity = quantity;
    t.anchor = it->first;

    const int K = std::max(order + 1, 2);
    auto m = std::make_shared<const CompactModel>(build_compact_model(chart, it->second, K + 4, K));
    const Context& ctx = m->ctx;
    t.order_kind = ctx.at_boundary() ? "rho" : "total";
    TauSpec sp;
    sp.factor = cfg.tau_factor;
    sp.params = cfg.params;
    sp.require_distinguished = false;
    auto s = std::make_shared<const ScaledModel>(scale_model(m, sp));

    if (quantity == "nu") add_rows(t, "nu", s->nu, ctx, m->sigma, order);
    else if (quantity == "N") add_rows(t, s->N, ctx, m->sigma, order);
    else if (quantity == "chi") add_rows(t, ctx.at_boundary() ? boundary_gauge_offset(*s) : Field(ctx, {Slot::CoTractor}), ctx, m->sigma, order);
    else if (quantity == "upsilon") {
        const Field u = ctx.at_boundary() ? constructed_upsilon(*s) : metric_gauge_structure(s).upsilon;
        add_rows(t, u, ctx, m->sigma, order);
        if (ctx.at_boundary() && lowest_order(u) < 0)
            t.diagnostic = "PoleDetected: upsilon keeps a rho^" + std::to_string(lowest_order(u)) +
                           " term; the scale is not distinguished";
    } else {
        const GaugedStructure g = ctx.at_boundary() ? boundary_gauge(s) : metric_gauge_structure(s);
        if (quantity == "lambda_bar") add_rows(t, "lambda_bar", g.metric.lambda_bar(), ctx, m->sigma, order);
        else if (quantity == "J") add_rows(t, g.metric.J, ctx, m->sigma, order);
        else if (quantity == "f") add_rows(t, "f", g.metric.f, ctx, m->sigma, order);
        else add_rows(t, g.metric.phi, ctx, m->sigma, order);
    }
    return t;
}

std::string format_table(const ExpansionTable& t) {
    std::ostringstream o;
    o << "# " << t.quantity << " at " << t.anchor << ", orders in " << (t.order_kind == "rho" ? "powers of rho and sigma" : "total degree")
      << "\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-16s %6s %24s %24s\n", "component", "order", "rho", "sigma");
    o << buf;
    for (const auto& r : t.rows) {
        std::snprintf(buf, sizeof buf, "%-16s %6d %24.15e %24.15e\n", r.component.c_str(), r.order, r.rho, r.sigma);
        o << buf;
    }
    if (!t.diagnostic.empty()) o << t.diagnostic << "\n";
    return o.str();
}

}  // namespace projtrac
