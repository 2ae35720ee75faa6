#include "projtrac/jet.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace projtrac {

namespace {

std::mutex registry_mutex;
std::map<std::pair<std::vector<std::string>, int>, BasisPtr>& registry() {
    static std::map<std::pair<std::vector<std::string>, int>, BasisPtr> r;
    return r;
}

// all exponent vectors of total degree d in nv variables, lexicographically descending
void enumerate(int nv, int d, std::vector<int>& cur, int pos, std::vector<std::vector<int>>& out) {
    if (pos == nv - 1) {
        cur[pos] = d;
        out.push_back(cur);
        return;
    }
    for (int e = d; e >= 0; --e) {
        cur[pos] = e;
        enumerate(nv, d - e, cur, pos + 1, out);
    }
}

}  // namespace

BasisPtr Basis::get(const std::vector<std::string>& names, int boundary, int order) {
    std::lock_guard<std::mutex> lock(registry_mutex);
    auto key = std::make_pair(names, boundary);
    auto& reg = registry();
    auto it = reg.find(key);
    if (it != reg.end() && it->second->max_order() >= order) return it->second;
    int build = order;
    if (it != reg.end()) build = std::max(order, it->second->max_order() + 2);
    BasisPtr b(new Basis(names, boundary, build));
    reg[key] = b;
    return b;
}

Basis::Basis(std::vector<std::string> names, int boundary, int order)
    : names_(std::move(names)), nvars_(static_cast<int>(names_.size())), boundary_(boundary),
      max_order_(order) {
    if (nvars_ == 0 || nvars_ > 8) throw Error(ErrorCode::UnknownVariable, "basis needs 1..8 variables");
    if (order > 60) throw Error(ErrorCode::OrderExhausted, "jet order too large");
    std::vector<std::vector<int>> monos;
    std::vector<int> cur(nvars_, 0);
    dims_.resize(order + 1);
    for (int d = 0; d <= order; ++d) {
        enumerate(nvars_, d, cur, 0, monos);
        dims_[d] = monos.size();
    }
    const size_t N = monos.size();
    exps_.resize(N * nvars_);
    degs_.resize(N);
    lookup_.reserve(N);
    for (size_t i = 0; i < N; ++i) {
        int deg = 0;
        for (int v = 0; v < nvars_; ++v) {
            exps_[i * nvars_ + v] = static_cast<uint8_t>(monos[i][v]);
            deg += monos[i][v];
        }
        degs_[i] = deg;
        lookup_.emplace_back(key(monos[i].data()), static_cast<uint32_t>(i));
    }
    std::sort(lookup_.begin(), lookup_.end());

    prod_off_.resize(N + 1);
    size_t total = 0;
    for (size_t i = 0; i < N; ++i) {
        prod_off_[i] = total;
        total += dims_[order - degs_[i]];
    }
    prod_off_[N] = total;
    prod_.resize(total);
    std::vector<int> e(nvars_);
    for (size_t i = 0; i < N; ++i) {
        const size_t lim = dims_[order - degs_[i]];
        for (size_t j = 0; j < lim; ++j) {
            for (int v = 0; v < nvars_; ++v) e[v] = monos[i][v] + monos[j][v];
            prod_[prod_off_[i] + j] = static_cast<uint32_t>(index(e.data()));
        }
    }

    lower_.assign(N * nvars_, -1);
    raise_.assign(N * nvars_, -1);
    for (size_t i = 0; i < N; ++i) {
        for (int v = 0; v < nvars_; ++v) {
            e = monos[i];
            if (e[v] > 0) {
                e[v] -= 1;
                lower_[i * nvars_ + v] = index(e.data());
                e[v] += 1;
            }
            e[v] += 1;
            raise_[i * nvars_ + v] = index(e.data());
        }
    }
}

uint64_t Basis::key(const int* exps) const {
    uint64_t k = 0;
    for (int v = 0; v < nvars_; ++v) k = (k << 8) | static_cast<uint64_t>(exps[v] & 0xff);
    return k;
}

long Basis::index(const int* exps) const {
    int deg = 0;
    for (int v = 0; v < nvars_; ++v) {
        if (exps[v] < 0) return -1;
        deg += exps[v];
    }
    if (deg > max_order_) return -1;
    uint64_t k = key(exps);
    auto it = std::lower_bound(lookup_.begin(), lookup_.end(), std::make_pair(k, uint32_t(0)));
    if (it == lookup_.end() || it->first != k) return -1;
    return it->second;
}

int Basis::var_index(const std::string& name) const {
    for (int v = 0; v < nvars_; ++v)
        if (names_[v] == name) return v;
    return -1;
}

Jet compose(const Jet& a, const std::vector<Real>& derivs) {
    Jet tilde = a;
    tilde[0] = 0.0;
    Jet result = Jet::constant(a.basis_ptr(), a.order(), derivs.empty() ? 0.0 : derivs[0]);
    Jet power = Jet::constant(a.basis_ptr(), a.order(), 1.0);
    const int K = std::min<int>(a.order(), static_cast<int>(derivs.size()) - 1);
    for (int k = 1; k <= K; ++k) {
        power = power * tilde;
        if (derivs[k] != 0.0) result += power * derivs[k];
    }
    return result;
}

namespace {

// Taylor coefficients of x^p about x0.
std::vector<Real> pow_coeffs(Real x0, Real p, int K) {
    std::vector<Real> d(K + 1);
    Real c = std::pow(x0, p);
    for (int k = 0; k <= K; ++k) {
        d[k] = c;
        c *= (p - k) / ((k + 1) * x0);
    }
    return d;
}

}  // namespace

Jet pow(const Jet& a, double p) {
    const Real a0 = a.constant_term();
    if (p == std::floor(p) && std::abs(p) < 64) return pow(a, static_cast<int>(p));
    if (a0 <= 0.0) throw Error(ErrorCode::NonPositiveConstantTerm, "non-integer power of jet with constant term <= 0");
    return compose(a, pow_coeffs(a0, p, a.order()));
}

Jet pow(const Jet& a, int p) {
    if (p < 0) return pow(a, -p).inverse();
    Jet result = Jet::constant(a.basis_ptr(), a.order(), 1.0);
    Jet base = a;
    while (p > 0) {
        if (p & 1) result = result * base;
        p >>= 1;
        if (p) base = base * base;
    }
    return result;
}

Jet sqrt(const Jet& a) {
    if (a.constant_term() <= 0.0)
        throw Error(ErrorCode::NonPositiveConstantTerm, "sqrt of jet with constant term <= 0");
    return compose(a, pow_coeffs(a.constant_term(), 0.5, a.order()));
}

Jet exp(const Jet& a) {
    const int K = a.order();
    std::vector<Real> d(K + 1);
    Real c = std::exp(a.constant_term());
    for (int k = 0; k <= K; ++k) {
        d[k] = c;
        c /= (k + 1);
    }
    return compose(a, d);
}

Jet log(const Jet& a) {
    const Real a0 = a.constant_term();
    if (a0 <= 0.0) throw Error(ErrorCode::NonPositiveConstantTerm, "log of jet with constant term <= 0");
    const int K = a.order();
    std::vector<Real> d(K + 1);
    d[0] = std::log(a0);
    for (int k = 1; k <= K; ++k) d[k] = ((k % 2) ? 1.0 : -1.0) / (k * std::pow(a0, k));
    return compose(a, d);
}

namespace {

// f^(k)(a0)/k! for sin/cos/sinh/cosh, cycling through the four derivative values.
std::vector<Real> cyclic_coeffs(const Real vals[4], int period, int K) {
    std::vector<Real> d(K + 1);
    Real fact = 1.0;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) fact *= k;
        d[k] = vals[k % period] / fact;
    }
    return d;
}

}  // namespace

Jet sin(const Jet& a) {
    const Real s = std::sin(a.constant_term()), c = std::cos(a.constant_term());
    const Real v[4] = {s, c, -s, -c};
    return compose(a, cyclic_coeffs(v, 4, a.order()));
}

Jet cos(const Jet& a) {
    const Real s = std::sin(a.constant_term()), c = std::cos(a.constant_term());
    const Real v[4] = {c, -s, -c, s};
    return compose(a, cyclic_coeffs(v, 4, a.order()));
}

Jet sinh(const Jet& a) {
    const Real s = std::sinh(a.constant_term()), c = std::cosh(a.constant_term());
    const Real v[4] = {s, c, s, c};
    return compose(a, cyclic_coeffs(v, 2, a.order()));
}

Jet cosh(const Jet& a) {
    const Real s = std::sinh(a.constant_term()), c = std::cosh(a.constant_term());
    const Real v[4] = {c, s, c, s};
    return compose(a, cyclic_coeffs(v, 2, a.order()));
}

Jet restrict_to_boundary(const Jet& a) {
    const Basis& B = a.basis();
    const int bi = B.boundary();
    if (bi < 0) throw Error(ErrorCode::NoBoundaryVariable, "jet has no boundary variable");
    std::vector<std::string> names;
    for (int v = 0; v < B.nvars(); ++v)
        if (v != bi) names.push_back(B.names()[v]);
    if (names.empty()) names.push_back("_");
    BasisPtr target = Basis::get(names, -1, a.order());
    Jet r(target, a.order());
    std::vector<int> e(target->nvars());
    for (size_t i = 0; i < a.size(); ++i) {
        const uint8_t* ex = B.exponents(i);
        if (ex[bi] != 0 || a[i] == 0.0) continue;
        int p = 0;
        for (int v = 0; v < B.nvars(); ++v)
            if (v != bi) e[p++] = ex[v];
        if (B.nvars() == 1) e[0] = 0;
        r[target->index(e.data())] = a[i];
    }
    return r;
}

Jet reembed(const Jet& a, const BasisPtr& target) {
    const Basis& B = a.basis();
    std::vector<int> map(B.nvars());
    for (int v = 0; v < B.nvars(); ++v) {
        map[v] = target->var_index(B.names()[v]);
        if (map[v] < 0) throw Error(ErrorCode::IncompatibleJets, "variable " + B.names()[v] + " missing in target");
    }
    BasisPtr t = target;
    if (t->max_order() < a.order()) t = Basis::get(t->names(), t->boundary(), a.order());
    Jet r(t, a.order());
    std::vector<int> e(t->nvars());
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        std::fill(e.begin(), e.end(), 0);
        const uint8_t* ex = B.exponents(i);
        for (int v = 0; v < B.nvars(); ++v) e[map[v]] += ex[v];
        r[t->index(e.data())] += a[i];
    }
    return r;
}

double evaluate(const Jet& a, const std::vector<double>& dx) {
    const Basis& B = a.basis();
    if (static_cast<int>(dx.size()) != B.nvars())
        throw Error(ErrorCode::IncompatibleJets, "evaluation point has wrong dimension");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        double m = a[i];
        const uint8_t* ex = B.exponents(i);
        for (int v = 0; v < B.nvars(); ++v)
            for (int p = 0; p < ex[v]; ++p) m *= dx[v];
        s += m;
    }
    return s;
}

double degree_norm(const Jet& a, int d) {
    const Basis& B = a.basis();
    double m = 0.0;
    for (size_t i = B.dim(d - 1); i < B.dim(d) && i < a.size(); ++i) m = std::max(m, static_cast<double>(std::abs(a[i])));
    return m;
}

double fd_oracle(const std::function<double(const std::vector<double>&)>& f, const ChartPoint& point,
                 const std::vector<double>& direction, double step) {
    std::vector<double> p = point.coords, m = point.coords;
    for (size_t i = 0; i < p.size(); ++i) {
        p[i] += step * direction[i];
        m[i] -= step * direction[i];
    }
    // fourth-order central difference
    std::vector<double> p2 = point.coords, m2 = point.coords;
    for (size_t i = 0; i < p.size(); ++i) {
        p2[i] += 2 * step * direction[i];
        m2[i] -= 2 * step * direction[i];
    }
    return (-f(p2) + 8 * f(p) - 8 * f(m) + f(m2)) / (12 * step);
}

}  // namespace projtrac
