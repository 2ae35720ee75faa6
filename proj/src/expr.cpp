#include "projtrac/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

namespace projtrac {

struct Expr::Node {
    enum Kind { Number, Ident, Neg, Add, Sub, Mul, Div, Pow, Call } kind;
    double value = 0.0;
    std::string name;
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

const std::set<std::string> functions = {"sqrt", "sin", "cos", "tan", "exp", "log", "sinh", "cosh"};

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) {
        throw Error(ErrorCode::ConfigParseError, "expression '" + s_ + "': " + msg);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    static NodePtr make(Expr::Node::Kind k, std::vector<NodePtr> args, std::string name = "", double v = 0.0) {
        auto n = std::make_shared<Expr::Node>();
        n->kind = k;
        n->args = std::move(args);
        n->name = std::move(name);
        n->value = v;
        return n;
    }

    NodePtr sum() {
        NodePtr lhs = product();
        for (;;) {
            if (accept('+')) lhs = make(Expr::Node::Add, {lhs, product()});
            else if (accept('-')) lhs = make(Expr::Node::Sub, {lhs, product()});
            else return lhs;
        }
    }
    NodePtr product() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make(Expr::Node::Mul, {lhs, unary()});
            else if (accept('/')) lhs = make(Expr::Node::Div, {lhs, unary()});
            else return lhs;
        }
    }
    NodePtr unary() {
        if (accept('-')) return make(Expr::Node::Neg, {unary()});
        if (accept('+')) return unary();
        return power();
    }
    // right associative; -a^b parses as -(a^b)
    NodePtr power() {
        NodePtr base = atom();
        if (accept('^')) return make(Expr::Node::Pow, {base, unary()});
        return base;
    }
    NodePtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = sum();
            if (!accept(')')) fail("missing ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("bad number");
            }
            pos_ += used;
            return make(Expr::Node::Number, {}, "", v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string id = s_.substr(start, pos_ - start);
            if (functions.count(id)) {
                if (!accept('(')) fail("expected '(' after " + id);
                NodePtr arg = sum();
                if (!accept(')')) fail("missing ')' after argument of " + id);
                return make(Expr::Node::Call, {arg}, id);
            }
            if (id == "pi") return make(Expr::Node::Number, {}, "", std::numbers::pi);
            return make(Expr::Node::Ident, {}, id);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& s_;
    size_t pos_ = 0;
};

// constant subexpression value, if the node has no identifiers
bool constant_value(const Expr::Node& n, double& out) {
    switch (n.kind) {
    case Expr::Node::Number: out = n.value; return true;
    case Expr::Node::Ident: return false;
    case Expr::Node::Neg: {
        double a;
        if (!constant_value(*n.args[0], a)) return false;
        out = -a;
        return true;
    }
    default: break;
    }
    std::vector<double> vals;
    for (const auto& a : n.args) {
        double v;
        if (!constant_value(*a, v)) return false;
        vals.push_back(v);
    }
    switch (n.kind) {
    case Expr::Node::Add: out = vals[0] + vals[1]; return true;
    case Expr::Node::Sub: out = vals[0] - vals[1]; return true;
    case Expr::Node::Mul: out = vals[0] * vals[1]; return true;
    case Expr::Node::Div: out = vals[0] / vals[1]; return true;
    case Expr::Node::Pow: out = std::pow(vals[0], vals[1]); return true;
    default: return false;
    }
}

Series eval_series(const Expr::Node& n, const std::map<std::string, Series>& vars, const BasisPtr& basis, int order) {
    auto rec = [&](int i) { return eval_series(*n.args[i], vars, basis, order); };
    switch (n.kind) {
    case Expr::Node::Number: return Series::constant(basis, order, n.value);
    case Expr::Node::Ident: {
        auto it = vars.find(n.name);
        if (it == vars.end()) throw Error(ErrorCode::UnknownVariable, n.name);
        return it->second;
    }
    case Expr::Node::Neg: return -rec(0);
    case Expr::Node::Add: return rec(0) + rec(1);
    case Expr::Node::Sub: return rec(0) - rec(1);
    case Expr::Node::Mul: return rec(0) * rec(1);
    case Expr::Node::Div: return rec(0) / rec(1);
    case Expr::Node::Pow: {
        double p;
        if (constant_value(*n.args[1], p)) {
            Series b = rec(0);
            if (p == std::floor(p) && std::abs(p) <= 64) {
                int k = static_cast<int>(p);
                Series r = Series::constant(basis, std::max(0, b.precision()), 1.0);
                Series base = b;
                for (int e = std::abs(k); e > 0; e >>= 1) {
                    if (e & 1) r = r * base;
                    if (e > 1) base = base * base;
                }
                return k < 0 ? r.inverse() : r;
            }
            return pow(b, p);
        }
        return exp(rec(1) * log(rec(0)));
    }
    case Expr::Node::Call: {
        Series a = rec(0);
        if (n.name == "sqrt") return sqrt(a);
        if (n.name == "sin") return sin(a);
        if (n.name == "cos") return cos(a);
        if (n.name == "tan") return sin(a) / cos(a);
        if (n.name == "exp") return exp(a);
        if (n.name == "log") return log(a);
        if (n.name == "sinh") return sinh(a);
        if (n.name == "cosh") return cosh(a);
        break;
    }
    }
    throw Error(ErrorCode::ConfigParseError, "bad expression node");
}

double eval_double(const Expr::Node& n, const std::map<std::string, double>& vars) {
    auto rec = [&](int i) { return eval_double(*n.args[i], vars); };
    switch (n.kind) {
    case Expr::Node::Number: return n.value;
    case Expr::Node::Ident: {
        auto it = vars.find(n.name);
        if (it == vars.end()) throw Error(ErrorCode::UnknownVariable, n.name);
        return it->second;
    }
    case Expr::Node::Neg: return -rec(0);
    case Expr::Node::Add: return rec(0) + rec(1);
    case Expr::Node::Sub: return rec(0) - rec(1);
    case Expr::Node::Mul: return rec(0) * rec(1);
    case Expr::Node::Div: return rec(0) / rec(1);
    case Expr::Node::Pow: return std::pow(rec(0), rec(1));
    case Expr::Node::Call: {
        static const std::map<std::string, double (*)(double)> fns = {
            {"sqrt", [](double x) { return std::sqrt(x); }}, {"sin", [](double x) { return std::sin(x); }},
            {"cos", [](double x) { return std::cos(x); }},   {"tan", [](double x) { return std::tan(x); }},
            {"exp", [](double x) { return std::exp(x); }},   {"log", [](double x) { return std::log(x); }},
            {"sinh", [](double x) { return std::sinh(x); }}, {"cosh", [](double x) { return std::cosh(x); }}};
        return fns.at(n.name)(rec(0));
    }
    }
    return 0.0;
}

void collect(const Expr::Node& n, std::set<std::string>& out) {
    if (n.kind == Expr::Node::Ident) out.insert(n.name);
    for (const auto& a : n.args) collect(*a, out);
}

}  // namespace

Expr Expr::parse(const std::string& text) {
    Expr e;
    e.text_ = text;
    e.root_ = Parser(text).parse();
    return e;
}

Series Expr::eval(const std::map<std::string, Series>& vars, const BasisPtr& basis, int order) const {
    return eval_series(*root_, vars, basis, order);
}

double Expr::eval(const std::map<std::string, double>& vars) const { return eval_double(*root_, vars); }

std::vector<std::string> Expr::identifiers() const {
    std::set<std::string> s;
    collect(*root_, s);
    return {s.begin(), s.end()};
}

}  // namespace projtrac
