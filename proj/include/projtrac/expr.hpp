#pragma once
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "projtrac/series.hpp"

namespace projtrac {

// Arithmetic expressions over coordinates and parameters:
// + - * / ^, unary minus, sqrt sin cos tan exp log sinh cosh, numbers, pi.
class Expr {
public:
    struct Node;
    static Expr parse(const std::string& text);

    Series eval(const std::map<std::string, Series>& vars, const BasisPtr& basis, int order) const;
    double eval(const std::map<std::string, double>& vars) const;
    // names referenced by the expression, sorted
    std::vector<std::string> identifiers() const;
    const std::string& text() const { return text_; }

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace projtrac
