#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace reqslice {

// Expression tree over signal names, literals, arithmetic, comparisons and
// boolean connectives. Grammar (loosest binding first):
//   expr  := or
//   or    := and ("||" and)*
//   and   := unary ("&&" unary)*
//   unary := "!" unary | cmp
//   cmp   := sum (("<=" | "<" | ">=" | ">" | "==") sum)?
//   sum   := term (("+" | "-") term)*
//   term  := factor (("*" | "/") factor)*
//   factor:= NUMBER | IDENT | "abs" "(" expr ")" | "(" expr ")"
// Comparisons take numeric children and produce booleans; && || ! take
// boolean children. The parser rejects ill-typed trees.
struct Expr {
    enum class Op {
        Number,
        Signal,
        Add,
        Sub,
        Mul,
        Div,
        Abs,
        Lt,
        Le,
        Gt,
        Ge,
        Eq,
        And,
        Or,
        Not,
    };

    Op op = Op::Number;
    double number = 0.0;
    std::string signal;
    std::shared_ptr<const Expr> lhs;
    std::shared_ptr<const Expr> rhs;

    bool is_boolean() const;
};

using ExprPtr = std::shared_ptr<const Expr>;

// Parse a boolean expression; throws ExprError on syntax or typing problems.
ExprPtr parse_expr(const std::string& src);

void collect_signals(const Expr& e, std::set<std::string>& out);
std::set<std::string> signals_of(const Expr& e);

struct RequirementSpec {
    std::string id;
    std::string text;  // natural-language form, fed to prompts
    ExprPtr antecedent;
    ExprPtr consequent;
    std::string antecedent_src;
    std::string consequent_src;
    double tol = 1e-6;  // equality tolerance for == robustness

    std::set<std::string> all_signals() const;
};

// Requirements file:
//   {"requirements": [{"id": str, "text": str, "antecedent": str,
//                      "consequent": str, "tol": num?}]}
std::vector<RequirementSpec> load_requirements(const std::string& path);
std::vector<RequirementSpec> parse_requirements(const std::string& text);
const RequirementSpec& find_requirement(const std::vector<RequirementSpec>& specs,
                                        const std::string& id);

}  // namespace reqslice
