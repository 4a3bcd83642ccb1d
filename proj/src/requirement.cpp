#include "reqslice/requirement.hpp"

#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "reqslice/errors.hpp"

namespace reqslice {

using nlohmann::json;

bool Expr::is_boolean() const {
    switch (op) {
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge:
        case Op::Eq:
        case Op::And:
        case Op::Or:
        case Op::Not:
            return true;
        default:
            return false;
    }
}

namespace {

class Parser {
  public:
    explicit Parser(const std::string& src) : src_(src) {}

    ExprPtr parse() {
        ExprPtr e = parse_or();
        skip_ws();
        if (pos_ != src_.size())
            throw ExprError("unexpected trailing input at offset " + std::to_string(pos_) +
                            " in \"" + src_ + "\"");
        if (!e->is_boolean())
            throw ExprError("expression must be boolean (a comparison or connective): \"" +
                            src_ + "\"");
        return e;
    }

  private:
    ExprPtr make(Expr::Op op, ExprPtr lhs = nullptr, ExprPtr rhs = nullptr) {
        auto e = std::make_shared<Expr>();
        e->op = op;
        e->lhs = std::move(lhs);
        e->rhs = std::move(rhs);
        return e;
    }

    void require_boolean(const ExprPtr& e, const char* ctx) {
        if (!e->is_boolean())
            throw ExprError(std::string(ctx) + " takes boolean operands: \"" + src_ + "\"");
    }

    void require_numeric(const ExprPtr& e, const char* ctx) {
        if (e->is_boolean())
            throw ExprError(std::string(ctx) + " takes numeric operands: \"" + src_ + "\"");
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (match("||")) {
            require_boolean(lhs, "||");
            ExprPtr rhs = parse_and();
            require_boolean(rhs, "||");
            lhs = make(Expr::Op::Or, lhs, rhs);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_unary();
        while (match("&&")) {
            require_boolean(lhs, "&&");
            ExprPtr rhs = parse_unary();
            require_boolean(rhs, "&&");
            lhs = make(Expr::Op::And, lhs, rhs);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        skip_ws();
        if (match("!")) {
            ExprPtr inner = parse_unary();
            require_boolean(inner, "!");
            return make(Expr::Op::Not, inner);
        }
        return parse_cmp();
    }

    ExprPtr parse_cmp() {
        ExprPtr lhs = parse_sum();
        skip_ws();
        Expr::Op op;
        if (match("<=")) op = Expr::Op::Le;
        else if (match(">=")) op = Expr::Op::Ge;
        else if (match("==")) op = Expr::Op::Eq;
        else if (match("<")) op = Expr::Op::Lt;
        else if (match(">")) op = Expr::Op::Gt;
        else return lhs;
        require_numeric(lhs, "comparison");
        ExprPtr rhs = parse_sum();
        require_numeric(rhs, "comparison");
        return make(op, lhs, rhs);
    }

    ExprPtr parse_sum() {
        ExprPtr lhs = parse_term();
        for (;;) {
            skip_ws();
            // Don't eat the '|' of "||" or a comparison's '='.
            if (match_arith('+')) {
                ExprPtr rhs = parse_term();
                require_numeric(lhs, "+");
                require_numeric(rhs, "+");
                lhs = make(Expr::Op::Add, lhs, rhs);
            } else if (match_arith('-')) {
                ExprPtr rhs = parse_term();
                require_numeric(lhs, "-");
                require_numeric(rhs, "-");
                lhs = make(Expr::Op::Sub, lhs, rhs);
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_factor();
        for (;;) {
            skip_ws();
            if (match_arith('*')) {
                ExprPtr rhs = parse_factor();
                require_numeric(lhs, "*");
                require_numeric(rhs, "*");
                lhs = make(Expr::Op::Mul, lhs, rhs);
            } else if (match_arith('/')) {
                ExprPtr rhs = parse_factor();
                require_numeric(lhs, "/");
                require_numeric(rhs, "/");
                lhs = make(Expr::Op::Div, lhs, rhs);
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_factor() {
        skip_ws();
        if (pos_ >= src_.size()) throw ExprError("unexpected end of expression: \"" + src_ + "\"");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr inner = parse_or();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
            (c == '-' && pos_ + 1 < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) || src_[pos_ + 1] == '.'))) {
            return parse_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string ident = parse_ident();
            if (ident == "abs") {
                expect('(');
                ExprPtr inner = parse_or();
                require_numeric(inner, "abs");
                expect(')');
                return make(Expr::Op::Abs, inner);
            }
            auto e = std::make_shared<Expr>();
            e->op = Expr::Op::Signal;
            e->signal = ident;
            return e;
        }
        throw ExprError("unexpected character '" + std::string(1, c) + "' at offset " +
                        std::to_string(pos_) + " in \"" + src_ + "\"");
    }

    ExprPtr parse_number() {
        size_t start = pos_;
        if (src_[pos_] == '-') ++pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            ++pos_;
        // exponent part
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            size_t mark = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;
            }
        }
        auto e = std::make_shared<Expr>();
        e->op = Expr::Op::Number;
        try {
            e->number = std::stod(src_.substr(start, pos_ - start));
        } catch (const std::exception&) {
            throw ExprError("bad number literal in \"" + src_ + "\"");
        }
        return e;
    }

    std::string parse_ident() {
        size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                      src_[pos_] == '_'))
            ++pos_;
        return src_.substr(start, pos_ - start);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool match(const char* tok) {
        skip_ws();
        size_t len = std::strlen(tok);
        if (src_.compare(pos_, len, tok) == 0) {
            pos_ += len;
            return true;
        }
        return false;
    }

    // Match a single arithmetic operator char, refusing to take the leading
    // '-' of a negative literal ambiguity away from sums ("a -3" still means
    // subtraction here; unary minus only appears inside factors).
    bool match_arith(char op) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == op) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= src_.size() || src_[pos_] != c)
            throw ExprError("expected '" + std::string(1, c) + "' in \"" + src_ + "\"");
        ++pos_;
    }

    const std::string& src_;
    size_t pos_ = 0;
};

}  // namespace

ExprPtr parse_expr(const std::string& src) { return Parser(src).parse(); }

void collect_signals(const Expr& e, std::set<std::string>& out) {
    if (e.op == Expr::Op::Signal) out.insert(e.signal);
    if (e.lhs) collect_signals(*e.lhs, out);
    if (e.rhs) collect_signals(*e.rhs, out);
}

std::set<std::string> signals_of(const Expr& e) {
    std::set<std::string> out;
    collect_signals(e, out);
    return out;
}

std::set<std::string> RequirementSpec::all_signals() const {
    std::set<std::string> out;
    if (antecedent) collect_signals(*antecedent, out);
    if (consequent) collect_signals(*consequent, out);
    return out;
}

std::vector<RequirementSpec> parse_requirements(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("requirements file is not valid JSON: ") + e.what());
    }
    std::vector<RequirementSpec> out;
    try {
        for (const auto& jr : j.at("requirements")) {
            RequirementSpec spec;
            spec.id = jr.at("id").get<std::string>();
            spec.text = jr.at("text").get<std::string>();
            spec.antecedent_src = jr.at("antecedent").get<std::string>();
            spec.consequent_src = jr.at("consequent").get<std::string>();
            spec.antecedent = parse_expr(spec.antecedent_src);
            spec.consequent = parse_expr(spec.consequent_src);
            if (jr.contains("tol")) spec.tol = jr.at("tol").get<double>();
            out.push_back(std::move(spec));
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("requirements file does not match schema: ") + e.what());
    }
    return out;
}

std::vector<RequirementSpec> load_requirements(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SyntaxError("cannot open requirements file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_requirements(buf.str());
}

const RequirementSpec& find_requirement(const std::vector<RequirementSpec>& specs,
                                        const std::string& id) {
    for (const auto& spec : specs)
        if (spec.id == id) return spec;
    throw SchemaError("no requirement with id \"" + id + "\"");
}

}  // namespace reqslice
