#include "reqslice/fitness.hpp"

#include <algorithm>

#include "reqslice/errors.hpp"

namespace reqslice {

namespace {

double eval_numeric(const Expr& e, const Trace& trace, int step, double tol);

double eval_robustness(const Expr& e, const Trace& trace, int step, double tol) {
    switch (e.op) {
        case Expr::Op::Lt:
        case Expr::Op::Le:
            return eval_numeric(*e.rhs, trace, step, tol) -
                   eval_numeric(*e.lhs, trace, step, tol);
        case Expr::Op::Gt:
        case Expr::Op::Ge:
            return eval_numeric(*e.lhs, trace, step, tol) -
                   eval_numeric(*e.rhs, trace, step, tol);
        case Expr::Op::Eq:
            return tol - std::fabs(eval_numeric(*e.lhs, trace, step, tol) -
                                   eval_numeric(*e.rhs, trace, step, tol));
        case Expr::Op::And:
            return std::min(eval_robustness(*e.lhs, trace, step, tol),
                            eval_robustness(*e.rhs, trace, step, tol));
        case Expr::Op::Or:
            return std::max(eval_robustness(*e.lhs, trace, step, tol),
                            eval_robustness(*e.rhs, trace, step, tol));
        case Expr::Op::Not:
            return -eval_robustness(*e.lhs, trace, step, tol);
        default:
            throw ExprError("robustness needs a boolean expression");
    }
}

double eval_numeric(const Expr& e, const Trace& trace, int step, double tol) {
    switch (e.op) {
        case Expr::Op::Number:
            return e.number;
        case Expr::Op::Signal: {
            auto it = trace.signals.find(e.signal);
            if (it == trace.signals.end()) throw UnknownSignal(e.signal);
            return it->second.at(static_cast<size_t>(step));
        }
        case Expr::Op::Add:
            return eval_numeric(*e.lhs, trace, step, tol) +
                   eval_numeric(*e.rhs, trace, step, tol);
        case Expr::Op::Sub:
            return eval_numeric(*e.lhs, trace, step, tol) -
                   eval_numeric(*e.rhs, trace, step, tol);
        case Expr::Op::Mul:
            return eval_numeric(*e.lhs, trace, step, tol) *
                   eval_numeric(*e.rhs, trace, step, tol);
        case Expr::Op::Div: {
            double denom = eval_numeric(*e.rhs, trace, step, tol);
            if (denom == 0.0) throw DivisionByZero("division by zero in requirement expression");
            return eval_numeric(*e.lhs, trace, step, tol) / denom;
        }
        case Expr::Op::Abs:
            return std::fabs(eval_numeric(*e.lhs, trace, step, tol));
        default:
            throw ExprError("boolean expression used where a number is needed");
    }
}

}  // namespace

double robustness(const Expr& e, const Trace& trace, int step, double tol) {
    if (step < 0 || step >= trace.steps)
        throw Error("robustness step " + std::to_string(step) + " is outside the trace");
    return eval_robustness(e, trace, step, tol);
}

FitnessValue fitness(const RequirementSpec& spec, const Trace& trace) {
    for (const auto& name : spec.all_signals())
        if (!trace.has(name)) throw MissingSignal(name);

    FitnessValue fv;
    for (int k = 0; k < trace.steps; ++k) {
        if (robustness(*spec.antecedent, trace, k, spec.tol) <= 0) continue;
        double margin = robustness(*spec.consequent, trace, k, spec.tol);
        if (!fv.triggered || margin < fv.value) fv.value = margin;
        fv.triggered = true;
    }
    return fv;
}

}  // namespace reqslice
