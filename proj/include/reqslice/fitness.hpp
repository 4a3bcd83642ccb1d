#pragma once

#include <cmath>

#include "reqslice/requirement.hpp"
#include "reqslice/simulate.hpp"

namespace reqslice {

// Quantitative satisfaction margin of a boolean expression at one trace step:
//   a <= b  ->  b - a          a <  b  ->  b - a
//   a >= b  ->  a - b          a >  b  ->  a - b
//   a == b  ->  tol - |a - b|
//   and -> min, or -> max, not -> negation; numeric subtrees evaluate
// arithmetically. Positive means satisfied; zero or negative means violated.
double robustness(const Expr& e, const Trace& trace, int step, double tol);

enum class Polarity { Positive, NonPositive };

struct FitnessValue {
    double value = std::numeric_limits<double>::quiet_NaN();
    bool triggered = false;  // antecedent held at >= 1 step

    Polarity polarity() const {
        return (triggered && value > 0) ? Polarity::Positive : Polarity::NonPositive;
    }
};

// Worst consequent margin over the steps where the antecedent holds.
// Throws MissingSignal when the trace lacks a referenced signal (a slice
// that dropped the consequent's Outport); callers map that to vacuity.
FitnessValue fitness(const RequirementSpec& spec, const Trace& trace);

}  // namespace reqslice
