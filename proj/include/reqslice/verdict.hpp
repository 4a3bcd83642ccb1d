#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reqslice/fitness.hpp"
#include "reqslice/slice.hpp"

namespace reqslice {

enum class Outcome { Accurate, Inaccurate, Vacuous };

const char* symbol(Outcome o);  // "✓" / "✗" / "V"

struct PerTestFitness {
    std::string test_id;
    std::optional<FitnessValue> original;
    std::optional<FitnessValue> slice;  // absent when the slice lacks a signal
};

struct Verdict {
    Outcome outcome = Outcome::Vacuous;
    std::vector<PerTestFitness> per_test;
};

// Accuracy by fitness polarity: Vacuous when the slice is missing a
// consequent signal or no test triggers the antecedent on the slice;
// Inaccurate when any test's polarities disagree (zero counts as violation
// polarity); Accurate otherwise.
Verdict verdict(const Model& m, const Slice& s, const RequirementSpec& spec,
                const std::vector<TestCase>& suite);

// Block count of the slice model, constants and edge cases included.
int conciseness(const Slice& s);

}  // namespace reqslice
