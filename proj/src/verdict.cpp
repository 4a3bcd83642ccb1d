#include "reqslice/verdict.hpp"

#include "reqslice/errors.hpp"

namespace reqslice {

const char* symbol(Outcome o) {
    switch (o) {
        case Outcome::Accurate: return "✓";
        case Outcome::Inaccurate: return "✗";
        case Outcome::Vacuous: return "V";
    }
    return "?";
}

Verdict verdict(const Model& m, const Slice& s, const RequirementSpec& spec,
                const std::vector<TestCase>& suite) {
    if (suite.empty()) throw Error("verdict needs a nonempty test suite");

    Verdict v;
    bool missing_signal = false;
    bool slice_triggered = false;
    bool mismatch = false;

    for (const auto& t : suite) {
        PerTestFitness row;
        row.test_id = t.id;
        Trace trace_original = simulate(m, t);
        row.original = fitness(spec, trace_original);

        if (!missing_signal) {
            Trace trace_slice = s.model.blocks.empty() ? Trace{t.steps, {}}
                                                       : simulate(s.model, t);
            if (s.model.blocks.empty())
                for (const auto& [name, sig] : t.inputs) {
                    auto& arr = trace_slice.signals[name];
                    arr.resize(static_cast<size_t>(t.steps));
                    for (int k = 0; k < t.steps; ++k) arr[static_cast<size_t>(k)] = sig.at(k);
                }
            try {
                row.slice = fitness(spec, trace_slice);
            } catch (const MissingSignal&) {
                missing_signal = true;
            }
        }

        if (row.slice) {
            if (row.slice->triggered) slice_triggered = true;
            if (row.original->triggered != row.slice->triggered) {
                mismatch = true;  // one side exercises the requirement, the other never does
            } else if (row.original->triggered &&
                       row.original->polarity() != row.slice->polarity()) {
                mismatch = true;
            }
        }
        v.per_test.push_back(std::move(row));
    }

    if (missing_signal || !slice_triggered)
        v.outcome = Outcome::Vacuous;
    else if (mismatch)
        v.outcome = Outcome::Inaccurate;
    else
        v.outcome = Outcome::Accurate;
    return v;
}

int conciseness(const Slice& s) { return static_cast<int>(s.model.blocks.size()); }

}  // namespace reqslice
