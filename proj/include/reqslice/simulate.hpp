#pragma once

#include <map>
#include <string>
#include <vector>

#include "reqslice/model.hpp"

namespace reqslice {

// One test input: a value (or per-step series) for each input signal plus a
// step count. Signals beyond the target model's Inports are allowed; slices
// keep only a subset of the original Inports but run the same test cases.
struct InputSignal {
    bool constant = true;
    double value = 0.0;
    std::vector<double> series;

    double at(int step) const { return constant ? value : series[static_cast<size_t>(step)]; }
};

struct TestCase {
    std::string id;
    int steps = 50;
    std::map<std::string, InputSignal> inputs;

    void set_constant(const std::string& name, double v) { inputs[name] = {true, v, {}}; }
    void set_series(const std::string& name, std::vector<double> vs) {
        inputs[name] = {false, 0.0, std::move(vs)};
    }
};

// Signal traces, one array per signal, all of equal length. Contains every
// test-case input by name, every Outport by name, and every block output as
// "sid:port".
struct Trace {
    int steps = 0;
    std::map<std::string, std::vector<double>> signals;

    bool has(const std::string& name) const { return signals.count(name) > 0; }
    const std::vector<double>& at(const std::string& name) const;
};

// Topological execution order over the same-step dependency graph. UnitDelay
// outputs come from state, so edges into UnitDelay blocks are dropped; a
// Goto->From tag pair acts as a wire and contributes an edge. Throws
// AlgebraicLoop naming the blocks on cycles not broken by state.
std::vector<int> schedule(const Model& m);

// Fixed-step synchronous execution for t.steps steps.
Trace simulate(const Model& m, const TestCase& t);

// CSV rendering: header row of signal names, one row per step.
std::string trace_to_csv(const Trace& trace);

}  // namespace reqslice
