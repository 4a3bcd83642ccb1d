#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reqslice/model.hpp"
#include "reqslice/simulate.hpp"

namespace reqslice {

// Diversity-driven test generation: draw 10*n candidates uniformly from the
// model's declared input ranges (one constant per Inport), then greedily
// select n of them maximizing the minimum pairwise distance in range-
// normalized input space. Deterministic for a given seed.
std::vector<TestCase> generate_test_suite(const Model& m, int n, uint64_t seed, int steps = 50);

// Suite files: {"steps": n, "tests": [{"id": str, "inputs": {name: num |
// [num...]}}]}.
std::string suite_to_json(const std::vector<TestCase>& suite);
std::vector<TestCase> suite_from_json(const std::string& text);
void save_suite(const std::vector<TestCase>& suite, const std::string& path);
std::vector<TestCase> load_suite(const std::string& path);

}  // namespace reqslice
