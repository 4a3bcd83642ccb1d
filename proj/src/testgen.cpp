#include "reqslice/testgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "json.hpp"

#include "reqslice/errors.hpp"

namespace reqslice {

using nlohmann::json;

std::vector<TestCase> generate_test_suite(const Model& m, int n, uint64_t seed, int steps) {
    if (n < 1) throw Error("test suite size must be >= 1");

    std::vector<std::pair<std::string, std::pair<double, double>>> dims;
    for (const auto& b : m.blocks) {
        if (b.type != BlockType::Inport) continue;
        auto it = m.input_ranges.find(b.name);
        if (it == m.input_ranges.end()) throw MissingRange(b.name);
        dims.push_back({b.name, it->second});
    }
    std::sort(dims.begin(), dims.end());

    std::mt19937_64 rng(seed);
    int pool_size = 10 * n;
    std::vector<std::vector<double>> pool(static_cast<size_t>(pool_size));
    for (auto& cand : pool) {
        cand.reserve(dims.size());
        for (const auto& [name, range] : dims) {
            std::uniform_real_distribution<double> dist(range.first, range.second);
            cand.push_back(dist(rng));
        }
    }

    auto distance = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double sum = 0.0;
        for (size_t d = 0; d < dims.size(); ++d) {
            double width = dims[d].second.second - dims[d].second.first;
            double diff = width > 0 ? (a[d] - b[d]) / width : 0.0;
            sum += diff * diff;
        }
        return std::sqrt(sum);
    };

    // Greedy max-min selection, ties broken by pool index.
    std::vector<size_t> selected{0};
    std::vector<double> min_dist(pool.size());
    for (size_t i = 0; i < pool.size(); ++i) min_dist[i] = distance(pool[i], pool[0]);
    while (static_cast<int>(selected.size()) < n) {
        size_t best = 0;
        double best_dist = -1.0;
        for (size_t i = 0; i < pool.size(); ++i) {
            if (std::find(selected.begin(), selected.end(), i) != selected.end()) continue;
            if (min_dist[i] > best_dist) {
                best_dist = min_dist[i];
                best = i;
            }
        }
        selected.push_back(best);
        for (size_t i = 0; i < pool.size(); ++i)
            min_dist[i] = std::min(min_dist[i], distance(pool[i], pool[best]));
    }

    std::vector<TestCase> suite;
    suite.reserve(static_cast<size_t>(n));
    for (size_t idx = 0; idx < selected.size(); ++idx) {
        TestCase t;
        std::ostringstream id;
        id << "t" << std::setw(3) << std::setfill('0') << (idx + 1);
        t.id = id.str();
        t.steps = steps;
        for (size_t d = 0; d < dims.size(); ++d)
            t.set_constant(dims[d].first, pool[selected[idx]][d]);
        suite.push_back(std::move(t));
    }
    return suite;
}

std::string suite_to_json(const std::vector<TestCase>& suite) {
    json j;
    j["steps"] = suite.empty() ? 0 : suite.front().steps;
    j["tests"] = json::array();
    for (const auto& t : suite) {
        json jt;
        jt["id"] = t.id;
        jt["inputs"] = json::object();
        for (const auto& [name, sig] : t.inputs) {
            if (sig.constant)
                jt["inputs"][name] = sig.value;
            else
                jt["inputs"][name] = sig.series;
        }
        j["tests"].push_back(std::move(jt));
    }
    return j.dump(2) + "\n";
}

std::vector<TestCase> suite_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("test-suite file is not valid JSON: ") + e.what());
    }
    std::vector<TestCase> suite;
    try {
        int steps = j.at("steps").get<int>();
        for (const auto& jt : j.at("tests")) {
            TestCase t;
            t.id = jt.at("id").get<std::string>();
            t.steps = steps;
            for (const auto& [name, val] : jt.at("inputs").items()) {
                if (val.is_number()) {
                    t.set_constant(name, val.get<double>());
                } else {
                    t.set_series(name, val.get<std::vector<double>>());
                }
            }
            suite.push_back(std::move(t));
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("test-suite file does not match schema: ") + e.what());
    }
    return suite;
}

void save_suite(const std::vector<TestCase>& suite, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write test-suite file: " + path);
    out << suite_to_json(suite);
}

std::vector<TestCase> load_suite(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SyntaxError("cannot open test-suite file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return suite_from_json(buf.str());
}

}  // namespace reqslice
