#include "reqslice/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "reqslice/errors.hpp"
#include "reqslice/slice.hpp"
#include "reqslice/testgen.hpp"

namespace reqslice {

using nlohmann::json;
namespace fs = std::filesystem;

ExperimentPlan load_plan(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SyntaxError("cannot open plan file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("plan file is not valid JSON: ") + e.what());
    }

    fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        if (p.empty()) return p;
        fs::path fp(p);
        return fp.is_absolute() ? p : (base / fp).string();
    };

    ExperimentPlan plan;
    try {
        plan.model_path = resolve(j.at("model").get<std::string>());
        plan.requirements_path = resolve(j.at("requirements").get<std::string>());
        if (j.contains("training_examples"))
            plan.training_path = resolve(j.at("training_examples").get<std::string>());
        if (j.contains("verbosities")) {
            plan.verbosities.clear();
            for (const auto& v : j.at("verbosities")) {
                auto parsed = verbosity_from_string(v.get<std::string>());
                if (!parsed) throw SchemaError("unknown verbosity in plan: " + v.dump());
                plan.verbosities.push_back(*parsed);
            }
        }
        if (j.contains("strategies")) {
            plan.strategies.clear();
            for (const auto& s : j.at("strategies")) {
                auto parsed = strategy_from_string(s.get<std::string>());
                if (!parsed) throw SchemaError("unknown strategy in plan: " + s.dump());
                plan.strategies.push_back(*parsed);
            }
        }
        plan.repetitions = j.value("repetitions", 3);
        if (j.contains("backend")) {
            const auto& jb = j.at("backend");
            auto kind = BackendConfig::kind_from_string(jb.value("kind", "oracle"));
            if (!kind) throw SchemaError("unknown backend kind in plan");
            plan.backend.kind = *kind;
            plan.backend.endpoint = jb.value("endpoint", "");
            plan.backend.model_name = jb.value("model", "");
            plan.backend.api_key_env = jb.value("api_key_env", "REQSLICE_LLM_KEY");
            plan.backend.temperature = jb.value("temperature", 0.7);
            if (jb.contains("cassette"))
                plan.backend.cassette_path = resolve(jb.at("cassette").get<std::string>());
        }
        plan.backend.repetitions = plan.repetitions;
        plan.suite_size = j.value("suite_size", 40);
        plan.steps = j.value("steps", 50);
        plan.seed = j.value("seed", 0);
        plan.n_examples = j.value("n_examples", 1);
        plan.token_limit = j.value("token_limit", 128000);
        plan.out_dir = resolve(j.value("out_dir", "out"));
        plan.max_workers = j.value("max_workers", 4);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("plan file does not match schema: ") + e.what());
    }
    if (plan.repetitions < 1) throw SchemaError("plan repetitions must be >= 1");
    if (plan.verbosities.empty() || plan.strategies.empty())
        throw SchemaError("plan needs at least one verbosity and one strategy");
    return plan;
}

int ExperimentReport::iteration_slice_count() const {
    int count = 0;
    for (const auto& cell : cells) count += static_cast<int>(cell.iteration_outcomes.size());
    return count;
}

int ExperimentReport::union_slice_count() const {
    int count = 0;
    for (const auto& cell : cells)
        if (cell.union_outcome) ++count;
    return count;
}

namespace {

std::string cell_file_stem(const std::string& config_code, const std::string& req_id,
                           const std::string& iter) {
    return config_code + "_" + req_id + "_" + iter;
}

TestCase draw_seed_input(const Model& m, uint64_t seed, int steps) {
    std::mt19937_64 rng(seed ^ 0x5eed1234abcdULL);
    TestCase t;
    t.id = "seed";
    t.steps = steps;
    std::vector<std::pair<std::string, std::pair<double, double>>> dims;
    for (const auto& b : m.blocks) {
        if (b.type != BlockType::Inport) continue;
        auto it = m.input_ranges.find(b.name);
        if (it == m.input_ranges.end()) throw MissingRange(b.name);
        dims.push_back({b.name, it->second});
    }
    std::sort(dims.begin(), dims.end());
    for (const auto& [name, range] : dims) {
        std::uniform_real_distribution<double> dist(range.first, range.second);
        t.set_constant(name, dist(rng));
    }
    return t;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentPlan& plan) {
    Model model = load_model(plan.model_path);
    std::vector<RequirementSpec> requirements = load_requirements(plan.requirements_path);
    if (requirements.empty()) throw SchemaError("plan's requirements file lists no requirements");

    bool needs_examples = false;
    for (Strategy s : plan.strategies)
        if (s != Strategy::ZeroShot) needs_examples = true;
    if (needs_examples && plan.training_path.empty())
        throw SchemaError("plan includes n-shot or chain-of-thought but no training examples");

    // One test suite and one repair seed shared across the whole grid.
    std::vector<TestCase> suite = generate_test_suite(model, plan.suite_size, plan.seed,
                                                      plan.steps);
    TestCase repair_seed = draw_seed_input(model, plan.seed, plan.steps);

    std::map<Verbosity, std::string> model_texts;
    for (Verbosity v : plan.verbosities) model_texts[v] = textualize(model, v);

    // Replay cassettes are immutable; load once, give each cell its own
    // cursor state.
    std::optional<Cassette> cassette;
    if (plan.backend.kind == BackendConfig::Kind::Replay)
        cassette = Cassette::load(plan.backend.cassette_path);

    fs::create_directories(fs::path(plan.out_dir) / "slices");

    ExperimentReport report;
    report.repetitions = plan.repetitions;
    report.seed = plan.seed;
    for (Verbosity v : plan.verbosities)
        for (Strategy s : plan.strategies)
            report.config_codes.push_back(std::string(verbosity_code(v)) + "-" +
                                          strategy_code(s));
    for (const auto& spec : requirements) report.requirement_ids.push_back(spec.id);

    struct CellJob {
        Verbosity verbosity;
        Strategy strategy;
        const RequirementSpec* spec;
        std::string config_code;
    };
    std::vector<CellJob> jobs;
    for (Verbosity v : plan.verbosities)
        for (Strategy s : plan.strategies)
            for (const auto& spec : requirements)
                jobs.push_back({v, s, &spec,
                                std::string(verbosity_code(v)) + "-" + strategy_code(s)});

    report.cells.resize(jobs.size());

    auto run_cell = [&](size_t index) {
        const CellJob& job = jobs[index];
        CellResult& cell = report.cells[index];
        cell.config_code = job.config_code;
        cell.requirement_id = job.spec->id;
        try {
            PromptConfig cfg;
            cfg.verbosity = job.verbosity;
            cfg.strategy = job.strategy;
            cfg.n_examples = job.strategy == Strategy::ZeroShot ? 0 : plan.n_examples;
            cfg.token_limit = plan.token_limit;

            std::vector<TrainingExample> examples;
            if (cfg.n_examples > 0) {
                examples = load_training_examples(plan.training_path, job.verbosity);
                if (static_cast<int>(examples.size()) > cfg.n_examples)
                    examples.resize(static_cast<size_t>(cfg.n_examples));
                cfg.n_examples = static_cast<int>(examples.size());
            }

            Prompt prompt =
                build_prompt(model_texts.at(job.verbosity), job.spec->text, cfg, examples);
            TokenBudget budget = check_token_budget(prompt);
            if (!budget.ok)
                cell.log_lines.push_back(job.config_code + "/" + job.spec->id +
                                         ": prompt exceeds token limit by " +
                                         std::to_string(budget.overage) + " tokens");

            std::unique_ptr<SlicingBackend> backend;
            if (plan.backend.kind == BackendConfig::Kind::Replay)
                backend = std::make_unique<ReplayBackend>(*cassette);
            else
                backend = make_backend(plan.backend, model, *job.spec);

            std::vector<BlockList> lists;
            for (int iter = 0; iter < plan.repetitions; ++iter) {
                std::string reply = backend->query(prompt);
                BlockList bl = parse_block_list(reply, model);
                bl.source = {plan.backend.kind == BackendConfig::Kind::Oracle
                                 ? BlockListSource::Kind::Oracle
                                 : (plan.backend.kind == BackendConfig::Kind::Replay
                                        ? BlockListSource::Kind::Replay
                                        : BlockListSource::Kind::Llm),
                             iter + 1};
                lists.push_back(std::move(bl));
            }

            auto evaluate_one = [&](const BlockList& bl, const std::string& iter_label)
                -> std::pair<Outcome, std::pair<int, std::set<int>>> {
                Slice slice = build_slice(model, bl, repair_seed,
                                          model.name + "/" + job.spec->id);
                std::string stem = cell_file_stem(job.config_code, job.spec->id, iter_label);
                save_slice(slice, (fs::path(plan.out_dir) / "slices" / (stem + ".json")).string());
                Verdict v = verdict(model, slice, *job.spec, suite);
                std::set<int> kept = slice.kept_sids;
                return {v.outcome, {conciseness(slice), std::move(kept)}};
            };

            for (int iter = 0; iter < plan.repetitions; ++iter) {
                auto [outcome, size_kept] =
                    evaluate_one(lists[static_cast<size_t>(iter)], "I" + std::to_string(iter + 1));
                cell.iteration_outcomes.push_back(outcome);
                cell.iteration_sizes.push_back(size_kept.first);
                cell.iteration_kept.push_back(std::move(size_kept.second));
            }
            if (plan.repetitions > 1) {
                BlockList all = aggregate_union(lists);
                auto [outcome, size_kept] = evaluate_one(all, "All");
                cell.union_outcome = outcome;
                cell.union_size = size_kept.first;
                cell.union_kept = std::move(size_kept.second);
            }
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    };

    int workers = std::max(1, std::min<int>(plan.max_workers, static_cast<int>(jobs.size())));
    if (workers == 1) {
        for (size_t i = 0; i < jobs.size(); ++i) run_cell(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    size_t i = next.fetch_add(1);
                    if (i >= jobs.size()) return;
                    run_cell(i);
                }
            });
        for (auto& th : pool) th.join();
    }
    return report;
}

namespace {

const CellResult* find_cell(const ExperimentReport& r, const std::string& config,
                            const std::string& req) {
    for (const auto& cell : r.cells)
        if (cell.config_code == config && cell.requirement_id == req) return &cell;
    return nullptr;
}

std::vector<std::string> column_labels(const ExperimentReport& r) {
    std::vector<std::string> cols;
    for (const auto& req : r.requirement_ids) {
        if (r.repetitions > 1) cols.push_back(req + " All");
        for (int i = 1; i <= r.repetitions; ++i)
            cols.push_back(req + " I" + std::to_string(i));
    }
    return cols;
}

// Cells for one row: union first (when present), then the iterations.
template <typename F>
void for_each_column(const ExperimentReport& r, const CellResult* cell, F&& emit) {
    if (r.repetitions > 1)
        emit(cell ? cell->union_outcome : std::nullopt,
             cell ? cell->union_size : std::nullopt);
    for (int i = 0; i < r.repetitions; ++i) {
        std::optional<Outcome> outcome;
        std::optional<int> size;
        if (cell && i < static_cast<int>(cell->iteration_outcomes.size())) {
            outcome = cell->iteration_outcomes[static_cast<size_t>(i)];
            size = cell->iteration_sizes[static_cast<size_t>(i)];
        }
        emit(outcome, size);
    }
}

std::string format_mean(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

}  // namespace

std::string render_accuracy_markdown(const ExperimentReport& r) {
    std::ostringstream out;
    out << "| Config |";
    for (const auto& col : column_labels(r)) out << " " << col << " |";
    out << "\n|---|";
    for (size_t i = 0; i < column_labels(r).size(); ++i) out << "---|";
    out << "\n";
    for (const auto& config : r.config_codes) {
        out << "| " << config << " |";
        for (const auto& req : r.requirement_ids) {
            const CellResult* cell = find_cell(r, config, req);
            if (cell && !cell->error.empty()) {
                int cols = r.repetitions + (r.repetitions > 1 ? 1 : 0);
                for (int i = 0; i < cols; ++i) out << " ! |";
                continue;
            }
            for_each_column(r, cell, [&](std::optional<Outcome> o, std::optional<int>) {
                out << " " << (o ? symbol(*o) : "-") << " |";
            });
        }
        out << "\n";
    }
    return out.str();
}

std::string render_accuracy_csv(const ExperimentReport& r) {
    std::ostringstream out;
    out << "config";
    for (const auto& col : column_labels(r)) {
        std::string c = col;
        for (auto& ch : c)
            if (ch == ' ') ch = '_';
        out << "," << c;
    }
    out << "\n";
    for (const auto& config : r.config_codes) {
        out << config;
        for (const auto& req : r.requirement_ids) {
            const CellResult* cell = find_cell(r, config, req);
            if (cell && !cell->error.empty()) {
                int cols = r.repetitions + (r.repetitions > 1 ? 1 : 0);
                for (int i = 0; i < cols; ++i) out << ",!";
                continue;
            }
            for_each_column(r, cell, [&](std::optional<Outcome> o, std::optional<int>) {
                out << "," << (o ? symbol(*o) : "-");
            });
        }
        out << "\n";
    }
    return out.str();
}

namespace {

// Mean over accurate slices per column plus the overall mean; sizes of
// inaccurate or vacuous slices render as dashes.
struct SizeTable {
    std::vector<std::vector<std::string>> rows;  // config -> cells
    std::vector<std::string> avg_row;
    std::string overall_mean;
};

SizeTable build_size_table(const ExperimentReport& r) {
    SizeTable table;
    size_t ncols = column_labels(r).size();
    std::vector<double> col_sum(ncols, 0.0);
    std::vector<int> col_count(ncols, 0);
    double total_sum = 0.0;
    int total_count = 0;

    for (const auto& config : r.config_codes) {
        std::vector<std::string> row;
        size_t col = 0;
        for (const auto& req : r.requirement_ids) {
            const CellResult* cell = find_cell(r, config, req);
            bool errored = cell && !cell->error.empty();
            size_t cells_in_group = static_cast<size_t>(r.repetitions + (r.repetitions > 1));
            if (errored) {
                for (size_t i = 0; i < cells_in_group; ++i) {
                    row.push_back("!");
                    ++col;
                }
                continue;
            }
            std::vector<std::pair<std::optional<Outcome>, std::optional<int>>> group;
            for_each_column(r, cell, [&](std::optional<Outcome> o, std::optional<int> sz) {
                group.push_back({o, sz});
            });
            for (const auto& [o, sz] : group) {
                if (o && sz && *o == Outcome::Accurate) {
                    row.push_back(std::to_string(*sz));
                    col_sum[col] += *sz;
                    ++col_count[col];
                    total_sum += *sz;
                    ++total_count;
                } else {
                    row.push_back("-");
                }
                ++col;
            }
        }
        table.rows.push_back(std::move(row));
    }
    for (size_t c = 0; c < ncols; ++c)
        table.avg_row.push_back(col_count[c] ? format_mean(col_sum[c] / col_count[c]) : "-");
    table.overall_mean = total_count ? format_mean(total_sum / total_count) : "-";
    return table;
}

}  // namespace

std::string render_size_markdown(const ExperimentReport& r) {
    SizeTable table = build_size_table(r);
    std::ostringstream out;
    auto cols = column_labels(r);
    out << "| Config |";
    for (const auto& col : cols) out << " " << col << " |";
    out << " AVG |\n|---|";
    for (size_t i = 0; i < cols.size() + 1; ++i) out << "---|";
    out << "\n";
    for (size_t row = 0; row < r.config_codes.size(); ++row) {
        out << "| " << r.config_codes[row] << " |";
        double sum = 0.0;
        int count = 0;
        for (const auto& cellv : table.rows[row]) {
            out << " " << cellv << " |";
            if (cellv != "-" && cellv != "!") {
                sum += std::stod(cellv);
                ++count;
            }
        }
        out << " " << (count ? format_mean(sum / count) : "-") << " |\n";
    }
    out << "| AVG |";
    for (const auto& avg : table.avg_row) out << " " << avg << " |";
    out << " " << table.overall_mean << " |\n";
    return out.str();
}

std::string render_size_csv(const ExperimentReport& r) {
    SizeTable table = build_size_table(r);
    std::ostringstream out;
    out << "config";
    for (const auto& col : column_labels(r)) {
        std::string c = col;
        for (auto& ch : c)
            if (ch == ' ') ch = '_';
        out << "," << c;
    }
    out << ",AVG\n";
    for (size_t row = 0; row < r.config_codes.size(); ++row) {
        out << r.config_codes[row];
        double sum = 0.0;
        int count = 0;
        for (const auto& cellv : table.rows[row]) {
            out << "," << cellv;
            if (cellv != "-" && cellv != "!") {
                sum += std::stod(cellv);
                ++count;
            }
        }
        out << "," << (count ? format_mean(sum / count) : "-") << "\n";
    }
    out << "AVG";
    for (const auto& avg : table.avg_row) out << "," << avg;
    out << "," << table.overall_mean << "\n";
    return out.str();
}

void write_report_files(const ExperimentReport& r, const std::string& out_dir) {
    fs::create_directories(out_dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        if (!out) throw Error("cannot write report file: " + name);
        out << content;
    };
    write("report_accuracy.md", render_accuracy_markdown(r));
    write("report_accuracy.csv", render_accuracy_csv(r));
    write("report_size.md", render_size_markdown(r));
    write("report_size.csv", render_size_csv(r));

    std::ostringstream log;
    log << "seed=" << r.seed << "\n";
    log << "configs=" << r.config_codes.size() << " requirements=" << r.requirement_ids.size()
        << " repetitions=" << r.repetitions << "\n";
    log << "iteration_slices=" << r.iteration_slice_count()
        << " union_slices=" << r.union_slice_count() << "\n";
    for (const auto& cell : r.cells) {
        for (const auto& line : cell.log_lines) log << line << "\n";
        if (!cell.error.empty())
            log << cell.config_code << "/" << cell.requirement_id << ": ERROR " << cell.error
                << "\n";
    }
    write("run.log", log.str());
}

}  // namespace reqslice
