#include "reqslice/prompt.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "reqslice/errors.hpp"

namespace reqslice {

using nlohmann::json;

const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::ZeroShot: return "zero_shot";
        case Strategy::NShot: return "n_shot";
        case Strategy::ChainOfThought: return "chain_of_thought";
    }
    return "?";
}

std::optional<Strategy> strategy_from_string(std::string_view s) {
    if (s == "zero_shot" || s == "zeroshot" || s == "ZS" || s == "zs") return Strategy::ZeroShot;
    if (s == "n_shot" || s == "nshot" || s == "NS" || s == "ns") return Strategy::NShot;
    if (s == "chain_of_thought" || s == "cot" || s == "CT" || s == "ct")
        return Strategy::ChainOfThought;
    return std::nullopt;
}

const char* strategy_code(Strategy s) {
    switch (s) {
        case Strategy::ZeroShot: return "ZS";
        case Strategy::NShot: return "NS";
        case Strategy::ChainOfThought: return "CT";
    }
    return "?";
}

const char* verbosity_code(Verbosity v) {
    switch (v) {
        case Verbosity::High: return "H";
        case Verbosity::Medium: return "M";
        case Verbosity::Low: return "L";
    }
    return "?";
}

const char* const kPromptSliceDefinition =
    "A model slice consists of the parts of a model that potentially impacts the input "
    "parameter values computed at some point of interest. This point of interest is referred "
    "to as a slicing criterion and is specified by a location in the model in combination "
    "with a subset of the model's variables. You are a requirement engineer working on "
    "requirements verification and testing for the following system.";

const char* const kPromptExtractInstruction =
    "Parse the provided Simulink model to extract the blocks and corresponding SID values "
    "which meets the requirement:";

const char* const kPromptAnswerFormat = "Provide your answer as a list of block ids.";

namespace {

std::string render_sid_list(const std::vector<int>& sids) {
    std::ostringstream out;
    out << "[";
    for (size_t i = 0; i < sids.size(); ++i) {
        if (i) out << ", ";
        out << sids[i];
    }
    out << "]";
    return out.str();
}

}  // namespace

std::string build_training_fragment(const TrainingExample& ex, Strategy strategy) {
    if (strategy == Strategy::ZeroShot) return "";
    if (ex.block_sids.empty())
        throw ExampleCountMismatch("training example has an empty block id list");

    std::ostringstream out;
    out << "Textual Simulink Model: " << ex.model_text;
    if (!ex.model_text.empty() && ex.model_text.back() != '\n') out << "\n";
    out << "Requirement: " << ex.requirement_text << "\n";
    if (strategy == Strategy::ChainOfThought) {
        if (ex.reasoning_steps.empty())
            throw MissingReasoning(
                "chain-of-thought prompting needs reasoning steps in the training example");
        out << "Reasoning Steps:\n";
        for (size_t i = 0; i < ex.reasoning_steps.size(); ++i)
            out << (i + 1) << ". " << ex.reasoning_steps[i] << "\n";
    }
    out << "BlockList: " << render_sid_list(ex.block_sids);
    return out.str();
}

Prompt build_prompt(const std::string& model_text, const std::string& requirement_text,
                    const PromptConfig& cfg, const std::vector<TrainingExample>& examples,
                    const TokenEstimator& estimator) {
    if (cfg.strategy == Strategy::ZeroShot && cfg.n_examples != 0)
        throw ExampleCountMismatch("zero-shot prompts take no training examples");
    if (cfg.strategy != Strategy::ZeroShot && cfg.n_examples < 1)
        throw ExampleCountMismatch("n-shot and chain-of-thought prompts need >= 1 example");
    if (static_cast<int>(examples.size()) != cfg.n_examples)
        throw ExampleCountMismatch("expected " + std::to_string(cfg.n_examples) +
                                   " training examples, got " + std::to_string(examples.size()));

    std::string example_segment;
    for (size_t i = 0; i < examples.size(); ++i) {
        if (i) example_segment += "\n\n";
        example_segment += build_training_fragment(examples[i], cfg.strategy);
    }

    Prompt p;
    p.config = cfg;
    std::ostringstream out;
    out << kPromptSliceDefinition << "\n\n";
    out << "Textual Simulink Model: " << model_text << "\n\n";
    out << "Example: " << example_segment << "\n\n";
    out << kPromptExtractInstruction << "\n\n";
    out << "Requirement: " << requirement_text << "\n\n";
    out << kPromptAnswerFormat << "\n";
    p.text = out.str();
    p.token_estimate = estimator ? estimator(p.text) : token_count(p.text);
    return p;
}

TokenBudget check_token_budget(const Prompt& p) {
    if (p.token_estimate <= p.config.token_limit) return {true, 0};
    return {false, p.token_estimate - p.config.token_limit};
}

std::vector<TrainingExample> load_training_examples(const std::string& path,
                                                    std::optional<Verbosity> verbosity_override) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SyntaxError("cannot open training-example file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("training-example file is not valid JSON: ") + e.what());
    }

    std::filesystem::path base = std::filesystem::path(path).parent_path();
    std::vector<TrainingExample> out;
    try {
        for (const auto& je : j.at("examples")) {
            TrainingExample ex;
            std::string model_rel = je.at("model").get<std::string>();
            std::filesystem::path model_path = base / model_rel;
            Verbosity v = Verbosity::Medium;
            if (auto parsed = verbosity_from_string(je.value("verbosity", "medium")))
                v = *parsed;
            if (verbosity_override) v = *verbosity_override;
            ex.model_text = textualize(load_model(model_path.string()), v);
            ex.requirement_text = je.at("requirement").get<std::string>();
            for (const auto& sid : je.at("block_sids")) ex.block_sids.push_back(sid.get<int>());
            if (je.contains("reasoning"))
                for (const auto& step : je.at("reasoning"))
                    ex.reasoning_steps.push_back(step.get<std::string>());
            out.push_back(std::move(ex));
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("training-example file does not match schema: ") + e.what());
    }
    return out;
}

}  // namespace reqslice
