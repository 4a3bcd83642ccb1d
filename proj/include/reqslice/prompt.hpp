#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reqslice/textualize.hpp"

namespace reqslice {

enum class Strategy { ZeroShot, NShot, ChainOfThought };

const char* to_string(Strategy s);
// Accepts both long names ("zero_shot") and the report codes ("ZS").
std::optional<Strategy> strategy_from_string(std::string_view s);
const char* strategy_code(Strategy s);   // "ZS" / "NS" / "CT"
const char* verbosity_code(Verbosity v); // "H" / "M" / "L"

struct PromptConfig {
    Verbosity verbosity = Verbosity::Medium;
    Strategy strategy = Strategy::ZeroShot;
    int n_examples = 0;  // must be 0 for ZeroShot, >= 1 otherwise
    int token_limit = 128000;
};

struct TrainingExample {
    std::string model_text;        // textualized training model
    std::string requirement_text;
    std::vector<int> block_sids;   // the known-good slice
    std::vector<std::string> reasoning_steps;  // required for ChainOfThought
};

struct Prompt {
    std::string text;
    int token_estimate = 0;
    PromptConfig config;
};

// The three fixed template segments. Exposed so tests can assert their order.
extern const char* const kPromptSliceDefinition;
extern const char* const kPromptExtractInstruction;
extern const char* const kPromptAnswerFormat;

// One worked example for the prompt's example segment. NShot renders the
// training model, its requirement and the block ids; ChainOfThought inserts
// numbered reasoning steps before the id list. ZeroShot renders nothing.
std::string build_training_fragment(const TrainingExample& ex, Strategy strategy);

Prompt build_prompt(const std::string& model_text, const std::string& requirement_text,
                    const PromptConfig& cfg, const std::vector<TrainingExample>& examples,
                    const TokenEstimator& estimator = nullptr);

struct TokenBudget {
    bool ok = true;
    int overage = 0;  // tokens beyond the limit when !ok
};

TokenBudget check_token_budget(const Prompt& p);

// Reads a training-example file:
//   {"examples": [{"model": "<path>", "verbosity": "medium", "requirement": str,
//                  "block_sids": [int...], "reasoning": [str...]?}]}
// Model paths are resolved relative to the file. When `verbosity_override`
// is set the referenced models are textualized at that level instead of the
// level recorded per example (used to keep examples at the target model's
// verbosity).
std::vector<TrainingExample> load_training_examples(
    const std::string& path, std::optional<Verbosity> verbosity_override = std::nullopt);

}  // namespace reqslice
