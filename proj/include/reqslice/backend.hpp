#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "reqslice/blocklist.hpp"
#include "reqslice/prompt.hpp"

namespace reqslice {

struct BackendConfig {
    enum class Kind { Live, Replay, Oracle };

    Kind kind = Kind::Oracle;
    std::string endpoint;    // Live; falls back to REQSLICE_LLM_URL
    std::string model_name;  // Live; falls back to REQSLICE_LLM_MODEL
    std::string api_key_env = "REQSLICE_LLM_KEY";
    double temperature = 0.7;
    int repetitions = 3;
    std::string cassette_path;  // Replay source; Live records here when set

    static std::optional<Kind> kind_from_string(std::string_view s);
};

std::string sha256_hex(std::string_view data);

struct CassetteRecord {
    std::string prompt_sha256;
    std::string response;
    std::string ts;  // ISO 8601, informational only
};

// JSON Lines cassette: one {"prompt_sha256", "response", "ts"} object per
// line. Loading is immutable and shareable; appends are serialized.
class Cassette {
  public:
    Cassette() = default;
    static Cassette load(const std::string& path);

    static void append(const std::string& path, const CassetteRecord& rec);

    const std::vector<CassetteRecord>& records() const { return records_; }

  private:
    std::vector<CassetteRecord> records_;
};

class SlicingBackend {
  public:
    virtual ~SlicingBackend() = default;
    // Returns the backend's raw textual reply for the prompt.
    virtual std::string query(const Prompt& p) = 0;
};

// Replays recorded responses keyed by sha256 of the prompt text. Repeated
// queries with the same prompt consume that hash's records in file order;
// running out raises CassetteMiss. Performs no network I/O.
class ReplayBackend : public SlicingBackend {
  public:
    explicit ReplayBackend(Cassette cassette);
    std::string query(const Prompt& p) override;

  private:
    Cassette cassette_;
    std::map<std::string, std::vector<const CassetteRecord*>> by_hash_;
    std::map<std::string, size_t> cursor_;
};

// Synthesizes the reply a cooperative respondent would give: the
// deterministic dataflow slice, rendered as a bracketed id list.
class OracleBackend : public SlicingBackend {
  public:
    OracleBackend(Model model, RequirementSpec spec);
    std::string query(const Prompt& p) override;

  private:
    Model model_;
    RequirementSpec spec_;
};

// Talks to an OpenAI-compatible chat-completions endpoint. Credentials come
// from the environment variable named in the config. When a cassette path is
// configured every exchange is appended for later replay.
class LiveBackend : public SlicingBackend {
  public:
    explicit LiveBackend(BackendConfig cfg);
    std::string query(const Prompt& p) override;

  private:
    BackendConfig cfg_;
    std::mutex record_mutex_;
};

std::unique_ptr<SlicingBackend> make_backend(const BackendConfig& cfg, const Model& model,
                                             const RequirementSpec& spec);

}  // namespace reqslice
