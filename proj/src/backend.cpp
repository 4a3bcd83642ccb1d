#include "reqslice/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "httplib.h"
#include "json.hpp"

#include "reqslice/errors.hpp"

namespace reqslice {

using nlohmann::json;

std::optional<BackendConfig::Kind> BackendConfig::kind_from_string(std::string_view s) {
    if (s == "live") return Kind::Live;
    if (s == "replay") return Kind::Replay;
    if (s == "oracle") return Kind::Oracle;
    return std::nullopt;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 digest failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

Cassette Cassette::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CassetteMiss("cannot open cassette file: " + path);
    Cassette c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
            CassetteRecord rec;
            rec.prompt_sha256 = j.at("prompt_sha256").get<std::string>();
            rec.response = j.at("response").get<std::string>();
            rec.ts = j.value("ts", "");
            c.records_.push_back(std::move(rec));
        } catch (const json::exception& e) {
            throw SyntaxError("cassette line " + std::to_string(lineno) + " is malformed: " +
                              e.what());
        }
    }
    return c;
}

void Cassette::append(const std::string& path, const CassetteRecord& rec) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot append to cassette file: " + path);
    json j = {{"prompt_sha256", rec.prompt_sha256}, {"response", rec.response}, {"ts", rec.ts}};
    out << j.dump() << "\n";
}

ReplayBackend::ReplayBackend(Cassette cassette) : cassette_(std::move(cassette)) {
    for (const auto& rec : cassette_.records()) by_hash_[rec.prompt_sha256].push_back(&rec);
}

std::string ReplayBackend::query(const Prompt& p) {
    std::string hash = sha256_hex(p.text);
    auto it = by_hash_.find(hash);
    if (it == by_hash_.end())
        throw CassetteMiss("cassette has no record for prompt hash " + hash);
    size_t& cur = cursor_[hash];
    if (cur >= it->second.size())
        throw CassetteMiss("cassette records for prompt hash " + hash + " are exhausted (" +
                           std::to_string(it->second.size()) + " recorded)");
    return it->second[cur++]->response;
}

OracleBackend::OracleBackend(Model model, RequirementSpec spec)
    : model_(std::move(model)), spec_(std::move(spec)) {}

std::string OracleBackend::query(const Prompt&) {
    return render_block_list(oracle_slice(model_, spec_));
}

namespace {

std::string iso8601_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ParsedUrl {
    std::string scheme_host;  // what httplib::Client takes, e.g. "http://host:8080"
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw NetworkError("endpoint URL needs a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/v1/chat/completions"};
    std::string path = url.substr(path_start);
    if (path == "/") path = "/v1/chat/completions";
    return {url.substr(0, path_start), path};
}

}  // namespace

LiveBackend::LiveBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.endpoint.empty())
        if (const char* env = std::getenv("REQSLICE_LLM_URL")) cfg_.endpoint = env;
    if (cfg_.model_name.empty())
        if (const char* env = std::getenv("REQSLICE_LLM_MODEL")) cfg_.model_name = env;
}

std::string LiveBackend::query(const Prompt& p) {
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (!key || !*key)
        throw AuthError("no API key: set the " + cfg_.api_key_env + " environment variable");
    if (cfg_.endpoint.empty())
        throw NetworkError("no endpoint: set REQSLICE_LLM_URL or the backend endpoint field");

    ParsedUrl url = split_url(cfg_.endpoint);
    httplib::Client client(url.scheme_host);
    client.set_connection_timeout(30);
    client.set_read_timeout(300);

    json body = {
        {"model", cfg_.model_name.empty() ? "gpt-4" : cfg_.model_name},
        {"messages", json::array({{{"role", "user"}, {"content", p.text}}})},
        {"temperature", cfg_.temperature},
    };
    httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};

    auto res = client.Post(url.path, headers, body.dump(), "application/json");
    if (!res)
        throw NetworkError("request to " + cfg_.endpoint + " failed: " +
                           httplib::to_string(res.error()));
    if (res->status == 401 || res->status == 403)
        throw AuthError("endpoint rejected the credential (HTTP " +
                        std::to_string(res->status) + ")");
    if (res->status >= 400) {
        std::string text = res->body;
        if (text.find("token") != std::string::npos ||
            text.find("context length") != std::string::npos)
            throw TokenLimitExceeded("endpoint refused the prompt (HTTP " +
                                     std::to_string(res->status) + "): " + text);
        throw NetworkError("endpoint returned HTTP " + std::to_string(res->status) + ": " + text);
    }

    std::string content;
    try {
        json reply = json::parse(res->body);
        content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw NetworkError(std::string("endpoint reply is not chat-completion shaped: ") +
                           e.what());
    }

    if (!cfg_.cassette_path.empty()) {
        std::lock_guard<std::mutex> lock(record_mutex_);
        Cassette::append(cfg_.cassette_path,
                         {sha256_hex(p.text), content, iso8601_now()});
    }
    return content;
}

std::unique_ptr<SlicingBackend> make_backend(const BackendConfig& cfg, const Model& model,
                                             const RequirementSpec& spec) {
    switch (cfg.kind) {
        case BackendConfig::Kind::Oracle:
            return std::make_unique<OracleBackend>(model, spec);
        case BackendConfig::Kind::Replay:
            return std::make_unique<ReplayBackend>(Cassette::load(cfg.cassette_path));
        case BackendConfig::Kind::Live:
            return std::make_unique<LiveBackend>(cfg);
    }
    throw Error("unknown backend kind");
}

}  // namespace reqslice
