#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace reqslice {

enum class BlockType {
    Inport,
    Outport,
    Constant,
    Gain,
    Sum,
    Product,
    Switch,
    Saturation,
    RelationalOperator,
    LogicalOperator,
    UnitDelay,
    MinMax,
    Abs,
    Goto,
    From,
};

const char* to_string(BlockType t);
std::optional<BlockType> block_type_from_string(std::string_view s);

using ParamValue = std::variant<double, std::string>;

struct Block {
    int sid = 0;
    std::string name;
    BlockType type = BlockType::Inport;
    std::map<std::string, ParamValue> params;
    std::array<int, 4> position{0, 0, 30, 30};  // left, top, right, bottom

    bool has_param(const std::string& key) const;
    // Throw SchemaError if the param is absent or has the wrong kind.
    double num_param(const std::string& key) const;
    double num_param_or(const std::string& key, double fallback) const;
    std::string str_param(const std::string& key) const;
    std::string str_param_or(const std::string& key, const std::string& fallback) const;

    bool operator==(const Block&) const = default;
};

struct Endpoint {
    int sid = 0;
    int port = 1;  // 1-based, Simulink convention

    bool operator==(const Endpoint&) const = default;
    auto operator<=>(const Endpoint&) const = default;
};

struct Connection {
    Endpoint src;
    Endpoint dst;

    bool operator==(const Connection&) const = default;
};

struct Model {
    std::string name;
    double sample_time = 1.0;
    std::vector<Block> blocks;           // file order preserved
    std::vector<Connection> connections; // file order preserved
    std::map<std::string, std::pair<double, double>> input_ranges;

    const Block* find(int sid) const;
    const Block& at(int sid) const;  // throws IntegrityError if absent

    std::vector<const Block*> blocks_of_type(BlockType t) const;
    // The single Goto block carrying `tag`, or nullptr.
    const Block* goto_for_tag(const std::string& tag) const;

    bool operator==(const Model&) const = default;
};

// Port arity for a block instance. Widths of Sum, Product, LogicalOperator
// and MinMax depend on their params. From blocks expose one optional input
// port: unconnected it is fed through its Goto tag, connected it overrides
// the tag wire (used by slice repair).
int input_port_count(const Block& b);
int output_port_count(const Block& b);

struct Violation {
    enum class Severity { Warning, Error };
    enum class Kind {
        DuplicateSid,
        DanglingEndpoint,
        BadPort,
        MultipleDrivers,
        UnmatchedFromTag,
        DuplicateGotoTag,
        UnmatchedGotoTag,  // Goto with no From; legal in originals, warning only
        MissingParam,
        BadParam,
        BadPosition,
    };

    Severity severity = Severity::Error;
    Kind kind = Kind::BadParam;
    std::vector<int> sids;
    std::string detail;
};

const char* to_string(Violation::Kind k);

// Parse a model file. Enforces the model-level invariants (distinct SIDs,
// resolvable endpoints with valid ports, at most one driver per input port,
// Goto/From tag discipline); block-level parameter checks are left to
// validate() so partially-specified models can still be inspected.
Model parse_model(const std::string& text);
Model load_model(const std::string& path);

std::string serialize_model(const Model& m);
void save_model(const Model& m, const std::string& path);

std::vector<Violation> validate(const Model& m);
bool has_errors(const std::vector<Violation>& violations);
std::string describe(const Violation& v);

}  // namespace reqslice
