#include "reqslice/model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "reqslice/errors.hpp"

namespace reqslice {

using nlohmann::json;

const char* to_string(BlockType t) {
    switch (t) {
        case BlockType::Inport: return "Inport";
        case BlockType::Outport: return "Outport";
        case BlockType::Constant: return "Constant";
        case BlockType::Gain: return "Gain";
        case BlockType::Sum: return "Sum";
        case BlockType::Product: return "Product";
        case BlockType::Switch: return "Switch";
        case BlockType::Saturation: return "Saturation";
        case BlockType::RelationalOperator: return "RelationalOperator";
        case BlockType::LogicalOperator: return "LogicalOperator";
        case BlockType::UnitDelay: return "UnitDelay";
        case BlockType::MinMax: return "MinMax";
        case BlockType::Abs: return "Abs";
        case BlockType::Goto: return "Goto";
        case BlockType::From: return "From";
    }
    return "?";
}

std::optional<BlockType> block_type_from_string(std::string_view s) {
    static const std::map<std::string_view, BlockType> table = {
        {"Inport", BlockType::Inport},
        {"Outport", BlockType::Outport},
        {"Constant", BlockType::Constant},
        {"Gain", BlockType::Gain},
        {"Sum", BlockType::Sum},
        {"Product", BlockType::Product},
        {"Switch", BlockType::Switch},
        {"Saturation", BlockType::Saturation},
        {"RelationalOperator", BlockType::RelationalOperator},
        {"LogicalOperator", BlockType::LogicalOperator},
        {"UnitDelay", BlockType::UnitDelay},
        {"MinMax", BlockType::MinMax},
        {"Abs", BlockType::Abs},
        {"Goto", BlockType::Goto},
        {"From", BlockType::From},
    };
    auto it = table.find(s);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

bool Block::has_param(const std::string& key) const { return params.count(key) > 0; }

double Block::num_param(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end() || !std::holds_alternative<double>(it->second))
        throw SchemaError("block " + std::to_string(sid) + " needs numeric param '" + key + "'");
    return std::get<double>(it->second);
}

double Block::num_param_or(const std::string& key, double fallback) const {
    auto it = params.find(key);
    if (it == params.end() || !std::holds_alternative<double>(it->second)) return fallback;
    return std::get<double>(it->second);
}

std::string Block::str_param(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end() || !std::holds_alternative<std::string>(it->second))
        throw SchemaError("block " + std::to_string(sid) + " needs string param '" + key + "'");
    return std::get<std::string>(it->second);
}

std::string Block::str_param_or(const std::string& key, const std::string& fallback) const {
    auto it = params.find(key);
    if (it == params.end() || !std::holds_alternative<std::string>(it->second)) return fallback;
    return std::get<std::string>(it->second);
}

const Block* Model::find(int sid) const {
    for (const auto& b : blocks)
        if (b.sid == sid) return &b;
    return nullptr;
}

const Block& Model::at(int sid) const {
    const Block* b = find(sid);
    if (!b) throw IntegrityError("no block with SID " + std::to_string(sid));
    return *b;
}

std::vector<const Block*> Model::blocks_of_type(BlockType t) const {
    std::vector<const Block*> out;
    for (const auto& b : blocks)
        if (b.type == t) out.push_back(&b);
    return out;
}

const Block* Model::goto_for_tag(const std::string& tag) const {
    for (const auto& b : blocks)
        if (b.type == BlockType::Goto && b.str_param_or("tag", "") == tag) return &b;
    return nullptr;
}

int input_port_count(const Block& b) {
    switch (b.type) {
        case BlockType::Inport:
        case BlockType::Constant:
            return 0;
        case BlockType::Outport:
        case BlockType::Gain:
        case BlockType::Saturation:
        case BlockType::UnitDelay:
        case BlockType::Abs:
        case BlockType::Goto:
        case BlockType::From:
            return 1;
        case BlockType::Sum:
            return static_cast<int>(b.str_param_or("signs", "++").size());
        case BlockType::Product:
        case BlockType::MinMax:
            return static_cast<int>(b.num_param_or("inputs", 2));
        case BlockType::Switch:
            return 3;
        case BlockType::RelationalOperator:
            return 2;
        case BlockType::LogicalOperator:
            if (b.str_param_or("op", "AND") == "NOT") return 1;
            return static_cast<int>(b.num_param_or("inputs", 2));
    }
    return 0;
}

int output_port_count(const Block& b) {
    switch (b.type) {
        case BlockType::Outport:
        case BlockType::Goto:
            return 0;
        default:
            return 1;
    }
}

namespace {

Endpoint parse_endpoint(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= s.size())
        throw SchemaError("endpoint must be \"SID:PORT\", got \"" + s + "\"");
    auto all_digits = [](std::string_view v) {
        return !v.empty() &&
               std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isdigit(c); });
    };
    std::string sid_part = s.substr(0, colon);
    std::string port_part = s.substr(colon + 1);
    if (!all_digits(sid_part) || !all_digits(port_part))
        throw SchemaError("endpoint must be \"SID:PORT\" with decimal integers, got \"" + s + "\"");
    return Endpoint{std::stoi(sid_part), std::stoi(port_part)};
}

std::string endpoint_to_string(const Endpoint& e) {
    return std::to_string(e.sid) + ":" + std::to_string(e.port);
}

// Checks the four model-level invariants; used by parse_model (throwing) and
// validate (collecting).
void check_integrity(const Model& m, std::vector<Violation>* out) {
    auto report = [&](Violation v) {
        if (out) {
            out->push_back(std::move(v));
        } else if (v.severity == Violation::Severity::Error) {
            throw IntegrityError(describe(v));
        }
    };

    std::set<int> sids;
    for (const auto& b : m.blocks) {
        if (b.sid <= 0)
            report({Violation::Severity::Error, Violation::Kind::BadParam, {b.sid},
                    "SID must be a positive integer"});
        if (!sids.insert(b.sid).second)
            report({Violation::Severity::Error, Violation::Kind::DuplicateSid, {b.sid},
                    "duplicate SID " + std::to_string(b.sid)});
    }

    std::set<std::pair<int, int>> driven;
    for (const auto& c : m.connections) {
        const Block* src = m.find(c.src.sid);
        const Block* dst = m.find(c.dst.sid);
        if (!src || !dst) {
            report({Violation::Severity::Error, Violation::Kind::DanglingEndpoint,
                    {src ? c.dst.sid : c.src.sid},
                    "connection " + endpoint_to_string(c.src) + " -> " +
                        endpoint_to_string(c.dst) + " references a missing block"});
            continue;
        }
        if (c.src.port < 1 || c.src.port > output_port_count(*src))
            report({Violation::Severity::Error, Violation::Kind::BadPort, {src->sid},
                    "block " + std::to_string(src->sid) + " has no output port " +
                        std::to_string(c.src.port)});
        if (c.dst.port < 1 || c.dst.port > input_port_count(*dst))
            report({Violation::Severity::Error, Violation::Kind::BadPort, {dst->sid},
                    "block " + std::to_string(dst->sid) + " has no input port " +
                        std::to_string(c.dst.port)});
        else if (!driven.insert({c.dst.sid, c.dst.port}).second)
            report({Violation::Severity::Error, Violation::Kind::MultipleDrivers, {c.dst.sid},
                    "input port " + endpoint_to_string(c.dst) + " has more than one driver"});
    }

    std::map<std::string, std::vector<int>> goto_tags;
    for (const auto& b : m.blocks)
        if (b.type == BlockType::Goto) goto_tags[b.str_param_or("tag", "")].push_back(b.sid);
    for (const auto& [tag, holders] : goto_tags)
        if (holders.size() > 1)
            report({Violation::Severity::Error, Violation::Kind::DuplicateGotoTag, holders,
                    "tag \"" + tag + "\" is held by more than one Goto block"});
    for (const auto& b : m.blocks) {
        if (b.type != BlockType::From) continue;
        std::string tag = b.str_param_or("tag", "");
        if (goto_tags.find(tag) == goto_tags.end())
            report({Violation::Severity::Error, Violation::Kind::UnmatchedFromTag, {b.sid},
                    "From block " + std::to_string(b.sid) + " tag \"" + tag +
                        "\" matches no Goto block"});
    }
}

const std::map<BlockType, std::vector<std::pair<const char*, bool>>>& required_params() {
    // param name -> expects numeric value
    static const std::map<BlockType, std::vector<std::pair<const char*, bool>>> table = {
        {BlockType::Constant, {{"value", true}}},
        {BlockType::Gain, {{"gain", true}}},
        {BlockType::Sum, {{"signs", false}}},
        {BlockType::Switch, {{"threshold", true}}},
        {BlockType::Saturation, {{"lower_limit", true}, {"upper_limit", true}}},
        {BlockType::RelationalOperator, {{"op", false}}},
        {BlockType::LogicalOperator, {{"op", false}}},
        {BlockType::UnitDelay, {{"initial", true}}},
        {BlockType::MinMax, {{"op", false}}},
        {BlockType::Goto, {{"tag", false}}},
        {BlockType::From, {{"tag", false}}},
    };
    return table;
}

}  // namespace

Model parse_model(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("model file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("model file must be a JSON object");

    Model m;
    try {
        m.name = j.at("name").get<std::string>();
        m.sample_time = j.at("sample_time").get<double>();
        if (!(m.sample_time > 0)) throw SchemaError("sample_time must be positive");

        for (const auto& jb : j.at("blocks")) {
            Block b;
            b.sid = jb.at("sid").get<int>();
            b.name = jb.at("name").get<std::string>();
            std::string type_str = jb.at("type").get<std::string>();
            auto type = block_type_from_string(type_str);
            if (!type) throw SchemaError("unknown block type \"" + type_str + "\"");
            b.type = *type;
            if (jb.contains("params")) {
                for (const auto& [key, val] : jb.at("params").items()) {
                    if (val.is_number())
                        b.params[key] = val.get<double>();
                    else if (val.is_string())
                        b.params[key] = val.get<std::string>();
                    else
                        throw SchemaError("param \"" + key + "\" of block " +
                                          std::to_string(b.sid) + " must be number or string");
                }
            }
            if (jb.contains("position")) {
                const auto& pos = jb.at("position");
                if (!pos.is_array() || pos.size() != 4)
                    throw SchemaError("position of block " + std::to_string(b.sid) +
                                      " must be [left, top, right, bottom]");
                for (size_t i = 0; i < 4; ++i) b.position[i] = pos[i].get<int>();
            }
            m.blocks.push_back(std::move(b));
        }

        for (const auto& jc : j.at("connections")) {
            Connection c;
            c.src = parse_endpoint(jc.at("src").get<std::string>());
            c.dst = parse_endpoint(jc.at("dst").get<std::string>());
            m.connections.push_back(c);
        }

        if (j.contains("input_ranges")) {
            for (const auto& [name, range] : j.at("input_ranges").items()) {
                if (!range.is_array() || range.size() != 2)
                    throw SchemaError("input range for \"" + name + "\" must be [lo, hi]");
                m.input_ranges[name] = {range[0].get<double>(), range[1].get<double>()};
            }
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("model file does not match schema: ") + e.what());
    }

    check_integrity(m, nullptr);
    return m;
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SyntaxError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

std::string serialize_model(const Model& m) {
    json j;
    j["name"] = m.name;
    j["sample_time"] = m.sample_time;
    j["blocks"] = json::array();
    for (const auto& b : m.blocks) {
        json jb;
        jb["sid"] = b.sid;
        jb["name"] = b.name;
        jb["type"] = to_string(b.type);
        jb["params"] = json::object();
        for (const auto& [key, val] : b.params) {
            if (std::holds_alternative<double>(val))
                jb["params"][key] = std::get<double>(val);
            else
                jb["params"][key] = std::get<std::string>(val);
        }
        jb["position"] = b.position;
        j["blocks"].push_back(std::move(jb));
    }
    j["connections"] = json::array();
    for (const auto& c : m.connections)
        j["connections"].push_back(
            {{"src", endpoint_to_string(c.src)}, {"dst", endpoint_to_string(c.dst)}});
    j["input_ranges"] = json::object();
    for (const auto& [name, range] : m.input_ranges)
        j["input_ranges"][name] = {range.first, range.second};
    return j.dump(2) + "\n";
}

void save_model(const Model& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SyntaxError("cannot write model file: " + path);
    out << serialize_model(m);
}

std::vector<Violation> validate(const Model& m) {
    std::vector<Violation> out;
    check_integrity(m, &out);

    for (const auto& b : m.blocks) {
        auto req = required_params().find(b.type);
        if (req != required_params().end()) {
            for (const auto& [key, numeric] : req->second) {
                auto it = b.params.find(key);
                if (it == b.params.end()) {
                    out.push_back({Violation::Severity::Error, Violation::Kind::MissingParam,
                                   {b.sid},
                                   "block " + std::to_string(b.sid) + " (" + to_string(b.type) +
                                       ") is missing param \"" + key + "\""});
                    continue;
                }
                bool is_num = std::holds_alternative<double>(it->second);
                if (is_num != numeric)
                    out.push_back({Violation::Severity::Error, Violation::Kind::BadParam, {b.sid},
                                   "param \"" + std::string(key) + "\" of block " +
                                       std::to_string(b.sid) + " has the wrong kind"});
            }
        }
        if (b.type == BlockType::Saturation && b.has_param("lower_limit") &&
            b.has_param("upper_limit") && b.num_param("upper_limit") < b.num_param("lower_limit"))
            out.push_back({Violation::Severity::Error, Violation::Kind::BadParam, {b.sid},
                           "saturation block " + std::to_string(b.sid) +
                               " has upper_limit < lower_limit"});
        if (b.type == BlockType::Sum) {
            std::string signs = b.str_param_or("signs", "++");
            if (signs.empty() || signs.find_first_not_of("+-") != std::string::npos)
                out.push_back({Violation::Severity::Error, Violation::Kind::BadParam, {b.sid},
                               "sum block " + std::to_string(b.sid) +
                                   " signs must be a nonempty string over +/-"});
        }
        if (b.type == BlockType::RelationalOperator) {
            static const std::set<std::string> ops = {"<", "<=", ">", ">=", "==", "~="};
            if (b.has_param("op") && !ops.count(b.str_param_or("op", "")))
                out.push_back({Violation::Severity::Error, Violation::Kind::BadParam, {b.sid},
                               "relational operator " + std::to_string(b.sid) +
                                   " op must be one of < <= > >= == ~="});
        }
        if (b.type == BlockType::LogicalOperator) {
            static const std::set<std::string> ops = {"AND", "OR", "NOT"};
            if (b.has_param("op") && !ops.count(b.str_param_or("op", "")))
                out.push_back({Violation::Severity::Error, Violation::Kind::BadParam, {b.sid},
                               "logical operator " + std::to_string(b.sid) +
                                   " op must be AND, OR or NOT"});
        }
        if (b.type == BlockType::MinMax) {
            if (b.has_param("op") && b.str_param_or("op", "") != "min" &&
                b.str_param_or("op", "") != "max")
                out.push_back({Violation::Severity::Error, Violation::Kind::BadParam, {b.sid},
                               "minmax block " + std::to_string(b.sid) + " op must be min or max"});
        }
        if (b.position[2] <= b.position[0] || b.position[3] <= b.position[1])
            out.push_back({Violation::Severity::Error, Violation::Kind::BadPosition, {b.sid},
                           "block " + std::to_string(b.sid) +
                               " position must have right > left and bottom > top"});
    }

    // A Goto whose tag no From references is legal in originals; surfaced as a
    // warning so slicing closures can still be checked strictly.
    std::set<std::string> from_tags;
    for (const auto& b : m.blocks)
        if (b.type == BlockType::From) from_tags.insert(b.str_param_or("tag", ""));
    for (const auto& b : m.blocks) {
        if (b.type != BlockType::Goto) continue;
        std::string tag = b.str_param_or("tag", "");
        if (!from_tags.count(tag))
            out.push_back({Violation::Severity::Warning, Violation::Kind::UnmatchedGotoTag,
                           {b.sid},
                           "Goto block " + std::to_string(b.sid) + " tag \"" + tag +
                               "\" has no From block"});
    }
    return out;
}

bool has_errors(const std::vector<Violation>& violations) {
    return std::any_of(violations.begin(), violations.end(), [](const Violation& v) {
        return v.severity == Violation::Severity::Error;
    });
}

const char* to_string(Violation::Kind k) {
    switch (k) {
        case Violation::Kind::DuplicateSid: return "DuplicateSid";
        case Violation::Kind::DanglingEndpoint: return "DanglingEndpoint";
        case Violation::Kind::BadPort: return "BadPort";
        case Violation::Kind::MultipleDrivers: return "MultipleDrivers";
        case Violation::Kind::UnmatchedFromTag: return "UnmatchedFromTag";
        case Violation::Kind::DuplicateGotoTag: return "DuplicateGotoTag";
        case Violation::Kind::UnmatchedGotoTag: return "UnmatchedGotoTag";
        case Violation::Kind::MissingParam: return "MissingParam";
        case Violation::Kind::BadParam: return "BadParam";
        case Violation::Kind::BadPosition: return "BadPosition";
    }
    return "?";
}

std::string describe(const Violation& v) {
    std::string s = to_string(v.kind);
    s += ": ";
    s += v.detail;
    return s;
}

}  // namespace reqslice
