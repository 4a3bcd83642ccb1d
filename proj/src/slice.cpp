#include "reqslice/slice.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "reqslice/errors.hpp"

namespace reqslice {

using nlohmann::json;

namespace {

std::map<std::string, int> goto_sids_by_tag(const Model& m) {
    std::map<std::string, int> out;
    for (const auto& b : m.blocks)
        if (b.type == BlockType::Goto) out[b.str_param_or("tag", "")] = b.sid;
    return out;
}

}  // namespace

BlockList augment_edge_cases(const Model& m, const BlockList& bl) {
    for (int sid : bl.sids)
        if (!m.find(sid))
            throw IntegrityError("block list names SID " + std::to_string(sid) +
                                 " which is not in the model");

    std::set<int> kept(bl.sids.begin(), bl.sids.end());
    auto goto_by_tag = goto_sids_by_tag(m);

    bool changed = true;
    while (changed) {
        changed = false;
        std::set<int> additions;
        for (const auto& c : m.connections) {
            const Block& src = m.at(c.src.sid);
            const Block& dst = m.at(c.dst.sid);
            // Inports feeding kept blocks, Outports fed by kept blocks.
            if (src.type == BlockType::Inport && kept.count(dst.sid) && !kept.count(src.sid))
                additions.insert(src.sid);
            if (dst.type == BlockType::Outport && kept.count(src.sid) && !kept.count(dst.sid))
                additions.insert(dst.sid);
        }
        for (const auto& b : m.blocks) {
            if (!kept.count(b.sid)) continue;
            if (b.type == BlockType::Goto) {
                std::string tag = b.str_param_or("tag", "");
                for (const auto& other : m.blocks)
                    if (other.type == BlockType::From && other.str_param_or("tag", "") == tag &&
                        !kept.count(other.sid))
                        additions.insert(other.sid);
            }
            if (b.type == BlockType::From) {
                auto it = goto_by_tag.find(b.str_param_or("tag", ""));
                if (it != goto_by_tag.end() && !kept.count(it->second))
                    additions.insert(it->second);
            }
        }
        if (!additions.empty()) {
            kept.insert(additions.begin(), additions.end());
            changed = true;
        }
    }

    BlockList out;
    out.source = bl.source;
    out.ignored = bl.ignored;
    out.sids = bl.sids;
    for (int sid : kept)
        if (!bl.contains(sid)) out.sids.push_back(sid);
    // Original order first, then additions ascending.
    std::sort(out.sids.begin() + static_cast<long>(bl.sids.size()), out.sids.end());
    return out;
}

Slice resolve_dangling(const Model& m, const BlockList& bl, const TestCase& seed_input) {
    std::set<int> kept(bl.sids.begin(), bl.sids.end());
    auto goto_by_tag = goto_sids_by_tag(m);

    // Original driver of each input port, for repair-value lookup.
    std::map<std::pair<int, int>, Endpoint> original_driver;
    for (const auto& c : m.connections) original_driver[{c.dst.sid, c.dst.port}] = c.src;

    // Drop Outports that lost their driver and Inports that feed nothing
    // kept; a constant-fed Outport or a dead Inport tells the evaluator
    // nothing.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& b : m.blocks) {
            if (!kept.count(b.sid)) continue;
            if (b.type == BlockType::Outport) {
                auto it = original_driver.find({b.sid, 1});
                bool fed = it != original_driver.end() && kept.count(it->second.sid);
                if (!fed) {
                    kept.erase(b.sid);
                    changed = true;
                }
            } else if (b.type == BlockType::Inport) {
                bool consumed = false;
                for (const auto& c : m.connections)
                    if (c.src.sid == b.sid && kept.count(c.dst.sid)) consumed = true;
                if (!consumed) {
                    kept.erase(b.sid);
                    changed = true;
                }
            }
        }
    }

    Slice slice;
    slice.model.name = m.name;
    slice.model.sample_time = m.sample_time;
    for (const auto& b : m.blocks)
        if (kept.count(b.sid)) slice.model.blocks.push_back(b);
    for (const auto& c : m.connections)
        if (kept.count(c.src.sid) && kept.count(c.dst.sid)) slice.model.connections.push_back(c);
    for (const auto& b : slice.model.blocks)
        if (b.type == BlockType::Inport) {
            auto it = m.input_ranges.find(b.name);
            if (it != m.input_ranges.end()) slice.model.input_ranges[b.name] = it->second;
        }

    // resolve_dangling cannot tell raw candidates from closure additions;
    // build_slice redoes this split against the pre-closure list.
    for (int sid : bl.sids)
        if (kept.count(sid)) slice.kept_sids.insert(sid);

    // Dangling analysis over the sub-model.
    std::map<std::pair<int, int>, Endpoint> slice_driver;
    for (const auto& c : slice.model.connections) slice_driver[{c.dst.sid, c.dst.port}] = c.src;
    auto slice_goto_by_tag = goto_sids_by_tag(slice.model);

    Trace seed_trace;
    bool seed_run = false;
    auto original_port_value = [&](int sid, int port) -> double {
        auto it = original_driver.find({sid, port});
        if (it == original_driver.end())
            throw SimulationError("block " + std::to_string(sid) + " input port " +
                                  std::to_string(port) +
                                  " is unconnected in the original model; cannot repair");
        if (!seed_run) {
            seed_trace = simulate(m, seed_input);
            seed_run = true;
        }
        std::string signal = std::to_string(it->second.sid) + ":" + std::to_string(it->second.port);
        return seed_trace.at(signal).at(0);
    };

    int next_sid = 0;
    for (const auto& b : m.blocks) next_sid = std::max(next_sid, b.sid);
    ++next_sid;

    std::vector<const Block*> ordered;
    for (const auto& b : slice.model.blocks) ordered.push_back(&b);
    std::sort(ordered.begin(), ordered.end(),
              [](const Block* a, const Block* b) { return a->sid < b->sid; });

    std::vector<Block> new_blocks;
    std::vector<Connection> new_connections;
    std::set<std::pair<int, int>> wired;  // ports fed by a new constant

    auto add_constant = [&](int target_sid, int port, double value) -> int {
        Block c;
        c.sid = next_sid++;
        c.name = "fix_" + std::to_string(target_sid) + "_" + std::to_string(port);
        c.type = BlockType::Constant;
        c.params["value"] = value;
        const Block& target = m.at(target_sid);
        c.position = {target.position[0] - 60, target.position[1], target.position[0] - 30,
                      target.position[1] + 30};
        new_blocks.push_back(c);
        new_connections.push_back({{c.sid, 1}, {target_sid, port}});
        wired.insert({target_sid, port});
        return c.sid;
    };

    for (const Block* b : ordered) {
        int ports = input_port_count(*b);
        for (int port = 1; port <= ports; ++port) {
            if (slice_driver.count({b->sid, port})) continue;
            if (b->type == BlockType::Goto) continue;  // handled through its From blocks
            if (b->type == BlockType::From) {
                std::string tag = b->str_param_or("tag", "");
                auto git = slice_goto_by_tag.find(tag);
                bool tag_fed = git != slice_goto_by_tag.end() &&
                               slice_driver.count({git->second, 1});
                if (tag_fed) continue;
                // The tag wire is broken: the value that used to arrive here
                // is whatever fed the Goto in the original model.
                int goto_sid = goto_by_tag.at(tag);
                double value = original_port_value(goto_sid, 1);
                int const_sid = add_constant(b->sid, 1, value);
                slice.constant_fixes.push_back({b->sid, 1, value, const_sid});
                // Also feed the Goto so the slice has no unfed port at all.
                if (git != slice_goto_by_tag.end() && !wired.count({git->second, 1})) {
                    new_connections.push_back({{const_sid, 1}, {git->second, 1}});
                    wired.insert({git->second, 1});
                }
                continue;
            }
            double value = original_port_value(b->sid, port);
            int const_sid = add_constant(b->sid, port, value);
            slice.constant_fixes.push_back({b->sid, port, value, const_sid});
        }
    }

    for (auto& b : new_blocks) slice.model.blocks.push_back(std::move(b));
    for (auto& c : new_connections) slice.model.connections.push_back(c);
    return slice;
}

Slice build_slice(const Model& m, const BlockList& bl, const TestCase& seed_input,
                  const std::string& derived_from) {
    BlockList closed = augment_edge_cases(m, bl);
    Slice slice = resolve_dangling(m, closed, seed_input);
    slice.derived_from = derived_from;

    std::set<int> raw(bl.sids.begin(), bl.sids.end());
    std::set<int> constants;
    for (const auto& fix : slice.constant_fixes) constants.insert(fix.constant_sid);
    slice.kept_sids.clear();
    slice.edge_case_sids.clear();
    for (const auto& b : slice.model.blocks) {
        if (constants.count(b.sid)) continue;
        if (raw.count(b.sid))
            slice.kept_sids.insert(b.sid);
        else
            slice.edge_case_sids.insert(b.sid);
    }

    auto violations = validate(slice.model);
    if (has_errors(violations))
        throw IntegrityError("built slice fails validation: " + describe(violations.front()));
    if (!slice.model.blocks.empty()) simulate(slice.model, seed_input);
    return slice;
}

std::string provenance_path_for(const std::string& model_path) {
    const std::string suffix = ".json";
    if (model_path.size() > suffix.size() &&
        model_path.compare(model_path.size() - suffix.size(), suffix.size(), suffix) == 0)
        return model_path.substr(0, model_path.size() - suffix.size()) + ".provenance.json";
    return model_path + ".provenance.json";
}

void save_slice(const Slice& s, const std::string& model_path) {
    save_model(s.model, model_path);
    json j;
    j["kept"] = json::array();
    for (int sid : s.kept_sids) j["kept"].push_back(sid);
    j["edge_cases"] = json::array();
    for (int sid : s.edge_case_sids) j["edge_cases"].push_back(sid);
    j["constants"] = json::array();
    for (const auto& fix : s.constant_fixes)
        j["constants"].push_back(
            {{"target", std::to_string(fix.target_sid) + ":" + std::to_string(fix.in_port)},
             {"value", fix.value},
             {"sid", fix.constant_sid}});
    j["requirement"] = s.derived_from;
    std::ofstream out(provenance_path_for(model_path), std::ios::binary);
    if (!out) throw Error("cannot write provenance file for " + model_path);
    out << j.dump(2) << "\n";
}

Slice load_slice(const std::string& model_path) {
    Slice s;
    s.model = load_model(model_path);
    std::ifstream in(provenance_path_for(model_path), std::ios::binary);
    if (!in) {
        // No sidecar: treat every block as kept.
        for (const auto& b : s.model.blocks) s.kept_sids.insert(b.sid);
        return s;
    }
    json j;
    try {
        j = json::parse(in);
        for (const auto& sid : j.at("kept")) s.kept_sids.insert(sid.get<int>());
        for (const auto& sid : j.at("edge_cases")) s.edge_case_sids.insert(sid.get<int>());
        for (const auto& jf : j.at("constants")) {
            ConstantFix fix;
            std::string target = jf.at("target").get<std::string>();
            auto colon = target.find(':');
            fix.target_sid = std::stoi(target.substr(0, colon));
            fix.in_port = std::stoi(target.substr(colon + 1));
            fix.value = jf.at("value").get<double>();
            fix.constant_sid = jf.at("sid").get<int>();
            s.constant_fixes.push_back(fix);
        }
        s.derived_from = j.value("requirement", "");
    } catch (const json::exception& e) {
        throw SchemaError(std::string("provenance file does not match schema: ") + e.what());
    }
    return s;
}

}  // namespace reqslice
