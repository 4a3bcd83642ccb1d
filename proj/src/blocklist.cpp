#include "reqslice/blocklist.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>
#include <sstream>

#include "reqslice/errors.hpp"

namespace reqslice {

bool BlockList::contains(int sid) const {
    return std::find(sids.begin(), sids.end(), sid) != sids.end();
}

BlockList parse_block_list(const std::string& response, const Model& m) {
    std::set<int> model_sids;
    for (const auto& b : m.blocks) model_sids.insert(b.sid);

    BlockList out;
    std::set<long long> seen;
    bool any_integer = false;

    size_t i = 0;
    const size_t n = response.size();
    auto is_digit = [&](size_t pos) {
        return pos < n && std::isdigit(static_cast<unsigned char>(response[pos]));
    };
    while (i < n) {
        if (!std::isdigit(static_cast<unsigned char>(response[i]))) {
            ++i;
            continue;
        }
        size_t start = i;
        while (is_digit(i)) ++i;
        // Reject runs glued to words ("R2", "I1", "v2x") ...
        bool word_left = start > 0 && (std::isalpha(static_cast<unsigned char>(
                                           response[start - 1])) ||
                                       response[start - 1] == '_');
        bool word_right =
            i < n && (std::isalpha(static_cast<unsigned char>(response[i])) || response[i] == '_');
        // ... and fragments of decimal fractions ("0.7").
        bool frac_left = start >= 2 && response[start - 1] == '.' && is_digit(start - 2);
        bool frac_right = i + 1 < n && response[i] == '.' && is_digit(i + 1);
        if (word_left || word_right || frac_left || frac_right) continue;

        any_integer = true;
        long long value = 0;
        bool overflow = i - start > 12;
        if (!overflow) value = std::stoll(response.substr(start, i - start));
        if (!seen.insert(overflow ? -1 : value).second) continue;
        if (!overflow && value > 0 && value <= std::numeric_limits<int>::max() &&
            model_sids.count(static_cast<int>(value))) {
            out.sids.push_back(static_cast<int>(value));
        } else {
            out.ignored.push_back(overflow ? -1 : value);
        }
    }

    if (!any_integer) {
        if (response.find("[]") != std::string::npos) return out;  // legal empty list
        throw EmptyResponse("backend reply contains no block ids: \"" + response + "\"");
    }
    return out;
}

BlockList aggregate_union(const std::vector<BlockList>& lists) {
    if (lists.empty()) throw Error("aggregate_union needs at least one block list");
    BlockList out;
    out.source = {BlockListSource::Kind::Union, 0};
    std::set<int> seen;
    for (const auto& bl : lists)
        for (int sid : bl.sids)
            if (seen.insert(sid).second) out.sids.push_back(sid);
    return out;
}

namespace {

// Dataflow adjacency including Goto->From tag wires.
struct Flow {
    std::map<int, std::vector<int>> succ;
    std::map<int, std::vector<int>> pred;

    static Flow build(const Model& m) {
        Flow f;
        for (const auto& b : m.blocks) {
            f.succ[b.sid];
            f.pred[b.sid];
        }
        auto add = [&](int from, int to) {
            f.succ[from].push_back(to);
            f.pred[to].push_back(from);
        };
        for (const auto& c : m.connections) add(c.src.sid, c.dst.sid);
        std::map<std::string, int> goto_by_tag;
        for (const auto& b : m.blocks)
            if (b.type == BlockType::Goto) goto_by_tag[b.str_param_or("tag", "")] = b.sid;
        for (const auto& b : m.blocks) {
            if (b.type != BlockType::From) continue;
            auto it = goto_by_tag.find(b.str_param_or("tag", ""));
            if (it != goto_by_tag.end()) add(it->second, b.sid);
        }
        return f;
    }
};

std::set<int> reach(const std::map<int, std::vector<int>>& adj, const std::set<int>& from) {
    std::set<int> seen = from;
    std::vector<int> stack(from.begin(), from.end());
    while (!stack.empty()) {
        int sid = stack.back();
        stack.pop_back();
        auto it = adj.find(sid);
        if (it == adj.end()) continue;
        for (int next : it->second)
            if (seen.insert(next).second) stack.push_back(next);
    }
    return seen;
}

}  // namespace

BlockList oracle_slice(const Model& m, const RequirementSpec& spec) {
    std::map<std::string, int> inport_by_name, outport_by_name;
    for (const auto& b : m.blocks) {
        if (b.type == BlockType::Inport) inport_by_name[b.name] = b.sid;
        if (b.type == BlockType::Outport) outport_by_name[b.name] = b.sid;
    }

    for (const auto& name : spec.all_signals())
        if (!inport_by_name.count(name) && !outport_by_name.count(name))
            throw UnknownSignal(name);

    std::set<int> consequent_outports;
    for (const auto& name : signals_of(*spec.consequent))
        if (auto it = outport_by_name.find(name); it != outport_by_name.end())
            consequent_outports.insert(it->second);

    std::set<int> named_inports;
    for (const auto& name : spec.all_signals())
        if (auto it = inport_by_name.find(name); it != inport_by_name.end())
            named_inports.insert(it->second);

    Flow flow = Flow::build(m);
    std::set<int> backward = reach(flow.pred, consequent_outports);

    std::set<int> result;
    if (named_inports.empty()) {
        result = backward;
    } else {
        std::set<int> forward = reach(flow.succ, named_inports);
        std::set_intersection(backward.begin(), backward.end(), forward.begin(), forward.end(),
                              std::inserter(result, result.begin()));
    }
    result.insert(consequent_outports.begin(), consequent_outports.end());

    BlockList out;
    out.source = {BlockListSource::Kind::Oracle, 0};
    // SID order keeps the oracle's replies canonical.
    out.sids.assign(result.begin(), result.end());
    return out;
}

std::string render_block_list(const BlockList& bl) {
    std::ostringstream out;
    out << "[";
    for (size_t i = 0; i < bl.sids.size(); ++i) {
        if (i) out << ", ";
        out << bl.sids[i];
    }
    out << "]";
    return out.str();
}

}  // namespace reqslice
