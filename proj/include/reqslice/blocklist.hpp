#pragma once

#include <string>
#include <vector>

#include "reqslice/model.hpp"
#include "reqslice/requirement.hpp"

namespace reqslice {

struct BlockListSource {
    enum class Kind { Llm, Replay, Oracle, Union };
    Kind kind = Kind::Llm;
    int iteration = 0;  // meaningful for Llm/Replay

    bool operator==(const BlockListSource&) const = default;
};

// An ordered, duplicate-free list of SIDs proposed by a slicing backend.
// May be empty; the resulting slice is then empty and evaluates vacuous.
struct BlockList {
    std::vector<int> sids;
    BlockListSource source;
    std::vector<long long> ignored;  // integers in the reply that are not SIDs

    bool contains(int sid) const;
    bool empty() const { return sids.empty(); }
};

// Leniently extract SIDs from a backend reply: every standalone decimal
// integer counts (bracketed lists, comma/newline separation, "SID = n"
// prose); fragments of floats and of words do not. Integers that are not
// SIDs of `m` are dropped into `ignored`. First occurrence wins.
// Throws EmptyResponse when the reply contains no integers at all; a
// literal "[]" yields an empty list instead.
BlockList parse_block_list(const std::string& response, const Model& m);

// Set union preserving first-seen order; source becomes Union.
BlockList aggregate_union(const std::vector<BlockList>& lists);

// Deterministic dataflow baseline: blocks on paths from the Inports named in
// the requirement to the Outports named in its consequent (backward
// reachability from the consequent Outports intersected with forward
// reachability from the named Inports, Goto->From tags treated as wires).
// The consequent Outports are always included. When the requirement names no
// Inport the forward intersection is skipped.
BlockList oracle_slice(const Model& m, const RequirementSpec& spec);

std::string render_block_list(const BlockList& bl);  // "[89, 90, 96]"

}  // namespace reqslice
