#pragma once

#include <set>
#include <string>
#include <vector>

#include "reqslice/blocklist.hpp"
#include "reqslice/model.hpp"
#include "reqslice/simulate.hpp"

namespace reqslice {

struct ConstantFix {
    int target_sid = 0;
    int in_port = 1;
    double value = 0.0;
    int constant_sid = 0;

    bool operator==(const ConstantFix&) const = default;
};

// An executable sub-model plus provenance: which blocks came from the
// backend's list, which were pulled in as edge cases, and which constants
// were synthesized to repair dangling inputs.
struct Slice {
    Model model;
    std::set<int> kept_sids;
    std::set<int> edge_case_sids;
    std::vector<ConstantFix> constant_fixes;
    std::string derived_from;  // "<model name>/<requirement id>"
};

// Close a block list over the executability rules: pull in every Inport that
// directly feeds a kept block, every Outport directly fed by one, and the
// Goto/From partners of kept tag blocks, to a fixed point. Order: original
// list first, additions in SID order.
BlockList augment_edge_cases(const Model& m, const BlockList& bl);

// Build the induced sub-model and repair every remaining dangling input with
// a Constant block whose value is the signal the original model delivered to
// that port at step 0 of `seed_input`. A From whose tag wire is broken is
// repaired at the From (its constant also feeds the Goto input so no port is
// left unfed). Outports that lost their driver and Inports that feed nothing
// kept are dropped. Requires `bl` to be edge-case closed.
Slice resolve_dangling(const Model& m, const BlockList& bl, const TestCase& seed_input);

// augment_edge_cases + resolve_dangling, plus a final soundness check: the
// result validates cleanly and simulates on the seed input.
Slice build_slice(const Model& m, const BlockList& bl, const TestCase& seed_input,
                  const std::string& derived_from = "");

// Slice files: the sub-model in the regular model format plus a provenance
// sidecar {"kept": [...], "edge_cases": [...], "constants": [{"target":
// "SID:PORT", "value": num, "sid": int}], "requirement": str}.
std::string provenance_path_for(const std::string& model_path);
void save_slice(const Slice& s, const std::string& model_path);
Slice load_slice(const std::string& model_path);

}  // namespace reqslice
