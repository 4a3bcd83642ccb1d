#include "reqslice/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "reqslice/errors.hpp"
#include "reqslice/textualize.hpp"

namespace reqslice {

const std::vector<double>& Trace::at(const std::string& name) const {
    auto it = signals.find(name);
    if (it == signals.end()) throw MissingSignal(name);
    return it->second;
}

namespace {

struct Wiring {
    // (sid, port) -> driving endpoint
    std::map<std::pair<int, int>, Endpoint> into;
    // tag -> Goto sid
    std::map<std::string, int> goto_by_tag;

    static Wiring build(const Model& m) {
        Wiring w;
        for (const auto& c : m.connections) w.into[{c.dst.sid, c.dst.port}] = c.src;
        for (const auto& b : m.blocks)
            if (b.type == BlockType::Goto) w.goto_by_tag[b.str_param_or("tag", "")] = b.sid;
        return w;
    }

    const Endpoint* driver(int sid, int port) const {
        auto it = into.find({sid, port});
        return it == into.end() ? nullptr : &it->second;
    }
};

// Strongly connected components of the same-step graph; used only to name the
// blocks involved when scheduling fails.
std::vector<int> cycle_members(const std::map<int, std::vector<int>>& adj) {
    std::map<int, int> index, low;
    std::map<int, bool> on_stack;
    std::vector<int> stack;
    std::vector<int> result;
    int counter = 0;

    struct Frame {
        int v;
        size_t child = 0;
    };
    for (const auto& [start, _] : adj) {
        if (index.count(start)) continue;
        std::vector<Frame> frames{{start}};
        index[start] = low[start] = counter++;
        stack.push_back(start);
        on_stack[start] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            const auto& next = adj.at(f.v);
            if (f.child < next.size()) {
                int w = next[f.child++];
                if (!index.count(w)) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    std::vector<int> scc;
                    for (;;) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        scc.push_back(w);
                        if (w == f.v) break;
                    }
                    bool self_loop = std::find(adj.at(f.v).begin(), adj.at(f.v).end(), f.v) !=
                                     adj.at(f.v).end();
                    if (scc.size() > 1 || self_loop)
                        result.insert(result.end(), scc.begin(), scc.end());
                }
                int v = f.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

}  // namespace

std::vector<int> schedule(const Model& m) {
    Wiring w = Wiring::build(m);

    std::map<int, std::vector<int>> adj;
    std::map<int, int> in_degree;
    for (const auto& b : m.blocks) {
        adj[b.sid];
        in_degree[b.sid];
    }
    auto add_edge = [&](int from, int to) {
        adj[from].push_back(to);
        ++in_degree[to];
    };

    for (const auto& c : m.connections) {
        const Block* dst = m.find(c.dst.sid);
        if (dst && dst->type == BlockType::UnitDelay) continue;  // consumed at state update
        add_edge(c.src.sid, c.dst.sid);
    }
    for (const auto& b : m.blocks) {
        if (b.type != BlockType::From) continue;
        if (w.driver(b.sid, 1)) continue;  // explicit feed overrides the tag wire
        auto it = w.goto_by_tag.find(b.str_param_or("tag", ""));
        if (it != w.goto_by_tag.end()) add_edge(it->second, b.sid);
    }

    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (const auto& [sid, deg] : in_degree)
        if (deg == 0) ready.push(sid);

    std::vector<int> order;
    order.reserve(m.blocks.size());
    while (!ready.empty()) {
        int sid = ready.top();
        ready.pop();
        order.push_back(sid);
        for (int next : adj[sid])
            if (--in_degree[next] == 0) ready.push(next);
    }
    if (order.size() != m.blocks.size()) {
        std::vector<int> cyc = cycle_members(adj);
        std::ostringstream msg;
        msg << "algebraic loop through blocks [";
        for (size_t i = 0; i < cyc.size(); ++i) msg << (i ? ", " : "") << cyc[i];
        msg << "]";
        throw AlgebraicLoop(msg.str(), cyc);
    }
    return order;
}

Trace simulate(const Model& m, const TestCase& t) {
    if (t.steps <= 0) throw SimulationError("test case must have a positive step count");
    for (const auto& [name, sig] : t.inputs)
        if (!sig.constant && static_cast<int>(sig.series.size()) != t.steps)
            throw SimulationError("input series \"" + name + "\" has length " +
                                  std::to_string(sig.series.size()) + ", expected " +
                                  std::to_string(t.steps));

    std::vector<int> order = schedule(m);
    Wiring w = Wiring::build(m);

    Trace trace;
    trace.steps = t.steps;
    size_t n = static_cast<size_t>(t.steps);
    for (const auto& [name, _] : t.inputs) trace.signals[name].resize(n);
    for (const auto& b : m.blocks) {
        if (output_port_count(b) > 0)
            trace.signals[std::to_string(b.sid) + ":1"].resize(n);
        if (b.type == BlockType::Outport) trace.signals[b.name].resize(n);
    }

    std::map<int, double> out_val;    // block output this step
    std::map<int, double> goto_val;   // Goto input this step (the tag wire)
    std::map<int, bool> goto_fed;
    std::map<int, double> delay_state;
    for (const auto& b : m.blocks)
        if (b.type == BlockType::UnitDelay) delay_state[b.sid] = b.num_param_or("initial", 0.0);

    auto input_value = [&](const Block& b, int port) -> double {
        const Endpoint* src = w.driver(b.sid, port);
        if (src) return out_val.at(src->sid);
        if (b.type == BlockType::From) {
            auto it = w.goto_by_tag.find(b.str_param_or("tag", ""));
            if (it != w.goto_by_tag.end() && goto_fed[it->second]) return goto_val[it->second];
            throw UnconnectedInput("From block " + std::to_string(b.sid) +
                                       " has no feed: its Goto input is unconnected",
                                   b.sid, port);
        }
        throw UnconnectedInput("block " + std::to_string(b.sid) + " input port " +
                                   std::to_string(port) + " is unconnected",
                               b.sid, port);
    };

    for (int k = 0; k < t.steps; ++k) {
        out_val.clear();
        goto_val.clear();
        goto_fed.clear();

        for (const auto& [name, sig] : t.inputs)
            trace.signals[name][static_cast<size_t>(k)] = sig.at(k);

        for (int sid : order) {
            const Block& b = m.at(sid);
            double v = 0.0;
            bool has_output = output_port_count(b) > 0;
            switch (b.type) {
                case BlockType::Inport: {
                    auto it = t.inputs.find(b.name);
                    if (it == t.inputs.end())
                        throw SimulationError("test case has no value for inport \"" + b.name +
                                              "\"");
                    v = it->second.at(k);
                    break;
                }
                case BlockType::Outport: {
                    double in = input_value(b, 1);
                    trace.signals[b.name][static_cast<size_t>(k)] = in;
                    break;
                }
                case BlockType::Constant:
                    v = b.num_param("value");
                    break;
                case BlockType::Gain:
                    v = b.num_param("gain") * input_value(b, 1);
                    break;
                case BlockType::Sum: {
                    std::string signs = b.str_param_or("signs", "++");
                    v = 0.0;
                    for (size_t i = 0; i < signs.size(); ++i) {
                        double in = input_value(b, static_cast<int>(i) + 1);
                        v += (signs[i] == '-') ? -in : in;
                    }
                    break;
                }
                case BlockType::Product: {
                    int inputs = input_port_count(b);
                    v = 1.0;
                    for (int i = 1; i <= inputs; ++i) v *= input_value(b, i);
                    break;
                }
                case BlockType::Switch: {
                    double u1 = input_value(b, 1);
                    double u2 = input_value(b, 2);
                    double u3 = input_value(b, 3);
                    v = (u2 >= b.num_param("threshold")) ? u1 : u3;
                    break;
                }
                case BlockType::Saturation: {
                    double in = input_value(b, 1);
                    v = std::clamp(in, b.num_param("lower_limit"), b.num_param("upper_limit"));
                    break;
                }
                case BlockType::RelationalOperator: {
                    double a = input_value(b, 1);
                    double c = input_value(b, 2);
                    std::string op = b.str_param("op");
                    bool r = false;
                    if (op == "<") r = a < c;
                    else if (op == "<=") r = a <= c;
                    else if (op == ">") r = a > c;
                    else if (op == ">=") r = a >= c;
                    else if (op == "==") r = a == c;
                    else if (op == "~=") r = a != c;
                    else throw SimulationError("relational operator " + std::to_string(b.sid) +
                                               " has unknown op \"" + op + "\"");
                    v = r ? 1.0 : 0.0;
                    break;
                }
                case BlockType::LogicalOperator: {
                    std::string op = b.str_param("op");
                    if (op == "NOT") {
                        v = (input_value(b, 1) != 0.0) ? 0.0 : 1.0;
                    } else {
                        int inputs = input_port_count(b);
                        bool acc = (op == "AND");
                        for (int i = 1; i <= inputs; ++i) {
                            bool in = input_value(b, i) != 0.0;
                            acc = (op == "AND") ? (acc && in) : (acc || in);
                        }
                        v = acc ? 1.0 : 0.0;
                    }
                    break;
                }
                case BlockType::UnitDelay:
                    v = delay_state.at(b.sid);
                    break;
                case BlockType::MinMax: {
                    int inputs = input_port_count(b);
                    bool use_min = b.str_param_or("op", "max") == "min";
                    v = input_value(b, 1);
                    for (int i = 2; i <= inputs; ++i) {
                        double in = input_value(b, i);
                        v = use_min ? std::min(v, in) : std::max(v, in);
                    }
                    break;
                }
                case BlockType::Abs:
                    v = std::fabs(input_value(b, 1));
                    break;
                case BlockType::Goto: {
                    const Endpoint* src = w.driver(b.sid, 1);
                    if (src) {
                        goto_val[b.sid] = out_val.at(src->sid);
                        goto_fed[b.sid] = true;
                    }
                    break;
                }
                case BlockType::From:
                    v = input_value(b, 1);
                    break;
            }
            if (has_output) {
                if (!std::isfinite(v))
                    throw NumericError("block " + std::to_string(sid) +
                                           " produced a non-finite value at step " +
                                           std::to_string(k),
                                       sid, k);
                out_val[sid] = v;
                trace.signals[std::to_string(sid) + ":1"][static_cast<size_t>(k)] = v;
            }
        }

        // State update: delays latch this step's input for the next step.
        for (auto& [sid, state] : delay_state) {
            const Block& b = m.at(sid);
            state = input_value(b, 1);
        }
    }
    return trace;
}

std::string trace_to_csv(const Trace& trace) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [name, _] : trace.signals) {
        if (!first) out << ",";
        out << name;
        first = false;
    }
    out << "\n";
    for (int k = 0; k < trace.steps; ++k) {
        first = true;
        for (const auto& [_, values] : trace.signals) {
            if (!first) out << ",";
            out << format_number(values[static_cast<size_t>(k)]);
            first = false;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace reqslice
