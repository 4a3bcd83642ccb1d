#include "reqslice/textualize.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "reqslice/errors.hpp"

namespace reqslice {

const char* to_string(Verbosity v) {
    switch (v) {
        case Verbosity::High: return "high";
        case Verbosity::Medium: return "medium";
        case Verbosity::Low: return "low";
    }
    return "?";
}

std::optional<Verbosity> verbosity_from_string(std::string_view s) {
    if (s == "high" || s == "H") return Verbosity::High;
    if (s == "medium" || s == "M") return Verbosity::Medium;
    if (s == "low" || s == "L") return Verbosity::Low;
    return std::nullopt;
}

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string textualize(const Model& m, Verbosity v) {
    auto violations = validate(m);
    if (has_errors(violations)) {
        for (const auto& viol : violations)
            if (viol.severity == Violation::Severity::Error)
                throw InvalidModel("model fails validation: " + describe(viol));
    }

    std::ostringstream out;
    out << "model " << m.name << " sample_time=" << format_number(m.sample_time) << "\n";

    std::vector<const Block*> ordered;
    ordered.reserve(m.blocks.size());
    for (const auto& b : m.blocks) ordered.push_back(&b);
    std::sort(ordered.begin(), ordered.end(),
              [](const Block* a, const Block* b) { return a->sid < b->sid; });

    for (const Block* b : ordered) {
        out << "block sid=" << b->sid << " name=\"" << b->name << "\" type=" << to_string(b->type);
        if (v != Verbosity::Low) {
            for (const auto& [key, val] : b->params) {
                out << " " << key << "=";
                if (std::holds_alternative<double>(val))
                    out << format_number(std::get<double>(val));
                else
                    out << std::get<std::string>(val);
            }
            if (v == Verbosity::High)
                out << " position=(" << b->position[0] << "," << b->position[1] << ","
                    << b->position[2] << "," << b->position[3] << ")";
        }
        out << "\n";
    }

    if (v != Verbosity::Low) {
        for (const auto& c : m.connections)
            out << "conn " << c.src.sid << ":" << c.src.port << " -> " << c.dst.sid << ":"
                << c.dst.port << "\n";
    }
    return out.str();
}

int token_count(std::string_view text) {
    return static_cast<int>((text.size() + 3) / 4);
}

}  // namespace reqslice
