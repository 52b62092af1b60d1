#pragma once

// Serialization: trace export/import as CSV (long format `t,x,channel,value`;
// real-valued streams leave x empty) and JSON, grid functions as two-column
// CSV and JSON, and a compiled-system dump with dynamics in prefix notation.

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lgpac/compile.hpp"
#include "lgpac/simulate.hpp"

namespace lgpac {

inline void write_trace_csv(std::ostream& os, const SimulationResult& res) {
    os << "t,x,channel,value\n";
    for (std::size_t ti = 0; ti < res.times.size(); ++ti) {
        for (const auto& tr : res.traces) {
            for (int p = 0; p < tr.width; ++p) {
                os << format_double(res.times[ti]) << ',';
                if (tr.width > 1 || is_x_kind(tr.kind))
                    os << format_double(res.grid->point(static_cast<std::size_t>(p)));
                os << ',' << tr.channel << ',' << format_double(tr.at(ti, p)) << '\n';
            }
        }
    }
}

inline std::string trace_csv(const SimulationResult& res) {
    std::ostringstream ss;
    write_trace_csv(ss, res);
    return ss.str();
}

struct TraceRecord {
    double t = 0;
    std::optional<double> x;
    std::string channel;
    double value = 0;
};

/// Flat reading of the long CSV format, for offline comparisons.
inline std::vector<TraceRecord> read_trace_csv(std::istream& is) {
    std::vector<TraceRecord> out;
    std::string line;
    bool first = true;
    auto parse_num = [](std::string_view s, double& v) {
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        return res.ec == std::errc() && res.ptr == s.data() + s.size();
    };
    while (std::getline(is, line)) {
        if (first) {
            first = false;
            if (line.rfind("t,", 0) == 0) continue;
        }
        if (line.empty()) continue;
        std::array<std::string, 4> cols;
        std::size_t start = 0;
        for (int c = 0; c < 4; ++c) {
            auto comma = c < 3 ? line.find(',', start) : line.size();
            if (comma == std::string::npos) throw std::invalid_argument("trace csv: short row");
            cols[static_cast<std::size_t>(c)] = line.substr(start, comma - start);
            start = comma + 1;
        }
        TraceRecord r;
        if (!parse_num(cols[0], r.t)) throw std::invalid_argument("trace csv: bad time");
        if (!cols[1].empty()) {
            double x;
            if (!parse_num(cols[1], x)) throw std::invalid_argument("trace csv: bad x");
            r.x = x;
        }
        r.channel = cols[2];
        if (!parse_num(cols[3], r.value)) throw std::invalid_argument("trace csv: bad value");
        out.push_back(std::move(r));
    }
    return out;
}

inline nlohmann::json grid_to_json(const SpatialGrid& g) {
    nlohmann::json j;
    j["lower"] = g.lower();
    if (g.upper()) j["upper"] = *g.upper();
    else j["upper"] = nullptr;
    j["points"] = std::vector<double>(g.points().begin(), g.points().end());
    return j;
}

inline GridPtr grid_from_json(const nlohmann::json& j) {
    std::optional<double> upper;
    if (!j.at("upper").is_null()) upper = j.at("upper").get<double>();
    return make_point_grid(j.at("points").get<std::vector<double>>(),
                           j.at("lower").get<double>(), upper);
}

inline nlohmann::json grid_function_to_json(const GridFunction& f) {
    nlohmann::json j;
    j["grid"] = grid_to_json(*f.grid());
    j["values"] = std::vector<double>(f.values().begin(), f.values().end());
    return j;
}

inline GridFunction grid_function_from_json(const nlohmann::json& j) {
    return GridFunction(grid_from_json(j.at("grid")), j.at("values").get<std::vector<double>>());
}

/// Two-column x,value form.
inline void write_grid_function_csv(std::ostream& os, const GridFunction& f) {
    os << "x,value\n";
    for (std::size_t i = 0; i < f.size(); ++i)
        os << format_double(f.grid()->point(i)) << ',' << format_double(f.value(i)) << '\n';
}

inline GridFunction read_grid_function_csv(std::istream& is) {
    std::vector<double> xs, vs;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (first && line.rfind("x,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("grid csv: short row");
        double x = 0, v = 0;
        auto r1 = std::from_chars(line.data(), line.data() + comma, x);
        auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), v);
        if (r1.ec != std::errc() || r2.ec != std::errc())
            throw std::invalid_argument("grid csv: bad number");
        xs.push_back(x);
        vs.push_back(v);
    }
    if (xs.empty()) throw std::invalid_argument("grid csv: empty");
    return GridFunction(make_point_grid(xs, xs.front(), xs.back()), std::move(vs));
}

inline nlohmann::json trace_to_json(const SimulationResult& res) {
    nlohmann::json j;
    j["times"] = res.times;
    j["grid"] = grid_to_json(*res.grid);
    auto& channels = j["channels"] = nlohmann::json::array();
    for (const auto& tr : res.traces) {
        nlohmann::json c;
        c["name"] = tr.channel;
        c["kind"] = to_string(tr.kind);
        c["width"] = tr.width;
        c["data"] = tr.data;
        channels.push_back(std::move(c));
    }
    return j;
}

inline SimulationResult trace_from_json(const nlohmann::json& j) {
    SimulationResult res;
    res.grid = grid_from_json(j.at("grid"));
    res.times = j.at("times").get<std::vector<double>>();
    for (const auto& c : j.at("channels")) {
        Trace tr;
        tr.channel = c.at("name").get<std::string>();
        auto kind = channel_kind_from_string(c.at("kind").get<std::string>());
        if (!kind) throw std::invalid_argument("trace json: bad channel kind");
        tr.kind = *kind;
        tr.width = c.at("width").get<int>();
        tr.data = c.at("data").get<std::vector<double>>();
        res.traces.push_back(std::move(tr));
    }
    return res;
}

namespace detail {

inline void node_prefix(const CompiledSystem& sys, int id, std::string& out) {
    const CNode& n = sys.nodes()[static_cast<std::size_t>(id)];
    switch (n.op) {
        case COp::Number: out += format_double(n.k); break;
        case COp::GridValues: out += "(grid-const " + std::to_string(n.ref) + ")"; break;
        case COp::Time: out += "t"; break;
        case COp::State:
            out += "(state " + sys.states()[static_cast<std::size_t>(n.ref)].channel + ")";
            break;
        case COp::ExtScalar:
            out += "(input " + sys.externals()[static_cast<std::size_t>(n.ref)].label + ")";
            break;
        case COp::ExtValue:
            out += "(input " + sys.externals()[static_cast<std::size_t>(n.ref)].label + ")";
            break;
        case COp::ExtDeriv:
            out += "(input-deriv " + sys.externals()[static_cast<std::size_t>(n.ref)].label + ")";
            break;
        case COp::Add:
        case COp::Mul:
            out += n.op == COp::Add ? "(add " : "(mul ";
            node_prefix(sys, n.a, out);
            out += ' ';
            node_prefix(sys, n.b, out);
            out += ')';
            break;
    }
}

}  // namespace detail

inline std::string node_to_prefix(const CompiledSystem& sys, int node) {
    std::string s;
    detail::node_prefix(sys, node, s);
    return s;
}

/// Debug dump of a compiled system: states with initial settings and
/// dynamics, plus every channel's value and derivative in prefix notation.
inline nlohmann::json compiled_to_json(const CompiledSystem& sys) {
    nlohmann::json j;
    j["state_size"] = sys.state_size();
    j["grid"] = grid_to_json(*sys.grid());
    auto& states = j["states"] = nlohmann::json::array();
    for (const auto& s : sys.states()) {
        nlohmann::json e;
        e["channel"] = s.channel;
        e["width"] = s.width;
        e["offset"] = s.offset;
        e["dynamics"] = node_to_prefix(sys, s.dyn);
        switch (s.init.tag) {
            case InitSpec::Tag::Number: e["initial"] = s.init.number; break;
            case InitSpec::Tag::GridValues: e["initial"] = "(grid-const " + std::to_string(s.init.ref) + ")"; break;
            case InitSpec::Tag::External:
                e["initial"] =
                    "(input " + sys.externals()[static_cast<std::size_t>(s.init.ref)].label + ")";
                break;
        }
        states.push_back(std::move(e));
    }
    auto& channels = j["channels"] = nlohmann::json::array();
    for (const auto& c : sys.channels()) {
        nlohmann::json e;
        e["name"] = c.name;
        e["kind"] = to_string(c.kind);
        e["value"] = node_to_prefix(sys, c.value_node);
        if (is_stream(c.kind)) e["derivative"] = node_to_prefix(sys, c.deriv_node);
        channels.push_back(std::move(e));
    }
    auto& taps = j["limit_taps"] = nlohmann::json::array();
    for (const auto& t : sys.taps()) {
        nlohmann::json e;
        e["output"] = t.output;
        e["channel"] = t.channel;
        e["modulus"] = t.modulus;
        taps.push_back(std::move(e));
    }
    return j;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << content;
    if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace lgpac
