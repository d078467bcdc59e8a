#include "quakedss/olap_query.hpp"

#include "quakedss/error.hpp"
#include "quakedss/json_io.hpp"

#include <algorithm>
#include <sstream>

namespace quakedss::warehouse {

namespace {

// "dim" or "dim:level"
Axis parse_axis(const std::string& text) {
    auto colon = text.find(':');
    Dimension dim = parse_dimension(trim(text.substr(0, colon)));
    Level level = colon == std::string::npos ? levels_of(dim).front() : parse_level(dim, trim(text.substr(colon + 1)));
    return {dim, level};
}

std::set<std::string> parse_members(const std::string& text) {
    std::set<std::string> out;
    for (const auto& m : split(text, '|')) {
        if (auto t = trim(m); !t.empty()) out.insert(t);
    }
    return out;
}

std::pair<std::string, std::string> split_assignment(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::MalformedValue, text, "expected DIMENSION=MEMBER");
    return {trim(text.substr(0, eq)), text.substr(eq + 1)};
}

} // namespace

std::vector<Axis> parse_group_by(const std::string& text) {
    std::vector<Axis> axes;
    for (const auto& part : split(text, ',')) {
        if (auto t = trim(part); !t.empty()) axes.push_back(parse_axis(t));
    }
    return axes;
}

Restriction parse_filter(const std::string& text) {
    auto [lhs, rhs] = split_assignment(text);
    return {parse_axis(lhs).level, parse_members(rhs)};
}

CubeOp parse_op(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::MalformedValue, text, "expected OP:ARGS");
    auto name = trim(text.substr(0, colon));
    auto args = text.substr(colon + 1);
    if (name == "roll_up") return RollUpOp{parse_dimension(trim(args))};
    if (name == "drill_down") return DrillDownOp{parse_dimension(trim(args))};
    if (name == "slice") {
        auto [dim, member] = split_assignment(args);
        return SliceOp{parse_dimension(dim), trim(member)};
    }
    if (name == "dice") {
        DiceOp op;
        for (const auto& pred : split(args, ';')) {
            if (trim(pred).empty()) continue;
            auto [dim, members] = split_assignment(pred);
            op.predicates.emplace_back(parse_dimension(dim), parse_members(members));
        }
        return op;
    }
    throw Error(ErrorCode::MalformedValue, name, "unknown cube operation");
}

Hypercube apply_op(const Hypercube& cube, const CubeOp& op, const FactStore& store) {
    return std::visit(
        [&](const auto& o) -> Hypercube {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, RollUpOp>) return roll_up(cube, o.dimension);
            else if constexpr (std::is_same_v<T, DrillDownOp>) return drill_down(cube, o.dimension, store);
            else if constexpr (std::is_same_v<T, SliceOp>) return slice(cube, o.dimension, o.member);
            else return dice(cube, o.predicates);
        },
        op);
}

Hypercube run_query(const FactStore& store, const OlapQuery& query) {
    auto cube = build_cube(store, query.axes, query.filters);
    for (const auto& op : query.ops) cube = apply_op(cube, op, store);
    return cube;
}

OlapTable to_table(const Hypercube& cube) {
    OlapTable t;
    for (const auto& a : cube.axes()) {
        t.columns.push_back(std::string(to_string(a.dimension)) + ":" + std::string(to_string(a.level)));
    }
    for (const char* m : {"deaths", "injured", "buildings_destroyed", "event_count"}) t.columns.emplace_back(m);
    for (const auto& [coord, m] : cube.cells()) t.rows.emplace_back(coord, m);
    return t;
}

namespace {

std::vector<std::string> row_fields(const Coordinate& coord, const Measures& m) {
    std::vector<std::string> f = coord;
    f.push_back(std::to_string(m.deaths));
    f.push_back(std::to_string(m.injured));
    f.push_back(std::to_string(m.buildings_destroyed));
    f.push_back(std::to_string(m.event_count));
    return f;
}

// Display width in code points, so band labels with an en-dash pad correctly.
std::size_t display_width(const std::string& s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

} // namespace

std::string render_text(const OlapTable& table) {
    std::vector<std::vector<std::string>> lines{table.columns};
    for (const auto& [coord, m] : table.rows) lines.push_back(row_fields(coord, m));
    std::vector<std::size_t> widths(table.columns.size(), 0);
    for (const auto& l : lines) {
        for (std::size_t i = 0; i < l.size() && i < widths.size(); ++i) widths[i] = std::max(widths[i], display_width(l[i]));
    }
    std::ostringstream out;
    for (const auto& l : lines) {
        std::string line;
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (i) line += "  ";
            line += l[i];
            if (i + 1 < l.size()) line.append(widths[i] - display_width(l[i]), ' ');
        }
        out << line << '\n';
    }
    return out.str();
}

std::string render_json_lines(const OlapTable& table) {
    std::ostringstream out;
    for (const auto& [coord, m] : table.rows) {
        json j = json::object();
        for (std::size_t i = 0; i < coord.size(); ++i) j[table.columns[i]] = coord[i];
        j["deaths"] = m.deaths;
        j["injured"] = m.injured;
        j["buildings_destroyed"] = m.buildings_destroyed;
        j["event_count"] = m.event_count;
        out << j.dump() << '\n';
    }
    return out.str();
}

} // namespace quakedss::warehouse
