#pragma once

#include "quakedss/warehouse.hpp"

#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace quakedss::warehouse {

// Text forms shared by the CLI flags and the /olap/query parameters:
//   group-by  "geography:province,time:year"   (level defaults to the coarsest)
//   filter    "magnitude=8.0+"  "geography:regency=ID-JB-TSK|ID-JB-CJR"
//   op        "roll_up:time"  "drill_down:geography"  "slice:time=2004"
//             "dice:magnitude=8.0+;time=2004|2005"
struct RollUpOp {
    Dimension dimension;
    bool operator==(const RollUpOp&) const = default;
};
struct DrillDownOp {
    Dimension dimension;
    bool operator==(const DrillDownOp&) const = default;
};
struct SliceOp {
    Dimension dimension;
    std::string member;
    bool operator==(const SliceOp&) const = default;
};
struct DiceOp {
    std::vector<std::pair<Dimension, std::set<std::string>>> predicates;
    bool operator==(const DiceOp&) const = default;
};
using CubeOp = std::variant<RollUpOp, DrillDownOp, SliceOp, DiceOp>;

struct OlapQuery {
    std::vector<Axis> axes;
    std::vector<Restriction> filters;
    std::vector<CubeOp> ops;
};

std::vector<Axis> parse_group_by(const std::string& text);
Restriction parse_filter(const std::string& text);
CubeOp parse_op(const std::string& text);

Hypercube apply_op(const Hypercube& cube, const CubeOp& op, const FactStore& store);
Hypercube run_query(const FactStore& store, const OlapQuery& query);

struct OlapTable {
    std::vector<std::string> columns;
    std::vector<std::pair<Coordinate, Measures>> rows; // lexicographic by coordinate
};

OlapTable to_table(const Hypercube& cube);
// Padded plain-text table; header line always present.
std::string render_text(const OlapTable& table);
// One JSON object per row.
std::string render_json_lines(const OlapTable& table);

} // namespace quakedss::warehouse
