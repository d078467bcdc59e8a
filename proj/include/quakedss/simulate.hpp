#pragma once

#include "quakedss/model.hpp"
#include "quakedss/reference.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace quakedss::simulate {

struct SimulationOptions {
    std::uint64_t seed = 42;
    int regencies = 12;
    std::optional<double> magnitude;
    int catalog_size = 24;
};

struct Scenario {
    ReferenceDataset reference;
    std::vector<HistoricalQuake> catalog;
    Warning warning;
};

// Everything here is a function of the options alone.
Scenario generate_scenario(const SimulationOptions& options);

struct SimulationReport {
    // One line per step, fixed order.
    std::vector<std::string> lines;
    std::string final_phase;
    std::uint64_t state_hash = 0;
    std::uint64_t log_length = 0;
};

// Drives the scenario through an in-memory service: warning, assessment,
// SOS-1, regional pledges, SOS-2, international pledge, resolution.
SimulationReport run_scenario(const Scenario& scenario);

} // namespace quakedss::simulate
