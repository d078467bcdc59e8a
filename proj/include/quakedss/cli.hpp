#pragma once

#include "quakedss/model.hpp"
#include "quakedss/reference.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace quakedss::cli {

enum ExitCode { kOk = 0, kDomainError = 1, kUsageError = 2 };

// Files inside a data directory.
struct DataLayout {
    std::filesystem::path root;

    std::filesystem::path provinces() const { return root / "provinces.csv"; }
    std::filesystem::path regencies() const { return root / "regencies.csv"; }
    std::filesystem::path config() const { return root / "config.json"; }
    std::filesystem::path catalog() const { return root / "historical_quakes.csv"; }
    std::filesystem::path log() const { return root / "events.jsonl"; }
    std::filesystem::path outbox() const { return root / "outbox"; }
};

struct DataSet {
    ReferenceDataset reference;
    std::vector<HistoricalQuake> catalog;
};

// Bad catalog lines are reported on `err` and skipped.
DataSet load_data_dir(const DataLayout& layout, std::ostream& err);

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace quakedss::cli
