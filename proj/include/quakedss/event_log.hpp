#pragma once

#include "quakedss/json_io.hpp"
#include "quakedss/time.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <mutex>
#include <string>
#include <vector>

namespace quakedss::service {

enum class CommandKind { WarningIngested, Assessed, Sos1, Pledge, Sos2, Resolved, EtlBatch };

std::string_view to_string(CommandKind kind);
CommandKind parse_command_kind(std::string_view text);

struct CommandEvent {
    std::uint64_t sequence = 0; // dense, starting at 1
    CommandKind kind = CommandKind::WarningIngested;
    json payload;
    Timestamp recorded_at{};

    bool operator==(const CommandEvent&) const = default;
};

// One line of the log, no trailing newline.
std::string encode(const CommandEvent& event);

// Parses a whole log. Throws Error(CorruptLog, "<sequence>") at the first
// line that fails to parse or breaks the 1, 2, 3, ... sequence.
std::vector<CommandEvent> parse_log(std::istream& in);

/**
 * EventStore - append-only persistence for command events. The service
 * talks only to this interface, so storage can be embedded or remote.
 */
class EventStore {
public:
    virtual ~EventStore() = default;

    // Must be durable when it returns.
    virtual void append(const CommandEvent& event) = 0;
    virtual std::vector<CommandEvent> read_all() const = 0;
};

class MemoryEventStore : public EventStore {
public:
    void append(const CommandEvent& event) override;
    std::vector<CommandEvent> read_all() const override;

private:
    mutable std::mutex mutex_;
    std::vector<CommandEvent> events_;
};

// Line-delimited JSON file, flushed on every append.
class FileEventStore : public EventStore {
public:
    explicit FileEventStore(std::filesystem::path path);

    void append(const CommandEvent& event) override;
    std::vector<CommandEvent> read_all() const override;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
};

} // namespace quakedss::service
