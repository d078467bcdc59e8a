#include "quakedss/event_log.hpp"

#include "quakedss/error.hpp"

#include <cstdio>
#include <fstream>
#include <unistd.h>

namespace quakedss::service {

std::string_view to_string(CommandKind kind) {
    switch (kind) {
    case CommandKind::WarningIngested: return "warning-ingested";
    case CommandKind::Assessed: return "assessed";
    case CommandKind::Sos1: return "sos1";
    case CommandKind::Pledge: return "pledge";
    case CommandKind::Sos2: return "sos2";
    case CommandKind::Resolved: return "resolved";
    case CommandKind::EtlBatch: return "etl-batch";
    }
    return "?";
}

CommandKind parse_command_kind(std::string_view text) {
    for (auto k : {CommandKind::WarningIngested, CommandKind::Assessed, CommandKind::Sos1, CommandKind::Pledge,
                   CommandKind::Sos2, CommandKind::Resolved, CommandKind::EtlBatch}) {
        if (to_string(k) == text) return k;
    }
    throw Error(ErrorCode::MalformedValue, "kind", std::string(text));
}

std::string encode(const CommandEvent& event) {
    json j{{"seq", event.sequence},
           {"kind", std::string(to_string(event.kind))},
           {"recorded_at", timestamp_json(event.recorded_at)},
           {"payload", event.payload}};
    return j.dump();
}

std::vector<CommandEvent> parse_log(std::istream& in) {
    std::vector<CommandEvent> events;
    std::string line;
    while (std::getline(in, line)) {
        std::uint64_t expected = events.size() + 1;
        if (line.empty()) continue;
        CommandEvent ev;
        try {
            auto j = json::parse(line);
            ev.sequence = j.at("seq").get<std::uint64_t>();
            ev.kind = parse_command_kind(j.at("kind").get<std::string>());
            ev.recorded_at = timestamp_from(j.at("recorded_at"));
            ev.payload = j.at("payload");
        } catch (const std::exception& e) {
            throw Error(ErrorCode::CorruptLog, std::to_string(expected), std::string("unparseable entry: ") + e.what());
        }
        if (ev.sequence != expected) {
            throw Error(ErrorCode::CorruptLog, std::to_string(expected),
                        "found sequence " + std::to_string(ev.sequence));
        }
        events.push_back(std::move(ev));
    }
    return events;
}

void MemoryEventStore::append(const CommandEvent& event) {
    std::lock_guard lock(mutex_);
    events_.push_back(event);
}

std::vector<CommandEvent> MemoryEventStore::read_all() const {
    std::lock_guard lock(mutex_);
    return events_;
}

FileEventStore::FileEventStore(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
}

void FileEventStore::append(const CommandEvent& event) {
    std::lock_guard lock(mutex_);
    auto line = encode(event) + "\n";
    std::FILE* f = std::fopen(path_.c_str(), "ab");
    if (f == nullptr) throw Error(ErrorCode::UnreadableSource, path_.string(), "cannot open log for append");
    bool ok = std::fwrite(line.data(), 1, line.size(), f) == line.size();
    ok = std::fflush(f) == 0 && ok;
    ok = ::fsync(::fileno(f)) == 0 && ok;
    ok = std::fclose(f) == 0 && ok;
    if (!ok) throw Error(ErrorCode::UnreadableSource, path_.string(), "log append failed");
}

std::vector<CommandEvent> FileEventStore::read_all() const {
    std::lock_guard lock(mutex_);
    std::ifstream in(path_);
    if (!in) return {};
    return parse_log(in);
}

} // namespace quakedss::service
