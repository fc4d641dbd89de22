#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stiffjnd/session.hpp"

namespace stiffjnd {

inline constexpr int kLogSchemaVersion = 1;

/// Line-delimited session log. The first line is a "session" header with
/// schema version, seed, presentation order and the protocol config echo;
/// every SessionEvent follows as one line in occurrence order. Output is a
/// pure function of the result, so equal results give identical bytes.
std::string session_log_jsonl(const SessionResult& result);

/// One event as a single-line JSON object (no trailing newline).
std::string event_json(const SessionEvent& event);

struct ParsedLog {
    std::uint64_t seed = 0;
    ProtocolConfig config;
    std::vector<ConditionMode> condition_order;
    std::vector<SessionEvent> events;

    /// Trial records of one condition in log order.
    std::vector<TrialRecord> trials(ConditionMode mode) const;
    /// Final status of one condition, if the log contains it.
    const ConditionFinished* finished(ConditionMode mode) const;
};

/// Inverse of session_log_jsonl. Throws ConfigError on malformed input.
ParsedLog parse_session_log(std::string_view text);

} // namespace stiffjnd
