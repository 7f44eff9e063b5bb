#pragma once
// Machine-readable report envelope shared by every CLI subcommand.

#include <filesystem>
#include <string>

#include <json.hpp>

namespace osc {

inline constexpr const char* kToolVersion = "0.1.0";

/// One command's structured output: the command name, its effective
/// parameters, and a versioned results payload. Parameters and results are
/// plain JSON so the envelope round-trips losslessly.
struct ReportEnvelope {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json results = nlohmann::json::object();
    std::string tool_version = kToolVersion;
    std::string timestamp; // ISO-8601 UTC
};

std::string iso8601_now_utc();

nlohmann::json to_json(const ReportEnvelope& envelope);
ReportEnvelope envelope_from_json(const nlohmann::json& j);

void write_report(const std::filesystem::path& path, const ReportEnvelope& envelope);
ReportEnvelope read_report(const std::filesystem::path& path);

} // namespace osc
