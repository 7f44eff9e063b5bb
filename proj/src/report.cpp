#include "oscombine/report.hpp"

#include <ctime>
#include <fstream>

#include "oscombine/errors.hpp"

namespace osc {

std::string iso8601_now_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json to_json(const ReportEnvelope& e) {
    return nlohmann::json{{"command", e.command},
                          {"parameters", e.parameters},
                          {"results", e.results},
                          {"tool_version", e.tool_version},
                          {"timestamp", e.timestamp}};
}

ReportEnvelope envelope_from_json(const nlohmann::json& j) {
    ReportEnvelope e;
    e.command = j.at("command").get<std::string>();
    e.parameters = j.at("parameters");
    e.results = j.at("results");
    e.tool_version = j.at("tool_version").get<std::string>();
    e.timestamp = j.at("timestamp").get<std::string>();
    return e;
}

void write_report(const std::filesystem::path& path, const ReportEnvelope& envelope) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot write report to " + path.string());
    out << to_json(envelope).dump(2) << "\n";
}

ReportEnvelope read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot read report from " + path.string());
    nlohmann::json j;
    in >> j;
    return envelope_from_json(j);
}

} // namespace osc
