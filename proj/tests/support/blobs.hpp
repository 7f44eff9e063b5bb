#pragma once
// Synthetic two-Gaussian-blob classification data for harness tests.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "oscombine/rng.hpp"

namespace testsupport {

/// Writes a labeled CSV of two Gaussian blobs centered at +/- `separation`/2
/// along every axis, `per_class` patterns each, noise `sigma`. Returns the
/// path written.
inline std::filesystem::path write_blobs_csv(const std::filesystem::path& path, int per_class,
                                             int dims, double separation, double sigma,
                                             std::uint64_t seed) {
    osc::RandomStream rng(seed);
    std::ofstream out(path);
    char buf[64];
    for (int cls = 0; cls < 2; ++cls) {
        const double center = (cls == 0 ? -0.5 : 0.5) * separation;
        for (int p = 0; p < per_class; ++p) {
            for (int d = 0; d < dims; ++d) {
                std::snprintf(buf, sizeof buf, "%.10g", center + sigma * rng.gaussian());
                out << buf << ',';
            }
            out << cls << '\n';
        }
    }
    return path;
}

} // namespace testsupport
