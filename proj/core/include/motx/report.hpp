#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "motx/transfer.hpp"

namespace motx {

// Embedded verbatim in every report so a run can be reproduced from the
// report alone.  The timestamp defaults to empty: reruns of one manifest
// then produce byte-identical files.
struct RunManifest {
    std::string command;
    std::vector<std::string> inputs;
    std::string version = "0.1.0";
    std::uint64_t seed = 0;
    std::string timestamp;
};

std::string report_json(const RunManifest& m, const SweepConfig& cfg,
                        const TransferReport& rep);

// flat rows: statement,p,field,depth,grid_size,hypothesis_ok,min_N,violations,flags
std::string report_csv(const TransferReport& rep);

// Writes <dir>/<stem>.json and/or .csv; returns the paths written.
std::vector<std::string> write_report(const RunManifest& m, const SweepConfig& cfg,
                                      const TransferReport& rep, const std::string& dir,
                                      const std::string& stem, const std::string& format);

} // namespace motx
