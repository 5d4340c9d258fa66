#pragma once

#include "hyperlap/energy.hpp"
#include "hyperlap/hypergraph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hyperlap {

struct CheckRow
{
    std::string module;
    std::string name;
    bool pass = false;
    double value = 0.0; // worst observed quantity
    double limit = 0.0; // threshold it is compared against
    std::string note;   // set when a check is skipped
};

struct VerifyOptions
{
    std::uint64_t seed = 0;
    int samples = 100;
};

// Runs the invariant suite of every module on one hypergraph. Fully
// determined by (g, prm, opts).
std::vector<CheckRow> run_invariant_suite(const Hypergraph& g, const EnergyParams& prm, const VerifyOptions& opts);

std::string format_report(const std::vector<CheckRow>& rows);

} // namespace hyperlap
