#pragma once

#include "ivr/feshbach.hpp"
#include "ivr/linalg.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ivr {

/// Metadata written at the top of every artifact.
struct Provenance
{
    std::string command;
    std::string config_hash;
    std::map<std::string, std::string> extra;
    std::map<std::string, double> timings_s;

    nlohmann::json to_json() const;
};

std::string library_version();

/// Shortest text that reads back to the same double.
std::string format_number(double v);

/// CSV with '#'-prefixed provenance lines, one header row, then rows.
void write_csv(const std::string& path, const Provenance& prov, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Column-major convenience.
void write_csv_columns(const std::string& path, const Provenance& prov, const std::vector<std::string>& header,
                       const std::vector<Vec>& columns);

void write_json(const std::string& path, const Provenance& prov, nlohmann::json body);

/// Gridded density as raw text: metadata lines, R1 axis, R2 axis, then one row per R1.
void write_grid(const std::string& path, const Provenance& prov, const Vec& R1, const Vec& R2, const Mat& values);

/// Binary cache of a resonance set (eigenvalues, overlaps, normalization, diagnostics).
void save_resonances(const std::string& path, const ResonanceSet& rs);
std::optional<ResonanceSet> load_resonances(const std::string& path);

void ensure_directory(const std::string& dir);

} // namespace ivr
