#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "cdops/cd_matrix.hpp"
#include "cdops/inversion.hpp"
#include "cdops/representations.hpp"
#include "cdops/weight.hpp"

namespace cdops {

/// Full 17-significant-digit decimal rendering, round-trip safe.
std::string format_full(double v);

/// CSV field quoting for values that contain commas (group elements are
/// comma-separated integer tuples).
std::string csv_quote(const std::string& field);

/// Envelope file: CSV with header `element,value`.
void write_envelope_csv(const std::filesystem::path& path, const Envelope& e);
Envelope read_envelope_csv(const std::filesystem::path& path,
                           std::shared_ptr<const Group> group);

/// Envelope curve for plotting: CSV with header `z,|z|,b_value`.
void write_envelope_curve_csv(const std::filesystem::path& path, const Envelope& e);

/// Matrix file: CSV with header `z,y,re,im` plus a JSON sidecar
/// `<path>.meta.json` holding {group, K, N, max_radius}.
void write_matrix_csv(const std::filesystem::path& path, const CDMatrix& a);
CDMatrix read_matrix_csv(const std::filesystem::path& path);

/// Dense section: row-major CSV plus `<path>.manifest.csv` listing the ball
/// elements in order.
void write_dense_csv(const std::filesystem::path& path, const DenseSection& m);

nlohmann::json spectral_json(const SpectralEstimate& est);
nlohmann::json inversion_report_json(const InversionReport& rep);
nlohmann::json lp_table_json(const std::vector<LpRow>& rows);
nlohmann::json weighted_check_json(const WeightedCheck& wc);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace cdops
