#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qmetro/states.hpp"

namespace qmetro {

// Locale-independent float formatting, 17 significant digits ('.' decimal);
// round-trips double exactly.
std::string format_double(double v);

// CSV layout: single header row
// state_id,seed,purity,concurrence,negativity,ree,mqfi,mqfi_norm
// A missing REE serializes as an empty field.
void write_ensemble_csv(const std::filesystem::path& path, const std::vector<EnsembleRecord>& records);
std::vector<EnsembleRecord> read_ensemble_csv(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace qmetro
