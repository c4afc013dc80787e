#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include "sdecert/estimators.hpp"
#include "sdecert/evt.hpp"
#include "sdecert/validate.hpp"

namespace sdecert {

// Plain CSV with a header row; doubles are written with 17 significant digits.

void write_pairs_csv(std::ostream& out, std::span<const ContractionSample> samples);
void write_survival_csv(std::ostream& out, const TailRateResult& tail);
void write_gpd_diagnostic_csv(std::ostream& out, std::span<const GpdDiagnosticRow> rows);
/// Cell centers and masses; the analytic column is written when given.
void write_density_grid_csv(std::ostream& out, const DensityGrid& grid, const AnalyticMasses* analytic = nullptr);

/// Opens `path` for writing (creating parent directories) and calls `write`.
template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& write);

void ensure_parent_directory(const std::filesystem::path& path);

}  // namespace sdecert

#include <fstream>

#include "sdecert/error.hpp"

namespace sdecert {

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& write) {
  ensure_parent_directory(path);
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write(out);
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace sdecert
