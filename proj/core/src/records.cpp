#include "sdecert/records.hpp"

#include <iomanip>
#include <ostream>

namespace sdecert {

namespace {

void write_vector(std::ostream& out, ConstVecRef v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << v[i];
}

}  // namespace

void write_pairs_csv(std::ostream& out, std::span<const ContractionSample> samples) {
  out << std::setprecision(17);
  const Eigen::Index dim = samples.empty() ? 0 : samples.front().x.size();
  out << "index";
  for (Eigen::Index i = 0; i < dim; ++i) out << ",x" << i;
  for (Eigen::Index i = 0; i < dim; ++i) out << ",y" << i;
  out << ",distance,K,M,diverged,r,v\n";
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    out << k;
    write_vector(out, s.x);
    write_vector(out, s.y);
    out << ',' << s.distance << ',' << s.coupled << ',' << s.replicates << ',' << s.diverged << ',' << s.r << ','
        << s.v << '\n';
  }
}

void write_survival_csv(std::ostream& out, const TailRateResult& tail) {
  out << std::setprecision(17) << "t,survival\n";
  for (std::size_t k = 0; k < tail.t.size(); ++k) out << tail.t[k] << ',' << tail.survival[k] << '\n';
}

void write_gpd_diagnostic_csv(std::ostream& out, std::span<const GpdDiagnosticRow> rows) {
  out << std::setprecision(17) << "exceedance,empirical_cdf,fitted_cdf\n";
  for (const auto& r : rows) out << r.exceedance << ',' << r.empirical_cdf << ',' << r.fitted_cdf << '\n';
}

void write_density_grid_csv(std::ostream& out, const DensityGrid& grid, const AnalyticMasses* analytic) {
  out << std::setprecision(17);
  const Eigen::Index dim = grid.box.dim();
  static constexpr const char* kNames[] = {"x_center", "y_center", "z_center"};
  for (Eigen::Index a = 0; a < dim; ++a) {
    if (a > 0) out << ',';
    if (a < 3) {
      out << kNames[a];
    } else {
      out << "c" << a << "_center";
    }
  }
  out << ",mass";
  if (analytic) out << ",analytic_mass,difference";
  out << '\n';
  for (std::size_t i = 0; i < grid.cells(); ++i) {
    const StateVec c = grid.cell_center(i);
    for (Eigen::Index a = 0; a < dim; ++a) out << (a > 0 ? "," : "") << c[a];
    out << ',' << grid.mass[i];
    if (analytic) out << ',' << analytic->mass[i] << ',' << grid.mass[i] - analytic->mass[i];
    out << '\n';
  }
}

void ensure_parent_directory(const std::filesystem::path& path) {
  const auto parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

}  // namespace sdecert
