#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lpstab/inverse.hpp"
#include "lpstab/matrix.hpp"
#include "lpstab/stability.hpp"

namespace lpstab {
namespace io {

/// Reads the JSON interchange format:
///   {"space": {...}, "rows": "same" | <int>, "entries": [[row, col, value]]}
/// Space kinds: z_interval{n}, zd_box{dims}, tree{degree, radius},
/// explicit{distances}. Throws FormatError with position info on malformed
/// documents.
IndexedMatrix read_matrix(const std::filesystem::path& path);
IndexedMatrix parse_matrix(const std::string& text,
                           const std::string& origin = "<string>");

/// Canonical serialization: fixed key order, entries sorted by (row, col),
/// floats rendered with %.17g. write(read(file)) is byte-identical for
/// canonical files.
std::string matrix_to_json(const IndexedMatrix& a);
void write_matrix(const IndexedMatrix& a, const std::filesystem::path& path);

/// Atomic write: temp file in the target directory, then rename.
void atomic_write_text(const std::filesystem::path& path,
                       const std::string& text);

std::string format_double(double v);  // %.17g

/// Run configuration shared by the analysis commands.
struct RunConfig {
  std::vector<Exponent> p_grid;
  std::uint64_t seed = 1;
  Budget budget;
  std::vector<double> L_sweep;
  std::vector<int> window_sweep;
  bool allow_sparse_grid = false;
  Weight weight = Weight::polynomial(1.0);
  /// Relative sigma_min tolerance below which a window counts as not
  /// bounded below.
  double invert_rel_tol = 1e-9;

  static RunConfig defaults();
  /// Enforces the floor p >= 0.1 and the 1/2/inf grid requirement.
  void validate() const;
};

std::vector<Exponent> parse_p_grid(const std::string& csv);

std::string stability_report_json(const StabilityReport& r);
std::string stability_report_csv(const StabilityReport& r);
std::string pipeline_report_json(const PipelineReport& r);
std::string pipeline_report_csv(const PipelineReport& r);
std::string localize_certificate_json(const LocalizeCertificate& c);
std::string chain_result_json(const ChainResult& c);

}  // namespace io
}  // namespace lpstab
