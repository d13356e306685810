#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "wlab/grid.hpp"
#include "wlab/identities.hpp"
#include "wlab/psi.hpp"
#include "wlab/symmetry.hpp"
#include "wlab/two_point.hpp"

namespace wlab {

inline constexpr const char* kToolVersion = "0.1.0";

// One named member of the verification report: a pre-rendered JSON object
// (fixed key order) and the verdict feeding the overall conjunction.
struct CheckEntry {
  std::string name;
  bool pass = true;
  std::string json;
};

struct VerificationReport {
  std::string tool_version = kToolVersion;
  long long schema_version = kSchemaVersion;
  PsiSpec psi;
  std::size_t n_t = 0, n_th = 0;
  std::string provenance;
  std::vector<std::pair<std::string, std::string>> grid_metadata;
  std::vector<CheckEntry> checks;
  std::vector<std::pair<std::string, double>> timings_ms;
  // Golden-file mode: timings are emitted as 0 so identical inputs give
  // byte-identical reports.
  bool zero_timings = false;

  bool overall_pass() const;
};

// Payload renderers, one fixed layout per check kind.
std::string residual_json(const ResidualSummary& r, std::size_t resolution);
std::string scan_json(const TwoPointScan& s);
std::string reflection_json(const ReflectionCheck& rc, double tolerance,
                            bool pass);
std::string symmetry_json(const SymmetryFit& f);
std::string structure_json(const StructureReport& r);
std::string psi_json(const PsiSpec& spec);

std::string report_json(const VerificationReport& rep);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace wlab
