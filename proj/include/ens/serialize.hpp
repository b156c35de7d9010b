#pragma once

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ens/criteria.hpp"
#include "ens/fock.hpp"
#include "ens/states.hpp"

namespace ens::io {

/// Run metadata embedded in every output file: tool version, the exact
/// configuration that produced the file, cutoffs and the measured leakage.
struct Provenance {
  std::string command;  // config echo
  int cutoff_a = 0;
  int cutoff_b = 0;
  double tolerance = 0.0;
  double truncation_loss = 0.0;
  std::optional<long> seed;
  std::vector<std::pair<std::string, std::string>> extra;
};

/// Deterministic shortest round-trip formatting for doubles.
std::string format_double(double value);

nlohmann::json state_to_json(const fock::TwoModeState& state);
fock::TwoModeState state_from_json(const nlohmann::json& j);

nlohmann::json provenance_json(const Provenance& p);
void write_provenance_comments(std::ostream& out, const Provenance& p);

void write_schmidt_csv(std::ostream& out, const states::SchmidtSpectrum& spectrum, int n_a,
                       int n_b, const Provenance& p);

struct EntropyCell {
  int n_a = 0;
  int n_b = 0;
  double xi = 0.0;
  double entropy_bits = 0.0;
};
void write_entropy_grid_csv(std::ostream& out, const std::vector<EntropyCell>& grid,
                            const Provenance& p);

nlohmann::json criteria_report_json(const criteria::CriteriaReport& report, const Provenance& p);

/// One polyline on a distribution chart.
struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};
std::string svg_distribution(const std::vector<Series>& series, const std::string& title,
                             const std::string& x_label, const std::string& y_label,
                             const Provenance& p);

/// Square heatmap; values indexed [row][col] = [N_A][N_B].
std::string svg_heatmap(const std::vector<std::vector<double>>& values, const std::string& title,
                        const Provenance& p);

}  // namespace ens::io
