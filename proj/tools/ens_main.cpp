// Command-line front end: distributions of the squared Schmidt coefficients,
// entanglement-entropy grids, separability-criteria reports, state dumps and
// the self-verification suite.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ens/coherent.hpp"
#include "ens/criteria.hpp"
#include "ens/entanglement.hpp"
#include "ens/serialize.hpp"
#include "ens/states.hpp"
#include "ens/verify.hpp"
#include "ens/version.hpp"

namespace {

using ens::fock::TwoModeState;
using ens::states::Cutoffs;
using ens::states::EnsLabel;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

struct CommonOptions {
  std::string out;
  std::string format = "csv";
  double tolerance = ens::fock::kDefaultTolerance;
  int cutoff = 0;  // 0 = policy-sized
  long seed = 12345;
};

void emit(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file " + out_path);
  file << payload;
}

std::string join_args(int argc, char** argv) {
  std::ostringstream s;
  for (int i = 0; i < argc; ++i) s << (i ? " " : "") << argv[i];
  return s.str();
}

// --- state specs shared by `criteria` and `state-dump` ------------------------

struct ParsedState {
  TwoModeState state;
  double xi = 0.0;     // construction xi when the spec has one, else 0
  std::string label;
};

ParsedState build_state(const std::vector<std::string>& spec, const CommonOptions& opt) {
  const auto need = [&](size_t n, const char* usage) {
    if (spec.size() != n + 1) {
      throw CLI::ValidationError("state spec", std::string("expected: ") + usage);
    }
  };
  const auto num = [&](size_t i) { return std::stod(spec.at(i)); };
  const auto integer = [&](size_t i) {
    const double v = num(i);
    if (v != static_cast<int>(v)) throw CLI::ValidationError("state spec", "expected an integer");
    return static_cast<int>(v);
  };

  if (spec.empty()) throw CLI::ValidationError("state spec", "missing state kind");
  const std::string& kind = spec[0];
  if (kind == "ens") {
    need(3, "ens N_A N_B XI");
    const EnsLabel label(integer(1), integer(2), num(3));
    TwoModeState state = opt.cutoff > 0
                             ? ens::states::ens_state(label, Cutoffs{opt.cutoff, opt.cutoff},
                                                      opt.tolerance)
                             : ens::states::ens_state(label, opt.tolerance);
    return ParsedState{std::move(state), label.xi(),
                       "ens " + spec[1] + " " + spec[2] + " " + spec[3]};
  }
  if (kind == "tmsv") {
    need(1, "tmsv XI");
    const double xi = num(1);
    // Tail-driven cutoff: xi^(2D) <= 0.01 * tolerance. Usually well inside
    // the dense policy, which keeps the partial transpose in the report.
    const int tail_cutoff =
        std::max(8, static_cast<int>(std::ceil(std::log(0.01 * opt.tolerance) /
                                               (2.0 * std::log(xi)))) + 2);
    const int cutoff = opt.cutoff > 0 ? opt.cutoff : tail_cutoff;
    return ParsedState{ens::states::tmsv(xi, cutoff, opt.tolerance), xi, "tmsv " + spec[1]};
  }
  if (kind == "product") {
    need(2, "product N_A N_B");
    const int na = integer(1), nb = integer(2);
    if (na < 0 || nb < 0) throw CLI::ValidationError("state spec", "labels must be >= 0");
    const int cutoff = opt.cutoff > 0 ? opt.cutoff : std::max(na, nb) + 5;
    return ParsedState{TwoModeState::fock(na, nb, cutoff, cutoff, opt.tolerance), 0.0,
                       "product " + spec[1] + " " + spec[2]};
  }
  if (kind == "coherent") {
    need(5, "coherent RE_ALPHA IM_ALPHA RE_BETA IM_BETA XI");
    const ens::coherent::CoherentLabel label({num(1), num(2)}, {num(3), num(4)}, num(5));
    TwoModeState state =
        opt.cutoff > 0
            ? ens::coherent::coherent_state_series(label, Cutoffs{opt.cutoff, opt.cutoff},
                                                   ens::coherent::series_terms(label, opt.tolerance),
                                                   opt.tolerance)
            : ens::coherent::coherent_state_series(label, opt.tolerance);
    return ParsedState{std::move(state), label.xi(), "coherent"};
  }
  throw CLI::ValidationError("state spec", "unknown kind '" + kind +
                                               "' (want ens|tmsv|product|coherent)");
}

// --- subcommands ----------------------------------------------------------------

int run_distribution(const CommonOptions& opt, double xi, int na, int nb, int m_max, bool fig1,
                     const std::string& command) {
  struct Row {
    int nb;
    ens::states::SchmidtSpectrum spectrum;
  };
  std::vector<Row> rows;
  const int fixed_na = fig1 ? 120 : na;
  const double fixed_xi = fig1 ? 0.7 : xi;
  const std::vector<int> nbs = fig1 ? std::vector<int>{0, 1, 2, 3, 4} : std::vector<int>{nb};

  double norm_deficit = 0.0;
  for (int k : nbs) {
    const EnsLabel label(fixed_na, k, fixed_xi);
    const int chosen =
        m_max > 0 ? m_max : ens::states::default_cutoffs(label, opt.tolerance).b - 1;
    rows.push_back({k, ens::states::closed_form_schmidt(label, chosen)});
    norm_deficit =
        std::max(norm_deficit, std::abs(1.0 - rows.back().spectrum.sum_of_squares()));
  }

  ens::io::Provenance prov;
  prov.command = command;
  prov.tolerance = opt.tolerance;
  prov.truncation_loss = norm_deficit;
  const EnsLabel widest_label(fixed_na, nbs.back(), fixed_xi);
  const Cutoffs cuts = ens::states::default_cutoffs(widest_label, opt.tolerance);
  prov.cutoff_a = cuts.a;
  prov.cutoff_b = cuts.b;
  prov.extra.emplace_back("xi", ens::io::format_double(fixed_xi));
  prov.extra.emplace_back("N_A", std::to_string(fixed_na));
  if (fig1) prov.extra.emplace_back("preset", "fig1");

  std::ostringstream payload;
  if (opt.format == "csv") {
    if (rows.size() == 1) {
      ens::io::write_schmidt_csv(payload, rows[0].spectrum, fixed_na, rows[0].nb, prov);
    } else {
      ens::io::write_provenance_comments(payload, prov);
      payload << "N_B,m,C_m,C_m_squared\n";
      for (const auto& row : rows)
        for (size_t m = 0; m < row.spectrum.coeffs.size(); ++m) {
          const double c = row.spectrum.coeffs[m];
          payload << row.nb << "," << m << "," << ens::io::format_double(c) << ","
                  << ens::io::format_double(c * c) << "\n";
        }
    }
  } else if (opt.format == "json") {
    json series = json::array();
    for (const auto& row : rows) {
      json c = json::array(), c2 = json::array();
      for (double v : row.spectrum.coeffs) {
        c.push_back(v);
        c2.push_back(v * v);
      }
      series.push_back(json{{"N_A", fixed_na},
                            {"N_B", row.nb},
                            {"xi", fixed_xi},
                            {"offset", row.spectrum.offset},
                            {"C_m", std::move(c)},
                            {"C_m_squared", std::move(c2)}});
    }
    payload << json{{"provenance", ens::io::provenance_json(prov)},
                    {"series", std::move(series)}}
                   .dump(2)
            << "\n";
  } else if (opt.format == "svg") {
    // Presentation transform only: the fig1 preset stacks curves by 0.02*N_B.
    std::vector<ens::io::Series> series;
    for (const auto& row : rows) {
      ens::io::Series s;
      s.label = "N_B=" + std::to_string(row.nb);
      const double offset = fig1 ? 0.02 * row.nb : 0.0;
      for (size_t m = 0; m < row.spectrum.coeffs.size(); ++m) {
        const double c = row.spectrum.coeffs[m];
        s.points.emplace_back(static_cast<double>(m), c * c + offset);
      }
      series.push_back(std::move(s));
    }
    payload << ens::io::svg_distribution(
        series, "Squared Schmidt coefficients, N_A=" + std::to_string(fixed_na), "m",
        fig1 ? "|C_m|^2 + 0.02 N_B" : "|C_m|^2", prov);
  } else {
    throw CLI::ValidationError("--format", "unknown format " + opt.format);
  }
  emit(opt.out, payload.str());
  return kExitOk;
}

int run_entropy_grid(const CommonOptions& opt, double xi, int n_max, const std::string& command) {
  std::vector<ens::io::EntropyCell> grid;
  std::vector<std::vector<double>> values(n_max + 1, std::vector<double>(n_max + 1));
  for (int i = 0; i <= n_max; ++i)
    for (int j = 0; j <= n_max; ++j) {
      const double e = ens::entanglement::entropy_from_closed_form(EnsLabel(i, j, xi));
      values[i][j] = e;
      grid.push_back({i, j, xi, e});
    }

  ens::io::Provenance prov;
  prov.command = command;
  prov.tolerance = opt.tolerance;
  const Cutoffs cuts = ens::states::default_cutoffs(EnsLabel(n_max, n_max, xi), opt.tolerance);
  prov.cutoff_a = cuts.a;
  prov.cutoff_b = cuts.b;
  prov.extra.emplace_back("xi", ens::io::format_double(xi));
  prov.extra.emplace_back("n_max", std::to_string(n_max));

  // Conjecture summary: fractions of adjacent pairs with strictly larger
  // entropy. Commentary goes to stderr; data to the chosen sink.
  int nb_ok = 0, na_ok = 0, pairs = 0;
  for (int i = 0; i <= n_max; ++i)
    for (int j = 0; j < n_max; ++j) {
      ++pairs;
      if (values[i][j + 1] > values[i][j]) ++nb_ok;
      if (values[j + 1][i] > values[j][i]) ++na_ok;
    }
  std::cerr << "monotonicity: larger N_B " << nb_ok << "/" << pairs << ", larger N_A " << na_ok
            << "/" << pairs << " adjacent pairs (conjecture report)\n";

  std::ostringstream payload;
  if (opt.format == "csv") {
    ens::io::write_entropy_grid_csv(payload, grid, prov);
  } else if (opt.format == "json") {
    json cells = json::array();
    for (const auto& cell : grid)
      cells.push_back(json{{"N_A", cell.n_a},
                           {"N_B", cell.n_b},
                           {"xi", cell.xi},
                           {"entropy_bits", cell.entropy_bits}});
    payload << json{{"provenance", ens::io::provenance_json(prov)}, {"grid", std::move(cells)}}
                   .dump(2)
            << "\n";
  } else if (opt.format == "svg") {
    payload << ens::io::svg_heatmap(values,
                                    "Entanglement entropy (bits), xi=" + ens::io::format_double(xi),
                                    prov);
  } else {
    throw CLI::ValidationError("--format", "unknown format " + opt.format);
  }
  emit(opt.out, payload.str());
  return kExitOk;
}

int run_criteria(const CommonOptions& opt, const std::vector<std::string>& spec, double xi_test,
                 bool xi_test_given, const std::string& command) {
  const ParsedState parsed = build_state(spec, opt);
  double xi = xi_test;
  if (!xi_test_given) {
    if (parsed.xi <= 0.0) {
      throw CLI::ValidationError("--xi-test",
                                 "required for state specs without a construction xi");
    }
    xi = parsed.xi;
  }
  const auto report = ens::criteria::criteria_report(parsed.state, xi);

  ens::io::Provenance prov;
  prov.command = command;
  prov.cutoff_a = report.cutoff_a;
  prov.cutoff_b = report.cutoff_b;
  prov.tolerance = report.tolerance;
  prov.truncation_loss = report.truncation_loss;
  prov.extra.emplace_back("state", parsed.label);
  if (parsed.xi > 0.0) prov.extra.emplace_back("state_xi", ens::io::format_double(parsed.xi));

  emit(opt.out, ens::io::criteria_report_json(report, prov).dump(2) + "\n");
  return kExitOk;  // verdicts are data, not errors
}

int run_state_dump(const CommonOptions& opt, const std::vector<std::string>& spec,
                   const std::string& command) {
  const ParsedState parsed = build_state(spec, opt);
  ens::io::Provenance prov;
  prov.command = command;
  prov.cutoff_a = parsed.state.cutoff_a();
  prov.cutoff_b = parsed.state.cutoff_b();
  prov.tolerance = parsed.state.truncation_tolerance();
  prov.truncation_loss = parsed.state.truncation_loss();
  prov.extra.emplace_back("state", parsed.label);

  json j = ens::io::state_to_json(parsed.state);
  j["provenance"] = ens::io::provenance_json(prov);
  emit(opt.out, j.dump() + "\n");
  return kExitOk;
}

int run_verify(const std::string& suite_name, long seed) {
  const ens::verify::Suite suite =
      suite_name == "fast" ? ens::verify::Suite::Fast : ens::verify::Suite::Full;
  const auto results = ens::verify::run_suite(suite, static_cast<std::uint64_t>(seed));
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS" : (r.hard ? "FAIL" : "NOTE")) << " [" << r.id << "] " << r.name
              << " -- " << r.detail << "\n";
  }
  return ens::verify::all_hard_passed(results) ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string command = join_args(argc, argv);

  CLI::App app{"Entangled-number-state toolbox: truncated two-mode Fock-space numerics"};
  app.set_version_flag("--version", ens::kVersion);
  app.require_subcommand(1);

  CommonOptions opt;

  auto* dist = app.add_subcommand("distribution", "Squared Schmidt coefficient distribution");
  double d_xi = 0.7;
  int d_na = 1, d_nb = 0, d_mmax = 0;
  bool d_fig1 = false;
  dist->add_option("--xi", d_xi, "squeezing parameter in (0,1)");
  dist->add_option("--na", d_na, "N_A");
  dist->add_option("--nb", d_nb, "N_B");
  dist->add_option("--mmax", d_mmax, "largest m (default: policy-sized)");
  dist->add_flag("--fig1", d_fig1, "preset: xi=0.7, N_A=120, N_B=0..4");
  dist->add_option("--format", opt.format, "csv|json|svg")->capture_default_str();
  dist->add_option("--out", opt.out, "output path (default: stdout)");
  dist->add_option("--tolerance", opt.tolerance, "truncation tolerance")->capture_default_str();

  auto* grid = app.add_subcommand("entropy-grid", "Entanglement entropy over (N_A, N_B)");
  double g_xi = 0.7;
  int g_nmax = 10;
  bool g_fig2 = false;
  grid->add_option("--xi", g_xi, "squeezing parameter in (0,1)");
  grid->add_option("--nmax", g_nmax, "largest excitation per mode")->check(CLI::Range(0, 10));
  grid->add_flag("--fig2", g_fig2, "preset: xi=0.7, nmax=10");
  grid->add_option("--format", opt.format, "csv|json|svg")->capture_default_str();
  grid->add_option("--out", opt.out, "output path (default: stdout)");
  grid->add_option("--tolerance", opt.tolerance, "truncation tolerance")->capture_default_str();

  auto* crit = app.add_subcommand("criteria", "Separability criteria report (JSON)");
  std::vector<std::string> c_spec;
  double c_xi_test = 0.0;
  crit->add_option("spec", c_spec, "ens N_A N_B XI | tmsv XI | product N_A N_B | "
                                   "coherent RE_A IM_A RE_B IM_B XI")
      ->expected(-1);
  auto* xi_test_opt = crit->add_option("--xi-test", c_xi_test, "criterion parameter");
  crit->add_option("--cutoff", opt.cutoff, "override both cutoffs");
  crit->add_option("--tolerance", opt.tolerance, "truncation tolerance")->capture_default_str();
  crit->add_option("--out", opt.out, "output path (default: stdout)");

  auto* dump = app.add_subcommand("state-dump", "Serialize a state to JSON");
  std::vector<std::string> s_spec;
  dump->add_option("spec", s_spec, "same state specs as `criteria`")->expected(-1);
  dump->add_option("--cutoff", opt.cutoff, "override both cutoffs");
  dump->add_option("--tolerance", opt.tolerance, "truncation tolerance")->capture_default_str();
  dump->add_option("--out", opt.out, "output path (default: stdout)");

  auto* verify = app.add_subcommand("verify", "Run the verification suite");
  std::string v_suite = "full";
  verify->add_option("suite", v_suite, "fast|full")->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--seed", opt.seed, "seed for randomized sweeps")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (dist->parsed()) return run_distribution(opt, d_xi, d_na, d_nb, d_mmax, d_fig1, command);
    if (grid->parsed()) {
      if (g_fig2) {
        g_xi = 0.7;
        g_nmax = 10;
      }
      return run_entropy_grid(opt, g_xi, g_nmax, command);
    }
    if (crit->parsed()) {
      return run_criteria(opt, c_spec, c_xi_test, xi_test_opt->count() > 0, command);
    }
    if (dump->parsed()) return run_state_dump(opt, s_spec, command);
    if (verify->parsed()) return run_verify(v_suite, opt.seed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ens::TruncationError& e) {
    std::cerr << "truncation error: " << e.what() << "\n";
    return kExitResource;
  } catch (const ens::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kExitResource;
  } catch (const ens::PrecisionError& e) {
    std::cerr << "precision error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitUsage;
}
