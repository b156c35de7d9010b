#include "ens/serialize.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ens/version.hpp"

namespace ens::io {

using nlohmann::json;

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

json state_to_json(const fock::TwoModeState& state) {
  json coeffs = json::array();
  for (int n = 0; n < state.cutoff_a(); ++n)
    for (int m = 0; m < state.cutoff_b(); ++m) {
      const fock::cd c = state.coeffs()(n, m);
      coeffs.push_back(json::array({c.real(), c.imag()}));
    }
  return json{{"cutoff_a", state.cutoff_a()},
              {"cutoff_b", state.cutoff_b()},
              {"coeffs", std::move(coeffs)},
              {"truncation_tolerance", state.truncation_tolerance()}};
}

fock::TwoModeState state_from_json(const json& j) {
  const int ca = j.at("cutoff_a").get<int>();
  const int cb = j.at("cutoff_b").get<int>();
  const auto& coeffs = j.at("coeffs");
  if (static_cast<long>(coeffs.size()) != static_cast<long>(ca) * cb) {
    throw std::invalid_argument("state JSON: coeffs length does not match the cutoffs");
  }
  fock::Mat c(ca, cb);
  for (int n = 0; n < ca; ++n)
    for (int m = 0; m < cb; ++m) {
      const auto& pair = coeffs.at(fock::flat_index(n, m, cb));
      c(n, m) = fock::cd(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
  return fock::TwoModeState(std::move(c), j.at("truncation_tolerance").get<double>());
}

json provenance_json(const Provenance& p) {
  json j{{"tool_version", kVersion},
         {"command", p.command},
         {"cutoff_a", p.cutoff_a},
         {"cutoff_b", p.cutoff_b},
         {"truncation_tolerance", p.tolerance},
         {"truncation_loss", p.truncation_loss}};
  if (p.seed) j["seed"] = *p.seed;
  for (const auto& [key, value] : p.extra) j[key] = value;
  return j;
}

void write_provenance_comments(std::ostream& out, const Provenance& p) {
  out << "# tool_version: " << kVersion << "\n";
  out << "# command: " << p.command << "\n";
  out << "# cutoff_a: " << p.cutoff_a << "\n";
  out << "# cutoff_b: " << p.cutoff_b << "\n";
  out << "# truncation_tolerance: " << format_double(p.tolerance) << "\n";
  out << "# truncation_loss: " << format_double(p.truncation_loss) << "\n";
  if (p.seed) out << "# seed: " << *p.seed << "\n";
  for (const auto& [key, value] : p.extra) out << "# " << key << ": " << value << "\n";
}

void write_schmidt_csv(std::ostream& out, const states::SchmidtSpectrum& spectrum, int n_a,
                       int n_b, const Provenance& p) {
  Provenance full = p;
  full.extra.emplace_back("N_A", std::to_string(n_a));
  full.extra.emplace_back("N_B", std::to_string(n_b));
  full.extra.emplace_back("xi", format_double(spectrum.xi));
  full.extra.emplace_back("offset", std::to_string(spectrum.offset));
  write_provenance_comments(out, full);
  out << "m,C_m,C_m_squared\n";
  for (size_t m = 0; m < spectrum.coeffs.size(); ++m) {
    const double c = spectrum.coeffs[m];
    out << m << "," << format_double(c) << "," << format_double(c * c) << "\n";
  }
}

void write_entropy_grid_csv(std::ostream& out, const std::vector<EntropyCell>& grid,
                            const Provenance& p) {
  write_provenance_comments(out, p);
  out << "N_A,N_B,xi,entropy_bits\n";
  for (const auto& cell : grid) {
    out << cell.n_a << "," << cell.n_b << "," << format_double(cell.xi) << ","
        << format_double(cell.entropy_bits) << "\n";
  }
}

json criteria_report_json(const criteria::CriteriaReport& report, const Provenance& p) {
  json j{{"xi", report.xi},
         {"duan_value", report.duan.value},
         {"duan_bound", report.duan.bound},
         {"duan_verdict", criteria::to_string(report.duan.verdict)},
         {"duan_margin", report.duan.margin},
         {"duan_boundary", report.duan.boundary},
         {"variance_value", report.variance.value},
         {"variance_bound", report.variance.bound},
         {"variance_verdict", criteria::to_string(report.variance.verdict)},
         {"variance_margin", report.variance.margin},
         {"variance_boundary", report.variance.boundary},
         {"pt_verdict", criteria::to_string(report.pt_verdict)}};
  if (report.pt_min_eigenvalue) j["pt_min_eigenvalue"] = *report.pt_min_eigenvalue;
  j["provenance"] = provenance_json(p);
  return j;
}

// --- SVG -----------------------------------------------------------------------

namespace {

constexpr int kWidth = 760;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 72;
constexpr int kMarginRight = 24;
constexpr int kMarginTop = 48;
constexpr int kMarginBottom = 56;

const char* kPalette[] = {"#1f6fb4", "#d95f02", "#1b9e77", "#7570b3",
                          "#e7298a", "#66a61e", "#a6761d", "#444444"};

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

void svg_header(std::ostringstream& out, const Provenance& p) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<!--\n";
  std::ostringstream comments;
  write_provenance_comments(comments, p);
  out << svg_escape(comments.str());
  out << "-->\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
}

struct Ticks {
  std::vector<double> values;
};

Ticks nice_ticks(double lo, double hi, int want = 6) {
  Ticks t;
  if (!(hi > lo)) hi = lo + 1.0;
  const double raw = (hi - lo) / want;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step)
    t.values.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  return t;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string svg_distribution(const std::vector<Series>& series, const std::string& title,
                             const std::string& x_label, const std::string& y_label,
                             const Provenance& p) {
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  bool first = true;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (first) {
        x_lo = x_hi = x;
        y_lo = y_hi = y;
        first = false;
      }
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  if (y_lo > 0) y_lo = 0;
  if (!(y_hi > y_lo)) y_hi = y_lo + 1;
  if (!(x_hi > x_lo)) x_hi = x_lo + 1;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto px = [&](double x) { return kMarginLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto py = [&](double y) {
    return kHeight - kMarginBottom - (y - y_lo) / (y_hi - y_lo) * plot_h;
  };

  std::ostringstream out;
  svg_header(out, p);
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" "
      << "font-family=\"sans-serif\">" << svg_escape(title) << "</text>\n";

  for (double tv : nice_ticks(x_lo, x_hi).values) {
    out << "<line x1=\"" << px(tv) << "\" y1=\"" << py(y_lo) << "\" x2=\"" << px(tv)
        << "\" y2=\"" << py(y_lo) + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(tv) << "\" y=\"" << py(y_lo) + 20
        << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
        << tick_label(tv) << "</text>\n";
  }
  for (double tv : nice_ticks(y_lo, y_hi).values) {
    out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << py(tv) << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << py(tv) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << py(tv) + 4
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
        << tick_label(tv) << "</text>\n";
  }
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << py(y_lo) << "\" x2=\""
      << kWidth - kMarginRight << "\" y2=\"" << py(y_lo) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
      << "\" y2=\"" << py(y_lo) << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
      << svg_escape(x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
      << "transform=\"rotate(-90 18 " << kHeight / 2 << ")\">" << svg_escape(y_label)
      << "</text>\n";

  int color = 0;
  double legend_y = kMarginTop + 6;
  for (const auto& s : series) {
    const char* stroke = kPalette[color % 8];
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : s.points) out << px(x) << "," << py(y) << " ";
    out << "\"/>\n";
    if (!s.label.empty()) {
      out << "<line x1=\"" << kWidth - kMarginRight - 130 << "\" y1=\"" << legend_y
          << "\" x2=\"" << kWidth - kMarginRight - 110 << "\" y2=\"" << legend_y
          << "\" stroke=\"" << stroke << "\" stroke-width=\"2\"/>\n";
      out << "<text x=\"" << kWidth - kMarginRight - 104 << "\" y=\"" << legend_y + 4
          << "\" font-size=\"11\" font-family=\"sans-serif\">" << svg_escape(s.label)
          << "</text>\n";
      legend_y += 16;
    }
    ++color;
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_heatmap(const std::vector<std::vector<double>>& values, const std::string& title,
                        const Provenance& p) {
  const int rows = static_cast<int>(values.size());
  const int cols = rows > 0 ? static_cast<int>(values[0].size()) : 0;
  double lo = 0, hi = 1;
  bool first = true;
  for (const auto& row : values)
    for (double v : row) {
      if (first) {
        lo = hi = v;
        first = false;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(hi > lo)) hi = lo + 1;

  // Five-stop blue-to-yellow map.
  struct Stop {
    double t;
    int r, g, b;
  };
  const Stop stops[] = {{0.0, 68, 1, 84},
                        {0.25, 59, 82, 139},
                        {0.5, 33, 145, 140},
                        {0.75, 94, 201, 98},
                        {1.0, 253, 231, 37}};
  const auto color_of = [&](double v) {
    const double t = (v - lo) / (hi - lo);
    for (int i = 0; i < 4; ++i) {
      if (t <= stops[i + 1].t) {
        const double u = (t - stops[i].t) / (stops[i + 1].t - stops[i].t);
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                      static_cast<int>(stops[i].r + u * (stops[i + 1].r - stops[i].r)),
                      static_cast<int>(stops[i].g + u * (stops[i + 1].g - stops[i].g)),
                      static_cast<int>(stops[i].b + u * (stops[i + 1].b - stops[i].b)));
        return std::string(buf);
      }
    }
    return std::string("#fde725");
  };

  const double plot = std::min(kWidth - kMarginLeft - kMarginRight - 70,
                               kHeight - kMarginTop - kMarginBottom);
  const double cell = cols > 0 ? plot / cols : plot;

  std::ostringstream out;
  svg_header(out, p);
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" "
      << "font-family=\"sans-serif\">" << svg_escape(title) << "</text>\n";
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double x = kMarginLeft + j * cell;
      const double y = kMarginTop + (rows - 1 - i) * cell;
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
          << cell << "\" fill=\"" << color_of(values[i][j]) << "\"/>\n";
    }
  for (int j = 0; j < cols; ++j) {
    out << "<text x=\"" << kMarginLeft + (j + 0.5) * cell << "\" y=\""
        << kMarginTop + rows * cell + 16
        << "\" text-anchor=\"middle\" font-size=\"10\" font-family=\"sans-serif\">" << j
        << "</text>\n";
  }
  for (int i = 0; i < rows; ++i) {
    out << "<text x=\"" << kMarginLeft - 8 << "\" y=\""
        << kMarginTop + (rows - 1 - i + 0.65) * cell
        << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">" << i
        << "</text>\n";
  }
  out << "<text x=\"" << kMarginLeft + cols * cell / 2 << "\" y=\""
      << kMarginTop + rows * cell + 36
      << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">N_B</text>\n";
  out << "<text x=\"" << kMarginLeft - 44 << "\" y=\"" << kMarginTop + rows * cell / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">N_A</text>\n";

  // colorbar
  const double bar_x = kMarginLeft + cols * cell + 28;
  const int bar_steps = 64;
  const double bar_h = rows * cell;
  for (int s = 0; s < bar_steps; ++s) {
    const double v = lo + (hi - lo) * (s + 0.5) / bar_steps;
    out << "<rect x=\"" << bar_x << "\" y=\"" << kMarginTop + bar_h * (1.0 - double(s + 1) / bar_steps)
        << "\" width=\"16\" height=\"" << bar_h / bar_steps + 0.5 << "\" fill=\"" << color_of(v)
        << "\"/>\n";
  }
  out << "<text x=\"" << bar_x + 22 << "\" y=\"" << kMarginTop + 8
      << "\" font-size=\"10\" font-family=\"sans-serif\">" << tick_label(hi) << "</text>\n";
  out << "<text x=\"" << bar_x + 22 << "\" y=\"" << kMarginTop + bar_h
      << "\" font-size=\"10\" font-family=\"sans-serif\">" << tick_label(lo) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace ens::io
