#include "qgc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qgc/basis.hpp"
#include "qgc/control.hpp"
#include "qgc/core.hpp"
#include "qgc/propagate.hpp"

namespace qgc {

// ---- number formatting ----

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) return "0";
  char buf[64];
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  // shortest %.g that round-trips; 17 digits always suffice for IEEE double
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- CSV ----

Csv::Csv(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw Error("csv table needs at least one column");
}

Csv& Csv::comment(std::string line) {
  comments_.push_back(std::move(line));
  return *this;
}

Csv& Csv::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw Error("csv row width " + std::to_string(cells.size()) +
                " does not match header width " + std::to_string(header_.size()));
  rows_.push_back(std::move(cells));
  return *this;
}

void Csv::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);  // binary: same bytes on any host
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  for (const auto& c : comments_) out << "# " << c << '\n';
  emit(header_);
  for (const auto& r : rows_) emit(r);
  if (!out) throw Error("write failed for " + path.string());
}

// ---- SVG line charts ----

namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 72, kRight = 24, kTop = 44, kBottom = 56;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"};

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
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

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double map(double v, double pix_lo, double pix_hi) const {
    double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return pix_lo + t * (pix_hi - pix_lo);
  }
};

Axis fit_axis(const std::vector<Series>& series, bool take_x, bool log) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series)
    for (double v : take_x ? s.x : s.y) {
      if (!std::isfinite(v) || (log && v <= 0)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(lo <= hi)) lo = log ? 1 : 0, hi = log ? 10 : 1;
  Axis ax;
  ax.log = log;
  if (log) {
    ax.lo = std::floor(std::log10(lo));
    ax.hi = std::ceil(std::log10(hi));
    if (ax.hi - ax.lo < 1) ax.hi = ax.lo + 1;
  } else {
    double pad = (hi - lo) * 0.05;
    if (pad == 0) pad = (hi == 0) ? 1 : std::abs(hi) * 0.05;
    ax.lo = lo - pad;
    ax.hi = hi + pad;
  }
  return ax;
}

std::vector<double> axis_ticks(const Axis& ax) {
  std::vector<double> ticks;
  if (ax.log) {
    for (double e = std::ceil(ax.lo); e <= ax.hi + 1e-9; ++e)
      ticks.push_back(std::pow(10.0, e));
    return ticks;
  }
  double span = ax.hi - ax.lo;
  double step = std::pow(10.0, std::floor(std::log10(span / 4)));
  for (double m : {5.0, 2.0, 1.0})
    if (span / (step * m) >= 4) {
      step *= m;
      break;
    }
  double first = std::ceil(ax.lo / step) * step;
  for (double v = first; v <= ax.hi + step * 1e-6; v += step)
    ticks.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  return ticks;
}

std::string tick_label(double v, bool log) {
  char buf[32];
  if (log) {
    std::snprintf(buf, sizeof buf, "1e%d", (int)std::lround(std::log10(v)));
  } else {
    std::snprintf(buf, sizeof buf, "%.4g", v);
  }
  return buf;
}

}  // namespace

void write_line_chart(const std::filesystem::path& path, const ChartSpec& spec,
                      const std::vector<Series>& series) {
  Axis xa = fit_axis(series, true, spec.log_x);
  Axis ya = fit_axis(series, false, spec.log_y);
  const double px_lo = kLeft, px_hi = kWidth - kRight;
  const double py_lo = kHeight - kBottom, py_hi = kTop;  // y grows upward

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << escape_xml(spec.title) << "</text>\n";

  // gridlines + tick labels
  for (double t : axis_ticks(xa)) {
    double px = xa.map(xa.log ? t : t, px_lo, px_hi);
    if (px < px_lo - 0.5 || px > px_hi + 0.5) continue;
    svg << "<line x1=\"" << coord(px) << "\" y1=\"" << coord(py_hi)
        << "\" x2=\"" << coord(px) << "\" y2=\"" << coord(py_lo)
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << coord(px) << "\" y=\"" << coord(py_lo + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << tick_label(t, xa.log) << "</text>\n";
  }
  for (double t : axis_ticks(ya)) {
    double py = ya.map(ya.log ? t : t, py_lo, py_hi);
    if (py > py_lo + 0.5 || py < py_hi - 0.5) continue;
    svg << "<line x1=\"" << coord(px_lo) << "\" y1=\"" << coord(py)
        << "\" x2=\"" << coord(px_hi) << "\" y2=\"" << coord(py)
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << coord(px_lo - 6) << "\" y=\"" << coord(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(t, ya.log) << "</text>\n";
  }

  // frame + axis labels
  svg << "<rect x=\"" << px_lo << "\" y=\"" << py_hi << "\" width=\""
      << px_hi - px_lo << "\" height=\"" << py_lo - py_hi
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg << "<text x=\"" << (px_lo + px_hi) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << escape_xml(spec.x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << (py_lo + py_hi) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 "
      << (py_lo + py_hi) / 2 << ")\">" << escape_xml(spec.y_label)
      << "</text>\n";

  // polylines + legend
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = kPalette[s % (sizeof kPalette / sizeof *kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      double xv = ser.x[i], yv = ser.y[i];
      if (!std::isfinite(xv) || !std::isfinite(yv)) continue;
      if ((xa.log && xv <= 0) || (ya.log && yv <= 0)) continue;
      svg << coord(xa.map(xv, px_lo, px_hi)) << ','
          << coord(ya.map(yv, py_lo, py_hi)) << ' ';
    }
    svg << "\"/>\n";
    double ly = py_hi + 16 + 16 * (double)s;
    svg << "<line x1=\"" << px_hi - 150 << "\" y1=\"" << coord(ly - 4)
        << "\" x2=\"" << px_hi - 126 << "\" y2=\"" << coord(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << px_hi - 120 << "\" y=\"" << coord(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape_xml(ser.label) << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << svg.str();
  if (!out) throw Error("write failed for " + path.string());
}

// ---- domain-object exports ---------------------------------------------------

Csv basis_csv(const SpectralBasis& basis) {
  Csv csv({"k", "mu", "edge", "a", "b"});
  for (const EigenMode& mode : basis.modes())
    for (const EdgeCoef& c : mode.coef)
      csv.row({Csv::cell(mode.k), Csv::cell(mode.mu), basis.graph().edge(c.edge).id,
               Csv::cell(c.a), Csv::cell(c.b)});
  return csv;
}

Csv coupling_csv(const CouplingMatrix& mat) {
  Csv csv({"j", "k", "re", "im"});
  for (int j = 0; j < mat.M.rows(); ++j)
    for (int k = 0; k < mat.M.cols(); ++k)
      csv.row({Csv::cell(j + 1), Csv::cell(k + 1), Csv::cell(mat.M(j, k).real()),
               Csv::cell(mat.M(j, k).imag())});
  return csv;
}

Csv control_csv(const ControlSignal& u, int n_samples) {
  Csv csv({"t", "u"});
  if (u.is_piecewise()) {
    csv.comment("form=piecewise pieces=" + std::to_string(u.values().size()) +
                " horizon=" + format_number(u.horizon()));
    csv.comment("rows sample each piece at its midpoint unless resampled");
  } else {
    std::string head = "form=trig offset=" + format_number(u.offset()) +
                       " horizon=" + format_number(u.horizon());
    csv.comment(std::move(head));
    for (const auto& term : u.terms())
      csv.comment("term omega=" + format_number(term.omega) + " p=" + format_number(term.p) +
                  " q=" + format_number(term.q));
  }
  if (n_samples <= 0 && u.is_piecewise()) {
    const auto& bp = u.breakpoints();
    for (std::size_t i = 0; i < u.values().size(); ++i) {
      const double t = (bp[i] + bp[i + 1]) / 2;
      csv.row({Csv::cell(t), Csv::cell(u.values()[i])});
    }
    return csv;
  }
  const int n = n_samples > 0 ? n_samples : 1000;
  for (int i = 0; i <= n; ++i) {
    const double t = u.horizon() * i / n;
    csv.row({Csv::cell(t), Csv::cell(u(t))});
  }
  return csv;
}

Csv trajectory_csv(const Trajectory& traj, std::size_t max_rows) {
  const int N = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
  std::vector<std::string> header{"t"};
  for (int k = 1; k <= N; ++k) {
    header.push_back("re_c" + std::to_string(k));
    header.push_back("im_c" + std::to_string(k));
  }
  header.insert(header.end(), {"norm", "h1", "h3"});
  Csv csv(std::move(header));
  const std::size_t stride =
      traj.t.size() <= max_rows ? 1 : (traj.t.size() + max_rows - 1) / max_rows;
  auto emit = [&](std::size_t at) {
    std::vector<std::string> row{Csv::cell(traj.t[at])};
    for (int k = 0; k < N; ++k) {
      row.push_back(Csv::cell(traj.states[at](k).real()));
      row.push_back(Csv::cell(traj.states[at](k).imag()));
    }
    row.push_back(Csv::cell(traj.norm[at]));
    row.push_back(Csv::cell(traj.h1[at]));
    row.push_back(Csv::cell(traj.h3[at]));
    csv.row(std::move(row));
  };
  std::size_t last = 0;
  for (std::size_t i = 0; i < traj.t.size(); i += stride) emit(last = i);
  if (!traj.t.empty() && last != traj.t.size() - 1) emit(traj.t.size() - 1);
  return csv;
}

}  // namespace qgc
