#pragma once

// Deterministic artifact writers: CSV tables (shortest round-trip floats) and
// static SVG line charts rendered straight from the tabulated series.

#include <filesystem>
#include <string>
#include <vector>

namespace qgc {

// shortest representation that round-trips a double, locale-independent
std::string format_number(double v);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);

  Csv& comment(std::string line);            // "# ..." lines above the header
  Csv& row(std::vector<std::string> cells);  // returns *this for chaining
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(int v) { return std::to_string(v); }

  void write(const std::filesystem::path& path) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> comments_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct ChartSpec {
  std::string title, x_label, y_label;
  bool log_x = false, log_y = false;
};

void write_line_chart(const std::filesystem::path& path, const ChartSpec& spec,
                      const std::vector<Series>& series);

// ---- domain-object exports ---------------------------------------------------

class SpectralBasis;
struct CouplingMatrix;
class ControlSignal;
struct Trajectory;

// One row per (mode, supporting edge): k, mu, edge id, cosine and sine
// coefficients.
Csv basis_csv(const SpectralBasis& basis);

// One row per matrix entry: j, k, re, im.
Csv coupling_csv(const CouplingMatrix& mat);

// Sampled control values (t, u) under a symbolic comment header that carries
// the exact form. Piecewise signals default to one midpoint sample per piece,
// which reconstructs them exactly on their uniform grids; n_samples > 0
// forces a uniform sampling for either form.
Csv control_csv(const ControlSignal& u, int n_samples = 0);

// One row per node (thinned to at most max_rows): t, re/im of every mode
// coefficient, norm, and the tracked Sobolev norms.
Csv trajectory_csv(const Trajectory& traj, std::size_t max_rows = 100000);

}  // namespace qgc
