#include "qgc/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qgc/basis.hpp"
#include "qgc/control.hpp"
#include "qgc/core.hpp"
#include "qgc/graph.hpp"
#include "qgc/operator.hpp"
#include "qgc/propagate.hpp"
#include "qgc/report.hpp"
#include "qgc/spectral.hpp"

namespace qgc {
namespace {

// ---- model assembly ---------------------------------------------------------

struct Model {
  SpectralBasis basis;
  ControlOperator B;
  std::string family;
  std::vector<double> lengths;
  CouplingMatrix Bmat;
  Eigen::VectorXd Adiag;
  std::vector<double> mu;
};

Model finish_model(SpectralBasis basis, ControlOperator B, std::string family,
                   std::vector<double> lengths) {
  Model m{std::move(basis), std::move(B), std::move(family), std::move(lengths), {}, {}, {}};
  const int N = m.basis.size();
  m.Bmat = assemble_matrix(m.B, m.basis, N);
  m.mu = m.basis.eigenvalues();
  m.Adiag = Eigen::Map<const Eigen::VectorXd>(m.mu.data(), N);
  return m;
}

Model build_model(const Config& cfg) {
  const std::string family = cfg.get_string("graph.family");
  const int n = cfg.get_int("basis.n_modes");
  if (n < 2) throw ConfigError("basis.n_modes must be at least 2");
  // [[B.term]] blocks replace the family's built-in control operator.
  const bool custom_B = !cfg.block_prefixes("B.term").empty();
  if (family == "tadpole") {
    SpectralBasis basis = tadpole_basis(n);
    ControlOperator B = custom_B ? operator_from_config(basis.graph(), cfg)
                                 : tadpole_control(basis.graph());
    return finish_model(std::move(basis), std::move(B), family, {});
  }
  if (family == "star") {
    std::vector<double> lengths = cfg.get_numbers("graph.lengths");
    if (!custom_B && lengths.size() != 2)
      throw ConfigError("graph.lengths must hold exactly two edge-pair lengths for the star family");
    SpectralBasis basis = star_pair_basis(lengths, n);  // n modes per length class
    ControlOperator B = custom_B ? operator_from_config(basis.graph(), cfg)
                                 : star_control(basis.graph(), lengths);
    return finish_model(std::move(basis), std::move(B), family, std::move(lengths));
  }
  if (family == "chain") {
    const double L = cfg.get_number("graph.length", 1.0);
    try {
      ChainClass cls = chain_class_from_name(cfg.get_string("graph.chain_class", "dirichlet"));
      SpectralBasis basis = uniform_chain_basis(L, cls, n);
      if (custom_B) {
        ControlOperator B = operator_from_config(basis.graph(), cfg);
        return finish_model(std::move(basis), std::move(B), family, {L});
      }
      Profile prof = Profile::parse(cfg.get_string("graph.profile", "x*(1-x)"));
      std::vector<CouplingTerm> terms{{0, 0, prof, 1.0, +1}, {1, 1, prof, 1.0, +1}};
      ControlOperator B(basis.graph(), std::move(terms));
      return finish_model(std::move(basis), std::move(B), family, {L});
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(std::string("chain model: ") + e.what());
    }
  }
  throw ConfigError("unknown graph.family '" + family + "' (expected tadpole, star, or chain)");
}

// ---- run context ------------------------------------------------------------

struct Ctx {
  ScenarioResult res;
  std::filesystem::path dir;
  std::mt19937_64 rng;

  void info(std::string line) { res.info.push_back(std::move(line)); }
  void check(std::string name, bool pass, std::string detail,
             double margin = std::numeric_limits<double>::quiet_NaN(), std::string at = {}) {
    res.checks.push_back(CheckResult{std::move(name), pass, std::move(detail), margin,
                                     std::move(at)});
  }
  void table(const std::string& filename, const Csv& csv) {
    csv.write(dir / filename);
    res.artifacts.push_back(filename);
  }
  void chart(const std::string& filename, const ChartSpec& spec,
             const std::vector<Series>& series) {
    write_line_chart(dir / filename, spec, series);
    res.artifacts.push_back(filename);
  }
};

std::string fmt(double v) { return format_number(v); }

std::vector<double> thin(const std::vector<double>& v, std::size_t cap) {
  if (v.size() <= cap) return v;
  std::vector<double> out;
  const std::size_t stride = (v.size() + cap - 1) / cap;
  for (std::size_t i = 0; i < v.size(); i += stride) out.push_back(v[i]);
  if (out.empty() || out.back() != v.back()) out.push_back(v.back());
  return out;
}

void trajectory_artifacts(Ctx& ctx, const Trajectory& traj, const std::vector<int>& highlight) {
  if (traj.states.empty()) return;
  ctx.table("trajectory.csv", trajectory_csv(traj, 2000));

  std::vector<Series> series;
  const std::vector<double> tx = thin(traj.t, 1200);
  for (int k : highlight) {
    std::vector<double> pop;
    for (const auto& state : traj.states) pop.push_back(std::norm(state(k - 1)));
    series.push_back(Series{"mode " + std::to_string(k), tx, thin(pop, 1200)});
  }
  ctx.chart("populations.svg", ChartSpec{"mode populations", "t", "|c_k|^2", false, false},
            series);
}

// first index i with grid[i+1] = grid[i]/2; -1 when the grid never halves
int first_halving(const std::vector<double>& grid) {
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (std::abs(grid[i + 1] - grid[i] / 2) <= 1e-12 * std::abs(grid[i]))
      return static_cast<int>(i);
  return -1;
}

// ---- energetic transfer -----------------------------------------------------

void run_energetic_transfer(const Config& cfg, const Model& model, Ctx& ctx) {
  const int N = model.basis.size();
  const int src = cfg.get_int("transfer.source", 1);
  const int dst = cfg.get_int("transfer.target", 2);
  if (src < 1 || src > N || dst < 1 || dst > N || src == dst)
    throw ConfigError("transfer.source and transfer.target must be distinct basis indices");
  const double alpha = cfg.get_number("transfer.alpha", kPi / 2);
  const double min_fid = cfg.get_number("transfer.min_fidelity", 0.999);
  const std::vector<double> amps = cfg.get_numbers("transfer.amplitudes");
  const int spp = std::max(20, cfg.get_int("transfer.steps_per_period", 40));

  const std::complex<double> Bjk = model.Bmat.M(dst - 1, src - 1);
  const double w = model.mu[dst - 1] - model.mu[src - 1];
  const double period = 2 * kPi / std::abs(w);
  ctx.info("transition " + std::to_string(src) + " -> " + std::to_string(dst) +
           ": frequency = " + fmt(w) + ", |B| = " + fmt(std::abs(Bjk)));

  Csv table({"amplitude", "horizon", "linf", "bv", "t_linf", "fidelity", "defect"});
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(N);
  psi0(src - 1) = 1;
  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(N);
  phi(dst - 1) = 1;

  std::vector<double> defects, tlinfs;
  double worst_drift = 0;
  Csv fid_summary({"amplitude", "target", "fidelity"});
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double A = amps[i];
    const ControlSignal u = resonant_pulse(dst, src, 0.0, alpha, A, Bjk, w);
    const Budget b = budget_report(u);
    const Trajectory traj = evolve(psi0, u, model.Adiag, model.Bmat.M, period / spp);
    const double F = fidelity(traj.final_state(), phi);
    const double defect = std::sqrt(std::max(0.0, 2 * (1 - F)));
    defects.push_back(defect);
    tlinfs.push_back(b.t_linf);
    worst_drift = std::max(worst_drift, traj.max_norm_drift());
    table.row({Csv::cell(A), Csv::cell(u.horizon()), Csv::cell(b.linf), Csv::cell(b.bv),
               Csv::cell(b.t_linf), Csv::cell(F), Csv::cell(defect)});
    fid_summary.row({Csv::cell(A), "mode " + std::to_string(dst), Csv::cell(F)});
    ctx.info("A = " + fmt(A) + ": T = " + fmt(u.horizon()) + ", fidelity = " + fmt(F) +
             ", defect = " + fmt(defect));
    if (i == 0) {
      ctx.check("final fidelity at amplitude " + fmt(A), F >= min_fid,
                fmt(F) + " >= " + fmt(min_fid), F, "A = " + fmt(A));
      ctx.table("control.csv", control_csv(u, 4096));
      trajectory_artifacts(ctx, traj, {src, dst});
    }
  }
  ctx.table("transfer.csv", table);
  ctx.table("fidelity.csv", fid_summary);
  ctx.chart("fidelity_vs_amplitude.svg",
            ChartSpec{"final fidelity vs drive amplitude", "amplitude", "fidelity", false, false},
            {Series{"fidelity", amps, [&] {
                      std::vector<double> f;
                      for (double d : defects) f.push_back(1 - d * d / 2);
                      return f;
                    }()}});
  ctx.chart("defect_vs_amplitude.svg",
            ChartSpec{"fidelity defect vs drive amplitude", "amplitude", "defect", true, true},
            {Series{"defect", amps, defects},
             Series{"linear reference", amps, [&] {
                      std::vector<double> f;
                      for (double A : amps) f.push_back(defects.front() * A / amps.front());
                      return f;
                    }()}});

  const int h = first_halving(amps);
  if (h >= 0 && defects[h + 1] > 0) {
    const double ratio = defects[h] / defects[h + 1];
    ctx.check("fidelity defect halves with the amplitude", ratio >= 1.4 && ratio <= 2.6,
              "first halving ratio = " + fmt(ratio), ratio);
    for (std::size_t i = h + 1; i + 1 < defects.size(); ++i)
      if (defects[i + 1] > 0)
        ctx.info("further defect ratio " + fmt(amps[i]) + " -> " + fmt(amps[i + 1]) + ": " +
                 fmt(defects[i] / defects[i + 1]));
  }
  const auto [lo, hi] = std::minmax_element(tlinfs.begin(), tlinfs.end());
  ctx.check("time-amplitude product is constant", *hi - *lo <= 1e-9 * *hi,
            "T*linf spread = " + fmt(*hi - *lo) + " around " + fmt(*hi), *hi - *lo);
  ctx.check("propagation preserves the norm", worst_drift <= 1e-10,
            "max drift = " + fmt(worst_drift), worst_drift);
}

// ---- moment control ---------------------------------------------------------

void run_moment_control(const Config& cfg, const Model& model, Ctx& ctx) {
  const int N = model.basis.size();
  const double T = cfg.get_number("moment.horizon", 1.0);
  const int tgt = cfg.get_int("moment.target_mode", 2);
  if (tgt < 2 || tgt > N)
    throw ConfigError("moment.target_mode must lie in [2, basis.n_modes]");
  const std::vector<double> eps = cfg.get_numbers("moment.epsilons");
  const double dt_max = cfg.get_number("moment.dt_max", 1e-3);
  const int samples_cfg = cfg.get_int("moment.samples", 0);

  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(N);
  psi0(0) = 1;

  Csv table({"epsilon", "samples", "lambda", "cond", "max_residual", "reverified",
             "state_error", "error_over_eps2"});
  std::vector<double> errors;
  double worst_resid = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double e = eps[i];
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(N);
    x(tgt - 1) = e;
    const MomentProblem mp =
        MomentProblem::from_targets(model.mu, x, model.Bmat.M.col(0), T, true);
    const int floor_n = moment_sample_floor(mp);
    const int n = samples_cfg > 0 ? std::max(samples_cfg, floor_n) : floor_n;
    const MomentSolution sol = solve_moment_problem(mp, n);
    const double reverified = verify_moments(sol.u, mp);
    worst_resid = std::max({worst_resid, sol.max_residual, reverified});

    const Trajectory traj = evolve(psi0, sol.u, model.Adiag, model.Bmat.M, dt_max);
    Eigen::VectorXcd predicted = psi0 + x;  // first-order target, then free phases
    for (int k = 0; k < N; ++k) predicted(k) *= std::polar(1.0, -model.mu[k] * T);
    const double err = (traj.final_state() - predicted).norm();
    errors.push_back(err);
    table.row({Csv::cell(e), Csv::cell(n), Csv::cell(sol.lambda), Csv::cell(sol.cond),
               Csv::cell(sol.max_residual), Csv::cell(reverified), Csv::cell(err),
               Csv::cell(err / (e * e))});
    ctx.info("epsilon = " + fmt(e) + ": samples = " + std::to_string(n) +
             ", residual = " + fmt(sol.max_residual) + ", state error = " + fmt(err));
    if (i == 0) {
      // the synthesized staircase control, midpoint-sampled (exact on its grid)
      ctx.table("control.csv", control_csv(sol.u));
      const auto& bp = sol.u.breakpoints();
      const auto& vals = sol.u.values();
      std::vector<double> ts, us;
      for (std::size_t p = 0; p < vals.size(); ++p) {
        ts.push_back((bp[p] + bp[p + 1]) / 2);
        us.push_back(vals[p]);
      }
      ctx.chart("control.svg", ChartSpec{"synthesized control", "t", "u(t)", false, false},
                {Series{"u", thin(ts, 1600), thin(us, 1600)}});
      trajectory_artifacts(ctx, traj, {1, tgt});
    }
  }
  ctx.table("moment.csv", table);
  ctx.chart("moment_error.svg",
            ChartSpec{"steering error vs target size", "epsilon", "error", true, true},
            {Series{"state error", eps, errors}, Series{"0.5*eps^2", eps, [&] {
                      std::vector<double> f;
                      for (double e : eps) f.push_back(0.5 * e * e);
                      return f;
                    }()}});

  ctx.check("moment residuals stay small", worst_resid <= 1e-8,
            "max residual = " + fmt(worst_resid), worst_resid);
  bool quad = true;
  double last_ratio = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
  for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
    if (std::abs(eps[i + 1] - eps[i] / 2) > 1e-12 * eps[i]) continue;
    const double ratio = errors[i] / errors[i + 1];
    quad = quad && ratio >= 3.2 && ratio <= 4.8;
    last_ratio = ratio;
    if (!detail.empty()) detail += ", ";
    detail += fmt(ratio);
  }
  ctx.check("steering error is quadratic in the target size", quad && !detail.empty(),
            "halving ratios = " + (detail.empty() ? std::string("n/a") : detail), last_ratio);
  double worst_c = 0;
  for (std::size_t i = 0; i < eps.size(); ++i)
    worst_c = std::max(worst_c, errors[i] / (eps[i] * eps[i]));
  ctx.check("steering error bounded by 0.75*eps^2", worst_c <= 0.75,
            "max error/eps^2 = " + fmt(worst_c), worst_c);
}

// ---- assumption audit -------------------------------------------------------

void run_assumption_audit(const Config& cfg, const Model& model, Ctx& ctx) {
  const int N = model.basis.size();
  const std::vector<double>& mu = model.mu;
  const double eta = cfg.get_number("audit.eta", 1.0);
  const double a = cfg.get_number("audit.a", 0.0);

  // coupling decay + resonance nondegeneracy
  const double rtol = default_resonance_tol(mu);
  const AssumptionIReport rep1 = check_assumption_I(model.Bmat, mu, eta, rtol);
  {
    Csv decay({"k", "mu", "abs_B_k1", "decay_value"});
    std::vector<double> ks, dv;
    for (int k = 1; k <= N; ++k) {
      const double bk1 = std::abs(model.Bmat.M(k - 1, 0));
      decay.row({Csv::cell(k), Csv::cell(mu[k - 1]), Csv::cell(bk1),
                 Csv::cell(rep1.decay_values[k - 1])});
      ks.push_back(k);
      dv.push_back(rep1.decay_values[k - 1]);
    }
    ctx.table("decay.csv", decay);
    ctx.chart("decay.svg",
              ChartSpec{"first-column coupling decay", "k", "|B_k1| * k^(2+eta)", false, false},
              {Series{"decay value", ks, dv}});
  }
  ctx.check("first-column couplings decay no faster than k^-(2+eta)", rep1.decay_pass,
            "min |B_k1| k^(2+eta) = " + fmt(rep1.c_best) + " at k = " + std::to_string(rep1.k_at),
            rep1.c_best, "k = " + std::to_string(rep1.k_at));

  {
    Csv rcsv({"j", "k", "l", "m", "mismatch", "exact", "diag_combo"});
    double min_combo = std::numeric_limits<double>::infinity();
    const ResonanceEntry* worst_entry = nullptr;
    for (const auto& e : rep1.resonances.entries) {
      rcsv.row({Csv::cell(e.j), Csv::cell(e.k), Csv::cell(e.l), Csv::cell(e.m),
                Csv::cell(e.mismatch), std::string(e.exact ? "1" : "0"),
                Csv::cell(e.diag_combo)});
      if (std::abs(e.diag_combo) < min_combo) {
        min_combo = std::abs(e.diag_combo);
        worst_entry = &e;
      }
    }
    ctx.table("resonances.csv", rcsv);
    ctx.info("resonant quadruples within " + fmt(rep1.resonances.tol) + ": " +
             std::to_string(rep1.resonances.entries.size()));
    ctx.check("diagonal combinations clear every resonance", rep1.violations.empty(),
              rep1.resonances.entries.empty()
                  ? "no quadruples to clear"
                  : "min |combo| = " + fmt(min_combo) + ", violations = " +
                        std::to_string(rep1.violations.size()),
              worst_entry ? min_combo : std::numeric_limits<double>::quiet_NaN(),
              worst_entry ? "(" + std::to_string(worst_entry->j) + " " +
                                std::to_string(worst_entry->k) + " " +
                                std::to_string(worst_entry->l) + " " +
                                std::to_string(worst_entry->m) + ")"
                          : std::string{});
  }

  // boundary identities + admissible smoothness window
  const AssumptionIIReport rep2 = check_assumption_II(model.basis, model.B, eta, a);
  ctx.info(std::string("boundary family: ") + boundary_case_name(rep2.bc_case) +
           "; admissible d in [" + fmt(rep2.d_lo) + ", " + fmt(rep2.d_hi) + ")");
  ctx.check("admissible smoothness window is non-empty", !rep2.range_empty,
            "[" + fmt(rep2.d_lo) + ", " + fmt(rep2.d_hi) + ")", rep2.d_hi - rep2.d_lo);
  const double bres = std::max(rep2.max_value_residual, rep2.max_kirchhoff_residual);
  ctx.check("control image satisfies the vertex conditions", bres <= 1e-8,
            "max residual = " + fmt(bres) + " over " + std::to_string(rep2.modes_checked) +
                " modes",
            bres);

  // spectral gaps
  if (cfg.has("audit.delta")) {
    const double delta = cfg.get_number("audit.delta");
    const GapReport gap = check_gap_uniform(mu, delta);
    Csv margins({"k", "margin"});
    std::vector<double> ks, mg;
    for (std::size_t k = 0; k < gap.margins.size(); ++k) {
      margins.row({Csv::cell(static_cast<int>(k + 1)), Csv::cell(gap.margins[k])});
      ks.push_back(static_cast<double>(k + 1));
      mg.push_back(gap.margins[k]);
    }
    ctx.table("gap_margins.csv", margins);
    ctx.chart("gap_margins.svg",
              ChartSpec{"uniform gap margins (M = " + std::to_string(gap.M) + ")", "k",
                        "mu_{k+M} - mu_k - delta*M", false, false},
              {Series{"margin", ks, mg}});
    const auto gmin = std::min_element(gap.margins.begin(), gap.margins.end());
    ctx.check("uniform spectral gap holds at M = " + std::to_string(gap.M), gap.pass,
              "min margin = " + fmt(gap.margins.empty() ? 0.0 : *gmin),
              gap.margins.empty() ? 0.0 : *gmin,
              gap.margins.empty()
                  ? std::string{}
                  : "k = " + std::to_string(gmin - gap.margins.begin() + 1));

    // partition with the smallest M that also bounds the delta-chains: chains
    // of size s force M >= s + 1, and the M-gap condition must still hold there
    int run = 1, maxchain = 1;
    for (std::size_t k = 0; k + 1 < mu.size(); ++k) {
      run = (mu[k + 1] - mu[k] < delta) ? run + 1 : 1;
      maxchain = std::max(maxchain, run);
    }
    const int Mp = std::max(gap.M, maxchain == 1 ? 1 : maxchain + 1);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k + Mp < static_cast<int>(mu.size()); ++k)
      worst = std::min(worst, mu[k + Mp] - mu[k] - delta * Mp);
    if (Mp < static_cast<int>(mu.size()) && worst > 0) {
      const ClassPartition part = partition_classes(mu, delta, Mp);
      ctx.check("eigenvalues partition into gap classes", true,
                std::to_string(part.classes.size()) + " classes of size <= " +
                    std::to_string(maxchain) + " at M = " + std::to_string(Mp),
                worst, "M = " + std::to_string(Mp));
    } else {
      ctx.check("eigenvalues partition into gap classes", false,
                "no M reconciles the gap condition with the delta-chains at delta = " +
                    fmt(delta));
    }
  }
  const double d_tilde = cfg.get_number("audit.d_tilde", 1.0);
  const GapPolynomialReport gp = check_gap_polynomial(mu, d_tilde);
  ctx.check("polynomial gap constant is positive (d = " + fmt(d_tilde) + ")", gp.pass,
            "c = " + fmt(gp.c_best) + " at k = " + std::to_string(gp.k_at), gp.c_best,
            "k = " + std::to_string(gp.k_at));

  // mixed-length-class separation (multi-class spectra only)
  bool multiclass = false;
  for (int k = 1; k <= N; ++k) multiclass = multiclass || model.basis.mode(k).length_class > 1;
  if (multiclass) {
    const double mtol = cfg.get_number("audit.resonance_tol", 1e-6);
    auto mixed_of = [&](const ResonanceTable& tab) {
      std::vector<const ResonanceEntry*> mixed;
      for (const auto& e : tab.entries) {
        const int c0 = model.basis.mode(e.j).length_class;
        if (model.basis.mode(e.k).length_class != c0 ||
            model.basis.mode(e.l).length_class != c0 ||
            model.basis.mode(e.m).length_class != c0)
          mixed.push_back(&e);
      }
      return mixed;
    };
    const auto close = mixed_of(find_resonances(mu, N, mtol));
    const auto wide = mixed_of(find_resonances(mu, N, std::max(mtol, 1e-2)));
    double margin = std::numeric_limits<double>::infinity();
    for (const auto* e : wide) margin = std::min(margin, e->mismatch);
    ctx.check("no mixed-class resonances within " + fmt(mtol), close.empty(),
              wide.empty() ? "no mixed-class quadruple within 1e-2"
                           : "closest mixed-class mismatch = " + fmt(margin),
              wide.empty() ? std::numeric_limits<double>::quiet_NaN() : margin);
  }
}

// ---- perturbation scan ------------------------------------------------------

void run_perturbation_scan(const Config& cfg, const Model& model, Ctx& ctx) {
  const int N = model.basis.size();
  const std::vector<double> grid = cfg.get_numbers("perturbation.u0_grid");
  const double tol = cfg.get_number("perturbation.tol", 1e-8);

  const NondegeneracyReport rep = scan_nondegeneracy(model.Adiag, model.Bmat.M, grid, N, tol);
  Csv scan({"u0", "min_quadruple", "min_coupling", "coupling_k", "pass"});
  std::vector<double> mq, mc;
  for (const auto& row : rep.rows) {
    scan.row({Csv::cell(row.u0), Csv::cell(row.min_quadruple), Csv::cell(row.min_coupling),
              Csv::cell(row.coupling_k), std::string(row.pass ? "1" : "0")});
    mq.push_back(row.min_quadruple);
    mc.push_back(row.min_coupling);
  }
  ctx.table("nondegeneracy.csv", scan);
  ctx.info("exact resonance quadruples in the unperturbed spectrum: " +
           std::to_string(rep.n_quadruples));
  const auto mq_min = std::min_element(mq.begin(), mq.end());
  ctx.check("perturbed spectra clear the resonances on the whole grid", rep.pass,
            "worst min quadruple = " + fmt(*mq_min) + ", worst min coupling = " +
                fmt(*std::min_element(mc.begin(), mc.end())),
            *mq_min, "u0 = " + fmt(grid[static_cast<std::size_t>(mq_min - mq.begin())]));

  // first-order eigenvalue slopes against the diagonal couplings
  std::vector<double> maxdef;
  for (double u0 : grid) {
    const PerturbedSpectrum ps = perturbed_spectrum(model.Adiag, model.Bmat.M, u0, N);
    double worst = 0;
    for (int k = 0; k < N; ++k) {
      const double slope = (ps.mu(k) - model.mu[k]) / u0;
      worst = std::max(worst, std::abs(slope - model.Bmat.M(k, k).real()));
    }
    maxdef.push_back(worst);
  }
  {
    const double u0 = *std::min_element(grid.begin(), grid.end());
    const PerturbedSpectrum ps = perturbed_spectrum(model.Adiag, model.Bmat.M, u0, N);
    Csv slopes({"k", "B_kk", "slope", "defect"});
    for (int k = 0; k < N; ++k) {
      const double slope = (ps.mu(k) - model.mu[k]) / u0;
      slopes.row({Csv::cell(k + 1), Csv::cell(model.Bmat.M(k, k).real()), Csv::cell(slope),
                  Csv::cell(std::abs(slope - model.Bmat.M(k, k).real()))});
    }
    ctx.table("slopes.csv", slopes);
  }
  Csv defects({"u0", "max_slope_defect"});
  for (std::size_t i = 0; i < grid.size(); ++i)
    defects.row({Csv::cell(grid[i]), Csv::cell(maxdef[i])});
  ctx.table("slope_defects.csv", defects);
  ctx.chart("perturbation.svg",
            ChartSpec{"perturbation scan", "u0", "value", true, true},
            {Series{"min coupling", grid, mc}, Series{"max slope defect", grid, maxdef}});

  const int h = first_halving(grid);
  if (h >= 0 && maxdef[h + 1] > 0) {
    const double ratio = maxdef[h] / maxdef[h + 1];
    ctx.check("eigenvalue slopes converge to the diagonal at first order",
              ratio >= 1.4 && ratio <= 2.6, "first halving ratio = " + fmt(ratio), ratio);
  }
}

// ---- lie audit --------------------------------------------------------------

void run_lie_audit(const Config& cfg, const Model& model, Ctx& ctx) {
  const int N = model.basis.size();
  const std::vector<double> dims_raw = cfg.get_numbers("lie.dims");
  const double ctol = cfg.get_number("lie.coupling_tol", 1e-12);

  Csv ranks({"N", "admissible_pairs", "rank", "su_dimension", "full"});
  std::vector<double> xs, rk, su;
  bool all_full = true;
  std::string detail;
  for (double draw : dims_raw) {
    const int n = static_cast<int>(std::lround(draw));
    if (n < 2 || n > N) throw ConfigError("lie.dims entries must lie in [2, basis.n_modes]");
    const CouplingMatrix sub{model.Bmat.M.topLeftCorner(n, n), model.Bmat.hermiticity_defect};
    const std::vector<double> mu_n(model.mu.begin(), model.mu.begin() + n);
    const GeneratorSet gens = admissible_generators(sub, mu_n, n, ctol);
    const int rank = lie_closure_rank(gens, n);
    const bool full = rank == n * n - 1;
    all_full = all_full && full;
    ranks.row({Csv::cell(n), Csv::cell(static_cast<int>(gens.pairs.size())), Csv::cell(rank),
               Csv::cell(n * n - 1), std::string(full ? "1" : "0")});
    xs.push_back(n);
    rk.push_back(rank);
    su.push_back(n * n - 1);
    if (!detail.empty()) detail += ", ";
    detail += std::to_string(rank) + "/" + std::to_string(n * n - 1);
  }
  ctx.table("ranks.csv", ranks);
  ctx.chart("ranks.svg", ChartSpec{"Lie closure rank", "N", "rank", false, false},
            {Series{"closure rank", xs, rk}, Series{"su(N) dimension", xs, su}});
  ctx.check("closure reaches the full traceless dimension", all_full, detail);

  const GeneratorSet single{{{1, 2}}, 3};
  const int restricted = lie_closure_rank(single, 3);
  ctx.check("a single coupled pair stays strictly below full rank", restricted < 8,
            "rank = " + std::to_string(restricted) + " < 8", restricted, "N = 3");

  // seeded rotation-plan reconstruction
  const int rdim = cfg.get_int("lie.rotation_dim", 4);
  const int rsamples = cfg.get_int("lie.rotation_samples", 3);
  if (rdim < 2) throw ConfigError("lie.rotation_dim must be at least 2");
  Csv rot({"sample", "factors", "max_error"});
  double worst = 0;
  for (int s = 1; s <= rsamples; ++s) {
    const Eigen::MatrixXcd U = haar_special_unitary(rdim, ctx.rng);
    const RotationPlan plan = plan_rotations(U);
    const double err = (reconstruct_rotations(plan, rdim) - U).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    rot.row({Csv::cell(s), Csv::cell(static_cast<int>(plan.factors.size())), Csv::cell(err)});
  }
  ctx.table("rotations.csv", rot);
  ctx.check("rotation plans reconstruct their targets", worst <= 1e-10,
            "max entry error = " + fmt(worst) + " over " + std::to_string(rsamples) +
                " seeded targets",
            worst, "dim = " + std::to_string(rdim));
}

// ---- orchestration ----------------------------------------------------------

void echo_config(const Config& cfg, Ctx& ctx) {
  for (const auto& [key, raw] : cfg.entries()) {
    std::string line = key + " = " + raw;
    try {
      const std::vector<double> parsed = cfg.get_numbers(key);
      std::string shown;
      for (std::size_t i = 0; i < parsed.size(); ++i) {
        if (i) shown += ", ";
        shown += format_number(parsed[i]);
      }
      if (shown != raw) line += "  -> " + shown;
    } catch (const ConfigError&) {
      // non-numeric value; echo verbatim
    }
    ctx.res.config_echo.push_back(std::move(line));
  }
}

ScenarioResult run_impl(const Config& cfg, const ScenarioOptions& opt, bool audit_only) {
  const std::string kind = cfg.get_string("scenario.kind");
  const std::string name = cfg.get_string("scenario.name");
  static const std::vector<std::string> kinds{"energetic_transfer", "moment_control",
                                              "assumption_audit", "perturbation_scan",
                                              "lie_audit"};
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
    throw ConfigError(cfg.origin() + ": unknown scenario.kind '" + kind + "'");

  // The audit slice runs the assumption checks of any scenario config; it
  // reports under the canonical kind and a suffixed name so its artifacts
  // never collide with the full run's.
  const bool audit_rename = audit_only && kind != "assumption_audit";
  Ctx ctx;
  ctx.res.name = audit_rename ? name + "_audit" : name;
  ctx.res.kind = audit_only ? "assumption_audit" : kind;

  const long long seed =
      opt.seed ? *opt.seed : static_cast<long long>(cfg.get_number("scenario.seed", 1));
  ctx.rng.seed(static_cast<std::uint64_t>(seed));

  std::string dir = opt.out_dir ? *opt.out_dir
                                : cfg.get_string("output.dir", "out/" + name);
  if (audit_rename && !opt.out_dir) dir += "_audit";
  ctx.dir = dir;
  ctx.res.out_dir = ctx.dir;
  std::filesystem::create_directories(ctx.dir);

  echo_config(cfg, ctx);
  ctx.info("seed = " + std::to_string(seed));
  if (audit_rename) ctx.info("audit slice of the '" + kind + "' configuration");

  const Model model = build_model(cfg);
  ctx.info("model: " + model.family + " family, " + std::to_string(model.basis.size()) +
           " modes, eigenvalues in [" + fmt(model.mu.front()) + ", " + fmt(model.mu.back()) +
           "], hermiticity defect = " + fmt(model.Bmat.hermiticity_defect));
  ctx.table("basis.csv", basis_csv(model.basis));
  ctx.table("coupling.csv", coupling_csv(model.Bmat));

  if (audit_only || kind == "assumption_audit")
    run_assumption_audit(cfg, model, ctx);
  else if (kind == "energetic_transfer")
    run_energetic_transfer(cfg, model, ctx);
  else if (kind == "moment_control")
    run_moment_control(cfg, model, ctx);
  else if (kind == "perturbation_scan")
    run_perturbation_scan(cfg, model, ctx);
  else
    run_lie_audit(cfg, model, ctx);

  // one row per check: margin and attaining index where the check has them
  Csv checks({"check", "pass", "margin", "at"});
  for (const auto& c : ctx.res.checks)
    checks.row({c.name, std::string(c.pass ? "1" : "0"),
                std::isnan(c.margin) ? std::string{} : fmt(c.margin), c.at});
  ctx.table("checks.csv", checks);

  ctx.res.artifacts.insert(ctx.res.artifacts.begin(), "summary.txt");
  std::ofstream summary(ctx.dir / "summary.txt", std::ios::binary);
  if (!summary) throw Error("cannot write " + (ctx.dir / "summary.txt").string());
  summary << render_text(ctx.res);
  return ctx.res;
}

}  // namespace

// ---- public surface ---------------------------------------------------------

bool ScenarioResult::passed() const {
  if (checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

Config load_scenario_config(const std::string& ref) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(ref, ec)) return Config::parse_file(ref);
  for (const auto& [name, text] : bundled_scenarios())
    if (name == ref) return Config::parse_string(text, "bundled:" + name);
  throw ConfigError("'" + ref + "' is neither a config file nor a bundled scenario name (see `qgc list`)");
}

ScenarioResult run_scenario(const Config& cfg, const ScenarioOptions& opt) {
  return run_impl(cfg, opt, false);
}

ScenarioResult run_audit(const Config& cfg, const ScenarioOptions& opt) {
  return run_impl(cfg, opt, true);
}

std::vector<CatalogEntry> list_scenarios() {
  std::vector<CatalogEntry> cat;
  for (const auto& [name, text] : bundled_scenarios()) {
    const Config cfg = Config::parse_string(text, "bundled:" + name);
    std::string title;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const auto pos = line.find_first_not_of(" \t");
      if (pos == std::string::npos) continue;
      if (line[pos] == '#') {
        title = line.substr(line.find_first_not_of(" \t#", pos));
        break;
      }
      break;  // first non-blank line is not a comment
    }
    cat.push_back(CatalogEntry{name, cfg.get_string("scenario.kind", "?"), title});
  }
  return cat;
}

std::string render_text(const ScenarioResult& r) {
  std::ostringstream out;
  out << "scenario " << r.name << " (" << r.kind << ")\n";
  out << "output " << r.out_dir.generic_string() << "\n";
  out << "\nconfig:\n";
  for (const auto& line : r.config_echo) out << "  " << line << "\n";
  out << "\ninfo:\n";
  for (const auto& line : r.info) out << "  " << line << "\n";
  out << "\nchecks:\n";
  int npass = 0;
  for (const auto& c : r.checks) {
    out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": " << c.detail << "\n";
    npass += c.pass ? 1 : 0;
  }
  out << "\nartifacts:\n";
  for (const auto& a : r.artifacts) out << "  " << a << "\n";
  out << "\nresult: " << (r.passed() ? "PASS" : "FAIL") << " (" << npass << "/"
      << r.checks.size() << " checks passed)\n";
  return out.str();
}

std::string render_json(const ScenarioResult& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["kind"] = r.kind;
  j["out_dir"] = r.out_dir.generic_string();
  j["config"] = r.config_echo;
  j["info"] = r.info;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json jc{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}};
    if (std::isfinite(c.margin)) jc["margin"] = c.margin;
    if (!c.at.empty()) jc["at"] = c.at;
    j["checks"].push_back(std::move(jc));
  }
  j["artifacts"] = r.artifacts;
  j["pass"] = r.passed();
  return j.dump(2) + "\n";
}

std::string render_catalog_text(const std::vector<CatalogEntry>& cat) {
  std::size_t w = 0;
  for (const auto& e : cat) w = std::max(w, e.name.size());
  std::ostringstream out;
  for (const auto& e : cat) {
    out << e.name << std::string(w - e.name.size() + 2, ' ') << "[" << e.kind << "]";
    if (!e.title.empty()) out << "  " << e.title;
    out << "\n";
  }
  return out.str();
}

std::string render_catalog_json(const std::vector<CatalogEntry>& cat) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& e : cat)
    j.push_back({{"name", e.name}, {"kind", e.kind}, {"title", e.title}});
  return j.dump(2) + "\n";
}

}  // namespace qgc
