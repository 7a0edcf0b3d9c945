// resid_edf command line: Monte Carlo tables and single-dataset fits.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "resid_edf/data.hpp"
#include "resid_edf/edf.hpp"
#include "resid_edf/errors.hpp"
#include "resid_edf/format.hpp"
#include "resid_edf/harness.hpp"
#include "resid_edf/normtest.hpp"
#include "resid_edf/sample.hpp"
#include "resid_edf/smoother.hpp"

using namespace resid_edf;

namespace {

constexpr int kExitError = 2;

struct SmootherFlags {
  int degree = 1;
  std::string bandwidth = "auto";
  double bandwidth_scale = 1.25;
  double bandwidth_exponent = 0.25;
  std::string units = "covariate";
};

void add_smoother_flags(CLI::App* cmd, SmootherFlags& f, bool fixed_bandwidth) {
  cmd->add_option("--degree", f.degree, "local polynomial degree")->check(CLI::Range(0, 8))->capture_default_str();
  if (fixed_bandwidth) {
    cmd->add_option("--bandwidth", f.bandwidth, "'auto' for the (n log n)^(-exponent) rule, or a number")
        ->capture_default_str();
  }
  cmd->add_option("--bandwidth-scale", f.bandwidth_scale, "constant of the bandwidth rule")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--bandwidth-exponent", f.bandwidth_exponent, "exponent of the bandwidth rule")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--bandwidth-units", f.units, "covariate or unit-cube")
      ->check(CLI::IsMember({"covariate", "unit-cube"}))
      ->capture_default_str();
}

BandwidthScale units_of(const SmootherFlags& f) {
  return f.units == "unit-cube" ? BandwidthScale::UnitCube : BandwidthScale::Covariate;
}

SmootherConfig smoother_config(const SmootherFlags& f, bool partial) {
  SmootherConfig s;
  s.degree = f.degree;
  s.bandwidth_scale = f.bandwidth_scale;
  s.bandwidth_exponent = f.bandwidth_exponent;
  s.bandwidth_units = units_of(f);
  s.imputation = partial ? Imputation::Partial : Imputation::Full;
  return s;
}

// Writes to the file, or to stdout when the path is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw Error("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct DataFit {
  MarSample sample;
  DomainBox domain;
  ProductKernel kernel;
  double bandwidth;
  SmootherOptions options;
};

DataFit load_and_configure(const std::string& path, const SmootherFlags& f) {
  MarSample sample = read_sample_csv_file(path);
  if (sample.size() < 2) throw InsufficientData("need at least two rows in " + path);
  DomainBox domain = DomainBox::bounding(sample);
  const ProductKernel kernel = ProductKernel::for_dimension(sample.dimension());
  double c = 0.0;
  if (f.bandwidth == "auto") {
    c = bandwidth_rule(sample.size(), f.bandwidth_scale, f.bandwidth_exponent);
  } else {
    std::size_t used = 0;
    try {
      c = std::stod(f.bandwidth, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != f.bandwidth.size() || !(c > 0.0)) {
      throw InvalidArgument("--bandwidth must be 'auto' or a positive number");
    }
  }
  SmootherOptions options;
  options.bandwidth_scale = units_of(f);
  return DataFit{std::move(sample), std::move(domain), kernel, c, options};
}

std::string header(const std::string& command, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string h = "# resid_edf " + std::string(version()) + " command=" + command;
  for (const auto& [k, v] : kv) h += " " + k + "=" + v;
  return h;
}

int run_fit(const std::string& data, const SmootherFlags& f, std::size_t grid, const std::string& out) {
  const DataFit d = load_and_configure(data, f);
  if (d.sample.dimension() != 1) throw InvalidArgument("fit: grid output needs one covariate");
  if (grid < 2) throw InvalidArgument("--grid must be at least 2");
  const SmootherFit fit = fit_local_poly(d.sample, f.degree, d.kernel, d.bandwidth, d.domain, d.options);
  Output o(out);
  o.stream() << header("fit", {{"data", data},
                               {"degree", std::to_string(f.degree)},
                               {"bandwidth", format_double(d.bandwidth)},
                               {"bandwidth_units", f.units},
                               {"kernel_exponent", std::to_string(d.kernel.exponent())},
                               {"N", std::to_string(d.sample.complete_count())}})
             << "\nx,rhat\n";
  const double lo = d.domain.lo[0];
  const double hi = d.domain.hi[0];
  for (std::size_t k = 0; k < grid; ++k) {
    const double x = k + 1 == grid ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid - 1);
    o.stream() << format_double(x) << ',' << format_double(fit.evaluate(x)) << '\n';
  }
  o.finish();
  return 0;
}

std::vector<double> residuals_for(const DataFit& d, int degree, bool tuned, bool partial) {
  if (tuned) {
    TunedOptions options;
    options.imputation = partial ? Imputation::Partial : Imputation::Full;
    options.smoother = d.options;
    return residual_values(tuned_residuals(d.sample, degree, d.kernel, d.bandwidth, d.bandwidth, d.domain, options));
  }
  const SmootherFit fit = fit_local_poly(d.sample, degree, d.kernel, d.bandwidth, d.domain, d.options);
  return residual_values(residuals_complete_case(fit, d.sample));
}

int run_edf(const std::string& data, const SmootherFlags& f, bool tuned, bool partial, const std::string& out) {
  const DataFit d = load_and_configure(data, f);
  const EdfEstimate F = EdfEstimate::from_values(residuals_for(d, f.degree, tuned, partial));
  Output o(out);
  o.stream() << header("edf", {{"data", data},
                               {"estimator", tuned ? "tuned" : "complete_case"},
                               {"imputation", partial ? "partial" : "full"},
                               {"degree", std::to_string(f.degree)},
                               {"bandwidth", format_double(d.bandwidth)},
                               {"bandwidth_units", f.units},
                               {"N", std::to_string(F.count())}})
             << '\n';
  F.write_csv(o.stream());
  o.finish();
  return 0;
}

int run_normtest(const std::string& data, const SmootherFlags& f, bool tuned, bool partial, double alpha) {
  const DataFit d = load_and_configure(data, f);
  const std::vector<double> residuals = residuals_for(d, f.degree, tuned, partial);
  const TestResult r = t_statistic(residuals, TransformTables::standard(), alpha);
  const nlohmann::ordered_json summary = {
      {"statistic", r.statistic},   {"critical_value", r.critical_value},
      {"alpha", r.alpha},           {"N", r.n_used},
      {"truncated_points", r.truncated_points}, {"reject", r.reject},
      {"estimator", tuned ? "tuned" : "complete_case"}, {"bandwidth", d.bandwidth}};
  std::cout << summary.dump(2) << '\n';
  return r.reject ? 1 : 0;
}

std::vector<std::size_t> checked_sizes(const std::vector<std::size_t>& n) {
  if (n.empty()) throw InvalidArgument("--n needs at least one sample size");
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residual EDF estimation and normality testing with responses missing at random"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  std::uint64_t seed = 20140101;
  unsigned threads = 0;
  std::string out;

  // mse
  auto* mse = app.add_subcommand("mse", "n*MSE table of the complete-case and tuned residual EDFs");
  std::vector<std::size_t> mse_n{50, 250, 1000};
  std::vector<double> mse_t{-1.5, -1.0, 0.0, 1.0, 1.5};
  std::size_t mse_runs = 1000;
  bool with_large = false;
  bool mse_partial = false;
  std::string mse_law = "n01";
  SmootherFlags mse_smoother;
  mse->add_option("--n", mse_n, "sample sizes")->delimiter(',')->capture_default_str();
  mse->add_option("--t", mse_t, "evaluation points")->delimiter(',')->allow_extra_args(false)->capture_default_str();
  mse->add_option("--runs", mse_runs, "replicates per sample size")->check(CLI::PositiveNumber)->capture_default_str();
  mse->add_option("--law", mse_law, "error law")->check(CLI::IsMember({"n01", "n02", "chisq1", "t4", "laplace"}))
      ->capture_default_str();
  mse->add_flag("--with-10000", with_large, "append the n = 10000 row");
  mse->add_flag("--partial-imputation", mse_partial, "keep observed responses in the tuned estimator");
  add_smoother_flags(mse, mse_smoother, false);

  // power
  auto* power = app.add_subcommand("power", "level and power of the martingale-transform normality tests");
  std::vector<std::string> power_laws{"n02", "chisq1", "t4", "laplace"};
  std::vector<std::size_t> power_n{50, 200};
  std::size_t power_runs = 1000;
  double power_alpha = 0.05;
  bool power_partial = false;
  SmootherFlags power_smoother;
  power->add_option("--laws", power_laws, "error laws")->delimiter(',')
      ->check(CLI::IsMember({"n01", "n02", "chisq1", "t4", "laplace"}))->capture_default_str();
  power->add_option("--n", power_n, "sample sizes")->delimiter(',')->capture_default_str();
  power->add_option("--runs", power_runs, "replicates per cell")->check(CLI::PositiveNumber)->capture_default_str();
  power->add_option("--alpha", power_alpha, "test level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  power->add_flag("--partial-imputation", power_partial, "keep observed responses in the tuned estimator");
  add_smoother_flags(power, power_smoother, false);

  for (auto* cmd : {mse, power}) {
    cmd->add_option("--seed", seed, "master seed")->envname("RESID_EDF_SEED")->capture_default_str();
    cmd->add_option("--threads", threads, "worker threads (0: one per core); output does not depend on it")
        ->capture_default_str();
    cmd->add_option("--out", out, "output CSV (default stdout)");
  }

  // simulate
  auto* simulate = app.add_subcommand("simulate", "draw one sample from the simulation design");
  std::size_t sim_n = 200;
  std::string sim_law = "n01";
  simulate->add_option("--n", sim_n, "sample size")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--law", sim_law, "error law")
      ->check(CLI::IsMember({"n01", "n02", "chisq1", "t4", "laplace"}))
      ->capture_default_str();
  simulate->add_option("--seed", seed, "sample seed")->envname("RESID_EDF_SEED")->capture_default_str();
  simulate->add_option("--out", out, "output CSV (default stdout)");

  // fit / edf / normtest
  std::string data;
  std::size_t grid = 201;
  bool tuned = false;
  bool partial = false;
  double alpha = 0.05;
  SmootherFlags data_smoother;

  auto* fit = app.add_subcommand("fit", "local polynomial fit of a data file on a grid");
  auto* edf = app.add_subcommand("edf", "residual EDF of a data file");
  auto* normtest = app.add_subcommand("normtest", "normality test of the residuals of a data file");
  for (auto* cmd : {fit, edf, normtest}) {
    cmd->add_option("--data", data, "CSV with columns x1..xm,y,delta")->required()->check(CLI::ExistingFile);
    add_smoother_flags(cmd, data_smoother, true);
  }
  fit->add_option("--grid", grid, "grid points across the covariate range")->capture_default_str();
  fit->add_option("--out", out, "output CSV (default stdout)");
  edf->add_option("--out", out, "output CSV (default stdout)");
  for (auto* cmd : {edf, normtest}) {
    cmd->add_flag("--tuned", tuned, "use the two-stage imputation residuals");
    cmd->add_flag("--partial-imputation", partial, "impute only missing responses in the first stage");
  }
  normtest->add_option("--alpha", alpha, "test level")->check(CLI::Range(0.0, 1.0))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*mse) {
      MseConfig cfg;
      cfg.sample_sizes = checked_sizes(mse_n);
      if (with_large) cfg.sample_sizes.push_back(10000);
      cfg.eval_points = mse_t;
      cfg.runs = mse_runs;
      cfg.master_seed = seed;
      cfg.law = parse_law(mse_law);
      cfg.smoother = smoother_config(mse_smoother, mse_partial);
      cfg.threads = threads;
      const TableReport report = run_mse(cfg);
      Output o(out);
      report.write_csv(o.stream());
      o.finish();
      return 0;
    }
    if (*power) {
      PowerConfig cfg;
      cfg.laws.clear();
      for (const auto& name : power_laws) cfg.laws.push_back(parse_law(name));
      cfg.sample_sizes = checked_sizes(power_n);
      cfg.runs = power_runs;
      cfg.alpha = power_alpha;
      cfg.master_seed = seed;
      cfg.smoother = smoother_config(power_smoother, power_partial);
      cfg.threads = threads;
      const TableReport report = run_power(cfg);
      Output o(out);
      report.write_csv(o.stream());
      o.finish();
      return 0;
    }
    if (*simulate) {
      const SimulatedSample sim = generate(SimDesign{sim_n, parse_law(sim_law), seed, std::nullopt});
      Output o(out);
      o.stream() << header("simulate", {{"seed", std::to_string(seed)}, {"n", std::to_string(sim_n)}, {"law", sim_law}})
                 << '\n';
      write_sample_csv(o.stream(), sim.sample);
      o.finish();
      return 0;
    }
    if (*fit) return run_fit(data, data_smoother, grid, out);
    if (*edf) return run_edf(data, data_smoother, tuned, partial, out);
    if (*normtest) return run_normtest(data, data_smoother, tuned, partial, alpha);
  } catch (const std::exception& e) {
    std::cerr << "resid_edf: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
