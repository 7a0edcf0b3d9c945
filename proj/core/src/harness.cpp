#include "resid_edf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "resid_edf/asymptotics.hpp"
#include "resid_edf/errors.hpp"
#include "resid_edf/format.hpp"
#include "resid_edf/smoother.hpp"

#ifndef RESID_EDF_VERSION
#define RESID_EDF_VERSION "0.0.0"
#endif

namespace resid_edf {

namespace {

constexpr std::uint64_t kMseTable = 1;
constexpr std::uint64_t kPowerTable = 2;

template <typename T, typename Fmt>
std::string join(const std::vector<T>& values, Fmt fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += fmt(values[i]);
  }
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  return join(v, [](double x) { return format_double(x); });
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  return join(v, [](std::size_t x) { return std::to_string(x); });
}

std::vector<std::pair<std::string, std::string>> smoother_metadata(const SmootherConfig& s) {
  return {{"degree", std::to_string(s.degree)},
          {"kernel_exponent", std::to_string(s.kernel_exponent)},
          {"bandwidth_scale", format_double(s.bandwidth_scale)},
          {"bandwidth_exponent", format_double(s.bandwidth_exponent)},
          {"bandwidth_units", s.bandwidth_units == BandwidthScale::Covariate ? "covariate" : "unit_cube"},
          {"imputation", s.imputation == Imputation::Full ? "full" : "partial"}};
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Neumaier-compensated mean and standard error, accumulated in index order.
MeanSe mean_and_se(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n == 0) return {std::nan(""), std::nan("")};
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  const double mean = (sum + comp) / static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n))};
}

void check_failures(std::size_t failures, std::size_t runs, double max_fraction,
                    const std::string& cell, const std::vector<ReplicateRecord>& records) {
  if (static_cast<double>(failures) > max_fraction * static_cast<double>(runs)) {
    std::string first;
    for (const auto& r : records) {
      if (!r.ok()) {
        first = r.failure;
        break;
      }
    }
    throw Error("cell " + cell + ": " + std::to_string(failures) + " of " + std::to_string(runs) +
                " replicates failed (first: " + first + ")");
  }
}

}  // namespace

std::string_view version() noexcept { return RESID_EDF_VERSION; }

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(count);
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

double expansion_remainder(std::span<const double> residuals, std::span<const double> errors,
                           const std::function<double(double)>& density, double mode) {
  if (residuals.empty() || residuals.size() != errors.size()) {
    throw InvalidArgument("expansion_remainder: need matching nonempty residuals and errors");
  }
  const double n = static_cast<double>(residuals.size());
  std::vector<double> fitted(residuals.begin(), residuals.end());
  std::vector<double> latent(errors.begin(), errors.end());
  std::sort(fitted.begin(), fitted.end());
  std::sort(latent.begin(), latent.end());
  double mean_error = 0.0;
  for (double e : errors) mean_error += e;
  mean_error /= n;

  auto count_le = [](const std::vector<double>& v, double t) {
    return static_cast<double>(std::upper_bound(v.begin(), v.end(), t) - v.begin());
  };
  auto count_lt = [](const std::vector<double>& v, double t) {
    return static_cast<double>(std::lower_bound(v.begin(), v.end(), t) - v.begin());
  };

  std::vector<double> points = fitted;
  points.insert(points.end(), latent.begin(), latent.end());
  points.push_back(mode);
  double sup = 0.0;
  for (double t : points) {
    const double shift = density(t) * mean_error;
    const double at = (count_le(fitted, t) - count_le(latent, t)) / n - shift;
    const double left = (count_lt(fitted, t) - count_lt(latent, t)) / n - shift;
    sup = std::max({sup, std::abs(at), std::abs(left)});
  }
  return sup;
}

std::string ReplicateRecord::csv_header() const {
  std::string h = "seed,n,law,N,bandwidth";
  for (double t : eval_points) h += ",Fhat_c@" + format_double(t);
  for (double t : eval_points) h += ",Ftilde@" + format_double(t);
  h += ",T_c,T_c_reject,T_iota,T_iota_reject,remainder,failure";
  return h;
}

std::string ReplicateRecord::csv_row() const {
  std::ostringstream os;
  os << seed << ',' << n << ',' << law_name(law) << ',' << complete << ','
     << format_double(bandwidth);
  for (std::size_t i = 0; i < eval_points.size(); ++i) {
    os << ',' << (i < fhat_c.size() ? format_double(fhat_c[i]) : "");
  }
  for (std::size_t i = 0; i < eval_points.size(); ++i) {
    os << ',' << (i < ftilde.size() ? format_double(ftilde[i]) : "");
  }
  auto test_fields = [&](const std::optional<TestResult>& t) {
    if (t) {
      os << ',' << format_double(t->statistic) << ',' << (t->reject ? 1 : 0);
    } else {
      os << ",,";
    }
  };
  test_fields(test_c);
  test_fields(test_tuned);
  os << ',' << (remainder ? format_double(*remainder) : "");
  std::string message = failure;
  std::replace(message.begin(), message.end(), ',', ';');
  std::replace(message.begin(), message.end(), '\n', ' ');
  os << ',' << message;
  return os.str();
}

ReplicateRecord run_single(std::uint64_t seed, const SimDesign& design, const ReplicateOutputs& outputs) {
  ReplicateRecord record;
  record.seed = seed;
  record.n = design.n;
  record.law = design.error_law;
  record.eval_points = outputs.eval_points;
  try {
    SimDesign d = design;
    d.seed = seed;
    const SimulatedSample sim = generate(d);
    const MarSample& sample = sim.sample;
    record.complete = sample.complete_count();

    const SmootherConfig& s = outputs.smoother;
    const ProductKernel kernel(s.kernel_exponent, 1);
    const DomainBox domain = DomainBox::cube(1, -1.0, 1.0);
    const double c = bandwidth_rule(design.n, s.bandwidth_scale, s.bandwidth_exponent);
    record.bandwidth = c;

    SmootherOptions smoother_options;
    smoother_options.bandwidth_scale = s.bandwidth_units;
    const SmootherFit fit = fit_local_poly(sample, s.degree, kernel, c, domain, smoother_options);
    const auto indexed = residuals_complete_case(fit, sample);
    const std::vector<double> residuals = residual_values(indexed);
    const EdfEstimate fhat = EdfEstimate::from_values(residuals);
    for (double t : outputs.eval_points) record.fhat_c.push_back(fhat(t));

    std::vector<double> adjusted;
    if (outputs.tuned) {
      TunedOptions options;
      options.imputation = s.imputation;
      options.smoother = smoother_options;
      adjusted = residual_values(tuned_residuals(sample, s.degree, kernel, c, c, domain, options));
      const EdfEstimate ftilde = EdfEstimate::from_values(adjusted);
      for (double t : outputs.eval_points) record.ftilde.push_back(ftilde(t));
    }

    if (outputs.normtest) {
      const TransformTables& tables = TransformTables::standard();
      record.test_c = t_statistic(residuals, tables, outputs.alpha);
      if (outputs.tuned) record.test_tuned = t_statistic(adjusted, tables, outputs.alpha);
    }

    if (outputs.expansion_remainder) {
      std::vector<double> errors;
      errors.reserve(indexed.size());
      for (const auto& r : indexed) errors.push_back(sim.errors[r.index]);
      const ErrorLawSpec law = ErrorLawSpec::for_law(design.error_law);
      record.remainder = expansion_remainder(residuals, errors, law.pdf);
    }
  } catch (const Error& e) {
    record.failure = e.what();
  }
  return record;
}

const TableCell* TableReport::find(const std::string& row, const std::string& column,
                                   const std::string& estimator) const {
  for (const auto& cell : cells) {
    if (cell.row == row && cell.column == column && cell.estimator == estimator) return &cell;
  }
  return nullptr;
}

void TableReport::write_csv(std::ostream& out) const {
  out << "# resid_edf " << version() << " table=" << kind;
  for (const auto& [key, value] : metadata) out << ' ' << key << '=' << value;
  out << '\n';
  for (std::size_t i = 0; i < column_names.size(); ++i) out << (i ? "," : "") << column_names[i];
  out << '\n';
  for (const auto& c : cells) {
    out << c.row << ',' << c.column << ',' << c.estimator << ',' << format_double(c.value) << ','
        << format_double(c.se) << ',' << c.replicates << ',' << c.failures << '\n';
  }
}

std::string TableReport::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

std::uint64_t mse_replicate_seed(std::uint64_t master, std::size_t n, std::size_t replicate) {
  return derive_seed(master, {kMseTable, n, replicate});
}

std::uint64_t power_replicate_seed(std::uint64_t master, ErrorLaw law, std::size_t n,
                                   std::size_t replicate) {
  return derive_seed(master, {kPowerTable, static_cast<std::uint64_t>(law), n, replicate});
}

std::vector<ReplicateRecord> run_mse_cell(const MseConfig& cfg, std::size_t n,
                                          const ReplicateOutputs& outputs) {
  SimDesign design;
  design.n = n;
  design.error_law = cfg.law;
  std::vector<ReplicateRecord> records(cfg.runs);
  parallel_for(cfg.runs, cfg.threads, [&](std::size_t r) {
    records[r] = run_single(mse_replicate_seed(cfg.master_seed, n, r), design, outputs);
  });
  return records;
}

TableReport run_mse(const MseConfig& cfg) {
  if (cfg.runs < 1) throw InvalidArgument("run_mse: runs must be >= 1");
  if (cfg.sample_sizes.empty() || cfg.eval_points.empty()) {
    throw InvalidArgument("run_mse: need at least one sample size and evaluation point");
  }
  const BasisSpec basis(cfg.smoother.degree, 1);
  for (std::size_t n : cfg.sample_sizes) {
    if (n < 2 * basis.size()) {
      throw InvalidArgument("run_mse: sample size " + std::to_string(n) +
                            " below twice the basis size");
    }
  }

  TableReport report;
  report.kind = "mse";
  report.column_names = {"n", "t", "estimator", "value", "se", "replicates", "failures"};
  report.metadata = {{"seed", std::to_string(cfg.master_seed)},
                     {"runs", std::to_string(cfg.runs)},
                     {"law", std::string(law_name(cfg.law))},
                     {"n", join_sizes(cfg.sample_sizes)},
                     {"t", join_doubles(cfg.eval_points)}};
  for (auto& kv : smoother_metadata(cfg.smoother)) report.metadata.push_back(std::move(kv));

  const ErrorLawSpec law = ErrorLawSpec::for_law(cfg.law);
  ReplicateOutputs outputs;
  outputs.eval_points = cfg.eval_points;
  outputs.tuned = true;
  outputs.smoother = cfg.smoother;

  for (std::size_t n : cfg.sample_sizes) {
    const auto records = run_mse_cell(cfg, n, outputs);
    std::size_t failures = 0;
    for (const auto& r : records) failures += r.ok() ? 0 : 1;
    check_failures(failures, cfg.runs, cfg.max_failure_fraction, "n=" + std::to_string(n), records);

    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < cfg.eval_points.size(); ++i) {
      const double t = cfg.eval_points[i];
      const double truth = law.cdf(t);
      std::vector<double> se_c;
      std::vector<double> se_tilde;
      for (const auto& r : records) {
        if (!r.ok()) continue;
        se_c.push_back(nn * (r.fhat_c[i] - truth) * (r.fhat_c[i] - truth));
        se_tilde.push_back(nn * (r.ftilde[i] - truth) * (r.ftilde[i] - truth));
      }
      const auto c = mean_and_se(se_c);
      const auto tl = mean_and_se(se_tilde);
      const std::string row = std::to_string(n);
      report.cells.push_back({row, format_double(t), "Fhat_c", c.mean, c.se, se_c.size(), failures});
      report.cells.push_back({row, format_double(t), "Ftilde", tl.mean, tl.se, se_tilde.size(), failures});
    }
  }

  const EfficiencyContext ctx(law, e_delta_uniform_logistic());
  for (double t : cfg.eval_points) {
    report.cells.push_back({"true", format_double(t), "asymptotic", asym_variance_F(ctx, t), 0.0, 0, 0});
  }
  return report;
}

TableReport run_power(const PowerConfig& cfg) {
  if (cfg.runs < 1) throw InvalidArgument("run_power: runs must be >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw InvalidArgument("run_power: alpha must lie in (0, 1)");
  if (cfg.laws.empty() || cfg.sample_sizes.empty()) {
    throw InvalidArgument("run_power: need at least one law and sample size");
  }
  const BasisSpec basis(cfg.smoother.degree, 1);
  for (std::size_t n : cfg.sample_sizes) {
    if (n < 2 * basis.size()) {
      throw InvalidArgument("run_power: sample size " + std::to_string(n) +
                            " below twice the basis size");
    }
  }

  TableReport report;
  report.kind = "power";
  report.column_names = {"law", "n", "statistic", "rate", "se", "replicates", "failures"};
  report.metadata = {{"seed", std::to_string(cfg.master_seed)},
                     {"runs", std::to_string(cfg.runs)},
                     {"alpha", format_double(cfg.alpha)},
                     {"laws", join(cfg.laws, [](ErrorLaw l) { return std::string(law_name(l)); })},
                     {"n", join_sizes(cfg.sample_sizes)}};
  for (auto& kv : smoother_metadata(cfg.smoother)) report.metadata.push_back(std::move(kv));

  ReplicateOutputs outputs;
  outputs.tuned = true;
  outputs.normtest = true;
  outputs.alpha = cfg.alpha;
  outputs.smoother = cfg.smoother;

  for (ErrorLaw law : cfg.laws) {
    for (std::size_t n : cfg.sample_sizes) {
      SimDesign design;
      design.n = n;
      design.error_law = law;
      std::vector<ReplicateRecord> records(cfg.runs);
      parallel_for(cfg.runs, cfg.threads, [&](std::size_t r) {
        records[r] = run_single(power_replicate_seed(cfg.master_seed, law, n, r), design, outputs);
      });
      std::size_t failures = 0;
      for (const auto& r : records) failures += r.ok() ? 0 : 1;
      const std::string row(law_name(law));
      check_failures(failures, cfg.runs, cfg.max_failure_fraction,
                     row + ",n=" + std::to_string(n), records);

      std::vector<double> rej_c;
      std::vector<double> rej_tuned;
      for (const auto& r : records) {
        if (!r.ok()) continue;
        rej_c.push_back(r.test_c->reject ? 1.0 : 0.0);
        rej_tuned.push_back(r.test_tuned->reject ? 1.0 : 0.0);
      }
      auto rate = [](const std::vector<double>& v) {
        double k = 0.0;
        for (double x : v) k += x;
        const double p = v.empty() ? std::nan("") : k / static_cast<double>(v.size());
        return MeanSe{p, std::sqrt(p * (1.0 - p) / static_cast<double>(std::max<std::size_t>(v.size(), 1)))};
      };
      const auto c = rate(rej_c);
      const auto tl = rate(rej_tuned);
      report.cells.push_back({row, std::to_string(n), "T_c", c.mean, c.se, rej_c.size(), failures});
      report.cells.push_back({row, std::to_string(n), "T_iota", tl.mean, tl.se, rej_tuned.size(), failures});
    }
  }
  return report;
}

}  // namespace resid_edf
