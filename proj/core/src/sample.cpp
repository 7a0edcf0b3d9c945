#include "resid_edf/sample.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "resid_edf/errors.hpp"
#include "resid_edf/format.hpp"

namespace resid_edf {

MarSample::MarSample(int dimension) : dimension_(dimension) {
  if (dimension < 1) throw InvalidArgument("MarSample: dimension must be >= 1");
}

MarSample::MarSample(int dimension, std::vector<double> covariates,
                     std::vector<std::optional<double>> responses)
    : dimension_(dimension), covariates_(std::move(covariates)), responses_(std::move(responses)) {
  if (dimension < 1) throw InvalidArgument("MarSample: dimension must be >= 1");
  if (covariates_.size() != responses_.size() * static_cast<std::size_t>(dimension)) {
    throw InvalidArgument("MarSample: covariate storage does not match row count");
  }
}

void MarSample::add_row(std::span<const double> x, std::optional<double> y) {
  if (x.size() != static_cast<std::size_t>(dimension_)) {
    throw InvalidArgument("MarSample::add_row: dimension mismatch");
  }
  covariates_.insert(covariates_.end(), x.begin(), x.end());
  responses_.push_back(y);
}

std::span<const double> MarSample::x(std::size_t row) const {
  if (row >= size()) throw InvalidArgument("MarSample::x: row out of range");
  const auto m = static_cast<std::size_t>(dimension_);
  return {covariates_.data() + row * m, m};
}

std::size_t MarSample::complete_count() const noexcept {
  std::size_t n = 0;
  for (const auto& y : responses_) n += y.has_value() ? 1 : 0;
  return n;
}

std::vector<std::size_t> MarSample::complete_rows() const {
  std::vector<std::size_t> rows;
  rows.reserve(size());
  for (std::size_t j = 0; j < responses_.size(); ++j) {
    if (responses_[j]) rows.push_back(j);
  }
  return rows;
}

MarSample MarSample::with_responses(std::span<const double> y) const {
  if (y.size() != size()) throw InvalidArgument("MarSample::with_responses: size mismatch");
  std::vector<std::optional<double>> filled(y.begin(), y.end());
  return MarSample(dimension_, covariates_, std::move(filled));
}

void write_sample_csv(std::ostream& out, const MarSample& sample) {
  const int m = sample.dimension();
  for (int j = 1; j <= m; ++j) out << 'x' << j << ',';
  out << "y,delta\n";
  for (std::size_t row = 0; row < sample.size(); ++row) {
    for (double v : sample.x(row)) out << format_double(v) << ',';
    if (sample.y(row)) out << format_double(*sample.y(row));
    out << ',' << sample.delta(row) << '\n';
  }
}

std::string sample_to_csv(const MarSample& sample) {
  std::ostringstream os;
  write_sample_csv(os, sample);
  return os.str();
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

double parse_double(const std::string& text, std::size_t line_no) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse number '" + text + "'");
  }
  return value;
}

}  // namespace

MarSample read_sample_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    header = split_fields(line);
    break;
  }
  if (header.size() < 3 || header[header.size() - 2] != "y" || header.back() != "delta") {
    throw ParseError("expected header x1,...,xm,y,delta");
  }
  const int m = static_cast<int>(header.size()) - 2;
  for (int j = 0; j < m; ++j) {
    if (header[static_cast<std::size_t>(j)] != "x" + std::to_string(j + 1)) {
      throw ParseError("expected header x1,...,xm,y,delta");
    }
  }

  MarSample sample(m);
  std::vector<double> x(static_cast<std::size_t>(m));
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    for (int j = 0; j < m; ++j) x[static_cast<std::size_t>(j)] = parse_double(fields[static_cast<std::size_t>(j)], line_no);
    const std::string& delta = fields.back();
    const std::string& y = fields[fields.size() - 2];
    if (delta == "1") {
      if (y.empty()) throw ParseError("line " + std::to_string(line_no) + ": delta=1 but y is empty");
      sample.add_row(x, parse_double(y, line_no));
    } else if (delta == "0") {
      if (!y.empty()) throw ParseError("line " + std::to_string(line_no) + ": delta=0 but y is present");
      sample.add_row(x, std::nullopt);
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": delta must be 0 or 1");
    }
  }
  return sample;
}

MarSample read_sample_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_sample_csv(in);
}

}  // namespace resid_edf
