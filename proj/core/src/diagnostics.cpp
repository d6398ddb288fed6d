#include "skt/diagnostics.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "skt/io.hpp"

namespace skt {

void ReferenceMoments::validate() const {
  const Index d = mean_x.size();
  if (d == 0) throw ConfigError("reference moments are empty");
  if (var_x.size() != d || mean_x2.size() != d || var_x2.size() != d)
    throw ConfigError("reference moment fields have inconsistent lengths");
  for (Index k = 0; k < d; ++k) {
    if (!(var_x(k) > 0.0) || !(var_x2(k) > 0.0))
      throw ConfigError("reference variance is not positive in dimension " + std::to_string(k));
    if (!std::isfinite(mean_x(k)) || !std::isfinite(mean_x2(k)) || !std::isfinite(var_x(k)) ||
        !std::isfinite(var_x2(k)))
      throw ConfigError("reference moment is not finite in dimension " + std::to_string(k));
  }
}

BiasReport squared_bias(const RowMatrix& ensemble, const ReferenceMoments& ref) {
  ref.validate();
  const Index d = ref.dim();
  if (ensemble.cols() != d)
    throw ConfigError("ensemble has " + std::to_string(ensemble.cols()) +
                      " dimensions but the reference has " + std::to_string(d));
  if (ensemble.rows() == 0) throw ConfigError("ensemble is empty");
  const double n = static_cast<double>(ensemble.rows());
  const Vector m1 = ensemble.colwise().sum().transpose() / n;
  const Vector m2 = ensemble.array().square().colwise().sum().transpose() / n;

  BiasReport r;
  r.per_dim_b1 = (m1 - ref.mean_x).array().square() / ref.var_x.array();
  r.per_dim_b2 = (m2 - ref.mean_x2).array().square() / ref.var_x2.array();
  r.b1_sq = r.per_dim_b1.mean();
  r.b2_sq = r.per_dim_b2.mean();
  return r;
}

ReferenceMoments reference_from_samples(const RowMatrix& samples, Index min_samples) {
  if (samples.rows() < min_samples)
    throw ConfigError("reference needs at least " + std::to_string(min_samples) + " samples, got " +
                      std::to_string(samples.rows()));
  if (samples.rows() < 2) throw ConfigError("reference needs at least 2 samples");
  const double n = static_cast<double>(samples.rows());
  auto moments = [n](const RowMatrix& s, Vector& mean, Vector& var) {
    mean = s.colwise().sum().transpose() / n;
    const RowMatrix c = s.rowwise() - mean.transpose();
    var = c.array().square().colwise().sum().transpose() / (n - 1.0);
  };
  ReferenceMoments ref;
  moments(samples, ref.mean_x, ref.var_x);
  const RowMatrix sq = samples.array().square();
  moments(sq, ref.mean_x2, ref.var_x2);
  ref.validate();
  return ref;
}

ReferenceMoments reference_from_chain(const std::filesystem::path& path, Index min_samples) {
  return reference_from_samples(io::read_ensemble_csv(path), min_samples);
}

ReferenceMoments gaussian_reference(const Vector& mean, const Vector& var) {
  ReferenceMoments ref;
  ref.mean_x = mean;
  ref.var_x = var;
  ref.mean_x2 = mean.array().square() + var.array();
  ref.var_x2 = 4.0 * mean.array().square() * var.array() + 2.0 * var.array().square();
  ref.validate();
  return ref;
}

void write_reference_moments(const std::filesystem::path& path, const ReferenceMoments& ref) {
  ref.validate();
  std::string text = "dim,mean_x,var_x,mean_x2,var_x2\n";
  for (Index k = 0; k < ref.dim(); ++k) {
    text += std::to_string(k) + ',' + io::format_double(ref.mean_x(k)) + ',' +
            io::format_double(ref.var_x(k)) + ',' + io::format_double(ref.mean_x2(k)) + ',' +
            io::format_double(ref.var_x2(k)) + '\n';
  }
  io::write_text(path, text);
}

namespace {

double parse_field(const std::string& field, const std::filesystem::path& path, std::size_t line) {
  std::size_t b = 0, e = field.size();
  while (b < e && (field[b] == ' ' || field[b] == '\t')) ++b;
  while (e > b && (field[e - 1] == ' ' || field[e - 1] == '\t' || field[e - 1] == '\r')) --e;
  double v = 0.0;
  const char* first = field.data() + b;
  const char* last = field.data() + e;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (b == e || ec != std::errc() || ptr != last)
    throw IoError(path.string() + ":" + std::to_string(line) + ": cannot parse number '" +
                  field.substr(b, e - b) + "'");
  return v;
}

}  // namespace

ReferenceMoments read_reference_moments(const std::filesystem::path& path) {
  std::istringstream in(io::read_text(path));
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw IoError(path.string() + ":1: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "dim,mean_x,var_x,mean_x2,var_x2")
    throw IoError(path.string() + ":1: expected header 'dim,mean_x,var_x,mean_x2,var_x2'");

  std::vector<std::array<double, 4>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 5)
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 5 fields, found " +
                    std::to_string(fields.size()));
    const double dim = parse_field(fields[0], path, lineno);
    if (dim != static_cast<double>(rows.size()))
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected dim " +
                    std::to_string(rows.size()));
    rows.push_back({parse_field(fields[1], path, lineno), parse_field(fields[2], path, lineno),
                    parse_field(fields[3], path, lineno), parse_field(fields[4], path, lineno)});
  }
  const auto d = static_cast<Index>(rows.size());
  ReferenceMoments ref{Vector(d), Vector(d), Vector(d), Vector(d)};
  for (Index k = 0; k < d; ++k) {
    const auto& r = rows[static_cast<std::size_t>(k)];
    ref.mean_x(k) = r[0];
    ref.var_x(k) = r[1];
    ref.mean_x2(k) = r[2];
    ref.var_x2(k) = r[3];
  }
  ref.validate();
  return ref;
}

std::string bias_report_json(const BiasReport& report) {
  nlohmann::ordered_json j;
  j["b1_sq"] = report.b1_sq;
  j["b2_sq"] = report.b2_sq;
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (Index k = 0; k < report.per_dim_b1.size(); ++k) {
    nlohmann::ordered_json e;
    e["dim"] = k;
    e["b1_sq"] = report.per_dim_b1(k);
    e["b2_sq"] = report.per_dim_b2(k);
    per.push_back(e);
  }
  j["per_dim"] = per;
  j["low_bias"] = report.low_bias();
  return j.dump(2) + "\n";
}

Matrix reconstruct_field(const RowMatrix& ensemble, const models::BenchmarkModel& model) {
  if (ensemble.rows() == 0) throw ConfigError("cannot reconstruct a field from an empty ensemble");
  if (ensemble.cols() != model.spec.dim)
    throw ConfigError("ensemble dimension does not match model " + model.spec.name);
  const Index size = model.field_rows * model.field_cols;
  Vector acc = Vector::Zero(size);
  for (Index i = 0; i < ensemble.rows(); ++i) {
    const Vector f = model.field(ensemble.row(i).transpose());
    if (f.size() != size) throw ConfigError("field size does not match the model's grid shape");
    acc += f;
  }
  acc /= static_cast<double>(ensemble.rows());
  Matrix grid(model.field_rows, model.field_cols);
  for (Index r = 0; r < model.field_rows; ++r)
    for (Index c = 0; c < model.field_cols; ++c) grid(r, c) = acc(r * model.field_cols + c);
  return grid;
}

}  // namespace skt
