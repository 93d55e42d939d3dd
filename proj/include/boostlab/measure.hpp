#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "boostlab/errors.hpp"
#include "boostlab/numeric.hpp"

namespace boostlab {

// Labeled training set over {-1,+1}. Features are stored row-major.
class TrainingSet {
 public:
  TrainingSet() = default;
  TrainingSet(std::vector<double> features, std::vector<int> labels, std::size_t dimension)
      : features_(std::move(features)), labels_(std::move(labels)), dimension_(dimension) {
    if (labels_.empty()) throw ConfigError("training set must contain at least one example");
    if (dimension_ == 0) throw ConfigError("training set dimension must be positive");
    if (features_.size() != labels_.size() * dimension_)
      throw ConfigError("feature matrix shape does not match label count");
    for (const int y : labels_)
      if (y != 1 && y != -1) throw ConfigError("labels must be -1 or +1");
  }

  std::size_t size() const { return labels_.size(); }
  std::size_t dimension() const { return dimension_; }

  std::span<const double> point(std::size_t i) const {
    return {features_.data() + i * dimension_, dimension_};
  }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const { return labels_; }

  // CSV rows are feature columns followed by one label column in {-1,+1}
  // ({0,1} is accepted with 0 mapped to -1). An optional header row is
  // detected by a non-numeric first field.
  static TrainingSet from_csv(std::istream& in);
  void to_csv(std::ostream& out) const;

 private:
  std::vector<double> features_;
  std::vector<int> labels_;
  std::size_t dimension_ = 0;
};

// Nonnegative weight vector over the training indices, entries in [0,1].
class Measure {
 public:
  Measure() = default;

  explicit Measure(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw ConfigError("measure must have at least one entry");
    for (const double v : w_)
      if (!(v >= 0.0) || v > 1.0 + 1e-12)
        throw ConfigError("measure entries must lie in [0,1]");
  }

  static Measure uniform(std::size_t m, double value) {
    return Measure(std::vector<double>(m, value));
  }

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> entries() const { return w_; }

  double weight() const { return kahan_total(w_); }
  double density() const { return weight() / static_cast<double>(w_.size()); }

 private:
  std::vector<double> w_;
};

inline double density(const Measure& m) { return m.density(); }

// Probability vector whose largest entry is at most 1/(epsilon*m).
class SmoothDistribution {
 public:
  SmoothDistribution(std::vector<double> probs, double epsilon)
      : p_(std::move(probs)), epsilon_(epsilon) {
    if (p_.empty()) throw ConfigError("distribution must have at least one entry");
    if (!(epsilon_ > 0.0) || epsilon_ > 1.0)
      throw ConfigError("smoothness parameter must lie in (0,1]");
    const double m = static_cast<double>(p_.size());
    const double cap = 1.0 / (epsilon_ * m) + 1e-12;
    KahanSum total;
    for (const double v : p_) {
      if (!(v >= 0.0)) throw ConfigError("distribution entries must be nonnegative");
      if (v > cap) throw ConfigError("distribution violates the smoothness cap");
      total.add(v);
    }
    if (std::abs(total.value() - 1.0) > 1e-10)
      throw ConfigError("distribution entries must sum to 1");
  }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> probs() const { return p_; }
  double epsilon() const { return epsilon_; }

 private:
  std::vector<double> p_;
  double epsilon_;
};

// D(x) = M(x)/|M|. A measure of density >= epsilon normalizes to an
// epsilon-smooth distribution, so the constructor check passes exactly.
inline SmoothDistribution normalize(const Measure& m, double epsilon) {
  const double w = m.weight();
  if (w <= 0.0) throw ZeroWeight("cannot normalize a measure of zero weight");
  std::vector<double> p(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) p[i] = m[i] / w;
  return SmoothDistribution(std::move(p), epsilon);
}

namespace detail {

// sum of a*log(a/b) + b - a over entries; 0*log0 = 0.
inline double kl_kernel(std::span<const double> a, std::span<const double> b,
                        bool include_linear_terms) {
  KahanSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > 0.0) {
      if (b[i] <= 0.0)
        throw SupportViolation("left measure puts weight outside the right measure's support");
      acc.add(a[i] * std::log(a[i] / b[i]));
    }
    if (include_linear_terms) acc.add(b[i] - a[i]);
  }
  return acc.value();
}

}  // namespace detail

// Unnormalized divergence between measures:
//   KL(M||N) = sum_x M(x) log(M(x)/N(x)) + N(x) - M(x).
inline double kl_measures(const Measure& m, const Measure& n) {
  if (m.size() != n.size()) throw ConfigError("measures must share an index set");
  return detail::kl_kernel(m.entries(), n.entries(), true);
}

inline double relative_entropy(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("distributions must share an index set");
  return detail::kl_kernel(a, b, false);
}

inline double relative_entropy(const SmoothDistribution& a, const SmoothDistribution& b) {
  return relative_entropy(a.probs(), b.probs());
}

// KL(A||B) - [|A| RE(D_A||D_B) + |A| log(|A|/|B|) + |B| - |A|].
// The identity holds exactly, so this exists as a test oracle: the result
// must vanish (|residual| <= 1e-10) for every valid input pair.
inline double kl_re_identity_residual(const Measure& a, const Measure& b) {
  const double wa = a.weight();
  const double wb = b.weight();
  if (wa <= 0.0 || wb <= 0.0) throw ZeroWeight("identity requires positive weights");
  std::vector<double> da(a.size()), db(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) da[i] = a[i] / wa;
  for (std::size_t i = 0; i < b.size(); ++i) db[i] = b[i] / wb;
  const double lhs = kl_measures(a, b);
  const double rhs = wa * relative_entropy(std::span<const double>(da),
                                           std::span<const double>(db)) +
                     wa * std::log(wa / wb) + wb - wa;
  return lhs - rhs;
}

// ---- CSV ----------------------------------------------------------------

namespace detail {

inline bool parse_double(const std::string& field, double* out) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    while (pos < field.size() && std::isspace(static_cast<unsigned char>(field[pos]))) ++pos;
    if (pos != field.size()) return false;
    *out = v;
    return true;
  } catch (...) {
    return false;
  }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
  }
  return fields;
}

}  // namespace detail

inline TrainingSet TrainingSet::from_csv(std::istream& in) {
  std::vector<double> features;
  std::vector<int> labels;
  std::size_t dimension = 0;
  std::string line;
  std::size_t lineno = 0;
  bool first_data_row = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = detail::split_csv_line(line);
    if (first_data_row) {
      double probe;
      if (!detail::parse_double(fields.front(), &probe)) continue;  // header row
    }
    if (fields.size() < 2)
      throw ConfigError("csv line " + std::to_string(lineno) +
                        ": need at least one feature and a label");
    if (first_data_row) {
      dimension = fields.size() - 1;
      first_data_row = false;
    } else if (fields.size() != dimension + 1) {
      throw ConfigError("csv line " + std::to_string(lineno) + ": expected " +
                        std::to_string(dimension + 1) + " columns");
    }
    for (std::size_t j = 0; j < dimension; ++j) {
      double v;
      if (!detail::parse_double(fields[j], &v))
        throw ConfigError("csv line " + std::to_string(lineno) + ": bad feature field '" +
                          fields[j] + "'");
      features.push_back(v);
    }
    double raw_label;
    if (!detail::parse_double(fields.back(), &raw_label))
      throw ConfigError("csv line " + std::to_string(lineno) + ": bad label field '" +
                        fields.back() + "'");
    int y;
    if (raw_label == 1.0)
      y = 1;
    else if (raw_label == -1.0 || raw_label == 0.0)
      y = -1;  // {0,1} encoding maps 0 -> -1
    else
      throw ConfigError("csv line " + std::to_string(lineno) + ": label must be -1, 0 or 1");
    labels.push_back(y);
  }
  if (labels.empty()) throw ConfigError("csv contains no data rows");
  return TrainingSet(std::move(features), std::move(labels), dimension);
}

inline void TrainingSet::to_csv(std::ostream& out) const {
  out.precision(17);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto x = point(i);
    for (const double v : x) out << v << ',';
    out << label(i) << '\n';
  }
}

}  // namespace boostlab
