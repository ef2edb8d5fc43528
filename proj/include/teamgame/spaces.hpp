#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace teamgame {

inline constexpr double kMassTol = 1e-12;
inline constexpr double kFeasTol = 1e-9;

/// Lexicographic enumeration of a Cartesian product. Axis 0 varies slowest,
/// the last axis fastest, so tuple order matches nested for-loops.
class ProductIndex {
 public:
  ProductIndex() = default;
  explicit ProductIndex(std::vector<int> sizes);

  std::size_t size() const { return total_; }
  int rank() const { return static_cast<int>(sizes_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }

  std::size_t flatten(std::span<const int> tuple) const;
  void unflatten(std::size_t flat, std::span<int> out) const;
  std::vector<int> tuple_of(std::size_t flat) const;
  int component(std::size_t flat, int axis) const;

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 0;
};

enum class MetricKind { euclidean_max, discrete };

/// A finite set of labelled points, optionally embedded in [0,1]^d.
/// Numeric grids carry their raw values plus span-normalized coordinates;
/// categorical spaces carry labels only and use the discrete metric.
struct FiniteSpace {
  std::string name;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> coords;  // empty for categorical spaces
  std::vector<double> values;               // raw 1-d values for numeric grids
  MetricKind metric_kind = MetricKind::discrete;

  int size() const { return static_cast<int>(labels.size()); }
  double point_distance(int p, int q) const;

  static FiniteSpace categorical(std::string name, std::vector<std::string> labels);
  static FiniteSpace numeric_grid(std::string name, std::vector<double> values);
};

/// Validates the FiniteSpace invariants; throws std::invalid_argument.
void validate_space(const FiniteSpace& space);

enum class GroundMetricKind { component_max, discrete };

/// Metric on a product of finite spaces. Distances are normalized to [0,1]:
/// component_max takes the max of per-axis point distances, discrete is 0/1.
struct GroundMetric {
  std::vector<FiniteSpace> axes;
  GroundMetricKind kind = GroundMetricKind::component_max;

  ProductIndex index() const;
  double distance(std::span<const int> p, std::span<const int> q) const;
  double distance_flat(const ProductIndex& idx, std::size_t p, std::size_t q) const;
};

struct FiniteDistribution {
  std::vector<double> mass;

  std::size_t size() const { return mass.size(); }
  double total() const;
  bool is_normalized(double tol = kMassTol) const;
};

/// One probability row per source tuple; rows are stored dense.
struct Kernel {
  ProductIndex source;
  std::size_t target_size = 0;
  std::vector<double> rows;  // source.size() x target_size, row-major

  double at(std::size_t src, std::size_t tgt) const {
    return rows[src * target_size + tgt];
  }
  double& at(std::size_t src, std::size_t tgt) {
    return rows[src * target_size + tgt];
  }
  static Kernel zeros(ProductIndex source, std::size_t target_size);
};

struct KernelViolation {
  enum class Kind { row_not_normalized, negative_entry };
  Kind kind;
  std::size_t row;
  double defect;  // row sum for normalization defects, entry value for negativity
  std::string describe() const;
};

struct KernelReport {
  bool ok = true;
  std::vector<KernelViolation> violations;
};

/// Checks every row sums to 1 within kMassTol and has no negative entry.
/// Reports the first violating row per defect kind.
KernelReport validate_kernel(const Kernel& kernel, double tol = kMassTol);

/// Lexicographic index over the Cartesian product of the given spaces.
ProductIndex product_index(std::span<const FiniteSpace> spaces);

/// Running compensated sum (Neumaier); keeps law masses and expectations
/// accurate across the long accumulations used throughout.
class NeumaierSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double neumaier_total(std::span<const double> xs);

}  // namespace teamgame
