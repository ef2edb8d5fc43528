#include "teamgame/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

namespace teamgame {

ProductIndex::ProductIndex(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) {
    throw std::invalid_argument("product index requires a nonempty list of spaces");
  }
  strides_.assign(sizes_.size(), 1);
  for (int axis = static_cast<int>(sizes_.size()) - 2; axis >= 0; --axis) {
    if (sizes_[axis + 1] <= 0) {
      throw std::invalid_argument("product index axis has no points");
    }
    strides_[axis] = strides_[axis + 1] * static_cast<std::size_t>(sizes_[axis + 1]);
  }
  if (sizes_.front() <= 0) {
    throw std::invalid_argument("product index axis has no points");
  }
  total_ = strides_.front() * static_cast<std::size_t>(sizes_.front());
}

std::size_t ProductIndex::flatten(std::span<const int> tuple) const {
  if (tuple.size() != sizes_.size()) {
    throw std::invalid_argument("tuple rank does not match product index rank");
  }
  std::size_t flat = 0;
  for (std::size_t axis = 0; axis < sizes_.size(); ++axis) {
    if (tuple[axis] < 0 || tuple[axis] >= sizes_[axis]) {
      throw std::out_of_range("tuple component outside its axis");
    }
    flat += strides_[axis] * static_cast<std::size_t>(tuple[axis]);
  }
  return flat;
}

void ProductIndex::unflatten(std::size_t flat, std::span<int> out) const {
  if (out.size() != sizes_.size()) {
    throw std::invalid_argument("output rank does not match product index rank");
  }
  for (std::size_t axis = 0; axis < sizes_.size(); ++axis) {
    out[axis] = static_cast<int>(flat / strides_[axis]);
    flat %= strides_[axis];
  }
}

std::vector<int> ProductIndex::tuple_of(std::size_t flat) const {
  std::vector<int> out(sizes_.size());
  unflatten(flat, out);
  return out;
}

int ProductIndex::component(std::size_t flat, int axis) const {
  return static_cast<int>((flat / strides_[axis]) % static_cast<std::size_t>(sizes_[axis]));
}

double FiniteSpace::point_distance(int p, int q) const {
  if (p == q) return 0.0;
  if (metric_kind == MetricKind::discrete) return 1.0;
  double best = 0.0;
  const auto& cp = coords[p];
  const auto& cq = coords[q];
  for (std::size_t k = 0; k < cp.size(); ++k) {
    best = std::max(best, std::fabs(cp[k] - cq[k]));
  }
  return best;
}

FiniteSpace FiniteSpace::categorical(std::string name, std::vector<std::string> labels) {
  FiniteSpace s;
  s.name = std::move(name);
  s.labels = std::move(labels);
  s.metric_kind = MetricKind::discrete;
  validate_space(s);
  return s;
}

FiniteSpace FiniteSpace::numeric_grid(std::string name, std::vector<double> values) {
  FiniteSpace s;
  s.name = std::move(name);
  s.values = std::move(values);
  s.metric_kind = MetricKind::euclidean_max;
  double lo = s.values.empty() ? 0.0 : *std::min_element(s.values.begin(), s.values.end());
  double hi = s.values.empty() ? 0.0 : *std::max_element(s.values.begin(), s.values.end());
  const double span = hi - lo;
  for (double v : s.values) {
    std::ostringstream label;
    label << v;
    s.labels.push_back(label.str());
    // span-normalize into [0,1]; a single-point grid collapses to 0
    s.coords.push_back({span > 0.0 ? (v - lo) / span : 0.0});
  }
  validate_space(s);
  return s;
}

void validate_space(const FiniteSpace& space) {
  if (space.labels.empty()) {
    throw std::invalid_argument("space '" + space.name + "' has no points");
  }
  std::set<std::string> seen(space.labels.begin(), space.labels.end());
  if (seen.size() != space.labels.size()) {
    throw std::invalid_argument("space '" + space.name + "' has duplicate labels");
  }
  if (space.metric_kind == MetricKind::euclidean_max) {
    if (space.coords.size() != space.labels.size()) {
      throw std::invalid_argument("space '" + space.name + "' needs coordinates for every point");
    }
    for (const auto& c : space.coords) {
      if (c.size() != space.coords.front().size()) {
        throw std::invalid_argument("space '" + space.name + "' has mixed coordinate dimensions");
      }
      for (double x : c) {
        if (!(x >= 0.0 && x <= 1.0)) {
          throw std::invalid_argument("space '" + space.name + "' has coordinates outside [0,1]");
        }
      }
    }
  }
}

ProductIndex GroundMetric::index() const {
  std::vector<int> sizes;
  sizes.reserve(axes.size());
  for (const auto& a : axes) sizes.push_back(a.size());
  return ProductIndex(sizes);
}

double GroundMetric::distance(std::span<const int> p, std::span<const int> q) const {
  if (p.size() != axes.size() || q.size() != axes.size()) {
    throw std::invalid_argument("point rank does not match metric space rank");
  }
  if (kind == GroundMetricKind::discrete) {
    for (std::size_t k = 0; k < axes.size(); ++k) {
      if (p[k] != q[k]) return 1.0;
    }
    return 0.0;
  }
  double best = 0.0;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    best = std::max(best, axes[k].point_distance(p[k], q[k]));
    if (best >= 1.0) break;
  }
  return best;
}

double GroundMetric::distance_flat(const ProductIndex& idx, std::size_t p, std::size_t q) const {
  if (kind == GroundMetricKind::discrete) {
    return p == q ? 0.0 : 1.0;
  }
  double best = 0.0;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    int pk = idx.component(p, static_cast<int>(k));
    int qk = idx.component(q, static_cast<int>(k));
    best = std::max(best, axes[k].point_distance(pk, qk));
    if (best >= 1.0) break;
  }
  return best;
}

double FiniteDistribution::total() const {
  return neumaier_total(mass);
}

bool FiniteDistribution::is_normalized(double tol) const {
  for (double m : mass) {
    if (m < 0.0) return false;
  }
  return std::fabs(total() - 1.0) <= tol;
}

Kernel Kernel::zeros(ProductIndex source, std::size_t target_size) {
  Kernel k;
  k.source = std::move(source);
  k.target_size = target_size;
  k.rows.assign(k.source.size() * target_size, 0.0);
  return k;
}

std::string KernelViolation::describe() const {
  std::ostringstream out;
  if (kind == Kind::negative_entry) {
    out << "row " << row << " has a negative entry " << defect;
  } else {
    out << "row " << row << " sums to " << defect;
  }
  return out.str();
}

KernelReport validate_kernel(const Kernel& kernel, double tol) {
  KernelReport report;
  if (kernel.rows.size() != kernel.source.size() * kernel.target_size) {
    report.ok = false;
    report.violations.push_back({KernelViolation::Kind::row_not_normalized, 0, 0.0});
    return report;
  }
  for (std::size_t row = 0; row < kernel.source.size(); ++row) {
    NeumaierSum sum;
    for (std::size_t t = 0; t < kernel.target_size; ++t) {
      double v = kernel.at(row, t);
      if (v < 0.0) {
        report.ok = false;
        report.violations.push_back({KernelViolation::Kind::negative_entry, row, v});
        return report;
      }
      sum.add(v);
    }
    if (std::fabs(sum.value() - 1.0) > tol) {
      report.ok = false;
      report.violations.push_back({KernelViolation::Kind::row_not_normalized, row, sum.value()});
      return report;
    }
  }
  return report;
}

ProductIndex product_index(std::span<const FiniteSpace> spaces) {
  if (spaces.empty()) {
    throw std::invalid_argument("product index requires a nonempty list of spaces");
  }
  std::vector<int> sizes;
  sizes.reserve(spaces.size());
  for (const auto& s : spaces) sizes.push_back(s.size());
  return ProductIndex(sizes);
}

void NeumaierSum::add(double x) {
  double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double neumaier_total(std::span<const double> xs) {
  NeumaierSum sum;
  for (double x : xs) sum.add(x);
  return sum.value();
}

}  // namespace teamgame
