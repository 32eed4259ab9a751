#include "excursion/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace excursion {

LatticeShape::LatticeShape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty() || dims_.size() > 3) {
    throw std::invalid_argument("lattice rank must be 1, 2 or 3, got " +
                                std::to_string(dims_.size()));
  }
  size_ = 1;
  for (std::size_t d : dims_) {
    if (d == 0) throw std::invalid_argument("lattice extents must be >= 1");
    if (size_ > std::numeric_limits<std::size_t>::max() / d) {
      throw std::overflow_error("lattice location count overflows size_t");
    }
    size_ *= d;
  }
}

std::size_t LatticeShape::stride(std::size_t axis) const {
  std::size_t s = 1;
  for (std::size_t a = dims_.size(); a-- > axis + 1;) s *= dims_[a];
  return s;
}

std::string LatticeShape::to_string() const {
  std::string out;
  for (std::size_t a = 0; a < dims_.size(); ++a) {
    if (a) out += 'x';
    out += std::to_string(dims_[a]);
  }
  return out;
}

Mask::Mask(LatticeShape shape, std::vector<std::uint8_t> inside)
    : shape_(std::move(shape)), inside_(std::move(inside)) {
  if (inside_.size() != shape_.size()) {
    throw ShapeMismatch("mask has " + std::to_string(inside_.size()) +
                        " flags for a " + shape_.to_string() + " lattice");
  }
  for (auto& f : inside_) {
    f = f ? 1 : 0;
    inside_count_ += f;
  }
}

Mask Mask::full(const LatticeShape& shape) {
  return Mask(shape, std::vector<std::uint8_t>(shape.size(), 1));
}

ScalarField::ScalarField(LatticeShape shape, std::vector<double> values,
                         std::optional<Mask> mask)
    : shape_(std::move(shape)), values_(std::move(values)), mask_(std::move(mask)) {
  if (values_.size() != shape_.size()) {
    throw ShapeMismatch("field has " + std::to_string(values_.size()) +
                        " values for a " + shape_.to_string() + " lattice");
  }
  if (mask_ && !(mask_->shape() == shape_)) {
    throw ShapeMismatch("mask shape " + mask_->shape().to_string() +
                        " does not match field shape " + shape_.to_string());
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (in_mask(i) && std::isnan(values_[i])) {
      throw std::invalid_argument("field value at in-mask location " +
                                  std::to_string(i) + " is NaN");
    }
  }
}

ScalarField ScalarField::constant(const LatticeShape& shape, double value,
                                  std::optional<Mask> mask) {
  return ScalarField(shape, std::vector<double>(shape.size(), value), std::move(mask));
}

double ScalarField::at(std::size_t row, std::size_t col) const {
  if (shape_.rank() != 2) throw std::logic_error("at(row, col) on a non 2-D field");
  return values_[row * shape_.extent(1) + col];
}

SampleStack::SampleStack(std::vector<ScalarField> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 2) {
    throw std::invalid_argument("a sample stack needs n >= 2 samples, got " +
                                std::to_string(samples_.size()));
  }
  const auto& first = samples_.front();
  for (const auto& s : samples_) {
    if (!(s.shape() == first.shape()) || s.mask() != first.mask()) {
      throw ShapeMismatch("all samples in a stack must share shape and mask");
    }
  }
}

RegionSet::RegionSet(LatticeShape shape, std::vector<std::uint8_t> member,
                     std::optional<Mask> mask)
    : shape_(std::move(shape)), member_(std::move(member)), mask_(std::move(mask)) {
  if (member_.size() != shape_.size()) {
    throw ShapeMismatch("region has " + std::to_string(member_.size()) +
                        " flags for a " + shape_.to_string() + " lattice");
  }
  if (mask_ && !(mask_->shape() == shape_)) {
    throw ShapeMismatch("region mask shape does not match region shape");
  }
  for (std::size_t i = 0; i < member_.size(); ++i) {
    member_[i] = (member_[i] && in_mask(i)) ? 1 : 0;
    count_ += member_[i];
  }
}

RegionSet RegionSet::empty(const LatticeShape& shape, std::optional<Mask> mask) {
  return RegionSet(shape, std::vector<std::uint8_t>(shape.size(), 0), std::move(mask));
}

RegionSet RegionSet::full(const LatticeShape& shape, std::optional<Mask> mask) {
  return RegionSet(shape, std::vector<std::uint8_t>(shape.size(), 1), std::move(mask));
}

RegionSet RegionSet::complement() const {
  std::vector<std::uint8_t> flipped(member_.size());
  for (std::size_t i = 0; i < member_.size(); ++i) flipped[i] = member_[i] ? 0 : 1;
  return RegionSet(shape_, std::move(flipped), mask_);
}

bool RegionSet::is_subset_of(const RegionSet& other) const {
  require_compatible(*this, other);
  for (std::size_t i = 0; i < member_.size(); ++i) {
    if (member_[i] && !other.member_[i]) return false;
  }
  return true;
}

void require_compatible(const RegionSet& a, const RegionSet& b) {
  if (!(a.shape() == b.shape())) {
    throw ShapeMismatch("region shapes differ: " + a.shape().to_string() + " vs " +
                        b.shape().to_string());
  }
  if (a.mask() != b.mask()) throw ShapeMismatch("region masks differ");
}

RegionSet excursion_set(const ScalarField& field, double c, Strictness strictness) {
  std::vector<std::uint8_t> member(field.size(), 0);
  const auto values = field.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!field.in_mask(i)) continue;
    member[i] = strictness == Strictness::Strict ? values[i] > c : values[i] >= c;
  }
  return RegionSet(field.shape(), std::move(member), field.mask());
}

RegionPartition region_confusion(const RegionSet& true_null, const RegionSet& rejected) {
  require_compatible(true_null, rejected);
  RegionPartition p;
  for (std::size_t i = 0; i < true_null.size(); ++i) {
    if (!true_null.in_mask(i)) continue;
    const bool null = true_null.contains(i);
    const bool rej = rejected.contains(i);
    if (null) {
      (rej ? p.true_null_rejected : p.true_null_not_rejected)++;
    } else {
      (rej ? p.alt_rejected : p.alt_not_rejected)++;
    }
  }
  return p;
}

SetCardinalities set_cardinalities(const RegionSet& a, const RegionSet& b) {
  require_compatible(a, b);
  SetCardinalities s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool in_a = a.contains(i);
    const bool in_b = b.contains(i);
    s.a_minus_b += in_a && !in_b;
    s.b_minus_a += in_b && !in_a;
    s.intersection += in_a && in_b;
  }
  s.a = a.count();
  s.b = b.count();
  return s;
}

}  // namespace excursion
