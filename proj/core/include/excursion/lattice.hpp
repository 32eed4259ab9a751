#pragma once

// Lattice geometry, scalar fields over a lattice, region sets and the
// 2x2 confusion accounting shared by every error-rate formula.
//
// Locations are linearized in row-major order (last axis fastest). Every
// per-location array in the library uses that order.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace excursion {

/// Thrown when two lattice objects that must agree on shape or mask do not.
class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Extents of a 1-, 2- or 3-dimensional lattice.
class LatticeShape {
 public:
  explicit LatticeShape(std::vector<std::size_t> dims);
  LatticeShape(std::initializer_list<std::size_t> dims)
      : LatticeShape(std::vector<std::size_t>(dims)) {}

  std::size_t rank() const { return dims_.size(); }
  std::span<const std::size_t> dims() const { return dims_; }
  std::size_t extent(std::size_t axis) const { return dims_.at(axis); }

  /// Total location count (product of extents).
  std::size_t size() const { return size_; }

  /// Row-major stride of `axis`.
  std::size_t stride(std::size_t axis) const;

  std::string to_string() const;

  friend bool operator==(const LatticeShape&, const LatticeShape&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::size_t size_ = 0;
};

class Mask {
 public:
  Mask(LatticeShape shape, std::vector<std::uint8_t> inside);

  static Mask full(const LatticeShape& shape);

  const LatticeShape& shape() const { return shape_; }
  bool inside(std::size_t i) const { return inside_[i] != 0; }
  std::span<const std::uint8_t> flags() const { return inside_; }
  std::size_t inside_count() const { return inside_count_; }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  LatticeShape shape_;
  std::vector<std::uint8_t> inside_;
  std::size_t inside_count_ = 0;
};

/// Real value per location, with an optional mask. In-mask values must be
/// finite; out-of-mask values are unconstrained (usually NaN).
class ScalarField {
 public:
  ScalarField(LatticeShape shape, std::vector<double> values,
              std::optional<Mask> mask = std::nullopt);

  static ScalarField constant(const LatticeShape& shape, double value,
                              std::optional<Mask> mask = std::nullopt);

  const LatticeShape& shape() const { return shape_; }
  const std::optional<Mask>& mask() const { return mask_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// 2-D accessor; only valid on rank-2 fields.
  double at(std::size_t row, std::size_t col) const;

  bool in_mask(std::size_t i) const { return !mask_ || mask_->inside(i); }
  std::size_t in_mask_count() const {
    return mask_ ? mask_->inside_count() : values_.size();
  }

 private:
  LatticeShape shape_;
  std::vector<double> values_;
  std::optional<Mask> mask_;
};

/// n >= 2 same-shape, same-mask observations of a field.
class SampleStack {
 public:
  explicit SampleStack(std::vector<ScalarField> samples);

  std::size_t n() const { return samples_.size(); }
  const LatticeShape& shape() const { return samples_.front().shape(); }
  const std::optional<Mask>& mask() const { return samples_.front().mask(); }
  std::span<const ScalarField> samples() const { return samples_; }
  const ScalarField& operator[](std::size_t i) const { return samples_[i]; }

 private:
  std::vector<ScalarField> samples_;
};

/// Boolean membership over the in-mask locations of a lattice.
class RegionSet {
 public:
  RegionSet(LatticeShape shape, std::vector<std::uint8_t> member,
            std::optional<Mask> mask = std::nullopt);

  static RegionSet empty(const LatticeShape& shape,
                         std::optional<Mask> mask = std::nullopt);
  static RegionSet full(const LatticeShape& shape,
                        std::optional<Mask> mask = std::nullopt);

  const LatticeShape& shape() const { return shape_; }
  const std::optional<Mask>& mask() const { return mask_; }
  std::size_t size() const { return member_.size(); }
  bool contains(std::size_t i) const { return member_[i] != 0; }
  std::span<const std::uint8_t> members() const { return member_; }

  /// Number of member locations.
  std::size_t count() const { return count_; }
  bool in_mask(std::size_t i) const { return !mask_ || mask_->inside(i); }
  std::size_t in_mask_count() const {
    return mask_ ? mask_->inside_count() : member_.size();
  }

  /// Complement relative to the in-mask locations.
  RegionSet complement() const;

  bool is_subset_of(const RegionSet& other) const;

  friend bool operator==(const RegionSet& a, const RegionSet& b) {
    return a.shape_ == b.shape_ && a.mask_ == b.mask_ && a.member_ == b.member_;
  }

 private:
  LatticeShape shape_;
  std::vector<std::uint8_t> member_;
  std::optional<Mask> mask_;
  std::size_t count_ = 0;
};

/// Counts of the four cells of a hypothesis-vs-decision table. Sums to the
/// in-mask location count.
struct RegionPartition {
  std::size_t true_null_not_rejected = 0;
  std::size_t true_null_rejected = 0;
  std::size_t alt_not_rejected = 0;
  std::size_t alt_rejected = 0;

  std::size_t total() const {
    return true_null_not_rejected + true_null_rejected + alt_not_rejected +
           alt_rejected;
  }
  friend bool operator==(const RegionPartition&, const RegionPartition&) = default;
};

struct SetCardinalities {
  std::size_t a_minus_b = 0;
  std::size_t b_minus_a = 0;
  std::size_t intersection = 0;
  std::size_t a = 0;
  std::size_t b = 0;
};

enum class Strictness { Strict, NonStrict };

/// {v : field(v) > c} (Strict) or {v : field(v) >= c} (NonStrict).
RegionSet excursion_set(const ScalarField& field, double c, Strictness strictness);

/// The caller supplies the direction-appropriate true-null set.
RegionPartition region_confusion(const RegionSet& true_null, const RegionSet& rejected);

SetCardinalities set_cardinalities(const RegionSet& a, const RegionSet& b);

/// Throws ShapeMismatch unless both sets share shape and mask.
void require_compatible(const RegionSet& a, const RegionSet& b);

}  // namespace excursion
