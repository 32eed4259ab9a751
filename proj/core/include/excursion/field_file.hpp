#pragma once

// Binary field/stack container.
//
//   offset  size      content
//   0       8         magic "EXCRFLD\0"
//   8       4         version (u32 LE) = 1
//   12      4         D (u32 LE), 1..3
//   16      4*D       extents (u32 LE each)
//   ..      8         count (u64 LE): 1 for a field, n for a stack
//   ..      4*count*m float32 LE payload, sample-major then row-major
//   ..      1         optional mask flag (u8): 1 = mask follows, 0 = none
//   ..      m         mask bytes {0, 1} when the flag is 1
//
// A file ending right after the payload has no mask.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "excursion/lattice.hpp"

namespace excursion {

enum class FieldFileErrc {
  Io = 1,
  BadMagic,
  VersionMismatch,
  Truncated,
  DimOverflow,
  BadMask,
};

std::string_view to_string(FieldFileErrc code);

class FieldFileError : public std::runtime_error {
 public:
  FieldFileError(FieldFileErrc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}
  FieldFileErrc code() const { return code_; }

 private:
  FieldFileErrc code_;
};

inline constexpr char kFieldMagic[8] = {'E', 'X', 'C', 'R', 'F', 'L', 'D', '\0'};
inline constexpr std::uint32_t kFieldVersion = 1;

using FieldFileContent = std::variant<ScalarField, SampleStack>;

/// Serializes to the byte layout above.
std::vector<std::uint8_t> encode_field(const ScalarField& field);
std::vector<std::uint8_t> encode_stack(const SampleStack& stack);
FieldFileContent decode_field_file(std::span<const std::uint8_t> bytes);

void write_field_file(const std::filesystem::path& path, const ScalarField& field);
void write_field_file(const std::filesystem::path& path, const SampleStack& stack);
FieldFileContent read_field_file(const std::filesystem::path& path);

/// 0/1 float32 field of a region; out-of-mask locations are NaN.
ScalarField region_to_field(const RegionSet& region);
/// Members are in-mask locations with a value > 0.5.
RegionSet field_to_region(const ScalarField& field);

}  // namespace excursion
