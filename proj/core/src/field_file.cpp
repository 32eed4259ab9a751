#include "excursion/field_file.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace excursion {
namespace {

static_assert(std::numeric_limits<float>::is_iec559, "float32 payload needs IEEE-754 floats");

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    if (remaining() < n) {
      throw FieldFileError(FieldFileErrc::Truncated,
                           std::string("file ends inside ") + what);
    }
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::uint32_t u32(const char* what) {
    auto s = take(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(s[i]) << (8 * i);
    return v;
  }

  std::uint64_t u64(const char* what) {
    auto s = take(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(s[i]) << (8 * i);
    return v;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> encode(const LatticeShape& shape, const std::optional<Mask>& mask,
                                 std::span<const ScalarField> fields) {
  std::vector<std::uint8_t> out(std::begin(kFieldMagic), std::end(kFieldMagic));
  put_u32(out, kFieldVersion);
  put_u32(out, static_cast<std::uint32_t>(shape.rank()));
  for (std::size_t d : shape.dims()) {
    if (d > std::numeric_limits<std::uint32_t>::max()) {
      throw FieldFileError(FieldFileErrc::DimOverflow, "extent does not fit in u32");
    }
    put_u32(out, static_cast<std::uint32_t>(d));
  }
  put_u64(out, fields.size());
  out.reserve(out.size() + fields.size() * shape.size() * 4 + 1 + shape.size());
  for (const auto& f : fields) {
    for (double v : f.values()) put_f32(out, v);
  }
  if (mask) {
    out.push_back(1);
    for (auto flag : mask->flags()) out.push_back(flag);
  }
  return out;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FieldFileError(FieldFileErrc::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FieldFileError(FieldFileErrc::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FieldFileError(FieldFileErrc::Io, "write failed for " + path.string());
}

}  // namespace

std::string_view to_string(FieldFileErrc code) {
  switch (code) {
    case FieldFileErrc::Io: return "i/o error";
    case FieldFileErrc::BadMagic: return "bad magic";
    case FieldFileErrc::VersionMismatch: return "version mismatch";
    case FieldFileErrc::Truncated: return "truncated payload";
    case FieldFileErrc::DimOverflow: return "dim overflow";
    case FieldFileErrc::BadMask: return "bad mask block";
  }
  return "unknown field file error";
}

std::vector<std::uint8_t> encode_field(const ScalarField& field) {
  return encode(field.shape(), field.mask(), std::span(&field, 1));
}

std::vector<std::uint8_t> encode_stack(const SampleStack& stack) {
  return encode(stack.shape(), stack.mask(), stack.samples());
}

FieldFileContent decode_field_file(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof kFieldMagic ||
      std::memcmp(bytes.data(), kFieldMagic, sizeof kFieldMagic) != 0) {
    throw FieldFileError(FieldFileErrc::BadMagic, "not a field file");
  }
  Reader r(bytes.subspan(sizeof kFieldMagic));
  const std::uint32_t version = r.u32("version");
  if (version != kFieldVersion) {
    throw FieldFileError(FieldFileErrc::VersionMismatch,
                         "expected version 1, found " + std::to_string(version));
  }
  const std::uint32_t rank = r.u32("rank");
  if (rank < 1 || rank > 3) {
    throw FieldFileError(FieldFileErrc::DimOverflow, "rank " + std::to_string(rank));
  }
  std::vector<std::size_t> dims(rank);
  std::uint64_t m = 1;
  for (auto& d : dims) {
    d = r.u32("extents");
    if (d == 0) throw FieldFileError(FieldFileErrc::DimOverflow, "zero extent");
    if (m > std::numeric_limits<std::uint64_t>::max() / d) {
      throw FieldFileError(FieldFileErrc::DimOverflow, "location count overflows");
    }
    m *= d;
  }
  const std::uint64_t count = r.u64("sample count");
  if (count == 0) throw FieldFileError(FieldFileErrc::DimOverflow, "zero sample count");
  if (m > std::numeric_limits<std::uint64_t>::max() / 4 / count) {
    throw FieldFileError(FieldFileErrc::DimOverflow, "payload size overflows");
  }
  if (r.remaining() < count * m * 4) {
    throw FieldFileError(FieldFileErrc::Truncated,
                         "payload needs " + std::to_string(count * m * 4) + " bytes, have " +
                             std::to_string(r.remaining()));
  }

  const LatticeShape shape(dims);
  std::vector<std::vector<double>> planes(count, std::vector<double>(m));
  for (auto& plane : planes) {
    const auto raw = r.take(m * 4, "payload");
    for (std::size_t i = 0; i < m; ++i) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(raw[4 * i + b]) << (8 * b);
      plane[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
  }

  std::optional<Mask> mask;
  if (r.remaining() > 0) {
    const std::uint8_t flag = r.take(1, "mask flag")[0];
    if (flag == 1) {
      const auto raw = r.take(m, "mask");
      std::vector<std::uint8_t> inside(raw.begin(), raw.end());
      for (auto v : inside) {
        if (v > 1) throw FieldFileError(FieldFileErrc::BadMask, "mask bytes must be 0 or 1");
      }
      mask = Mask(shape, std::move(inside));
    } else if (flag != 0) {
      throw FieldFileError(FieldFileErrc::BadMask, "mask flag must be 0 or 1");
    }
    if (r.remaining() != 0) {
      throw FieldFileError(FieldFileErrc::BadMask, "trailing bytes after mask block");
    }
  }

  try {
    if (count == 1) return ScalarField(shape, std::move(planes.front()), mask);
    std::vector<ScalarField> samples;
    samples.reserve(count);
    for (auto& plane : planes) samples.emplace_back(shape, std::move(plane), mask);
    return SampleStack(std::move(samples));
  } catch (const std::invalid_argument& e) {
    throw FieldFileError(FieldFileErrc::BadMask, e.what());
  }
}

void write_field_file(const std::filesystem::path& path, const ScalarField& field) {
  dump(path, encode_field(field));
}

void write_field_file(const std::filesystem::path& path, const SampleStack& stack) {
  dump(path, encode_stack(stack));
}

FieldFileContent read_field_file(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = slurp(path);
  return decode_field_file(bytes);
}

ScalarField region_to_field(const RegionSet& region) {
  std::vector<double> v(region.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = region.in_mask(i) ? (region.contains(i) ? 1.0 : 0.0)
                             : std::numeric_limits<double>::quiet_NaN();
  }
  return ScalarField(region.shape(), std::move(v), region.mask());
}

RegionSet field_to_region(const ScalarField& field) {
  std::vector<std::uint8_t> member(field.size());
  for (std::size_t i = 0; i < member.size(); ++i) {
    member[i] = field.in_mask(i) && field[i] > 0.5 ? 1 : 0;
  }
  return RegionSet(field.shape(), std::move(member), field.mask());
}

}  // namespace excursion
