#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>

#include "tdr/error.hpp"
#include "tdr/tensor.hpp"

namespace tdr {

namespace {

constexpr std::array<char, 4> kMagic = {'T', '3', 'F', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (std::size_t b = 0; b < 8; ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xffU);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(const unsigned char* bytes) {
  std::uint64_t v = 0;
  for (std::size_t b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return v;
}

}  // namespace

void write_t3f1(const Tensor3& x, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, x.rows());
  put_u64(out, x.cols());
  put_u64(out, x.depth());
  for (double v : x.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

Tensor3 read_t3f1(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());

  if (buf.size() < kMagic.size() ||
      !std::equal(kMagic.begin(), kMagic.end(), buf.begin(),
                  [](char a, unsigned char b) { return static_cast<unsigned char>(a) == b; }))
    fail(ErrorCode::BadMagic, path + " is not a T3F1 file");
  constexpr std::size_t header = 4 + 3 * 8;
  if (buf.size() < header) fail(ErrorCode::TruncatedFile, path + ": header is incomplete");

  const std::uint64_t m = get_u64(buf.data() + 4);
  const std::uint64_t n = get_u64(buf.data() + 12);
  const std::uint64_t p = get_u64(buf.data() + 20);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / 8;
  if (m == 0 || n == 0 || p == 0 || m > limit / n || m * n > limit / p)
    fail(ErrorCode::DimensionMismatch, path + ": invalid dimensions");
  const std::uint64_t count = m * n * p;
  if (buf.size() - header < count * 8)
    fail(ErrorCode::TruncatedFile, path + ": expected " + std::to_string(count) + " values");

  std::vector<double> values(count);
  for (std::uint64_t t = 0; t < count; ++t)
    values[t] = std::bit_cast<double>(get_u64(buf.data() + header + 8 * t));
  return Tensor3(m, n, p, std::move(values));
}

}  // namespace tdr
