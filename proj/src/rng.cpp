#include "hbpk/rng.hpp"

#include <array>

namespace hbpk {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : key_(mix64(seed)) {}

RngStream RngStream::child(std::uint64_t tag) const {
  return {FromKey{}, mix64(key_ ^ mix64(tag + 0x632be59bd9b4e019ULL))};
}

RngStream RngStream::child(std::string_view name) const {
  // FNV-1a over the name, then mixed like a numeric tag.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return {FromKey{}, mix64(key_ ^ mix64(h ^ 0x5851f42d4c957f2dULL))};
}

Engine RngStream::engine() const {
  std::array<std::uint32_t, 4> words{
      static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32),
      static_cast<std::uint32_t>(mix64(key_)),
      static_cast<std::uint32_t>(mix64(key_) >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

}  // namespace hbpk
