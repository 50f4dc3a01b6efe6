#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hbpk {

using Engine = std::mt19937_64;

/// Named, splittable random stream.
///
/// A stream is a 64-bit key. Children are derived by hashing a tag into the
/// parent key, so the stream for e.g. (seed, "npf", individual 7, particle 3)
/// is fixed by its path alone and does not depend on how many draws other
/// streams consumed. Engines are created on demand from the key.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  [[nodiscard]] RngStream child(std::uint64_t tag) const;
  [[nodiscard]] RngStream child(std::string_view name) const;

  [[nodiscard]] Engine engine() const;
  [[nodiscard]] std::uint64_t key() const noexcept { return key_; }

 private:
  struct FromKey {};
  RngStream(FromKey, std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace hbpk
