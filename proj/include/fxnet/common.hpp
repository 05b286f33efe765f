#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fxnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ErrorKind {
  InvalidInput,
  Alignment,
  EmptyPanel,
  DegenerateSeries,
  Configuration,
  SizeMismatch,
  Numeric,
  TooLarge,
  Spec,
  Io,
  Schema,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::Alignment: return "alignment";
    case ErrorKind::EmptyPanel: return "empty panel";
    case ErrorKind::DegenerateSeries: return "degenerate series";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::SizeMismatch: return "size mismatch";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::TooLarge: return "too large";
    case ErrorKind::Spec: return "shuffle spec";
    case ErrorKind::Io: return "io";
    case ErrorKind::Schema: return "schema";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// splitmix64 finalizer; used to derive independent sub-seeds from one master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

// Uniform integer in [0, bound) without relying on the library distribution,
// so sequences are identical across standard library implementations.
inline std::size_t uniform_index(Rng& rng, std::size_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return static_cast<std::size_t>(draw % bound);
}

inline double uniform_real(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class Container>
void shuffle_in_place(Container& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_index(rng, i)]);
  }
}

}  // namespace fxnet
