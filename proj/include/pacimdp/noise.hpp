#pragma once

#include "pacimdp/linear_system.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <vector>

namespace pacimdp {

/// Mixes (seed, stream) into an independent 64-bit generator seed.
std::uint64_t streamSeed(std::uint64_t seed, std::uint64_t stream);

/**
 * Process-noise source: a finite pool of recorded samples, a Gaussian, a
 * uniform box, or a Gaussian mixture. Every draw goes through a NoiseStream
 * identified by an integer, so results depend only on (seed, stream) and not
 * on thread scheduling.
 */
class NoiseSource {
 public:
  enum class Kind { Pool, Gaussian, Uniform, Mixture };

  struct Component {
    double weight = 1.0;
    Vector mean;
    Matrix covariance;
  };

  static NoiseSource pool(std::vector<Vector> samples, std::uint64_t seed);
  static NoiseSource gaussian(Vector mean, Matrix covariance, std::uint64_t seed);
  static NoiseSource uniform(Box box, std::uint64_t seed);
  static NoiseSource mixture(std::vector<Component> components, std::uint64_t seed);

  /// One sample per line, whitespace- or comma-separated; blank lines and
  /// lines starting with '#' are skipped.
  static std::vector<Vector> readSampleFile(const std::filesystem::path& path);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  NoiseSource withSeed(std::uint64_t seed) const;

  class Stream {
   public:
    /// Throws std::runtime_error when a sample pool is exhausted.
    Vector next();

   private:
    friend class NoiseSource;
    Stream(const NoiseSource& src, std::uint64_t stream);

    const NoiseSource* src_;
    std::mt19937_64 rng_;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
  };

  Stream stream(std::uint64_t index) const { return Stream(*this, index); }

 private:
  NoiseSource() = default;
  NoiseSource withKind(Kind kind) const;
  struct Factor {
    double weight;
    Vector mean;
    Matrix scale;  // scale * scale^T = covariance
  };

  Kind kind_ = Kind::Gaussian;
  int dim_ = 0;
  std::uint64_t seed_ = 0;
  std::shared_ptr<const std::vector<Vector>> pool_;
  std::vector<Factor> factors_;
  Box box_;
};

/// N i.i.d. samples from stream `streamIndex`. Abstraction and validation
/// should use different seeds (or at least different streams).
std::vector<Vector> drawAbstractionSamples(const NoiseSource& noise, int N,
                                           std::uint64_t streamIndex = 0);

}  // namespace pacimdp
