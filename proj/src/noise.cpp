#include "pacimdp/noise.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pacimdp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Symmetric square root that tolerates singular (even zero) covariances.
Matrix covarianceFactor(const Matrix& cov) {
  if (cov.rows() != cov.cols()) throw ModelError("covariance must be square");
  if (!cov.isApprox(cov.transpose(), 1e-12) && !cov.isZero())
    throw ModelError("covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Vector ev = eig.eigenvalues();
  if (ev.minCoeff() < -1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff()))
    throw ModelError("covariance must be positive semidefinite");
  return eig.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

std::uint64_t streamSeed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

NoiseSource NoiseSource::pool(std::vector<Vector> samples, std::uint64_t seed) {
  if (samples.empty()) throw ModelError("noise sample pool is empty");
  NoiseSource src;
  src.kind_ = Kind::Pool;
  src.dim_ = static_cast<int>(samples.front().size());
  for (const auto& s : samples) {
    if (s.size() != src.dim_) throw ModelError("noise samples have inconsistent dimensions");
  }
  src.seed_ = seed;
  src.pool_ = std::make_shared<const std::vector<Vector>>(std::move(samples));
  return src;
}

NoiseSource NoiseSource::gaussian(Vector mean, Matrix covariance, std::uint64_t seed) {
  return mixture({Component{1.0, std::move(mean), std::move(covariance)}}, seed).withKind(Kind::Gaussian);
}

NoiseSource NoiseSource::uniform(Box box, std::uint64_t seed) {
  if (box.lower.size() != box.upper.size() || box.lower.size() == 0)
    throw ModelError("uniform noise box has inconsistent dimensions");
  if (((box.upper - box.lower).array() < 0.0).any()) throw ModelError("uniform noise box is empty");
  NoiseSource src;
  src.kind_ = Kind::Uniform;
  src.dim_ = static_cast<int>(box.lower.size());
  src.seed_ = seed;
  src.box_ = std::move(box);
  return src;
}

NoiseSource NoiseSource::mixture(std::vector<Component> components, std::uint64_t seed) {
  if (components.empty()) throw ModelError("mixture needs at least one component");
  NoiseSource src;
  src.kind_ = Kind::Mixture;
  src.dim_ = static_cast<int>(components.front().mean.size());
  src.seed_ = seed;
  double total = 0.0;
  for (auto& c : components) {
    if (c.mean.size() != src.dim_ || c.covariance.rows() != src.dim_)
      throw ModelError("mixture components have inconsistent dimensions");
    if (!(c.weight > 0.0)) throw ModelError("mixture weights must be positive");
    total += c.weight;
    src.factors_.push_back({c.weight, std::move(c.mean), covarianceFactor(c.covariance)});
  }
  // cumulative weights
  double acc = 0.0;
  for (auto& f : src.factors_) {
    acc += f.weight / total;
    f.weight = acc;
  }
  src.factors_.back().weight = 1.0;
  return src;
}

NoiseSource NoiseSource::withKind(Kind kind) const {
  NoiseSource copy = *this;
  copy.kind_ = kind;
  return copy;
}

NoiseSource NoiseSource::withSeed(std::uint64_t seed) const {
  NoiseSource copy = *this;
  copy.seed_ = seed;
  return copy;
}

std::vector<Vector> NoiseSource::readSampleFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot read noise sample file " + path.string());
  std::vector<Vector> samples;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<double> values;
    double v = 0.0;
    while (fields >> v) values.push_back(v);
    if (!fields.eof()) throw ModelError("malformed noise sample line: " + line);
    samples.emplace_back(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
    if (samples.back().size() != samples.front().size())
      throw ModelError("noise samples have inconsistent dimensions in " + path.string());
  }
  if (samples.empty()) throw ModelError("noise sample file is empty: " + path.string());
  return samples;
}

NoiseSource::Stream::Stream(const NoiseSource& src, std::uint64_t stream)
    : src_(&src), rng_(streamSeed(src.seed_, stream)) {
  if (src.kind_ == Kind::Pool) {
    order_.resize(src.pool_->size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
  }
}

Vector NoiseSource::Stream::next() {
  const int n = src_->dim_;
  switch (src_->kind_) {
    case Kind::Pool: {
      // Partial Fisher-Yates: samples are used without replacement.
      if (cursor_ >= order_.size()) throw std::runtime_error("noise sample pool exhausted");
      std::uniform_int_distribution<std::size_t> pick(cursor_, order_.size() - 1);
      std::swap(order_[cursor_], order_[pick(rng_)]);
      return (*src_->pool_)[order_[cursor_++]];
    }
    case Kind::Uniform: {
      Vector w(n);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (int i = 0; i < n; ++i)
        w(i) = src_->box_.lower(i) + unit(rng_) * (src_->box_.upper(i) - src_->box_.lower(i));
      return w;
    }
    case Kind::Gaussian:
    case Kind::Mixture: {
      const Factor* f = &src_->factors_.front();
      if (src_->factors_.size() > 1) {
        const double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
        for (const auto& c : src_->factors_) {
          f = &c;
          if (r < c.weight) break;
        }
      }
      std::normal_distribution<double> normal(0.0, 1.0);
      Vector z(n);
      for (int i = 0; i < n; ++i) z(i) = normal(rng_);
      return f->mean + f->scale * z;
    }
  }
  return Vector::Zero(n);
}

std::vector<Vector> drawAbstractionSamples(const NoiseSource& noise, int N, std::uint64_t streamIndex) {
  if (N < 1) throw std::invalid_argument("sample count must be positive");
  auto stream = noise.stream(streamIndex);
  std::vector<Vector> samples;
  samples.reserve(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) samples.push_back(stream.next());
  return samples;
}

}  // namespace pacimdp
