#include "pacimdp/scenario.hpp"

#include "pacimdp/parallel.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pacimdp {

namespace {

static_assert(std::endian::native == std::endian::little,
              "interval table sidecars are written in host order");

void checkArguments(int N, double beta, int nOut) {
  if (N < 1) throw std::invalid_argument("sample count must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
  if (nOut < 0 || nOut > N) throw std::invalid_argument("outside count must lie in [0, N]");
}

// Root of a monotone function on [0, 1] by bisection. `increasing` tells the
// direction; f(0) <= target <= f(1) (or reversed) is assumed.
template <typename F>
double bisect(F&& f, double target, bool increasing) {
  double lo = 0.0, hi = 1.0;
  while (hi - lo > kBoundTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const bool below = increasing ? f(mid) < target : f(mid) > target;
    (below ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double binomialOutsideSum(int N, int k, double p) {
  if (k < 0) return 0.0;
  if (k >= N) return 1.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double logP = std::log(p);
  const double logQ = std::log1p(-p);
  // log C(N, i) built incrementally; log-sum-exp over the terms.
  std::vector<double> terms(static_cast<std::size_t>(k) + 1);
  double logChoose = 0.0;
  double maxTerm = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= k; ++i) {
    if (i > 0) logChoose += std::log(static_cast<double>(N - i + 1)) - std::log(static_cast<double>(i));
    terms[i] = logChoose + i * logQ + (N - i) * logP;
    maxTerm = std::max(maxTerm, terms[i]);
  }
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - maxTerm);
  return std::min(1.0, std::exp(maxTerm + std::log(acc)));
}

double solveLowerBound(int N, double beta, int nOut) {
  checkArguments(N, beta, nOut);
  if (nOut == N) return 0.0;
  const double target = beta / (2.0 * N);
  // P(at most nOut outside) = I_p(N - nOut, nOut + 1), increasing in p.
  const double a = N - nOut, b = nOut + 1.0;
  return bisect([&](double p) { return boost::math::ibeta(a, b, p); }, target, true);
}

double solveUpperBound(int N, double beta, int nOut) {
  checkArguments(N, beta, nOut);
  if (nOut == 0) return 1.0;
  const double target = beta / (2.0 * N);
  // 1 - P(at most nOut - 1 outside) = 1 - I_p(N - nOut + 1, nOut), decreasing in p.
  const double a = N - nOut + 1.0, b = nOut;
  return bisect([&](double p) { return boost::math::ibetac(a, b, p); }, target, false);
}

IntervalTable::IntervalTable(int N, double beta, unsigned threads) : N_(N), beta_(beta) {
  checkArguments(N, beta, 0);
  rows_.resize(static_cast<std::size_t>(N) + 1);
  parallelFor(rows_.size(), threads, [&](std::size_t k) {
    const int nOut = static_cast<int>(k);
    rows_[k] = {solveLowerBound(N, beta, nOut), solveUpperBound(N, beta, nOut)};
  });
}

void IntervalTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write interval table " + path.string());
  std::ostringstream header;
  header.precision(17);
  header << "pacimdp-interval-table 1 N " << N_ << " beta " << beta_ << " rows " << rows_.size()
         << '\n';
  out << header.str();
  for (const auto& r : rows_) {
    out.write(reinterpret_cast<const char*>(&r.lower), sizeof(double));
    out.write(reinterpret_cast<const char*>(&r.upper), sizeof(double));
  }
  if (!out) throw std::runtime_error("failed writing interval table " + path.string());
}

IntervalTable IntervalTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read interval table " + path.string());
  std::string line;
  std::getline(in, line);
  std::istringstream header(line);
  std::string magic, keyN, keyBeta, keyRows;
  int version = 0;
  std::size_t rows = 0;
  IntervalTable table;
  header >> magic >> version >> keyN >> table.N_ >> keyBeta >> table.beta_ >> keyRows >> rows;
  if (!header || magic != "pacimdp-interval-table" || version != 1 ||
      rows != static_cast<std::size_t>(table.N_) + 1)
    throw std::runtime_error("malformed interval table header in " + path.string());
  table.rows_.resize(rows);
  for (auto& r : table.rows_) {
    in.read(reinterpret_cast<char*>(&r.lower), sizeof(double));
    in.read(reinterpret_cast<char*>(&r.upper), sizeof(double));
  }
  if (!in) throw std::runtime_error("truncated interval table " + path.string());
  return table;
}

IntervalTable IntervalTable::cached(const std::filesystem::path& dir, int N, double beta,
                                    unsigned threads) {
  std::ostringstream name;
  name.precision(17);
  name << "intervals_N" << N << "_beta" << beta << ".bin";
  const auto path = dir / name.str();
  if (std::filesystem::exists(path)) {
    try {
      IntervalTable table = load(path);
      if (table.N_ == N && table.beta_ == beta) return table;
    } catch (const std::runtime_error&) {
      // recompute below
    }
  }
  IntervalTable table(N, beta, threads);
  std::filesystem::create_directories(dir);
  table.save(path);
  return table;
}

SampleCounts countSamples(const Partition& part, std::span<const Vector> targets,
                          std::span<const Vector> samples, unsigned threads) {
  if (samples.empty()) throw std::invalid_argument("no noise samples");
  for (const auto& w : samples) {
    if (w.size() != part.dim()) throw std::invalid_argument("noise sample dimension mismatch");
  }
  SampleCounts counts;
  counts.N = static_cast<int>(samples.size());
  counts.perAction.resize(targets.size());
  parallelFor(targets.size(), threads, [&](std::size_t j) {
    std::vector<Index> hits;
    hits.reserve(samples.size());
    Vector successor(part.dim());
    for (const auto& w : samples) {
      successor = targets[j] + w;
      hits.push_back(part.regionIndex(successor));
    }
    std::sort(hits.begin(), hits.end());
    auto& row = counts.perAction[j];
    for (std::size_t i = 0; i < hits.size();) {
      std::size_t e = i;
      while (e < hits.size() && hits[e] == hits[i]) ++e;
      row.emplace_back(hits[i], static_cast<int>(e - i));
      i = e;
    }
  });
  return counts;
}

std::vector<std::pair<Index, double>> frequentistRow(const SampleCounts& counts, Index action) {
  std::vector<std::pair<Index, double>> row;
  const auto& c = counts.perAction.at(static_cast<std::size_t>(action));
  row.reserve(c.size());
  for (const auto& [region, n] : c)
    row.emplace_back(region, static_cast<double>(n) / counts.N);
  return row;
}

}  // namespace pacimdp
