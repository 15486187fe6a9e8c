#include "coexist/core.hpp"

#include <stdexcept>

namespace coexist {

IndexSplit IndexSplit::for_size(int n) {
  if (n < 1) throw std::invalid_argument("IndexSplit: n must be >= 1");
  IndexSplit s;
  s.n = n;
  if (n % 2 == 1) {
    s.n1 = (n - 1) / 2;
    s.n2 = (n - 1) / 2;
  } else {
    s.n1 = n / 2;
    s.n2 = n / 2 - 1;
  }
  return s;
}

bool operator==(const IndexSplit& a, const IndexSplit& b) {
  return a.n1 == b.n1 && a.n2 == b.n2 && a.n == b.n;
}

Mat dft_matrix(const IndexSplit& split) {
  const int n = split.n;
  Mat f(n, n);
  for (int r = 0; r < n; ++r) {
    const double k = static_cast<double>(split.k_at(r));
    for (int c = 0; c < n; ++c) {
      f(r, c) = std::polar(1.0, -2.0 * kPi * k * c / n);
    }
  }
  return f;
}

Vec dft(const IndexSplit& split, const Vec& x) {
  const int n = split.n;
  if (x.size() != n) throw std::invalid_argument("dft: size mismatch");
  Vec out(n);
  for (int r = 0; r < n; ++r) {
    const double k = static_cast<double>(split.k_at(r));
    cxd acc(0, 0);
    for (int c = 0; c < n; ++c) {
      acc += x(c) * std::polar(1.0, -2.0 * kPi * k * c / n);
    }
    out(r) = acc;
  }
  return out;
}

Vec idft(const IndexSplit& split, const Vec& xb) {
  const int n = split.n;
  if (xb.size() != n) throw std::invalid_argument("idft: size mismatch");
  Vec out(n);
  for (int c = 0; c < n; ++c) {
    cxd acc(0, 0);
    for (int r = 0; r < n; ++r) {
      const double k = static_cast<double>(split.k_at(r));
      acc += xb(r) * std::polar(1.0, 2.0 * kPi * k * c / n);
    }
    out(c) = acc / static_cast<double>(n);
  }
  return out;
}

Vec steering(const IndexSplit& split, double tau_norm) {
  Vec a(split.n);
  for (int r = 0; r < split.n; ++r) {
    a(r) = std::polar(1.0, 2.0 * kPi * split.k_at(r) * tau_norm);
  }
  return a;
}

namespace {
std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t mixed = splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x9e3779b97f4a7c15ull + 1));
  return std::mt19937_64(mixed);
}

cxd draw_cgauss(std::mt19937_64& rng, double var) {
  std::normal_distribution<double> g(0.0, std::sqrt(var / 2.0));
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

Vec draw_unit_vector(std::mt19937_64& rng, int k) {
  Vec h(k);
  for (int i = 0; i < k; ++i) h(i) = draw_cgauss(rng, 1.0);
  const double nrm = h.norm();
  if (nrm == 0.0) {
    h.setZero();
    h(0) = 1.0;
    return h;
  }
  return h / nrm;
}

Vec soft_threshold(const Vec& x, double t) {
  Vec out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double m = std::abs(x(i));
    out(i) = (m > t) ? x(i) * ((m - t) / m) : cxd(0, 0);
  }
  return out;
}

}  // namespace coexist
