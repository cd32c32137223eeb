#include "duffing/fock_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace duffing::fock {

namespace {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// sqrt(n (n-1) ... (n-k+1))
double sqrt_falling(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= static_cast<double>(n - i);
  return std::sqrt(r);
}

}  // namespace

NOPoly NOPoly::monomial(int dagger, int annihilation, Complex c) {
  if (dagger < 0 || annihilation < 0) {
    throw std::invalid_argument("negative operator power");
  }
  NOPoly p;
  p.add_term({dagger, annihilation}, c);
  return p;
}

Complex NOPoly::coeff(int dagger, int annihilation) const {
  auto it = terms_.find({dagger, annihilation});
  return it == terms_.end() ? Complex{} : it->second;
}

int NOPoly::degree() const {
  int d = 0;
  for (const auto& [key, c] : terms_) d = std::max(d, key.degree());
  return d;
}

NOPoly NOPoly::homogeneous_part(int d) const {
  NOPoly r;
  for (const auto& [key, c] : terms_) {
    if (key.degree() == d) r.terms_.emplace(key, c);
  }
  return r;
}

void NOPoly::add_term(MonomialKey key, Complex c) {
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(key, c);
  if (inserted) return;
  it->second += c;
  if (it->second == Complex{}) terms_.erase(it);
}

NOPoly& NOPoly::operator+=(const NOPoly& rhs) {
  for (const auto& [key, c] : rhs.terms_) add_term(key, c);
  return *this;
}

NOPoly& NOPoly::operator-=(const NOPoly& rhs) {
  for (const auto& [key, c] : rhs.terms_) add_term(key, -c);
  return *this;
}

NOPoly& NOPoly::operator*=(Complex c) {
  if (c == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    if (it->second == Complex{}) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

double max_coeff_diff(const NOPoly& lhs, const NOPoly& rhs) {
  double m = 0.0;
  const NOPoly diff = lhs - rhs;
  for (const auto& [key, c] : diff.terms()) m = std::max(m, std::abs(c));
  return m;
}

long long reorder_weight(int q, int r, int i) {
  if (i < 0 || i > q || i > r) return 0;
  long long fact = 1;
  for (int j = 2; j <= i; ++j) fact *= j;
  return binomial(q, i) * binomial(r, i) * fact;
}

NOPoly no_product(const NOPoly& p, const NOPoly& q) {
  // (a+^j1 a^k1)(a+^j2 a^k2) = sum_i w(k1, j2, i) a+^{j1+j2-i} a^{k1+k2-i}
  NOPoly r;
  for (const auto& [lk, lc] : p.terms()) {
    for (const auto& [rk, rc] : q.terms()) {
      const int contractions = std::min(lk.annihilation, rk.dagger);
      for (int i = 0; i <= contractions; ++i) {
        const auto w = static_cast<double>(reorder_weight(lk.annihilation, rk.dagger, i));
        r.add_term({lk.dagger + rk.dagger - i, lk.annihilation + rk.annihilation - i}, w * lc * rc);
      }
    }
  }
  return r;
}

NOPoly commutator(const NOPoly& p, const NOPoly& q) {
  return no_product(p, q) - no_product(q, p);
}

NOPoly adjoint(const NOPoly& p) {
  NOPoly r;
  for (const auto& [key, c] : p.terms()) r.add_term({key.annihilation, key.dagger}, std::conj(c));
  return r;
}

NOPoly power(const NOPoly& p, int n) {
  if (n < 0) throw std::invalid_argument("negative polynomial power");
  NOPoly r = NOPoly::identity();
  for (int i = 0; i < n; ++i) r = no_product(r, p);
  return r;
}

FockMatrix::FockMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("FockMatrix must be square");
  }
}

FockMatrix FockMatrix::identity(int dim) {
  return FockMatrix(Eigen::MatrixXcd::Identity(dim, dim));
}

Eigen::MatrixXcd FockMatrix::interior(int band) const {
  const int n = dim() - band;
  if (n <= 0) throw TruncationError("guard band leaves an empty interior");
  return entries_.topLeftCorner(n, n);
}

FockMatrix FockMatrix::adjoint() const { return FockMatrix(entries_.adjoint()); }

FockMatrix operator*(const FockMatrix& lhs, const FockMatrix& rhs) {
  return FockMatrix(lhs.entries_ * rhs.entries_);
}

FockMatrix operator+(const FockMatrix& lhs, const FockMatrix& rhs) {
  return FockMatrix(lhs.entries_ + rhs.entries_);
}

FockMatrix operator-(const FockMatrix& lhs, const FockMatrix& rhs) {
  return FockMatrix(lhs.entries_ - rhs.entries_);
}

FockMatrix to_matrix(const NOPoly& p, int dim) {
  if (dim < p.degree() + 2) {
    throw TruncationError("dim " + std::to_string(dim) + " too small for degree " +
                          std::to_string(p.degree()));
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  // <n| a+^j a^k |col> with n = col - k + j
  for (const auto& [key, c] : p.terms()) {
    for (int col = key.annihilation; col < dim; ++col) {
      const int row = col - key.annihilation + key.dagger;
      if (row >= dim) break;
      m(row, col) += c * sqrt_falling(col, key.annihilation) * sqrt_falling(row, key.dagger);
    }
  }
  return FockMatrix(std::move(m));
}

double inf_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace duffing::fock
