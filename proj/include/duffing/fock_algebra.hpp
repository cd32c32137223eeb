#pragma once

// Normal-ordered polynomials in a single bosonic mode with [a, a^dagger] = 1,
// and their realization as truncated number-basis matrices.

#include <complex>
#include <map>
#include <stdexcept>

#include <Eigen/Dense>

namespace duffing::fock {

using Complex = std::complex<double>;

/// Monomial (a^dagger)^dagger (a)^annihilation.
struct MonomialKey {
  int dagger = 0;
  int annihilation = 0;

  int degree() const { return dagger + annihilation; }
  bool operator==(const MonomialKey&) const = default;
};

/// Report order: descending dagger power, then ascending annihilation power.
/// For cubic monomials this is the k index of a^dagger^{3-k} a^k.
struct ReportOrder {
  bool operator()(const MonomialKey& lhs, const MonomialKey& rhs) const {
    if (lhs.dagger != rhs.dagger) return lhs.dagger > rhs.dagger;
    return lhs.annihilation < rhs.annihilation;
  }
};

class NOPoly {
 public:
  using TermMap = std::map<MonomialKey, Complex, ReportOrder>;

  NOPoly() = default;

  static NOPoly identity(Complex c = 1.0) { return monomial(0, 0, c); }
  static NOPoly annihilator() { return monomial(0, 1); }
  static NOPoly creator() { return monomial(1, 0); }
  static NOPoly number() { return monomial(1, 1); }
  static NOPoly monomial(int dagger, int annihilation, Complex c = 1.0);

  const TermMap& terms() const { return terms_; }
  Complex coeff(int dagger, int annihilation) const;
  Complex coeff(MonomialKey key) const { return coeff(key.dagger, key.annihilation); }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Largest total power present; 0 for the zero polynomial.
  int degree() const;

  /// Terms of total degree `d` only.
  NOPoly homogeneous_part(int d) const;

  /// Adds c to the coefficient of the given monomial, dropping it if it
  /// becomes exactly zero.
  void add_term(MonomialKey key, Complex c);

  NOPoly& operator+=(const NOPoly& rhs);
  NOPoly& operator-=(const NOPoly& rhs);
  NOPoly& operator*=(Complex c);

  friend NOPoly operator+(NOPoly lhs, const NOPoly& rhs) { return lhs += rhs; }
  friend NOPoly operator-(NOPoly lhs, const NOPoly& rhs) { return lhs -= rhs; }
  friend NOPoly operator*(NOPoly p, Complex c) { return p *= c; }
  friend NOPoly operator*(Complex c, NOPoly p) { return p *= c; }
  friend NOPoly operator-(NOPoly p) { return p *= -1.0; }

  /// Largest coefficient modulus over the difference.
  friend double max_coeff_diff(const NOPoly& lhs, const NOPoly& rhs);

 private:
  TermMap terms_;
};

/// Normal-ordered form of the operator product p*q.
NOPoly no_product(const NOPoly& p, const NOPoly& q);

/// [p, q] = pq - qp, normal ordered.
NOPoly commutator(const NOPoly& p, const NOPoly& q);

/// Hermitian adjoint: (j,k) -> (k,j) with conjugated coefficient.
NOPoly adjoint(const NOPoly& p);

/// Integer power by repeated normal-ordered products.
NOPoly power(const NOPoly& p, int n);

/// Exact number of ways the reordering identity
///   a^q (a^dagger)^r = sum_i reorder_weight(q, r, i) (a^dagger)^{r-i} a^{q-i}
/// contributes with i contractions: C(q,i) C(r,i) i!.
long long reorder_weight(int q, int r, int i);

/// Number-basis realization truncated to N states.  Entries are the exact
/// matrix elements <n|p|m> for n, m < N.
class FockMatrix {
 public:
  FockMatrix() = default;
  explicit FockMatrix(Eigen::MatrixXcd entries);

  static FockMatrix identity(int dim);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return entries_; }
  Eigen::MatrixXcd& matrix() { return entries_; }

  /// Leading (dim - band) x (dim - band) block, where truncation cannot reach.
  Eigen::MatrixXcd interior(int band) const;

  FockMatrix adjoint() const;

  friend FockMatrix operator*(const FockMatrix& lhs, const FockMatrix& rhs);
  friend FockMatrix operator+(const FockMatrix& lhs, const FockMatrix& rhs);
  friend FockMatrix operator-(const FockMatrix& lhs, const FockMatrix& rhs);

 private:
  Eigen::MatrixXcd entries_;
};

class TruncationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requires dim >= degree(p) + 2.
FockMatrix to_matrix(const NOPoly& p, int dim);

/// Max absolute row sum (the induced infinity norm).
double inf_norm(const Eigen::MatrixXcd& m);

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXcd& m);

}  // namespace duffing::fock
