#pragma once
// Sparse multivariate polynomials with double coefficients. Terms are kept in
// lexicographic exponent order, so equal polynomials have equal term lists.

#include <map>
#include <vector>

#include "mlr/base.hpp"

namespace mlr {

class Polynomial {
 public:
  struct Term {
    std::vector<int> exp;  // one exponent per variable
    double coeff;
  };

  Polynomial() : nvars_(0) {}
  explicit Polynomial(int nvars) : nvars_(nvars) { require(nvars >= 0, "Polynomial: nvars < 0"); }

  static Polynomial constant(int nvars, double c) {
    Polynomial p(nvars);
    if (c != 0.0) p.terms_.push_back({std::vector<int>(nvars, 0), c});
    return p;
  }
  // c * x_axis (axis 0-based).
  static Polynomial linear(int nvars, int axis, double c = 1.0) {
    Polynomial p(nvars);
    std::vector<int> e(nvars, 0);
    e[axis] = 1;
    if (c != 0.0) p.terms_.push_back({std::move(e), c});
    return p;
  }
  static Polynomial monomial(std::vector<int> exp, double c) {
    Polynomial p(static_cast<int>(exp.size()));
    if (c != 0.0) p.terms_.push_back({std::move(exp), c});
    return p;
  }

  int nvars() const { return nvars_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& t : terms_) {
      int s = 0;
      for (int e : t.exp) s += e;
      d = std::max(d, s);
    }
    return d;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
    return m;
  }

  template <class Vec>
  double eval(const Vec& x) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      double m = t.coeff;
      for (int v = 0; v < nvars_; ++v)
        if (t.exp[v] != 0) m *= ipow(x[v], t.exp[v]);
      s += m;
    }
    return s;
  }

  Polynomial partial(int axis) const {
    Polynomial p(nvars_);
    std::map<std::vector<int>, double> acc;
    for (const auto& t : terms_) {
      if (t.exp[axis] == 0) continue;
      auto e = t.exp;
      const double c = t.coeff * e[axis];
      e[axis] -= 1;
      acc[e] += c;
    }
    p.from_map(acc);
    return p;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    require(a.nvars_ == b.nvars_, "Polynomial: variable count mismatch");
    std::map<std::vector<int>, double> acc;
    for (const auto& t : a.terms_) acc[t.exp] += t.coeff;
    for (const auto& t : b.terms_) acc[t.exp] += t.coeff;
    Polynomial p(a.nvars_);
    p.from_map(acc);
    return p;
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + b.scaled(-1.0); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    require(a.nvars_ == b.nvars_, "Polynomial: variable count mismatch");
    std::map<std::vector<int>, double> acc;
    std::vector<int> e(a.nvars_);
    for (const auto& ta : a.terms_)
      for (const auto& tb : b.terms_) {
        for (int v = 0; v < a.nvars_; ++v) e[v] = ta.exp[v] + tb.exp[v];
        acc[e] += ta.coeff * tb.coeff;
      }
    Polynomial p(a.nvars_);
    p.from_map(acc);
    return p;
  }

  Polynomial scaled(double c) const {
    Polynomial p(nvars_);
    if (c == 0.0) return p;
    p.terms_ = terms_;
    for (auto& t : p.terms_) t.coeff *= c;
    return p;
  }

  // Drop terms with |coeff| <= tol (used after floating-point cancellation).
  Polynomial pruned(double tol) const {
    Polynomial p(nvars_);
    for (const auto& t : terms_)
      if (std::abs(t.coeff) > tol) p.terms_.push_back(t);
    return p;
  }

 private:
  void from_map(const std::map<std::vector<int>, double>& acc) {
    terms_.clear();
    for (const auto& [e, c] : acc)
      if (c != 0.0) terms_.push_back({e, c});
  }

  int nvars_;
  std::vector<Term> terms_;  // sorted lexicographically by exponent vector
};

}  // namespace mlr
