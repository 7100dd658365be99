#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mtfrac/error.hpp"

namespace mtfrac {

/// Caputo orders 1 > alpha_1 > ... > alpha_m > 0 with weights q_1 = 1, q_j > 0.
class FracOrders {
 public:
  FracOrders(std::vector<double> alphas, std::vector<double> qs)
      : alphas_(std::move(alphas)), qs_(std::move(qs)) {
    validate(alphas_, qs_);
  }

  /// Throws DomainError naming the violated constraint.
  static void validate(const std::vector<double>& alphas, const std::vector<double>& qs) {
    if (alphas.empty()) throw DomainError("alphas must contain at least one order");
    if (alphas.size() != qs.size()) throw DomainError("alphas and qs must have the same length");
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      const bool in_range = alphas[j] > 0.0 && alphas[j] < 1.0;
      const bool decreasing = j == 0 || alphas[j] < alphas[j - 1];
      if (!in_range || !decreasing) {
        throw DomainError("alphas must be strictly decreasing in (0,1)");
      }
    }
    if (qs[0] != 1.0) throw DomainError("q_1 must equal 1");
    for (double q : qs) {
      if (!(q > 0.0)) throw DomainError("qs must be positive");
    }
  }

  std::size_t size() const noexcept { return alphas_.size(); }
  const std::vector<double>& alphas() const noexcept { return alphas_; }
  const std::vector<double>& qs() const noexcept { return qs_; }
  double alpha(std::size_t j) const { return alphas_.at(j); }
  double q(std::size_t j) const { return qs_.at(j); }
  double alpha_max() const noexcept { return alphas_.front(); }
  double alpha_min() const noexcept { return alphas_.back(); }
  double q_last() const noexcept { return qs_.back(); }

  /// Multinomial parameters (alpha_1, alpha_1 - alpha_2, ..., alpha_1 - alpha_m).
  std::vector<double> ml_betas() const {
    std::vector<double> b(alphas_.size());
    b[0] = alphas_[0];
    for (std::size_t j = 1; j < alphas_.size(); ++j) b[j] = alphas_[0] - alphas_[j];
    return b;
  }

  friend bool operator==(const FracOrders&, const FracOrders&) = default;

 private:
  std::vector<double> alphas_;
  std::vector<double> qs_;
};

}  // namespace mtfrac
