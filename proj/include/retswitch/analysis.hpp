#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "retswitch/rat.hpp"

namespace retswitch {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A caller broke a precondition that the types could not express.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace analysis {

/// Lower end of the delay range covered by the closed-form classification.
inline const Rat kRangeLow{4, 3};
/// Open upper end of that range; every critical sequence converges here.
inline const Rat kRangeHigh{3, 2};

inline constexpr unsigned kDefaultKCap = 64;

enum class CriticalFamily { Tau, Theta, Zeta };

struct CriticalKind {
  CriticalFamily family;
  unsigned k;
};

/// tau_k = 3*4^k/(2*4^k+1), theta_k = 3*(4^(k+1)-1)/(2*4^(k+1)+1),
/// zeta_k = 3*(2*4^k-1)/(4^(k+1)-1). Throws DomainError for k = 0.
Rat critical_value(CriticalKind kind);
inline Rat tau_k(unsigned k) { return critical_value({CriticalFamily::Tau, k}); }
inline Rat theta_k(unsigned k) { return critical_value({CriticalFamily::Theta, k}); }
inline Rat zeta_k(unsigned k) { return critical_value({CriticalFamily::Zeta, k}); }

std::string_view family_name(CriticalFamily family);

/// Switching instant beta_j (j >= 1) from its closed form.
Rat beta_closed(unsigned j, const Rat& tau);

/// [beta_1 .. beta_jmax] by iterating beta_{j+1} = -beta_j + 2 beta_{j-1} + 2 tau
/// from the seeds beta_1 = tau, beta_2 = tau + 1.
std::vector<Rat> beta_recurrence(unsigned j_max, const Rat& tau);

/// alpha_j = 1 + (-1)^j (tau - 2 (beta_j - beta_{j-1})), j >= 2.
/// `betas[i]` holds beta_{i+1}.
Rat alpha_from_beta(unsigned j, const Rat& tau, std::span<const Rat> betas);

/// Turning coordinate alpha_j (j >= 1) from its closed form. Only meaningful
/// for j <= J; see horizon_J.
Rat alpha_closed(unsigned j, const Rat& tau);

/// nullopt stands for an unbounded horizon (no failure found below the cap).
using Horizon = std::optional<unsigned>;

/// First index j at which "alpha_j > 1 for odd j, alpha_j < 1 for even j"
/// fails, evaluated on alpha_closed. No domain check.
Horizon scan_horizon(const Rat& tau, unsigned j_cap);

/// J for tau in (4/3, 3/2); throws DomainError outside that interval.
Horizon horizon_J(const Rat& tau, unsigned j_cap);

enum class RegimeKind {
  AtTau,
  OpenTauTheta,
  AtTheta,
  OpenThetaZeta,
  AtZeta,
  OpenZetaTauNext,
  OutOfRange,
};

struct Regime {
  RegimeKind kind = RegimeKind::OutOfRange;
  unsigned k = 0;  // 0 iff OutOfRange

  friend bool operator==(const Regime&, const Regime&) = default;
};

std::string_view regime_name(RegimeKind kind);

enum class Behavior { Periodic, DivergentMinusInf };

std::string_view behavior_name(Behavior b);

struct Prediction {
  Regime regime;
  /// Empty when the regime is OutOfRange.
  std::optional<Behavior> behavior;
  /// Switchings per least period (Periodic) or before divergence (Divergent).
  unsigned switch_count = 0;

  [[nodiscard]] bool in_range() const { return regime.kind != RegimeKind::OutOfRange; }
};

/// Locates tau among the interleaved critical sequences and returns the
/// predicted behavior. Throws DomainError for tau <= 0 or when k_cap is too
/// small to reach tau.
Prediction classify(const Rat& tau, unsigned k_cap = kDefaultKCap);

/// Predicted behavior and switch count for a given regime.
Prediction predict(Regime regime);

/// True iff every alpha_{2m} with 2m + 1 < J is strictly positive.
/// `alphas[i]` holds alpha_{i+1}; entries beyond the supplied list are not checked.
bool lemma_positive_even(std::span<const Rat> alphas, unsigned J);

}  // namespace analysis
}  // namespace retswitch
