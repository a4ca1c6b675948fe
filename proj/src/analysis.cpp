#include "retswitch/analysis.hpp"

#include <string>

namespace retswitch::analysis {

namespace {

// (-2)^n
mpz_class pow_minus2(unsigned n) {
  mpz_class r = pow2(n);
  return (n % 2 == 0) ? r : mpz_class(-r);
}

Rat from_int(const mpz_class& z) { return Rat(z, 1); }

}  // namespace

Rat critical_value(CriticalKind kind) {
  if (kind.k == 0) throw DomainError("critical sequences are indexed from k = 1");
  const mpz_class p = pow4(kind.k);
  const mpz_class p1 = pow4(kind.k + 1);
  switch (kind.family) {
    case CriticalFamily::Tau:
      return Rat(3 * p, 2 * p + 1);
    case CriticalFamily::Theta:
      return Rat(3 * (p1 - 1), 2 * p1 + 1);
    case CriticalFamily::Zeta:
      return Rat(3 * (2 * p - 1), p1 - 1);
  }
  throw DomainError("unknown critical family");
}

std::string_view family_name(CriticalFamily family) {
  switch (family) {
    case CriticalFamily::Tau:
      return "tau";
    case CriticalFamily::Theta:
      return "theta";
    case CriticalFamily::Zeta:
      return "zeta";
  }
  return "?";
}

Rat beta_closed(unsigned j, const Rat& tau) {
  if (j == 0) throw DomainError("beta is indexed from j = 1");
  const mpz_class j_z = j;
  const Rat coeff(6 * j_z + 1 - pow_minus2(j), 9);
  const Rat shift(pow_minus2(j - 1) - 1, 3);
  return coeff * tau - shift;
}

std::vector<Rat> beta_recurrence(unsigned j_max, const Rat& tau) {
  if (j_max < 2) throw DomainError("beta_recurrence needs j_max >= 2");
  std::vector<Rat> betas;
  betas.reserve(j_max);
  betas.push_back(tau);
  betas.push_back(tau + 1);
  const Rat two_tau = tau * 2;
  while (betas.size() < j_max) {
    const std::size_t n = betas.size();
    betas.push_back(-betas[n - 1] + betas[n - 2] * 2 + two_tau);
  }
  return betas;
}

Rat alpha_from_beta(unsigned j, const Rat& tau, std::span<const Rat> betas) {
  if (j < 2) throw ContractViolation("alpha_from_beta requires j >= 2");
  if (betas.size() < j) {
    throw ContractViolation("alpha_from_beta: beta_" + std::to_string(j) + " not supplied (" +
                            std::to_string(betas.size()) + " given)");
  }
  const Rat bracket = tau - (betas[j - 1] - betas[j - 2]) * 2;
  return (j % 2 == 0) ? Rat(1) + bracket : Rat(1) - bracket;
}

Rat alpha_closed(unsigned j, const Rat& tau) {
  if (j == 0) throw DomainError("alpha is indexed from j = 1");
  const mpz_class sign = (j % 2 == 0) ? 1 : -1;
  const Rat coeff(pow2(j) - sign, 3);
  return coeff * tau - from_int(pow2(j - 1)) + 1;
}

Horizon scan_horizon(const Rat& tau, unsigned j_cap) {
  for (unsigned j = 1; j <= j_cap; ++j) {
    const Rat a = alpha_closed(j, tau);
    const bool holds = (j % 2 == 1) ? (a > 1) : (a < 1);
    if (!holds) return j;
  }
  return std::nullopt;
}

Horizon horizon_J(const Rat& tau, unsigned j_cap) {
  if (!(tau > kRangeLow && tau < kRangeHigh)) {
    throw DomainError("horizon_J is defined for tau in (4/3, 3/2), got " + tau.str());
  }
  return scan_horizon(tau, j_cap);
}

std::string_view regime_name(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::AtTau:
      return "tau_k";
    case RegimeKind::OpenTauTheta:
      return "tau_theta";
    case RegimeKind::AtTheta:
      return "theta_k";
    case RegimeKind::OpenThetaZeta:
      return "theta_zeta";
    case RegimeKind::AtZeta:
      return "zeta_k";
    case RegimeKind::OpenZetaTauNext:
      return "zeta_tau_next";
    case RegimeKind::OutOfRange:
      return "out_of_range";
  }
  return "?";
}

std::string_view behavior_name(Behavior b) {
  return b == Behavior::Periodic ? "periodic" : "divergent_minus_inf";
}

Prediction predict(Regime regime) {
  const unsigned k = regime.k;
  switch (regime.kind) {
    case RegimeKind::AtTau:
      return {regime, Behavior::Periodic, 4 * k + 2};
    case RegimeKind::OpenTauTheta:
      return {regime, Behavior::Periodic, 2 * k + 4};
    case RegimeKind::AtTheta:
      return {regime, Behavior::DivergentMinusInf, 2 * k + 5};
    case RegimeKind::OpenThetaZeta:
      return {regime, Behavior::Periodic, 2 * k + 6};
    case RegimeKind::AtZeta:
      return {regime, Behavior::DivergentMinusInf, 4 * k + 5};
    case RegimeKind::OpenZetaTauNext:
      return {regime, Behavior::Periodic, 2 * k + 4};
    case RegimeKind::OutOfRange:
      break;
  }
  return {Regime{}, std::nullopt, 0};
}

Prediction classify(const Rat& tau, unsigned k_cap) {
  if (tau.sign() <= 0) throw DomainError("delay must be positive, got " + tau.str());
  if (tau < kRangeLow || tau >= kRangeHigh) return predict(Regime{});

  // Largest k with tau_k <= tau; tau_1 = 4/3 <= tau holds here.
  unsigned k = 1;
  while (tau_k(k + 1) <= tau) {
    if (++k > k_cap) {
      throw DomainError("classify: tau " + tau.str() + " needs k above k_cap = " + std::to_string(k_cap));
    }
  }

  const Rat t = tau_k(k);
  const Rat th = theta_k(k);
  const Rat z = zeta_k(k);
  RegimeKind kind;
  if (tau == t) {
    kind = RegimeKind::AtTau;
  } else if (tau < th) {
    kind = RegimeKind::OpenTauTheta;
  } else if (tau == th) {
    kind = RegimeKind::AtTheta;
  } else if (tau < z) {
    kind = RegimeKind::OpenThetaZeta;
  } else if (tau == z) {
    kind = RegimeKind::AtZeta;
  } else {
    kind = RegimeKind::OpenZetaTauNext;
  }
  return predict(Regime{kind, k});
}

bool lemma_positive_even(std::span<const Rat> alphas, unsigned J) {
  for (unsigned j = 2; j + 1 < J && j <= alphas.size(); j += 2) {
    if (alphas[j - 1].sign() <= 0) return false;
  }
  return true;
}

}  // namespace retswitch::analysis
