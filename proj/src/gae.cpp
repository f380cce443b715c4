#include <stdexcept>

#include "jump/ppo.hpp"

namespace jump {

GaeResult gae(const std::vector<double>& rewards, const std::vector<double>& values,
              const std::vector<double>& next_values, const std::vector<uint8_t>& boundary,
              double gamma, double lam) {
  const size_t n = rewards.size();
  if (values.size() != n || next_values.size() != n || boundary.size() != n)
    throw std::runtime_error("gae: mismatched array lengths");
  GaeResult out;
  out.adv.resize(n);
  out.ret.resize(n);
  double carry = 0.0;
  for (size_t i = n; i-- > 0;) {
    const double delta = rewards[i] + gamma * next_values[i] - values[i];
    if (boundary[i]) carry = 0.0;
    carry = delta + gamma * lam * carry;
    out.adv[i] = carry;
    out.ret[i] = carry + values[i];
  }
  return out;
}

}  // namespace jump
