#include "dae/profile.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

namespace dae {

CharacteristicProfile CharacteristicProfile::from_thetas(int m, int r, std::vector<int> thetas) {
  CharacteristicProfile p;
  p.m = m;
  p.r = r;
  p.thetas = std::move(thetas);
  p.mu = static_cast<int>(p.thetas.size());
  if (p.mu == 0) {
    if (r != m) throw InvalidProfile("empty theta list requires nonsingular E (r = m)");
  } else {
    if (r >= m && p.mu > 0 && !(p.mu == 0))
      throw InvalidProfile("r must be < m for index >= 1");
    if (p.thetas.back() != 0) throw InvalidProfile("terminal theta must be zero");
    for (size_t i = 0; i + 1 < p.thetas.size(); ++i) {
      if (p.thetas[i] < p.thetas[i + 1])
        throw InvalidProfile("theta list must be nonincreasing");
    }
    if (p.mu >= 2 && p.thetas[p.mu - 2] <= 0)
      throw InvalidProfile("theta_{mu-2} must be positive for mu >= 2");
    if (p.mu > m) throw InvalidProfile("index exceeds problem size");
  }
  p.d = p.r - p.theta_sum();
  p.a = p.m - p.d;
  if (p.d < 0) throw InvalidProfile("degree of freedom would be negative");
  return p;
}

std::string CharacteristicProfile::to_string() const {
  std::ostringstream os;
  os << "{m=" << m << ", r=" << r << ", theta=(";
  for (size_t i = 0; i < thetas.size(); ++i) os << (i ? "," : "") << thetas[i];
  os << "), mu=" << mu << ", d=" << d << ", a=" << a << "}";
  return os.str();
}

nlohmann::json CharacteristicProfile::to_json() const {
  return nlohmann::json{{"m", m}, {"r", r}, {"thetas", thetas}, {"mu", mu}, {"d", d}, {"a", a}};
}

CharacteristicProfile CharacteristicProfile::from_json(const nlohmann::json& j) {
  return from_thetas(j.at("m").get<int>(), j.at("r").get<int>(),
                     j.at("thetas").get<std::vector<int>>());
}

}  // namespace dae
