#pragma once

#include <nlohmann/json_fwd.hpp>
#include <numeric>
#include <string>
#include <vector>

#include "dae/errors.hpp"

namespace dae {

// Canonical characteristic values of a pair {E, F}: rank r of E and the
// nonincreasing list theta_0 >= ... >= theta_{mu-2} > theta_{mu-1} = 0, from
// which index mu, degree of freedom d and constraint count a follow. mu = 0
// (nonsingular E) carries an empty theta list.
struct CharacteristicProfile {
  int m = 0;
  int r = 0;
  std::vector<int> thetas;
  int mu = 0;
  int d = 0;
  int a = 0;

  static CharacteristicProfile from_thetas(int m, int r, std::vector<int> thetas);

  bool operator==(const CharacteristicProfile& o) const {
    return m == o.m && r == o.r && thetas == o.thetas && mu == o.mu && d == o.d && a == o.a;
  }
  bool operator!=(const CharacteristicProfile& o) const { return !(*this == o); }

  int theta_sum() const { return std::accumulate(thetas.begin(), thetas.end(), 0); }

  std::string to_string() const;
  nlohmann::json to_json() const;
  static CharacteristicProfile from_json(const nlohmann::json& j);
};

}  // namespace dae
