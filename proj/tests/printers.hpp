#pragma once

#include <string>
#include <vector>

#include <doctest.h>

#include "qnet/plan.hpp"

namespace doctest {
template <>
struct StringMaker<std::vector<qnet::SwapDecision>> {
  static String convert(const std::vector<qnet::SwapDecision>& v) {
    std::string s = "{";
    for (const auto& d : v)
      s += "(" + std::to_string(d.node) + "," + std::to_string(d.first) + "," + std::to_string(d.second) + ")";
    return (s + "}").c_str();
  }
};
}  // namespace doctest
