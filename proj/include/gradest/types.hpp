#pragma once

#include <Eigen/Dense>

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace gradest {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

/// The seven gradient approximation methods.
enum class Method { FFD, CFD, LI, GSG, cGSG, BSG, cBSG };

inline constexpr std::array<Method, 7> kAllMethods = {Method::FFD,  Method::CFD, Method::LI,  Method::GSG,
                                                      Method::cGSG, Method::BSG, Method::cBSG};

inline constexpr std::string_view to_string(Method m) {
  switch (m) {
    case Method::FFD: return "FFD";
    case Method::CFD: return "CFD";
    case Method::LI: return "LI";
    case Method::GSG: return "GSG";
    case Method::cGSG: return "cGSG";
    case Method::BSG: return "BSG";
    case Method::cBSG: return "cBSG";
  }
  return "?";
}

/// Case-insensitive lookup; returns nullopt for unknown names.
inline std::optional<Method> parse_method(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const std::string key = lower(name);
  for (Method m : kAllMethods) {
    if (lower(to_string(m)) == key) return m;
  }
  return std::nullopt;
}

inline constexpr bool is_smoothing(Method m) {
  return m == Method::GSG || m == Method::cGSG || m == Method::BSG || m == Method::cBSG;
}

inline constexpr bool is_central(Method m) {
  return m == Method::CFD || m == Method::cGSG || m == Method::cBSG;
}

inline constexpr bool is_sphere(Method m) { return m == Method::BSG || m == Method::cBSG; }

/// Methods whose output depends on random directions (LI counts: its
/// directions are resampled unless a fixed set is supplied).
inline constexpr bool is_randomized(Method m) { return is_smoothing(m) || m == Method::LI; }

}  // namespace gradest
