#ifndef CTXLABEL_PARAMS_HPP
#define CTXLABEL_PARAMS_HPP

#include <charconv>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>

#include "ctxlabel/energy.hpp"
#include "ctxlabel/error.hpp"
#include "ctxlabel/fuzzy_spatial.hpp"

namespace ctxlabel {

/// Inference settings. Defaults are the reference values
/// (alpha1 20, beta1 0.25, alpha2 10, beta2 0.6, alpha 1.4, beta 0.3, delta 0.8).
struct Params {
  FuzzyParams fuzzy;
  EnergyParams energy;
  std::size_t top_n = 5;
  int max_sweeps = kDefaultMaxSweeps;

  void validate() const {
    fuzzy.validate();
    energy.validate();
    if (top_n < 1) throw Error(ErrorKind::InvalidArgument, "top_n must be at least 1");
    if (max_sweeps < 1) throw Error(ErrorKind::InvalidArgument, "max_sweeps must be at least 1");
  }
};

using KeyValues = std::map<std::string, std::string, std::less<>>;

/// `key = value` lines; blank lines and `#` comments are skipped.
inline KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::size_t line_no = 0;
  auto trim = [](std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return std::string_view{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::Malformed, "line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) throw Error(ErrorKind::Malformed, "line " + std::to_string(line_no) + ": empty key or value");
    if (!out.emplace(key, value).second) throw Error(ErrorKind::DuplicateId, "key '" + key + "' set twice");
  }
  return out;
}

namespace detail {

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw Error(ErrorKind::Malformed, "value of '" + std::string(key) + "' is not a valid number: '" + std::string(value) + "'");
  return out;
}

}  // namespace detail

/// Applies one `key = value` setting; false when the key is not a parameter.
inline bool apply_param(Params& p, std::string_view key, std::string_view value) {
  using detail::parse_number;
  if (key == "alpha") p.energy.alpha = parse_number<double>(key, value);
  else if (key == "beta") p.energy.beta = parse_number<double>(key, value);
  else if (key == "delta") p.energy.delta = parse_number<double>(key, value);
  else if (key == "alpha1") p.fuzzy.alpha1 = parse_number<double>(key, value);
  else if (key == "beta1") p.fuzzy.beta1 = parse_number<double>(key, value);
  else if (key == "alpha2") p.fuzzy.alpha2 = parse_number<double>(key, value);
  else if (key == "beta2") p.fuzzy.beta2 = parse_number<double>(key, value);
  else if (key == "top_n") p.top_n = parse_number<std::size_t>(key, value);
  else if (key == "max_sweeps") p.max_sweeps = parse_number<int>(key, value);
  else return false;
  return true;
}

/// Overlays a params file on `base`; unknown keys are rejected.
inline Params parse_params(std::string_view text, Params base = {}) {
  for (const auto& [key, value] : parse_key_values(text))
    if (!apply_param(base, key, value)) throw Error(ErrorKind::Malformed, "unknown parameter '" + key + "'");
  base.validate();
  return base;
}

inline std::string serialize_params(const Params& p) {
  auto num = [](double x) { return Json(x).dump(); };
  std::string out;
  out += "alpha = " + num(p.energy.alpha) + "\n";
  out += "beta = " + num(p.energy.beta) + "\n";
  out += "delta = " + num(p.energy.delta) + "\n";
  out += "alpha1 = " + num(p.fuzzy.alpha1) + "\n";
  out += "beta1 = " + num(p.fuzzy.beta1) + "\n";
  out += "alpha2 = " + num(p.fuzzy.alpha2) + "\n";
  out += "beta2 = " + num(p.fuzzy.beta2) + "\n";
  out += "top_n = " + std::to_string(p.top_n) + "\n";
  out += "max_sweeps = " + std::to_string(p.max_sweeps) + "\n";
  return out;
}

}  // namespace ctxlabel

#endif
