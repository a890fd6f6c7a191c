#include "rubric/combiners.hpp"

#include "rubric/error.hpp"
#include "rubric/names.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace rubric {

double combine_max(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return *std::max_element(xs.begin(), xs.end());
}

double combine_min(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return *std::min_element(xs.begin(), xs.end());
}

double combine_mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double combine_saturating_sum(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return std::min(1.0, sum);
}

namespace {
constexpr std::array<std::string_view, 4> kBuiltins = {"max", "min", "mean",
                                                       "saturating-sum"};
}

CombinerRegistry::CombinerRegistry() {
  fns_.emplace("max", combine_max);
  fns_.emplace("min", combine_min);
  fns_.emplace("mean", combine_mean);
  fns_.emplace("saturating-sum", combine_saturating_sum);
}

bool CombinerRegistry::is_builtin(std::string_view name) {
  return std::find(kBuiltins.begin(), kBuiltins.end(), name) != kBuiltins.end();
}

void CombinerRegistry::add(std::string name, Combiner fn) {
  if (!is_valid_name(name)) throw Error("invalid combiner name: '" + name + "'");
  name = to_lower(name);
  if (is_builtin(name)) throw Error("combiner name collides with built-in: " + name);
  if (fns_.contains(name)) throw Error("combiner already registered: " + name);
  if (!fn) throw Error("empty combiner function: " + name);
  fns_.emplace(std::move(name), std::move(fn));
}

bool CombinerRegistry::contains(std::string_view name) const {
  return fns_.find(name) != fns_.end();
}

const Combiner& CombinerRegistry::get(std::string_view name) const {
  auto it = fns_.find(name);
  if (it == fns_.end()) throw Error("unknown combiner: " + std::string(name));
  return it->second;
}

double CombinerRegistry::apply(std::string_view name, std::span<const double> xs) const {
  double v = get(name)(xs);
  if (!(v >= 0.0 && v <= 1.0))
    throw Error("combiner " + std::string(name) + " returned a value outside [0,1]");
  return v;
}

CombinerRegistry register_combiner(CombinerRegistry reg, std::string name, Combiner fn) {
  reg.add(std::move(name), std::move(fn));
  return reg;
}

}  // namespace rubric
