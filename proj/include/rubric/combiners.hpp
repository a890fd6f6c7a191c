#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rubric {

using Combiner = std::function<double(std::span<const double>)>;

// Built-ins. Each maps an empty input to 0.0.
double combine_max(std::span<const double> xs);
double combine_min(std::span<const double> xs);
double combine_mean(std::span<const double> xs);
double combine_saturating_sum(std::span<const double> xs);

/// Name → combining function. Starts with "max", "min", "mean" and
/// "saturating-sum"; user functions are added before evaluation begins.
class CombinerRegistry {
 public:
  CombinerRegistry();

  /// Throws rubric::Error if `name` is already taken or not a valid name.
  void add(std::string name, Combiner fn);

  bool contains(std::string_view name) const;
  const Combiner& get(std::string_view name) const;

  /// Applies `name` and checks the result lies in [0,1].
  double apply(std::string_view name, std::span<const double> xs) const;

  static bool is_builtin(std::string_view name);

 private:
  std::map<std::string, Combiner, std::less<>> fns_;
};

/// Functional form of register: returns a copy with `name` added.
CombinerRegistry register_combiner(CombinerRegistry reg, std::string name, Combiner fn);

}  // namespace rubric
