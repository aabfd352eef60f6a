#pragma once

#include "ptab/core/rng.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ptab {

/**
 * carry_over: A_{1,1} ~ Uniform{0,1}, A_{i,t} = 1 - A_{i,t-1}, A_{i,1} = 1 - A_{i-1,T};
 *             one alternating sequence across day boundaries. With even T every
 *             day receives the same sequence.
 * per_day:    each day draws its first action from a fair coin and then alternates.
 *             Both arms are observed at every step, which per-step fits need.
 */
enum class SwitchbackMode { carry_over, per_day };

[[nodiscard]] std::string to_string(SwitchbackMode mode);
/// @throws std::invalid_argument for an unknown name
[[nodiscard]] SwitchbackMode parse_switchback_mode(const std::string& name);

/**
 * @brief n x T alternating treatment matrix, rows are days.
 *
 * `first` fixes A_{1,1} (carry_over) instead of drawing it.
 * @throws std::invalid_argument if n or T is zero or first is not 0/1
 */
[[nodiscard]] std::vector<std::vector<int>> switchback_assign(std::size_t n, std::size_t horizon, RngStream& rng,
                                                              SwitchbackMode mode = SwitchbackMode::carry_over,
                                                              std::optional<int> first = std::nullopt);

}  // namespace ptab
