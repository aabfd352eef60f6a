#include "ptab/sim/switchback.hpp"

#include <stdexcept>

namespace ptab {

std::string to_string(SwitchbackMode mode) { return mode == SwitchbackMode::carry_over ? "carry_over" : "per_day"; }

SwitchbackMode parse_switchback_mode(const std::string& name) {
    if (name == "carry_over") return SwitchbackMode::carry_over;
    if (name == "per_day") return SwitchbackMode::per_day;
    throw std::invalid_argument("unknown switchback mode '" + name + "'");
}

std::vector<std::vector<int>> switchback_assign(std::size_t n, std::size_t horizon, RngStream& rng,
                                                SwitchbackMode mode, std::optional<int> first) {
    if (n == 0 || horizon == 0) throw std::invalid_argument("switchback needs n >= 1 and T >= 1");
    if (first && *first != 0 && *first != 1) throw std::invalid_argument("first action must be 0 or 1");
    std::vector<std::vector<int>> a(n, std::vector<int>(horizon));
    int current = first ? *first : (rng.bernoulli(0.5) ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) current = mode == SwitchbackMode::carry_over ? 1 - a[i - 1][horizon - 1] : (rng.bernoulli(0.5) ? 1 : 0);
        for (std::size_t t = 0; t < horizon; ++t) {
            a[i][t] = current;
            current = 1 - current;
        }
    }
    return a;
}

}  // namespace ptab
