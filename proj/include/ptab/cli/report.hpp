#pragma once

#include "ptab/core/data.hpp"
#include "ptab/drl/drl.hpp"
#include "ptab/nuisance/models.hpp"
#include "ptab/tab/tab.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <string>

namespace ptab {

struct TestOptions {
    std::size_t folds = 5;
    std::size_t permutations = 100;
    Combiner combiner = Combiner::cauchy();
    double alpha = 0.05;
    std::uint64_t seed = 1;
    std::size_t threads = 1;

    /// @throws std::invalid_argument with a one-line reason
    void validate() const;
};

// Stream ids under RngStream(seed). Adding a purpose must not renumber these.
inline constexpr std::uint64_t kStreamData = 0;
inline constexpr std::uint64_t kStreamCrossfit = 1;
inline constexpr std::uint64_t kStreamPermutations = 2;
inline constexpr std::uint64_t kStreamTab = 3;

/// Every method's p-value on one set of pseudo-outcomes.
struct MethodPValues {
    CombinedTest p_tab;
    TabStatistic tab;
    double z = 1.0;
};

/**
 * @brief P-TAB, single-order TAB and the z-test on the same pseudo-outcomes.
 * @throws DegenerateSampleError if the pseudo-outcomes have zero spread
 */
[[nodiscard]] MethodPValues run_methods(const PseudoOutcomes& pseudo, const TestOptions& options,
                                        const RngStream& master, std::size_t threads);

struct IidTestConfig {
    TestOptions test;
    LearnerConfig learner;
};

struct DynamicTestConfig {
    TestOptions test{.folds = 2};
    DynamicConfig dynamic;
};

/// Cross-fitted AIPW pseudo-outcomes, then every method; returns the report JSON.
[[nodiscard]] nlohmann::json test_iid_report(const IidDataset& data, const IidTestConfig& config);
/// Cross-fitted DRL pseudo-outcomes, then every method; returns the report JSON.
[[nodiscard]] nlohmann::json test_dynamic_report(const PanelDataset& panel, const DynamicTestConfig& config);

}  // namespace ptab
