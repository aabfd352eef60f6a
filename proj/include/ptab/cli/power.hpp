#pragma once

#include "ptab/cli/report.hpp"
#include "ptab/sim/bootstrap.hpp"
#include "ptab/sim/iid_dgp.hpp"
#include "ptab/sim/mdp.hpp"

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ptab {

enum class PowerMethod { p_tab, tab, z };

/// "p-tab", "tab", and "dml" or "drl" for the z-test depending on the setting.
[[nodiscard]] std::string method_name(PowerMethod method, bool dynamic);
/// Accepts p-tab, tab, z, dml, drl.
[[nodiscard]] PowerMethod parse_power_method(const std::string& name);

/// One row group of the study: a data generator plus the value shown in the delta column.
struct PowerCell {
    enum class Kind { iid, mdp, bootstrap };
    Kind kind = Kind::iid;
    IidDgpSpec iid;
    MdpDgpSpec mdp;
    /// Improvement fraction for bootstrap cells.
    double lambda = 0.0;

    [[nodiscard]] bool dynamic() const noexcept { return kind != Kind::iid; }
    [[nodiscard]] std::string setting() const;
    /// delta for MDP cells, lambda for bootstrap cells, empty for i.i.d. cells.
    [[nodiscard]] std::optional<double> delta_column() const;
    [[nodiscard]] std::size_t n() const noexcept;
};

struct PowerStudyConfig {
    std::vector<PowerCell> cells;
    std::size_t reps = 100;
    std::vector<PowerMethod> methods = {PowerMethod::p_tab, PowerMethod::tab, PowerMethod::z};
    TestOptions test;
    LearnerConfig learner;
    DynamicConfig dynamic;
    /// Source panel for bootstrap cells.
    std::optional<PanelDataset> source;
    /// Days per bootstrap sample.
    std::size_t bootstrap_n = 100;
    /// Use the true dynamics as the ratio oracle for MDP cells when the backend is oracle.
    bool oracle_from_truth = true;
};

struct PowerRow {
    std::string method;
    std::string setting;
    std::optional<double> delta;
    std::size_t n = 0;
    double rejection_rate = 0.0;
    double se = 0.0;
    std::size_t reps = 0;
    /// Replicates whose pseudo-outcomes had zero spread (counted as non-rejections).
    std::size_t degenerate = 0;
};

/**
 * @brief Simulate-then-test loop. Replicate r of every cell draws from
 * RngStream(seed).child(r), so cells share random numbers and the table does
 * not depend on the thread count.
 */
[[nodiscard]] std::vector<PowerRow> run_power_study(const PowerStudyConfig& config);

/// Header `method,setting,delta,n,rejection_rate,se,reps`.
void write_power_csv(std::ostream& out, const std::vector<PowerRow>& rows);

}  // namespace ptab
