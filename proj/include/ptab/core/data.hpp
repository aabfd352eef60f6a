#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace ptab {

/// One unit of an i.i.d. experiment: covariates, binary treatment, outcome.
struct IidRecord {
    std::vector<double> x;
    int a = 0;
    double y = 0.0;
};

/**
 * @brief n records of (X, A, Y), stored column-wise.
 *
 * Invariants (checked on construction): n >= 2, a in {0, 1}, every value finite.
 */
class IidDataset {
public:
    IidDataset(Eigen::MatrixXd x, std::vector<int> a, Eigen::VectorXd y);

    static IidDataset from_records(std::span<const IidRecord> records);

    [[nodiscard]] std::size_t size() const noexcept { return a_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(x_.cols()); }

    [[nodiscard]] const Eigen::MatrixXd& x() const noexcept { return x_; }
    [[nodiscard]] const std::vector<int>& a() const noexcept { return a_; }
    [[nodiscard]] const Eigen::VectorXd& y() const noexcept { return y_; }

    [[nodiscard]] IidRecord record(std::size_t i) const;
    /// Rows `idx` in the given order.
    [[nodiscard]] IidDataset subset(std::span<const std::size_t> idx) const;
    [[nodiscard]] std::size_t count_arm(int arm) const noexcept;

private:
    Eigen::MatrixXd x_;
    std::vector<int> a_;
    Eigen::VectorXd y_;
};

/// One day: T steps of (x_t, a_t, y_t); x is T x d.
struct Trajectory {
    Eigen::MatrixXd x;
    std::vector<int> a;
    Eigen::VectorXd y;

    [[nodiscard]] std::size_t horizon() const noexcept { return a.size(); }
};

/// n days sharing horizon T and state dimension d.
class PanelDataset {
public:
    explicit PanelDataset(std::vector<Trajectory> days);

    [[nodiscard]] std::size_t size() const noexcept { return days_.size(); }
    [[nodiscard]] std::size_t horizon() const noexcept { return horizon_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] const Trajectory& day(std::size_t i) const { return days_.at(i); }
    [[nodiscard]] const std::vector<Trajectory>& days() const noexcept { return days_; }

    [[nodiscard]] PanelDataset subset(std::span<const std::size_t> idx) const;
    /// X_{i,t} for all days as an n x d matrix; t is 0-based.
    [[nodiscard]] Eigen::MatrixXd states_at(std::size_t t) const;

private:
    std::vector<Trajectory> days_;
    std::size_t horizon_ = 0;
    std::size_t dim_ = 0;
};

}  // namespace ptab
